"""Finite differences, quadrature and angle utilities on sampled data."""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson


def fornberg_weights(x0: float, xs: np.ndarray, m: int) -> np.ndarray:
    """Weights of the ``m``-th derivative at ``x0`` from samples at ``xs``.

    Fornberg's recursion; exact for polynomials of degree ``len(xs) - 1``.
    """
    xs = np.asarray(xs)
    if xs.dtype.kind != "f":
        xs = xs.astype(float)
    x0 = xs.dtype.type(x0)
    n = len(xs)
    c = np.zeros((n, m + 1), dtype=xs.dtype)
    c1 = 1.0
    c4 = xs[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


@lru_cache(maxsize=64)
def _integer_stencils(n: int, order: int, width: int, dtype=np.float64) -> tuple[np.ndarray, np.ndarray]:
    """Offsets and weights (unit spacing) for every index of an n-point uniform grid."""
    half = width // 2
    starts = np.clip(np.arange(n) - half, 0, n - width)
    weights = np.empty((n, width), dtype=dtype)
    cache: dict[int, np.ndarray] = {}
    for i in range(n):
        rel = i - starts[i]
        if rel not in cache:
            cache[rel] = fornberg_weights(rel, np.arange(width, dtype=dtype), order)
        weights[i] = cache[rel]
    return starts, weights


def derivative(y: np.ndarray, t: np.ndarray, order: int = 1, width: int | None = None) -> np.ndarray:
    """Finite-difference derivative of samples ``y`` (first axis) w.r.t. ``t``.

    Centered stencils in the interior; near the ends the same-width window is
    shifted inward, so the accuracy order is kept up to the boundary. The
    arithmetic runs in the wider of the two input float types.
    """
    dtype = np.result_type(np.asarray(y).dtype, np.asarray(t).dtype, np.float64)
    y = np.asarray(y, dtype=dtype)
    t = np.asarray(t, dtype=dtype)
    n = len(t)
    if width is None:
        width = 5 if order == 1 else 7
    if n < width:
        raise ValueError(f"need at least {width} samples for a derivative of order {order}")
    d = np.diff(t)
    h = (t[-1] - t[0]) / (n - 1)
    flat = y.reshape(n, -1)
    if np.allclose(d, h, rtol=1e-9, atol=0.0):
        starts, w = _integer_stencils(n, order, width, dtype.type)
        idx = starts[:, None] + np.arange(width)[None, :]
        out = np.einsum("iw,iwk->ik", w, flat[idx]) / h**order
    else:
        half = width // 2
        starts = np.clip(np.arange(n) - half, 0, n - width)
        out = np.empty_like(flat)
        for i in range(n):
            sl = slice(starts[i], starts[i] + width)
            out[i] = fornberg_weights(t[i], t[sl], order) @ flat[sl]
    return out.reshape(y.shape)


def cumulative_integral(y: np.ndarray, t: np.ndarray, initial: float = 0.0) -> np.ndarray:
    """Running integral of samples, anchored at ``t[0]``; fourth-order accurate."""
    return initial + cumulative_simpson(np.asarray(y, float), x=np.asarray(t, float), initial=0.0)


def cumulative_trapezoid(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    y = np.asarray(y, float)
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t))
    return out


def adaptive_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    a: np.ndarray,
    b: np.ndarray,
    tol: float = 1e-13,
    max_depth: int = 40,
) -> np.ndarray:
    """Integral of ``f`` over each interval [a_i, b_i] by adaptive Simpson.

    Every interval is refined independently with the classical
    |S2 - S1| <= 15 tol criterion plus Richardson correction; ``tol`` is
    shared out in proportion to interval length. All active subintervals are
    evaluated in one vectorised call per sweep.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float)).copy()
    b = np.atleast_1d(np.asarray(b, dtype=float)).copy()
    a, b = np.broadcast_arrays(a, b)
    a, b = a.copy(), b.copy()
    cell = np.arange(len(a))
    fa = np.asarray(f(a), float)
    fb = np.asarray(f(b), float)
    m = 0.5 * (a + b)
    fm = np.asarray(f(m), float)
    whole = (b - a) / 6.0 * (fa + 4 * fm + fb)
    span = float(np.sum(np.abs(b - a))) or 1.0
    eps = tol * np.abs(b - a) / span
    totals = np.zeros(len(a))
    for depth in range(max_depth + 1):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm = np.asarray(f(lm), float)
        frm = np.asarray(f(rm), float)
        left = (m - a) / 6.0 * (fa + 4 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4 * frm + fb)
        err = left + right - whole
        done = (np.abs(err) <= 15 * eps) | (depth == max_depth)
        np.add.at(totals, cell[done], (left + right + err / 15.0)[done])
        keep = ~done
        if not keep.any():
            break
        a, m, b = a[keep], m[keep], b[keep]
        fa, fm, fb = fa[keep], fm[keep], fb[keep]
        flm, frm = flm[keep], frm[keep]
        left, right = left[keep], right[keep]
        cell, eps = cell[keep], eps[keep]
        # split every surviving interval into its two halves
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
        fa, fb = np.concatenate([fa, fm]), np.concatenate([fm, fb])
        fm = np.concatenate([flm, frm])
        whole = np.concatenate([left, right])
        cell = np.concatenate([cell, cell])
        eps = np.concatenate([eps, eps]) / 2.0
        m = 0.5 * (a + b)
    return totals


def adaptive_simpson_cumulative(
    f: Callable[[np.ndarray], np.ndarray],
    nodes: np.ndarray,
    tol: float = 1e-13,
    max_depth: int = 40,
) -> np.ndarray:
    """Integral of ``f`` from ``nodes[0]`` to every node."""
    nodes = np.asarray(nodes, dtype=float)
    cells = adaptive_simpson(f, nodes[:-1], nodes[1:], tol, max_depth)
    return np.concatenate([[0.0], np.cumsum(cells)])


def unwrap_period(theta: np.ndarray, period: float) -> np.ndarray:
    """Shift each angle by multiples of ``period`` to minimise consecutive jumps."""
    theta = np.asarray(theta, float).copy()
    for i in range(1, len(theta)):
        k = np.round((theta[i] - theta[i - 1]) / period)
        theta[i] -= k * period
    return theta


def max_abs(x: np.ndarray) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def argmax_abs(x: np.ndarray) -> int:
    return int(np.argmax(np.abs(np.asarray(x))))


def rel_close(a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    """Mixed test |a - b| <= tol * max(1, |b|): relative for large values, absolute near zero."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    return np.abs(a - b) <= tol * np.maximum(1.0, np.abs(b))


def rel_error(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    return np.abs(a - b) / np.maximum(1.0, np.abs(b))
