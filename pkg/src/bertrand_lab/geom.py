"""3-vector algebra, orthonormal pairs and parameter grids.

Vectors are plain numpy arrays whose last axis has length 3, so every
function here works equally on a single vector and on a (N, 3) stack of
samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePair

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])

TOL_UNIT = 1e-12
MIN_SAMPLES = 8


def _f(a) -> np.ndarray:
    """As a floating array, keeping extended precision when given."""
    a = np.asarray(a)
    return a if a.dtype.kind == "f" else a.astype(float)


def vec(x, y, z) -> np.ndarray:
    return np.array([x, y, z], dtype=float)


def dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sum(_f(a) * _f(b), axis=-1)


def norm(a: np.ndarray) -> np.ndarray:
    return np.sqrt(dot(a, a))


def cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vector product, expanded along the first row of det(e; a; b)."""
    a = _f(a)
    b = _f(b)
    a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2]
    b1, b2, b3 = b[..., 0], b[..., 1], b[..., 2]
    return np.stack([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1], axis=-1)


def det3(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return dot(cross(a, b), c)


def unit(a: np.ndarray) -> np.ndarray:
    a = _f(a)
    return a / norm(a)[..., None]


@dataclass(frozen=True)
class FramePair:
    """An ordered pair of vectors meant to live in Delta = {(a, b) in S2 x S2 : a.b = 0}."""

    nu1: np.ndarray
    nu2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "nu1", np.asarray(self.nu1, dtype=float))
        object.__setattr__(self, "nu2", np.asarray(self.nu2, dtype=float))

    @property
    def mu(self) -> np.ndarray:
        return cross(self.nu1, self.nu2)

    def defect(self) -> float:
        """Largest violation of the unit-length and orthogonality constraints."""
        d = np.concatenate(
            [
                np.abs(norm(self.nu1) - 1.0).ravel(),
                np.abs(norm(self.nu2) - 1.0).ravel(),
                np.abs(dot(self.nu1, self.nu2)).ravel(),
            ]
        )
        return float(d.max())

    def in_delta(self, tol: float = TOL_UNIT) -> bool:
        return self.defect() <= tol


def orthonormalize(nu1: np.ndarray, nu2: np.ndarray, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Gram-Schmidt: normalise ``nu1`` first, then ``nu2`` against it.

    Works row-wise on (N, 3) stacks. Raises DegeneratePair when ``nu1``
    vanishes or the two inputs are parallel within ``tol``.
    """
    nu1 = _f(nu1)
    nu2 = _f(nu2)
    n1 = norm(nu1)
    n2 = norm(nu2)
    if np.any(n1 <= tol) or np.any(n2 <= tol):
        raise DegeneratePair("frame vector has zero length")
    e1 = nu1 / n1[..., None]
    w = nu2 - dot(nu2, e1)[..., None] * e1
    nw = norm(w)
    if np.any(nw <= tol * n2):
        raise DegeneratePair("frame vectors are parallel")
    return e1, w / nw[..., None]


def project_to_delta(pair: FramePair) -> FramePair:
    e1, e2 = orthonormalize(pair.nu1, pair.nu2)
    return FramePair(e1, e2)


@dataclass(frozen=True)
class Grid:
    t0: float
    t1: float
    n_samples: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if self.n_samples < MIN_SAMPLES:
            raise ValueError(f"a grid needs at least {MIN_SAMPLES} samples, got {self.n_samples}")
        if values.shape != (self.n_samples,):
            raise ValueError("grid values do not match n_samples")
        if not np.all(np.diff(values) > 0):
            raise ValueError("grid values must be strictly increasing")
        if values[0] != self.t0 or values[-1] != self.t1:
            raise ValueError("grid must start at t0 and end at t1")

    @classmethod
    def uniform(cls, t0: float, t1: float, n: int) -> "Grid":
        if not t1 > t0:
            raise ValueError(f"degenerate interval [{t0}, {t1}]")
        values = np.linspace(t0, t1, n)
        values[0], values[-1] = t0, t1
        return cls(float(t0), float(t1), int(n), values)

    @classmethod
    def from_values(cls, values) -> "Grid":
        values = np.asarray(values, dtype=float)
        return cls(float(values[0]), float(values[-1]), len(values), values)

    @property
    def h(self) -> float:
        """Mean spacing."""
        return (self.t1 - self.t0) / (self.n_samples - 1)

    def is_uniform(self) -> bool:
        d = np.diff(self.values)
        return bool(np.allclose(d, self.h, rtol=1e-9, atol=0.0))

    def same_as(self, other: "Grid") -> bool:
        return self.n_samples == other.n_samples and bool(np.array_equal(self.values, other.values))

    def __len__(self) -> int:
        return self.n_samples
