import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bertrand_lab.errors import DegeneratePair
from bertrand_lab.geom import FramePair, Grid, cross, dot, norm, orthonormalize, project_to_delta
from bertrand_lab.numerics import (
    adaptive_simpson,
    adaptive_simpson_cumulative,
    cumulative_integral,
    derivative,
    fornberg_weights,
    unwrap_period,
)

vec3 = arrays(np.float64, 3, elements=st.floats(-10, 10, allow_nan=False, allow_infinity=False))


@pytest.mark.parametrize(
    "a, b, expected",
    [((1, 0, 0), (0, 1, 0), (0, 0, 1)), ((1, 1, 0), (0, 1, 1), (1, -1, 1)), ((2, -1, 3), (2, -1, 3), (0, 0, 0))],
)
def test_cross_examples(a, b, expected):
    assert np.array_equal(cross(np.array(a, float), np.array(b, float)), np.array(expected, float))


@settings(max_examples=200)
@given(vec3, vec3)
def test_cross_is_orthogonal_to_factors(a, b):
    c = cross(a, b)
    bound = 1e-14 * max(1.0, float(norm(a) * norm(b))) * 10
    assert abs(dot(a, c)) <= bound * max(1.0, float(norm(a)))
    assert abs(dot(b, c)) <= bound * max(1.0, float(norm(b)))


def test_cross_broadcasts_over_rows():
    a = np.tile([1.0, 0, 0], (4, 1))
    b = np.tile([0, 1.0, 0], (4, 1))
    assert np.array_equal(cross(a, b), np.tile([0, 0, 1.0], (4, 1)))


@pytest.mark.parametrize(
    "pair, expected",
    [
        (((1, 0, 0), (0, 1, 0)), ((1, 0, 0), (0, 1, 0))),
        (((2, 0, 0), (0, 3, 0)), ((1, 0, 0), (0, 1, 0))),
        (((1, 0, 0), (1e-13, 1, 0)), ((1, 0, 0), (0, 1, 0))),
    ],
)
def test_project_to_delta_examples(pair, expected):
    out = project_to_delta(FramePair(*pair))
    assert np.allclose(out.nu1, expected[0], atol=1e-12, rtol=0)
    assert np.allclose(out.nu2, expected[1], atol=1e-12, rtol=0)
    assert out.in_delta()


@settings(max_examples=200)
@given(vec3, vec3)
def test_project_to_delta_idempotent(a, b):
    if norm(a) < 1e-3 or norm(b) < 1e-3 or norm(cross(a, b)) < 1e-3 * norm(a) * norm(b):
        return
    once = project_to_delta(FramePair(a, b))
    twice = project_to_delta(once)
    assert once.defect() < 1e-14
    assert np.max(np.abs(twice.nu1 - once.nu1)) < 1e-14
    assert np.max(np.abs(twice.nu2 - once.nu2)) < 1e-14


def test_parallel_pair_is_refused():
    with pytest.raises(DegeneratePair):
        orthonormalize(np.array([1.0, 0, 0]), np.array([2.0, 0, 0]))
    with pytest.raises(DegeneratePair):
        orthonormalize(np.zeros(3), np.array([0.0, 1, 0]))


def test_framepair_mu_and_defect():
    p = FramePair([0, 1, 0], [0, 0, 1])
    assert np.array_equal(p.mu, [1, 0, 0])
    assert p.defect() == 0.0
    assert FramePair([1, 0, 0], [0.1, 1, 0]).defect() == pytest.approx(0.1)


def test_grid_invariants():
    g = Grid.uniform(-1.0, 2.0, 31)
    assert g.values[0] == -1.0 and g.values[-1] == 2.0 and len(g) == 31
    assert g.is_uniform() and g.h == pytest.approx(0.1)
    with pytest.raises(ValueError):
        Grid.uniform(0, 1, 7)
    with pytest.raises(ValueError):
        Grid.uniform(1, 1, 10)
    with pytest.raises(ValueError):
        Grid.from_values([0, 1, 2, 3, 3, 4, 5, 6])
    assert Grid.from_values(g.values).same_as(g)


# -- numerics -----------------------------------------------------------------


def test_fornberg_weights_reproduce_classic_stencil():
    xs = np.array([-2.0, -1, 0, 1, 2])
    assert np.allclose(fornberg_weights(0.0, xs, 1), [1 / 12, -2 / 3, 0, 2 / 3, -1 / 12], atol=1e-15)
    assert np.allclose(fornberg_weights(0.0, xs, 2), [-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12], atol=1e-14)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_derivative_is_exact_on_low_degree_polynomials(order):
    t = np.linspace(-1, 2, 40)
    y = 1 + 2 * t - t**2 + 0.5 * t**3
    exact = {1: 2 - 2 * t + 1.5 * t**2, 2: -2 + 3 * t, 3: np.full_like(t, 3.0)}[order]
    assert np.max(np.abs(derivative(y, t, order) - exact)) < 1e-9


def test_derivative_converges_at_fourth_order():
    errs = []
    for n in (100, 200):
        t = np.linspace(0, 2, n)
        errs.append(np.max(np.abs(derivative(np.sin(t), t)[5:-5] - np.cos(t)[5:-5])))
    assert errs[0] / errs[1] > 12  # 2^4 = 16 in the asymptotic regime


def test_derivative_on_nonuniform_grid_and_vector_values():
    t = np.sort(np.concatenate([[0.0, 1.0], np.random.default_rng(3).uniform(0, 1, 60)]))
    y = np.stack([np.sin(t), np.cos(t), t**2], axis=-1)
    d = derivative(y, t)
    assert np.max(np.abs(d - np.stack([np.cos(t), -np.sin(t), 2 * t], axis=-1))) < 1e-5


def test_cumulative_integrals():
    t = np.linspace(0, math.pi, 201)
    assert cumulative_integral(np.sin(t), t)[-1] == pytest.approx(2.0, abs=1e-8)
    assert cumulative_integral(np.ones_like(t), t, initial=1.0)[0] == 1.0
    assert adaptive_simpson(np.sin, np.array(0.0), np.array(math.pi), 1e-12) == pytest.approx(2.0, abs=1e-11)
    s = adaptive_simpson_cumulative(lambda x: np.sqrt(1 + np.cos(x) ** 2), t)
    assert s[0] == 0.0 and np.all(np.diff(s) > 0)


def test_unwrap_period_modulo_pi():
    raw = np.array([1.4, 1.5, -1.55, -1.45])  # crosses pi/2 and wraps by pi
    out = unwrap_period(raw, math.pi)
    assert np.max(np.abs(np.diff(out))) < 0.2
    assert np.allclose((out - raw) / math.pi, np.round((out - raw) / math.pi))
