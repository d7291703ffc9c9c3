import math

import numpy as np
import pytest

from bertrand_lab.errors import Degenerate, DegenerateInput, InvalidInit, NotRegular
from bertrand_lab.expr import CurveSpec
from bertrand_lab.fixtures import HELIX, circle
from bertrand_lab.frenet import (
    FrenetInit,
    apparatus_from_samples,
    arc_length_reparam,
    check_nondegenerate,
    frenet_apparatus,
    frenet_residuals,
    integrate_frenet,
)
from bertrand_lab.geom import Grid, cross


@pytest.fixture(scope="module")
def helix_app():
    return frenet_apparatus(HELIX, Grid.uniform(HELIX.t0, HELIX.t1, 512))


def test_helix_closed_form(helix_app):
    app = helix_app
    assert np.max(np.abs(app.kappa - 0.5)) < 1e-12
    assert np.max(np.abs(app.tau - 0.5)) < 1e-12
    assert np.max(np.abs(app.speed - math.sqrt(2))) < 1e-12
    t = app.param
    tangent = np.stack([-np.sin(t), np.cos(t), np.ones_like(t)], axis=-1) / math.sqrt(2)
    assert np.max(np.abs(app.t - tangent)) < 1e-14
    assert np.max(np.abs(app.n - np.stack([-np.cos(t), -np.sin(t), 0 * t], axis=-1))) < 1e-14


def test_helix_sample_view(helix_app):
    s = helix_app[10]
    assert s.kappa == pytest.approx(0.5) and s.param == helix_app.param[10]
    assert len(list(helix_app)) == 512


def test_frame_is_right_handed_and_residuals_small(helix_app):
    assert np.max(np.abs(cross(helix_app.t, helix_app.n) - helix_app.b)) < 1e-10
    assert frenet_residuals(helix_app)[3:-3].max() < 1e-4


def test_circle_radius_two():
    c = circle(2.0)
    app = frenet_apparatus(c, Grid.uniform(c.t0, c.t1, 200))
    assert np.allclose(app.kappa, 0.5, atol=1e-14) and np.max(np.abs(app.tau)) < 1e-14


def test_line_is_degenerate():
    line = CurveSpec("t", "0", "0", 0, 1)
    with pytest.raises(Degenerate):
        frenet_apparatus(line, Grid.uniform(0, 1, 20))
    rep = check_nondegenerate(line, Grid.uniform(0, 1, 20))
    assert not rep.ok and rep.min_cross_norm == 0.0


def test_stationary_point_is_not_regular():
    cusp = CurveSpec("t^3", "t^2", "t^4", -1, 1)
    with pytest.raises(NotRegular) as info:
        frenet_apparatus(cusp, Grid.uniform(-1, 1, 21))
    assert info.value.param == pytest.approx(0.0)


def test_arc_length():
    table = arc_length_reparam(HELIX, Grid.uniform(HELIX.t0, HELIX.t1, 128))
    assert table.length == pytest.approx(2 * math.pi * math.sqrt(2), abs=1e-9)
    c = circle(2.0)
    assert arc_length_reparam(c, Grid.uniform(c.t0, c.t1, 64)).length == pytest.approx(4 * math.pi, abs=1e-9)
    unit = CurveSpec("cos(t)", "sin(t)", "0", 0, 3)
    tab = arc_length_reparam(unit, Grid.uniform(0, 3, 50))
    assert np.max(np.abs(tab.s - tab.t)) < 1e-10
    # the resampled apparatus is unit speed and t(s) inverts s(t)
    assert np.allclose(tab.apparatus.speed, 1.0) and tab.fd_speed_error < 1e-4
    assert np.allclose(tab.t_of_s, tab.s_grid, atol=1e-10)


def test_arc_length_inverse_on_helix():
    tab = arc_length_reparam(HELIX, Grid.uniform(HELIX.t0, HELIX.t1, 64), n_samples=100)
    assert np.max(np.abs(tab.t_of_s - tab.s_grid / math.sqrt(2))) < 1e-12


def test_integrate_unit_circle():
    app = integrate_frenet("1", "0", FrenetInit.standard(), Grid.uniform(0, 2 * math.pi, 400))
    center = np.array([0.0, 1.0, 0.0])  # n0 = e2 points to the centre
    assert np.max(np.abs(np.linalg.norm(app.gamma - center, axis=1) - 1)) < 1e-7


def test_integrate_recovers_helix_invariants():
    app = integrate_frenet("1/2", "1/2", FrenetInit.standard(), Grid.uniform(0, 8, 801))
    fd = apparatus_from_samples(app.param, app.gamma)
    sl = slice(5, -5)
    assert np.max(np.abs(fd.kappa[sl] - 0.5)) < 1e-5
    assert np.max(np.abs(fd.tau[sl] - 0.5)) < 1e-5
    # congruent to the unit helix: the helix has chord |g(s) - g(0)|^2 = 2 - 2 cos(s/sqrt2) + s^2/2
    s = app.param
    chord2 = np.sum((app.gamma - app.gamma[0]) ** 2, axis=1)
    assert np.max(np.abs(chord2 - (2 - 2 * np.cos(s / math.sqrt(2)) + s**2 / 2))) < 1e-8


def test_integrate_round_trip_relative():
    app = integrate_frenet("1 + 0.3*sin(t)", "0.5*cos(2*t)", FrenetInit.standard(), Grid.uniform(0, 4, 801))
    fd = apparatus_from_samples(app.param, app.gamma)
    sl = slice(5, -5)
    assert np.max(np.abs(fd.kappa[sl] / app.kappa[sl] - 1)) < 1e-5
    assert np.max(np.abs(fd.tau[sl] - app.tau[sl])) < 1e-5 * np.max(np.abs(app.tau))


def test_tan_fixture_satisfies_the_relation():
    app = integrate_frenet("1", "tan(t)", FrenetInit.standard(), Grid.uniform(-1.2, 1.2, 241))
    s = app.param
    assert np.allclose(app.tau, np.tan(s))
    # A tau' = kappa (A^2 tau^2 + 1) with A = 1 since tan' = 1 + tan^2
    assert np.max(np.abs(app.tau_prime[3:-3] - (1 + np.tan(s[3:-3]) ** 2))) < 1e-5 * np.max(1 + np.tan(s) ** 2)


def test_integrate_rejects_bad_input():
    with pytest.raises(DegenerateInput):
        integrate_frenet("t", "0", FrenetInit.standard(), Grid.uniform(-1, 1, 21))
    bad = FrenetInit(np.zeros(3), [1, 0, 0], [0, 1, 0], [0, 0, -1])
    with pytest.raises(InvalidInit):
        integrate_frenet("1", "0", bad, Grid.uniform(0, 1, 21))


def test_extended_precision_path_keeps_dtype():
    app = integrate_frenet("1", "0.2", FrenetInit.standard(), Grid.uniform(0, 1, 50), dtype=np.longdouble)
    assert app.gamma.dtype == np.longdouble
    fd = apparatus_from_samples(app.param, app.gamma)
    assert fd.t.dtype == np.longdouble
