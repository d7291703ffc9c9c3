import math

import numpy as np
import pytest

from bertrand_lab.bertrand import Verdict
from bertrand_lab.errors import VerificationFailed
from bertrand_lab.fixtures import example_framed, spherical_legendre, straight_line_rotating
from bertrand_lab.framed import recompute_curvature
from bertrand_lab.framed_mates import (
    FramedPairKind,
    Witness,
    classify_framed,
    construct_framed_mate,
    framed_mate_curvature,
    solve_angle,
)
from bertrand_lab.numerics import derivative

K = FramedPairKind
SL = slice(3, -3)


@pytest.fixture(scope="module")
def example():
    return example_framed(1024)


@pytest.fixture(scope="module")
def line():
    return straight_line_rotating()


@pytest.fixture(scope="module")
def legendre():
    return spherical_legendre()


def _mod_pi(x):
    return (np.asarray(x) + math.pi / 2) % math.pi - math.pi / 2


def test_kind_parsing():
    assert K.parse("Nu1,Mu") is K.NU1_MU and K.parse("mu_nu2") is K.MU_NU2
    assert (K.NU2_MU.v, K.NU2_MU.w) == ("nu2", "mu")
    with pytest.raises(ValueError):
        K.parse("nu3-mu")


def test_solve_angle_handles_free_and_wrapped_samples():
    t = np.linspace(-1, 1, 41)
    theta, step = solve_angle(np.cos(t), -np.sin(t), 1.0)  # theta = -t + pi/2 mod pi
    assert step < 0.1
    assert np.allclose(_mod_pi(theta - (math.pi / 2 - t)), 0, atol=1e-12)
    P = np.where(np.abs(t) < 0.2, 0.0, 1.0)
    theta, step = solve_angle(P, np.zeros_like(t), 1.0)
    assert step == 0.0


def test_mu_mu_on_rotating_line(line):
    rep = classify_framed(line, "mu-mu", {"lambda": 0.5})
    assert rep.verdict is Verdict.FEASIBLE
    c = rep.mate_curvature
    assert np.allclose(c.m, 0) and np.allclose(c.n, 0)
    assert np.allclose(c.l, 1.5) and np.allclose(c.alpha, 1.0)  # alpha + lambda' with lambda constant
    assert rep.residuals["curvature"] < 1e-4


def test_mu_mu_curvature_with_varying_lambda(line):
    t = line.param
    w = Witness(0.3 * t**2, np.zeros_like(t))
    c = framed_mate_curvature(line, "mu-mu", w)
    assert np.max(np.abs(c.alpha - (1 + 0.6 * t))[SL]) < 1e-9
    assert np.allclose(c.l, 1.5)


def test_nu1_nu1_on_example_with_any_lambda(example):
    for lam in (3.0, -0.25):
        rep = classify_framed(example, "nu1-nu1", {"lambda": lam})
        assert rep.verdict is Verdict.FEASIBLE
        assert rep.witness.lam_constant == lam
        assert np.allclose(_mod_pi(rep.theta), 0.0, atol=1e-9)


def test_nu1_mu_on_example(example):
    t = example.param
    rep = classify_framed(example, "nu1-mu")
    assert rep.verdict is Verdict.FEASIBLE
    assert np.max(np.abs(rep.lam + 2 * np.sin(t))) < 1e-8
    # the mate's mu is the base nu1
    assert np.max(np.abs(rep.mate.mu - example.nu1)) < 1e-12
    assert np.max(np.abs(rep.mate_curvature.alpha + 2 * np.cos(t))[SL]) < 1e-6


def test_explicit_lambda_function_for_nu1_mu(example):
    t = example.param
    rep = classify_framed(example, "nu1-mu", {"lambda": list(-2 * np.sin(t))})
    assert rep.verdict is Verdict.FEASIBLE and rep.residuals["product"] < 1e-12


def test_nu2_mu_needs_vanishing_l(line):
    rep = classify_framed(line, "nu2-mu")
    assert rep.verdict is Verdict.INFEASIBLE
    assert "l" in rep.reason


def test_mu_nu1_on_example(example):
    rep = classify_framed(example, "mu-nu1")
    assert rep.verdict is Verdict.FEASIBLE
    t = example.param
    assert np.allclose(_mod_pi(rep.theta - (math.pi / 2 - t)), 0, atol=1e-9)
    # gamma_bar = gamma - (integral of alpha) mu, with the integral anchored at t0
    lam = (1 - np.cos(2 * t)) / 2
    assert np.max(np.abs(rep.lam - lam)) < 1e-6
    dg = derivative(rep.mate.gamma, t)
    assert np.max(np.abs(np.sum(dg * example.mu, axis=-1))) < 1e-5


def test_mu_nu1_integration_constant(example):
    rep = classify_framed(example, "mu-nu1", {"integration_constant": 2.0})
    assert rep.lam[0] == 2.0


def test_zero_lambda_witness_fails(example):
    t = example.param
    with pytest.raises(VerificationFailed):
        construct_framed_mate(example, "nu1-nu1", Witness(np.zeros_like(t), np.zeros_like(t), 0.0))


def test_nu2_nu1_with_constant_theta(legendre):
    rep = classify_framed(legendre, "nu2-nu1", {"lambda": 1.0})
    assert rep.verdict is Verdict.FEASIBLE
    th = rep.theta
    if np.ptp(th) == 0.0:
        base = recompute_curvature(legendre) if legendre.curvature is None else legendre.curvature
        assert np.max(np.abs(rep.mate_curvature.n + base.m)) < 1e-12


@pytest.mark.parametrize("fixture", ["example", "legendre"])
def test_vanishing_l_makes_nu2_kinds_feasible(fixture, request):
    fc = request.getfixturevalue(fixture)
    for kind in ("nu2-nu1", "nu2-nu2"):
        assert classify_framed(fc, kind, construct=False).verdict is Verdict.FEASIBLE


@pytest.mark.parametrize("fixture", ["example", "legendre", "line"])
def test_every_feasible_construction_is_verified(fixture, request):
    fc = request.getfixturevalue(fixture)
    for kind in K:
        rep = classify_framed(fc, kind)
        if rep.verdict is not Verdict.FEASIBLE:
            continue
        assert rep.residuals["w_equals_v"] < 1e-12
        assert rep.residuals["delta_defect"] < 1e-10
        assert rep.residuals["frame_orthogonality"] < 1e-5
        assert rep.residuals["curvature"] < 1e-4, kind


def test_swapped_kinds_share_the_base_construction(example):
    a = classify_framed(example, "nu1-nu1", {"lambda": 1.0})
    b = classify_framed(example, "nu1-nu2", {"lambda": 1.0})
    assert np.array_equal(a.mate.gamma, b.mate.gamma)
    assert np.array_equal(a.mate.nu1, b.mate.nu2) and np.array_equal(a.mate.nu2, b.mate.nu1)
