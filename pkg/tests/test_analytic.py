import math

import numpy as np
import pytest
from scipy import integrate

from symtoric.analytic import (
    alpha_integral,
    envelope_check,
    envelope_gap,
    facet_slack,
    hessian,
    integral_exp,
    lattice_point_orbits,
    ma_residual,
    make_test_potential,
    moment_map,
    positivity_check,
    random_invariant_weights,
    u_bar,
    u_tilde,
    zero_potential,
)
from symtoric.catalog import FamilySpec
from conftest import group_of, polytope_of

S11 = FamilySpec("S", (1, 1))


def direct_u(delta, y):
    pts = np.array(delta.lattice_points, dtype=float)
    return np.log(np.exp(np.asarray(y) @ pts.T).sum(axis=-1))


def test_u_tilde_values():
    p1 = polytope_of("P1")
    assert u_tilde(p1, [0.0]) == pytest.approx(math.log(3))
    assert u_tilde(p1, [5.0]) == pytest.approx(math.log(math.exp(5) + 1 + math.exp(-5)))
    assert u_tilde(polytope_of("P2"), [0.0, 0.0]) == pytest.approx(math.log(10))
    # stable far out where the naive sum overflows
    assert u_tilde(p1, [1000.0]) == pytest.approx(1000.0)


def test_u_bar_is_max_over_vertices():
    delta = polytope_of("Bl1P2")
    rng = np.random.default_rng(1)
    y = rng.normal(size=(50, 2)) * 3
    expected = (y @ np.array(delta.vertices, dtype=float).T).max(axis=1)
    assert np.allclose(u_bar(delta, y), expected)


def test_envelope_gap_matches_direct_difference():
    delta = polytope_of("P2")
    y = np.random.default_rng(2).normal(size=(100, 2))
    assert np.allclose(envelope_gap(delta, y), direct_u(delta, y) - u_bar(delta, y), atol=1e-12)


def test_moment_map_and_hessian_at_origin():
    p1 = polytope_of("P1")
    assert np.allclose(moment_map(p1, [0.0]), [0.0])
    assert np.allclose(hessian(p1, [0.0]), [[2 / 3]])


@pytest.mark.parametrize("key", ["P2", "Bl1P2", S11])
def test_derivatives_match_finite_differences(key):
    delta = polytope_of(key)
    n = delta.dim
    y = np.random.default_rng(3).uniform(-3, 3, size=(20, n))
    h = 1e-5
    eye = np.eye(n)
    fd_grad = np.stack([(direct_u(delta, y + h * e) - direct_u(delta, y - h * e)) / (2 * h) for e in eye], axis=-1)
    assert np.allclose(moment_map(delta, y), fd_grad, atol=1e-8)
    fd_hess = np.stack([(moment_map(delta, y + h * e) - moment_map(delta, y - h * e)) / (2 * h) for e in eye], axis=-1)
    assert np.allclose(hessian(delta, y), fd_hess, atol=1e-8)


def test_moment_map_lands_inside_polytope():
    delta = polytope_of(S11)
    y = np.random.default_rng(4).uniform(-10, 10, size=(500, 3))
    assert (facet_slack(delta, y) > 0).all()
    grad = moment_map(delta, y)
    assert (grad @ np.array(delta.fan.rays, dtype=float).T < 1).all()


def test_envelope_check():
    delta = polytope_of("V1")
    report = envelope_check(delta, np.random.default_rng(5).uniform(-10, 10, size=(1000, 2)))
    assert report.ok
    assert report.upper_constant == pytest.approx(math.log(7))
    assert report.max_gap <= math.log(7)


def test_integral_exp_p1_closed_form():
    est = integral_exp(polytope_of("P1"), 1.0)
    assert est.value == pytest.approx(2 * math.pi / (3 * math.sqrt(3)), abs=1e-10)
    assert est.bound == 2 and est.bound_ok


@pytest.mark.parametrize("tau", [0.5, 2.0, 4.0])
def test_integral_exp_p1_against_quad(tau):
    # even integrand; on y >= 0 write it as e^(-tau y) (1 + e^-y + e^-2y)^-tau
    half, _ = integrate.quad(
        lambda y: math.exp(-tau * y) * (1 + math.exp(-y) + math.exp(-2 * y)) ** -tau, 0, np.inf, epsabs=1e-13
    )
    ref = 2 * half
    assert integral_exp(polytope_of("P1"), tau).value == pytest.approx(ref, rel=1e-8)


def test_integral_exp_p2_against_dblquad():
    delta = polytope_of("P2")
    ref, _ = integrate.dblquad(
        lambda y, x: math.exp(-direct_u(delta, np.array([x, y]))), -40, 40, -40, 40, epsabs=1e-10
    )
    assert integral_exp(delta, 1.0).value == pytest.approx(ref, rel=1e-6)


def test_monte_carlo_agrees_with_quadrature():
    delta = polytope_of("P2")
    quad = integral_exp(delta, 1.0)
    mc = integral_exp(delta, 1.0, method="monte_carlo", samples=50_000)
    assert mc.method == "monte_carlo" and mc.standard_error > 0
    assert abs(mc.value - quad.value) < 4 * mc.standard_error


def test_monte_carlo_is_seeded():
    delta = polytope_of(S11)
    a = integral_exp(delta, 1.0, seed=7)
    b = integral_exp(delta, 1.0, seed=7)
    c = integral_exp(delta, 1.0, seed=8)
    assert a.value == b.value and a.value != c.value


def test_integral_exp_rejects_bad_tau():
    with pytest.raises(ValueError):
        integral_exp(polytope_of("P1"), 0.0)


def test_test_potential_shift_p1():
    delta = polytope_of("P1")
    pot = make_test_potential(delta, [1.0, 2.0, 1.0])
    assert pot.shift == pytest.approx(math.log(4 / 3), abs=1e-9)
    y = np.linspace(-20, 20, 4001)[:, None]
    assert pot(y).max() == pytest.approx(0.0, abs=1e-9)
    assert positivity_check(delta, pot).ok


def test_weights_by_mapping():
    delta = polytope_of("P1")
    pot = make_test_potential(delta, {(-1,): 1.0, (0,): 2.0, (1,): 1.0})
    assert pot.shift == pytest.approx(math.log(4 / 3), abs=1e-9)


def test_weight_validation():
    delta = polytope_of("P1")
    with pytest.raises(ValueError):
        make_test_potential(delta, [1.0, 2.0])
    with pytest.raises(ValueError):
        make_test_potential(delta, [1.0, -2.0, 1.0])
    with pytest.raises(ValueError, match="invariant"):
        make_test_potential(delta, [1.0, 2.0, 3.0], group_of("P1"))


def test_invariant_weights_are_constant_on_orbits():
    delta, group = polytope_of("P2"), group_of("P2")
    w = random_invariant_weights(delta, group, np.random.default_rng(0))
    for orbit in lattice_point_orbits(delta, group):
        assert np.allclose(w[orbit], w[orbit[0]])
    assert ((w >= 0.25) & (w <= 4)).all()
    assert sorted(len(o) for o in lattice_point_orbits(delta, group)) == [1, 3, 6]


def test_alpha_with_zero_potential_is_integral_exp():
    delta = polytope_of("P1")
    est = alpha_integral(delta, 0.5)
    assert est.value == pytest.approx(integral_exp(delta, 1.0).value, rel=1e-10)
    assert est.bound == pytest.approx(4.0)


def test_alpha_against_quad():
    delta = polytope_of("P1")
    pot = make_test_potential(delta, [2.0, 0.5, 2.0])
    lam = 0.9
    f = lambda y: math.exp(-lam * float(pot(np.array([y]))) - float(u_tilde(delta, np.array([y]))))
    ref, _ = integrate.quad(f, -np.inf, np.inf, epsabs=1e-12)
    assert alpha_integral(delta, lam, pot).value == pytest.approx(ref, rel=1e-7)


def test_alpha_batch_shape():
    delta, group = polytope_of("V1"), group_of("V1")
    rng = np.random.default_rng(1)
    pots = [make_test_potential(delta, random_invariant_weights(delta, group, rng), group) for _ in range(3)]
    out = alpha_integral(delta, [0.5, 0.9], pots)
    assert len(out) == 3 and all(len(row) == 2 for row in out)
    single = alpha_integral(delta, 0.9, pots[1])
    assert single.value == pytest.approx(out[1][1].value)
    with pytest.raises(ValueError):
        alpha_integral(delta, 1.0)


def test_ma_residual_with_zero_potential():
    delta = polytope_of("P1")
    r = ma_residual(delta, zero_potential(delta), 0.5, np.array([[0.0]]))
    assert r == pytest.approx([2 / 3 - 1 / 3])
