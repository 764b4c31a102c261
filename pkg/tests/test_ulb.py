import numpy as np
import pytest
from numpy.polynomial import polynomial as npoly

from ulbkit import levenshtein as lev
from ulbkit import orthopoly, pmspace
from ulbkit.errors import MonotonicityError, ParameterError
from ulbkit.orthopoly import PolyCoeffs
from ulbkit.pmspace import make_space
from ulbkit.potentials import builtin
from ulbkit.ulb import (
    hermite_certificate,
    improve_with_qj,
    ulb,
    ulb_odd_branch,
    verify_certificate,
)
from ulbkit.ulb import test_functions as compute_test_functions
from ulbkit.ulb import _improve_given_rule, _test_functions_from_rule

RIESZ1 = builtin("riesz", p=1)
GAUSS = builtin("gaussian", c=1)


def test_simplex_value_matches_tetrahedron():
    rep = ulb(make_space("sphere", n=3), 4, RIESZ1)
    assert rep.value_sum == pytest.approx(12 * (3 / 8) ** 0.5, rel=1e-12)
    assert rep.value_sum == pytest.approx(7.348469, abs=1e-6)
    assert rep.value_mean == pytest.approx(rep.value_sum / 4, rel=1e-14)
    assert rep.certificate_checks.below_h and rep.certificate_checks.f_geq


@pytest.mark.parametrize("n", range(3, 9))
def test_cross_polytope_closed_form(n):
    space = make_space("sphere", n=n)
    for h in (RIESZ1, GAUSS):
        rep = ulb(space, 2 * n, h)
        expected = 2 * n * h(-1.0) + 4 * n * (n - 1) * h(0.0)
        assert rep.value_sum == pytest.approx(expected, rel=1e-12)


def test_hamming_pair_value():
    rep = ulb(make_space("hamming", n=8, q=2), 2, RIESZ1)
    assert rep.rule.tau == 1
    assert np.allclose(rep.rule.nodes, [-1.0])
    assert rep.value_sum == pytest.approx(2 * RIESZ1(-1.0), rel=1e-13)


def test_value_identity_against_certificate():
    # M^2 sum(rho h) must equal M (f_0 M - f(1)) for the certificate
    for space, M in [
        (make_space("sphere", n=4), 11),
        (make_space("hamming", n=8, q=2), 20),
        (make_space("projective", n=4, field_dim=2), 30),
    ]:
        rep = ulb(space, M, GAUSS)
        f0 = sum(c * pmspace.moment(space, i) for i, c in enumerate(rep.certificate.coeffs))
        f1 = orthopoly.poly_eval(space, rep.certificate, 1.0)
        assert M * (f0 * M - f1) == pytest.approx(rep.value_sum, rel=1e-8)


def test_hermite_reproduces_low_degree_polynomials():
    space = make_space("sphere", n=3)
    h = builtin("series", coeffs=[0.5, 0.2, 0.1, 0.05])  # degree 3
    rep = ulb(space, 9, h)  # level 3
    tt = np.linspace(-1, 1, 21)
    err = orthopoly.poly_eval(space, rep.certificate, tt) - h(tt)
    assert np.max(np.abs(err)) < 1e-12


def test_hermite_single_node_is_tangent_line():
    n = 4
    space = make_space("sphere", n=n)
    h = builtin("riesz", p=2)
    rule = lev.quadrature_rule(space, n + 1)
    f = hermite_certificate(rule, h)
    assert f.degree == 1
    a = -1.0 / n
    assert npoly.polyval(a, f.coeffs) == pytest.approx(h(a), rel=1e-13)
    assert f.coeffs[1] == pytest.approx(h.deriv(a, 1), rel=1e-13)


def test_hermite_interpolation_residuals():
    for space, M in [(make_space("sphere", n=3), 11), (make_space("hamming", n=10, q=2), 40)]:
        rule = lev.quadrature_rule(space, M)
        f = hermite_certificate(rule, GAUSS)
        scale = max(1.0, np.max(np.abs(GAUSS(rule.nodes))))
        for i, a in enumerate(rule.nodes):
            assert abs(npoly.polyval(a, f.coeffs) - GAUSS(a)) < 1e-10 * scale
            if not (rule.epsilon == 1 and i == 0):
                df = npoly.polyval(a, npoly.polyder(f.coeffs))
                assert abs(df - GAUSS.deriv(a, 1)) < 1e-9 * scale


def test_verify_certificate_negative_cases():
    space = make_space("sphere", n=3)
    rep = ulb(space, 4, RIESZ1)
    shifted = PolyCoeffs(npoly.polyadd(rep.certificate.coeffs, [1.0]))
    checks = verify_certificate(space, shifted, RIESZ1)
    assert not checks.below_h
    neg_q1 = PolyCoeffs([0.0, -1.0])
    checks = verify_certificate(space, neg_q1, RIESZ1)
    assert not checks.f_geq
    assert checks.min_q_coefficient == pytest.approx(-1.0, abs=1e-12)


def test_refuses_non_monotone_potential():
    with pytest.raises(MonotonicityError):
        ulb(make_space("sphere", n=3), 4, builtin("log"))


def test_test_function_identities():
    for space, M in [
        (make_space("sphere", n=3), 7),
        (make_space("hamming", n=8, q=2), 25),
        (make_space("johnson", n=10, w=5), 40),
        (make_space("projective", n=4, field_dim=2), 60),
    ]:
        rep = compute_test_functions(space, M, range(0, rep_tau(space, M) + 1))
        assert rep.values[0] == pytest.approx(1.0, abs=1e-12)  # j=0 gives b_0
        for j, v in zip(rep.js, rep.values):
            if 1 <= j <= rep.tau:
                assert abs(v) < 1e-8


def rep_tau(space, M):
    return lev.tau_for_cardinality(space, M)[2]


def test_test_functions_deterministic_roundtrip():
    space = make_space("sphere", n=4)
    a = compute_test_functions(space, 24, range(1, 11))
    b = compute_test_functions(space, 24, range(1, 11))
    assert np.max(np.abs(np.array(a.values) - np.array(b.values))) < 1e-10
    # an independently rebuilt rule gives the same values
    rule = lev.quadrature_rule(space, 24)
    c = _test_functions_from_rule(space, rule, range(1, 11))
    assert np.max(np.abs(np.array(a.values) - np.array(c.values))) < 1e-10


def test_negative_test_function_found_on_sphere_sweep():
    found = []
    for M in range(5, 30):
        rep = compute_test_functions(make_space("sphere", n=3), M, range(1, 12))
        if rep.first_negative_j is not None:
            found.append((M, rep.first_negative_j))
    assert found, "expected at least one improvable configuration"


def test_improvement_identity():
    space = make_space("sphere", n=3)
    M, j = 7, 6
    base = ulb(space, M, RIESZ1)
    imp = improve_with_qj(space, M, RIESZ1, j)
    info = imp.improvement
    assert info["p_j"] < -1e-8
    gain = imp.value_sum - info["base_value_sum"]
    assert gain == pytest.approx(-(M**2) * info["eta"] * info["p_j"], rel=1e-10)
    assert imp.value_sum > base.value_sum
    assert imp.certificate_checks.below_h and imp.certificate_checks.f_geq


def test_improvement_with_explicit_eta():
    space = make_space("sphere", n=3)
    imp = improve_with_qj(space, 7, RIESZ1, 6, eta=1e-6)
    assert imp.improvement["eta"] == 1e-6
    # vanishing eta recovers the base value
    base = ulb(space, 7, RIESZ1).value_sum
    tiny = improve_with_qj(space, 7, RIESZ1, 6, eta=1e-12)
    assert tiny.value_sum == pytest.approx(base, rel=1e-9)


def test_improvement_preconditions():
    space = make_space("sphere", n=3)
    with pytest.raises(ParameterError):
        improve_with_qj(space, 7, RIESZ1, 7)  # P_7 > 0
    with pytest.raises(ParameterError):
        improve_with_qj(space, 7, RIESZ1, 2)  # j <= tau
    with pytest.raises(ParameterError):
        improve_with_qj(space, 7, RIESZ1, 6, eta=-1.0)


def test_improvement_on_synthetic_rule():
    # a perturbed-weight rule exposes the mechanism even where every real
    # test function is nonnegative
    space = make_space("sphere", n=5)
    rule = lev.quadrature_rule(space, 12)
    bad = lev.QuadratureRule(
        space, rule.M, rule.k, rule.epsilon, rule.tau, rule.s,
        rule.nodes, rule.weights * np.array([1.0, 1.3]), rule.power_sum_residual,
    )
    rep = _test_functions_from_rule(space, bad, range(rule.tau + 1, rule.tau + 6))
    j = next(j for j, v in zip(rep.js, rep.values) if v < -1e-6)
    # the perturbed rule is not exact, so skip the certificate cross-check
    imp = _improve_given_rule(space, bad, GAUSS, j, check_value=False)
    info = imp.improvement
    gain = imp.value_sum - info["base_value_sum"]
    assert gain == pytest.approx(-(bad.M**2) * info["eta"] * info["p_j"], rel=1e-9)


def test_odd_branch_reports():
    space = make_space("sphere", n=3)
    main = ulb(space, 5, RIESZ1)
    odd = ulb_odd_branch(space, 5, RIESZ1)
    assert odd.odd_branch and odd.rule.tau == 1
    assert odd.value_sum <= main.value_sum + 1e-12
    # boundary cardinality: both branches give the same rule and value
    at_boundary = ulb_odd_branch(space, 4, RIESZ1)
    assert at_boundary.value_sum == pytest.approx(ulb(space, 4, RIESZ1).value_sum, rel=1e-12)


def test_odd_branch_below_oracle_minimum():
    from ulbkit import oracle

    space = make_space("sphere", n=3)
    _, best, _ = oracle.minimize_sphere(3, 5, RIESZ1, restarts=8, seed=3)
    assert ulb_odd_branch(space, 5, RIESZ1).value_sum <= best + 1e-8
    assert ulb(space, 5, RIESZ1).value_sum <= best + 1e-8


@pytest.mark.parametrize(
    "space,M",
    [
        (make_space("sphere", n=3), 9),
        (make_space("sphere", n=5), 16),
        (make_space("hamming", n=8, q=2), 20),
        (make_space("johnson", n=12, w=4), 50),
        (make_space("projective", n=4, field_dim=2), 60),
    ],
    ids=lambda x: getattr(x, "label", lambda: str(x))(),
)
def test_level_optimality_feasible_polynomials(space, M):
    # no feasible polynomial of degree <= tau beats the bound
    rng = np.random.default_rng(5)
    rep = ulb(space, M, GAUSS)
    grid = np.cos(np.pi * np.arange(1, 501) / 500)
    cmin = float(np.min(GAUSS(grid)))
    for _ in range(50):
        theta = rng.uniform(0.0, 1.0)
        coeffs = theta * rep.certificate.coeffs.copy()
        coeffs[0] += (1 - theta) * cmin
        F = PolyCoeffs(coeffs)
        f0 = sum(c * pmspace.moment(space, i) for i, c in enumerate(F.coeffs))
        f1 = orthopoly.poly_eval(space, F, 1.0)
        assert M * (f0 * M - f1) <= rep.value_sum + 1e-8 * max(1.0, rep.value_sum)


def test_circle_bound_attained_by_regular_polygons():
    # n=2 exercises the half-integer weight-exponent corner, and every
    # cardinality is attained by the regular polygon
    s2 = make_space("sphere", n=2)
    for M in (2, 3, 4, 5, 6, 8):
        rep = ulb(s2, M, RIESZ1)
        ang = 2 * np.pi * np.arange(M) / M
        pts = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        from ulbkit import oracle

        direct = oracle.energy(s2, oracle.make_code(s2, pts), RIESZ1)
        assert rep.value_sum == pytest.approx(direct, rel=1e-12)
        assert rep.certificate_checks.below_h and rep.certificate_checks.f_geq


def test_quadrature_identity_on_reports():
    rng = np.random.default_rng(9)
    for space, M in [(make_space("sphere", n=4), 12), (make_space("hamming", n=6, q=2), 10)]:
        rep = ulb(space, M, GAUSS)
        rule = rep.rule
        for _ in range(200):
            c = rng.uniform(-1, 1, rule.tau + 1)
            f0 = sum(ci * pmspace.moment(space, i) for i, ci in enumerate(c))
            resid = f0 - npoly.polyval(1.0, c) / M
            resid -= float(np.dot(rule.weights, npoly.polyval(rule.nodes, c)))
            assert abs(resid) <= 1e-9 * np.sum(np.abs(c))
