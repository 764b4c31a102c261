"""Universal lower bounds on code energy, with interpolation certificates.

For a cardinality M served by the level-tau quadrature rule, the energy
of every M-point code is at least M^2 * sum_i rho_i h(alpha_i) whenever
h is absolutely monotone.  The bound is witnessed by the Hermite
interpolant of h at the (mostly doubled) nodes: a polynomial below h
with nonnegative expansion coefficients, and it cannot be beaten by any
feasible polynomial of degree at most tau.  Test functions P_j decide
whether higher-degree polynomials can improve it.
"""

from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import orthopoly, pmspace
from .errors import (
    ConditionError,
    ConvergenceError,
    DegreeOverflowError,
    MonotonicityError,
    ParameterError,
)
from .levenshtein import QuadratureRule, odd_branch_rule, quadrature_rule
from .orthopoly import PolyCoeffs, adjacent_system, eval_q_all, expand_in_q, poly_eval
from .pmspace import SpaceDescriptor
from .potentials import Potential, check_absolutely_monotone

_FGEQ_TOL = -1e-8
_BELOW_TOL = 1e-9
_IDENTITY_TOL = 1e-8


@dataclass(frozen=True)
class CertificateChecks:
    below_h: bool
    f_geq: bool
    min_q_coefficient: float
    max_excess: float  # most positive value of f - h on the grid
    worst_t: float


@dataclass(frozen=True, eq=False)
class UlbReport:
    space: SpaceDescriptor
    M: int
    rule: QuadratureRule
    value_sum: float
    value_mean: float
    certificate: PolyCoeffs
    certificate_checks: CertificateChecks
    energy_convention: str = "sum"
    odd_branch: bool = False
    improvement: dict | None = None

    @property
    def value(self) -> float:
        return self.value_sum if self.energy_convention == "sum" else self.value_mean


@dataclass(frozen=True, eq=False)
class TestFunctionReport:
    space: SpaceDescriptor
    M: int
    s: float
    tau: int
    js: tuple
    values: tuple
    first_negative_j: int | None


def ulb(
    space: SpaceDescriptor,
    M: int,
    h: Potential,
    convention: str = "sum",
    abs_tol: float = _BELOW_TOL,
    rel_tol: float = _IDENTITY_TOL,
) -> UlbReport:
    """Universal lower bound on the energy of M-point codes.

    Parameters
    ----------
    space : SpaceDescriptor
    M : int
        Cardinality, at least 2.
    h : Potential
        Must be absolutely monotone up to order tau + 1; checked, and
        refused otherwise since the bound's hypothesis would fail.
    convention : str
        "sum" bounds the full ordered pair sum; "mean" divides by M.
    abs_tol, rel_tol : float
        Grid tolerance of the pointwise certificate check, and relative
        tolerance of the certificate-vs-quadrature value cross-check.

    Returns
    -------
    UlbReport
        Bound values in both conventions plus the validated certificate.
    """
    rule = quadrature_rule(space, M)
    return _report_from_rule(space, rule, h, convention, abs_tol=abs_tol, rel_tol=rel_tol)


def ulb_odd_branch(
    space: SpaceDescriptor,
    M: int,
    h: Potential,
    convention: str = "sum",
    abs_tol: float = _BELOW_TOL,
    rel_tol: float = _IDENTITY_TOL,
) -> UlbReport:
    """The odd-level bound, valid on even intervals as well (weaker there)."""
    rule = odd_branch_rule(space, M)
    report = _report_from_rule(space, rule, h, convention, abs_tol=abs_tol, rel_tol=rel_tol)
    return replace(report, odd_branch=True)


def _report_from_rule(
    space, rule, h, convention="sum", certificate=None, value_sum=None, check_value=True,
    abs_tol=_BELOW_TOL, rel_tol=_IDENTITY_TOL,
):
    if convention not in ("sum", "mean"):
        raise ParameterError(f"unknown energy convention {convention!r}")
    _require_monotone(h, rule.tau + 1)
    M = rule.M
    if value_sum is None:
        value_sum = M * M * float(np.dot(rule.weights, h(rule.nodes)))
    if certificate is None:
        certificate = hermite_certificate(rule, h)
    checks = verify_certificate(space, certificate, h, below_tol=abs_tol)
    if check_value:
        _check_value_identity(space, rule, certificate, value_sum, rel_tol)
    return UlbReport(
        space, M, rule, value_sum, value_sum / M, certificate, checks, convention
    )


def _require_monotone(h: Potential, order: int):
    ok, violation = check_absolutely_monotone(h, order)
    if not ok:
        raise MonotonicityError(
            f"{h.label()} is not absolutely monotone to order {order}; "
            f"first violation {violation}"
        )


def _check_value_identity(space, rule, certificate, value_sum, rel_tol=_IDENTITY_TOL):
    # the certificate must reproduce the bound through M*(f_0*M - f(1))
    f0 = float(
        sum(c * pmspace.moment(space, i) for i, c in enumerate(certificate.coeffs))
    )
    f1 = poly_eval(space, certificate, 1.0)
    alt = rule.M * (f0 * rule.M - f1)
    if abs(alt - value_sum) > rel_tol * max(1.0, abs(value_sum)):
        raise ConditionError(
            f"certificate value {alt} disagrees with quadrature value {value_sum}",
            where=None,
        )


def hermite_certificate(rule: QuadratureRule, h: Potential) -> PolyCoeffs:
    """Hermite interpolant of h at the rule's nodes.

    Every node is matched to first order except a node at -1, which is
    matched to order zero only.  Degree is at most tau.
    """
    zs, vals = [], []
    for a in rule.nodes:
        if abs(a + 1.0) <= 1e-12 and rule.epsilon == 1:
            zs.append(a)
            vals.append((float(h(a)),))
        else:
            zs.append(a)
            vals.append((float(h(a)), float(h.deriv(a, 1))))
    return _hermite_newton(zs, vals)


def _hermite_newton(nodes, values) -> PolyCoeffs:
    """Newton-form Hermite interpolation with confluent divided differences.

    ``values[i]`` holds (f(z_i),) or (f(z_i), f'(z_i)) per node.
    """
    z, y = [], []
    for zi, vi in zip(nodes, values):
        for _ in vi:
            z.append(zi)
        y.append(list(vi))
    m = len(z)
    z = np.asarray(z, dtype=float)
    table = np.zeros((m, m))
    row = 0
    for vi in y:
        for r in range(len(vi)):
            table[row + r, 0] = vi[0]
        if len(vi) == 2:
            # confluent pair: f[z, z] = f'(z) sits at the pair's first row
            table[row, 1] = vi[1]
        row += len(vi)
    for col in range(1, m):
        for i in range(m - col):
            if z[i + col] == z[i]:
                continue  # confluent entry already filled from the derivative
            table[i, col] = (table[i + 1, col - 1] - table[i, col - 1]) / (z[i + col] - z[i])
    coeffs = np.zeros(1)
    basis = np.ones(1)
    for col in range(m):
        coeffs = npoly.polyadd(coeffs, table[0, col] * basis)
        basis = npoly.polymul(basis, np.array([-z[col], 1.0]))
    return PolyCoeffs(coeffs, "monomial")


def _below_grid(space: SpaceDescriptor, npts: int = 2000):
    """Grid over T(M) excluding t=1, where certificates must sit below h."""
    if space.is_finite:
        t, _ = pmspace.t_grid(space)
        return t[t < 1.0]
    # Chebyshev-spaced points of [-1, 1], dropping the t=1 endpoint
    return np.cos(np.pi * np.arange(1, npts + 1) / npts)


def verify_certificate(
    space: SpaceDescriptor, f: PolyCoeffs, h: Potential, below_tol: float = _BELOW_TOL
) -> CertificateChecks:
    """Check the two bound conditions for a candidate polynomial.

    ``below_h``: f <= h on a dense grid of T(M) minus the point 1,
    with tolerance below_tol * (1 + |h|); ``f_geq``: all coefficients of
    the expansion in the Q-system are nonnegative (within -1e-8).
    Failures are reported as data.
    """
    grid = _below_grid(space)
    fv = poly_eval(space, f, grid)
    hv = np.asarray(h(grid), dtype=float)
    excess = fv - hv
    tol = below_tol * (1.0 + np.abs(hv))
    worst = int(np.argmax(excess - tol))
    below = bool(np.all(excess <= tol))
    qc = expand_in_q(space, f).coeffs
    minq = float(qc.min())
    return CertificateChecks(
        below_h=below,
        f_geq=bool(minq >= _FGEQ_TOL),
        min_q_coefficient=minq,
        max_excess=float(excess[worst]),
        worst_t=float(grid[worst]),
    )


def test_functions(space: SpaceDescriptor, M: int, j_range) -> TestFunctionReport:
    """Values P_j = 1/M + sum_i rho_i Q_j(alpha_i).

    P_j vanishes for 1 <= j <= tau; a negative value at some j > tau
    flags that degree-j polynomials can improve the bound.
    """
    rule = quadrature_rule(space, M)
    return _test_functions_from_rule(space, rule, j_range)


def _test_functions_from_rule(space, rule, j_range) -> TestFunctionReport:
    js = sorted(set(int(j) for j in j_range))
    if js and js[0] < 0:
        raise ParameterError("test function indices must be nonnegative")
    jmax = max(js) if js else 0
    system = adjacent_system(space, 0, 0, None if jmax <= 36 else jmax)
    if jmax > system.max_deg:
        raise DegreeOverflowError(
            f"test function j={jmax} exceeds the degree cap {system.max_deg}"
            f" of {space.label()}"
        )
    qvals = eval_q_all(system, jmax, rule.nodes) if js else np.zeros((1, 0))
    values = []
    for j in js:
        values.append(1.0 / rule.M + float(np.dot(rule.weights, qvals[j])))
    first_neg = next((j for j, v in zip(js, values) if j > rule.tau and v < -1e-8), None)
    return TestFunctionReport(
        space, rule.M, rule.s, rule.tau, tuple(js), tuple(values), first_neg
    )


def improve_with_qj(
    space: SpaceDescriptor,
    M: int,
    h: Potential,
    j: int,
    eta: float | None = None,
    convention: str = "sum",
) -> UlbReport:
    """Improve the bound using the degree-j system polynomial.

    Requires P_j < 0 and h strictly absolutely monotone through order
    j+1.  The improved certificate is eta*Q_j plus the Hermite
    interpolant of h - eta*Q_j, and the bound increases by exactly
    M^2 * eta * |P_j|.
    """
    rule = quadrature_rule(space, M)
    return _improve_given_rule(space, rule, h, j, eta, convention)


def _improve_given_rule(space, rule, h, j, eta=None, convention="sum", check_value=True):
    if j <= rule.tau:
        raise ParameterError(f"improvement needs j > tau={rule.tau}, got {j}")
    report = _test_functions_from_rule(space, rule, [j])
    pj = report.values[0]
    if pj >= -1e-8:
        raise ParameterError(
            f"test function P_{j} = {pj:.3e} is not negative; no improvement available"
        )
    _require_monotone(h, j + 1)
    qj = np.asarray(orthopoly.q_monomial_coeffs(space, j))
    if eta is None:
        eta = _admissible_eta(h, qj, j)
    else:
        if eta <= 0:
            raise ParameterError("eta must be positive")
        if not _shift_is_monotone(h, qj, j, eta):
            raise ParameterError(f"supplied eta={eta} breaks absolute monotonicity")
    h_shift = _ShiftedPotential(h, qj, eta)
    g = hermite_certificate(rule, h_shift)
    f = PolyCoeffs(npoly.polyadd(g.coeffs, eta * qj), "monomial")
    M = rule.M
    base = M * M * float(np.dot(rule.weights, h(rule.nodes)))
    improved = base - M * M * eta * pj
    out = _report_from_rule(
        space, rule, h, convention, certificate=f, value_sum=improved, check_value=check_value
    )
    return replace(out, improvement={"j": j, "eta": eta, "p_j": pj, "base_value_sum": base})


def _admissible_eta(h, qj_coeffs, j, floor=1e-12):
    """Largest convenient eta > 0 keeping h - eta*Q_j absolutely monotone.

    Starts from the smallest derivative margin on a grid and halves
    until the shifted potential passes the monotonicity check.
    """
    grid = np.linspace(-1.0, 1.0 - 1e-4, 201)
    eta0 = np.inf
    dq = qj_coeffs
    for order in range(j + 2):
        hv = np.asarray(h.deriv(grid, order), dtype=float)
        qv = np.abs(npoly.polyval(grid, dq)) if len(dq) else np.zeros_like(grid)
        mask = qv > 1e-14
        if np.any(mask):
            eta0 = min(eta0, float(np.min(hv[mask] / qv[mask])))
        dq = npoly.polyder(dq) if len(dq) > 1 else np.zeros(0)
    eta = eta0 if np.isfinite(eta0) and eta0 > 0 else 1.0
    while eta >= floor:
        if _shift_is_monotone(h, qj_coeffs, j, eta):
            return eta
        eta *= 0.5
    raise ConvergenceError(f"no admissible eta found for improvement with j={j}")


def _shift_is_monotone(h, qj_coeffs, j, eta, grid=None):
    if grid is None:
        grid = np.linspace(-1.0, 1.0 - 1e-4, 401)
    dq = qj_coeffs
    for order in range(j + 2):
        hv = np.asarray(h.deriv(grid, order), dtype=float)
        qv = npoly.polyval(grid, dq) if len(dq) else np.zeros_like(grid)
        if np.any(hv - eta * qv < -1e-12):
            return False
        dq = npoly.polyder(dq) if len(dq) > 1 else np.zeros(0)
    return True


class _ShiftedPotential:
    """h - eta*Q_j, exposing the same evaluation interface as Potential."""

    def __init__(self, h, qj_coeffs, eta):
        self._h = h
        self._eta = eta
        self._derivs = [qj_coeffs]
        while len(self._derivs[-1]) > 1:
            self._derivs.append(npoly.polyder(self._derivs[-1]))

    def __call__(self, t):
        return self.deriv(t, 0)

    def deriv(self, t, order=0):
        qv = (
            npoly.polyval(np.asarray(t, dtype=float), self._derivs[order])
            if order < len(self._derivs)
            else 0.0
        )
        return self._h.deriv(t, order) - self._eta * qv
