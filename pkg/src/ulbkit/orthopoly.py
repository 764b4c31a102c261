"""Adjacent orthogonal systems, Christoffel-Darboux kernels, and expansions.

For a space with orthogonality measure nu, the (a,b)-adjacent system
consists of the polynomials orthogonal under the extra weight
(1-t)^a (1+t)^b, normalized so that each polynomial equals 1 at t=1.
The base system is (a,b) = (0,0).
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import _recurrence as rec
from . import pmspace
from .errors import DegreeOverflowError, ParameterError
from .pmspace import SpaceDescriptor

_DEFAULT_DEG = 36


@dataclass(frozen=True, eq=False)
class OrthoSystem:
    """An (a,b)-adjacent system given by its monic recurrence.

    ``rec_beta``/``rec_gamma`` follow the convention of
    :mod:`ulbkit._recurrence`; ``norms`` holds the constants r_i^{a,b}
    from the orthogonality relation, and ``c_norm`` the normalization
    constant of the weighted measure.
    """

    space: SpaceDescriptor
    a: int
    b: int
    max_deg: int
    rec_beta: np.ndarray
    rec_gamma: np.ndarray
    value_at_one: np.ndarray
    norms: np.ndarray
    c_norm: float
    support: tuple[float, float]


@lru_cache(maxsize=None)
def adjacent_system(space: SpaceDescriptor, a: int, b: int, max_deg: int | None = None) -> OrthoSystem:
    """Build (and cache) the (a,b)-adjacent system of a space.

    Parameters
    ----------
    space : SpaceDescriptor
    a, b : int
        Extra weight exponents, each 0 or 1.
    max_deg : int, optional
        Highest degree carried by the system.  Defaults to the space's
        cap for finite spaces and a generous working degree otherwise.

    Raises
    ------
    DegreeOverflowError
        If max_deg exceeds what the (weighted) measure supports.
    """
    if a not in (0, 1) or b not in (0, 1):
        raise ParameterError(f"adjacent exponents must be 0 or 1, got ({a}, {b})")
    if space.is_finite:
        t, mass = pmspace.t_grid(space)
        wts = mass * (1.0 - t) ** a * (1.0 + t) ** b
        keep = wts > 0
        t, wts = t[keep], wts[keep]
        cap = len(t) - 1
        if max_deg is None:
            max_deg = cap
        if max_deg > cap:
            raise DegreeOverflowError(
                f"degree {max_deg} exceeds the ({a},{b})-system cap {cap} of {space.label()}"
            )
        beta, gamma = rec.stieltjes(t, wts, max_deg + 1)
        support = (float(t.min()), float(t.max()))
    else:
        if max_deg is None:
            max_deg = _DEFAULT_DEG
        alpha0, beta0 = space.jacobi_exponents()
        beta, gamma = rec.jacobi_monic(alpha0 + a, beta0 + b, max_deg + 1)
        # gamma[0] is the raw Jacobi mass; renormalize so the base measure
        # nu has unit mass.
        base_mass = rec.jacobi_monic(alpha0, beta0, 1)[1][0]
        gamma = gamma.copy()
        gamma[0] /= base_mass
        support = (-1.0, 1.0)
    value_at_one = rec.eval_all(beta, gamma, max_deg, np.array(1.0))
    norms_sq = np.cumprod(gamma)
    c_norm = 1.0 / gamma[0]
    norms = value_at_one**2 / (c_norm * norms_sq)
    return OrthoSystem(
        space, a, b, max_deg, beta, gamma, np.asarray(value_at_one), norms, c_norm, support
    )


def eval_q(system: OrthoSystem, i: int, t):
    """Q_i^{a,b}(t), normalized so Q_i^{a,b}(1) = 1."""
    _check(system, i)
    return rec.eval_one(system.rec_beta, system.rec_gamma, i, t) / system.value_at_one[i]


def eval_q_all(system: OrthoSystem, deg: int, t):
    """Values of Q_0..Q_deg at t, shape (deg+1,) + shape(t)."""
    _check(system, deg)
    vals = rec.eval_all(system.rec_beta, system.rec_gamma, deg, np.asarray(t, dtype=float))
    shape = (deg + 1,) + (1,) * (vals.ndim - 1)
    return vals / system.value_at_one[: deg + 1].reshape(shape)


def zeros_of(system: OrthoSystem, i: int):
    """All zeros of Q_i^{a,b}, ascending."""
    _check(system, i)
    if i < 1:
        raise ParameterError("zeros are defined for degree >= 1")
    lo, hi = system.support
    pad = 1e-9 * (hi - lo)
    return rec.zeros(system.rec_beta, system.rec_gamma, i, lo - pad, hi + pad)


def largest_zero(system: OrthoSystem, i: int) -> float:
    """Largest zero t_i^{a,b} of Q_i^{a,b}."""
    return float(zeros_of(system, i)[-1])


def cd_kernel(space: SpaceDescriptor, a: int, b: int, j: int, u, v):
    """Christoffel-Darboux kernel sum_{i<=j} r_i^{a,b} Q_i^{a,b}(u) Q_i^{a,b}(v)."""
    system = adjacent_system(space, a, b)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    shape = np.broadcast_shapes(u.shape, v.shape)
    qu = eval_q_all(system, j, np.broadcast_to(u, shape))
    qv = eval_q_all(system, j, np.broadcast_to(v, shape))
    r = system.norms[: j + 1].reshape((j + 1,) + (1,) * len(shape))
    out = np.sum(r * qu * qv, axis=0)
    return float(out) if out.shape == () else out


def kernel_zeros(system: OrthoSystem, j: int, v: float):
    """Zeros of t -> sum_{i<=j} r_i Q_i(t) Q_i(v), ascending (v excluded).

    By the Christoffel-Darboux formula the kernel is, up to a nonzero
    factor and the removed root at t=v, the quasi-orthogonal polynomial
    pi_{j+1} - c*pi_j with c = pi_{j+1}(v)/pi_j(v).  That polynomial is
    the characteristic polynomial of a symmetric tridiagonal matrix, so
    its j+1 roots are real and simple and strictly interlace the zeros
    of pi_j, which gives guaranteed bisection brackets.
    """
    if j == 0:
        return np.array([])
    beta, gamma = system.rec_beta, system.rec_gamma
    pj = rec.eval_one(beta, gamma, j, v)
    pj1 = rec.eval_one(beta, gamma, j + 1, v)
    if pj == 0.0:
        raise ParameterError(f"kernel degenerates at v={v} (zero of the degree-{j} polynomial)")
    c = pj1 / pj

    def quasi(t):
        return rec.eval_one(beta, gamma, j + 1, t) - c * rec.eval_one(beta, gamma, j, t)

    lo, hi = system.support
    pad = 1e-9 * (hi - lo)
    inner = rec.zeros(beta, gamma, j, lo - pad, hi + pad)
    spread = np.max(np.abs(beta[: j + 1])) + 2.0 * np.sqrt(np.max(gamma[1 : j + 1]))
    bound = max(spread + abs(c) + 1.0, abs(v) + 1.0, abs(hi) + 1.0, abs(lo) + 1.0)
    brackets = np.concatenate(([-bound], inner, [bound]))
    roots = np.array(
        [_bisect_scalar(quasi, brackets[i], brackets[i + 1]) for i in range(j + 1)]
    )
    drop = int(np.argmin(np.abs(roots - v)))
    if abs(roots[drop] - v) > 1e-7 * max(1.0, abs(v)):
        raise ParameterError(f"kernel zero structure broke down at v={v}")
    return np.delete(roots, drop)


def _bisect_scalar(f, a, c, steps=90):
    fa, fc = float(f(a)), float(f(c))
    if fa == 0.0:
        return a
    if fc == 0.0:
        return c
    if fa * fc > 0:
        raise ParameterError(f"no sign change in [{a}, {c}]")
    for _ in range(steps):
        mid = 0.5 * (a + c)
        if mid == a or mid == c:
            break
        fm = float(f(mid))
        if fm == 0.0:
            return mid
        if fa * fm < 0:
            c, fc = mid, fm
        else:
            a, fa = mid, fm
    return 0.5 * (a + c)


@dataclass(frozen=True, eq=False)
class PolyCoeffs:
    """Polynomial coefficients, ascending, in the monomial or Q basis."""

    coeffs: np.ndarray
    basis: str = "monomial"  # "monomial" | "q"

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        scale = np.max(np.abs(c)) if c.size else 0.0
        if scale > 0:
            nz = np.nonzero(np.abs(c) > 1e-14 * scale)[0]
            c = c[: nz[-1] + 1] if nz.size else c[:1]
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def poly_eval(space: SpaceDescriptor, poly: PolyCoeffs, t):
    """Evaluate a polynomial in either basis."""
    if poly.basis == "monomial":
        out = npoly.polyval(np.asarray(t, dtype=float), poly.coeffs)
        return float(out) if np.ndim(t) == 0 else out
    system = adjacent_system(space, 0, 0)
    vals = eval_q_all(system, poly.degree, t)
    out = np.tensordot(poly.coeffs, vals, axes=(0, 0))
    return float(out) if np.ndim(t) == 0 else out


@lru_cache(maxsize=None)
def q_monomial_coeffs(space: SpaceDescriptor, i: int, a: int = 0, b: int = 0):
    """Ascending monomial coefficients of Q_i^{a,b}."""
    system = adjacent_system(space, a, b)
    _check(system, i)
    c = rec.monomial_coefficients(system.rec_beta, system.rec_gamma, i)
    return c / system.value_at_one[i]


def q_to_monomial(space: SpaceDescriptor, poly: PolyCoeffs) -> PolyCoeffs:
    """Convert a Q-basis polynomial to monomial coefficients."""
    if poly.basis == "monomial":
        return poly
    out = np.zeros(poly.degree + 1)
    for i, fi in enumerate(poly.coeffs):
        out[: i + 1] += fi * q_monomial_coeffs(space, i)
    return PolyCoeffs(out, "monomial")


def expand_in_q(space: SpaceDescriptor, poly: PolyCoeffs) -> PolyCoeffs:
    """Coefficients f_i of f = sum_i f_i Q_i in the base system.

    Computed as f_i = r_i * integral(f * Q_i dnu); the discrete sum for
    finite spaces, a Gauss rule of sufficient order otherwise.
    """
    if poly.basis == "q":
        return poly
    deg = poly.degree
    cap = space.max_degree
    if cap is not None and deg > cap:
        raise DegreeOverflowError(
            f"cannot expand degree {deg} in {space.label()} (cap {cap})"
        )
    system = adjacent_system(space, 0, 0, None if deg <= _DEFAULT_DEG else deg)
    if space.is_finite:
        x, wts = pmspace.t_grid(space)
    else:
        x, wts = pmspace.gauss_rule(space, deg + 4)
    fx = npoly.polyval(x, poly.coeffs)
    qx = eval_q_all(system, deg, x)
    fi = system.norms[: deg + 1] * (qx * (wts * fx)).sum(axis=1)
    return PolyCoeffs(fi, "q")


def _check(system: OrthoSystem, i: int):
    if i < 0:
        raise ParameterError("degree must be nonnegative")
    if i > system.max_deg:
        raise DegreeOverflowError(
            f"degree {i} exceeds the ({system.a},{system.b})-system cap "
            f"{system.max_deg} of {system.space.label()}"
        )
