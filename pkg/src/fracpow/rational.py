"""Rational approximations of z^(-beta) and (nu + z^alpha)^(-1).

Both approximations take the partial-fraction form

    R(z) = sum_m d_m / (c_m + z),        c_m >= 0, d_m > 0,

so their action on the discrete elliptic operator reduces to a fixed
set of shifted SPD solves.  The shifts and coefficients follow from a
Gauss rule on (-1, 1) for the weighted integral representation of the
target function, with expansion point mu; at z = mu the negative-power
form reproduces mu^(-beta) exactly for every number of terms.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ParameterError
from .quadrature import gauss_custom, gauss_jacobi


class ApproxKind(enum.Enum):
    NEGATIVE_POWER = "negative-power"
    RESOLVENT = "resolvent"


@dataclass(frozen=True, eq=False)
class RationalApprox:
    """Shifts c_m and coefficients d_m of a partial-fraction approximation."""

    shifts: np.ndarray
    coeffs: np.ndarray
    mu: float
    exponent: float
    nu: float
    kind: ApproxKind

    def __post_init__(self):
        if self.shifts.size != self.coeffs.size or self.shifts.size < 1:
            raise ParameterError("shifts and coeffs must have equal positive length")
        if np.any(self.shifts < 0.0) or not np.all(np.isfinite(self.shifts)):
            raise ParameterError("shifts must be finite and non-negative")
        if np.any(self.coeffs <= 0.0):
            raise ParameterError("coefficients must be positive")

    def __len__(self):
        return self.shifts.size


@dataclass(frozen=True)
class GammaBound:
    """Upper bound sum(d_m) = lim_{z->inf} z * R(z) of the scaled growth."""

    value: float

    def __post_init__(self):
        if not self.value > 0.0:
            raise ParameterError("growth bound must be positive")


def _from_rule(rule, factor, mu, exponent, nu, kind):
    one_plus = 1.0 + rule.nodes
    coeffs = factor * rule.weights / one_plus
    shifts = mu * (1.0 - rule.nodes) / one_plus
    return RationalApprox(
        shifts=shifts, coeffs=coeffs, mu=mu, exponent=exponent, nu=nu, kind=kind
    )


def build_negative_power(beta, mu, n_terms):
    """Approximation of z^(-beta) with expansion point mu.

    Uses the n_terms-point Gauss-Jacobi rule with exponents
    (-beta, beta - 1); the rule nodes eta_m map to shifts
    c_m = mu (1 - eta_m)/(1 + eta_m) and coefficients
    d_m = (2 mu^(1-beta) sin(pi beta)/pi) w_m/(1 + eta_m).
    """
    if not 0.0 < beta < 1.0:
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")
    if mu <= 0.0:
        raise ParameterError(f"expansion point mu must be positive, got {mu}")
    rule = gauss_jacobi(n_terms, -beta, beta - 1.0)
    factor = 2.0 * mu ** (1.0 - beta) * math.sin(math.pi * beta) / math.pi
    return _from_rule(rule, factor, float(mu), float(beta), 0.0, ApproxKind.NEGATIVE_POWER)


def build_resolvent(alpha, nu, mu, n_terms):
    """Approximation of (nu + z^alpha)^(-1) with expansion point mu.

    Built from the Gauss rule for the damped weight
    (1-eta)^(-alpha) (1+eta)^(alpha-1) g(eta; nu, alpha, mu); for nu = 0
    it coincides term-by-term with build_negative_power(alpha, mu, n_terms).
    """
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    if nu < 0.0:
        raise ParameterError(f"nu must be >= 0, got {nu}")
    if mu <= 0.0:
        raise ParameterError(f"expansion point mu must be positive, got {mu}")
    rule = gauss_custom(n_terms, nu, alpha, mu)
    factor = 2.0 * mu ** (1.0 - alpha) * math.sin(math.pi * alpha) / math.pi
    return _from_rule(rule, factor, float(mu), float(alpha), float(nu), ApproxKind.RESOLVENT)


def eval_scalar(approx, z):
    """Evaluate sum_m d_m/(c_m + z) at scalar or array z > 0."""
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0.0):
        raise ParameterError("eval_scalar requires z > 0")
    vals = np.sum(
        approx.coeffs[:, None] / (approx.shifts[:, None] + z.ravel()[None, :]), axis=0
    )
    if z.ndim == 0:
        return float(vals[0])
    return vals.reshape(z.shape)


def gamma_bar(approx):
    """Sum of coefficients; equals lim_{z->inf} z * R(z)."""
    if approx.kind is not ApproxKind.NEGATIVE_POWER:
        raise ParameterError("growth bound is defined for the negative-power form")
    return GammaBound(value=float(np.sum(approx.coeffs)))


def apply(approx, op, v, tol=1e-10):
    """Apply R to a coefficient vector through shifted solves.

    Each term solves (c_m * Mass + Stiff) x_m = Mass v by conjugate
    gradients to relative residual `tol`; the result is the
    deterministically ordered sum of d_m x_m.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (op.mass.n,):
        raise ParameterError(
            f"vector length {v.shape} does not match operator dimension {op.mass.n}"
        )
    rhs = op.mass.matvec(v)
    out = np.zeros_like(v)
    for c, d in zip(approx.shifts, approx.coeffs):
        mat = linalg.add_scaled(float(c), op.mass, 1.0, op.stiff)
        out += d * linalg.cg_solve(mat, rhs, tol)
    return out
