"""Gauss quadrature rules on (-1, 1) from recurrence coefficients.

Two families are provided: classical Gauss-Jacobi rules for the weight
(1-x)^a (1+x)^b, and rules for the damped-Jacobi weight
(1-x)^(-alpha) (1+x)^(alpha-1) g(x; nu, alpha, mu) that arises when a
shifted fractional resolvent is written as a weighted integral over
(-1, 1).  Nodes and weights come from the symmetric tridiagonal
recurrence matrix (Golub-Welsch); the eigenvalue solve is an
implicit-shift QL iteration kept in-repo so the construction has no
external solver dependency.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstructionError, ParameterError

# Off-diagonal deflation threshold (relative) for the QL iteration.
_QL_TOL = 1e-14
_QL_MAX_SWEEPS = 50

# Discretized-recurrence refinement: stop once coefficients move less
# than this between successive discretization levels.
_STIELTJES_TOL = 1e-12
_STIELTJES_MAX_ROUNDS = 6

# Geometric panel depth per endpoint for the composite discretization.
_PANEL_DEPTH = 52


@dataclass(frozen=True)
class JacobiWeight:
    """Weight (1-x)^a_exp * (1+x)^b_exp on (-1, 1), exponents > -1."""

    a_exp: float
    b_exp: float


@dataclass(frozen=True)
class CustomWeight:
    """Weight (1-x)^(-alpha) * (1+x)^(alpha-1) * g(x) on (-1, 1).

    The damping factor g is defined through its reciprocal,

        1/g(x) = 1 + 2 nu cos(pi alpha) mu^(-alpha) q^alpha
                   + nu^2 mu^(-2 alpha) q^(2 alpha),
        q = (1+x)/(1-x),

    which is positive for all x because it factors as
    |1 + nu (q/mu)^alpha exp(i pi alpha)|^2.  For nu = 0 the weight
    reduces to the Jacobi weight with exponents (-alpha, alpha-1).
    """

    nu: float
    alpha: float
    mu: float

    def g_from_ratio(self, q):
        """Evaluate g given q = (1+x)/(1-x); q may be an array."""
        q = np.asarray(q, dtype=float)
        if self.nu == 0.0:
            return np.ones_like(q)
        s = self.nu * q**self.alpha / self.mu**self.alpha
        return 1.0 / (1.0 + 2.0 * math.cos(math.pi * self.alpha) * s + s * s)

    def evaluate(self, x):
        """Full weight value at interior points (for diagnostics only)."""
        x = np.asarray(x, dtype=float)
        q = (1.0 + x) / (1.0 - x)
        return (1.0 - x) ** (-self.alpha) * (1.0 + x) ** (self.alpha - 1.0) * self.g_from_ratio(q)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes (ascending, strictly inside (-1,1)) and positive weights."""

    nodes: np.ndarray
    weights: np.ndarray
    weight_kind: object

    def __len__(self):
        return self.nodes.size

    def integrate(self, values):
        """Sum w_m * values_m in fixed (ascending-node) order."""
        return float(np.dot(self.weights, values))


def _jacobi_recurrence(n, a, b):
    """Monic three-term recurrence coefficients for the Jacobi weight.

    Returns (alpha, beta) with beta[0] set to the total mass
    integral of (1-x)^a (1+x)^b over (-1, 1).
    """
    apb = a + b
    alpha = np.empty(n)
    beta = np.empty(n)
    alpha[0] = (b - a) / (apb + 2.0)
    beta[0] = (
        2.0 ** (apb + 1.0)
        * math.gamma(a + 1.0)
        * math.gamma(b + 1.0)
        / math.gamma(apb + 2.0)
    )
    if n > 1:
        # k = 1 handled separately: the generic beta formula is 0/0 when
        # a + b = -1 (exactly the exponent pair used for the fractional
        # integral representation).
        alpha[1] = (b * b - a * a) / ((2.0 + apb) * (4.0 + apb))
        beta[1] = 4.0 * (a + 1.0) * (b + 1.0) / ((apb + 2.0) ** 2 * (apb + 3.0))
    if n > 2:
        k = np.arange(2.0, n)
        t = 2.0 * k + apb
        alpha[2:] = (b * b - a * a) / (t * (t + 2.0))
        beta[2:] = 4.0 * k * (k + a) * (k + b) * (k + apb) / (t * t * (t + 1.0) * (t - 1.0))
    return alpha, beta


def _tridiag_eigen(diag, off):
    """Eigenvalues and first eigenvector components of a symmetric
    tridiagonal matrix, by implicit-shift QL iteration.

    Only the first row of the accumulated rotation product is tracked,
    which is all Golub-Welsch needs for the weights.  Returns
    (values ascending, first_components) as new arrays.
    """
    n = diag.size
    d = np.array(diag, dtype=float)
    e = np.zeros(n)
    e[: n - 1] = off
    z = np.zeros(n)
    z[0] = 1.0

    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _QL_TOL * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > _QL_MAX_SWEEPS:
                raise ConstructionError(
                    "tridiagonal QL iteration did not converge",
                    residual=float(abs(e[l])),
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                bb = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * bb
                p = s * r
                d[i + 1] = g + p
                g = c * r - bb
                zi1 = z[i + 1]
                z[i + 1] = s * z[i] + c * zi1
                z[i] = c * z[i] - s * zi1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0

    order = np.argsort(d, kind="stable")
    return d[order], z[order]


def _rule_from_recurrence(alpha, beta, weight_kind):
    nodes, first = _tridiag_eigen(alpha, np.sqrt(beta[1:]))
    weights = beta[0] * first**2
    if not (np.all(nodes > -1.0) and np.all(nodes < 1.0)):
        raise ConstructionError("quadrature nodes escaped (-1, 1)")
    if np.any(np.diff(nodes) <= 0.0):
        raise ConstructionError("quadrature nodes are not strictly increasing")
    if np.any(weights <= 0.0):
        raise ConstructionError("non-positive quadrature weight produced")
    return QuadratureRule(nodes=nodes, weights=weights, weight_kind=weight_kind)


def gauss_jacobi(n, a_exp, b_exp):
    """n-point Gauss-Jacobi rule for the weight (1-x)^a_exp (1+x)^b_exp.

    Exact for polynomials of degree <= 2n-1.  Requires n >= 1 and both
    exponents > -1 so the weight is integrable.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"node count must be a positive integer, got {n!r}")
    if a_exp <= -1.0 or b_exp <= -1.0:
        raise ParameterError(
            f"Jacobi exponents must exceed -1 for an integrable weight, "
            f"got ({a_exp}, {b_exp})"
        )
    alpha, beta = _jacobi_recurrence(int(n), float(a_exp), float(b_exp))
    return _rule_from_recurrence(alpha, beta, JacobiWeight(float(a_exp), float(b_exp)))


def _discretize_custom(weight, n_panel):
    """Discretize the custom weight as a positive point measure.

    Panels are geometrically graded toward both endpoints so the damping
    factor's internal layer (width ~ mu/nu^2 near x = -1 for large nu)
    is always resolved; the two outermost panels absorb the algebraic
    endpoint singularities with one-sided Jacobi rules.  Endpoint
    distances are tracked directly (s = 1+x, u = 1-x) to avoid
    cancellation when forming the singular factors.
    """
    al = weight.alpha
    leg = gauss_jacobi(n_panel, 0.0, 0.0)
    jac_left = gauss_jacobi(n_panel, 0.0, al - 1.0)   # absorbs (1+x)^(alpha-1)
    jac_right = gauss_jacobi(n_panel, 0.0, -al)       # absorbs (1-x)^(-alpha)

    cuts = 2.0 ** -np.arange(_PANEL_DEPTH, -1, -1.0)  # 2^-J, ..., 1/2, 1
    nodes = []
    wts = []

    # Left outermost panel: s = 1+x in (0, 2^-J].
    c = cuts[0]
    s = 0.5 * c * (1.0 + jac_left.nodes)
    q = s / (2.0 - s)
    w = (0.5 * c) ** al * jac_left.weights * (2.0 - s) ** (-al) * weight.g_from_ratio(q)
    nodes.append(s - 1.0)
    wts.append(w)

    # Remaining left panels: s in [2^-j, 2^-j+1]; integrand smooth.
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        s = lo + 0.5 * (hi - lo) * (1.0 + leg.nodes)
        q = s / (2.0 - s)
        w = (
            0.5 * (hi - lo)
            * leg.weights
            * s ** (al - 1.0)
            * (2.0 - s) ** (-al)
            * weight.g_from_ratio(q)
        )
        nodes.append(s - 1.0)
        wts.append(w)

    # Right panels mirrored with u = 1-x; outermost absorbs u^(-alpha).
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        u = lo + 0.5 * (hi - lo) * (1.0 + leg.nodes)
        q = (2.0 - u) / u
        w = (
            0.5 * (hi - lo)
            * leg.weights
            * u ** (-al)
            * (2.0 - u) ** (al - 1.0)
            * weight.g_from_ratio(q)
        )
        nodes.append(1.0 - u)
        wts.append(w)
    c = cuts[0]
    u = 0.5 * c * (1.0 + jac_right.nodes)
    q = (2.0 - u) / u
    w = (0.5 * c) ** (1.0 - al) * jac_right.weights * (2.0 - u) ** (al - 1.0) * weight.g_from_ratio(q)
    nodes.append(1.0 - u)
    wts.append(w)

    return np.concatenate(nodes), np.concatenate(wts)


def _stieltjes(t, w, n):
    """Monic recurrence coefficients of the discrete measure sum w_i d(t_i).

    Classical Stieltjes procedure: orthogonal polynomials are evaluated
    on the support through their own recurrence while the inner products
    accumulate.  beta[0] carries the total mass.
    """
    alpha = np.empty(n)
    beta = np.empty(n)
    p_prev = np.zeros_like(t)
    p = np.ones_like(t)
    norm_prev = 0.0
    for k in range(n):
        wp2 = w * p * p
        norm = float(wp2.sum())
        if not (norm > 0.0 and math.isfinite(norm)):
            raise ConstructionError(
                "Stieltjes procedure lost positivity", residual=norm
            )
        alpha[k] = float((wp2 * t).sum()) / norm
        beta[k] = norm if k == 0 else norm / norm_prev
        p_new = (t - alpha[k]) * p - (beta[k] if k > 0 else 0.0) * p_prev
        p_prev, p = p, p_new
        norm_prev = norm
    return alpha, beta


def gauss_custom(n, nu, alpha, mu):
    """n-point Gauss rule for the weight
    (1-x)^(-alpha) (1+x)^(alpha-1) g(x; nu, alpha, mu).

    The recurrence coefficients come from a discretized Stieltjes
    procedure on a composite, singularity-absorbing quadrature of the
    weight; the discretization is refined until the coefficients are
    stable to 1e-12.  For nu = 0 the result coincides with
    gauss_jacobi(n, -alpha, alpha - 1).
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"node count must be a positive integer, got {n!r}")
    if nu < 0.0:
        raise ParameterError(f"damping parameter nu must be >= 0, got {nu}")
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    if mu <= 0.0:
        raise ParameterError(f"transform parameter mu must be positive, got {mu}")

    weight = CustomWeight(float(nu), float(alpha), float(mu))
    n = int(n)
    n_panel = max(2 * n + 8, 24)
    prev = None
    change = math.inf
    for _ in range(_STIELTJES_MAX_ROUNDS):
        t, w = _discretize_custom(weight, n_panel)
        rec = _stieltjes(t, w, n)
        if prev is not None:
            change = max(
                float(np.max(np.abs(rec[0] - prev[0]))),
                float(np.max(np.abs(rec[1] - prev[1]))),
            )
            if change < _STIELTJES_TOL:
                return _rule_from_recurrence(rec[0], rec[1], weight)
        prev = rec
        n_panel = int(math.ceil(1.5 * n_panel))
    raise ConstructionError(
        "recurrence coefficients did not stabilize under refinement",
        residual=change,
    )
