"""Independent integration oracles for the quadrature tests.

Moments of the quadrature weights are computed with QUADPACK's adaptive
routines, splitting the interval geometrically so the endpoint
singularities land in weighted (QAWS) pieces and the damping factor's
internal layer is always resolved.  Everything here is deliberately
separate from the package's own recurrence-based construction.
"""

import functools
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from fracpow.quadrature import CustomWeight

_QUAD_OPTS = dict(epsabs=1e-15, epsrel=1e-12, limit=300)
_DEPTH = 34


@functools.lru_cache(maxsize=None)
def jacobi_moment(k, a_exp, b_exp):
    """integral of x^k (1-x)^a_exp (1+x)^b_exp over (-1, 1)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(
            lambda x: x**k, -1.0, 1.0, weight="alg", wvar=(b_exp, a_exp), **_QUAD_OPTS
        )
    return val


@functools.lru_cache(maxsize=None)
def custom_moment(k, nu, alpha, mu):
    """integral of x^k (1-x)^(-alpha) (1+x)^(alpha-1) g(x) over (-1, 1)."""
    wgt = CustomWeight(nu, alpha, mu)
    cuts = 2.0 ** -np.arange(_DEPTH, -1, -1.0)

    def f_left(x):
        s = np.float64(x) + 1.0
        return float(x**k * (2.0 - s) ** (-alpha) * wgt.g_from_ratio(s / (2.0 - s)))

    def f_mid(x):
        x = np.float64(x)
        q = (1.0 + x) / (1.0 - x)
        return float(
            x**k * (1.0 - x) ** (-alpha) * (1.0 + x) ** (alpha - 1.0) * wgt.g_from_ratio(q)
        )

    def f_right(x):
        u = 1.0 - np.float64(x)
        return float(x**k * (2.0 - u) ** (alpha - 1.0) * wgt.g_from_ratio((2.0 - u) / u))

    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(
            f_left, -1.0, -1.0 + cuts[0], weight="alg", wvar=(alpha - 1.0, 0.0), **_QUAD_OPTS
        )
        total += val
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            val, _ = quad(f_mid, -1.0 + lo, -1.0 + hi, **_QUAD_OPTS)
            total += val
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            val, _ = quad(f_mid, 1.0 - hi, 1.0 - lo, **_QUAD_OPTS)
            total += val
        val, _ = quad(
            f_right, 1.0 - cuts[0], 1.0, weight="alg", wvar=(0.0, -alpha), **_QUAD_OPTS
        )
        total += val
    return total


def rule_moment_errors(rule, moment_fn, degrees):
    """Max |rule sum - oracle moment| over the degrees, scaled by the
    oracle's total mass."""
    mass = moment_fn(0)
    worst = 0.0
    for k in degrees:
        approx = rule.integrate(rule.nodes**k)
        worst = max(worst, abs(approx - moment_fn(k)) / abs(mass))
    return worst
