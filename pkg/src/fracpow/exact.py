"""Bessel machinery and the closed-form reference solution.

J0 and J1 are evaluated by a truncated power series below x = 13 and by
the optimally truncated large-argument (Hankel) expansion above it,
keeping the module dependency-free while staying well inside 1e-10
absolute error on the working range [0, 30].  The radial reference
solution is a two-mode J0 expansion whose frequencies solve the Robin
eigenvalue condition nu J0'(nu) + g J0(nu) = 0.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, RootSearchError

_SERIES_CUTOFF = 13.0
_SERIES_TERMS = 44
_ASYMPTOTIC_TERMS = 11

# power-series coefficients in t = (x/2)^2:
#   J0 = sum (-t)^k / (k!)^2,   J1 = (x/2) sum (-t)^k / (k! (k+1)!)
_J0_COEF = np.array(
    [(-1.0) ** k / (math.factorial(k) ** 2) for k in range(_SERIES_TERMS)]
)
_J1_COEF = np.array(
    [(-1.0) ** k / (math.factorial(k) * math.factorial(k + 1)) for k in range(_SERIES_TERMS)]
)


def _hankel_coeffs(order):
    # a_k = prod_{j<=k} (4 order^2 - (2j-1)^2) / (k 8)
    mu4 = 4.0 * order * order
    a = [1.0]
    for k in range(1, 2 * _ASYMPTOTIC_TERMS + 2):
        a.append(a[-1] * (mu4 - (2 * k - 1) ** 2) / (k * 8.0))
    return np.array(a)


_A0 = _hankel_coeffs(0)
_A1 = _hankel_coeffs(1)


def _series(x, coef):
    # coefficients already alternate in sign, so Horner runs in t = (x/2)^2
    t = 0.25 * x * x
    acc = np.full_like(t, coef[-1])
    for c in coef[-2::-1]:
        acc = acc * t + c
    return acc


def _asymptotic(x, a, chi_shift):
    inv = 1.0 / x
    inv2 = inv * inv
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    for k in range(_ASYMPTOTIC_TERMS, -1, -1):
        sign = -1.0 if k % 2 else 1.0
        p = p * inv2 + sign * a[2 * k]
        q = q * inv2 + sign * a[2 * k + 1]
    q *= inv
    chi = x - chi_shift
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _eval_bessel(x, coef, a, chi_shift, odd):
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    sign = np.where(arr < 0.0, -1.0 if odd else 1.0, 1.0)
    ax = np.abs(arr)
    out = np.empty_like(ax)
    small = ax <= _SERIES_CUTOFF
    if np.any(small):
        s = _series(ax[small], coef)
        out[small] = s * (0.5 * ax[small]) if odd else s
    if np.any(~small):
        out[~small] = _asymptotic(ax[~small], a, chi_shift)
    out *= sign
    return float(out[0]) if scalar else out


def bessel_j0(x):
    """Bessel function of the first kind, order zero."""
    return _eval_bessel(x, _J0_COEF, _A0, 0.25 * np.pi, odd=False)


def bessel_j1(x):
    """Bessel function of the first kind, order one."""
    return _eval_bessel(x, _J1_COEF, _A1, 0.75 * np.pi, odd=True)


@dataclass(frozen=True)
class RobinRoots:
    """First positive solutions of nu J0'(nu) + g J0(nu) = 0, ascending."""

    g: float
    roots: tuple


def robin_roots(g, count):
    """Find the first `count` positive roots of g J0(nu) - nu J1(nu).

    Sign changes are bracketed on a pi/8 grid and bisected to 1e-12.
    """
    if g <= 0.0:
        raise ParameterError(f"boundary coefficient g must be positive, got {g}")
    if not isinstance(count, (int, np.integer)) or count < 1:
        raise ParameterError(f"count must be a positive integer, got {count!r}")

    def f(nu):
        return g * bessel_j0(nu) - nu * bessel_j1(nu)

    step = math.pi / 8.0
    limit = math.pi * (count + 5) + step
    roots = []
    a = 0.0
    fa = f(a)
    while len(roots) < count and a < limit:
        b = a + step
        fb = f(b)
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0.0:
            lo, hi, flo = a, b, fa
            while hi - lo > 1e-12:
                mid = 0.5 * (lo + hi)
                fm = f(mid)
                if fm == 0.0:
                    lo = hi = mid
                elif flo * fm < 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            roots.append(0.5 * (lo + hi))
        a, fa = b, fb
    if len(roots) < count:
        raise RootSearchError(
            f"found only {len(roots)} of {count} roots while scanning to {limit:.3g}"
        )
    return RobinRoots(g=float(g), roots=tuple(roots[:count]))


@dataclass(frozen=True)
class ExactSolutionSpec:
    """Two-mode radial reference solution of the fractional Cauchy problem.

    u(r, t) = a1 exp(-nu1^(2 alpha) t) J0(nu1 r)
            + a2 exp(-nu3^(2 alpha) t) J0(nu3 r),

    where nu1 and nu3 are the first and third Robin roots for g.  Both
    modes use J0: the eigenfunctions of the radial problem are J0 modes,
    so the third-root term is a J0 mode as well.
    """

    g: float
    alpha: float
    nu1: float
    nu3: float
    t_final: float = 0.25
    amplitudes: tuple = (1.0, 1.5)

    @classmethod
    def for_parameters(cls, g, alpha, t_final=0.25):
        if not 0.0 < alpha < 1.0:
            raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
        rr = robin_roots(g, 3)
        return cls(g=float(g), alpha=float(alpha), nu1=rr.roots[0], nu3=rr.roots[2], t_final=float(t_final))


def exact_solution(spec, r, t):
    """Evaluate the reference solution at radius r (scalar or array) and
    time t >= 0."""
    if t < 0.0:
        raise ParameterError(f"time must be >= 0, got {t}")
    a1, a2 = spec.amplitudes
    two_alpha = 2.0 * spec.alpha
    return a1 * math.exp(-spec.nu1**two_alpha * t) * bessel_j0(spec.nu1 * np.asarray(r, dtype=float)) + a2 * math.exp(
        -spec.nu3**two_alpha * t
    ) * bessel_j0(spec.nu3 * np.asarray(r, dtype=float))
