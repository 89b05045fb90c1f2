"""Radial comparison densities shared by the space models and the bound machinery.

The density of a geodesic sphere of radius ``t`` in the constant-curvature
model with lower Ricci bound ``K`` and dimension parameter ``N`` is

    sin(sqrt(K/(N-1)) t)^(N-1)    K > 0   (domain t in [0, pi*sqrt((N-1)/K)])
    t^(N-1)                       K = 0
    sinh(sqrt(|K|/(N-1)) t)^(N-1) K < 0

For ``N == 1`` the density degenerates to the constant 1 (and no positive-K
model exists).  Integrals use closed forms when available (K = 0 any N;
N in {1, 2} otherwise) and adaptive Simpson quadrature elsewhere.
"""

import math

from .errors import DomainError

#: absolute quadrature tolerance
QUAD_TOL = 1e-12
#: bisection depth cap for the adaptive rule
QUAD_MAX_DEPTH = 60


def domain_limit(K: float, N: float) -> float:
    """Largest radius where the density is defined (inf for K <= 0)."""
    if K > 0.0:
        if N <= 1.0:
            return 0.0
        return math.pi * math.sqrt((N - 1.0) / K)
    return math.inf


def _check_domain(K, N, t):
    if t < 0.0:
        raise DomainError(f"negative radius t={t}")
    tmax = domain_limit(K, N)
    # tiny slack: grid endpoints produced by floating arithmetic may land
    # a few ulps past pi*sqrt((N-1)/K)
    if t > tmax * (1.0 + 1e-12):
        raise DomainError(f"radius t={t} exceeds the comparison domain [0, {tmax}]")


def profile_value(K: float, N: float, t: float) -> float:
    """Density value at radius ``t``."""
    if N < 1.0:
        raise DomainError(f"dimension parameter N={N} < 1")
    _check_domain(K, N, t)
    if N == 1.0:
        return 1.0
    if K > 0.0:
        a = math.sqrt(K / (N - 1.0))
        return math.sin(min(a * t, math.pi)) ** (N - 1.0)
    if K == 0.0:
        return t ** (N - 1.0)
    a = math.sqrt(-K / (N - 1.0))
    return math.sinh(a * t) ** (N - 1.0)


def _simpson(f, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive(f, a, fa, b, fb, whole, m, fm, tol, depth):
    lm, flm, left = _simpson(f, a, fa, m, fm)
    rm, frm, right = _simpson(f, m, fm, b, fb)
    delta = left + right - whole
    if depth >= QUAD_MAX_DEPTH or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return _adaptive(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth + 1) + _adaptive(
        f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth + 1
    )


def adaptive_simpson(f, a: float, b: float, tol: float = QUAD_TOL) -> float:
    """Adaptive Simpson rule with absolute tolerance ``tol``."""
    if b <= a:
        return 0.0
    fa, fb = f(a), f(b)
    m, fm, whole = _simpson(f, a, fa, b, fb)
    return _adaptive(f, a, fa, b, fb, whole, m, fm, tol, 0)


def profile_integral(K: float, N: float, r: float) -> float:
    """Integral of the density from 0 to ``r``."""
    if N < 1.0:
        raise DomainError(f"dimension parameter N={N} < 1")
    _check_domain(K, N, r)
    if r == 0.0:
        return 0.0
    if K == 0.0:
        return r**N / N
    if N == 1.0:
        return r
    if N == 2.0:
        # half-angle forms stay accurate for tiny radii
        if K > 0.0:
            a = math.sqrt(K)
            return 2.0 * math.sin(0.5 * a * r) ** 2 / a
        a = math.sqrt(-K)
        return 2.0 * math.sinh(0.5 * a * r) ** 2 / a
    return adaptive_simpson(lambda t: profile_value(K, N, t), 0.0, r)
