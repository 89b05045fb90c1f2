"""Volume-comparison machinery: the three-branch radial profile, its
integrals, explicit packing/overlap/degree bounds derived from integral
ratios, small-ball and doubling constants, and the empirical monotonicity
check of the normalized ball-measure quotient.

All bounds are pure functions of declared (K, N, D) data.  Integer bounds
floor their integral ratios; flat-space ratios use the exact closed form
(radius ratio to the power N) so the integers are stable across scales.
"""

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from ._profile import adaptive_simpson, domain_limit, profile_integral, profile_value
from .errors import UnsupportedRegimeError, ValidationError

if TYPE_CHECKING:  # pragma: no cover
    from .spaces import CurvatureDimensionData, MetricMeasureSpace


def s_profile(K: float, N: float, t: float) -> float:
    """Radial comparison density: sin/linear/sinh to the power N-1."""
    return profile_value(K, N, t)


def s_integral(K: float, N: float, r: float) -> float:
    """Integral of the comparison density from 0 to r.

    Closed forms for K = 0 (any N) and N in {1, 2}; adaptive Simpson with
    absolute tolerance 1e-12 otherwise.
    """
    return profile_integral(K, N, r)


@dataclass
class ComparisonProfile:
    """Density for fixed (K, N) with a small integral cache."""

    K: float
    N: float
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.N < 1.0:
            raise ValidationError(f"N={self.N} must be >= 1")

    @property
    def closed_form(self) -> bool:
        return self.K == 0.0 or self.N in (1.0, 2.0)

    @property
    def domain(self) -> float:
        return domain_limit(self.K, self.N)

    def value(self, t: float) -> float:
        return profile_value(self.K, self.N, t)

    def integral(self, r: float) -> float:
        if r not in self._cache:
            self._cache[r] = profile_integral(self.K, self.N, r)
        return self._cache[r]


def _check_eps(eps):
    if not eps > 0.0:
        raise ValidationError(f"eps={eps} must be positive")


def _flat_or_ratio(K, N, num_radius, den_radius, flat_ratio):
    """Integral ratio; for K = 0 use the exact power form of ``flat_ratio``."""
    if K == 0.0:
        return float(flat_ratio) ** N
    return profile_integral(K, N, num_radius) / profile_integral(K, N, den_radius)


def bound_n1(cd: "CurvatureDimensionData", eps: float) -> int:
    """Upper bound on the size of any maximal eps-separated net: the integral
    ratio at radii (D, eps/2), floored."""
    _check_eps(eps)
    if eps > 2.0 * cd.D:
        raise ValidationError(f"eps={eps} exceeds twice the diameter bound {cd.D}")
    return int(math.floor(_flat_or_ratio(cd.K, cd.N, cd.D, 0.5 * eps, cd.D / (0.5 * eps))))


def bound_n2(cd: "CurvatureDimensionData", eps: float) -> int:
    """Upper bound on how many net balls can meet any fixed eps-ball: the
    integral ratio at radii (9 eps/2, eps/2), floored.  Independent of eps
    when K = 0 (exactly 9^N there)."""
    _check_eps(eps)
    return int(math.floor(_flat_or_ratio(cd.K, cd.N, 4.5 * eps, 0.5 * eps, 9.0)))


def bound_n3(cd: "CurvatureDimensionData", eps: float, C: float) -> int:
    """Distance-transfer constant between equally-patterned nets: with
    k = ceil(C), n' is the floored integral ratio at ((4k+1) eps/2, eps/2)
    and the bound is 2 (n' - 1)."""
    _check_eps(eps)
    if C < 1.0:
        raise ValidationError(f"C={C} must be >= 1")
    k = math.ceil(C)
    mult = 4 * k + 1
    nprime = int(math.floor(_flat_or_ratio(cd.K, cd.N, 0.5 * mult * eps, 0.5 * eps, mult)))
    return 2 * (nprime - 1)


def _require_nonpositive_K(cd):
    if cd.K > 0.0:
        raise UnsupportedRegimeError(
            f"net-in-ball and degree bounds need K <= 0 (got K={cd.K})"
        )
    if not math.isfinite(cd.N):
        raise ValidationError("bounds need a finite effective dimension N")


def bound_net_in_ball(cd: "CurvatureDimensionData", eps: float, r: float) -> int:
    """Upper bound on net points inside any ball of radius r (K <= 0 only):
    the integral ratio at (2r + eps/2, eps/2), floored."""
    _check_eps(eps)
    _require_nonpositive_K(cd)
    if r < 0.0:
        raise ValidationError("r must be nonnegative")
    return int(
        math.floor(
            _flat_or_ratio(cd.K, cd.N, 2.0 * r + 0.5 * eps, 0.5 * eps, 4.0 * r / eps + 1.0)
        )
    )


def bound_degree(cd: "CurvatureDimensionData", eps: float, r: float | None = None) -> int:
    """Upper bound on the degree of a net vertex (K <= 0 only): the integral
    ratio at (4r + eps/2, eps/2), floored.  ``r`` defaults to eps, the radius
    that covers all pattern neighbours."""
    _check_eps(eps)
    _require_nonpositive_K(cd)
    if r is None:
        r = eps
    if r < 0.0:
        raise ValidationError("r must be nonnegative")
    return int(
        math.floor(
            _flat_or_ratio(cd.K, cd.N, 4.0 * r + 0.5 * eps, 0.5 * eps, 8.0 * r / eps + 1.0)
        )
    )


# ---------------------------------------------------------------------------
# small-ball and doubling constants

def small_ball_constant(cd: "CurvatureDimensionData", R: float) -> float:
    """Constant c = c(K, N, R) with measure(B(x,r)) >= c * measure(B(z,R)) * r^N
    whenever B(x,r) is contained in B(z,R).

    Derived by comparing B(x,r) against B(x,2R), which contains B(z,R):
    c is the worst case over r in (0, R] of integral(r) / (r^N integral(2R)).
    """
    if not R > 0.0:
        raise ValidationError("R must be positive")
    K, N = cd.K, cd.N
    big = profile_integral(K, N, 2.0 * R)  # raises DomainError if 2R is out of range
    # r -> 0 limit of integral(r)/r^N
    if K == 0.0 or N == 1.0:
        worst = 1.0 / N
    else:
        a = math.sqrt(abs(K) / (N - 1.0))
        worst = a ** (N - 1.0) / N
    for r in np.geomspace(1e-6 * R, R, 64):
        worst = min(worst, profile_integral(K, N, float(r)) / float(r) ** N)
    return worst / big


def doubling_constant(cd: "CurvatureDimensionData", R: float) -> float:
    """Constant C = C(K, N, R) with measure(B(z,2r)) <= C * measure(B(z,r))
    for all r < R: the supremum of integral(2r)/integral(r) over (0, R)."""
    if not R > 0.0:
        raise ValidationError("R must be positive")
    K, N = cd.K, cd.N
    if K == 0.0:
        return 2.0**N
    profile_integral(K, N, 2.0 * R)  # domain check
    best = 2.0**N  # r -> 0 limit
    for r in np.geomspace(1e-6 * R, R, 128):
        best = max(best, profile_integral(K, N, 2.0 * float(r)) / profile_integral(K, N, float(r)))
    return best


# ---------------------------------------------------------------------------
# bundled bounds (CLI payload)

@dataclass
class PackingBounds:
    """All explicit constants for one (K, N, D, eps) configuration.

    ``net_card_bound`` and ``degree_bound`` are None when K > 0 (they are
    only defined for nonpositive K).
    """

    eps: float
    n1: int
    n2: int
    n3: dict
    net_card_bound: int | None
    degree_bound: int | None
    doubling_constant: float
    small_ball_constant: float
    domain_limit: float

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ValidationError("packing bounds must be >= 1")


def compute_packing_bounds(cd, eps, C_values=(1.0,), r=None, R=None) -> PackingBounds:
    """Evaluate every bound at one eps.  ``r`` defaults to eps (net-in-ball and
    degree), ``R`` to D/2 (small-ball and doubling)."""
    if R is None:
        R = 0.5 * cd.D
    if r is None:
        r = eps
    if cd.K > 0.0:
        net_card = degree = None
    else:
        net_card = bound_net_in_ball(cd, eps, r)
        degree = bound_degree(cd, eps, r)
    return PackingBounds(
        eps=eps,
        n1=bound_n1(cd, eps),
        n2=bound_n2(cd, eps),
        n3={float(C): bound_n3(cd, eps, C) for C in C_values},
        net_card_bound=net_card,
        degree_bound=degree,
        doubling_constant=doubling_constant(cd, R),
        small_ball_constant=small_ball_constant(cd, R),
        domain_limit=domain_limit(cd.K, cd.N),
    )


# ---------------------------------------------------------------------------
# monotonicity of the normalized ball-measure quotient

@dataclass
class MonotonicityReport:
    """Grid evaluation of phi(r) = measure(B(x,r)) / integral(r) with every
    adjacent increase and a verdict against the tolerance."""

    radii: np.ndarray
    phi: np.ndarray
    std_errors: np.ndarray | None
    increases: list  # (index i, phi[i+1]-phi[i], tolerance used)
    violations: list  # increases beyond tolerance
    passed: bool
    method: str


def bishop_gromov_check(
    space: "MetricMeasureSpace",
    center,
    r_grid,
    budget: int | None = None,
    seed: int = 0,
    z_tol: float = 3.0,
    rel_tol: float = 1e-12,
) -> MonotonicityReport:
    """Check that phi(r) = ball measure over comparison integral is
    nonincreasing on the given radius grid.

    With ``budget=None`` the space's exact ball measures are used and adjacent
    increases beyond ``rel_tol`` (relative) fail the check.  Otherwise one
    fixed sample of ``budget`` points estimates all measures and increases
    beyond ``z_tol`` standard errors fail.
    """
    radii = np.asarray(r_grid, dtype=np.float64)
    if radii.size == 0:
        raise ValidationError("empty radius grid")
    if np.any(np.diff(radii) <= 0) or radii[0] <= 0:
        raise ValidationError("radius grid must be positive and strictly increasing")
    K, N = space.cd_data.K, space.cd_data.N
    denom = np.array([profile_integral(K, N, float(r)) for r in radii])

    if budget is None:
        vols = np.array([space.ball_measure(center, float(r)) for r in radii])
        se = None
        method = "closed_form"
    else:
        budget = int(budget)
        pts = space.sample(budget, np.random.SeedSequence((seed, 0x62670001)))
        w = space.sample_weights(pts)
        d = space.distance_to_many(center, pts)
        order = np.argsort(d, kind="stable")
        d_sorted = d[order]
        cw = np.concatenate(([0.0], np.cumsum(w[order])))
        cw2 = np.concatenate(([0.0], np.cumsum(w[order] ** 2)))
        pos = np.searchsorted(d_sorted, radii, side="right")
        vols = cw[pos]
        total = cw[-1]
        frac = np.divide(vols, total, out=np.zeros_like(vols), where=total > 0)
        se = np.sqrt(np.maximum(cw2[pos] * (1.0 - frac), 0.0))
        method = "monte_carlo"

    phi = vols / denom
    increases = []
    violations = []
    for i in range(len(radii) - 1):
        delta = phi[i + 1] - phi[i]
        if se is None:
            tol = rel_tol * max(abs(phi[i]), abs(phi[i + 1]))
        else:
            tol = z_tol * math.hypot(se[i] / denom[i], se[i + 1] / denom[i + 1])
        if delta > 0:
            increases.append((i, float(delta), float(tol)))
        if delta > tol:
            violations.append((i, float(delta), float(tol)))
    return MonotonicityReport(
        radii=radii,
        phi=phi,
        std_errors=None if se is None else se / denom,
        increases=increases,
        violations=violations,
        passed=not violations,
        method=method,
    )


__all__ = [
    "ComparisonProfile",
    "MonotonicityReport",
    "PackingBounds",
    "adaptive_simpson",
    "bishop_gromov_check",
    "bound_degree",
    "bound_n1",
    "bound_n2",
    "bound_n3",
    "bound_net_in_ball",
    "compute_packing_bounds",
    "doubling_constant",
    "domain_limit",
    "s_integral",
    "s_profile",
    "small_ball_constant",
]
