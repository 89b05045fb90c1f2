"""Volume-growth classification (polynomial vs exponential) for spaces and
discretization graphs, with a non-collapsing audit and growth-type agreement.

Spaces measure balls around a base point (Monte-Carlo over one fixed sample);
graphs count vertices in hop balls.  Classification regresses log V against
log r (polynomial, slope = exponent) and against r (exponential, slope =
rate) over a boundary-trimmed window and declares a type only when one fit's
residual dominates by the configured margin.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .discretization import DiscretizationGraph
from .errors import ValidationError

#: fraction of the smallest radii discarded before fitting
DROP_FRACTION = 0.2
#: residual dominance margin for classification
MARGIN = 0.25


@dataclass
class FitResult:
    slope: float
    intercept: float
    residual_rms: float


@dataclass
class GrowthReport:
    """Measured growth with both fits and the classification verdict."""

    kind: str  # "space" | "graph"
    radii: np.ndarray
    volumes: np.ndarray
    polynomial: FitResult | None
    exponential: FitResult | None
    classification: str  # "polynomial" | "exponential" | "inconclusive"
    exponent: float | None  # slope of the winning polynomial fit
    rate: float | None  # slope of the winning exponential fit
    window: np.ndarray  # radii actually used in the fits
    non_collapsing: dict | None  # {"r0", "V0", "value", "holds"}
    exp_statistic_standard: float | None  # log(V)/r at the largest radius
    exp_statistic_literal: float | None  # V/r at the largest radius (flagged variant)
    warnings: list


def _fit(x, y):
    coeffs = np.polyfit(x, y, 1)
    resid = y - np.polyval(coeffs, x)
    return FitResult(float(coeffs[0]), float(coeffs[1]), float(np.sqrt(np.mean(resid**2))))


def growth_profile(
    obj,
    base,
    r_grid,
    budget: int | None = None,
    seed: int = 0,
    r0: float | None = None,
    V0: float | None = None,
    margin: float = MARGIN,
    drop_fraction: float = DROP_FRACTION,
    literal_exponential: bool = False,
) -> GrowthReport:
    """Measure V(base, r) on the grid and classify the growth type."""
    radii = np.asarray(r_grid, dtype=np.float64)
    if radii.size < 2 or np.any(np.diff(radii) <= 0) or radii[0] <= 0:
        raise ValidationError("radius grid must be increasing with at least 2 points")
    notes = []

    if isinstance(obj, DiscretizationGraph):
        kind = "graph"
        levels = obj.hop_distances(int(base)).astype(np.float64)
        reach = levels[levels >= 0]
        ecc = float(reach.max())
        if radii[-1] > ecc:
            notes.append(f"grid capped at the base vertex eccentricity {ecc:g}")
            radii = radii[radii <= ecc]
            if radii.size < 2:
                raise ValidationError("grid has fewer than 2 radii below the eccentricity")
        volumes = np.array([(reach <= r).sum() for r in radii], dtype=np.float64)
        ncheck = None
        if r0 is not None:
            value = float((reach <= r0).sum())
            ncheck = {"r0": float(r0), "V0": V0, "value": value,
                      "holds": None if V0 is None else bool(value >= V0)}
    else:
        kind = "space"
        half_diam = 0.5 * obj.domain_diameter()
        if 0.0 < half_diam < radii[-1]:
            notes.append(f"grid capped at half the sample diameter {half_diam:g}")
            radii = radii[radii <= half_diam]
            if radii.size < 2:
                raise ValidationError("grid has fewer than 2 radii below half the diameter")
        if budget is None:
            raise ValidationError("space growth profiles need an estimation budget")
        pts = obj.sample(int(budget), np.random.SeedSequence((seed, 0x67720001)))
        w = obj.sample_weights(pts)
        d = obj.distance_to_many(base, pts)
        order = np.argsort(d, kind="stable")
        cw = np.concatenate(([0.0], np.cumsum(w[order])))
        pos = np.searchsorted(d[order], radii, side="right")
        volumes = cw[pos]
        ncheck = None
        if r0 is not None:
            value = float(cw[np.searchsorted(d[order], r0, side="right")])
            ncheck = {"r0": float(r0), "V0": V0, "value": value,
                      "holds": None if V0 is None else bool(value >= V0)}

    # fit window: drop the smallest radii (boundary-affected) and zero volumes
    start = int(math.ceil(drop_fraction * len(radii)))
    window = np.arange(len(radii))[start:]
    zero = volumes[window] <= 0
    if zero.any():
        notes.append(f"{int(zero.sum())} zero-volume radii excluded from the fits")
        window = window[~zero]

    poly = expo = None
    classification = "inconclusive"
    exponent = rate = None
    if len(window) >= 3:
        r_w = radii[window]
        logv = np.log(volumes[window])
        poly = _fit(np.log(r_w), logv)
        expo = _fit(r_w, logv)
        tiny = 1e-12
        if poly.residual_rms < tiny and expo.residual_rms < tiny:
            classification = "inconclusive"
        elif poly.residual_rms <= (1.0 - margin) * expo.residual_rms:
            classification = "polynomial"
            exponent = poly.slope
        elif expo.residual_rms <= (1.0 - margin) * poly.residual_rms:
            classification = "exponential"
            rate = expo.slope
    else:
        notes.append("fit window smaller than 3 radii; classification inconclusive")

    last = volumes[-1]
    std_stat = float(np.log(last) / radii[-1]) if last > 0 else None
    lit_stat = float(last / radii[-1]) if literal_exponential else None

    return GrowthReport(
        kind=kind,
        radii=radii,
        volumes=volumes,
        polynomial=poly,
        exponential=expo,
        classification=classification,
        exponent=exponent,
        rate=rate,
        window=radii[window],
        non_collapsing=ncheck,
        exp_statistic_standard=std_stat,
        exp_statistic_literal=lit_stat,
        warnings=notes,
    )


@dataclass
class AgreementVerdict:
    verdict: str  # "agree" | "disagree" | "undetermined"
    first: str
    second: str


def growth_agreement(a: GrowthReport, b: GrowthReport) -> AgreementVerdict:
    """Compare growth TYPES (not exponents/rates) of two reports."""
    if a.classification == "inconclusive" or b.classification == "inconclusive":
        return AgreementVerdict("undetermined", a.classification, b.classification)
    verdict = "agree" if a.classification == b.classification else "disagree"
    return AgreementVerdict(verdict, a.classification, b.classification)
