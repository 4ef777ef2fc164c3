"""Per-link and per-trial metrics and their Monte Carlo aggregation."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class LinkOutcome:
    rate: float  # bit/s
    eq8_throughput: Optional[float]  # rate * T_S / requested; None when nothing was requested
    delivered_bits: float
    stability_time: float  # s
    alignment_time: float  # s
    penalty_active: bool
    requested_bits: float = 0.0


@dataclass(frozen=True)
class TrialMetrics:
    sum_throughput: float
    mean_throughput: float
    delivered_segments: int
    cellular_bits: int
    d2d_bits: int
    demanded_bits: int
    lll_iterations: int
    matched_fraction: float
    n_links: int = 0
    lll_converged: bool = True

    def __post_init__(self):
        if self.cellular_bits + self.d2d_bits != self.demanded_bits:
            raise ValueError("offload accounting broken: cellular + D2D != demanded")

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_dict(self) -> dict:
        return asdict(self)


def eq8_throughput(rate: float, stability: float, requested: float) -> Optional[float]:
    """Data moved during the stability time relative to the request size."""
    if requested < 0:
        raise ValueError("requested size must be >= 0")
    if requested == 0:
        return None
    return rate * stability / requested


def delivered_bits(rate: float, stability: float, alignment: float, requested: float) -> float:
    """Bits that fit in the window left after alignment, capped by the request."""
    if rate <= 0 or stability <= alignment:
        return 0.0
    if math.isinf(stability):
        return float(requested)
    return float(min(rate * (stability - alignment), requested))


def trial_metrics(outcomes: Sequence[LinkOutcome], delivered_segments: int, d2d_bits: int,
                  demanded_bits: int, lll_iterations: int = 0, matched_fraction: float = 0.0,
                  lll_converged: bool = True) -> TrialMetrics:
    xi = [o.eq8_throughput for o in outcomes if o.eq8_throughput is not None]
    total = float(np.sum(xi)) if xi else 0.0
    return TrialMetrics(
        sum_throughput=total,
        mean_throughput=total / len(outcomes) if outcomes else 0.0,
        delivered_segments=int(delivered_segments),
        cellular_bits=int(demanded_bits - d2d_bits),
        d2d_bits=int(d2d_bits),
        demanded_bits=int(demanded_bits),
        lll_iterations=int(lll_iterations),
        matched_fraction=float(matched_fraction),
        n_links=len(outcomes),
        lll_converged=bool(lll_converged),
    )


@dataclass(frozen=True)
class Summary:
    mean: float
    stderr: float
    n: int


def empirical_cdf(values, grid=None, points: int = 101):
    """Empirical CDF of ``values`` on ``grid`` (default: evenly spaced over the range)."""
    v = np.sort(np.asarray(values, dtype=float))
    if grid is None:
        lo, hi = (float(v[0]), float(v[-1])) if v.size else (0.0, 1.0)
        grid = np.linspace(lo, hi, points)
    grid = np.asarray(grid, dtype=float)
    cdf = np.searchsorted(v, grid, side="right") / max(v.size, 1)
    return grid, cdf


AGGREGATED = ("sum_throughput", "mean_throughput", "delivered_segments", "cellular_bits", "d2d_bits",
              "demanded_bits", "lll_iterations", "matched_fraction", "n_links")


def summarize(values) -> Summary:
    v = np.asarray(values, dtype=float)
    n = v.size
    if n == 0:
        return Summary(math.nan, math.nan, 0)
    se = float(np.std(v, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return Summary(float(np.mean(v)), se, n)


def aggregate(trials: Sequence[TrialMetrics], cdf_points: int = 101) -> dict:
    """Mean, standard error and empirical CDF of every numeric trial metric."""
    if not trials:
        raise ValueError("nothing to aggregate")
    out = {}
    for name in AGGREGATED:
        values = [getattr(t, name) for t in trials]
        grid, cdf = empirical_cdf(values, points=cdf_points)
        out[name] = {"summary": summarize(values), "grid": grid, "cdf": cdf}
    return out
