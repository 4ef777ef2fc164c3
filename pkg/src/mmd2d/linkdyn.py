"""Link stability, pointing error, beam-alignment overhead and frame timing."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import SIDELOBE_DECADES
from .geometry import RelativeMotion

_SNAP = 1e-9
_TIE = 1e-12


@dataclass(frozen=True)
class TimingBudget:
    t_pilot: float = 10e-6
    t_reply: float = 1e-3
    t_decide: float = 1e-3
    t_ack: float = 1e-3
    misalignment_threshold: float = 0.5

    def __post_init__(self):
        if min(self.t_pilot, self.t_reply, self.t_decide, self.t_ack) < 0:
            raise ValueError("timing values must be >= 0")
        if not 0.0 < self.misalignment_threshold <= 1.0:
            raise ValueError("misalignment threshold must lie in (0, 1]")

    @property
    def association_exchange(self) -> float:
        """One PDB-reply / decision / ACK exchange."""
        return self.t_reply + self.t_decide + self.t_ack


@dataclass
class D2DLink:
    tx: int
    rx: int
    distance: float
    los: bool
    relative_motion: RelativeMotion
    stability_time: float = math.inf
    alignment_time: float = 0.0
    requested_segments: int = 0
    requested_bits: float = 0.0


def pointing_error(motion: RelativeMotion, d: float, dt: float) -> float:
    """Small-angle receiver pointing error after ``dt`` seconds.

    Assumes ``V * dt`` is much smaller than ``d``; this is not checked.
    """
    return motion.relative_speed * dt * math.sin(motion.relative_angle) / d


def _stability_factor(alpha):
    return np.sqrt(np.log(1.0 / alpha) / (SIDELOBE_DECADES * math.log(10.0)))


def link_stability_time(d, rx_beamwidth, motion: RelativeMotion, alpha: float):
    """Time until the receive gain drops to ``alpha`` of its peak.

    Returns ``math.inf`` when the motion has no transverse component.
    Vectorized over ``d`` and ``rx_beamwidth``.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError("misalignment threshold must lie in (0, 1]")
    transverse = motion.relative_speed * math.sin(motion.relative_angle)
    return stability_time_array(d, rx_beamwidth, transverse, alpha)


def stability_time_array(d, phi, transverse_speed, alpha: float):
    """Array form of :func:`link_stability_time` taking ``V sin(mu)`` directly."""
    d = np.asarray(d, dtype=float)
    phi = np.asarray(phi, dtype=float)
    v = np.abs(np.asarray(transverse_speed, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = d * phi / v * _stability_factor(alpha)
    # alpha == 1 makes the factor 0; that wins even over zero transverse motion
    t = np.where(v > 0.0, t, math.inf)
    if alpha == 1.0:
        t = np.zeros_like(t)
    return float(t) if t.ndim == 0 else t


def sector_count(wide, narrow):
    """``ceil(wide / narrow)`` with ratios within 1e-9 of an integer snapped."""
    ratio = np.asarray(wide, dtype=float) / np.asarray(narrow, dtype=float)
    nearest = np.round(ratio)
    snapped = np.where(np.abs(ratio - nearest) <= _SNAP * np.maximum(1.0, nearest), nearest, np.ceil(ratio))
    return snapped.astype(int) if snapped.ndim else int(snapped)


def alignment_time(psi_m, psi_n, phi_m, phi_n, t_pilot: float):
    """Narrow-beam search time inside already aligned wide sectors."""
    if np.any(np.asarray(phi_m) > np.asarray(psi_m) * (1 + _SNAP)) or \
            np.any(np.asarray(phi_n) > np.asarray(psi_n) * (1 + _SNAP)):
        raise ValueError("narrow beamwidth cannot exceed the wide beamwidth")
    out = sector_count(psi_m, phi_m) * sector_count(psi_n, phi_n) * t_pilot
    return float(out) if np.ndim(out) == 0 else out


def feasible_beamwidths(action_set: Sequence[float], psi_m: float, psi_n: float,
                        t_pilot: float, stability) -> list[tuple[float, float]]:
    """Beamwidth pairs allowed by the alignment-vs-stability bound.

    ``stability`` is either one stability time for every candidate or a
    callable mapping the receiver beamwidth to its stability time. A pair is
    kept when ``phi_m * phi_n >= psi_m * psi_n * t_pilot / T_S``, both
    beamwidths fit inside their wide sectors, and the ceil-rounded
    alignment time does not exceed ``T_S``.
    """
    stab = stability if callable(stability) else (lambda _phi: stability)
    out = []
    for phi_m in action_set:
        if phi_m > psi_m:
            continue
        for phi_n in action_set:
            if phi_n > psi_n:
                continue
            t_s = stab(phi_n)
            if not t_s > 0:
                continue
            # relative slack keeps exact boundary equality on the feasible side
            if phi_m * phi_n < psi_m * psi_n * t_pilot / t_s * (1 - _TIE):
                continue
            if alignment_time(psi_m, psi_n, phi_m, phi_n, t_pilot) > t_s * (1 + _TIE):
                continue
            out.append((phi_m, phi_n))
    return out


def alignment_efficiency(t_align, t_stable):
    """``1 - T_A / T_S``; 0 when alignment does not fit in the stable window."""
    t_align = np.asarray(t_align, dtype=float)
    t_stable = np.asarray(t_stable, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        gamma = np.where(np.isinf(t_stable), 1.0, 1.0 - t_align / t_stable)
    gamma = np.where((t_align > t_stable) | (t_stable <= 0.0), 0.0, gamma)
    return float(gamma) if gamma.ndim == 0 else gamma


def is_feasible(t_align: float, t_stable: float) -> bool:
    return t_align <= t_stable


def common_feasible_mask(action_set, psi_m: float, psi_n: float, t_pilot: float, t_stable) -> np.ndarray:
    """Vectorized feasibility of pair-common beamwidths.

    ``t_stable`` has shape ``(links, actions)`` (stability at each candidate);
    entry ``[l, a]`` of the result tells whether both ends may use
    ``action_set[a]``. Same rules as :func:`feasible_beamwidths`.
    """
    phi = np.asarray(action_set, dtype=float)
    t_s = np.asarray(t_stable, dtype=float)
    fits = (phi <= psi_m) & (phi <= psi_n)
    ok = np.broadcast_to(fits, t_s.shape) & (t_s > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = np.where(t_s > 0, psi_m * psi_n * t_pilot / t_s, np.inf)
    ok = ok & ~(phi * phi < bound * (1 - _TIE))
    safe = np.where(fits, phi, min(psi_m, psi_n))
    t_a = sector_count(psi_m, safe) * sector_count(psi_n, safe) * t_pilot
    return ok & ~(t_a > t_s * (1 + _TIE))
