"""mmWave propagation: path loss, fading, blockage and the Gaussian antenna pattern.

All internal quantities are linear (watts, linear gains, radians). Decibel
values only appear on ``ChannelParams`` fields and are converted by its
properties.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .geometry import Position, bearing, distance, wrap_angle

# Side-lobe level of the Gaussian pattern, in decades below the peak.
SIDELOBE_DECADES = 2.028
_LN10 = math.log(10.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


@dataclass(frozen=True)
class ChannelParams:
    pathloss_intercept_db: float = -61.7
    pathloss_exponent: float = 2.0
    nakagami_shape: float = 3.0
    blockage_beta: float = 0.0027  # 1/m
    bandwidth: float = 100e6  # Hz
    noise_density_dbm_hz: float = -174.0
    tx_power_dbm: float = 15.0

    def __post_init__(self):
        if self.pathloss_exponent < 0:
            raise ValueError("pathloss_exponent must be >= 0")
        if self.nakagami_shape < 0.5:
            raise ValueError("nakagami_shape must be >= 0.5")
        if self.blockage_beta < 0:
            raise ValueError("blockage_beta must be >= 0")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")

    @property
    def intercept(self) -> float:
        return db_to_linear(self.pathloss_intercept_db)

    @property
    def tx_power(self) -> float:
        return dbm_to_watts(self.tx_power_dbm)

    @property
    def noise_power(self) -> float:
        """Thermal noise over the whole band, in watts."""
        return dbm_to_watts(self.noise_density_dbm_hz) * self.bandwidth


@dataclass(frozen=True)
class DirectionalAntenna:
    narrow_beamwidth: float  # rad, half-width of the main lobe
    wide_beamwidth: float = math.pi / 2  # rad
    boresight: float = 0.0  # rad

    def __post_init__(self):
        if not 0.0 < self.narrow_beamwidth <= self.wide_beamwidth <= math.pi:
            raise ValueError(
                f"need 0 < narrow ({self.narrow_beamwidth}) <= wide ({self.wide_beamwidth}) <= pi")
        object.__setattr__(self, "boresight", wrap_angle(self.boresight))

    @property
    def peak_gain(self) -> float:
        return main_lobe_gain(self.narrow_beamwidth)

    @property
    def side_gain(self) -> float:
        return side_lobe_gain(self.narrow_beamwidth)


class GainClass(enum.Enum):
    MAIN_MAIN = "GG"
    MAIN_SIDE = "Gg"  # interferer main lobe, victim side lobe
    SIDE_MAIN = "gG"
    SIDE_SIDE = "gg"


@dataclass(frozen=True)
class Terminal:
    """A radio endpoint: where it is and how its antenna is steered."""
    position: Position
    antenna: DirectionalAntenna


def _check_phi(phi):
    if np.any(np.asarray(phi) <= 0):
        raise ValueError("beamwidth must be positive")


def main_lobe_gain(phi):
    """Peak gain ``G`` for half-width ``phi`` (radians); accepts arrays."""
    _check_phi(phi)
    out = math.pi * 10.0 ** SIDELOBE_DECADES / (42.64 * np.asarray(phi, dtype=float) + math.pi)
    return float(out) if np.ndim(phi) == 0 else out


def side_lobe_gain(phi):
    return 10.0 ** (-SIDELOBE_DECADES) * main_lobe_gain(phi)


def gain_pattern(phi, offset):
    """Vectorized Gaussian pattern. Offsets with ``|offset| <= phi`` are main lobe."""
    phi = np.asarray(phi, dtype=float)
    offset = np.asarray(offset, dtype=float)
    _check_phi(phi)
    peak = math.pi * 10.0 ** SIDELOBE_DECADES / (42.64 * phi + math.pi)
    rho = SIDELOBE_DECADES * _LN10 / phi ** 2
    main = peak * np.exp(-rho * offset ** 2)
    return np.where(np.abs(offset) <= phi, main, 10.0 ** (-SIDELOBE_DECADES) * peak)


def antenna_gain(antenna: DirectionalAntenna, offset: float) -> float:
    """Gain toward a direction ``offset`` radians away from boresight."""
    phi = antenna.narrow_beamwidth
    peak = main_lobe_gain(phi)
    if abs(offset) <= phi:
        rho = SIDELOBE_DECADES * _LN10 / phi ** 2
        return peak * math.exp(-rho * offset ** 2)
    return 10.0 ** (-SIDELOBE_DECADES) * peak


def path_loss(params: ChannelParams, d):
    """Linear attenuation ``C * d**-alpha``; ``d`` in metres, must be > 0."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr <= 0):
        raise ValueError("path loss undefined for d <= 0 (co-located nodes)")
    out = params.intercept * d_arr ** (-params.pathloss_exponent)
    return float(out) if np.ndim(d) == 0 else out


def sample_fading(shape: float, rng: np.random.Generator, size=None):
    """Nakagami power gain ~ Gamma(shape, 1/shape), unit mean."""
    if shape < 0.5:
        raise ValueError("Nakagami shape must be >= 0.5")
    return rng.gamma(shape, 1.0 / shape, size=size)


def los_probability(beta: float, d):
    if beta < 0:
        raise ValueError("beta must be >= 0")
    return np.exp(-beta * np.asarray(d, dtype=float)) if np.ndim(d) else math.exp(-beta * d)


def sample_los(beta: float, d, rng: np.random.Generator):
    """Bernoulli LOS indicator(s) with probability ``exp(-beta d)``."""
    p = los_probability(beta, d)
    if np.ndim(d):
        return rng.random(np.shape(d)) < p
    return bool(rng.random() < p)


def _offset(src: Terminal, dst: Terminal) -> float:
    return wrap_angle(bearing(src.position, dst.position) - src.antenna.boresight)


def classify_interference_gain(interferer: Terminal, victim: Terminal) -> tuple[GainClass, float]:
    """Lobe class of an interfering transmitter/victim receiver geometry and
    the product of the two antenna gains along the interference path."""
    off_tx = _offset(interferer, victim)
    off_rx = _offset(victim, interferer)
    tx_main = abs(off_tx) <= interferer.antenna.narrow_beamwidth
    rx_main = abs(off_rx) <= victim.antenna.narrow_beamwidth
    cls = {
        (True, True): GainClass.MAIN_MAIN,
        (True, False): GainClass.MAIN_SIDE,
        (False, True): GainClass.SIDE_MAIN,
        (False, False): GainClass.SIDE_SIDE,
    }[(tx_main, rx_main)]
    return cls, antenna_gain(interferer.antenna, off_tx) * antenna_gain(victim.antenna, off_rx)


def interference_power(params: ChannelParams, interferer: Terminal, victim: Terminal,
                       h: float = 1.0, los: bool = True) -> float:
    """Received interference in watts; NLOS interferers contribute nothing."""
    if not los:
        return 0.0
    _, g_i = classify_interference_gain(interferer, victim)
    return params.tx_power * h * g_i * path_loss(params, distance(interferer.position, victim.position))


def signal_power(params: ChannelParams, tx: Terminal, rx: Terminal, h: float = 1.0) -> float:
    """Desired power after beam training: both peaks are aligned on the link."""
    return (params.tx_power * h * tx.antenna.peak_gain * rx.antenna.peak_gain
            * path_loss(params, distance(tx.position, rx.position)))


def sinr(params: ChannelParams, tx: Terminal, rx: Terminal,
         interferers: Iterable[tuple[Terminal, float]] = (), h: float = 1.0) -> float:
    """SINR of one link.

    ``interferers`` holds ``(terminal, fading)`` for every other active
    transmitter that has LOS to ``rx``.
    """
    total = sum(interference_power(params, t, rx, hi) for t, hi in interferers)
    return signal_power(params, tx, rx, h) / (params.noise_power + total)


def data_rate(params: ChannelParams, sinr_value, gamma) -> float:
    """``gamma * B * log2(1 + SINR)`` in bit/s."""
    g = np.asarray(gamma, dtype=float)
    if np.any((g < 0) | (g > 1)):
        raise ValueError("alignment efficiency must lie in [0, 1]")
    out = g * params.bandwidth * np.log2(1.0 + np.asarray(sinr_value, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def network_sinr(params: ChannelParams, tx_xy: np.ndarray, rx_xy: np.ndarray,
                 beamwidths: np.ndarray, cross_los: Optional[np.ndarray] = None,
                 fading: Optional[np.ndarray] = None, active: Optional[np.ndarray] = None,
                 rx_beamwidths: Optional[np.ndarray] = None) -> np.ndarray:
    """SINR of every link when all ``active`` links transmit at once.

    Link ``l`` runs from ``tx_xy[l]`` to ``rx_xy[l]`` and both ends point at
    each other. ``cross_los[l, i]`` says whether transmitter ``i`` has LOS to
    receiver ``l`` (diagonal ignored). ``fading[l, i]`` is the power gain on
    the path transmitter ``i`` -> receiver ``l``; the diagonal is the desired
    link. Missing arguments mean all-LOS and unit fading.
    """
    n = len(tx_xy)
    if n == 0:
        return np.zeros(0)
    phi_tx = np.asarray(beamwidths, dtype=float)
    phi_rx = phi_tx if rx_beamwidths is None else np.asarray(rx_beamwidths, dtype=float)
    if fading is None:
        fading = np.ones((n, n))
    if cross_los is None:
        cross_los = np.ones((n, n), dtype=bool)
    if active is None:
        active = np.ones(n, dtype=bool)

    tx_bore = np.arctan2(rx_xy[:, 1] - tx_xy[:, 1], rx_xy[:, 0] - tx_xy[:, 0])
    rx_bore = np.arctan2(tx_xy[:, 1] - rx_xy[:, 1], tx_xy[:, 0] - rx_xy[:, 0])
    # [l, i]: transmitter i toward receiver l
    dx = rx_xy[:, None, 0] - tx_xy[None, :, 0]
    dy = rx_xy[:, None, 1] - tx_xy[None, :, 1]
    d = np.hypot(dx, dy)
    ang_tx = np.arctan2(dy, dx)
    off_tx = _wrap(ang_tx - tx_bore[None, :])
    off_rx = _wrap(ang_tx + math.pi - rx_bore[:, None])
    g_tx = gain_pattern(phi_tx[None, :], off_tx)
    g_rx = gain_pattern(phi_rx[:, None], off_rx)

    diag = np.arange(n)
    signal = (params.tx_power * fading[diag, diag] * main_lobe_gain(phi_tx) * main_lobe_gain(phi_rx)
              * path_loss(params, d[diag, diag]))
    mask = cross_los & active[None, :]
    mask[diag, diag] = False
    safe_d = np.where(mask, d, 1.0)
    interf = np.where(mask, params.tx_power * fading * g_tx * g_rx * path_loss(params, safe_d), 0.0)
    return signal / (params.noise_power + interf.sum(axis=1))


def _wrap(theta: np.ndarray) -> np.ndarray:
    return np.remainder(theta + math.pi, 2.0 * math.pi) - math.pi
