import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import _highprec as hp
from mmd2d.channel import (ChannelParams, DirectionalAntenna, GainClass, Terminal, antenna_gain,
                           classify_interference_gain, data_rate, db_to_linear, dbm_to_watts, gain_pattern,
                           interference_power, los_probability, main_lobe_gain, network_sinr, path_loss,
                           sample_fading, sample_los, side_lobe_gain, signal_power, sinr, watts_to_dbm)
from mmd2d.geometry import Position

phis = st.floats(math.radians(1), math.pi, allow_nan=False)
P = ChannelParams()


def test_peak_gain_example():
    assert main_lobe_gain(math.pi / 6) == pytest.approx(13.157, abs=5e-4)
    assert main_lobe_gain(math.pi / 6) == pytest.approx(float(hp.peak_gain(hp.pi / 6)), rel=1e-12)


@given(phis)
def test_gain_is_continuous_at_the_edge(phi):
    a = DirectionalAntenna(phi, wide_beamwidth=math.pi)
    g = side_lobe_gain(phi)
    assert antenna_gain(a, phi) == pytest.approx(g, rel=1e-9)
    assert antenna_gain(a, phi * (1 - 1e-12)) == pytest.approx(g, rel=1e-9)
    assert antenna_gain(a, 2 * phi) == g


@given(phis, st.floats(-math.pi, math.pi))
def test_gain_even_and_peaked(phi, theta):
    a = DirectionalAntenna(phi, wide_beamwidth=math.pi)
    assert antenna_gain(a, theta) == antenna_gain(a, -theta)
    assert antenna_gain(a, 0.0) >= antenna_gain(a, theta)


@given(phis, st.floats(-math.pi, math.pi))
def test_vector_pattern_matches_scalar(phi, theta):
    a = DirectionalAntenna(phi, wide_beamwidth=math.pi)
    assert float(gain_pattern(phi, theta)) == pytest.approx(antenna_gain(a, theta), rel=1e-12)


@given(phis, phis)
def test_peak_gain_decreases_with_beamwidth(a, b):
    if a < b:
        assert main_lobe_gain(a) > main_lobe_gain(b)


def test_bad_beamwidth_rejected():
    with pytest.raises(ValueError):
        main_lobe_gain(0.0)
    with pytest.raises(ValueError):
        DirectionalAntenna(math.pi / 2 + 0.1)


def test_path_loss_examples():
    assert 10 * math.log10(path_loss(P, 1.0)) == pytest.approx(-61.7)
    assert 10 * math.log10(path_loss(P, 10.0)) == pytest.approx(-81.7)
    assert path_loss(P, 20.0) / path_loss(P, 10.0) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        path_loss(P, 0.0)


def test_fading_moments():
    rng = np.random.default_rng(0)
    h = sample_fading(3.0, rng, 10 ** 6)
    assert abs(h.mean() - 1.0) < 0.01
    assert h.var() == pytest.approx(1 / 3, rel=0.05)
    assert sample_fading(1e6, rng, 10 ** 4).var() < 1e-4
    with pytest.raises(ValueError):
        sample_fading(0.4, rng)


def test_los_examples():
    assert los_probability(0.0027, 0.0) == 1.0
    assert los_probability(0.0027, 100.0) == pytest.approx(float(hp.los_probability("0.0027", 100)), rel=1e-12)
    assert np.all(sample_los(0.0, np.full(100, 500.0), np.random.default_rng(1)))


@given(st.floats(0, 0.1), st.floats(0, 0.1), st.floats(0, 1000), st.floats(0, 1000))
def test_los_monotone(b1, b2, d1, d2):
    if b1 <= b2 and d1 <= d2:
        assert los_probability(b2, d2) <= los_probability(b1, d1)


def _term(x, y, phi, toward):
    return Terminal(Position(x, y), DirectionalAntenna(phi, boresight=toward))


def test_gain_classes():
    phi = math.radians(15)
    # facing each other
    cls, g = classify_interference_gain(_term(0, 0, phi, 0.0), _term(10, 0, phi, math.pi))
    assert cls is GainClass.MAIN_MAIN and g == pytest.approx(main_lobe_gain(phi) ** 2)
    # backs turned
    cls, g = classify_interference_gain(_term(0, 0, phi, math.pi), _term(10, 0, phi, 0.0))
    assert cls is GainClass.SIDE_SIDE and g == pytest.approx(side_lobe_gain(phi) ** 2)
    # interferer main lobe on victim, victim looking away
    cls, g = classify_interference_gain(_term(0, 0, phi, 0.0), _term(10, 0, phi, 0.0))
    assert cls is GainClass.MAIN_SIDE and g == pytest.approx(main_lobe_gain(phi) * side_lobe_gain(phi))


def test_interference_power_rules():
    phi = math.radians(25)
    a, b = _term(0, 0, phi, 0.0), _term(30, 0, phi, math.pi)
    assert interference_power(P, a, b, los=False) == 0.0
    base = interference_power(P, a, b)
    louder = ChannelParams(tx_power_dbm=P.tx_power_dbm + 10 * math.log10(2))
    assert interference_power(louder, a, b) == pytest.approx(2 * base)
    side = interference_power(P, _term(0, 0, phi, math.pi), _term(30, 0, phi, 0.0))
    assert side > 0


def test_sinr_reduces_to_snr_and_decreases_with_interferers():
    phi = math.radians(15)
    tx, rx = _term(0, 0, phi, 0.0), _term(40, 0, phi, math.pi)
    snr = sinr(P, tx, rx)
    assert snr == pytest.approx(signal_power(P, tx, rx) / P.noise_power)
    with_one = sinr(P, tx, rx, [(_term(60, 10, phi, math.pi), 1.0)])
    assert with_one < snr
    wider = sinr(P, _term(0, 0, 2 * phi, 0.0), _term(40, 0, 2 * phi, math.pi))
    assert wider < snr


def test_network_sinr_matches_term_by_term_sum():
    rng = np.random.default_rng(4)
    for n in range(1, 5):
        tx = rng.uniform(0, 100, (n, 2))
        rx = tx + rng.uniform(-40, 40, (n, 2))
        phi = rng.choice(np.radians([15, 25, 35, 45]), n)
        los = rng.random((n, n)) < 0.7
        fad = rng.gamma(3, 1 / 3, (n, n))
        vec = network_sinr(P, tx, rx, phi, los, fad)
        for l in range(n):
            b_tx = math.atan2(*(rx[l] - tx[l])[::-1])
            b_rx = math.atan2(*(tx[l] - rx[l])[::-1])
            me_tx, me_rx = _term(*tx[l], phi[l], b_tx), _term(*rx[l], phi[l], b_rx)
            others = []
            for i in range(n):
                if i != l and los[l, i]:
                    bore = math.atan2(*(rx[i] - tx[i])[::-1])
                    others.append((_term(*tx[i], phi[i], bore), fad[l, i]))
            assert vec[l] == pytest.approx(sinr(P, me_tx, me_rx, others, fad[l, l]), rel=1e-12)


def test_data_rate_examples():
    p = ChannelParams(bandwidth=100e6)
    assert data_rate(p, 0.0, 1.0) == 0.0
    assert data_rate(p, 5.0, 0.0) == 0.0
    assert data_rate(p, 1.0, 1.0) == pytest.approx(100e6)
    with pytest.raises(ValueError):
        data_rate(p, 1.0, 1.5)


def test_unit_conversions():
    assert dbm_to_watts(30.0) == pytest.approx(1.0)
    assert watts_to_dbm(dbm_to_watts(15.0)) == pytest.approx(15.0)
    assert db_to_linear(-10.0) == pytest.approx(0.1)
    assert P.noise_power == pytest.approx(dbm_to_watts(-174.0) * 100e6)


def test_channel_params_validation():
    for bad in (dict(pathloss_exponent=-1), dict(nakagami_shape=0.2), dict(blockage_beta=-1), dict(bandwidth=0)):
        with pytest.raises(ValueError):
            ChannelParams(**bad)
