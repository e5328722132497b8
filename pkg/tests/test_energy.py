import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from uavma.energy import (EnergyLedger, MaParams, PropulsionParams, azimuth_delta, hover_power, ma_move,
                          propulsion_power, rotor_constants)
from uavma.errors import ParameterError

PP = PropulsionParams()
MA = MaParams()

# frozen from tests/oracles.py
P0 = 118.16448000000003
P1 = 41.55138756909566
HOVER = 159.71586756909568
P10 = 148.86782930910712
PARASITE_10 = 4.809072777599999

angle = st.floats(0.0, 2 * math.pi, exclude_max=True)
elev = st.floats(0.0, math.pi / 2)


def test_frozen_values_match_oracle():
    assert oracles.blade_power(0) == P0
    assert oracles.induced_power(0) == P1
    assert oracles.flight_power(10) == P10


def test_rotor_constants():
    p0, p1 = rotor_constants(PP)
    assert p0 == pytest.approx(P0, rel=1e-12)
    assert p1 == pytest.approx(P1, rel=1e-12)
    assert p0 == pytest.approx(118.17, abs=0.01)
    fast = replace(PP, blade_angular_velocity_radps=800.0)
    assert rotor_constants(fast)[0] == pytest.approx(8 * p0, rel=1e-12)


def test_propulsion_power_values():
    assert hover_power(PP) == pytest.approx(HOVER, rel=1e-12)
    assert hover_power(PP) == pytest.approx(sum(rotor_constants(PP)), rel=1e-15)
    assert propulsion_power(PP, 10.0) == pytest.approx(P10, rel=1e-12)
    assert oracles.parasite_power(10) == pytest.approx(PARASITE_10, rel=1e-12)
    assert propulsion_power(PP, 10.0) < hover_power(PP)


def test_negative_speed_rejected():
    with pytest.raises(ParameterError):
        propulsion_power(PP, -0.1)


@pytest.mark.parametrize("field", ["tip_speed_mps", "weight_n", "rotor_radius_m"])
def test_propulsion_params_positive(field):
    with pytest.raises(ParameterError):
        replace(PP, **{field: 0.0})


def test_ma_move_example():
    m = ma_move((0.0, 0.0), (math.pi / 4, math.pi / 2), MA)
    t, pw, e = oracles.ma_cost(math.pi / 4, math.pi / 2)
    assert m.time_s == 0.5 == t
    assert m.power_w == pytest.approx(2.0863937979737197, rel=1e-12) and m.power_w == pytest.approx(pw)
    assert m.energy_j == pytest.approx(1.0431968989868599, rel=1e-12) and m.energy_j == pytest.approx(e)


def test_null_move():
    m = ma_move((0.3, 1.0), (0.3, 1.0), MA)
    assert (m.dtheta, m.dphi, m.time_s, m.energy_j) == (0.0, 0.0, 0.0, 0.0)
    assert m.power_w == MA.base_power_w


def test_azimuth_takes_short_way_round():
    m = ma_move((0.0, 0.1), (0.0, 2 * math.pi - 0.1), MA)
    assert m.dphi == pytest.approx(0.2)


@settings(max_examples=300, deadline=None)
@given(elev, angle, elev, angle)
def test_ma_move_symmetric_and_bounded(t1, p1, t2, p2):
    a, b = ma_move((t1, p1), (t2, p2), MA), ma_move((t2, p2), (t1, p1), MA)
    assert a.time_s == pytest.approx(b.time_s, abs=1e-15)
    assert a.energy_j == pytest.approx(b.energy_j, abs=1e-15)
    assert 0.0 <= a.dphi <= math.pi
    assert azimuth_delta(p1, p2) == pytest.approx(azimuth_delta(p2, p1), abs=1e-15)


def test_ledger_examples():
    led = EnergyLedger()
    assert led.charge("flight", P10, 10.0)
    assert led.flight == pytest.approx(1488.6782930910712)
    before = led.as_dict()
    led.charge("hover", 100.0, 0.0)
    assert led.as_dict() == before
    small = EnergyLedger(capacity_j=100.0)
    assert small.charge("comm", 101.0, 1.0) is False
    assert small.comm == 101.0 and not small.feasible


def test_ledger_rejects_bad_input():
    led = EnergyLedger()
    with pytest.raises(ParameterError):
        led.charge("flight", -1.0, 1.0)
    with pytest.raises(ParameterError):
        led.charge("flight", 1.0, -1.0)
    with pytest.raises(ParameterError):
        led.charge("fuel", 1.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["flight", "hover", "comm", "ma"]),
                          st.floats(0.0, 500.0), st.floats(0.0, 100.0)), max_size=40))
def test_ledger_integral_identity(charges):
    led = EnergyLedger()
    prev = led.as_dict()
    for c, pw, dt in charges:
        led.charge(c, pw, dt)
        now = led.as_dict()
        assert all(now[k] >= prev[k] for k in now)
        prev = now
    integral = sum(p * d for _, p, d in led.charges)
    assert led.total == pytest.approx(integral, rel=1e-9, abs=1e-12)
