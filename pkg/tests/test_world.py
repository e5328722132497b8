import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavma.errors import ParameterError
from uavma.world import (BdSpec, Scenario, aim_angles, generate_scenario, observe_bds, slant_range,
                         wrap_angle)

coord = st.floats(0.0, 300.0, allow_nan=False)
alt = st.floats(1.0, 200.0, allow_nan=False)


def test_generate_counts_and_ranges():
    sc = generate_scenario(7, 20, 200.0, volume_range=(1e5, 5e5))
    assert sc.K == 20
    assert np.all((sc.positions >= 0) & (sc.positions <= 200))
    assert np.all((sc.volumes >= 1e5) & (sc.volumes <= 5e5))
    assert [b.id for b in sc.bds] == list(range(20))


def test_generate_is_deterministic_and_seed_sensitive():
    a, b, c = generate_scenario(7, 20, 200.0), generate_scenario(7, 20, 200.0), generate_scenario(8, 20, 200.0)
    assert a == b
    assert np.any(a.positions != c.positions)


def test_smaller_k_is_prefix():
    big, small = generate_scenario(3, 20, 200.0), generate_scenario(3, 5, 200.0)
    assert big.bds[:5] == small.bds


@pytest.mark.parametrize("kw", [dict(K=0), dict(L=0.0), dict(H=-1.0), dict(volume_range=(5e5, 1e5)),
                                dict(seed=-1)])
def test_generate_rejects_bad_ranges(kw):
    args = dict(seed=0, K=3, L=50.0, H=30.0, volume_range=(1e5, 5e5)) | kw
    with pytest.raises(ParameterError):
        generate_scenario(**args)


def test_scenario_invariants_enforced():
    with pytest.raises(ParameterError):
        Scenario(L=10.0, H=30.0, bds=(BdSpec(0, 11.0, 0.0, 1e5),))
    with pytest.raises(ParameterError):
        Scenario(L=10.0, H=30.0, bds=(BdSpec(1, 1.0, 1.0, 1e5),))
    with pytest.raises(ParameterError):
        Scenario(L=10.0, H=30.0, bds=(BdSpec(0, 1.0, 1.0, 0.0),))
    with pytest.raises(ParameterError):
        Scenario(L=10.0, H=30.0, bds=())


def test_json_layout_and_round_trip(tmp_path):
    sc = generate_scenario(11, 4, 120.0, start=(5.0, 6.0))
    p = tmp_path / "s.json"
    sc.to_json(p)
    raw = json.loads(p.read_text())
    assert set(raw) == {"L", "H", "start", "seed", "bds"}
    assert set(raw["bds"][0]) == {"id", "x", "y", "volume_bits", "gain_dbi"}
    assert Scenario.from_json(p) == sc
    assert Scenario.from_json(sc.to_json()) == sc


def test_aim_examples():
    assert aim_angles((0, 0, 30), (30, 0)) == pytest.approx((math.pi / 4, 0.0))
    assert aim_angles((0, 0, 30), (0, 0)) == (math.pi / 2, 0.0)
    th, ph = aim_angles((0, 0, 30), (0, 40))
    assert th == pytest.approx(0.6435011087932844, abs=1e-12)
    assert ph == pytest.approx(math.pi / 2)


def test_slant_examples():
    assert slant_range((0, 0, 30), (40, 0)) == pytest.approx(50.0)
    assert slant_range((0, 0, 30), (0, 0)) == 30.0
    assert slant_range((10, 10, 30), (50, 40)) == pytest.approx(math.sqrt(3400.0))


def test_observe_examples():
    d, phi = observe_bds((0, 0), [(30, 0)])
    assert d.tolist() == [30.0] and phi.tolist() == [0.0]
    d, phi = observe_bds((100, 100), [(100, 100)])
    assert d.tolist() == [0.0] and phi.tolist() == [0.0]
    d, phi = observe_bds((0, 0), [(0, 50)])
    assert d[0] == 50.0 and phi[0] == pytest.approx(math.pi / 2)


def test_wrap_angle_range():
    out = wrap_angle(np.array([-1e-18, -math.pi, 2 * math.pi, 7.0]))
    assert np.all((out >= 0) & (out < 2 * math.pi))


@settings(max_examples=200, deadline=None)
@given(coord, coord, alt, coord, coord)
def test_geometry_consistency(x, y, h, px, py):
    th, ph = aim_angles((x, y, h), (px, py))
    d, phi = observe_bds((x, y), [(px, py)])
    r = slant_range((x, y, h), (px, py))
    assert 0 < th <= math.pi / 2
    assert 0 <= ph < 2 * math.pi
    assert r >= h
    assert r * r == pytest.approx(d[0] ** 2 + h * h, rel=1e-9)
    assert phi[0] == pytest.approx(ph, abs=1e-12)
    if d[0] > 1e-6:
        assert math.tan(th) * d[0] == pytest.approx(h, rel=1e-9)
