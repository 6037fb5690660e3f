import math

import numpy as np
import pytest

import sosfacet as sf
from sosfacet import HeightField, ModelParams
from sosfacet.hairs import default_c1, f2_interior_mask


def test_flat_field_has_no_hairs():
    f = HeightField(6, np.full((6, 6), 3, dtype=np.int64))
    assert sf.extract_hairs(f, ModelParams(1.0, 0.5, a=0.5)) == []
    assert sf.max_deviation_in_f2(f, ModelParams(1.0, 0.5, a=0.5)) == 0


def test_column_up_hair():
    # 5x5 block at height 1 with the central column raised to 4: L = 1,
    # up-hair through levels 2, 3, 4
    h = np.zeros((8, 8), dtype=np.int64)
    h[1:6, 1:6] = 1
    h[3, 3] = 4
    f = HeightField(8, h)
    p = ModelParams(1.0, 0.5, a=0.25)
    hairs = sf.extract_hairs(f, p)
    ups = [x for x in hairs if x.direction == "up"]
    assert len(ups) == 1
    assert ups[0].length == 3
    assert [c.level for c in ups[0].contours] == [2, 3, 4]
    assert sf.max_deviation_in_f2(f, p) == 3
    # first contour sits on at most a*N^2 area
    assert ups[0].contours[0].interior_area <= p.a * 64


def test_pit_down_hair():
    h = np.full((4, 4), 5, dtype=np.int64)
    h[1, 2] = 3
    f = HeightField(4, h)
    p = ModelParams(1.0, 0.5, a=0.2)
    hairs = sf.extract_hairs(f, p)
    downs = [x for x in hairs if x.direction == "down"]
    assert len(downs) == 1
    assert downs[0].length == 2
    assert [c.level for c in downs[0].contours] == [4, 3]
    assert sf.max_deviation_in_f2(f, p) == 2


def test_hair_nesting_monotone():
    rng = np.random.default_rng(3)
    p = ModelParams(1.0, 0.5, a=0.2)
    for _ in range(50):
        h = rng.integers(0, 5, (6, 6)).astype(np.int64)
        f = HeightField(6, h)
        if sf.facet_level(f, p.a) is None:
            continue
        for hair in sf.extract_hairs(f, p):
            areas = [c.interior_area for c in hair.contours]
            assert all(a >= b for a, b in zip(areas, areas[1:]))
            masks = [c.interior_mask for c in hair.contours]
            for big, small in zip(masks, masks[1:]):
                assert (big | small == big).all()  # inclusion


def test_hair_length_matches_deviation_for_columns():
    h = np.full((6, 6), 2, dtype=np.int64)
    h[1, 1] = 5   # column of excess 3
    h[4, 4] = 0   # pit of depth 2
    f = HeightField(6, h)
    p = ModelParams(1.0, 0.5, a=0.5)
    hairs = sf.extract_hairs(f, p)
    assert max(x.length for x in hairs) == sf.max_deviation_in_f2(f, p) == 3
    assert {x.direction for x in hairs} == {"up", "down"}


def test_f2_interior_mask_full_box():
    f = HeightField(4, np.full((4, 4), 2, dtype=np.int64))
    assert f2_interior_mask(f, ModelParams(1.0, 0.5, a=0.5)).all()


def test_default_c1():
    assert default_c1(10.0) == pytest.approx(6.25)


def test_scale_table_values():
    t = sf.scale_table(100, 0.1, c1=0.1, c2=10.0)
    assert t.r_max == 9  # v_9 = 1000/512 >= 1 > v_10
    assert t.v_r[0] == pytest.approx(0.1 * 100 ** 2)
    assert np.allclose(t.v_r[1:], t.v_r[:-1] / 2)
    # h_r = 4 below the intermediate scale
    for r in range(t.r_max + 1):
        if r < t.r_prime:
            assert t.h_r[r] == 4.0
    # budget sum bounded by the reported c3 * ln n
    assert t.h_r.sum() <= t.c3 * math.log(100) + 1e-9


def test_scale_identity():
    for n in (100, 10000):
        t = sf.scale_table(n, 0.1, c1=0.1, c2=10.0)
        target = math.sqrt(0.05) * 10.0 * math.log(n)
        for r in range(t.r_max):
            if r >= t.r_prime:
                got = math.sqrt(t.v_r[r + 1]) * t.h_r[r]
                assert abs(got - target) / target < 1e-9


def test_scale_table_rejects_weak_budget():
    # (sqrt(0.1)/sqrt(1.0)) * 10 = 3.16 < 10
    with pytest.raises(ValueError):
        sf.scale_table(100, 0.1, c1=1.0, c2=10.0)
