import numpy as np
import pytest

from srlab.groups import AA, H, RT, GroupPoint
from srlab.measure import (BudgetExhausted, MCConfig, VolumeScan, ball_volume, fit_exponent,
                           growth_scan, haar_box_integral, haar_density, translation_jacobian)


def test_haar_density_examples():
    assert haar_density(AA, GroupPoint.of(AA, (0.3, 2.0, -1.0))) == 0.25
    assert haar_density(H, GroupPoint.of(H, (5.0, -2.0, 7.0))) == 1.0
    assert haar_density(RT, GroupPoint.of(RT, (5.0, -2.0, 7.0))) == 1.0
    assert haar_box_integral(AA, (0, 1, 0), (1, 2, 1)) == pytest.approx(0.5, rel=1e-12)
    assert haar_box_integral(H, (0, 0, 0), (1, 2, 3)) == pytest.approx(6.0, rel=1e-12)


def test_haar_measure_is_left_invariant(rng):
    # Haar density times the Jacobian of left translation is the density at the origin point
    for _ in range(20):
        p = np.array([rng.normal(), np.exp(rng.normal()), rng.normal()])
        x = np.array([rng.normal(), np.exp(rng.normal()), rng.normal()])
        from srlab.groups import mul
        px = mul(AA, p, x)
        assert haar_density(AA, px) * translation_jacobian(AA, p) == pytest.approx(
            haar_density(AA, x), rel=1e-12)


def test_h_homogeneity_ratio():
    s = growth_scan(H, [1.0, 2.0])
    for v in (s.vol_lower, s.vol_upper):
        assert v[1] / v[0] == pytest.approx(16.0, rel=0.08)


def test_h_exponent():
    s = growth_scan(H, [1, 2, 4, 8], MCConfig(samples=40_000))
    assert abs(s.exponent - 4.0) <= 0.3


def test_rt_large_scale_exponent():
    s = growth_scan(RT, [8, 16, 32], MCConfig(samples=40_000))
    assert s.exponent <= 3.5


def test_aa_local_regularity():
    s = growth_scan(AA, [0.2, 0.3, 0.4])
    assert s.regularity_ratio("lower") <= 3 and s.regularity_ratio("upper") <= 3


def test_tiny_radius_volume_vanishes():
    v = ball_volume(H, None, 1e-6, MCConfig(samples=2000))
    assert v.upper < 1e-20 and v.lower < 1e-20


def test_bracket_consistency_and_monotonicity():
    for g, radii in ((H, [0.5, 1.0, 1.5]), (AA, [0.2, 0.4, 0.6]), (RT, [0.5, 1.0, 2.0])):
        s = growth_scan(g, radii, MCConfig(samples=20_000))
        assert all(lo <= up for lo, up in zip(s.vol_lower, s.vol_upper))
        assert all(b >= a for a, b in zip(s.volumes, s.volumes[1:]))


@pytest.mark.parametrize("g,c,r", [(H, (1.0, -2.0, 3.0), 1.0), (AA, (0.5, 3.0, -1.0), 0.4),
                                   (RT, (1.0, 2.0, 0.7), 1.0)])
def test_left_invariance(g, c, r):
    cfg = MCConfig(samples=40_000)
    v0 = ball_volume(g, None, r, cfg, rng=np.random.default_rng(1))
    v1 = ball_volume(g, GroupPoint.of(g, c), r, cfg, rng=np.random.default_rng(2))
    tol = 3 * np.hypot(v0.stderr, v1.stderr)
    assert abs(v0.lower - v1.lower) <= tol and abs(v0.upper - v1.upper) <= tol


def test_seed_reproducible():
    a = ball_volume(H, None, 1.0, MCConfig(samples=5000, seed=7))
    b = ball_volume(H, None, 1.0, MCConfig(samples=5000, seed=7))
    assert a == b


def test_budget_exhausted():
    cfg = MCConfig(samples=1000, batch=1000, target_rel_stderr=1e-6, max_samples=4000)
    with pytest.raises(BudgetExhausted):
        ball_volume(H, None, 1.0, cfg)


def test_target_stderr_reached():
    cfg = MCConfig(samples=1000, batch=1000, target_rel_stderr=0.05, max_samples=200_000)
    v = ball_volume(H, None, 1.0, cfg)
    assert v.stderr <= 0.05 * v.lower


def test_input_checks():
    with pytest.raises(ValueError):
        ball_volume(H, None, 0.0)
    with pytest.raises(ValueError):
        growth_scan(H, [2.0, 1.0])


def test_empty_scan():
    s = growth_scan(H, [])
    assert s.radii == [] and s.volumes == []
    assert np.isnan(s.exponent) and np.isnan(s.growth_constant())
    assert s.to_csv() == "r,vol_lower,vol_upper,stderr,exponent_running\n"


def test_scan_csv_and_constants():
    s = VolumeScan([1.0, 2.0], [1.0, 16.0], [2.0, 32.0], [0.1, 0.2])
    assert s.exponent == pytest.approx(4.0)
    assert s.growth_constant() == 2.0
    assert s.regularity_ratio("upper") == pytest.approx(1.0)
    lines = s.to_csv().splitlines()
    assert lines[0] == "r,vol_lower,vol_upper,stderr,exponent_running"
    assert lines[2].split(",")[:3] == ["2.0", "16.0", "32.0"]
    with pytest.raises(ValueError):
        VolumeScan([1.0], [], [], [])


def test_fit_exponent_exact():
    r = np.array([1.0, 2.0, 5.0])
    assert fit_exponent(r, 3 * r ** 2.5) == pytest.approx(2.5)
    assert np.isnan(fit_exponent([1.0], [1.0]))
