import numpy as np
import pytest
from scipy import integrate
from hypothesis import given, settings
from hypothesis import strategies as st

from srlab.curves import (HorizontalityError, HyperbolicPoint, SampledCurve, horizontal_length,
                          horizontal_lift, horizontality_defect, hyperbolic_distance,
                          hyperbolic_length, project, read_curve_csv, write_curve_csv)
from srlab.groups import AA, H, RT, GroupMismatch, GroupPoint, random_points


def fn_curve(g, f, K=64):
    return SampledCurve.from_function(g, f, K)


def random_horizontal_aa(rng, K=1000):
    """Lift of a smooth random base curve."""
    s = np.linspace(0, 1, K + 1)
    c = rng.normal(size=4)
    xi = np.exp(0.5 * c[0] * s + 0.3 * np.sin(3 * c[1] * s))
    eta = c[2] * s + 0.4 * np.sin(2 * c[3] * s)
    return horizontal_lift(np.column_stack([xi, eta]), a0=rng.normal())


def random_horizontal_h(rng, K=400):
    s = np.linspace(0, 1, K + 1)
    x = np.cumsum(np.r_[0, rng.normal(size=K)]) / K
    y = np.cumsum(np.r_[0, rng.normal(size=K)]) / K
    # exact lift of straight chords: dt = -2(x dy - y dx)
    dt = -2 * (x[:-1] * np.diff(y) - y[:-1] * np.diff(x))
    return SampledCurve(H, s, np.column_stack([x, y, np.r_[0, np.cumsum(dt)]]))


def test_defect_examples():
    assert horizontality_defect(fn_curve(AA, lambda s: (0, 1 + s, 0))) == 0
    assert horizontality_defect(fn_curve(AA, lambda s: (0, 1, s))) == pytest.approx(0.5)
    assert horizontality_defect(fn_curve(H, lambda s: (s, 0, 0))) == 0


def test_length_examples():
    c = fn_curve(AA, lambda s: (0, 1 - 0.5 * s, 0), K=4096)
    assert horizontal_length(c) == pytest.approx(0.5 * np.log(2), abs=1e-4)
    assert horizontal_length(fn_curve(H, lambda s: (s, 0, 0))) == pytest.approx(1.0)
    assert horizontal_length(fn_curve(AA, lambda s: (1, 2, 3))) == 0.0
    assert horizontal_length(fn_curve(RT, lambda s: (0, 0, s))) == pytest.approx(1.0)


def test_length_rejects_vertical_curves():
    with pytest.raises(HorizontalityError):
        horizontal_length(fn_curve(AA, lambda s: (0, 1, s)))
    c = fn_curve(AA, lambda s: (0, 1, 1e-4 * s))
    with pytest.warns(UserWarning):
        horizontal_length(c)


def test_curve_validation():
    with pytest.raises(ValueError):
        SampledCurve(AA, [0, 1], [[0, 1, 0], [0, -1, 0]])
    with pytest.raises(ValueError):
        SampledCurve(H, [0, 0], [[0, 0, 0], [1, 0, 0]])
    with pytest.raises(ValueError):
        SampledCurve(H, [0], [[0, 0, 0]])


def test_projection():
    c = SampledCurve.uniform(AA, [[5, 2, 3], [5, 2, 3]])
    assert project(c)[0] == HyperbolicPoint(2, 3)
    assert hyperbolic_length(project(c)) == 0
    with pytest.raises(GroupMismatch):
        project(fn_curve(H, lambda s: (s, 0, 0)))


def test_projection_preserves_length(rng):
    for _ in range(100):
        c = random_horizontal_aa(rng, K=64)
        ell = horizontal_length(c, check=False)
        assert abs(ell - hyperbolic_length(project(c))) < 1e-8


def test_lift_examples():
    base = [HyperbolicPoint(1 + s, 0) for s in np.linspace(0, 1, 20)]
    assert np.all(horizontal_lift(base, a0=0.7).points[:, 0] == 0.7)
    s = np.linspace(0, 1, 4097)
    c = horizontal_lift(np.column_stack([np.ones_like(s), s]), 0.0)
    assert c.points[-1, 0] == pytest.approx(0.5, abs=1e-6)
    with pytest.raises(ValueError):
        horizontal_lift(np.array([[0.0, 1.0], [1.0, 1.0]]))


def test_lift_round_trip(rng):
    c = random_horizontal_aa(rng)
    base = project(c)
    again = horizontal_lift(base, c.points[0, 0])
    assert [(p.xi, p.eta) for p in project(again)] == [(p.xi, p.eta) for p in base]
    assert np.abs(again.points[:, 0] - c.points[:, 0]).max() < 1e-12
    assert horizontality_defect(c) < 1e-3


def test_hyperbolic_distance():
    assert hyperbolic_distance(HyperbolicPoint(1, 0), HyperbolicPoint(np.e, 0)) == pytest.approx(0.5)
    p = HyperbolicPoint(2, 1)
    assert hyperbolic_distance(p, p) == 0
    # oracle: length of the axis segment by quadrature
    quad = integrate.quad(lambda x: 1 / (2 * x), 1, 5, epsabs=1e-13)[0]
    assert hyperbolic_distance(HyperbolicPoint(1, 0), HyperbolicPoint(5, 0)) == pytest.approx(quad, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 5), st.floats(-3, 3), st.floats(0.1, 5), st.floats(-3, 3))
def test_hyperbolic_distance_symmetric(a, b, c, d):
    p, q = HyperbolicPoint(a, b), HyperbolicPoint(c, d)
    assert hyperbolic_distance(p, q) == hyperbolic_distance(q, p)


@pytest.mark.filterwarnings("ignore:horizontality defect")
@pytest.mark.parametrize("g", [H, AA])
def test_length_left_invariant(g, rng):
    for _ in range(10):
        c = random_horizontal_aa(rng) if g is AA else random_horizontal_h(rng)
        p0 = GroupPoint.of(g, random_points(g, 1, rng)[0])
        assert abs(horizontal_length(c.translated(p0)) - horizontal_length(c)) < 1e-8


def test_rt_length_left_invariant(rng):
    # straight drive along the heading plus a turn, exactly horizontal
    s = np.linspace(0, 1, 201)
    c = SampledCurve(RT, s, np.column_stack([s, 0 * s, 0 * s]))
    p0 = GroupPoint.of(RT, [1.0, -2.0, 0.8])
    assert abs(horizontal_length(c.translated(p0)) - horizontal_length(c)) < 1e-8


def test_reparameterization(rng):
    c = random_horizontal_h(rng, K=2000)
    u = np.sort(np.r_[0, rng.random(3000), 1])
    u = np.unique(u)
    fine = c.reparameterized(np.linspace(0, 1, 2001))
    assert abs(horizontal_length(fine, check=False) - horizontal_length(c)) < 1e-6
    assert len(c.reparameterized(u).params) == len(u)


def test_csv_round_trip(tmp_path, rng):
    c = random_horizontal_aa(rng, K=10)
    path = tmp_path / "c.csv"
    text = write_curve_csv(c, path)
    assert text.splitlines()[0] == "s,c1,c2,c3"
    back = read_curve_csv(path, AA)
    assert np.array_equal(back.points, c.points) and np.array_equal(back.params, c.params)
    with pytest.raises(ValueError):
        read_curve_csv("x,y\n1,2\n", AA)
