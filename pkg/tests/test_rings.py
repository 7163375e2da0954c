import numpy as np
import pytest

from srlab.groups import AA, H, RT, GroupPoint
from srlab.modulus.rings import RingGrid, aa_window, build_ring_network, ring_modulus


@pytest.mark.parametrize("g", [H, RT, AA])
def test_inner_radius_must_be_smaller(g):
    with pytest.raises(ValueError):
        ring_modulus(g, None, 2.0, 2.0)
    with pytest.raises(ValueError):
        ring_modulus(g, None, 3.0, 2.0)


@pytest.mark.parametrize("g", [H, RT, AA])
def test_ring_network_shells(g):
    ring = build_ring_network(g, 1.0, 2.0)
    assert ring.A.size and ring.B.size
    assert np.all(ring.dist[ring.A] <= 1.0) and np.all(ring.dist[ring.B] >= 2.0)
    assert ring.dist[ring.center_index] == 0.0
    if g is AA:
        # log-spaced lam cells have chart volume ~ lam, Haar density 1 / lam^2
        lam = ring.net.coords[:, 1]
        assert np.allclose(ring.net.mu * lam, ring.net.mu[ring.center_index])


def test_aa_window_contains_ball():
    ha, ht = aa_window(2.0)
    assert ha == 2.0 and ht == pytest.approx(np.sinh(4.0))


def test_center_translates_coordinates():
    c = GroupPoint.of(H, (1.0, 2.0, 3.0))
    ring = build_ring_network(H, 1.0, 2.0, center=c)
    assert np.allclose(ring.net.coords[ring.center_index], c.coords)


def test_aa_rings_non_increasing_and_positive():
    vals = [ring_modulus(AA, None, 1.0, R).primal for R in (2, 3, 4)]
    assert all(v > 0 for v in vals)
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_h_rings_decrease():
    vals = [ring_modulus(H, None, 1.0, R).primal for R in (2, 3, 4)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


@pytest.mark.xfail(strict=True, reason="graph modulus not yet resolution-stable: "
                   "R=2 gives 17.4 at step 1 and 10.2 at step 0.5")
def test_h_ring_refinement_stable():
    coarse = ring_modulus(H, None, 1.0, 2.0, RingGrid(h=1.0)).primal
    fine = ring_modulus(H, None, 1.0, 2.0, RingGrid(h=0.5)).primal
    assert abs(fine / coarse - 1) < 0.15
