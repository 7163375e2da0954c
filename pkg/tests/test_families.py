from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from srlab.curves import horizontal_length, horizontality_defect
from srlab.groups import AA, H, GroupPoint
from srlab.modulus.families import (column_modulus, gamma0_constants, gamma0_continuum_modulus,
                                    gamma0_family, gamma0_modulus_bound, gamma0_network,
                                    radial_test_curves, rho_N_density, vertical_speed)
from srlab.modulus.network import Density
from srlab.modulus.solver import curve_integrals, is_admissible


@pytest.mark.parametrize("n", [2, 8, 32])
def test_gamma0_curves(n):
    fam = gamma0_family(n, grid=(5, 4), K=400)
    assert len(fam) == 20
    for c in fam[:6]:
        a, t = c.points[0, 0], c.points[0, 2]
        assert np.allclose(c.points[0], [a, 1.0, t])
        assert np.allclose(c.points[-1], [a, 1.0 / n, t])
        assert horizontality_defect(c) < 1e-10
        assert horizontal_length(c) == pytest.approx(0.5 * np.log(n), rel=1e-12)


def test_vertical_speed_integrates_to_length():
    for n in (2, 8, 32):
        val, _ = integrate.quad(lambda s: vertical_speed(n, s), 0, 1)
        assert val == pytest.approx(0.5 * np.log(n), rel=1e-10)


def test_gamma0_needs_n_two():
    with pytest.raises(ValueError):
        gamma0_family(1)
    with pytest.raises(ValueError):
        gamma0_network(1)


def test_constant_chain_is_exact():
    c8, c12, derived = gamma0_constants()
    assert c8 == 8 and c12 == 12
    assert isinstance(derived, Fraction) and derived == Fraction(64, 27)
    # the majorant integral int_0^1 lam^(-2/3) = 3, times area 4
    val, _ = integrate.quad(lambda x: x ** (-2 / 3), 0, 1)
    assert 4 * val == pytest.approx(12, rel=1e-8)
    b = gamma0_modulus_bound(2)
    assert b.reference == Fraction(16, 27) and b.consistent


@pytest.mark.parametrize("n", [2, 8, 32])
def test_continuum_modulus_matches_column_quadrature(n):
    # each column is independent: Mod = area * (int w^(4/3) mu^(-1/3))^(-3) per unit column
    f = lambda lam: (1 / (2 * lam)) ** (4 / 3) * (1 / lam ** 2) ** (-1 / 3)
    val, _ = integrate.quad(f, 1 / n, 1)
    assert gamma0_continuum_modulus(n) == pytest.approx(4 * val ** -3, rel=1e-9)


def test_column_modulus_single_edge():
    assert column_modulus([0.5, 0.5], [0.5, 0.5]) == pytest.approx(1.0)


def test_admissibility_quadrature_example():
    n = 2
    net, fam = gamma0_network(n)
    lam = net.coords[:, 1]
    rho = 1.0 / (np.log(n) * lam)
    ok, m = is_admissible(Density(rho), fam, net)
    # exact integral of rho / (2 lam) over [1/n, 1]
    exact = (n - 1) / (2 * np.log(n))
    assert m == pytest.approx(exact, abs=1e-3)
    assert ok == (exact >= 1)
    # the constant 2 / ln n is the equality density along every column
    vals = curve_integrals(net, fam, np.full(net.n_nodes, 2 / np.log(n)))
    assert np.allclose(vals, 1.0, atol=1e-12)


def test_discrete_floor_and_refinement():
    coarse = gamma0_modulus_bound(2, (32, 64, 32))
    fine = gamma0_modulus_bound(2, (64, 128, 64))
    floor = 16 / 27 - 0.05
    assert coarse.discrete.primal >= floor and fine.discrete.primal >= floor
    assert abs(fine.discrete.primal / coarse.discrete.primal - 1) < 0.10
    assert coarse.discrete.primal == pytest.approx(coarse.continuum, rel=1e-3)


# ---------------------------------------------------------------- rho_N

@pytest.mark.parametrize("N", [6, 12, 24])
def test_rho_N_radial_admissibility(N):
    x0 = GroupPoint.of(H, (0.3, -0.2, 0.5))
    rho = rho_N_density(x0, 1.0, N)
    vals = [rho.line_integral(c) for c in radial_test_curves(x0, 1.0, N, count=20)]
    assert min(vals) >= rho.admissibility_floor - 1e-3
    assert rho.admissibility_floor >= 1.0 - 1e-12 or N < 6


def test_rho_N_outside_ring_is_zero():
    rho = rho_N_density(GroupPoint.of(H, (0, 0, 0)), 1.0, 6)
    assert rho(GroupPoint.of(H, (0.5, 0, 0))) == 0.0
    assert rho(GroupPoint.of(H, (100.0, 0, 0))) == 0.0
    assert rho(GroupPoint.of(H, (2.0, 0, 0))) == pytest.approx(3 / (6 * 2.0))


def test_rho_N_energy_law():
    rho = rho_N_density(GroupPoint.of(H, (0, 0, 0)), 1.0, 6)
    assert rho.energy_bound(1.0) == pytest.approx(1296 / 6 ** 3, rel=1e-12)
    for N in (6, 12, 24):
        b1 = rho_N_density(GroupPoint.of(H, (0, 0, 0)), 1.0, N).energy_bound(2.5)
        b2 = rho_N_density(GroupPoint.of(H, (0, 0, 0)), 1.0, 2 * N).energy_bound(2.5)
        assert abs(b1 / b2 - 8) <= 1e-9


def test_rho_N_input_checks():
    with pytest.raises(ValueError):
        rho_N_density(GroupPoint.of(H, (0, 0, 0)), 1.0, 5)
    with pytest.raises(ValueError):
        radial_test_curves(GroupPoint.of(AA, (0, 1, 0)), 1.0, 6)
