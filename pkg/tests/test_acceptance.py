"""One test per acceptance criterion, at the stated tolerance and time budget.

Each test prints a single PASS/FAIL line (also repeated in the terminal
summary) before asserting.
"""
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE
from oracles import brute_force_modulus, random_instance
from srlab import ccdist, frames, maps
from srlab.groups import AA, H, RT, GroupPoint, random_points
from srlab.measure import growth_scan
from srlab.modulus.families import (gamma0_modulus_bound, radial_test_curves,
                                    rho_N_density)
from srlab.modulus.rings import ring_modulus
from srlab.modulus.solver import solve_modulus


class Verdict:
    def __init__(self, k, capsys):
        self.k = k
        self.capsys = capsys
        self.t0 = time.perf_counter()

    def __call__(self, ok, text, budget=None):
        secs = time.perf_counter() - self.t0
        if budget is not None:
            ok = ok and secs < budget
            text += f"; runtime {secs:.1f}s < {budget:g}s"
        ACCEPTANCE.append((self.k, bool(ok), text, secs))
        with self.capsys.disabled():
            print(f"\ncriterion {self.k:2d}: {'PASS' if ok else 'FAIL'}  {text}")
        return bool(ok)


def test_criterion_01_hyperbolicity_floor_constants(capsys):
    v = Verdict(1, capsys)
    b = gamma0_modulus_bound(2)
    target = Fraction(2 ** 4, 3 ** 3)
    ok = b.integral_constant == 8 and b.majorant == 12 and b.derived == target
    assert v(ok, f"constants {b.integral_constant}, {b.majorant}; "
                 f"derived {b.derived} vs {target}", budget=1.0)


def test_criterion_02_discrete_hyperbolicity(capsys):
    v = Verdict(2, capsys)
    floor = 16 / 27 - 0.05
    vals, times = [], []
    for n in (2, 8, 32):
        t = time.perf_counter()
        vals.append(gamma0_modulus_bound(n, (32, 64, 32)).discrete.primal)
        times.append(time.perf_counter() - t)
    spread = max(vals) / min(vals) - 1.0
    ok = min(vals) >= floor and spread <= 0.15 and max(times) < 120
    vals_s = ", ".join(f"{x:.4g}" for x in vals)
    assert v(ok, f"Mod4 n=2,8,32: {vals_s}; floor {floor:.4f}; spread {spread:.1%} (<= 15%)")


def test_criterion_03_parabolicity_construction(capsys):
    v = Verdict(3, capsys)
    x0 = GroupPoint.of(H, (0.0, 0.0, 0.0))
    worst = np.inf
    for N in (6, 12, 24):
        rho = rho_N_density(x0, 1.0, N)
        vals = [rho.line_integral(c) for c in radial_test_curves(x0, 1.0, N, count=100)]
        worst = min(worst, min(vals) - (rho.admissibility_floor - 1e-3))
    ratios = [rho_N_density(x0, 1.0, N).energy_bound(1.0)
              / rho_N_density(x0, 1.0, 2 * N).energy_bound(1.0) for N in (6, 12, 24)]
    ratio_err = max(abs(r - 8.0) for r in ratios)
    ok = worst >= 0 and ratio_err <= 1e-9
    assert v(ok, f"min integral margin {worst:.3g}; energy ratio error {ratio_err:.2g}",
             budget=30)


def test_criterion_04_ring_trend(capsys):
    v = Verdict(4, capsys)
    radii = (2.0, 4.0, 8.0)
    hv = [ring_modulus(H, None, 1.0, R).primal for R in radii]
    av = [ring_modulus(AA, None, 1.0, R).primal for R in radii]
    h_ok = all(b < a for a, b in zip(hv, hv[1:])) and hv[-1] / hv[0] <= 0.5
    a_ok = min(av) >= 0.5 * hv[0]
    fmt = lambda xs: ", ".join(f"{x:.3g}" for x in xs)
    assert v(h_ok and a_ok, f"H {fmt(hv)} (last/first {hv[-1] / hv[0]:.3f}); "
                            f"AA {fmt(av)} vs floor {0.5 * hv[0]:.3g}", budget=600)


def test_criterion_05_contact_identities(capsys):
    v = Verdict(5, capsys)
    rng = np.random.default_rng(5)
    Ph = maps.sample_box(H, 10_000, rng)
    Pa = maps.sample_box(AA, 10_000, rng)
    rg, fg = maps.pullback_array(maps.MAP_G, Ph)
    rf, ff = maps.pullback_array(maps.MAP_F, Pa)
    eg = np.abs(fg - 1.0 / (4.0 * np.exp(Ph[:, 1]))).max()
    ef = np.abs(ff - 2.0 * Pa[:, 1]).max()
    worst = max(rg.max(), rf.max(), eg, ef)
    assert v(worst < 1e-9, f"max residual {worst:.2g} (< 1e-9)", budget=5)


def test_criterion_06_qr_example(capsys):
    v = Verdict(6, capsys)
    Pa = maps.sample_box(AA, 10_000, np.random.default_rng(6))
    eh = np.abs(maps.dilatation_array(maps.MAP_F, Pa) - 1.0).max()
    ed = np.abs(maps.jacobian_determinant(maps.MAP_F, Pa) - 0.5).max()
    assert v(max(eh, ed) < 1e-9, f"|H_f - 1| {eh:.2g}, |det - 1/2| {ed:.2g}", budget=5)


def test_criterion_07_frame_algebra(capsys):
    v = Verdict(7, capsys)
    rng = np.random.default_rng(7)
    P = random_points(AA, 1000, rng)
    F = frames.frame_matrix(AA, P)
    U, W = F[..., 0], F[..., 2]
    refs = {(0, 1): -2.0 * (U + W), (0, 2): 0 * U, (1, 2): 0 * U}
    eb = max(np.abs(frames.bracket_fd_array(AA, i, j, P) - r).max() for (i, j), r in refs.items())
    el = max(frames.left_invariance_residual_array(g, random_points(g, 1000, rng),
                                                   random_points(g, 1000, rng)).max()
             for g in (H, RT, AA))
    assert v(eb < 1e-6 and el < 1e-10, f"bracket FD error {eb:.2g}; left-invariance {el:.2g}",
             budget=5)


def test_criterion_08_cc_distances(capsys):
    v = Verdict(8, capsys)
    da = ccdist.cc_distance(AA, GroupPoint.of(AA, (0, 1, 0)), GroupPoint.of(AA, (0, np.e, 0)))
    dh = ccdist.cc_distance(H, GroupPoint.of(H, (0, 0, 0)), GroupPoint.of(H, (1, 0, 0)))
    ok = (abs(da.upper - 0.5) <= 0.02 * 0.5 and abs(da.lower - 0.5) <= 1e-9
          and abs(dh.upper - 1.0) <= 0.01)
    assert v(ok, f"AA upper {da.upper:.6f} lower {da.lower:.10f}; H upper {dh.upper:.6f}",
             budget=60)


def test_criterion_09_ahlfors_regularity(capsys):
    v = Verdict(9, capsys)
    aa = growth_scan(AA, [0.2, 0.3, 0.4])
    ra = (aa.regularity_ratio("lower"), aa.regularity_ratio("upper"))
    hs = growth_scan(H, [1.0, 2.0])
    rh = (hs.vol_lower[1] / hs.vol_lower[0], hs.vol_upper[1] / hs.vol_upper[0])
    ok = max(ra) <= 3 and all(abs(r / 16 - 1) <= 0.08 for r in rh)
    assert v(ok, f"AA ratios {ra[0]:.3f}, {ra[1]:.3f} (<= 3); "
                 f"H v(2r)/v(r) {rh[0]:.2f}, {rh[1]:.2f} (16 +- 8%)", budget=300)


def test_criterion_10_solver_oracle(capsys):
    v = Verdict(10, capsys)
    rng = np.random.default_rng(2024)
    worst, duality = 0.0, True
    for _ in range(20):
        net, fam = random_instance(rng, max_nodes=12, max_curves=4)
        rep = solve_modulus(net, fam, 4)
        ref, _ = brute_force_modulus(net, fam, 4)
        worst = max(worst, abs(rep.primal - ref) / ref)
        duality &= rep.dual_bound <= rep.primal + 1e-9
    assert v(worst <= 1e-4 and duality,
             f"max relative error {worst:.2g} (<= 1e-4); weak duality {duality}")
