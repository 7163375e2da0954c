"""Command-line front end.

Every command prints a JSON report (or CSV where noted) whose checks carry
a measured value, a reference value, where the reference comes from and the
tolerance used.  Exit codes: 0 all checks pass, 1 a numeric check failed,
2 bad configuration.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import ccdist, frames, maps, measure
from .curves import horizontal_lift, write_curve_csv
from .groups import AA, H, RT, GroupId, GroupPoint, identity_coords, inv, mul, random_points
from .modulus import families, rings
from .modulus.solver import solve_modulus

log = logging.getLogger("srlab")

# where a reference value comes from
CLOSED_FORM = "closed-form"   # evaluated from an explicit formula
TRIVIAL = "trivial"           # identity, symmetry or arithmetic fact
DERIVED = "derived"           # independent computation or numerical experiment


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- report

@dataclass
class Check:
    name: str
    value: Any
    reference: Any
    provenance: str
    tolerance: Any
    passed: Optional[bool] = None   # None: informational

    @property
    def status(self) -> str:
        return "info" if self.passed is None else ("pass" if self.passed else "fail")

    def to_dict(self):
        return {"name": self.name, "status": self.status, "value": self.value,
                "reference": self.reference, "provenance": self.provenance,
                "tolerance": self.tolerance}


@dataclass
class Report:
    command: str
    config: dict
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, name, value, reference, provenance, tolerance, passed=None) -> Check:
        c = Check(name, value, reference, provenance, tolerance,
                  None if passed is None else bool(passed))
        self.checks.append(c)
        return c

    @property
    def ok(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    def to_dict(self):
        return {"command": self.command, "config": self.config,
                "status": "pass" if self.ok else "fail",
                "checks": [c.to_dict() for c in self.checks], "data": self.data}


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with floats at 17 significant digits; non-finite floats become null."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format(x, ".17g") if math.isfinite(x) else "null"
    if isinstance(obj, Fraction):
        return dumps(float(obj), indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


# ---------------------------------------------------------------- config

def _floats(text, n=None, name="value") -> list:
    if isinstance(text, (list, tuple)):
        vals = [float(v) for v in text]
    else:
        try:
            vals = [float(v) for v in str(text).split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"{name}: expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise ConfigError(f"{name}: expected {n} numbers, got {len(vals)}")
    return vals


def _ints(text, n=None, name="value") -> list:
    vals = _floats(text, n, name)
    if any(v != int(v) for v in vals):
        raise ConfigError(f"{name}: expected integers")
    return [int(v) for v in vals]


def _default_seed() -> int:
    raw = os.environ.get("SRLAB_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"SRLAB_SEED must be an integer, got {raw!r}") from None


DEFAULTS = {
    "verify": {"scope": "all", "samples": 10_000, "seed": None},
    "modulus": {"family": "gamma0", "n": 2, "grid": "32,64,32", "group": "h", "R": "2,4,8",
                "R0": 1.0, "q": 4.0, "tol": 1e-6, "step": None, "floor": None},
    "ccdist": {"group": "aa", "from": None, "to": None, "K": 16, "max_evals": 2000,
               "tol": 1e-6, "curve_out": None},
    "volume": {"group": "h", "radii": "1,2", "samples": 100_000, "seed": None,
               "format": "json"},
    "lift": {"base": None, "base_csv": None, "a0": 0.0},
    "report": {"samples": 2000, "seed": None},
}
COMMON = ("out", "deterministic", "config", "verbose")


def resolve_config(command: str, ns: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags; unknown file keys are rejected."""
    cfg = dict(DEFAULTS[command])
    path = getattr(ns, "config", None)
    if path:
        try:
            loaded = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = sorted(set(loaded) - set(cfg) - {"deterministic"})
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {', '.join(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS[command]:
        val = getattr(ns, key, None)
        if val is not None:
            cfg[key] = val
    if "seed" in cfg and cfg["seed"] is None:
        cfg["seed"] = _default_seed()
    cfg["deterministic"] = bool(getattr(ns, "deterministic", False) or cfg.get("deterministic"))
    return cfg


def _check_q(q) -> float:
    q = float(q)
    if not (math.isfinite(q) and q > 1.0):
        raise ConfigError(f"q must be > 1, got {q}")
    return q


def _point(g, text, name) -> GroupPoint:
    if text is None:
        raise ConfigError(f"--{name} is required")
    try:
        return GroupPoint.of(g, _floats(text, 3, name))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _group(text) -> GroupId:
    try:
        return GroupId.parse(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------- verify

def _verify_groups(rep: Report, n: int, rng):
    for g in (H, RT, AA):
        P = random_points(g, n, rng)
        Q = random_points(g, n, rng)
        S = random_points(g, n, rng)
        e = identity_coords(g)
        scale = 1.0 + np.abs(P).max()
        r_id = max(np.abs(mul(g, e, P) - P).max(), np.abs(mul(g, P, e) - P).max())
        r_inv = np.abs(mul(g, P, inv(g, P)) - e).max()
        r_assoc = np.abs(mul(g, mul(g, P, Q), S) - mul(g, P, mul(g, Q, S))).max() / scale
        for name, v in (("identity", r_id), ("inverse", r_inv), ("associativity", r_assoc)):
            rep.add(f"{g.value}: {name} residual", float(v), 0.0, TRIVIAL, 1e-9, v < 1e-9)


def _verify_frames(rep: Report, n: int, rng):
    P = random_points(AA, n, rng)
    F = frames.frame_matrix(AA, P)
    U, W = F[..., 0], F[..., 2]
    checks = [("[U,V] = -2(U+W)", 0, 1, -2.0 * (U + W)), ("[U,W] = 0", 0, 2, 0 * U),
              ("[V,W] = 0", 1, 2, 0 * U)]
    for name, i, j, ref in checks:
        r = float(np.abs(frames.bracket_fd_array(AA, i, j, P) - ref).max())
        rep.add(f"aa: {name} (finite differences)", r, 0.0, CLOSED_FORM, 1e-6, r < 1e-6)
    for g in (H, RT, AA):
        P0 = random_points(g, n, rng)
        P1 = random_points(g, n, rng)
        r = float(frames.left_invariance_residual_array(g, P0, P1).max())
        rep.add(f"{g.value}: frame left-invariance residual", r, 0.0, TRIVIAL, 1e-10, r < 1e-10)


def _verify_maps(rep: Report, n: int, rng):
    Ph = maps.sample_box(H, n, rng)
    Pa = maps.sample_box(AA, n, rng)
    res, fac = maps.pullback_array(maps.MAP_G, Ph)
    err = np.abs(fac - 1.0 / (4.0 * np.exp(Ph[:, 1]))).max()
    rep.add("g: pullback residual", float(res.max()), 0.0, CLOSED_FORM, 1e-9, res.max() < 1e-9)
    rep.add("g: factor vs 1/(4 e^y)", float(err), 0.0, CLOSED_FORM, 1e-9, err < 1e-9)
    res, fac = maps.pullback_array(maps.MAP_F, Pa)
    err = np.abs(fac - 2.0 * Pa[:, 1]).max()
    rep.add("f: pullback residual", float(res.max()), 0.0, CLOSED_FORM, 1e-9, res.max() < 1e-9)
    rep.add("f: factor vs 2 lam", float(err), 0.0, CLOSED_FORM, 1e-9, err < 1e-9)
    Hf = np.abs(maps.dilatation_array(maps.MAP_F, Pa) - 1.0).max()
    rep.add("H_f = 1", float(Hf), 0.0, CLOSED_FORM, 1e-9, Hf < 1e-9)
    det = np.abs(maps.jacobian_determinant(maps.MAP_F, Pa) - 0.5).max()
    rep.add("det f_* = 1/2", float(det), 0.0, CLOSED_FORM, 1e-9, det < 1e-9)
    rt = np.abs(maps.g_inverse(maps.g_forward(Ph)) - Ph).max()
    rep.add("g^-1 o g = id", float(rt), 0.0, TRIVIAL, 1e-10, rt < 1e-10)
    Hg = maps.dilatation_array(maps.MAP_G, Ph)
    rep.add("H_g finite on sample box (max)", float(Hg.max()), None, DERIVED, None,
            bool(np.all(np.isfinite(Hg))))


def cmd_verify(cfg: dict) -> Report:
    scope = cfg["scope"]
    if scope not in ("groups", "frames", "maps", "all"):
        raise ConfigError(f"unknown scope {scope!r}")
    n = int(cfg["samples"])
    if n < 1:
        raise ConfigError("samples must be positive")
    rng = np.random.default_rng(int(cfg["seed"]))
    rep = Report("verify", cfg)
    for name, fn in (("groups", _verify_groups), ("frames", _verify_frames),
                     ("maps", _verify_maps)):
        if scope in (name, "all"):
            fn(rep, n, rng)
    return rep


# ---------------------------------------------------------------- modulus

def cmd_modulus(cfg: dict) -> Report:
    q = _check_q(cfg["q"])
    tol = float(cfg["tol"])
    rep = Report("modulus", cfg)
    if cfg["family"] == "gamma0":
        n = int(cfg["n"])
        if n < 2:
            raise ConfigError("n must be >= 2")
        grid = tuple(_ints(cfg["grid"], 3, "grid"))
        if min(grid) < 2:
            raise ConfigError("grid needs at least 2 nodes per axis")
        c8, c12, derived = families.gamma0_constants()
        rep.add("integrated curve bound", c8, 8, CLOSED_FORM, 0, c8 == 8)
        rep.add("Hoelder majorant", c12, 12, CLOSED_FORM, 0, c12 == 12)
        rep.add("derived floor c^4 / M^3", derived, None, DERIVED, 0)
        net, family = families.gamma0_network(n, grid)
        r = solve_modulus(net, family, q, tol)
        floor = float(cfg["floor"]) if cfg["floor"] is not None else float(Fraction(16, 27)) - 0.05
        rep.add("discrete modulus >= floor", r.primal, floor, CLOSED_FORM, 0.05,
                r.primal >= floor)
        if q == 4.0:
            rep.add("continuum modulus of the sampled family", families.gamma0_continuum_modulus(n),
                    None, DERIVED, None)
        rep.data["report"] = r.to_dict()
        rep.data["status"] = r.status
        return rep
    if cfg["family"] != "ring":
        raise ConfigError(f"unknown family {cfg['family']!r}")
    g = _group(cfg["group"])
    radii = _floats(cfg["R"], name="R")
    R0 = float(cfg["R0"])
    if not radii or any(R <= R0 for R in radii) or R0 <= 0:
        raise ConfigError("need 0 < R0 < every R")
    grid = rings.RingGrid(q=q)
    if cfg["step"] is not None:
        s = float(cfg["step"])
        grid = rings.RingGrid(h=s, h_a=s, h_u=s, h_t=s, q=q)
    center = GroupPoint.of(g, identity_coords(g))
    values = []
    for R in radii:
        try:
            r = rings.ring_modulus(g, center, R0, R, grid)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        values.append(r.primal)
        rep.data.setdefault("reports", []).append({"R": R, **r.to_dict(), "status": r.status})
    dec = all(b < a for a, b in zip(values, values[1:]))
    rep.add("ring moduli strictly decreasing in R", values, None, DERIVED, 0, dec)
    if cfg["floor"] is not None:
        fl = float(cfg["floor"])
        rep.add("ring moduli >= floor", min(values), fl, DERIVED, 0, min(values) >= fl)
    return rep


# ---------------------------------------------------------------- ccdist

def cmd_ccdist(cfg: dict) -> Report:
    g = _group(cfg["group"])
    p = _point(g, cfg["from"], "from")
    q = _point(g, cfg["to"], "to")
    cc = ccdist.CCConfig(K=int(cfg["K"]), max_evals=int(cfg["max_evals"]), tol=float(cfg["tol"]))
    est = ccdist.cc_distance(g, p, q, cc)
    rep = Report("ccdist", cfg)
    # endpoint gaps below the snap threshold are accepted without a connector
    slack = 10 * ccdist.SNAP
    ok = est.lower <= est.upper * (1 + slack) + slack
    rep.add("lower <= upper", [est.lower, est.upper], None, TRIVIAL, slack, ok)
    if p == q:
        rep.add("identical endpoints give 0", est.upper, 0.0, TRIVIAL, 0.0, est.upper == 0.0)
    rep.data.update({"upper": est.upper, "lower": est.lower, "gap": est.gap,
                     "iterations": est.iterations, "status": est.status})
    if cfg["curve_out"]:
        write_curve_csv(est.curve, cfg["curve_out"])
    return rep


# ---------------------------------------------------------------- volume

def cmd_volume(cfg: dict) -> Report | str:
    g = _group(cfg["group"])
    radii = _floats(cfg["radii"], name="radii")
    if any(r <= 0 for r in radii):
        raise ConfigError("radii must be positive")
    mc = measure.MCConfig(samples=int(cfg["samples"]), seed=int(cfg["seed"]))
    try:
        scan = measure.growth_scan(g, radii, mc)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if cfg["format"] == "csv":
        return scan.to_csv()
    if cfg["format"] != "json":
        raise ConfigError("format must be json or csv")
    rep = Report("volume", cfg)
    rep.data.update({"radii": scan.radii, "vol_lower": scan.vol_lower,
                     "vol_upper": scan.vol_upper, "stderr": scan.stderr,
                     "exponent": scan.exponent, "regularity_ratio": scan.regularity_ratio()})
    for a, b, va, vb in zip(radii, radii[1:], scan.volumes, scan.volumes[1:]):
        ratio = vb / va if va > 0 else float("inf")
        ref = (b / a) ** 4
        passed = abs(ratio / ref - 1.0) <= 0.08 if g is H else None
        rep.add(f"v({b:g}) / v({a:g})", ratio, ref, DERIVED, 0.08 if g is H else None, passed)
    return rep


# ---------------------------------------------------------------- lift

def cmd_lift(cfg: dict) -> str:
    if cfg["base_csv"]:
        arr = np.loadtxt(cfg["base_csv"], delimiter=",", skiprows=1, ndmin=2)
    elif cfg["base"]:
        try:
            arr = np.array([_floats(pt, 2, "base") for pt in str(cfg["base"]).split(";")])
        except ConfigError:
            raise
    else:
        raise ConfigError("lift needs --base or --base-csv")
    if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) < 2:
        raise ConfigError("base needs at least two (xi, eta) points")
    try:
        c = horizontal_lift(arr, float(cfg["a0"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return write_curve_csv(c)


# ---------------------------------------------------------------- report

def cmd_report(cfg: dict) -> Report:
    """The fast checks of every module in one report."""
    rep = Report("report", cfg)
    v = cmd_verify({"scope": "all", "samples": int(cfg["samples"]), "seed": int(cfg["seed"])})
    rep.checks.extend(v.checks)
    c8, c12, derived = families.gamma0_constants()
    rep.add("integrated curve bound", c8, 8, CLOSED_FORM, 0, c8 == 8)
    rep.add("Hoelder majorant", c12, 12, CLOSED_FORM, 0, c12 == 12)
    rep.add("derived floor c^4 / M^3", derived, None, DERIVED, 0)
    for N in (6, 12):
        rho = families.rho_N_density(GroupPoint.of(H, [0, 0, 0]), 1.0, N)
        curves = families.radial_test_curves(rho.x0, 1.0, N, count=10,
                                             rng=np.random.default_rng(int(cfg["seed"])))
        m = min(rho.line_integral(c) for c in curves)
        rep.add(f"rho_N radial integrals, N={N}", m, rho.admissibility_floor, CLOSED_FORM, 1e-3,
                m >= rho.admissibility_floor - 1e-3)
    e = np.exp(1.0)
    est = ccdist.cc_distance(AA, GroupPoint.of(AA, [0, 1, 0]), GroupPoint.of(AA, [0, e, 0]))
    rep.add("aa distance (0,1,0)-(0,e,0)", est.upper, 0.5, DERIVED, 0.02,
            abs(est.upper - 0.5) <= 0.01)
    est = ccdist.cc_distance(H, GroupPoint.of(H, [0, 0, 0]), GroupPoint.of(H, [1, 0, 0]))
    rep.add("h distance 0-(1,0,0)", est.upper, 1.0, TRIVIAL, 0.01, abs(est.upper - 1.0) <= 0.01)
    return rep


# ---------------------------------------------------------------- entry point

COMMANDS = {"verify": cmd_verify, "modulus": cmd_modulus, "ccdist": cmd_ccdist,
            "volume": cmd_volume, "lift": cmd_lift, "report": cmd_report}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="srlab", description="Sub-Riemannian geometry checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with option values")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--deterministic", action="store_true", default=None,
                       help="omit timings so identical runs give identical bytes")
        p.add_argument("-v", "--verbose", action="store_true")
        return p

    p = common(sub.add_parser("verify", help="group, frame and map identities"))
    p.add_argument("--scope", choices=["groups", "frames", "maps", "all"])
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)

    p = common(sub.add_parser("modulus", help="discrete modulus of a curve family"))
    p.add_argument("--family", choices=["gamma0", "ring"])
    p.add_argument("--n", type=int)
    p.add_argument("--grid", help="a,lam,t node counts, e.g. 32,64,32")
    p.add_argument("--group")
    p.add_argument("--R", help="outer radii, e.g. 2,4,8")
    p.add_argument("--R0", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--step", type=float, help="ring lattice step")
    p.add_argument("--floor", type=float)

    p = common(sub.add_parser("ccdist", help="CC distance bracket between two points"))
    p.add_argument("--group")
    p.add_argument("--from", dest="from")
    p.add_argument("--to")
    p.add_argument("--K", type=int)
    p.add_argument("--max-evals", dest="max_evals", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--curve-out", dest="curve_out")

    p = common(sub.add_parser("volume", help="Monte-Carlo ball volumes"))
    p.add_argument("--group")
    p.add_argument("--radii")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=["json", "csv"])

    p = common(sub.add_parser("lift", help="horizontal lift of a hyperbolic polyline (CSV)"))
    p.add_argument("--base", help="xi,eta;xi,eta;...")
    p.add_argument("--base-csv", dest="base_csv")
    p.add_argument("--a0", type=float)

    p = common(sub.add_parser("report", help="fast checks of every module"))
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    return ap


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)   # argparse exits with 2 on bad flags
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(ns.command, ns)
        t0 = time.perf_counter()
        result = COMMANDS[ns.command](cfg)
    except ConfigError as exc:
        print(f"srlab: config error: {exc}", file=sys.stderr)
        return 2
    if isinstance(result, str):
        _emit(result, ns.out)
        return 0
    doc = result.to_dict()
    if not cfg["deterministic"]:
        doc["elapsed_s"] = time.perf_counter() - t0
    _emit(dumps(doc) + "\n", ns.out)
    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())
