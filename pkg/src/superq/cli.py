"""Batch command-line harness: verification suites, spectra, the t-J demo and operator export."""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bethe import PoleError, DegeneracyError, cross_check_spectrum, tj_demo, zero_twist_energies
from .graded import GradingSignature, QuantumSpace, SingularTwistError, TwistConfig, build_hamiltonian
from .hasse import (HasseDiagram, enumerate_paths, plaquette_relations, verify_qq, verify_split_gl11,
                    verify_tqq_gl11, verify_xqqq)
from .lax import check_ybe, verify_factorization, verify_gl11_fusion
from .oscillators import abel_oracle, family_trace, random_trace_corpus
from .transfer import _family, interpolate_polynomial, prefactor, q_operator, sample_nodes

DEFAULT_TOLERANCES = {
    "ybe": 1e-11,
    "commute": 1e-10,
    "qq": 1e-9,
    "gl11": 1e-10,
    "boundary": 1e-12,
    "vacuum": 1e-12,
    "fusion": 1e-10,
    "fusion_exact": 1e-12,
    "xplus": 1e-8,
    "trace": 1e-6,
    "energy": 1e-7,
    "path_spread": 1e-7,
    "bethe": 1e-7,
}

SUITES = ("ybe", "commute", "qq", "gl11", "boundary", "vacuum", "fusion", "xplus", "trace")

EXIT_FAIL = 1
EXIT_CONFIG = 2


class ConfigError(ValueError):
    def __init__(self, field_name: str, msg: str):
        super().__init__(f"field '{field_name}': {msg}")
        self.field = field_name


# ---------------------------------------------------------------------------
# deterministic JSON

def _fmt(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dumps(obj, indent: int = 0, step: int = 2) -> str:
    """JSON text with floats at 17 significant digits and complex numbers as [re, im]."""
    pad, inner = " " * indent, " " * (indent + step)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{_fmt(obj.real)}, {_fmt(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent + step, step)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + step, step) for v in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# configuration

def _parse_complex(s) -> complex:
    if isinstance(s, (list, tuple)) and len(s) == 2:
        return complex(float(s[0]), float(s[1]))
    if isinstance(s, (int, float, complex)):
        return complex(s)
    return complex(str(s).strip().replace(" ", "").replace("i", "j"))


def _parse_list(v, conv):
    if isinstance(v, str):
        v = [x for x in v.split(",") if x.strip()]
    return [conv(x) for x in v]


@dataclass
class ExperimentConfig:
    n: int = 1
    m: int = 1
    L: int = 3
    twists: object = "default"              # mode name or list of angles
    subset: tuple = ()
    z: list = field(default_factory=list)
    suite: tuple = ("all",)
    seed: int = 42
    tol: dict = field(default_factory=dict)
    out: str = "."
    trace_corpus: int = 100

    @classmethod
    def from_sources(cls, file_values: dict | None, cli_values: dict) -> "ExperimentConfig":
        """Flat JSON keys first, then every CLI flag that was given."""
        raw = dict(file_values or {})
        raw.update({k: v for k, v in cli_values.items() if v is not None})
        known = set(cls.__dataclass_fields__)
        for k in raw:
            if k not in known:
                raise ConfigError(k, "unknown key")
        cfg = cls()
        try:
            for k in ("n", "m", "L", "seed", "trace_corpus"):
                if k in raw:
                    setattr(cfg, k, int(raw[k]))
        except (TypeError, ValueError) as exc:
            raise ConfigError(k, f"expected an integer ({exc})") from None
        if "twists" in raw:
            t = raw["twists"]
            if isinstance(t, str) and t in ("default", "generic", "nonresonant"):
                cfg.twists = t
            else:
                try:
                    cfg.twists = _parse_list(t, float)
                except (TypeError, ValueError):
                    raise ConfigError("twists", "expected default|generic|nonresonant or a list of angles") from None
        if "subset" in raw:
            try:
                cfg.subset = tuple(sorted(_parse_list(raw["subset"], int)))
            except (TypeError, ValueError):
                raise ConfigError("subset", "expected comma-separated labels") from None
        if "z" in raw:
            try:
                cfg.z = _parse_list(raw["z"], _parse_complex) if not isinstance(raw["z"], (int, float)) \
                    else [complex(raw["z"])]
            except (TypeError, ValueError):
                raise ConfigError("z", "expected complex numbers such as 0.3+0.2j") from None
        if "suite" in raw:
            cfg.suite = tuple(_parse_list(raw["suite"], str))
        if "tol" in raw:
            t = raw["tol"]
            if isinstance(t, list):
                t = dict(item.split("=", 1) for item in t)
            try:
                cfg.tol = {k: float(v) for k, v in t.items()}
            except (AttributeError, ValueError):
                raise ConfigError("tol", "expected key=value pairs") from None
        if "out" in raw:
            cfg.out = str(raw["out"])
        cfg._check()
        return cfg

    def _check(self):
        try:
            sig = GradingSignature(self.n, self.m)
        except ValueError as exc:
            raise ConfigError("n/m", str(exc)) from None
        if self.L < 1:
            raise ConfigError("L", "must be >= 1")
        for a in self.subset:
            if not 1 <= a <= sig.dim:
                raise ConfigError("subset", f"label {a} outside 1..{sig.dim}")
        if len(set(self.subset)) != len(self.subset):
            raise ConfigError("subset", "repeated label")
        for s in self.suite:
            if s != "all" and s not in SUITES:
                raise ConfigError("suite", f"unknown suite {s!r}; choose from {', '.join(SUITES)}, all")
        for k in self.tol:
            if k not in DEFAULT_TOLERANCES:
                raise ConfigError("tol", f"unknown tolerance {k!r}")
        if isinstance(self.twists, list) and len(self.twists) != sig.dim:
            raise ConfigError("twists", f"expected {sig.dim} angles, got {len(self.twists)}")

    @property
    def sig(self) -> GradingSignature:
        return GradingSignature(self.n, self.m)

    @property
    def tolerances(self) -> dict:
        return {**DEFAULT_TOLERANCES, **self.tol}

    @property
    def suites(self) -> tuple:
        return SUITES if "all" in self.suite else tuple(s for s in SUITES if s in self.suite)

    def twist_config(self, spectral: bool = False) -> TwistConfig:
        """Resolve the twist mode; "default" means nonresonant for spectral work, generic otherwise."""
        sig = self.sig
        if isinstance(self.twists, list):
            tw = TwistConfig(tuple(self.twists))
            tw.check_distinct()
            return tw
        mode = self.twists
        if mode == "default":
            mode = "nonresonant" if spectral else "generic"
        return getattr(TwistConfig, mode)(sig)

    def to_dict(self) -> dict:
        return {
            "n": self.n, "m": self.m, "L": self.L,
            "twists": self.twists if isinstance(self.twists, str) else list(self.twists),
            "subset": list(self.subset),
            "z": [complex(x) for x in self.z],
            "suite": list(self.suite),
            "seed": self.seed,
            "trace_corpus": self.trace_corpus,
        }


# ---------------------------------------------------------------------------
# verification suites

@dataclass
class Check:
    name: str
    suite: str
    inputs: dict
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(math.isfinite(self.residual) and self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        return {"name": self.name, "suite": self.suite, "inputs": self.inputs,
                "residual": self.residual, "tolerance": self.tolerance, "passed": self.passed}


def _name(subset) -> str:
    return "{" + ",".join(map(str, subset)) + "}"


def _subsets(sig):
    return [s for k in range(sig.dim + 1) for s in itertools.combinations(sig.labels, k)]


def _zs(cfg: ExperimentConfig, rng, count: int = 5) -> list:
    if cfg.z:
        return [complex(z) for z in cfg.z]
    return [complex(a, b) for a, b in rng.uniform(-1.5, 1.5, size=(count, 2))]


def _suite_ybe(cfg, rng, tol):
    sig = cfg.sig
    pairs = [(complex(*rng.uniform(-1.5, 1.5, 2)), complex(*rng.uniform(-1.5, 1.5, 2))) for _ in range(5)]
    for s in _subsets(sig):
        res = max(check_ybe(sig, s, None, z1, z2) for z1, z2 in pairs)
        yield Check(f"ybe/I={_name(s)}", "ybe", {"z_pairs": [[a, b] for a, b in pairs]}, res, tol["ybe"])


def _suite_commute(cfg, rng, tol):
    sig, L = cfg.sig, cfg.L
    tw = cfg.twist_config()
    zs = _zs(cfg, rng, 2)
    z1, z2 = zs[0], zs[-1]
    subs = _subsets(sig)
    mats = {s: (_family(sig, s, None, L, tw).matrix(z1), _family(sig, s, None, L, tw).matrix(z2)) for s in subs}
    for s, t in itertools.product(subs, repeat=2):
        if s > t:
            continue
        a, b = mats[s][0], mats[t][1]
        res = float(np.abs(a @ b - b @ a).max())
        yield Check(f"commute/Q{_name(s)}-Q{_name(t)}", "commute", {"z": z1, "z_prime": z2}, res, tol["commute"])
    if L >= 2:
        H = build_hamiltonian(sig, L, tw)
        for s in subs:
            a = mats[s][0]
            res = float(np.abs(a @ H - H @ a).max())
            yield Check(f"commute/Q{_name(s)}-H", "commute", {"z": z1}, res, tol["commute"])


def _suite_qq(cfg, rng, tol):
    sig, L, tw = cfg.sig, cfg.L, cfg.twist_config()
    zs = _zs(cfg, rng)
    for p in plaquette_relations(sig):
        res = verify_qq(sig, L, tw, p, zs)
        name = f"qq/I={_name(p.base)}/A={p.a}/B={p.b}"
        yield Check(name, "qq", {"z": zs, "kind": p.kind}, res, tol["qq"])


def _suite_gl11(cfg, rng, tol):
    sig = cfg.sig
    if (sig.n, sig.m) != (1, 1):
        return
    L, tw = cfg.L, cfg.twist_config()
    fam = _family(sig, (1, 2), None, L, tw)
    nodes = sample_nodes(L + 2)
    poly = interpolate_polynomial([(z, fam(z)) for z in nodes])
    dim = fam.space.dim
    expect = [np.zeros((dim, dim)) for _ in range(L + 1)]
    expect[L] = np.eye(dim)
    res = max(float(np.abs(c - e).max()) for c, e in zip(poly.coeffs, expect))
    yield Check("gl11/t_singlet_closed_form", "gl11", {"nodes": list(nodes)}, res, tol["gl11"])
    zs = _zs(cfg, rng)
    pairs = [(z, z + complex(*rng.uniform(-1, 1, 2))) for z in zs]
    yield Check("gl11/tqq", "gl11", {"z_pairs": [[a, b] for a, b in pairs]},
                verify_tqq_gl11(L, tw, pairs), tol["gl11"])
    yield Check("gl11/split", "gl11", {"z": zs}, verify_split_gl11(L, tw, zs), tol["gl11"])


def _suite_boundary(cfg, rng, tol):
    sig, L, tw = cfg.sig, cfg.L, cfg.twist_config()
    zs = _zs(cfg, rng)
    full = sig.labels
    r0 = max(float(np.abs(q_operator(sig, (), L, tw, z).matrix - np.eye(sig.dim ** L)).max()) for z in zs)
    yield Check("boundary/Q_empty", "boundary", {"z": zs}, r0, tol["boundary"])
    r1 = 0.0
    for z in zs:
        m = q_operator(sig, full, L, tw, z).matrix
        ref = prefactor(sig, full, tw, z) * z ** L * np.eye(m.shape[0])
        r1 = max(r1, float(np.abs(m - ref).max()))
    yield Check("boundary/Q_full", "boundary", {"z": zs}, r1, tol["boundary"])


def _suite_vacuum(cfg, rng, tol):
    sig, L, tw = cfg.sig, cfg.L, cfg.twist_config()
    if L < 2:
        return
    space = QuantumSpace(sig, L)
    H = build_hamiltonian(sig, L, tw)
    for a in sig.labels:
        v = np.zeros(space.dim, complex)
        v[space.index((a,) * L)] = 1.0
        e = 0.0 if sig.parity(a) == 0 else 4.0 * L
        res = float(np.abs(H @ v - e * v).max())
        yield Check(f"vacuum/label={a}", "vacuum", {"expected_energy": e}, res, tol["vacuum"])


def _suite_fusion(cfg, rng, tol):
    sig = cfg.sig
    zs = _zs(cfg, rng, 2)
    if (sig.n, sig.m) == (1, 1):
        pairs = [(z, z + complex(*rng.uniform(-1, 1, 2))) for z in zs]
        res = max(verify_gl11_fusion(a, b) for a, b in pairs)
        yield Check("fusion/gl11_exact", "fusion", {"z_pairs": [[a, b] for a, b in pairs]}, res,
                    tol["fusion_exact"])
    subs = [s for s in _subsets(sig) if s]
    for I, J in itertools.product(subs, repeat=2):
        if set(I) & set(J):
            continue
        res = max(verify_factorization(sig, I, J, z) for z in zs)
        yield Check(f"fusion/I={_name(I)}/J={_name(J)}", "fusion", {"z": zs, "window_cutoff": 24}, res,
                    tol["fusion"])


def _suite_xplus(cfg, rng, tol):
    sig, L, tw = cfg.sig, cfg.L, cfg.twist_config()
    zs = _zs(cfg, rng, 3)
    for I in itertools.combinations(sig.labels, 2):
        weights = [round(float(w), 3) for w in rng.uniform(-1, 1, 2)]
        res = verify_xqqq(sig, I, weights, L, tw, zs)
        yield Check(f"xplus/I={_name(I)}", "xplus", {"weights": weights, "z": zs}, res, tol["xplus"])


def _suite_trace(cfg, rng, tol):
    corpus = random_trace_corpus(seed=cfg.seed, size=cfg.trace_corpus)
    worst = 0.0
    for x, w in corpus:
        a, b = family_trace(x, w), abel_oracle(x, w)
        worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    yield Check("trace/corpus", "trace", {"seed": cfg.seed, "size": cfg.trace_corpus}, worst, tol["trace"])


_SUITE_FUNCS = {
    "ybe": _suite_ybe, "commute": _suite_commute, "qq": _suite_qq, "gl11": _suite_gl11,
    "boundary": _suite_boundary, "vacuum": _suite_vacuum, "fusion": _suite_fusion,
    "xplus": _suite_xplus, "trace": _suite_trace,
}


def run_verify(cfg: ExperimentConfig) -> dict:
    """Run the selected suites and return the report dictionary (checks sorted by name)."""
    tol = cfg.tolerances
    checks = []
    for k, suite in enumerate(cfg.suites):
        # one stream per suite keeps each suite's inputs independent of the selection
        rng = np.random.default_rng([cfg.seed, k])
        checks.extend(_SUITE_FUNCS[suite](cfg, rng, tol))
    checks.sort(key=lambda c: c.name)
    tw = cfg.twist_config()
    return {
        "command": "verify",
        "config": cfg.to_dict(),
        "twists": list(tw.phi),
        "tolerances": tol,
        "checks": [c.to_dict() for c in checks],
        "passed": all(c.passed for c in checks),
    }


# ---------------------------------------------------------------------------
# operator export

def export_operator(sig: GradingSignature, subset, L: int, twists: TwistConfig, z: complex,
                    dense: bool = False) -> dict:
    op = q_operator(sig, subset, L, twists, z)
    meta = {"n": sig.n, "m": sig.m, "L": L, "I": list(subset), "z": complex(z), "twists": list(twists.phi)}
    if dense:
        return {"meta": meta, "matrix": op.matrix}
    space = QuantumSpace(sig, L)
    blocks = [{"occupation": list(map(int, occ)), "matrix": op.matrix[np.ix_(idx, idx)]}
              for occ, idx in space.sectors.items()]
    return {"meta": meta, "blocks": blocks}


def _complex_matrix(rows) -> np.ndarray:
    a = np.array(rows, dtype=float)
    return a[..., 0] + 1j * a[..., 1]


def load_operator(path_or_dict) -> np.ndarray:
    """Rebuild the full matrix from an exported JSON file (block or dense form)."""
    d = path_or_dict if isinstance(path_or_dict, dict) else json.loads(Path(path_or_dict).read_text())
    meta = d["meta"]
    if "matrix" in d:
        return _complex_matrix(d["matrix"])
    space = QuantumSpace(GradingSignature(meta["n"], meta["m"]), meta["L"])
    out = np.zeros((space.dim, space.dim), complex)
    for b in d["blocks"]:
        idx = space.sectors[tuple(b["occupation"])]
        out[np.ix_(idx, idx)] = _complex_matrix(b["matrix"])
    return out


# ---------------------------------------------------------------------------
# commands

def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + "\n")


def cmd_verify(cfg: ExperimentConfig) -> int:
    t0 = time.perf_counter()
    report = run_verify(cfg)
    out = Path(cfg.out) / "report.json"
    _write(out, dumps(report))
    for c in report["checks"]:
        flag = "PASS" if c["passed"] else "FAIL"
        print(f"{flag}  {c['name']:<40} residual={c['residual']:.3e}  tol={c['tolerance']:.0e}")
    n_fail = sum(not c["passed"] for c in report["checks"])
    print(f"{len(report['checks'])} checks, {n_fail} failed; report: {out}; "
          f"wall time {time.perf_counter() - t0:.2f} s")
    return 0 if report["passed"] else EXIT_FAIL


def cmd_spectrum(cfg: ExperimentConfig, zero_twist: bool = False) -> int:
    sig, L = cfg.sig, cfg.L
    tw = cfg.twist_config(spectral=True)
    tol = cfg.tolerances
    t0 = time.perf_counter()
    rep = cross_check_spectrum(sig, L, tw, seed=cfg.seed)
    data = rep.to_dict()
    data["tolerances"] = tol
    ok = (rep.ok and rep.energy_deviation <= tol["energy"] and rep.path_spread <= tol["path_spread"]
          and all(v <= tol["bethe"] for v in rep.bethe_max.values()))
    if zero_twist:
        zt = zero_twist_energies(sig, L, tw)
        data["zero_twist"] = {",".join(map(str, k)): v for k, v in sorted(zt.items(), reverse=True)}
    data["passed"] = ok
    out = Path(cfg.out)
    _write(out / "spectrum.json", dumps(data))
    with open(out / "spectrum.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sector", "energy", "roots_per_level", "max_bethe_residual"])
        for r in rep.records:
            counts = ";".join(f"{_name(k)}:{len(v)}" for k, v in r.roots.items())
            w.writerow([" ".join(map(str, r.sector)), format(r.energy, ".17g"), counts,
                        format(r.bethe_max, ".3e")])
    print(f"gl{sig}  L={L}  twists={', '.join(f'{p:.6f}' for p in tw.phi)}")
    print(f"{'sector':<12}{'energy':>20}  {'bethe':>9}  roots")
    for r in rep.records:
        counts = " ".join(f"{_name(k)}:{len(v)}" for k, v in r.roots.items() if 0 < len(k) < sig.dim)
        print(f"{str(r.sector):<12}{r.energy + 0.0:>20.12f}  {r.bethe_max:>9.2e}  {counts}")
    print(f"energy deviation {rep.energy_deviation:.2e}, path spread {rep.path_spread:.2e}, "
          f"max Bethe residual {max(rep.bethe_max.values(), default=0.0):.2e}, flagged roots {rep.flagged}")
    for e in rep.errors:
        print("error:", e)
    if zero_twist:
        print("zero-twist energies:")
        for k, v in data["zero_twist"].items():
            print(f"  ({k}): " + ", ".join(f"{x + 0.0:.8f}" if abs(x) > 5e-9 else "0.00000000" for x in v))
    print(f"{'PASS' if ok else 'FAIL'}; wall time {time.perf_counter() - t0:.2f} s")
    return 0 if ok else EXIT_FAIL


def cmd_tj_demo(cfg: ExperimentConfig) -> int:
    if cfg.L not in (2, 3):
        raise ConfigError("L", "the t-J demo runs at L = 2 or 3")
    t0 = time.perf_counter()
    sig = GradingSignature(2, 1)
    tw = TwistConfig.nonresonant(sig) if cfg.twists == "default" else \
        ExperimentConfig(n=2, m=1, L=cfg.L, twists=cfg.twists).twist_config(spectral=True)
    rep = tj_demo(cfg.L, tw, seed=cfg.seed)
    tol = cfg.tolerances["bethe"]
    print(rep.diagram)
    print(f"Q-operators: {rep.n_operators}  paths: {rep.n_paths}  Dynkin grading classes: {rep.n_classes}")
    print(f"edges: {rep.edge_census['bosonic']} bosonic (solid), {rep.edge_census['fermionic']} fermionic (dashed)")
    for name, v in sorted(rep.residuals.items()):
        print(f"{'PASS' if v <= tol else 'FAIL'}  system {name:<9} max residual {v:.3e}")
    ok = all(v <= tol for v in rep.residuals.values()) and rep.flagged == 0 and \
        (rep.n_operators, rep.n_paths, rep.n_classes) == (8, 6, 3)
    data = rep.to_dict()
    data.update(tolerance=tol, passed=ok)
    out = Path(cfg.out)
    _write(out / "tj_report.json", dumps(data))
    _write(out / "hasse_gl21.txt", rep.diagram)
    print(f"{rep.states} eigenstates; {'PASS' if ok else 'FAIL'}; wall time {time.perf_counter() - t0:.2f} s")
    return 0 if ok else EXIT_FAIL


def cmd_export_operator(cfg: ExperimentConfig, dense: bool = False) -> int:
    z = cfg.z[0] if cfg.z else 0.5 + 0.25j
    tw = cfg.twist_config()
    data = export_operator(cfg.sig, cfg.subset, cfg.L, tw, z, dense=dense)
    out = Path(cfg.out)
    path = out if out.suffix == ".json" else out / f"Q{''.join(map(str, cfg.subset)) or '_empty'}.json"
    _write(path, dumps(data))
    print(f"wrote {path}")
    return 0


def cmd_hasse(cfg: ExperimentConfig) -> int:
    hd = HasseDiagram(cfg.sig)
    paths, classes = enumerate_paths(hd)
    print(hd.render())
    c = hd.edge_census()
    print(f"nodes {len(hd.nodes)}, edges {c['bosonic']} bosonic + {c['fermionic']} fermionic, "
          f"plaquettes {len(hd.plaquettes)}")
    print(f"paths {len(paths)}, Dynkin grading classes {len(classes)}")
    for key, ps in sorted(classes.items()):
        print(f"  {''.join('F' if x else 'B' for x in key) or '-'}: " +
              "  ".join("".join(map(str, p.order)) for p in ps))
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="number of bosonic labels")
    common.add_argument("--m", type=int, help="number of fermionic labels")
    common.add_argument("--L", type=int, help="chain length")
    common.add_argument("--twists", help="default | generic | nonresonant | comma-separated angles")
    common.add_argument("--subset", help="comma-separated labels, e.g. 1,3")
    common.add_argument("--z", help="comma-separated spectral parameters, e.g. 0.3+0.2j,-0.5")
    common.add_argument("--suite", action="append", help="suite name (repeatable): " + ", ".join(SUITES) + ", all")
    common.add_argument("--seed", type=int, help="random seed (default 42)")
    common.add_argument("--tol", action="append", metavar="KEY=VALUE", help="override a tolerance")
    common.add_argument("--out", help="output directory (or .json file for export-operator)")
    common.add_argument("--config", help="flat JSON config file; flags override its keys")

    p = argparse.ArgumentParser(prog="superq", description="Q-operators of graded gl(n|m) spin chains.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run verification suites, write report.json")
    sp = sub.add_parser("spectrum", parents=[common], help="Bethe-root spectrum cross-check")
    sp.add_argument("--zero-twist", action="store_true", help="also continue the energies to zero twist")
    sub.add_parser("tj-demo", parents=[common], help="gl(2|1) t-J Bethe systems on every eigenstate")
    ep = sub.add_parser("export-operator", parents=[common], help="write Q_I(z) as JSON")
    ep.add_argument("--dense", action="store_true", help="write the full matrix instead of sector blocks")
    sub.add_parser("hasse", parents=[common], help="print the Hasse diagram")
    return p


_DEFAULT_L = {"tj-demo": 2, "spectrum": 2, "export-operator": 2}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_values = {}
        if args.config:
            try:
                file_values = json.loads(Path(args.config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError("config", str(exc)) from None
            if not isinstance(file_values, dict):
                raise ConfigError("config", "expected a flat JSON object")
        cli = {k: getattr(args, k) for k in ("n", "m", "L", "twists", "subset", "z", "suite", "seed", "tol", "out")}
        if args.command == "tj-demo":
            cli.update(n=2, m=1)
        if "L" not in file_values and cli["L"] is None and args.command in _DEFAULT_L:
            cli["L"] = _DEFAULT_L[args.command]
        cfg = ExperimentConfig.from_sources(file_values, cli)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "spectrum":
            return cmd_spectrum(cfg, args.zero_twist)
        if args.command == "tj-demo":
            return cmd_tj_demo(cfg)
        if args.command == "export-operator":
            return cmd_export_operator(cfg, args.dense)
        return cmd_hasse(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SingularTwistError as exc:
        pair = f" (labels {exc.pair[0]} and {exc.pair[1]})" if exc.pair else ""
        print(f"singular twists{pair}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (DegeneracyError, PoleError) as exc:
        print(f"spectral error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
