"""Q-eigenvalue polynomials, Bethe roots, nested Bethe equations and energies.

Eigenvalues are read off in a common eigenbasis of H and the Q-operators.
Each Q_I eigenvalue divided by exp(i z sum_{A in I} (-1)^A phi_A) is a
polynomial of degree <= L whose zeros are the Bethe roots of level I.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graded import GradingSignature, QuantumSpace, SingularTwistError, TwistConfig, build_hamiltonian
from .hasse import HasseDiagram, NestingPath, enumerate_paths
from .lax import SubsetLabel
from .transfer import _family, prefactor, sample_nodes

__all__ = [
    "DegeneracyError",
    "PolynomialError",
    "PoleError",
    "EigenBasis",
    "SpectrumRecord",
    "BetheResidual",
    "common_eigenbasis",
    "q_eigen_polynomials",
    "extract_bethe_roots",
    "spectrum_records",
    "bethe_residuals",
    "energy_from_roots",
    "vacuum_kind",
    "cross_check_spectrum",
    "SpectrumReport",
    "degree_table",
    "zero_twist_energies",
    "PROBES",
    "ExplicitEquation",
    "TJ_PATHS",
    "tj_systems",
    "equation_residuals",
    "TJReport",
    "tj_demo",
]

PROBES = (0.31 + 0.47j, -0.83 + 0.29j, 1.17 - 0.61j)


class DegeneracyError(RuntimeError):
    def __init__(self, msg, sector=None):
        super().__init__(msg)
        self.sector = sector


class PolynomialError(RuntimeError):
    """A Q eigenvalue failed the polynomial test: a construction bug."""


class PoleError(ValueError):
    pass


def _all_subsets(sig):
    return [n for n in HasseDiagram(sig).nodes]


# ---------------------------------------------------------------------------
# common eigenbasis

@dataclass
class EigenBasis:
    """Right eigenvectors (columns) and their dual rows, sector by sector."""

    sig: GradingSignature
    L: int
    twists: TwistConfig
    sectors: list            # occupation vector per state
    right: np.ndarray        # dim x dim, columns are eigenvectors (full space)
    left: np.ndarray         # rows with left @ right = 1
    energies: np.ndarray     # H eigenvalues
    probe: complex | None = None

    @property
    def space(self) -> QuantumSpace:
        return QuantumSpace(self.sig, self.L)

    def __len__(self):
        return len(self.sectors)

    def diagonal(self, M: np.ndarray) -> np.ndarray:
        return np.einsum("ij,jk,ki->i", self.left, M, self.right)

    def off_diagonal(self, M: np.ndarray) -> float:
        """Largest off-diagonal entry of M in this basis, relative to max(1, |M|)."""
        T = self.left @ M @ self.right
        off = T - np.diag(np.diag(T))
        return float(np.abs(off).max()) / max(1.0, float(np.abs(M).max()))


def _eig_sector(C):
    vals, vecs = np.linalg.eig(C)
    order = np.lexsort((vals.imag.round(9), vals.real.round(9)))
    return vals[order], vecs[:, order]


def common_eigenbasis(sig: GradingSignature, L: int, twists: TwistConfig, seed: int = 42,
                      probes=PROBES, tol: float = 1e-8) -> EigenBasis:
    """Diagonalize H together with every Q_I(z0), sector by sector.

    Inside each occupation sector a generic complex combination
    H + sum_I c_I Q_I(z0) is diagonalized; its eigenvectors must make H and
    every Q_I(z0) diagonal to ``tol``, else the next probe point is tried.
    With coinciding twist angles the Q-operators do not exist and H alone
    is used, so any multiplet raises :class:`DegeneracyError`.
    """
    space = QuantumSpace(sig, L)
    H = build_hamiltonian(sig, L, twists) if L >= 2 else np.zeros((space.dim, space.dim), complex)
    subsets = [s for s in _all_subsets(sig) if 0 < len(s) < sig.dim]
    try:
        twists.check_distinct()
        fams = [_family(sig, s, None, L, twists) for s in subsets]
    except SingularTwistError:
        fams = []
    rng = np.random.default_rng(seed)
    last_err = None
    for z0 in probes:
        Qs = [f.matrix(z0) for f in fams]
        coef = rng.normal(size=len(Qs)) + 1j * rng.normal(size=len(Qs))
        right = np.zeros((space.dim, space.dim), complex)
        left = np.zeros((space.dim, space.dim), complex)
        secs, col, failed = [], 0, None
        for occ, idx in space.sectors.items():
            blk = np.ix_(idx, idx)
            C = H[blk].astype(complex)
            for c, Q in zip(coef, Qs):
                C = C + 0.1 * c * Q[blk] / max(1.0, float(np.abs(Q[blk]).max()))
            vals, vecs = _eig_sector(C)
            k = len(idx)
            if k > 1:
                gaps = np.abs(vals[:, None] - vals[None, :]) + np.eye(k)
                if gaps.min() < tol:
                    failed = occ
                    break
            inv = np.linalg.inv(vecs)
            for M in [H] + Qs:
                T = inv @ M[blk] @ vecs
                off = T - np.diag(np.diag(T))
                if np.abs(off).max() > tol * max(1.0, float(np.abs(M[blk]).max())):
                    failed = occ
                    break
            if failed is not None:
                break
            right[idx, col:col + k] = vecs
            left[col:col + k, idx] = inv
            secs.extend([occ] * k)
            col += k
        if failed is None:
            basis = EigenBasis(sig, L, twists, secs, right, left, np.zeros(space.dim), z0)
            basis.energies = basis.diagonal(H).real
            return basis
        last_err = tuple(int(x) for x in failed)
        if not fams:
            break
    raise DegeneracyError(f"degenerate eigenvalues in occupation sector {last_err}", sector=last_err)


# ---------------------------------------------------------------------------
# eigenvalue polynomials and roots

def q_eigen_polynomials(basis: EigenBasis, subset, nodes: int | None = None,
                        tol: float = 1e-8, trim: float = 1e-10) -> list[np.ndarray]:
    """Per-state coefficients (ascending) of Q_I eigenvalue / prefactor.

    Rayleigh quotients at ``nodes`` >= L + 2 points; L + 1 determine the
    interpolant, the rest must agree to ``tol``.  Leading coefficients below
    ``trim`` (relative) are dropped; trailing ones are set to zero.
    """
    sig, L, tw = basis.sig, basis.L, basis.twists
    members = subset.members if isinstance(subset, SubsetLabel) else tuple(subset)
    nodes = nodes or L + 2
    if nodes < L + 2:
        raise ValueError("need at least L + 2 nodes")
    zs = sample_nodes(nodes)
    fam = _family(sig, members, None, L, tw)
    vals = np.array([basis.diagonal(fam.matrix(z)) / prefactor(sig, members, tw, z) for z in zs])
    V = np.vander(zs[:L + 1], L + 1, increasing=True)
    coef = np.linalg.solve(V, vals[:L + 1])
    scale = max(1.0, float(np.abs(vals).max()))
    for z, v in zip(zs[L + 1:], vals[L + 1:]):
        pred = np.vander([z], L + 1, increasing=True) @ coef
        dev = float(np.abs(pred - v).max()) / scale
        if dev > tol:
            raise PolynomialError(f"Q_{members} eigenvalue is not a degree-{L} polynomial (deviation {dev:.2e})")
    out = []
    for s in range(coef.shape[1]):
        c = coef[:, s].copy()
        big = float(np.abs(c).max())
        small = np.abs(c) < trim * max(big, 1e-300)
        c[small] = 0
        top = np.flatnonzero(c)
        out.append(c[:top[-1] + 1] if top.size else np.zeros(1, complex))
    return out


def extract_bethe_roots(coeffs, newton_steps: int = 2) -> np.ndarray:
    """Roots of sum_j coeffs[j] z^j (ascending); exact zeros for vanishing low coefficients."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    if c.size <= 1:
        return np.zeros(0, complex)
    k = int(np.argmax(c != 0))
    rest = c[k:]
    deg = rest.size - 1
    if deg == 0:
        return np.zeros(k, complex)
    monic = rest / rest[-1]
    comp = np.zeros((deg, deg), complex)
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -monic[:-1]
    roots = np.linalg.eigvals(comp)
    p = np.polynomial.Polynomial(rest)
    dp = p.deriv()
    for _ in range(newton_steps):
        d = dp(roots)
        ok = np.abs(d) > 1e-300
        roots[ok] = roots[ok] - p(roots[ok]) / d[ok]
    return np.concatenate([np.zeros(k, complex), np.sort_complex(roots)])


@dataclass
class SpectrumRecord:
    sector: tuple[int, ...]
    energy: float
    index: int                                   # column in the eigenbasis
    polynomials: dict = field(default_factory=dict)   # subset -> coefficients
    roots: dict = field(default_factory=dict)         # subset -> roots
    bethe_max: float = 0.0                            # worst Bethe residual over all paths

    def q_value(self, subset, twists: TwistConfig, sig: GradingSignature, z: complex) -> complex:
        subset = tuple(subset)
        c = self.polynomials[subset]
        return prefactor(sig, subset, twists, z) * np.polynomial.polynomial.polyval(z, c)

    def to_dict(self) -> dict:
        pair = lambda x: [float(np.real(x)), float(np.imag(x))]
        name = lambda s: "{" + ",".join(map(str, s)) + "}"
        return {
            "sector": list(self.sector),
            "energy": float(self.energy),
            "polynomials": {name(k): [pair(x) for x in v] for k, v in self.polynomials.items()},
            "roots": {name(k): [pair(x) for x in v] for k, v in self.roots.items()},
            "bethe_max": float(self.bethe_max),
        }


def spectrum_records(basis: EigenBasis) -> list[SpectrumRecord]:
    sig = basis.sig
    polys = {s: q_eigen_polynomials(basis, s) for s in _all_subsets(sig)}
    recs = []
    for i, (occ, e) in enumerate(zip(basis.sectors, basis.energies)):
        r = SpectrumRecord(tuple(int(x) for x in occ), float(e), i)
        for s, plist in polys.items():
            r.polynomials[s] = plist[i]
            r.roots[s] = extract_bethe_roots(plist[i])
        recs.append(r)
    return recs


# ---------------------------------------------------------------------------
# Bethe equations

@dataclass(frozen=True)
class BetheResidual:
    level: tuple[int, ...]
    kind: str            # "same" or "mixed"
    root: complex
    residual: float      # |LHS/RHS - 1|, nan when flagged
    flagged: bool = False


def _path_levels(path: NestingPath):
    chain, order = path.chain, path.order
    for i in range(1, len(order)):
        a, b = order[i - 1], order[i]
        same = path.sig.parity(a) == path.sig.parity(b)
        yield chain[i - 1], chain[i], chain[i + 1], a, b, same


def _collides(w, lo, mid, hi, same, tol) -> bool:
    """True if a neighbouring-level root sits within ``tol`` of a point where Q is evaluated."""
    def near(roots, shifts, skip_self=False):
        for r in roots:
            if skip_self and abs(r - w) < tol:
                continue
            if any(abs(w + d - r) < tol for d in shifts):
                return True
        return False
    if near(lo, (0.5, -0.5)) or near(hi, (0.5, -0.5)):
        return True
    if same:
        return near(mid, (1.0, -1.0))
    return False


def bethe_residuals(path: NestingPath, record: SpectrumRecord, twists: TwistConfig,
                    form: str = "ratio", pole_tol: float = 1e-8) -> list[BetheResidual]:
    """Residuals of the nested Bethe equations along ``path`` for one eigenstate.

    ``form="ratio"`` evaluates the Q-ratio equations with the interpolated
    eigenvalues; ``form="product"`` uses the root products with the twist
    phase exp((-1)^B i (phi_B - phi_A)) on the left.
    """
    sig = path.sig
    out = []
    for lo, mid, hi, a, b, same in _path_levels(path):
        kind = "same" if same else "mixed"
        for w in record.roots[mid]:
            if _collides(w, record.roots[lo], record.roots[mid], record.roots[hi], same, pole_tol):
                warnings.warn(f"root {w:.6g} of Q_{mid} collides with a shifted root; equation skipped")
                out.append(BetheResidual(mid, kind, complex(w), math.nan, True))
                continue
            if form == "ratio":
                q = lambda s, z: record.q_value(s, twists, sig, z)
                if same:
                    num = [q(lo, w - 0.5), q(mid, w + 1), q(hi, w - 0.5)]
                    den = [q(lo, w + 0.5), q(mid, w - 1), q(hi, w + 0.5)]
                    lhs = -1.0
                else:
                    num = [q(lo, w + 0.5), q(hi, w - 0.5)]
                    den = [q(lo, w - 0.5), q(hi, w + 0.5)]
                    lhs = 1.0
            elif form == "product":
                lhs = cmath.exp(sig.sign(b) * 1j * (twists[b] - twists[a]))
                rl, rm, rh = record.roots[lo], record.roots[mid], record.roots[hi]
                others = [x for x in rm]
                others.remove(w)
                if same:
                    num = [np.prod(w - rl - 0.5), np.prod([w - x + 1 for x in others]), np.prod(w - rh - 0.5)]
                    den = [np.prod(w - rl + 0.5), np.prod([w - x - 1 for x in others]), np.prod(w - rh + 0.5)]
                else:
                    num = [np.prod(w - rl + 0.5), np.prod(w - rh - 0.5)]
                    den = [np.prod(w - rl - 0.5), np.prod(w - rh + 0.5)]
            else:
                raise ValueError(f"unknown form {form!r}")
            rhs = np.prod(num) / np.prod(den)
            out.append(BetheResidual(mid, kind, complex(w), float(abs(lhs / rhs - 1)), False))
    return out


# ---------------------------------------------------------------------------
# energies

def vacuum_kind(sig: GradingSignature, last_level) -> str:
    missing = [a for a in sig.labels if a not in tuple(last_level)]
    if len(missing) != 1:
        raise ValueError("last-level set must miss exactly one label")
    return "fermionic" if sig.parity(missing[0]) else "bosonic"


def energy_from_roots(roots, kind: str, L: int, pole_tol: float = 1e-10) -> float:
    """2 sum 1/(1/4 - z^2) (bosonic vacuum) or 4L minus that (fermionic vacuum)."""
    roots = np.asarray(roots, dtype=complex)
    den = 0.25 - roots ** 2
    if roots.size and np.abs(den).min() < pole_tol:
        raise PoleError("a Bethe root sits at +-1/2")
    s = 2 * np.sum(1 / den) if roots.size else 0.0
    if kind == "bosonic":
        e = s
    elif kind == "fermionic":
        e = 4 * L - s
    else:
        raise ValueError(f"vacuum kind must be bosonic or fermionic, got {kind!r}")
    return complex(e).real if abs(complex(e).imag) < 1e-6 * max(1.0, abs(e)) else complex(e)


@dataclass
class SpectrumReport:
    sig: GradingSignature
    L: int
    twists: TwistConfig
    records: list
    energy_deviation: float          # max over states and paths, relative
    path_spread: float               # max over states of max-min energy across paths
    bethe_max: dict                  # path order -> max residual
    flagged: int
    errors: list

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "signature": [self.sig.n, self.sig.m],
            "L": self.L,
            "twists": list(self.twists.phi),
            "energy_deviation": self.energy_deviation,
            "path_spread": self.path_spread,
            "bethe_max": {"".join(map(str, k)): v for k, v in self.bethe_max.items()},
            "flagged_roots": self.flagged,
            "errors": self.errors,
            "states": [r.to_dict() for r in self.records],
        }


def cross_check_spectrum(sig: GradingSignature, L: int, twists: TwistConfig | None = None,
                         paths="all", seed: int = 42) -> SpectrumReport:
    """Energies from last-level roots on every path versus eigenvalues of H.

    Defaults to :meth:`TwistConfig.nonresonant` twists; a root at +-1/2 is
    reported under ``errors`` for the affected path.
    """
    twists = twists or TwistConfig.nonresonant(sig)
    basis = common_eigenbasis(sig, L, twists, seed=seed)
    records = spectrum_records(basis)
    all_paths, _ = enumerate_paths(HasseDiagram(sig))
    if paths != "all":
        all_paths = [NestingPath(sig, tuple(p)) for p in paths]
    dev, spread, flagged, errors = 0.0, 0.0, 0, []
    bmax = {p.order: 0.0 for p in all_paths}
    for r in records:
        es = []
        for p in all_paths:
            last = p.chain[-2]
            try:
                e = energy_from_roots(r.roots[last], vacuum_kind(sig, last), L)
            except PoleError as exc:
                errors.append(f"state {r.index} path {p.order}: {exc}")
                continue
            es.append(e)
            dev = max(dev, abs(e - r.energy) / max(1.0, abs(r.energy)))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                res = bethe_residuals(p, r, twists)
            for x in res:
                if x.flagged:
                    flagged += 1
                else:
                    bmax[p.order] = max(bmax[p.order], x.residual)
                    r.bethe_max = max(r.bethe_max, x.residual)
        if es:
            spread = max(spread, max(abs(x - y) for x in es for y in es) / max(1.0, abs(r.energy)))
    records.sort(key=lambda r: (tuple(-x for x in r.sector), r.energy))
    return SpectrumReport(sig, L, twists, records, dev, spread, bmax, flagged, errors)


def degree_table(records: list, sig: GradingSignature) -> dict:
    """Observed polynomial degree of each Q_I against the rule deg = sum_{A in I} occupation_A."""
    table = {}
    for r in records:
        for s, c in r.polynomials.items():
            deg = len(np.trim_zeros(c, "b")) - 1 if np.any(c) else -1
            rule = sum(r.sector[a - 1] for a in s)
            table.setdefault(s, []).append((r.sector, deg, rule))
    return table


# ---------------------------------------------------------------------------
# zero-twist continuation

def zero_twist_energies(sig: GradingSignature, L: int, twists: TwistConfig | None = None,
                        steps: int = 5, ratio: float = 0.5, start: float = 0.05, path=None) -> dict:
    """Continue root-based energies to zero twist.

    The twists are scaled by start * ratio**k, k = 0..steps-1; states are followed
    across steps by assignment on energies within each occupation sector and
    each trajectory is extrapolated to zero scale by a polynomial through
    the samples.  Returns {sector: sorted extrapolated energies}.
    """
    twists = twists or TwistConfig.nonresonant(sig)
    if path is None:
        path = NestingPath(sig, sig.labels)
    last = path.chain[-2]
    kind = vacuum_kind(sig, last)
    scales = [start * ratio ** k for k in range(steps)]
    tracks: dict = {}
    for s in scales:
        tw = twists.scaled(s)
        basis = common_eigenbasis(sig, L, tw)
        coeffs = q_eigen_polynomials(basis, last)
        per: dict = {}
        for occ, c in zip(basis.sectors, coeffs):
            per.setdefault(tuple(int(x) for x in occ), []).append(energy_from_roots(extract_bethe_roots(c), kind, L))
        for occ, es in per.items():
            es = np.real(np.array(es, dtype=complex))
            if occ not in tracks:
                tracks[occ] = [[e] for e in sorted(es)]
                continue
            prev = np.array([t[-1] for t in tracks[occ]])
            rows, cols = linear_sum_assignment(np.abs(prev[:, None] - es[None, :]))
            for r_, c_ in zip(rows, cols):
                tracks[occ][r_].append(es[c_])
    out = {}
    x = np.array(scales)
    for occ, ts in tracks.items():
        vals = []
        for t in ts:
            fit = np.polynomial.polynomial.polyfit(x, np.array(t), len(x) - 1)
            vals.append(float(fit[0]))
        out[occ] = sorted(vals)
    return out


# ---------------------------------------------------------------------------
# gl(2|1) t-J systems

@dataclass(frozen=True)
class ExplicitEquation:
    """const * prod_k Q_{S_k}(w + shift_k)^{power_k} = 1 for every root w of Q_level.

    ``neighbours`` = (lo, hi, same) drives the collision test.
    """

    name: str
    level: tuple
    const: complex
    factors: tuple                  # ((subset, shift, power), ...)
    neighbours: tuple


def _eq(name, level, const, factors, lo, hi, same):
    return ExplicitEquation(name, tuple(level), const, tuple((tuple(s), d, p) for s, d, p in factors),
                           (tuple(lo), tuple(hi), same))


FULL_21 = (1, 2, 3)

# One system per Dynkin grading class of gl(2|1), keyed by a representative path.
TJ_PATHS = {"a": (1, 2, 3), "b": (1, 3, 2), "c": (3, 1, 2)}


def tj_systems(drop_c_sign: bool = False) -> dict:
    """The three gl(2|1) nested Bethe systems as explicit Q-ratio equations.

    With ``drop_c_sign=True`` the top equation of system c is taken without the
    factor -1 on its right-hand side (the form that fails numerically).
    """
    c_sign = 1.0 if drop_c_sign else -1.0
    return {
        "a": (
            _eq("a-top", (1, 2), 1.0, [(FULL_21, 0.5, 1), (FULL_21, -0.5, -1), ((1,), 0.5, -1), ((1,), -0.5, 1)],
                (1,), FULL_21, False),
            _eq("a-bottom", (1,), -1.0, [((1, 2), -0.5, -1), ((1, 2), 0.5, 1), ((1,), 1.0, -1), ((1,), -1.0, 1)],
                (), (1, 2), True),
        ),
        "b": (
            _eq("b-top", (1, 3), 1.0, [(FULL_21, 0.5, 1), (FULL_21, -0.5, -1), ((1,), 0.5, -1), ((1,), -0.5, 1)],
                (1,), FULL_21, False),
            _eq("b-bottom", (1,), 1.0, [((1, 3), -0.5, -1), ((1, 3), 0.5, 1)],
                (), (1, 3), False),
        ),
        "c": (
            _eq("c-top", (1, 3), c_sign,
                [(FULL_21, 0.5, 1), (FULL_21, -0.5, -1), ((3,), -0.5, -1), ((3,), 0.5, 1),
                 ((1, 3), 1.0, -1), ((1, 3), -1.0, 1)],
                (3,), FULL_21, True),
            _eq("c-bottom", (3,), 1.0, [((1, 3), -0.5, -1), ((1, 3), 0.5, 1)],
                (), (1, 3), False),
        ),
    }


def equation_residuals(eq: ExplicitEquation, record: SpectrumRecord, twists: TwistConfig,
                      sig: GradingSignature, pole_tol: float = 1e-8) -> list[BetheResidual]:
    lo, hi, same = eq.neighbours
    kind = "same" if same else "mixed"
    out = []
    for w in record.roots[eq.level]:
        if _collides(w, record.roots[lo], record.roots[eq.level], record.roots[hi], same, pole_tol):
            out.append(BetheResidual(eq.level, kind, complex(w), math.nan, True))
            continue
        val = eq.const
        for s, d, p in eq.factors:
            val *= record.q_value(s, twists, sig, w + d) ** p
        out.append(BetheResidual(eq.level, kind, complex(w), float(abs(val - 1)), False))
    return out


@dataclass
class TJReport:
    L: int
    twists: TwistConfig
    n_operators: int
    n_paths: int
    n_classes: int
    edge_census: dict
    residuals: dict                 # equation name -> max residual
    flagged: int
    states: int
    diagram: str

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "twists": list(self.twists.phi),
            "q_operators": self.n_operators,
            "paths": self.n_paths,
            "grading_classes": self.n_classes,
            "edge_census": dict(sorted(self.edge_census.items())),
            "residuals": dict(sorted(self.residuals.items())),
            "flagged_roots": self.flagged,
            "states": self.states,
        }


def tj_demo(L: int = 2, twists: TwistConfig | None = None, seed: int = 42, drop_c_sign: bool = False) -> TJReport:
    """Run the three gl(2|1) Bethe systems on every eigenstate of the length-L chain."""
    sig = GradingSignature(2, 1)
    twists = twists or TwistConfig.nonresonant(sig)
    hd = HasseDiagram(sig)
    paths, classes = enumerate_paths(hd)
    records = spectrum_records(common_eigenbasis(sig, L, twists, seed=seed))
    res, flagged = {}, 0
    for system in tj_systems(drop_c_sign).values():
        for eq in system:
            worst = 0.0
            for r in records:
                for x in equation_residuals(eq, r, twists, sig):
                    if x.flagged:
                        flagged += 1
                    else:
                        worst = max(worst, x.residual)
            res[eq.name] = worst
    return TJReport(L, twists, len(hd.nodes), len(paths), len(classes), hd.edge_census(), res,
                    flagged, len(records), hd.render())
