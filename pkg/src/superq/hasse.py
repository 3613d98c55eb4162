"""The Hasse diagram of index subsets and the functional relations along it."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .graded import GradingSignature, SingularTwistError, TwistConfig
from .lax import ModuleSpec, SubsetLabel
from .oscillators import OscElement, OscFamily
from .transfer import TransferFamily, q_operator, x_plus_operator

__all__ = [
    "HasseDiagram",
    "NestingPath",
    "PlaquetteRelation",
    "build_hasse",
    "enumerate_paths",
    "plaquette_relations",
    "verify_qq",
    "verify_tqq_gl11",
    "verify_split_gl11",
    "t_plus_module",
    "super_vandermonde",
    "rho_shifts",
    "verify_xqqq",
    "CONVENTIONS",
]

# Conventions confirmed numerically and pinned by tests.  With highest weights
# E_AA|hws> = (-1)^p(A) lambda_A the module weight enters the Lax operator as
# z -> z - lambda, so the Q-operators in the X+ factorization are evaluated at
# z - lambda' rather than z + lambda'; the sines of Delta_I come out in the
# order (phi_{A_j} - phi_{A_i}), i<j, which is an extra (-1)^{|I|(|I|-1)/2}.
CONVENTIONS = {
    "qq_sine_sign": "(-1)^p(A)",
    "qq_shift": 0.5,
    "xqqq_shift_sign": -1,
    "xqqq_extra_sign": "(-1)^(|I|(|I|-1)/2)",
}


@dataclass(frozen=True)
class HasseDiagram:
    sig: GradingSignature

    @cached_property
    def nodes(self) -> list[tuple[int, ...]]:
        labels = self.sig.labels
        return [c for k in range(len(labels) + 1) for c in itertools.combinations(labels, k)]

    @cached_property
    def edges(self) -> list[tuple[tuple, tuple, int]]:
        """(I, I u {A}, parity of A)."""
        out = []
        for node in self.nodes:
            for a in self.sig.labels:
                if a not in node:
                    out.append((node, tuple(sorted(node + (a,))), self.sig.parity(a)))
        return out

    @cached_property
    def plaquettes(self) -> list[tuple[tuple, int, int]]:
        """(I, A, B) with A < B, both outside I."""
        out = []
        for node in self.nodes:
            rest = [a for a in self.sig.labels if a not in node]
            for a, b in itertools.combinations(rest, 2):
                out.append((node, a, b))
        return out

    def edge_census(self) -> dict[str, int]:
        bos = sum(1 for *_, p in self.edges if p == 0)
        return {"bosonic": bos, "fermionic": len(self.edges) - bos}

    def render(self) -> str:
        """Plain-text listing of the diagram, one rank per line."""
        lines = []
        names = lambda n: "Q{" + ",".join(map(str, n)) + "}"
        for k in range(self.sig.dim, -1, -1):
            lines.append("  ".join(names(n) for n in self.nodes if len(n) == k))
        lines.append("")
        for lo, hi, p in self.edges:
            lines.append(f"{names(lo)} -> {names(hi)}  {'fermionic (dashed)' if p else 'bosonic (solid)'}")
        return "\n".join(lines)


def build_hasse(sig: GradingSignature) -> HasseDiagram:
    return HasseDiagram(sig)


@dataclass(frozen=True)
class NestingPath:
    """Maximal chain from the empty set to the full set; ``order`` lists added labels."""

    sig: GradingSignature
    order: tuple[int, ...]

    @property
    def chain(self) -> list[tuple[int, ...]]:
        return [tuple(sorted(self.order[:k])) for k in range(len(self.order) + 1)]

    @property
    def grading(self) -> tuple[int, ...]:
        return tuple(self.sig.parity(a) for a in self.order)

    @property
    def dynkin_class(self) -> tuple[int, ...]:
        """Parity of each simple root along the path: 1 where adjacent labels differ in parity."""
        g = self.grading
        return tuple((g[i] + g[i + 1]) % 2 for i in range(len(g) - 1))


def enumerate_paths(d: HasseDiagram) -> tuple[list[NestingPath], dict]:
    """All (n+m)! nesting paths and their grouping by Dynkin grading class.

    Two paths share a class when their sequences of simple-root parities
    agree.  The sequence is read from the momentum-carrying end, so a
    diagram and its mirror image are different classes.
    """
    paths = [NestingPath(d.sig, p) for p in itertools.permutations(d.sig.labels)]
    classes: dict = {}
    for p in paths:
        key = tuple(p.dynkin_class)
        classes.setdefault(key, []).append(p)
    return paths, classes


@dataclass(frozen=True)
class PlaquetteRelation:
    sig: GradingSignature
    base: tuple[int, ...]
    a: int
    b: int

    @property
    def kind(self) -> str:
        return "same-parity" if self.sig.parity(self.a) == self.sig.parity(self.b) else "mixed-parity"

    def sine_prefactor(self, twists: TwistConfig) -> complex:
        s = math.sin((twists[self.a] - twists[self.b]) / 2)
        if abs(s) < 1e-12:
            raise SingularTwistError(f"twists of labels {self.a} and {self.b} coincide", pair=(self.a, self.b))
        return self.sig.sign(self.a) * 2j * s

    @property
    def nodes(self):
        i = self.base
        return (i, tuple(sorted(i + (self.a,))), tuple(sorted(i + (self.b,))),
                tuple(sorted(i + (self.a, self.b))))

    def residual(self, L: int, twists: TwistConfig, z: complex, shift: float = 0.5) -> float:
        """Max entry of LHS - RHS, relative to max(1, largest term)."""
        i, ia, ib, iab = self.nodes
        q = lambda s, w: q_operator(self.sig, s, L, twists, w).matrix
        c = self.sine_prefactor(twists)
        if self.kind == "same-parity":
            lhs = c * q(iab, z) @ q(i, z)
            t1 = q(ia, z + shift) @ q(ib, z - shift)
            t2 = q(ia, z - shift) @ q(ib, z + shift)
        else:
            lhs = c * q(ia, z) @ q(ib, z)
            t1 = q(iab, z + shift) @ q(i, z - shift)
            t2 = q(iab, z - shift) @ q(i, z + shift)
        scale = max(1.0, float(np.abs(t1).max()), float(np.abs(t2).max()))
        return float(np.abs(lhs - (t1 - t2)).max()) / scale


def plaquette_relations(sig: GradingSignature, orientations: bool = True) -> list[PlaquetteRelation]:
    """One relation per face, or two (A,B) and (B,A) when ``orientations``."""
    out = []
    for base, a, b in build_hasse(sig).plaquettes:
        out.append(PlaquetteRelation(sig, base, a, b))
        if orientations:
            out.append(PlaquetteRelation(sig, base, b, a))
    return out


def verify_qq(sig: GradingSignature, L: int, twists: TwistConfig, plaquette, zs, shift: float = 0.5) -> float:
    """Max residual of the Q-Q relation of one plaquette over the points ``zs``.

    ``plaquette`` is a PlaquetteRelation or a tuple (I, A, B).
    """
    if not isinstance(plaquette, PlaquetteRelation):
        base, a, b = plaquette
        plaquette = PlaquetteRelation(sig, tuple(sorted(base)), a, b)
    return max(plaquette.residual(L, twists, z, shift) for z in zs)


# ---------------------------------------------------------------------------
# gl(1|1)

def t_plus_module(eps: complex) -> ModuleSpec:
    """Two-dimensional gl(1|1) module with central charge set by ``eps``.

    E_11 = N - 1/2 - eps, E_22 = -N + 1/2 - eps, E_12 = -2 eps c+, E_21 = c
    on one fermionic oscillator c.
    """
    sig = GradingSignature(1, 1)
    f = OscFamily(1, 2, 1, "mod")
    N = OscElement.number(f)
    gens = {
        (1, 1): N - 0.5 - eps,
        (2, 2): -1 * N + 0.5 - eps,
        (1, 2): (-2 * eps) * OscElement.creator(f),
        (2, 1): OscElement.annihilator(f),
    }
    return ModuleSpec.explicit(sig, (1, 2), gens)


def _t_plus(L, twists, z, eps):
    sig = GradingSignature(1, 1)
    return TransferFamily(sig, (1, 2), t_plus_module(eps), L, twists).matrix(z)


def verify_tqq_gl11(L: int, twists: TwistConfig, zs) -> float:
    """T+_eps(z) = 2i sin((phi_1 - phi_2)/2) Q_1(z_1) Q_2(z_2), eps = (z_1-z_2)/2, z = (z_1+z_2)/2.

    ``zs`` is a list of (z_1, z_2) pairs.
    """
    sig = GradingSignature(1, 1)
    s = 2j * math.sin((twists[1] - twists[2]) / 2)
    if abs(s) < 1e-12:
        raise SingularTwistError("twists of labels 1 and 2 coincide", pair=(1, 2))
    worst = 0.0
    for z1, z2 in zs:
        z, eps = (z1 + z2) / 2, (z1 - z2) / 2
        lhs = _t_plus(L, twists, z, eps)
        rhs = s * q_operator(sig, (1,), L, twists, z1).matrix @ q_operator(sig, (2,), L, twists, z2).matrix
        worst = max(worst, float(np.abs(lhs - rhs).max()) / max(1.0, float(np.abs(rhs).max())))
    return worst


def verify_split_gl11(L: int, twists: TwistConfig, zs) -> float:
    """T+_0(z) = T_singlet(z + 1/2) - T_singlet(z - 1/2)."""
    sig = GradingSignature(1, 1)
    worst = 0.0
    for z in zs:
        lhs = _t_plus(L, twists, z, 0.0)
        tp = q_operator(sig, (1, 2), L, twists, z + 0.5).matrix
        tm = q_operator(sig, (1, 2), L, twists, z - 0.5).matrix
        worst = max(worst, float(np.abs(lhs - (tp - tm)).max()) / max(1.0, float(np.abs(tp).max())))
    return worst


# ---------------------------------------------------------------------------
# X+ factorization

def super_vandermonde(sig: GradingSignature, subset, twists: TwistConfig) -> complex:
    """Delta_I: same-parity sine products over mixed-parity sine products."""
    members = tuple(sorted(subset))
    bos = [a for a in members if sig.parity(a) == 0]
    fer = [a for a in members if sig.parity(a) == 1]
    f = lambda a, b: 2j * math.sin((twists[a] - twists[b]) / 2)
    num = 1.0 + 0j
    for grp in (bos, fer):
        for a, b in itertools.combinations(grp, 2):
            num *= f(a, b)
    den = 1.0 + 0j
    for a in bos:
        for b in fer:
            den *= f(a, b)
    if abs(num) < 1e-12 or abs(den) < 1e-12:
        raise SingularTwistError(f"super-Vandermonde factor of {members} is singular")
    return num / den


def rho_shifts(sig: GradingSignature, subset) -> list[float]:
    """rho_k = (sum_{j>k} (-1)^p(A_j) - sum_{j<k} (-1)^p(A_j)) / 2 along the sorted subset."""
    members = tuple(sorted(subset))
    s = [sig.sign(a) for a in members]
    return [0.5 * (sum(s[k + 1:]) - sum(s[:k])) for k in range(len(members))]


def verify_xqqq(sig: GradingSignature, subset, weights, L: int, twists: TwistConfig, zs,
                literal: bool = False) -> float:
    """Delta_I X+_I(z, Lambda) against prod_k Q_{A_k}(z - lambda'_k), lambda' = lambda + rho.

    The right side carries the sign (-1)^{|I|(|I|-1)/2}.  ``literal`` instead
    tests the form with shifts z + lambda' and no extra sign.
    """
    members = tuple(sorted(subset))
    if len(members) > 2:
        raise NotImplementedError("X+ factorization is verified for |I| <= 2 only")
    delta = super_vandermonde(sig, members, twists)
    lam = [w + r for w, r in zip(weights, rho_shifts(sig, members))]
    if literal:
        shifts, sign = lam, 1
    else:
        shifts = [-x for x in lam]
        sign = (-1) ** (len(members) * (len(members) - 1) // 2)
    worst = 0.0
    for z in np.atleast_1d(zs):
        lhs = delta * x_plus_operator(sig, members, weights, L, twists, z).matrix
        rhs = sign * np.eye(lhs.shape[0], dtype=complex)
        for a, sh in zip(members, shifts):
            rhs = rhs @ q_operator(sig, (a,), L, twists, z + sh).matrix
        worst = max(worst, float(np.abs(lhs - rhs).max()) / max(1.0, float(np.abs(rhs).max())))
    return worst
