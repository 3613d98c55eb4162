"""Degenerate Lax operators L_I(z), graded Yang-Baxter checks and L-operator fusion.

Entries of a Lax operator live in an auxiliary algebra: superoscillators plus
a gl(I) module.  Modules are realized either by extra oscillator families
(singlet, one-chain highest-weight modules, the two-dimensional gl(1|1)
modules) so that entries stay :class:`OscElement` values, or, when I is the
full index set and no oscillators are present, by explicit matrices.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .graded import GradingSignature, QuantumSpace, TwistConfig, matrix_unit, r_matrix, site_operator
from .oscillators import OscElement, OscFamily

__all__ = [
    "SubsetLabel",
    "ModuleSpec",
    "LaxOperator",
    "AuxMatrix",
    "lax_canonical",
    "lax_full",
    "check_ybe",
    "embedding_sign",
    "check_gl_relations",
    "MODULE_TAG",
    "induced_module",
    "fusion_sides",
    "relabel",
    "conjugate_exp",
    "similarity_generator",
    "verify_factorization",
    "verify_gl11_fusion",
]

MODULE_TAG = "mod"


# ---------------------------------------------------------------------------
# index sets

@dataclass(frozen=True)
class SubsetLabel:
    """A subset I of 1..n+m, stored sorted."""

    sig: GradingSignature
    members: tuple[int, ...]

    def __post_init__(self):
        mem = tuple(sorted(set(self.members)))
        for a in mem:
            self.sig.parity(a)  # range check
        object.__setattr__(self, "members", mem)

    @classmethod
    def of(cls, sig: GradingSignature, members=()) -> "SubsetLabel":
        return cls(sig, tuple(members))

    @classmethod
    def full(cls, sig: GradingSignature) -> "SubsetLabel":
        return cls(sig, sig.labels)

    @property
    def complement(self) -> tuple[int, ...]:
        return tuple(a for a in self.sig.labels if a not in self.members)

    @property
    def bosonic(self) -> tuple[int, ...]:
        return tuple(a for a in self.members if self.sig.parity(a) == 0)

    @property
    def fermionic(self) -> tuple[int, ...]:
        return tuple(a for a in self.members if self.sig.parity(a) == 1)

    def __contains__(self, a):
        return a in self.members

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def union(self, other) -> "SubsetLabel":
        return SubsetLabel(self.sig, self.members + tuple(other))

    def families(self, tag: str = "") -> list[OscFamily]:
        return [OscFamily.for_labels(self.sig, a, b, tag) for a in self.members for b in self.complement]

    def name(self) -> str:
        return "{" + ",".join(map(str, self.members)) + "}"


# ---------------------------------------------------------------------------
# gl(I) modules

@dataclass(frozen=True)
class ModuleSpec:
    """A gl(I) module.

    ``kind`` is one of ``singlet``, ``fundamental``, ``verma``, ``explicit``.
    Oscillator-realized modules keep generators as OscElements in ``osc``;
    their diagonal generators must be constants plus multiples of number
    operators, which fixes how the boundary twist acts (see
    :meth:`twist_data`).  Matrix modules keep generators as arrays in
    ``matrices`` with basis parities ``parities``.
    """

    kind: str
    labels: tuple[int, ...] = ()
    osc: Mapping[tuple[int, int], OscElement] = field(default_factory=dict)
    matrices: Mapping[tuple[int, int], np.ndarray] = field(default_factory=dict)
    parities: tuple[int, ...] = ()
    weights: tuple[float, ...] = ()

    @property
    def is_matrix(self) -> bool:
        return bool(self.matrices)

    def generator(self, a: int, b: int):
        if self.kind == "singlet":
            return OscElement()
        if self.is_matrix:
            return self.matrices.get((a, b), np.zeros((len(self.parities),) * 2, complex))
        return self.osc.get((a, b), OscElement())

    @property
    def trace_families(self) -> frozenset:
        fams = set()
        for x in self.osc.values():
            fams |= x.families
        return frozenset(fams)

    def twist_data(self, twists: TwistConfig, sign: int = 1) -> tuple[dict, complex]:
        """Per-family weights and top-state factor of exp(sign i sum_A phi_A E_AA).

        Requires E_AA = c_A + sum_f k_Af N_f; then family f is weighted by
        exp(sign i sum_A phi_A k_Af) and the top state by exp(sign i sum_A phi_A c_A).
        """
        expo: dict = {}
        const = 0.0
        for a in self.labels:
            e = self.generator(a, a)
            for mono, c in e.terms.items():
                if not mono:
                    const += twists[a] * c
                elif len(mono) == 1 and mono[0][1:] == (1, 1):
                    f = mono[0][0]
                    expo[f] = expo.get(f, 0) + twists[a] * c
                else:
                    raise ValueError("diagonal generators must be linear in number operators")
        weights = {f: cmath.exp(sign * 1j * expo.get(f, 0.0)) for f in self.trace_families}
        return weights, cmath.exp(sign * 1j * const)

    def twist_matrix(self, twists: TwistConfig, sign: int = 1) -> np.ndarray:
        """exp(sign i sum_A phi_A E_AA) on a matrix module."""
        from scipy.linalg import expm
        gen = sum(twists[a] * self.generator(a, a) for a in self.labels)
        return expm(sign * 1j * gen)

    # constructors
    @classmethod
    def singlet(cls, labels=()) -> "ModuleSpec":
        return cls("singlet", tuple(labels))

    @classmethod
    def fundamental(cls, sig: GradingSignature) -> "ModuleSpec":
        d = sig.dim
        mats = {(a, b): matrix_unit(d, a, b) for a in sig.labels for b in sig.labels}
        return cls("fundamental", sig.labels, matrices=mats, parities=tuple(int(p) for p in sig.parities))

    @classmethod
    def explicit(cls, sig: GradingSignature, labels, generators: Mapping, parities=None,
                 tol=1e-12) -> "ModuleSpec":
        """A module given by a table of generators, checked against the gl(I) relations."""
        labels = tuple(sorted(labels))
        gens = dict(generators)
        sample = next(iter(gens.values()), None)
        if isinstance(sample, OscElement) or sample is None:
            mod = cls("explicit", labels, osc=gens)
        else:
            if parities is None:
                raise ValueError("matrix modules need basis parities")
            gens = {k: np.asarray(v, dtype=complex) for k, v in gens.items()}
            mod = cls("explicit", labels, matrices=gens, parities=tuple(int(p) for p in parities))
        res = check_gl_relations(sig, mod)
        if res > tol:
            raise ValueError(f"generator table violates the gl(I) relations (residual {res:.3e})")
        return mod

    @classmethod
    def verma(cls, sig: GradingSignature, labels, weights) -> "ModuleSpec":
        """Highest-weight module with E_AA |hws> = (-1)^p(A) lambda_A |hws>, |I| <= 2.

        |I| = 1 is one-dimensional.  For two labels the module is a single
        lowering chain built on an extra oscillator (bosonic for gl(2) and
        gl(0|2), fermionic for gl(1|1)); the trace weight of that oscillator
        comes out as exp(i(phi_A - phi_B)).
        """
        labels = tuple(sorted(labels))
        weights = tuple(float(w) for w in weights)
        if len(labels) != len(weights):
            raise ValueError("one weight per label required")
        if len(labels) > 2:
            raise NotImplementedError("highest-weight modules are supported for |I| <= 2 only")
        mu = {a: sig.sign(a) * w for a, w in zip(labels, weights)}
        if len(labels) == 1:
            (a,) = labels
            return cls("verma", labels, osc={(a, a): OscElement.scalar(mu[a])}, weights=weights)
        a, b = labels
        stat = (sig.parity(a) + sig.parity(b)) % 2
        fam = OscFamily(a, b, stat, MODULE_TAG)
        N = OscElement.number(fam)
        cr, an = OscElement.creator(fam), OscElement.annihilator(fam)
        if stat == 0:
            e_ab = (mu[a] - mu[b] - N) * an
        else:
            e_ab = (mu[a] + mu[b]) * an
        gens = {(a, a): mu[a] - N, (b, b): mu[b] + N, (a, b): e_ab, (b, a): cr}
        return cls("verma", labels, osc=gens, weights=weights)


def _supercommutator(x, y, px, py):
    if isinstance(x, OscElement):
        return x * y - (-1) ** (px * py) * (y * x)
    return x @ y - (-1) ** (px * py) * (y @ x)


def _size(x):
    if isinstance(x, OscElement):
        return x.max_abs()
    return float(np.abs(x).max()) if np.size(x) else 0.0


def check_gl_relations(sig: GradingSignature, mod: ModuleSpec) -> float:
    """Max residual of [E_AB, E_CD] = E_AD d_CB - (-1)^{(A+B)(C+D)} E_CB d_AD."""
    if mod.kind == "singlet":
        return 0.0
    p = sig.parity
    worst = 0.0
    labels = mod.labels
    for a, b, c, d in itertools.product(labels, repeat=4):
        pab, pcd = (p(a) + p(b)) % 2, (p(c) + p(d)) % 2
        lhs = _supercommutator(mod.generator(a, b), mod.generator(c, d), pab, pcd)
        rhs = (c == b) * mod.generator(a, d) - (a == d) * (-1) ** (pab * pcd) * mod.generator(c, b)
        worst = max(worst, _size(lhs - rhs))
    return worst


# ---------------------------------------------------------------------------
# operator-valued supermatrices

def _mul(x, y):
    if isinstance(x, OscElement) or isinstance(y, OscElement):
        return x * y
    return x @ y


class AuxMatrix:
    """Element of A (x) End(W) stored as a sparse table of A-valued entries.

    W is a tensor power of C^(n|m); ``parity`` gives the parity of each basis
    state of W.  The element is sum_cd X_cd (x) E_cd, and products obey the
    Koszul rule (X (x) E)(Y (x) F) = (-1)^{|E||Y|} XY (x) EF.  All elements
    handled here are even overall, so |X_cd| = p(c) + p(d).
    """

    def __init__(self, entries: dict, parity: np.ndarray):
        self.entries = {k: v for k, v in entries.items() if _nonzero(v)}
        self.parity = np.asarray(parity)

    @property
    def dim(self):
        return len(self.parity)

    def __matmul__(self, other: "AuxMatrix") -> "AuxMatrix":
        p = self.parity
        rows: dict[int, list] = {}
        for (e, d), y in other.entries.items():
            rows.setdefault(e, []).append((d, y))
        out: dict = {}
        for (c, e), x in self.entries.items():
            for d, y in rows.get(e, ()):
                sign = -1 if ((p[c] + p[e]) * (p[e] + p[d])) % 2 else 1
                term = _mul(x, y)
                key = (c, d)
                out[key] = out[key] + sign * term if key in out else sign * term
        return AuxMatrix(out, p)

    def __sub__(self, other: "AuxMatrix") -> "AuxMatrix":
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out[k] - v if k in out else -1 * v
        return AuxMatrix(out, self.parity)

    def max_abs(self) -> float:
        return max((_size(v) for v in self.entries.values()), default=0.0)

    @classmethod
    def scalar_matrix(cls, M: np.ndarray, parity, one) -> "AuxMatrix":
        """Embed a numeric operator on W with auxiliary part ``one``."""
        ents = {(int(i), int(j)): complex(M[i, j]) * one for i, j in np.argwhere(np.abs(M) > 0)}
        return cls(ents, parity)


def _nonzero(v) -> bool:
    if isinstance(v, OscElement):
        return bool(v)
    return bool(np.any(v != 0))


# ---------------------------------------------------------------------------
# Lax operators

def embedding_sign(sig: GradingSignature, a: int, b: int) -> int:
    """(-1)^{p(A)p(B) + p(B)}, the sign attached to L_AB (x) e_AB."""
    pa, pb = sig.parity(a), sig.parity(b)
    return -1 if (pa * pb + pb) % 2 else 1


@dataclass(frozen=True)
class LaxOperator:
    """L_I(z) as an (n+m) x (n+m) table of auxiliary-algebra entries."""

    sig: GradingSignature
    subset: SubsetLabel
    z: complex
    module: ModuleSpec
    entries: tuple  # entries[a-1][b-1]
    tag: str = ""

    def __getitem__(self, ab):
        a, b = ab
        return self.entries[a - 1][b - 1]

    @property
    def families(self) -> list[OscFamily]:
        return self.subset.families(self.tag)

    @property
    def one(self):
        if self.module.is_matrix:
            return np.eye(len(self.module.parities), dtype=complex)
        return OscElement.scalar(1)

    def on_site(self, space: QuantumSpace, k: int) -> AuxMatrix:
        """sum_AB s(A,B) L_AB (x) e^(k)_AB acting on site k of ``space``."""
        sig = self.sig
        ents: dict = {}
        for a in sig.labels:
            for b in sig.labels:
                val = self[a, b]
                if not _nonzero(val):
                    continue
                s = embedding_sign(sig, a, b)
                M = site_operator(matrix_unit(sig.dim, a, b), k, space)
                for i, j in np.argwhere(M != 0):
                    key = (int(i), int(j))
                    term = (s * M[i, j].real) * val
                    ents[key] = ents[key] + term if key in ents else term
        return AuxMatrix(ents, space.state_parity)


def _check_module(sig, subset, mod):
    if mod.kind == "singlet":
        return
    if tuple(mod.labels) != subset.members:
        raise ValueError(f"module defined on {mod.labels}, Lax subset is {subset.members}")
    if mod.is_matrix and subset.complement:
        raise ValueError("matrix modules are only supported when I is the full set")


def lax_canonical(sig: GradingSignature, subset, mod: ModuleSpec | None = None, z: complex = 0.0,
                  tag: str = "") -> LaxOperator:
    """The linear canonical Lax operator for the subset I.

    Undotted block z d_AB - (-1)^B (E_AB + H_AB), upper right xi+_{A Bdot},
    lower left -(-1)^B xi_{Adot B}, dotted block the identity.  Oscillator
    families for a copy of L are separated by ``tag``.
    """
    if not isinstance(subset, SubsetLabel):
        subset = SubsetLabel.of(sig, subset)
    mod = mod or ModuleSpec.singlet(subset.members)
    _check_module(sig, subset, mod)
    d = sig.dim
    comp = subset.complement
    fam = {(a, b): OscFamily.for_labels(sig, a, b, tag) for a in subset for b in comp}
    matrix_mod = mod.is_matrix
    one = np.eye(len(mod.parities), dtype=complex) if matrix_mod else OscElement.scalar(1)
    zero = np.zeros_like(one) if matrix_mod else OscElement()
    table = [[zero for _ in range(d)] for _ in range(d)]
    for a in sig.labels:
        for b in sig.labels:
            sb = sig.sign(b)
            if a in subset and b in subset:
                h = OscElement()
                for dd in comp:
                    h = h + OscElement.creator(fam[a, dd]) * OscElement.annihilator(fam[b, dd])
                    if a == b:
                        h = h + 0.5 * sig.sign(a) * sig.sign(dd)
                gen = mod.generator(a, b)
                if matrix_mod:
                    val = (z * (a == b)) * one - sb * gen  # no oscillators when I is full
                else:
                    val = OscElement.scalar(z * (a == b)) - sb * (gen + h)
            elif a in subset:
                val = OscElement.creator(fam[a, b])
            elif b in subset:
                val = -sb * OscElement.annihilator(fam[b, a])
            else:
                val = one * (a == b) if matrix_mod else OscElement.scalar(1.0 * (a == b))
            table[a - 1][b - 1] = val
    return LaxOperator(sig, subset, complex(z), mod, tuple(tuple(r) for r in table), tag)


def lax_full(sig: GradingSignature, rep: ModuleSpec, z: complex) -> LaxOperator:
    """Lax operator of the full index set: z d_AB - (-1)^B E_AB in the module ``rep``."""
    if rep.kind not in ("fundamental", "explicit", "singlet"):
        raise ValueError("lax_full needs a fundamental, explicit or singlet module")
    return lax_canonical(sig, SubsetLabel.full(sig), rep, z)


def _perturbed(lax: LaxOperator, a: int, b: int, delta: complex) -> LaxOperator:
    rows = [list(r) for r in lax.entries]
    rows[a - 1][b - 1] = rows[a - 1][b - 1] + delta * lax.one
    return LaxOperator(lax.sig, lax.subset, lax.z, lax.module, tuple(tuple(r) for r in rows), lax.tag)


def check_ybe(sig: GradingSignature, subset, mod: ModuleSpec | None = None, z1: complex = 0.3,
              z2: complex = -0.8, perturb: tuple | None = None) -> float:
    """Residual of R(z1-z2) L(z1) L(z2) - L(z2) L(z1) R(z1-z2) on V (x) C^(n|m) (x) C^(n|m).

    L(z1) acts on the first and L(z2) on the second quantum factor; both share
    the auxiliary algebra.  The comparison is exact in canonical form; the
    return value is the largest coefficient of the difference.  ``perturb``
    = (A, B, delta) adds delta to one entry of both Lax operators (detector
    sanity checks).
    """
    l1 = lax_canonical(sig, subset, mod, z1)
    l2 = lax_canonical(sig, subset, mod, z2)
    if perturb is not None:
        l1 = _perturbed(l1, *perturb)
        l2 = _perturbed(l2, *perturb)
    space = QuantumSpace(sig, 2)
    L1 = l1.on_site(space, 1)
    L2 = l2.on_site(space, 2)
    R = AuxMatrix.scalar_matrix(r_matrix(sig, z1 - z2), space.state_parity, l1.one)
    return (R @ L1 @ L2 - L2 @ L1 @ R).max_abs()


# ---------------------------------------------------------------------------
# fusion of non-intersecting Lax operators

def _disjoint(sig, I, J):
    I = I if isinstance(I, SubsetLabel) else SubsetLabel.of(sig, I)
    J = J if isinstance(J, SubsetLabel) else SubsetLabel.of(sig, J)
    if set(I) & set(J):
        raise ValueError(f"subsets {I.name()} and {J.name()} intersect")
    return I, J


def induced_module(sig: GradingSignature, I, J, lam: float = 0.0, tag: str = "1") -> ModuleSpec:
    """gl(I u J) generators carried by the product L_I L_J (both singlet).

    They are built from the oscillators of the first factor that pair I with J
    (family tag ``tag``) plus the constant ``lam`` on the J block.
    """
    I, J = _disjoint(sig, I, J)
    p, sg = sig.parity, sig.sign

    def cr(a, b):  # xi+_{ab}, a in I
        return OscElement.creator(OscFamily.for_labels(sig, a, b, tag))

    def an(a, b):  # xi_{ab}, b in I
        return OscElement.annihilator(OscFamily.for_labels(sig, b, a, tag))

    gens = {}
    union = I.union(J).members
    for x in union:
        for y in union:
            if x in I and y in I:
                v = OscElement()
                for c in J:
                    v = v + cr(x, c) * an(c, y)
            elif x in I:
                v = sg(y) * lam * cr(x, y)
                for d in J:
                    for c in I:
                        s = -1 if ((p(y) + p(d)) * (p(y) + p(c))) % 2 else 1
                        v = v - s * cr(x, d) * cr(c, y) * an(d, c)
            elif y in I:
                v = an(x, y)
            else:
                v = OscElement.scalar(lam * sg(y) * (x == y))
                for c in I:
                    s = -1 if ((p(x) + p(y)) * (p(y) + p(c))) % 2 else 1
                    v = v - s * cr(c, y) * an(x, c)
            gens[x, y] = v
    return ModuleSpec("explicit", union, osc=gens)


def _exp_nilpotent(X, sign: float):
    """exp(sign X) for a strictly occupation-raising sparse matrix."""
    import scipy.sparse as sp
    out = sp.identity(X.shape[0], dtype=complex, format="csr")
    term = out
    for k in range(1, X.shape[0] + 1):
        term = (term @ X) * (sign / k)
        term.eliminate_zeros()
        if term.nnz == 0:
            break
        out = out + term
    return out


def relabel(x: OscElement, mapping: Mapping[OscFamily, OscFamily]) -> OscElement:
    """Substitute oscillator families; signs follow from re-multiplying the blocks."""
    out = OscElement()
    for mono, c in x.terms.items():
        term = OscElement.scalar(c)
        for f, r, s in mono:
            g = mapping.get(f, f)
            for _ in range(r):
                term = term * OscElement.creator(g)
            for _ in range(s):
                term = term * OscElement.annihilator(g)
        out = out + term
    return out


def conjugate_exp(X: OscElement, Y: OscElement, max_order: int = 64) -> OscElement:
    """e^X Y e^-X for even X via the adjoint series, which must terminate."""
    out, term = Y, Y
    for k in range(1, max_order + 1):
        term = (X * term - term * X) * (1.0 / k)
        if not term:
            return out
        out = out + term
    raise RuntimeError("adjoint series did not terminate")


def similarity_generator(sig: GradingSignature, I, J) -> OscElement:
    """X with S = e^X, built from creators of copy 1 and copy 2 (tags "1", "2")."""
    I, J = _disjoint(sig, I, J)
    comp = I.union(J).complement
    X = OscElement()
    for a in I:
        for b in J:
            x1 = OscElement.creator(OscFamily.for_labels(sig, a, b, "1"))
            X = X + sig.sign(a) * x1 * OscElement.creator(OscFamily.for_labels(sig, b, a, "2"))
            for c in comp:
                X = X + (x1 * OscElement.creator(OscFamily.for_labels(sig, b, c, "2"))
                         * OscElement.annihilator(OscFamily.for_labels(sig, a, c, "1")))
    return X


def fusion_sides(sig: GradingSignature, I, J, z: complex, lam: float = 0.0):
    """Both sides of the fusion identity as tables of oscillator elements.

    Left: L_I(z + s_J/2) L_J(z - lam - s_I/2) with s_K = sum_{D in K} (-1)^D,
    copies tagged "1" and "2".  Right: S L_{I u J}(z) G S^-1 where the fused
    operator carries the induced generators and reuses the oscillators of
    copy 1 (rows in I) and copy 2 (rows in J) that point out of I u J.
    Returns (lhs, rhs, X) with S = e^X.
    """
    I, J = _disjoint(sig, I, J)
    sg = sig.sign
    union = I.union(J)
    l1 = lax_canonical(sig, I, None, z + 0.5 * sum(sg(d) for d in J), tag="1")
    l2 = lax_canonical(sig, J, None, z - lam - 0.5 * sum(sg(d) for d in I), tag="2")
    lu = lax_canonical(sig, union, induced_module(sig, I, J, lam, "1"), z, tag="u")
    rename = {OscFamily.for_labels(sig, a, c, "u"): OscFamily.for_labels(sig, a, c, "1" if a in I else "2")
              for a in union for c in union.complement}
    X = similarity_generator(sig, I, J)
    labels = sig.labels

    def g(a, b):
        return l2[a, b] if (a in I and b in J) else OscElement.scalar(1.0 * (a == b))

    lhs, rhs = {}, {}
    for a in labels:
        for b in labels:
            lhs[a, b] = sum((l1[a, c] * l2[c, b] for c in labels), OscElement())
            mid = sum((relabel(lu[a, c], rename) * g(c, b) for c in labels), OscElement())
            rhs[a, b] = conjugate_exp(X, mid)
    return lhs, rhs, X


def verify_factorization(sig: GradingSignature, I, J, z: complex, window_cutoff: int = 24,
                         lam: float = 0.0, method: str = "adjoint") -> float:
    """Max deviation between the two sides of the fusion identity on a Fock window.

    Oscillators live on the joint Fock space truncated at total occupation
    ``window_cutoff``.  Only matrix elements between states of occupation
    <= cutoff - 2 are compared: every entry lowers the occupation by at most
    two, so these elements cannot feel the truncation.  With purely fermionic
    oscillators the whole finite space is compared.

    ``method="adjoint"`` conjugates by S in the oscillator algebra before
    representing; ``method="matrix"`` represents S and S^-1 as truncated
    matrix exponentials, which is literal but loses digits to the binomial
    growth of S at large cutoffs.
    """
    from .oscillators import fock_operators, to_matrix

    I, J = _disjoint(sig, I, J)
    fams = I.families("1") + J.families("2")
    fermionic = all(f.statistics for f in fams)
    cutoff = max(window_cutoff, len(fams)) if fermionic else window_cutoff
    lhs, rhs, X = fusion_sides(sig, I, J, z, lam)
    basis, ops = fock_operators(fams, cutoff)
    dim = len(basis)
    occ = np.array([sum(b) for b in basis])
    keep = np.arange(dim) if fermionic else np.flatnonzero(occ <= cutoff - 2)
    if method == "matrix":
        Xm = to_matrix(X, ops, dim)
        S, S_inv = _exp_nilpotent(Xm, 1.0), _exp_nilpotent(Xm, -1.0)
        lu_side = {}
        for key, val in rhs.items():
            lu_side[key] = S @ to_matrix(conjugate_exp(-1 * X, val), ops, dim) @ S_inv
    elif method == "adjoint":
        lu_side = {key: to_matrix(val, ops, dim) for key, val in rhs.items()}
    else:
        raise ValueError(f"unknown method {method!r}")
    worst = 0.0
    for key in lhs:
        diff = (to_matrix(lhs[key], ops, dim) - lu_side[key]).toarray()[np.ix_(keep, keep)]
        if diff.size:
            worst = max(worst, float(np.abs(diff).max()))
    return worst


def verify_gl11_fusion(z1: complex, z2: complex) -> float:
    """The explicit gl(1|1) fusion identity with two fermions c1, c2 on C^4.

    (z1 - h1, c1+; -c1, 1)(1, c2; c2+, z2 + h2)
      = e^{c1+ c2+} (z + e - h1, -2 e c1+; -c1, z - e - h1)(1, c2; 0, 1) e^{-c1+ c2+}
    with e = (z1 - z2)/2, z = (z1 + z2)/2, h_i = c_i+ c_i - 1/2.
    """
    a = np.array([[0, 1], [0, 0]], dtype=complex)
    jw = np.diag([1.0, -1.0]).astype(complex)
    i2 = np.eye(2, dtype=complex)
    c1, c2 = np.kron(a, i2), np.kron(jw, a)
    c1d, c2d = c1.conj().T, c2.conj().T
    one = np.eye(4, dtype=complex)
    h1, h2 = c1d @ c1 - 0.5 * one, c2d @ c2 - 0.5 * one
    eps, zc = (z1 - z2) / 2, (z1 + z2) / 2

    def mul(X, Y):
        return [[X[i][0] @ Y[0][j] + X[i][1] @ Y[1][j] for j in range(2)] for i in range(2)]

    lhs = mul([[z1 * one - h1, c1d], [-c1, one]], [[one, c2], [c2d, z2 * one + h2]])
    S = one + c1d @ c2d
    S_inv = one - c1d @ c2d
    core = mul([[(zc + eps) * one - h1, -2 * eps * c1d], [-c1, (zc - eps) * one - h1]],
               [[one, c2], [0 * one, one]])
    rhs = [[S @ core[i][j] @ S_inv for j in range(2)] for i in range(2)]
    return max(float(np.abs(lhs[i][j] - rhs[i][j]).max()) for i in range(2) for j in range(2))
