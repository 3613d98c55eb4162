"""Monodromies, twisted supertraces and the resulting transfer operators.

A monodromy matrix element between quantum basis states c = (c_1..c_L) and
d = (d_1..d_L) is, up to a Koszul sign, the auxiliary product
L_{c_1 d_1} L_{c_2 d_2} ... L_{c_L d_L}.  Lax entries are linear in z, so the
product is expanded once as a polynomial in z with exact auxiliary-algebra
coefficients; tracing those coefficients gives the coefficient matrices of
X(z) / prefactor.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .graded import GradingSignature, QuantumSpace, TwistConfig
from .lax import AuxMatrix, LaxOperator, ModuleSpec, SubsetLabel, embedding_sign, lax_canonical
from .oscillators import OscElement, OscFamily, TraceWeight, family_trace

__all__ = [
    "monodromy",
    "monodromy_polynomial",
    "TransferFamily",
    "TransferOperator",
    "MatrixPolynomial",
    "q_operator",
    "t_operator",
    "x_plus_operator",
    "transfer_operator",
    "interpolate_polynomial",
    "prefactor",
    "sample_nodes",
]


# D = exp(TWIST_SIGN * i sum_A phi_A (E_AA + oscillator numbers)); this sign and
# the boundary phase of the Hamiltonian must match for [X(z), H] = 0.
TWIST_SIGN = -1


def prefactor(sig: GradingSignature, subset, twists: TwistConfig, z: complex) -> complex:
    """exp(i z sum_{A in I} (-1)^A phi_A)."""
    members = subset.members if isinstance(subset, SubsetLabel) else tuple(subset)
    return cmath.exp(1j * z * sum(sig.sign(a) * twists[a] for a in members))


def sample_nodes(count: int, radius: float = 1.37) -> np.ndarray:
    return radius * np.exp(2j * np.pi * np.arange(count) / count)


def monodromy(sig: GradingSignature, subset, mod: ModuleSpec | None, L: int, z: complex) -> AuxMatrix:
    """Ordered auxiliary product L^(1) L^(2) ... L^(L), each factor on its own site.

    This is the direct graded product on the full quantum space; it serves
    as the reference for :func:`monodromy_polynomial`.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    lax = lax_canonical(sig, subset, mod, z)
    space = QuantumSpace(sig, L)
    out = lax.on_site(space, 1)
    for k in range(2, L + 1):
        out = out @ lax.on_site(space, k)
    return out


# ---------------------------------------------------------------------------
# polynomial expansion

def _poly_mul(p, q, mul):
    out = [None] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a is None:
            continue
        for j, b in enumerate(q):
            if b is None:
                continue
            t = mul(a, b)
            out[i + j] = t if out[i + j] is None else out[i + j] + t
    return out


def _lax_poly(lax0: LaxOperator, lax1: LaxOperator):
    """Entries of L(z) as [c0, c1] with L(z) = c0 + z c1."""
    d = lax0.sig.dim
    table = {}
    for a in range(1, d + 1):
        for b in range(1, d + 1):
            c0 = lax0[a, b]
            c1 = lax1[a, b] - c0
            if isinstance(c0, OscElement):
                c0, c1 = (c0 if c0 else None), (c1 if c1 else None)
            else:
                c0 = c0 if np.any(c0) else None
                c1 = c1 if np.any(c1) else None
            if c0 is not None or c1 is not None:
                table[a, b] = [c0, c1]
    return table


def monodromy_polynomial(sig: GradingSignature, subset, mod: ModuleSpec | None, L: int):
    """All monodromy matrix elements as z-polynomials with auxiliary coefficients.

    Returns {(row_index, col_index): [coef_0, ..., coef_L]} over the quantum
    basis of QuantumSpace(sig, L); missing coefficients are None.  The Koszul
    sign of element (c, d) is (-1)^{sum_{j<k} (p(c_k)+p(d_k)) p(c_j)} times the
    embedding signs s(c_k, d_k).
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    lax0 = lax_canonical(sig, subset, mod, 0.0)
    lax1 = lax_canonical(sig, subset, mod, 1.0)
    table = _lax_poly(lax0, lax1)
    mul = (lambda a, b: a * b) if not lax0.module.is_matrix else (lambda a, b: a @ b)
    par = {a: sig.parity(a) for a in sig.labels}
    d = sig.dim
    out = {}

    def rec(k, ci, di, poly, sign, row_par):
        # row_par: parity of c_1..c_k; sign accumulated so far
        if k == L:
            out[ci, di] = [sign * c if c is not None else None for c in poly]
            return
        for (a, b), lp in table.items():
            pi = (par[a] + par[b]) % 2
            s = sign * embedding_sign(sig, a, b) * (-1 if pi * row_par else 1)
            new = lp if poly is None else _poly_mul(poly, lp, mul)
            if all(c is None for c in new):
                continue
            rec(k + 1, ci * d + a - 1, di * d + b - 1, new, s, (row_par + par[a]) % 2)

    rec(0, 0, 0, None, 1, 0)
    return out


# ---------------------------------------------------------------------------
# traced operators

@dataclass
class MatrixPolynomial:
    """sum_j z^j coeffs[j] with dense coefficient matrices."""

    coeffs: list

    @property
    def degree(self) -> int:
        for j in range(len(self.coeffs) - 1, -1, -1):
            if np.abs(self.coeffs[j]).max() > 0:
                return j
        return 0

    def __call__(self, z: complex) -> np.ndarray:
        out = np.zeros_like(self.coeffs[0])
        for c in reversed(self.coeffs):
            out = out * z + c
        return out


@dataclass
class TransferOperator:
    """An explicit transfer matrix X_I(z) on the quantum space."""

    sig: GradingSignature
    subset: SubsetLabel
    module: ModuleSpec
    L: int
    twists: TwistConfig
    z: complex
    matrix: np.ndarray
    prefactor_applied: bool = True

    @cached_property
    def space(self) -> QuantumSpace:
        return QuantumSpace(self.sig, self.L)

    def blocks(self) -> dict:
        """Occupation vector -> diagonal block."""
        return {occ: self.matrix[np.ix_(idx, idx)] for occ, idx in self.space.sectors.items()}

    def block_residual(self) -> float:
        return self.space.block_residual(self.matrix)

    def parity_residual(self) -> float:
        p = self.space.state_parity
        mask = p[:, None] != p[None, :]
        return float(np.abs(self.matrix[mask]).max()) if mask.any() else 0.0


class TransferFamily:
    """X_I(z) for fixed (sig, I, module, L, twists), at any z.

    The coefficient matrices of X(z) / prefactor are computed once from the
    polynomial monodromy by tracing each coefficient.
    """

    def __init__(self, sig: GradingSignature, subset, module: ModuleSpec | None, L: int,
                 twists: TwistConfig):
        twists.validate(sig)
        self.sig = sig
        self.subset = subset if isinstance(subset, SubsetLabel) else SubsetLabel.of(sig, subset)
        self.module = module or ModuleSpec.singlet(self.subset.members)
        self.L = L
        self.twists = twists
        self.space = QuantumSpace(sig, L)

    def _trace_function(self):
        sig, tw, mod = self.sig, self.twists, self.module
        if mod.is_matrix:
            D = mod.twist_matrix(tw, TWIST_SIGN)
            signs = 1 - 2 * np.array(mod.parities)

            def tr(x):
                return complex(np.sum(signs * np.diagonal(D @ x)))
            return tr
        weights = {}
        for a in self.subset:
            for b in self.subset.complement:
                f = OscFamily.for_labels(sig, a, b)
                weights[f] = cmath.exp(TWIST_SIGN * 1j * (tw[a] - tw[b]))
        mod_w, scale = mod.twist_data(tw, TWIST_SIGN)
        weights.update(mod_w)
        w = TraceWeight(weights, frozenset(mod_w))
        return lambda x: scale * family_trace(x, w)

    @cached_property
    def polynomial(self) -> MatrixPolynomial:
        """Coefficients of X(z) / prefactor(z)."""
        if self.L == 0:
            return MatrixPolynomial([np.ones((1, 1), complex)])
        tr = self._trace_function()
        elems = monodromy_polynomial(self.sig, self.subset, self.module, self.L)
        dim = self.space.dim
        coeffs = [np.zeros((dim, dim), complex) for _ in range(self.L + 1)]
        occ = self.space.occupations
        for (i, j), poly in elems.items():
            if not np.array_equal(occ[i], occ[j]):
                # charge conservation makes these traces vanish; verified in tests
                continue
            for k, c in enumerate(poly):
                if c is not None:
                    coeffs[k][i, j] = tr(c)
        return MatrixPolynomial(coeffs)

    def off_sector_traces(self) -> float:
        """Largest trace of a monodromy element connecting different sectors."""
        tr = self._trace_function()
        elems = monodromy_polynomial(self.sig, self.subset, self.module, self.L)
        occ = self.space.occupations
        worst = 0.0
        for (i, j), poly in elems.items():
            if not np.array_equal(occ[i], occ[j]):
                for c in poly:
                    if c is not None:
                        worst = max(worst, abs(tr(c)))
        return worst

    def prefactor(self, z: complex) -> complex:
        return prefactor(self.sig, self.subset, self.twists, z)

    def matrix(self, z: complex) -> np.ndarray:
        return self.prefactor(z) * self.polynomial(z)

    def __call__(self, z: complex) -> TransferOperator:
        return TransferOperator(self.sig, self.subset, self.module, self.L, self.twists, complex(z),
                                self.matrix(z))


_CACHE: dict = {}


def _family(sig, subset, module, L, twists) -> TransferFamily:
    subset = subset if isinstance(subset, SubsetLabel) else SubsetLabel.of(sig, subset)
    if module is None or module.kind == "singlet":
        key = (sig, subset.members, L, twists.phi)
        fam = _CACHE.get(key)
        if fam is None:
            fam = _CACHE[key] = TransferFamily(sig, subset, None, L, twists)
        return fam
    return TransferFamily(sig, subset, module, L, twists)


def transfer_operator(sig, subset, module, L, twists, z) -> TransferOperator:
    return _family(sig, subset, module, L, twists)(z)


def q_operator(sig: GradingSignature, subset, L: int, twists: TwistConfig, z: complex) -> TransferOperator:
    """Q_I(z): singlet gl(I) module, normalized oscillator traces, exponential prefactor."""
    return _family(sig, subset, None, L, twists)(z)


def t_operator(sig: GradingSignature, rep: ModuleSpec, L: int, twists: TwistConfig, z: complex) -> TransferOperator:
    """T(z) for a gl(n|m) module on the full index set (no oscillators)."""
    if rep.kind == "verma":
        raise ValueError("use x_plus_operator for highest-weight modules")
    full = SubsetLabel.full(sig)
    if rep.kind == "singlet":
        return q_operator(sig, full, L, twists, z)
    return TransferFamily(sig, full, rep, L, twists)(z)


def x_plus_operator(sig: GradingSignature, subset, weights, L: int, twists: TwistConfig,
                    z: complex) -> TransferOperator:
    """X+_I(z, Lambda) with the highest-weight gl(I) module, |I| <= 2."""
    subset = subset if isinstance(subset, SubsetLabel) else SubsetLabel.of(sig, subset)
    if len(subset) > 2:
        raise NotImplementedError("X+ operators are supported for |I| <= 2 only")
    mod = ModuleSpec.verma(sig, subset.members, weights)
    return TransferFamily(sig, subset, mod, L, twists)(z)


def interpolate_polynomial(samples, tol: float = 1e-9) -> MatrixPolynomial:
    """Fit X(z)/prefactor entrywise by a degree <= L polynomial.

    Needs at least L + 2 samples with a common (sig, I, L, twists); the
    first L + 1 determine the interpolant and every further sample must
    agree with it to ``tol`` (relative to the largest entry).
    """
    if not samples:
        raise ValueError("no samples")
    ops = [op for _, op in samples]
    ref = ops[0]
    for op in ops[1:]:
        if (op.sig, op.subset.members, op.L, op.twists.phi) != (ref.sig, ref.subset.members, ref.L, ref.twists.phi):
            raise ValueError("samples belong to different operators")
    L = ref.L
    if len(samples) < L + 2:
        raise ValueError(f"need at least {L + 2} samples, got {len(samples)}")
    zs = np.array([complex(z) for z, _ in samples])
    if len(set(np.round(zs, 12))) != len(zs):
        raise ValueError("sample points must be distinct")
    vals = np.array([op.matrix / prefactor(op.sig, op.subset, op.twists, z) if op.prefactor_applied else op.matrix
                     for z, op in samples])
    V = np.vander(zs[:L + 1], L + 1, increasing=True)
    flat = vals[:L + 1].reshape(L + 1, -1)
    coef = np.linalg.solve(V, flat)
    scale = max(1.0, float(np.abs(vals).max()))
    for z, v in zip(zs[L + 1:], vals[L + 1:]):
        pred = (np.vander([z], L + 1, increasing=True) @ coef).reshape(v.shape)
        dev = float(np.abs(pred - v).max()) / scale
        if dev > tol:
            raise AssertionError(f"extra sample deviates from the degree-{L} interpolant by {dev:.3e}")
    shape = vals.shape[1:]
    return MatrixPolynomial([coef[j].reshape(shape) for j in range(L + 1)])
