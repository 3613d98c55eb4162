"""Graded linear algebra on tensor powers of C^(n|m).

Basis labels are 1..n (bosonic) followed by n+1..n+m (fermionic).  Multi-site
basis states are ordered lexicographically by site, site 1 being the most
significant digit.  Operators acting on a single site are embedded with the
Koszul rule of the graded tensor product: moving an odd operator past an odd
basis vector costs a sign.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "GradingSignature",
    "TwistConfig",
    "QuantumSpace",
    "graded_permutation",
    "r_matrix",
    "graded_kron",
    "supertrace",
    "site_operator",
    "matrix_unit",
    "build_hamiltonian",
    "hamiltonian_permutation_form",
    "SingularTwistError",
]

GOLDEN = (1 + 5 ** 0.5) / 2


class SingularTwistError(ValueError):
    """Raised when coincident twist angles make a trace or prefactor singular."""

    def __init__(self, msg, pair=None):
        super().__init__(msg)
        self.pair = pair


@dataclass(frozen=True)
class GradingSignature:
    """The pair (n, m) fixing the graded space C^(n|m)."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 0 or self.m < 0 or self.n + self.m < 1:
            raise ValueError(f"invalid signature ({self.n}|{self.m})")

    @property
    def dim(self) -> int:
        return self.n + self.m

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(range(1, self.dim + 1))

    def parity(self, a: int) -> int:
        if not 1 <= a <= self.dim:
            raise ValueError(f"label {a} outside 1..{self.dim}")
        return 0 if a <= self.n else 1

    def sign(self, a: int) -> int:
        """(-1)^p(a)"""
        return -1 if a > self.n else 1

    @cached_property
    def parities(self) -> np.ndarray:
        """Parity of each basis label, indexed from 0."""
        return np.array([self.parity(a) for a in self.labels], dtype=np.int8)

    def __str__(self):
        return f"({self.n}|{self.m})"


@dataclass(frozen=True)
class TwistConfig:
    """Twist angles phi[A-1] for labels A = 1..n+m, in radians."""

    phi: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(float(p) for p in self.phi))

    @classmethod
    def generic(cls, sig: GradingSignature) -> "TwistConfig":
        """Pairwise distinct default angles A*golden*2pi/(n+m+1) mod 2pi."""
        k = sig.dim + 1
        return cls(tuple((a * GOLDEN * 2 * math.pi / k) % (2 * math.pi) for a in sig.labels))

    @classmethod
    def nonresonant(cls, sig: GradingSignature) -> "TwistConfig":
        """(A*golden + A^2*sqrt2)*2pi/(n+m+1) mod 2pi.

        The generic angles form an arithmetic progression mod 2pi, so
        phi_A - phi_B = phi_B - phi_C for consecutive labels; that resonance
        produces exactly singular Bethe roots at +-1/2 (e.g. gl(2|1), L = 2).
        The quadratic term breaks it.
        """
        k = sig.dim + 1
        return cls(tuple(((a * GOLDEN + a * a * math.sqrt(2)) * 2 * math.pi / k) % (2 * math.pi)
                         for a in sig.labels))

    @classmethod
    def zero(cls, sig: GradingSignature) -> "TwistConfig":
        return cls((0.0,) * sig.dim)

    def __getitem__(self, a: int) -> float:
        return self.phi[a - 1]

    def scaled(self, factor: float) -> "TwistConfig":
        return TwistConfig(tuple(factor * p for p in self.phi))

    def check_distinct(self, pairs=None, tol=1e-12):
        """Raise if any pair of angles coincides modulo 2pi."""
        labels = range(1, len(self.phi) + 1)
        if pairs is None:
            pairs = itertools.combinations(labels, 2)
        for a, b in pairs:
            if abs(math.sin((self[a] - self[b]) / 2)) < tol:
                raise SingularTwistError(
                    f"twist angles of labels {a} and {b} coincide mod 2pi", pair=(a, b))

    def validate(self, sig: GradingSignature):
        if len(self.phi) != sig.dim:
            raise ValueError(f"expected {sig.dim} twist angles, got {len(self.phi)}")


class QuantumSpace:
    """Basis bookkeeping for (C^(n|m))^(tensor L)."""

    def __init__(self, sig: GradingSignature, L: int):
        if L < 0:
            raise ValueError("L must be non-negative")
        self.sig = sig
        self.L = L
        self.d = sig.dim
        self.dim = self.d ** L

    @cached_property
    def states(self) -> np.ndarray:
        """(dim, L) array of labels (1-based)."""
        if self.L == 0:
            return np.zeros((1, 0), dtype=np.int64)
        grid = np.indices((self.d,) * self.L).reshape(self.L, -1).T
        return grid + 1

    @cached_property
    def state_parity(self) -> np.ndarray:
        par = self.sig.parities[self.states - 1] if self.L else np.zeros((1, 0), np.int8)
        return par.sum(axis=1) % 2

    @cached_property
    def occupations(self) -> np.ndarray:
        """(dim, n+m) array: number of sites carrying each label."""
        occ = np.zeros((self.dim, self.d), dtype=np.int64)
        for a in range(self.d):
            occ[:, a] = (self.states == a + 1).sum(axis=1)
        return occ

    @cached_property
    def sectors(self) -> dict[tuple[int, ...], np.ndarray]:
        """Occupation vector -> sorted basis indices, in lexicographic order of the vector."""
        out: dict[tuple[int, ...], list[int]] = {}
        for i, occ in enumerate(map(tuple, self.occupations)):
            out.setdefault(occ, []).append(i)
        return {k: np.array(out[k]) for k in sorted(out, reverse=True)}

    def index(self, labels) -> int:
        idx = 0
        for a in labels:
            idx = idx * self.d + (a - 1)
        return idx

    def block_residual(self, M: np.ndarray) -> float:
        """Largest entry of M connecting different occupation sectors."""
        occ = self.occupations
        same = (occ[:, None, :] == occ[None, :, :]).all(axis=2)
        off = np.abs(M[~same])
        return float(off.max()) if off.size else 0.0


def matrix_unit(d: int, a: int, b: int) -> np.ndarray:
    e = np.zeros((d, d), dtype=complex)
    e[a - 1, b - 1] = 1.0
    return e


def _factor_parities(parities: np.ndarray, k: int) -> np.ndarray:
    """Parity of each basis state of the k-fold tensor power."""
    if k == 0:
        return np.zeros(1, dtype=np.int8)
    grids = np.indices((len(parities),) * k).reshape(k, -1)
    return (parities[grids].sum(axis=0) % 2).astype(np.int8)


def graded_kron(X: np.ndarray, Y: np.ndarray, sig: GradingSignature) -> np.ndarray:
    """Koszul-signed tensor product of operators on tensor powers of C^(n|m).

    (X (x) Y)|b, d> = (-1)^{|Y_cd| p(b)} X_ab Y_cd |a, c>, i.e. Y passes the
    first factor's input state.  Entries of mixed parity are handled
    componentwise.
    """
    d = sig.dim
    kx = int(round(math.log(X.shape[0], d))) if X.shape[0] > 1 else 0
    ky = int(round(math.log(Y.shape[0], d))) if Y.shape[0] > 1 else 0
    px = _factor_parities(sig.parities, kx)
    py = _factor_parities(sig.parities, ky)
    ypar = (py[:, None] + py[None, :]) % 2
    out = np.kron(X, Y).astype(complex)
    # sign depends on the column state of X and the parity of the Y entry
    sign = np.where(np.multiply.outer(px, ypar) % 2 == 1, -1.0, 1.0)  # [b, c, e]
    nx, ny = len(px), len(py)
    sign_full = np.broadcast_to(sign[None, :, :, :], (nx, nx, ny, ny))
    sign_full = sign_full.transpose(0, 2, 1, 3).reshape(nx * ny, nx * ny)
    return out * sign_full


def graded_permutation(sig: GradingSignature) -> np.ndarray:
    """P = sum_{A,B} (-1)^{p(B)} e_AB (x) e_BA on two sites."""
    d = sig.dim
    P = np.zeros((d * d, d * d), dtype=complex)
    for a in sig.labels:
        for b in sig.labels:
            P += sig.sign(b) * graded_kron(matrix_unit(d, a, b), matrix_unit(d, b, a), sig)
    return P


def r_matrix(sig: GradingSignature, z: complex) -> np.ndarray:
    """Yang's rational R-matrix z + P."""
    return z * np.eye(sig.dim ** 2) + graded_permutation(sig)


def supertrace(X: np.ndarray, parities: np.ndarray) -> complex:
    """Str X = sum_s (-1)^{p(s)} X_ss for given basis-state parities."""
    signs = 1 - 2 * (np.asarray(parities) % 2)
    return complex(np.sum(signs * np.diagonal(X)))


def site_operator(x: np.ndarray, k: int, space: QuantumSpace, parity: int | None = None) -> np.ndarray:
    """Embed a homogeneous single-site operator x at site k (1-based).

    The operator picks up (-1)^{|x| * (parity of sites 1..k-1)}.
    """
    sig = space.sig
    if parity is None:
        nz = np.argwhere(np.abs(x) > 0)
        pars = {(int(sig.parities[i]) + int(sig.parities[j])) % 2 for i, j in nz}
        if len(pars) > 1:
            raise ValueError("site_operator needs a homogeneous operator")
        parity = pars.pop() if pars else 0
    left = QuantumSpace(sig, k - 1)
    right_dim = sig.dim ** (space.L - k)
    sign = np.where((left.state_parity * parity) % 2 == 1, -1.0, 1.0)
    return np.kron(np.kron(np.diag(sign), x), np.eye(right_dim))


def _unit_product(space: QuantumSpace, k: int, a: int, b: int, l: int, c: int, d: int) -> np.ndarray:
    sig = space.sig
    eab = site_operator(matrix_unit(sig.dim, a, b), k, space)
    ecd = site_operator(matrix_unit(sig.dim, c, d), l, space)
    return eab @ ecd


def build_hamiltonian(sig: GradingSignature, L: int, twists: TwistConfig | None = None) -> np.ndarray:
    """H = 2 sum_l (1 - sum_{AB} (-1)^{p(B)} e^(l)_AB e^(l+1)_BA), quasiperiodic.

    The identification e^(L+1)_AB = exp(-i(phi_A - phi_B)) e^(1)_AB closes the
    chain.  This direction of the flux is the one for which the transfer
    operators built with the boundary twist exp(-i sum phi E) commute with H.
    The result is checked against the permutation form.
    """
    if L < 2:
        raise ValueError("chain length L must be >= 2")
    twists = twists or TwistConfig.zero(sig)
    twists.validate(sig)
    space = QuantumSpace(sig, L)
    H = 2 * L * np.eye(space.dim, dtype=complex)
    for l in range(1, L + 1):
        for a in sig.labels:
            for b in sig.labels:
                if l < L:
                    term = _unit_product(space, l, a, b, l + 1, b, a)
                else:
                    phase = np.exp(1j * (twists[a] - twists[b]))
                    term = phase * _unit_product(space, L, a, b, 1, b, a)
                H -= 2 * sig.sign(b) * term
    H_perm = hamiltonian_permutation_form(sig, L, twists)
    dev = np.abs(H - H_perm).max()
    if dev > 1e-12:
        raise AssertionError(f"Hamiltonian forms disagree by {dev:.3e}")
    return H


def hamiltonian_permutation_form(sig: GradingSignature, L: int, twists: TwistConfig) -> np.ndarray:
    """H = 2 sum_l (1 - P_{l,l+1}) with a phase-corrected backward permutation.

    P_{l,l+1} swaps neighbouring labels with a sign iff both are fermionic.
    The closing bond L -> 1 moves the label c_L to site 1 and c_1 to site L;
    as a graded operator it also carries the parity string of the sites in
    between and the flux phase exp(i(phi_{c_L} - phi_{c_1})).
    """
    space = QuantumSpace(sig, L)
    P = np.zeros((space.dim, space.dim), dtype=complex)
    states = space.states
    par = sig.parities
    for i, s in enumerate(states):
        for l in range(L):
            t = s.copy()
            r = (l + 1) % L
            a, b = s[l], s[r]
            t[l], t[r] = b, a
            pa, pb = par[a - 1], par[b - 1]
            if r != 0:
                sgn = -1.0 if pa and pb else 1.0
                P[space.index(t), i] += sgn
            else:
                # backward permutation: label a (site L) -> site 1, b (site 1) -> site L
                mid = int(par[s[1:L - 1] - 1].sum()) if L > 2 else 0
                sgn = (-1) ** ((pa * pb) + (pa + pb) * mid)
                phase = np.exp(1j * (twists[b] - twists[a]))
                P[space.index(t), i] += sgn * phase
    return 2 * (L * np.eye(space.dim) - P)
