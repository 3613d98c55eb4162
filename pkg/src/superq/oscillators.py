"""Superoscillator algebra and twist-weighted supertraces.

An element is a finite sum of normal-ordered monomials.  Within a family the
creators stand to the left of the annihilators; families appear in their
sort order.  Bosonic families satisfy [a, a+] = 1, fermionic ones
{c, c+} = 1, and different families supercommute.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache
from dataclasses import dataclass, field
from math import comb, factorial
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

__all__ = [
    "OscFamily",
    "OscElement",
    "TraceWeight",
    "osc_mul",
    "family_trace",
    "abel_oracle",
    "verma_chain_trace",
    "geometric_moment",
    "fock_operators",
    "to_matrix",
    "ExponentCapError",
    "OracleError",
    "MAX_BOSONIC_EXPONENT",
    "random_trace_corpus",
]

MAX_BOSONIC_EXPONENT = 64


class ExponentCapError(RuntimeError):
    pass


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class OscFamily:
    """One pair (xi, xi+) labelled by a row superindex and a column superindex.

    ``statistics`` is 0 for a bosonic pair and 1 for a fermionic pair.  ``tag``
    separates otherwise identical labels, e.g. two copies of a Lax operator or
    the oscillator realizing a highest-weight module.
    """

    row: int
    col: int
    statistics: int
    tag: str = ""

    def __post_init__(self):
        if self.statistics not in (0, 1):
            raise ValueError("statistics must be 0 or 1")

    @classmethod
    def for_labels(cls, sig, a: int, b: int, tag: str = "") -> "OscFamily":
        return cls(a, b, (sig.parity(a) + sig.parity(b)) % 2, tag)

    def __str__(self):
        t = f"{self.tag}:" if self.tag else ""
        return f"{t}{self.row}{self.col}{'f' if self.statistics else 'b'}"


# a monomial is a tuple of (family, r, s) with r creators left of s annihilators
Monomial = tuple


def _block_parity(fam: OscFamily, r: int, s: int) -> int:
    return fam.statistics * ((r + s) & 1)


def monomial_parity(mono: Monomial) -> int:
    return sum(_block_parity(f, r, s) for f, r, s in mono) & 1


def _reorder_family(fam: OscFamily, s1: int, r2: int) -> list[tuple[int, int, int]]:
    """xi^s1 (xi+)^r2 as a sum of c * (xi+)^r xi^s; returns (c, r, s)."""
    if fam.statistics == 0:
        return [(comb(s1, k) * comb(r2, k) * factorial(k), r2 - k, s1 - k)
                for k in range(min(s1, r2) + 1)]
    if s1 == 1 and r2 == 1:
        return [(1, 0, 0), (-1, 1, 1)]
    return [(1, r2, s1)]


def _mul_block(mono: Monomial, fam: OscFamily, r2: int, s2: int) -> list[tuple[complex, Monomial]]:
    """Multiply a canonical monomial on the right by one family block."""
    bpar = _block_parity(fam, r2, s2)
    sign = 1
    pos = len(mono)
    # move the block left past every block of a later family
    while pos > 0 and mono[pos - 1][0] > fam:
        f, r, s = mono[pos - 1]
        if bpar and _block_parity(f, r, s):
            sign = -sign
        pos -= 1
    if pos > 0 and mono[pos - 1][0] == fam:
        _, r1, s1 = mono[pos - 1]
        head, tail = mono[:pos - 1], mono[pos:]
        out = []
        for c, r, s in _reorder_family(fam, s1, r2):
            rt, st = r1 + r, s + s2
            if fam.statistics and (rt > 1 or st > 1):
                continue
            if fam.statistics == 0 and max(rt, st) > MAX_BOSONIC_EXPONENT:
                raise ExponentCapError(f"bosonic exponent {max(rt, st)} exceeds cap in family {fam}")
            blk = ((fam, rt, st),) if rt or st else ()
            out.append((sign * c, head + blk + tail))
        return out
    if fam.statistics and (r2 > 1 or s2 > 1):
        return []
    return [(sign, mono[:pos] + ((fam, r2, s2),) + mono[pos:])]


class OscElement:
    """Immutable canonical sum of normal-ordered superoscillator monomials."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, complex] | None = None, tol: float = 0.0):
        clean = {}
        for mono, c in (terms or {}).items():
            c = complex(c)
            if abs(c) > tol:
                clean[mono] = c
        self.terms = clean
        self._hash = None

    # constructors
    @classmethod
    def scalar(cls, c: complex) -> "OscElement":
        return cls({(): c})

    @classmethod
    def creator(cls, fam: OscFamily) -> "OscElement":
        return cls({((fam, 1, 0),): 1})

    @classmethod
    def annihilator(cls, fam: OscFamily) -> "OscElement":
        return cls({((fam, 0, 1),): 1})

    @classmethod
    def number(cls, fam: OscFamily) -> "OscElement":
        return cls({((fam, 1, 1),): 1})

    @classmethod
    def from_terms(cls, pairs: Iterable[tuple[complex, Monomial]]) -> "OscElement":
        acc: dict = {}
        for c, mono in pairs:
            acc[mono] = acc.get(mono, 0) + c
        return cls(acc)

    # algebra
    def __add__(self, other):
        if not isinstance(other, OscElement):
            other = OscElement.scalar(other)
        acc = dict(self.terms)
        for mono, c in other.terms.items():
            acc[mono] = acc.get(mono, 0) + c
        return OscElement(acc)

    __radd__ = __add__

    def __neg__(self):
        return OscElement({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, OscElement) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, OscElement):
            return osc_mul(self, other)
        return OscElement({k: v * other for k, v in self.terms.items()})

    def __rmul__(self, other):
        return OscElement({k: other * v for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, OscElement):
            other = OscElement.scalar(other)
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "OscElement(0)"
        parts = []
        for mono, c in sorted(self.terms.items(), key=lambda kv: repr(kv[0])):
            word = " ".join(f"{f}+^{r}" * bool(r) + (" " if r and s else "") + f"{f}^{s}" * bool(s)
                            for f, r, s in mono)
            parts.append(f"({c:.6g}){(' ' + word) if word else ''}")
        return "OscElement(" + " + ".join(parts) + ")"

    # structure
    @property
    def families(self) -> set[OscFamily]:
        return {f for mono in self.terms for f, _, _ in mono}

    def parity(self) -> int:
        """Superalgebra parity; raises for inhomogeneous elements."""
        pars = {monomial_parity(m) for m in self.terms}
        if len(pars) > 1:
            raise ValueError("element is not homogeneous")
        return pars.pop() if pars else 0

    def degree(self) -> int:
        return max((sum(r + s for _, r, s in m) for m in self.terms), default=0)

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def scalar_part(self) -> complex:
        return self.terms.get((), 0j)

    def chop(self, tol: float) -> "OscElement":
        return OscElement(self.terms, tol=tol)


def osc_mul(a: OscElement, b: OscElement) -> OscElement:
    """Product of two elements, rewritten into canonical normal order."""
    acc: dict = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            partial = [(c1 * c2, m1)]
            for fam, r, s in m2:
                nxt = []
                for c, mono in partial:
                    for c3, mono3 in _mul_block(mono, fam, r, s):
                        nxt.append((c * c3, mono3))
                partial = nxt
            for c, mono in partial:
                acc[mono] = acc.get(mono, 0) + c
    return OscElement(acc)


@dataclass(frozen=True)
class TraceWeight:
    """Per-family weights q for Str(q^N x).

    Families listed in ``unnormalized`` (module oscillators) are traced
    without dividing by Str(q^N).
    """

    q: Mapping[OscFamily, complex]
    unnormalized: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        for f, q in self.q.items():
            if abs(abs(q) - 1) > 1e-9:
                raise ValueError(f"weight of {f} is off the unit circle")

    @classmethod
    def from_angles(cls, angles: Mapping[OscFamily, float], unnormalized=()) -> "TraceWeight":
        return cls({f: cmath.exp(1j * a) for f, a in angles.items()}, frozenset(unnormalized))


def _check_weight(fam: OscFamily, q: complex, tol=1e-12):
    if abs(1 - q) < tol:
        from .graded import SingularTwistError
        raise SingularTwistError(f"trace weight q = 1 for family {fam}", pair=(fam.row, fam.col))


def stirling2(j: int, i: int) -> int:
    return sum((-1) ** (i - k) * comb(i, k) * k ** j for k in range(i + 1)) // factorial(i)


def geometric_moment(q: complex, j: int) -> complex:
    """Sum_{k>=0} k^j q^k (Abel-regularized for |q| = 1, q != 1)."""
    return sum(stirling2(j, i) * factorial(i) * q ** i / (1 - q) ** (i + 1)
               for i in range(j + 1)) if j else 1 / (1 - q)


def verma_chain_trace(kind: str, q: complex, poly: Iterable[complex], scale: complex = 1.0) -> complex:
    """Unnormalized trace over a single lowering chain of weight vectors.

    ``poly[j]`` is the coefficient of k^j, where k counts lowering steps from
    the highest-weight vector and q^k is the twist weight at step k.  For
    ``"gl2"`` the chain is infinite (a Verma module of gl(2)); for ``"gl11"``
    it has two states, the second one odd, and a supertrace is taken.
    ``scale`` multiplies the result (the weight of the top state).
    """
    poly = list(poly)
    if kind == "gl2":
        if abs(abs(q) - 1) > 1e-9:
            raise ValueError("gl(2) chain trace needs |q| = 1")
        _check_weight(OscFamily(0, 0, 0, "verma"), q)
        return scale * sum(c * geometric_moment(q, j) for j, c in enumerate(poly))
    if kind == "gl11":
        total = poly[0] if poly else 0
        total -= q * sum(poly)
        return scale * total
    raise ValueError(f"unknown module kind {kind!r}")


def _family_factor(fam: OscFamily, r: int, q: complex, normalized: bool) -> complex:
    if fam.statistics == 0:
        if normalized:
            return factorial(r) * (q / (1 - q)) ** r
        # falling factorial k(k-1)..(k-r+1) expanded in powers of k
        coeffs = np.zeros(r + 1, dtype=complex)
        coeffs[0] = 1
        for t in range(r):
            coeffs = np.concatenate([[0], coeffs[:-1]]) - t * coeffs
        return verma_chain_trace("gl2", q, coeffs)
    if normalized:
        return 1.0 if r == 0 else -q / (1 - q)
    return verma_chain_trace("gl11", q, [0, 1] if r else [1])


def family_trace(x: OscElement, w: TraceWeight) -> complex:
    """Closed-form normalized supertrace Str(q^N x) / Str(q^N), family by family."""
    for f in x.families | set(w.unnormalized):
        if f not in w.q:
            raise KeyError(f"no weight for family {f}")
        _check_weight(f, w.q[f])
    # an unnormalized family absent from a monomial still contributes Str(q^N)
    empty = {f: _family_factor(f, 0, w.q[f], normalized=False) for f in w.unnormalized}
    total = 0j
    for mono, c in x.terms.items():
        val = c
        present = set()
        for f, r, s in mono:
            if r != s:
                val = 0
                break
            present.add(f)
            val *= _family_factor(f, r, w.q[f], f not in w.unnormalized)
        else:
            for f, e in empty.items():
                if f not in present:
                    val *= e
        total += val
    return complex(total)


# ---------------------------------------------------------------------------
# explicit Fock-space matrices (test oracles and windowed checks)

def fock_operators(families: Iterable[OscFamily], cutoff: int):
    """Sparse creator/annihilator matrices on a joint Fock space.

    Basis: occupation tuples with total occupation <= cutoff (fermions 0/1).
    Fermionic operators carry Jordan-Wigner strings over earlier fermionic
    families in sort order.  Returns (basis list, {family: (create, annihilate)}).
    Products that only raise the total occupation are exact on the retained
    basis.
    """
    fams = sorted(families)
    basis = []

    def rec(i, left, occ):
        if i == len(fams):
            basis.append(tuple(occ))
            return
        top = 1 if fams[i].statistics else left
        for k in range(min(top, left) + 1):
            rec(i + 1, left - k, occ + [k])

    rec(0, cutoff, [])
    index = {b: i for i, b in enumerate(basis)}
    dim = len(basis)
    ops = {}
    for i, f in enumerate(fams):
        rows, cols, vals = [], [], []
        for j, b in enumerate(basis):
            k = b[i]
            if f.statistics and k == 1:
                continue
            nb = list(b)
            nb[i] = k + 1
            nb = tuple(nb)
            if nb not in index:
                continue
            amp = math.sqrt(k + 1) if f.statistics == 0 else 1.0
            if f.statistics:
                string = sum(b[t] for t in range(i) if fams[t].statistics)
                amp *= (-1) ** string
            rows.append(index[nb])
            cols.append(j)
            vals.append(amp)
        cr = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=complex)
        ops[f] = (cr, cr.T.conj().tocsr())
    return basis, ops


def to_matrix(x: OscElement, ops, dim: int):
    """Represent an element on a Fock space built by :func:`fock_operators`."""
    out = sp.csr_matrix((dim, dim), dtype=complex)
    eye = sp.identity(dim, dtype=complex, format="csr")
    for mono, c in x.terms.items():
        m = eye
        for f, r, s in mono:
            cr, an = ops[f]
            for _ in range(r):
                m = m @ cr
            for _ in range(s):
                m = m @ an
        out = out + c * m
    return out


@lru_cache(maxsize=256)
def _fock_diagonal(statistics: int, r: int, s: int, cutoff: int) -> np.ndarray:
    """<k|(xi+)^r xi^s|k> from explicit Fock matrices."""
    fam = OscFamily(0, 0, statistics)
    size = 2 if statistics else cutoff + 1
    _, ops = fock_operators([fam], size - 1)
    cr, an = ops[fam]
    m = sp.identity(size, dtype=complex, format="csr")
    for _ in range(r):
        m = m @ cr
    for _ in range(s):
        m = m @ an
    return m.diagonal()


def _damped_family_sums(fam: OscFamily, r: int, s: int, q: complex, eps: float, cutoff: int):
    """Damped Sum_k (+-q e^-eps)^k <k|(xi+)^r xi^s|k> and the same without x."""
    diag = _fock_diagonal(fam.statistics, r, s, cutoff)
    # extended precision keeps the phase k*arg(q) accurate at large k
    k = np.arange(len(diag), dtype=np.longdouble)
    phase = np.longdouble(cmath.phase(q)) * k
    decay = np.exp(-np.longdouble(eps) * k + np.longdouble(math.log(abs(q))) * k)
    sgn = (-1.0) ** k if fam.statistics else np.ones_like(k)
    wr, wi = sgn * decay * np.cos(phase), sgn * decay * np.sin(phase)
    dr, di = diag.real.astype(np.longdouble), diag.imag.astype(np.longdouble)
    num = complex(np.sum(wr * dr - wi * di), np.sum(wr * di + wi * dr))
    den = complex(np.sum(wr), np.sum(wi))
    return num, den


def _neville_at_zero(xs, ys):
    p = list(ys)
    n = len(xs)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (-xs[i + k] * p[i] + xs[i] * p[i + 1]) / (xs[i] - xs[i + k])
    return p[0]


def abel_oracle(x: OscElement, w: TraceWeight, cutoff: int = 20000, damping: float = 0.3,
                levels: int = 10, ratio: float = 1.5, tol: float = 1e-6) -> complex:
    """Normalized supertrace by explicit damped summation, extrapolated to zero damping.

    Each bosonic family is represented on a truncated Fock space and summed
    with weight (q e^-eps)^k at eps = damping / ratio^j, j < levels.  The
    results are extrapolated to eps = 0 by polynomial (Neville) interpolation.
    Fermionic families need no damping.  Raises OracleError when dropping
    the coarsest node moves the extrapolant by more than ``tol`` relative
    to max(1, |value|).

    For small cutoffs use a larger damping, e.g. cutoff=400 with
    damping=1.0, ratio=1.4, levels=8.
    """
    if levels < 3:
        raise ValueError("need at least three damping levels")
    eps_nodes = [damping / ratio ** j for j in range(levels)]
    if eps_nodes[-1] * cutoff < 30:
        raise ValueError("cutoff too small: truncated tail exp(-eps*cutoff) is not negligible")
    for mono in x.terms:
        for f, r, s in mono:
            if f not in w.q:
                raise KeyError(f"no weight for family {f}")
            _check_weight(f, w.q[f])

    def evaluate(eps):
        total = 0j
        for mono, c in x.terms.items():
            val = c
            seen = set()
            for f, r, s in mono:
                e = 0.0 if f.statistics else eps
                num, den = _damped_family_sums(f, r, s, w.q[f], e, cutoff)
                val *= num if f in w.unnormalized else num / den
                seen.add(f)
            for f in w.unnormalized - seen:
                e = 0.0 if f.statistics else eps
                val *= _damped_family_sums(f, 0, 0, w.q[f], e, cutoff)[1]
            total += val
        return total

    bosonic = any(f.statistics == 0 for mono in x.terms for f, _, _ in mono) or any(
        f.statistics == 0 for f in w.unnormalized)
    if not bosonic:
        return complex(evaluate(0.0))
    vals = [evaluate(e) for e in eps_nodes]
    best = _neville_at_zero(eps_nodes, vals)
    other = _neville_at_zero(eps_nodes[1:], vals[1:])
    if abs(best - other) / max(1.0, abs(best)) > tol:
        raise OracleError(f"damped sums did not converge: {best} vs {other}")
    return complex(best)


def random_trace_corpus(seed: int = 42, size: int = 100, max_exponent: int = 3, max_degree: int = 6):
    """Random (element, weight) pairs for comparing family_trace with abel_oracle.

    Elements use one or two families of mixed statistics, up to three
    monomials, bosonic exponents <= ``max_exponent`` and total degree <=
    ``max_degree`` per monomial; twist angles lie in
    [0.6, 2pi - 0.6] so that |q - 1| stays away from zero.  Every fourth
    weight marks one family unnormalized.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(size):
        nfam = int(rng.integers(1, 3))
        fams = [OscFamily(1, 2 + k, int(rng.integers(0, 2)), "c") for k in range(nfam)]
        x = OscElement()
        for _ in range(int(rng.integers(1, 4))):
            term = OscElement.scalar(complex(rng.normal(), rng.normal()))
            budget = max_degree
            for f in fams:
                top = 1 if f.statistics else max_exponent
                r, s = int(rng.integers(0, top + 1)), int(rng.integers(0, top + 1))
                r = min(r, budget)
                s = min(s, budget - r)
                budget -= r + s
                for _ in range(r):
                    term = term * OscElement.creator(f)
                for _ in range(s):
                    term = term * OscElement.annihilator(f)
            x = x + term
        angles = {f: float(rng.uniform(0.6, 2 * math.pi - 0.6)) for f in fams}
        unnorm = (fams[-1],) if i % 4 == 3 else ()
        out.append((x, TraceWeight.from_angles(angles, unnorm)))
    return out
