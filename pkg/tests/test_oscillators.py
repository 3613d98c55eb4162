import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from superq.graded import SingularTwistError
from superq.oscillators import (ExponentCapError, OscElement, OscFamily, TraceWeight, abel_oracle, family_trace,
                                fock_operators, geometric_moment, monomial_parity, osc_mul, random_trace_corpus, to_matrix,
                                verma_chain_trace)

B1 = OscFamily(1, 2, 0, "t")
B2 = OscFamily(1, 3, 0, "t")
F1 = OscFamily(2, 3, 1, "t")
F2 = OscFamily(2, 4, 1, "t")
FAMS = [B1, B2, F1, F2]

cr, an, num = OscElement.creator, OscElement.annihilator, OscElement.number


def monomial_element(draw_coeff, parts):
    x = OscElement.scalar(draw_coeff)
    for f, r, s in parts:
        for _ in range(r):
            x = x * cr(f)
        for _ in range(s):
            x = x * an(f)
    return x


@st.composite
def elements(draw, families=(B1, F1, F2), max_terms=3, max_exp=2):
    x = OscElement()
    for _ in range(draw(st.integers(1, max_terms))):
        c = draw(st.integers(-3, 3))
        parts = []
        for f in draw(st.permutations(families)):
            top = 1 if f.statistics else max_exp
            parts.append((f, draw(st.integers(0, top)), draw(st.integers(0, top))))
        x = x + monomial_element(c, parts)
    return x


class TestProducts:
    def test_boson_ccr(self):
        assert an(B1) * cr(B1) == num(B1) + 1

    def test_fermion_car(self):
        assert an(F1) * cr(F1) == -1 * num(F1) + 1

    def test_fermion_nilpotent(self):
        assert not (cr(F1) * cr(F1))
        assert not (an(F1) * an(F1))

    def test_cross_family_odd_sign(self):
        a, b = cr(F1), cr(F2)
        assert a * b == -1 * (b * a)
        basis, ops = fock_operators([F1, F2], 2)
        dim = len(basis)
        lhs = to_matrix(osc_mul(b, a), ops, dim).toarray()
        rhs = (to_matrix(b, ops, dim) @ to_matrix(a, ops, dim)).toarray()
        np.testing.assert_array_equal(lhs, rhs)

    def test_exponent_cap(self):
        x = OscElement({((B1, 64, 0),): 1})
        with pytest.raises(ExponentCapError):
            x * cr(B1)

    @given(a=elements(), b=elements(), c=elements())
    def test_associative(self, a, b, c):
        assert (a * b) * c == a * (b * c)

    @given(a=elements(families=(B1, F1)), b=elements(families=(B2, F2)))
    def test_disjoint_supercommute(self, a, b):
        # split into homogeneous parts first
        def parts(x):
            out = {0: OscElement(), 1: OscElement()}
            for mono, c in x.terms.items():
                out[monomial_parity(mono)] = out[monomial_parity(mono)] + OscElement({mono: c})
            return out
        for pa, xa in parts(a).items():
            for pb, xb in parts(b).items():
                assert xa * xb == (-1) ** (pa * pb) * (xb * xa)

    @given(a=elements(), b=elements())
    def test_matches_fock_matrices(self, a, b):
        basis, ops = fock_operators([B1, F1, F2], 12)
        dim = len(basis)
        keep = [i for i, bs in enumerate(basis) if sum(bs) <= 8]
        lhs = to_matrix(a * b, ops, dim).toarray()[np.ix_(keep, keep)]
        rhs = (to_matrix(a, ops, dim) @ to_matrix(b, ops, dim)).toarray()[np.ix_(keep, keep)]
        assert np.abs(lhs - rhs).max() < 1e-9


class TestFamilyTrace:
    q = cmath.exp(2.2j)

    def test_unit(self):
        assert family_trace(OscElement.scalar(1), TraceWeight({B1: self.q})) == 1

    def test_boson_number(self):
        v = family_trace(num(B1), TraceWeight({B1: self.q}))
        assert abs(v - self.q / (1 - self.q)) < 1e-15

    @pytest.mark.parametrize("r", [1, 2, 3, 5])
    def test_boson_power(self, r):
        x = OscElement({((B1, r, r),): 1})
        v = family_trace(x, TraceWeight({B1: self.q}))
        assert abs(v - math.factorial(r) * (self.q / (1 - self.q)) ** r) < 1e-12

    def test_fermion_number(self):
        v = family_trace(num(F1), TraceWeight({F1: self.q}))
        assert abs(v + self.q / (1 - self.q)) < 1e-15

    def test_unnormalized_fermion_pair(self):
        phi = 1.3
        w = TraceWeight({F1: cmath.exp(-1j * phi)}, frozenset({F1}))
        v = family_trace(OscElement.scalar(cmath.exp(0.5j * phi)), w)
        assert abs(v - 2j * math.sin(phi / 2)) < 1e-15

    def test_off_diagonal_vanishes(self):
        assert family_trace(cr(B1) * an(B1) * an(B1), TraceWeight({B1: self.q})) == 0

    def test_singular_weight(self):
        with pytest.raises(SingularTwistError):
            family_trace(num(B1), TraceWeight({B1: 1.0}))

    @given(x=elements())
    def test_odd_elements_trace_to_zero(self, x):
        odd = OscElement({m: c for m, c in x.terms.items() if monomial_parity(m)})
        w = TraceWeight.from_angles({B1: 1.1, F1: 2.3, F2: 4.0})
        assert family_trace(odd, w) == 0

    @given(a=elements(max_terms=2), b=elements(max_terms=2))
    def test_twisted_cyclicity(self, a, b):
        # Str(q^N a b) = (-1)^{|a||b|} Str(q^N b' a) with b' = q^-N b q^N
        w = TraceWeight.from_angles({B1: 1.1, F1: 2.3, F2: 4.0})
        def conj(x):
            out = {}
            for mono, c in x.terms.items():
                for f, r, s in mono:
                    c *= w.q[f] ** (s - r)
                out[mono] = c
            return OscElement(out)
        for xa in a.terms:
            ea = OscElement({xa: a.terms[xa]})
            for xb in b.terms:
                eb = OscElement({xb: b.terms[xb]})
                lhs = family_trace(ea * eb, w)
                rhs = (-1) ** (monomial_parity(xa) * monomial_parity(xb)) * family_trace(conj(eb) * ea, w)
                assert abs(lhs - rhs) < 1e-9 * max(1, abs(lhs))


class TestOracle:
    def test_boson_number_small_cutoff(self):
        q = cmath.exp(2.2j)
        w = TraceWeight({B1: q})
        v = abel_oracle(num(B1), w, cutoff=400, damping=1.0, ratio=1.4, levels=8)
        assert abs(v - family_trace(num(B1), w)) < 1e-6

    def test_unit(self):
        assert abel_oracle(OscElement.scalar(1), TraceWeight({B1: cmath.exp(1j)}), cutoff=400, damping=1.0,
                           ratio=1.4, levels=8) == pytest.approx(1, abs=1e-12)

    def test_two_family_product(self):
        w = TraceWeight.from_angles({B1: 2.2, B2: -1.7})
        x = num(B1) * num(B2)
        assert abs(abel_oracle(x, w) - family_trace(x, w)) < 1e-6

    def test_cutoff_guard(self):
        with pytest.raises(ValueError):
            abel_oracle(num(B1), TraceWeight({B1: cmath.exp(1j)}), cutoff=50)

    def test_corpus_head(self):
        for x, w in random_trace_corpus(size=8):
            a, b = family_trace(x, w), abel_oracle(x, w)
            assert abs(a - b) <= 1e-6 * max(1, abs(a))

    def test_corpus_deterministic(self):
        c1 = random_trace_corpus(seed=7, size=5)
        c2 = random_trace_corpus(seed=7, size=5)
        assert [x for x, _ in c1] == [x for x, _ in c2]


class TestChainTraces:
    q = cmath.exp(0.9j)

    def test_geometric(self):
        assert abs(verma_chain_trace("gl2", self.q, [1]) - 1 / (1 - self.q)) < 1e-15

    def test_first_moment(self):
        assert abs(verma_chain_trace("gl2", self.q, [0, 1]) - self.q / (1 - self.q) ** 2) < 1e-14

    @pytest.mark.parametrize("j", range(7))
    def test_moments_eulerian(self, j):
        # (q d/dq)^j 1/(1-q) = P_j(q) / (1-q)^(j+1), P_{j+1} = q (P_j' (1-q) + (j+1) P_j)
        P = np.polynomial.Polynomial([1.0])
        one_minus = np.polynomial.Polynomial([1.0, -1.0])
        x = np.polynomial.Polynomial([0.0, 1.0])
        for i in range(j):
            P = x * (P.deriv() * one_minus + (i + 1) * P)
        ref = P(self.q) / (1 - self.q) ** (j + 1)
        assert abs(geometric_moment(self.q, j) - ref) < 1e-12 * max(1, abs(ref))

    def test_gl11_identity_supertrace(self):
        assert verma_chain_trace("gl11", 1.0, [1]) == 0

    def test_gl2_trivial_phase(self):
        with pytest.raises(SingularTwistError):
            verma_chain_trace("gl2", 1.0, [1])
