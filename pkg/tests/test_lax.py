import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from superq.graded import GradingSignature
from superq.hasse import t_plus_module
from superq.lax import (ModuleSpec, SubsetLabel, check_gl_relations, check_ybe, embedding_sign, induced_module,
                        lax_canonical, lax_full, verify_factorization, verify_gl11_fusion)
from superq.oscillators import OscElement, OscFamily, monomial_parity

from conftest import SIGS_2_3, SMALL_SIGS, all_subsets

cr, an, num = OscElement.creator, OscElement.annihilator, OscElement.number


@st.composite
def sig_and_subset(draw):
    sig = draw(st.sampled_from(SMALL_SIGS))
    return sig, draw(st.sampled_from(all_subsets(sig)))


class TestSubsetLabel:
    def test_partition(self):
        sig = GradingSignature(2, 2)
        s = SubsetLabel.of(sig, (3, 1))
        assert s.members == (1, 3)
        assert s.complement == (2, 4)
        assert s.bosonic == (1,) and s.fermionic == (3,)

    def test_family_set(self):
        sig = GradingSignature(2, 1)
        fams = SubsetLabel.of(sig, (1, 3)).families()
        assert [(f.row, f.col, f.statistics) for f in fams] == [(1, 2, 0), (3, 2, 1)]


class TestLaxCanonical:
    def test_full_set_is_scalar(self):
        sig = GradingSignature(2, 1)
        L = lax_canonical(sig, sig.labels, z=0.7)
        for a, b in itertools.product(sig.labels, repeat=2):
            assert L[a, b] == OscElement.scalar(0.7 * (a == b))

    def test_gl11_explicit_form(self):
        sig = GradingSignature(1, 1)
        z = 0.4 - 0.2j
        L = lax_canonical(sig, (1,), z=z)
        f = OscFamily(1, 2, 1)
        h = num(f) - 0.5
        assert L[1, 1] == z - h
        assert L[1, 2] == cr(f)
        assert L[2, 1] == -1 * an(f)
        assert L[2, 2] == OscElement.scalar(1)

    def test_gl11_second_factor(self):
        sig = GradingSignature(1, 1)
        L = lax_canonical(sig, (2,), z=0.3)
        f = OscFamily(2, 1, 1)
        assert L[2, 2] == 0.3 + (num(f) - 0.5)
        assert L[1, 2] == an(f)
        assert L[2, 1] == cr(f)

    @given(ss=sig_and_subset())
    def test_entry_parity(self, ss):
        sig, subset = ss
        L = lax_canonical(sig, subset, z=0.3)
        for a, b in itertools.product(sig.labels, repeat=2):
            want = (sig.parity(a) + sig.parity(b)) % 2
            assert all(monomial_parity(m) == want for m in L[a, b].terms)

    @given(ss=sig_and_subset(), z1=st.complex_numbers(max_magnitude=3), z2=st.complex_numbers(max_magnitude=3))
    def test_linear_in_z(self, ss, z1, z2):
        sig, subset = ss
        l1, l2 = lax_canonical(sig, subset, z=z1), lax_canonical(sig, subset, z=z2)
        for a, b in itertools.product(sig.labels, repeat=2):
            d = l1[a, b] - l2[a, b]
            if a == b and a in subset:
                assert abs(d.scalar_part() - (z1 - z2)) <= 1e-12 * max(1, abs(z1 - z2))
                assert len(d.terms) <= 1
            else:
                assert not d.chop(1e-12)

    def test_module_mismatch_rejected(self):
        sig = GradingSignature(2, 1)
        with pytest.raises(ValueError):
            lax_canonical(sig, (1,), ModuleSpec.verma(sig, (1, 2), (0.3, 0.1)))


class TestModules:
    def test_fundamental_relations(self):
        for sig in SMALL_SIGS:
            assert check_gl_relations(sig, ModuleSpec.fundamental(sig)) < 1e-12

    def test_bad_table_rejected(self):
        sig = GradingSignature(2, 0)
        fund = ModuleSpec.fundamental(sig)
        gens = dict(fund.matrices)
        gens[1, 2] = 2 * gens[1, 2]
        with pytest.raises(ValueError):
            ModuleSpec.explicit(sig, (1, 2), gens, parities=(0, 0))

    @pytest.mark.parametrize("sig,labels", [(GradingSignature(2, 1), (1, 2)), (GradingSignature(2, 1), (1, 3)),
                                            (GradingSignature(1, 2), (2, 3))])
    def test_verma_relations(self, sig, labels):
        assert check_gl_relations(sig, ModuleSpec.verma(sig, labels, (0.4, -1.1))) < 1e-13

    def test_gl11_two_dim_module(self):
        assert check_gl_relations(GradingSignature(1, 1), t_plus_module(0.37)) < 1e-15

    def test_lax_full_singlet(self):
        sig = GradingSignature(1, 1)
        L = lax_full(sig, ModuleSpec.singlet(sig.labels), 1.3)
        assert L[1, 1] == OscElement.scalar(1.3) and not L[1, 2]


class TestYBE:
    def test_gl21_single(self):
        assert check_ybe(GradingSignature(2, 1), (1,), None, 0.3, -0.8) < 1e-12

    def test_empty_subset(self):
        assert check_ybe(GradingSignature(2, 1), (), None, 0.3, -0.8) == 0

    def test_perturbation_detected(self):
        assert check_ybe(GradingSignature(2, 1), (1,), None, 0.3, -0.8, perturb=(1, 2, 1e-3)) >= 1e-4

    @pytest.mark.parametrize("sig", SIGS_2_3, ids=str)
    def test_every_subset(self, sig, rng):
        z1, z2 = rng.normal(size=2) + 1j * rng.normal(size=2)
        for s in all_subsets(sig):
            assert check_ybe(sig, s, None, z1, z2) < 1e-11

    def test_fundamental_full(self):
        for sig in (GradingSignature(1, 1), GradingSignature(2, 1)):
            assert check_ybe(sig, sig.labels, ModuleSpec.fundamental(sig), 1.0, 0.25) < 1e-12

    @pytest.mark.parametrize("labels", [(1, 2), (1, 3)])
    def test_verma_modules(self, labels):
        sig = GradingSignature(2, 1)
        assert check_ybe(sig, labels, ModuleSpec.verma(sig, labels, (0.4, -1.1)), 0.2 + 0.1j, -0.6) < 1e-11

    def test_embedding_sign_table(self):
        sig = GradingSignature(1, 1)
        table = {(a, b): embedding_sign(sig, a, b) for a in (1, 2) for b in (1, 2)}
        assert table == {(1, 1): 1, (1, 2): -1, (2, 1): 1, (2, 2): 1 * (-1) ** (1 + 1)}


class TestFusion:
    def test_gl11_explicit(self):
        assert verify_gl11_fusion(0.3 + 0.2j, -0.7) < 1e-15

    def test_gl11_general_route(self):
        assert verify_factorization(GradingSignature(1, 1), (1,), (2,), 0.4 + 0.1j) < 1e-12

    @pytest.mark.parametrize("sig,I,J", [(GradingSignature(2, 0), (1,), (2,)),
                                         (GradingSignature(2, 1), (1,), (3,)),
                                         (GradingSignature(2, 1), (3,), (1, 2)),
                                         (GradingSignature(1, 2), (2,), (1,))])
    @pytest.mark.parametrize("lam", [0.0, 0.7])
    def test_windowed(self, sig, I, J, lam):
        assert verify_factorization(sig, I, J, 0.3 - 0.4j, window_cutoff=24, lam=lam) < 1e-10

    def test_literal_route_agrees_at_small_cutoff(self):
        sig = GradingSignature(2, 0)
        assert verify_factorization(sig, (1,), (2,), 0.3, window_cutoff=10, method="matrix") < 1e-12

    def test_intersecting_rejected(self):
        with pytest.raises(ValueError):
            verify_factorization(GradingSignature(2, 1), (1, 2), (2,), 0.1)

    @pytest.mark.parametrize("sig", [GradingSignature(2, 1), GradingSignature(1, 2), GradingSignature(2, 2)], ids=str)
    def test_induced_generators_close(self, sig):
        subs = [s for s in all_subsets(sig) if s]
        for I, J in itertools.product(subs, repeat=2):
            if set(I) & set(J) or len(I) + len(J) > 3:
                continue
            assert check_gl_relations(sig, induced_module(sig, I, J, lam=0.7)) < 1e-13
