import cmath
import itertools

import numpy as np
import pytest

from superq.graded import GradingSignature, QuantumSpace, TwistConfig, build_hamiltonian, site_operator, matrix_unit
from superq.lax import ModuleSpec, embedding_sign, lax_canonical
from superq.transfer import (TransferFamily, interpolate_polynomial, monodromy, monodromy_polynomial, prefactor,
                             q_operator, sample_nodes, t_operator, x_plus_operator)
from superq.hasse import verify_split_gl11, verify_tqq_gl11

from conftest import SIGS_2_3, all_subsets, random_twists

GL11 = GradingSignature(1, 1)
GL20 = GradingSignature(2, 0)
GL21 = GradingSignature(2, 1)


def rel(a, b):
    return float(np.abs(a - b).max()) / max(1.0, float(np.abs(b).max()))


class TestBoundaryOperators:
    @pytest.mark.parametrize("sig", SIGS_2_3, ids=str)
    def test_empty_is_identity(self, sig):
        tw = TwistConfig.generic(sig)
        for L in (1, 2, 3):
            Q = q_operator(sig, (), L, tw, 0.37 - 0.2j).matrix
            assert np.abs(Q - np.eye(len(Q))).max() < 1e-12

    @pytest.mark.parametrize("sig", SIGS_2_3, ids=str)
    def test_full_is_scalar(self, sig):
        tw = TwistConfig.generic(sig)
        z = 0.4 + 0.3j
        for L in (1, 2, 3):
            Q = q_operator(sig, sig.labels, L, tw, z).matrix
            want = prefactor(sig, sig.labels, tw, z) * z ** L
            assert np.abs(Q - want * np.eye(len(Q))).max() < 1e-12


class TestStructure:
    @pytest.mark.parametrize("sig", SIGS_2_3, ids=str)
    def test_blocks_and_parity(self, sig):
        tw = TwistConfig.generic(sig)
        for s in all_subsets(sig):
            op = q_operator(sig, s, 2, tw, 0.2 + 0.1j)
            assert op.block_residual() == 0
            assert op.parity_residual() == 0

    def test_off_sector_traces_vanish(self):
        tw = TwistConfig.generic(GL21)
        for s in ((1,), (3,), (1, 3)):
            assert TransferFamily(GL21, s, None, 2, tw).off_sector_traces() < 1e-13

    def test_commutes_with_hamiltonian(self):
        tw = TwistConfig.generic(GL11)
        H = build_hamiltonian(GL11, 2, tw)
        for s in all_subsets(GL11):
            Q = q_operator(GL11, s, 2, tw, 0.3 - 0.5j).matrix
            assert np.abs(Q @ H - H @ Q).max() < 1e-11

    def test_q_family_commutes(self, rng):
        tw = random_twists(GL21, rng)
        ops = [q_operator(GL21, s, 2, tw, z).matrix
               for s in all_subsets(GL21) for z in (0.3, -0.7 + 0.2j)]
        for a, b in itertools.combinations(ops, 2):
            assert np.abs(a @ b - b @ a).max() < 1e-10 * max(1, np.abs(a).max() * np.abs(b).max())

    def test_zero_twist_fundamental_has_global_symmetry(self):
        tw = TwistConfig.zero(GL20)
        L = 3
        space = QuantumSpace(GL20, L)
        T = t_operator(GL20, ModuleSpec.fundamental(GL20), L, tw, 0.3 + 0.4j).matrix
        H = build_hamiltonian(GL20, L, tw)
        assert np.abs(T @ H - H @ T).max() < 1e-11
        for a, b in itertools.product((1, 2), repeat=2):
            E = sum(site_operator(matrix_unit(2, a, b), k, space) for k in range(1, L + 1))
            assert np.abs(T @ E - E @ T).max() < 1e-11


class TestHandExpansions:
    """Single-site traces worked out by hand.

    A bosonic family traced with weight w has mean occupation w/(1-w); a
    fermionic one with the graded weight has -w/(1-w).
    """

    def test_gl11_single_site(self):
        tw = TwistConfig((0.7, 2.1))
        w = cmath.exp(-1j * (0.7 - 2.1))
        mean = -w / (1 - w)
        for z in (0.0, 1.0, 0.3 - 0.6j):
            Q = q_operator(GL11, (1,), 1, tw, z).matrix / prefactor(GL11, (1,), tw, z)
            assert abs(Q[0, 0] - (z + 0.5 - mean)) < 1e-13
            assert abs(Q[1, 1] - 1) < 1e-13
            assert abs(Q[0, 1]) + abs(Q[1, 0]) == 0

    def test_gl2_single_site(self):
        tw = TwistConfig((0.7, 2.1))
        w = cmath.exp(-1j * (0.7 - 2.1))
        for z in (0.0, 0.5 + 0.5j):
            Q = q_operator(GL20, (1,), 1, tw, z).matrix / prefactor(GL20, (1,), tw, z)
            assert abs(Q[0, 0] - (z - 0.5 - w / (1 - w))) < 1e-13
            assert abs(Q[1, 1] - 1) < 1e-13

    def test_gl11_second_family_single_site(self):
        tw = TwistConfig((0.7, 2.1))
        w = cmath.exp(-1j * (0.7 - 2.1))
        for z in (0.0, 1.0, -0.4j):
            Q = q_operator(GL11, (2,), 1, tw, z).matrix / prefactor(GL11, (2,), tw, z)
            assert abs(Q[0, 0] - 1) < 1e-13
            assert abs(Q[1, 1] - (z + 0.5 + w / (1 - w))) < 1e-13

    @pytest.mark.parametrize("sig", [GL11, GL20, GL21], ids=str)
    def test_fundamental_single_site(self, sig):
        # Str(D (z - (-1)^d E_cd)) with D = diag(exp(-i phi_a)): diagonal z Str D - exp(-i phi_c)
        tw = TwistConfig.generic(sig)
        z = 0.3 + 0.2j
        T = t_operator(sig, ModuleSpec.fundamental(sig), 1, tw, z).matrix / prefactor(sig, sig.labels, tw, z)
        str_d = sum(sig.sign(a) * cmath.exp(-1j * tw[a]) for a in sig.labels)
        want = np.diag([z * str_d - cmath.exp(-1j * tw[c]) for c in sig.labels])
        assert np.abs(T - want).max() < 1e-13

    def test_gl11_tqq_single_site(self):
        tw = TwistConfig((0.7, 2.1))
        assert verify_tqq_gl11(1, tw, [(0.3, -0.2), (0.5j, 0.1)]) < 1e-12

    def test_prefactor_formula(self):
        tw = TwistConfig.generic(GL21)
        z = 0.3 + 0.1j
        want = cmath.exp(1j * z * (tw[1] - tw[3]))
        assert abs(prefactor(GL21, (1, 3), tw, z) - want) < 1e-15


class TestMonodromy:
    def test_single_site_is_lax(self):
        z = 0.6 - 0.1j
        M = monodromy(GL21, (1,), None, 1, z)
        lax = lax_canonical(GL21, (1,), z=z)
        for a, b in itertools.product(GL21.labels, repeat=2):
            want = embedding_sign(GL21, a, b) * lax[a, b]
            got = M.entries.get((a - 1, b - 1))
            assert (got is None and not want) or not (got - want).chop(1e-14)

    def test_full_set_gl11(self):
        z = 0.7
        M = monodromy(GL11, (1, 2), None, 3, z)
        for (i, j), v in M.entries.items():
            assert i == j
            assert abs(v.scalar_part() - z ** 3) < 1e-13

    @pytest.mark.parametrize("sig,I", [(GL11, (1,)), (GL20, (1,)), (GL21, (1, 3)), (GL21, (2,))])
    def test_oscillator_powers_bounded_by_length(self, sig, I):
        for L in (1, 2, 3):
            entries = monodromy(sig, I, None, L, 0.3).entries.values()
            powers = [max(r, s) for v in entries for m in v.terms for _, r, s in m]
            assert max(powers, default=0) <= L
            assert max(v.degree() for v in entries) <= 2 * L

    def test_polynomial_matches_direct(self):
        poly = monodromy_polynomial(GL21, (1, 3), None, 2)
        for z in (0.0, 1.3, -0.4 + 0.9j):
            direct = monodromy(GL21, (1, 3), None, 2, z).entries
            keys = set(direct) | {k for k, p in poly.items() if any(c is not None for c in p)}
            for k in keys:
                acc = None
                for j, c in enumerate(poly.get(k, [])):
                    if c is not None:
                        term = c * (z ** j)
                        acc = term if acc is None else acc + term
                d = direct.get(k)
                if d is None:
                    assert acc is None or not acc.chop(1e-12)
                else:
                    assert not (acc - d).chop(1e-12)


class TestInterpolation:
    def test_recovers_coefficients(self):
        tw = TwistConfig.generic(GL21)
        L = 2
        fam = TransferFamily(GL21, (1,), None, L, tw)
        samples = [(z, q_operator(GL21, (1,), L, tw, z)) for z in sample_nodes(L + 3)]
        poly = interpolate_polynomial(samples)
        for a, b in zip(poly.coeffs, fam.polynomial.coeffs):
            assert np.abs(a - b).max() < 1e-10

    def test_too_few_samples(self):
        tw = TwistConfig.generic(GL11)
        samples = [(z, q_operator(GL11, (1,), 2, tw, z)) for z in sample_nodes(3)]
        with pytest.raises(ValueError):
            interpolate_polynomial(samples)

    def test_mixed_operators_rejected(self):
        tw = TwistConfig.generic(GL11)
        samples = [(z, q_operator(GL11, (1,), 1, tw, z)) for z in sample_nodes(2)]
        samples.append((0.9, q_operator(GL11, (2,), 1, tw, 0.9)))
        with pytest.raises(ValueError):
            interpolate_polynomial(samples)

    def test_sector_degrees_gl11(self):
        # Q_1 on a sector with k copies of label 1 has degree k
        tw = TwistConfig.generic(GL11)
        fam = TransferFamily(GL11, (1,), None, 2, tw)
        poly = fam.polynomial
        space = fam.space
        for occ, idx in space.sectors.items():
            block = [c[np.ix_(idx, idx)] for c in poly.coeffs]
            deg = max(j for j, c in enumerate(block) if np.abs(c).max() > 1e-12)
            assert deg == occ[0]
            assert np.abs(block[deg] - np.eye(len(idx))).max() < 1e-12


class TestHighestWeight:
    @pytest.mark.parametrize("label", [1, 3])
    @pytest.mark.parametrize("lam", [0.0, 0.7, -1.3])
    def test_single_label_is_shifted_q(self, label, lam):
        tw = TwistConfig.generic(GL21)
        z = 0.3 + 0.2j
        X = x_plus_operator(GL21, (label,), (lam,), 2, tw, z).matrix
        Q = q_operator(GL21, (label,), 2, tw, z - lam).matrix
        assert rel(X, Q) < 1e-12

    def test_three_labels_unsupported(self):
        with pytest.raises(NotImplementedError):
            x_plus_operator(GL21, (1, 2, 3), (0, 0, 0), 1, TwistConfig.generic(GL21), 0.1)

    def test_verma_t_operator_rejected(self):
        with pytest.raises(ValueError):
            t_operator(GL20, ModuleSpec.verma(GL20, (1, 2), (0.0, 0.0)), 1, TwistConfig.generic(GL20), 0.1)

    @pytest.mark.parametrize("L", [1, 2, 3])
    def test_gl11_split(self, L):
        tw = TwistConfig.generic(GL11)
        assert verify_split_gl11(L, tw, [0.3, -0.4 + 0.7j]) < 1e-12

    @pytest.mark.parametrize("L", [1, 2])
    def test_gl2_fundamental_from_two_verma(self, L):
        # C^2 sits in the Verma module of highest weight (1, 0) with quotient of weight (-1, 2)
        tw = TwistConfig.generic(GL20)
        for z in (0.3, -0.2 + 0.5j):
            T = t_operator(GL20, ModuleSpec.fundamental(GL20), L, tw, z).matrix
            X1 = x_plus_operator(GL20, (1, 2), (1.0, 0.0), L, tw, z).matrix
            X2 = x_plus_operator(GL20, (1, 2), (-1.0, 2.0), L, tw, z).matrix
            assert rel(T, X1 - X2) < 1e-12

    @pytest.mark.parametrize("L", [1, 2])
    def test_gl2_half_integer_weights(self, L):
        # (1/2, -1/2) differs from (1, 0) by a central shift, absorbed by z -> z + 1/2
        tw = TwistConfig.generic(GL20)
        z = 0.3 + 0.1j
        X = (x_plus_operator(GL20, (1, 2), (0.5, -0.5), L, tw, z).matrix
             - x_plus_operator(GL20, (1, 2), (-1.5, 1.5), L, tw, z).matrix)
        T = t_operator(GL20, ModuleSpec.fundamental(GL20), L, tw, z + 0.5).matrix
        assert rel(X, T) < 1e-12
