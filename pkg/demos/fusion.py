"""Lax operators for larger index sets built from smaller ones.

For gl(1|1) the product of the two single-label Lax operators equals the
full-set operator with a two-dimensional module, up to a similarity; the
check is exact because fermionic Fock spaces are finite.  For bosonic labels
the Fock space is truncated and compared on a window of low occupations.
"""

import itertools

from superq import GradingSignature, TwistConfig
from superq.hasse import verify_split_gl11, verify_tqq_gl11
from superq.lax import verify_factorization, verify_gl11_fusion

print(f"gl(1|1) fusion: {verify_gl11_fusion(0.3 + 0.2j, -0.7):.1e}")

for n, m in ((2, 0), (2, 1)):
    sig = GradingSignature(n, m)
    singles = [(a,) for a in sig.labels]
    for I, J in itertools.permutations(singles, 2):
        res = verify_factorization(sig, I, J, 0.3 - 0.4j, window_cutoff=24)
        print(f"gl({n}|{m})  L_{I} L_{J} -> L_{tuple(sorted(I + J))}: {res:.1e}")

tw = TwistConfig.generic(GradingSignature(1, 1))
for L in (1, 2, 3):
    tqq = verify_tqq_gl11(L, tw, [(0.3, -0.2), (0.1 + 0.4j, 0.7)])
    split = verify_split_gl11(L, tw, [0.3, -0.4 + 0.7j])
    print(f"gl(1|1) L={L}: T = sin * Q1 Q2 {tqq:.1e}, split {split:.1e}")
