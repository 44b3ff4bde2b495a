"""
Paintboxes: decrements from a Levy measure, and a stick-breaking check
======================================================================

"""
from collections import Counter
from fractions import Fraction as F

from regenstruct import (
    LEBESGUE,
    beta_spec,
    decrement_from_paintbox,
    dirac,
    full_matrix,
    composition_probability,
    enumerate_compositions,
    make_rng,
    phi_nr,
    sample_composition_via_paintbox,
)

# a unit atom at 1 with drift d: the hook family
hook = dirac(1, 1, drift=2)
print(decrement_from_paintbox(hook, 4))

# Lebesgue-type beta density: Phi(n, r) = 1/(n+1)
print([phi_nr(LEBESGUE, 5, r) for r in range(1, 6)])

# sigma = -alpha, theta = alpha reproduces the (alpha, alpha) family
print(decrement_from_paintbox(beta_spec(1, F(-1, 2), F(1, 2)), 4))

# sample through the paintbox and compare with the exact composition law
spec = dirac(F(1, 2))
rng = make_rng(7)
N = 20_000
counts = Counter(sample_composition_via_paintbox(spec, 4, rng) for _ in range(N))
Q = full_matrix(decrement_from_paintbox(spec, 4))
for c in enumerate_compositions(4):
    print(c, counts[c] / N, float(composition_probability(Q, c)))
