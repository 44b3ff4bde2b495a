"""
Move-to-a-new-box chains and their stationary laws
==================================================

"""
from fractions import Fraction as F

from regenstruct import (
    DecrementRow,
    FragmentedPermutation,
    composition_probability,
    exact_chain,
    full_matrix,
    simulate_chain,
    stationary,
    verify_l1,
)
from regenstruct.chains import move_to_new_box

# one move: take 7,4,8,1 out of their boxes and open a new first box
state = FragmentedPermutation.parse("2,3,9|1,8|6,7,5|4")
print(move_to_new_box(state, (7, 4, 8, 1)))

# the composition chain is solved exactly
q = DecrementRow([F(1, 3)] * 3)
pi = stationary(exact_chain("composition", 3, q))
Q = full_matrix(q)
for c, p in sorted(pi.items()):
    print(c, p, composition_probability(Q, c))

# on fragmented permutations the order is uniform and independent of the boxes
print(verify_l1(3, q))

# and a long run lands inside the binomial bands
report = simulate_chain("composition", 3, q, 50_000, 500, seed=3)
print(report.all_within(3))
