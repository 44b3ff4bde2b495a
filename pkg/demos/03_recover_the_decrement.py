"""
From a partition law back to its decrement matrix
=================================================

"""
from fractions import Fraction as F

from regenstruct import (
    DecrementRow,
    TwoParamModel,
    full_matrix,
    invert_p_to_q,
    matrix_levels,
    model_levels,
    regenerativity_check,
)

# pick any row at the top level; everything below it is forced
row = DecrementRow([F(1, 10), F(0), F(3, 10), F(2, 5), F(1, 5)])
Q = full_matrix(row)
for m in range(1, 6):
    print(m, [str(v) for v in Q.row(m)])

# the partition laws remember the row exactly
print(invert_p_to_q(matrix_levels(Q)) == row)

# outside the regenerative range the recovered row goes negative
bad = model_levels(TwoParamModel(F(3, 4), F(-1, 4), extended_range=True), 6)
verdict = regenerativity_check(bad)
print(bool(verdict), verdict.witness)
