"""
Seating laws of the two-parameter restaurant
============================================

"""
from fractions import Fraction as F

import numpy as np

from regenstruct import TwoParamModel, consistency_residual, model_levels, partition_distribution

# exact law of the table sizes after 4 customers, alpha = theta = 1/2
law = partition_distribution(TwoParamModel(F(1, 2), F(1, 2)), 4)
for lam, p in law.items():
    print(f"{str(lam):>10}  {p}")
print("total", law.total())

# the same numbers as floats, for plotting or for a quick look
print(np.array([float(p) for _, p in law.items()]))

# dropping a random customer from level n+1 gives level n, exactly
levels = model_levels(TwoParamModel(F(1, 4), 2), 7)
print([str(consistency_residual(levels[m + 1], levels[m])) for m in range(1, 7)])

# theta = 0 with alpha = 0 puts everyone at one table
print(partition_distribution(TwoParamModel(0, 0), 5).support())
