"""
Regeneration: delete one table, the rest looks like a fresh sample
==================================================================

"""
from fractions import Fraction as F

from regenstruct import (
    SIZE_BIASED,
    TauKernel,
    TwoParamModel,
    model_levels,
    q_from_p_d,
    regen_residual,
    tau_for,
    two_param_decrement,
)

alpha, theta = F(1, 2), F(1)
levels = model_levels(TwoParamModel(alpha, theta), 6)

# the tau kernel with tau = alpha/(alpha+theta) keeps the identity exact
kernel = TauKernel(tau_for(alpha, theta))
print("tau =", kernel.tau, " residual =", regen_residual(levels, kernel).value)

# the induced law of the deleted size agrees with the closed form
print(q_from_p_d(levels[6], kernel))
print(two_param_decrement(alpha, theta, 6))

# with the wrong kernel the identity breaks
print("size-biased residual:", regen_residual(levels, SIZE_BIASED).value)

# Ewens(1) with size-biased picking deletes a uniform size
print(q_from_p_d(model_levels(TwoParamModel.ewens(1), 5)[5], SIZE_BIASED))
