"""
Pooling operators and input representations
===========================================

Every feature is one pooling operator applied to one activation map: a
series (or its first difference) convolved with one of 84 fixed kernels at
some dilation, minus a bias.
"""

import numpy as np

from selfrocket import ComboId, Representation
from selfrocket.transform import KERNELS, convolve_dilated, first_difference, fit_plans, pool, transform

# A small activation map and what each operator keeps of it.
z = np.array([1.0, -1.0, 2.0, 0.0, 0.5, 0.5, -3.0])
for op in ("PPV", "GMP", "MPV", "MIPV", "LSPV"):
    print(f"{op:5s} {pool(z, op):7.4f}")
# PPV counts strictly positive values, so the exact zero is not counted.
# MIPV averages 0-based positions of positive values, -1 when there are none.
print("MIPV of an all-negative map:", pool(-np.abs(z) - 1, "MIPV"))

# The kernels: weight -1 everywhere except three 2s, so each sums to zero.
print("kernel 0:", KERNELS[0].astype(int), "sum", KERNELS[0].sum())

# A zero-sum kernel ignores constant offsets; the first difference removes
# trends before convolution instead.
t = np.arange(64, dtype=float)
ramp = 0.1 * t + np.sin(t / 3)
base = convolve_dilated(ramp, KERNELS[10], 2, padding=False)
diff = convolve_dilated(first_difference(ramp), KERNELS[10], 2, padding=False)
print(f"BASE map range [{base.min():.2f}, {base.max():.2f}], DIFF map range [{diff.min():.2f}, {diff.max():.2f}]")

# Fitting plans on a few series fixes dilations and biases. The transform
# then yields 15 matrices; MIX is BASE followed by DIFF.
X = np.random.default_rng(0).normal(size=(4, 100)).cumsum(axis=1)
plans = fit_plans(X, seed=0)
print("BASE dilations:", plans[Representation.BASE].dilations.tolist())
feats = transform(X, plans)
for name in ("PPV", "GMP_DIFF", "LSPV_MIX"):
    print(f"{name:9s} matrix shape {feats[ComboId.parse(name)].shape}")
