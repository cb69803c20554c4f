"""Compiled inner loops: dilated convolution and single-pass pooling."""

import numba
import numpy as np
from numba import njit, prange

# skip the TBB probe, which warns on older system TBB builds
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

NUM_POOLING = 5


@njit(cache=True)
def convolve_into(x, weights, dilation, padding, out):
    # Direct dilated sum, taps accumulated in order 0..8; the transform
    # calls this same routine so its maps are bit-identical to it.
    n = x.shape[0]
    offset = 4 * dilation if padding else 0
    for i in range(out.shape[0]):
        s = 0.0
        for j in range(9):
            t = i + j * dilation - offset
            if 0 <= t < n:
                s += weights[j] * x[t]
        out[i] = s


@njit(cache=True)
def pool_into(c, start, stop, bias, op_slot, out, row, col):
    """Pool ``c[start:stop] - bias`` with every requested operator.

    ``op_slot[p]`` is the first-axis index of ``out`` for operator ``p``
    (PPV, GMP, MPV, MIPV, LSPV) or -1 to skip it.
    """
    count = 0
    index_sum = 0
    positive_sum = 0.0
    peak = -np.inf
    run = 0
    longest = 0
    for i in range(start, stop):
        z = c[i] - bias
        if z > peak:
            peak = z
        if z > 0:
            count += 1
            positive_sum += z
            index_sum += i - start
            run += 1
            if run > longest:
                longest = run
        else:
            run = 0
    length = stop - start
    if op_slot[0] >= 0:
        out[op_slot[0], row, col] = count / length
    if op_slot[1] >= 0:
        out[op_slot[1], row, col] = peak
    if op_slot[2] >= 0:
        out[op_slot[2], row, col] = positive_sum / count if count > 0 else 0.0
    if op_slot[3] >= 0:
        out[op_slot[3], row, col] = index_sum / count if count > 0 else -1.0
    if op_slot[4] >= 0:
        out[op_slot[4], row, col] = longest


@njit(cache=True, parallel=True)
def transform_into(X, kernels, dilations, features_per_dilation, biases, op_slot, out, col_offset):
    n, length = X.shape
    num_kernels = kernels.shape[0]
    num_dilations = dilations.shape[0]
    per_kernel = 0
    for di in range(num_dilations):
        per_kernel += features_per_dilation[di]
    for s in prange(n):
        x = X[s]
        c = np.empty(length)
        for k in range(num_kernels):
            f = k * per_kernel
            for di in range(num_dilations):
                d = dilations[di]
                convolve_into(x, kernels[k], d, True, c)
                if (k + di) % 2 == 0:
                    start = 0
                    stop = length
                else:
                    start = 4 * d
                    stop = length - 4 * d
                for _ in range(features_per_dilation[di]):
                    pool_into(c, start, stop, biases[f], op_slot, out, s, col_offset + f)
                    f += 1
