"""Straight-loop reference implementations, deliberately naive.

Nothing here imports the package's compiled code; these are the yardsticks
the fast paths are held to.
"""

import itertools
import math

import numpy as np


def kernels():
    out = []
    for idx in itertools.combinations(range(9), 3):
        w = [-1.0] * 9
        for i in idx:
            w[i] = 2.0
        out.append(w)
    return out


def convolve(x, w, d, padding):
    x = list(map(float, x))
    n = len(x)
    if padding:
        xp = [0.0] * (4 * d) + x + [0.0] * (4 * d)
        length = n
    else:
        xp = x
        length = n - 8 * d
    out = []
    for i in range(length):
        s = 0.0
        for j in range(9):
            s += w[j] * xp[i + j * d]
        out.append(s)
    return out


def ppv(z):
    return sum(1 for v in z if v > 0) / len(z)


def gmp(z):
    m = z[0]
    for v in z:
        if v > m:
            m = v
    return m


def mpv(z):
    pos = [v for v in z if v > 0]
    return sum(pos) / len(pos) if pos else 0.0


def mipv(z):
    idx = [i for i, v in enumerate(z) if v > 0]
    return sum(idx) / len(idx) if idx else -1.0


def lspv(z):
    best = cur = 0
    for v in z:
        cur = cur + 1 if v > 0 else 0
        best = max(best, cur)
    return best


POOLS = {"PPV": ppv, "GMP": gmp, "MPV": mpv, "MIPV": mipv, "LSPV": lspv}


def features(x, dilations, fpd, biases, op):
    """All pooled features of one (already represented) series, column order."""
    pool = POOLS[op]
    T = len(x)
    out = []
    f = 0
    for k, w in enumerate(kernels()):
        for j, d in enumerate(dilations):
            d = int(d)
            if (k + j) % 2 == 0:
                c = convolve(x, w, d, True)
            else:
                c = convolve(x, w, d, False)
            for _ in range(int(fpd[j])):
                out.append(pool([v - biases[f] for v in c]))
                f += 1
    assert len(out) == len(biases) and T > 0
    return out


def dilations(T, num_features=9996, max_per_kernel=32):
    """Dilation schedule written out from the closed-form description."""
    per_kernel = num_features // 84
    m = min(per_kernel, max_per_kernel)
    A = math.log2((T - 1) / 8)
    raw = [int(2 ** (j * A / (m - 1))) if m > 1 else 1 for j in range(m)]
    values = sorted(set(raw))
    counts = [raw.count(v) for v in values]
    fpd = [int(c * per_kernel / m) for c in counts]
    i = 0
    while sum(fpd) < per_kernel:
        fpd[i] += 1
        i = (i + 1) % len(fpd)
    return values, fpd


def ridge_loo_explicit(X, y, alpha, n_classes):
    """Leave-one-out residuals by refitting ridge n times.

    Standardization is fitted once on all rows (matching the closed form);
    each refit solves the penalized normal equations with an unpenalized
    intercept on the held-in rows.
    """
    X = np.asarray(X, float)
    n, F = X.shape
    mu = X.mean(0)
    sd = np.maximum(X.std(0), 1e-8)
    Xs = (X - mu) / sd
    Y = -np.ones((n, n_classes))
    Y[np.arange(n), y] = 1.0
    res = np.empty_like(Y)
    for i in range(n):
        keep = np.arange(n) != i
        A = Xs[keep]
        B = Y[keep]
        am, bm = A.mean(0), B.mean(0)
        W = np.linalg.solve((A - am).T @ (A - am) + alpha * np.eye(F), (A - am).T @ (B - bm))
        res[i] = Y[i] - ((Xs[i] - am) @ W + bm)
    return res
