"""Pure-numpy multilinear sampling kernels.

Reference implementations of the hot inner loops. The numba twins in
``_kernels_numba`` mirror the arithmetic expression-for-expression so both
backends produce bit-identical output; keep any edit synchronized.

Sample coordinates are absolute grid positions (index + displacement) and
are clamped to the grid box before interpolation (replicate border).
"""

import numpy as np


def interp_1d(field, c0):
    n0 = field.shape[0]
    x = np.clip(c0, 0.0, n0 - 1.0)
    i = np.minimum(np.floor(x).astype(np.int64), n0 - 2)
    f0 = x - i
    v0 = field[i]
    v1 = field[i + 1]
    return (1.0 - f0) * v0 + f0 * v1


def interp_2d(field, c0, c1):
    n0, n1 = field.shape
    x = np.clip(c0, 0.0, n0 - 1.0)
    y = np.clip(c1, 0.0, n1 - 1.0)
    i = np.minimum(np.floor(x).astype(np.int64), n0 - 2)
    j = np.minimum(np.floor(y).astype(np.int64), n1 - 2)
    f0 = x - i
    f1 = y - j
    v00 = field[i, j]
    v01 = field[i, j + 1]
    v10 = field[i + 1, j]
    v11 = field[i + 1, j + 1]
    return (((1.0 - f0) * (1.0 - f1)) * v00 + ((1.0 - f0) * f1) * v01
            + (f0 * (1.0 - f1)) * v10 + (f0 * f1) * v11)


def interp_3d(field, c0, c1, c2):
    n0, n1, n2 = field.shape
    x = np.clip(c0, 0.0, n0 - 1.0)
    y = np.clip(c1, 0.0, n1 - 1.0)
    z = np.clip(c2, 0.0, n2 - 1.0)
    i = np.minimum(np.floor(x).astype(np.int64), n0 - 2)
    j = np.minimum(np.floor(y).astype(np.int64), n1 - 2)
    k = np.minimum(np.floor(z).astype(np.int64), n2 - 2)
    f0 = x - i
    f1 = y - j
    f2 = z - k
    v000 = field[i, j, k]
    v001 = field[i, j, k + 1]
    v010 = field[i, j + 1, k]
    v011 = field[i, j + 1, k + 1]
    v100 = field[i + 1, j, k]
    v101 = field[i + 1, j, k + 1]
    v110 = field[i + 1, j + 1, k]
    v111 = field[i + 1, j + 1, k + 1]
    return ((((1.0 - f0) * (1.0 - f1)) * (1.0 - f2)) * v000
            + (((1.0 - f0) * (1.0 - f1)) * f2) * v001
            + (((1.0 - f0) * f1) * (1.0 - f2)) * v010
            + (((1.0 - f0) * f1) * f2) * v011
            + ((f0 * (1.0 - f1)) * (1.0 - f2)) * v100
            + ((f0 * (1.0 - f1)) * f2) * v101
            + ((f0 * f1) * (1.0 - f2)) * v110
            + ((f0 * f1) * f2) * v111)
