"""Numba-jitted multilinear sampling kernels.

Expression-for-expression mirror of ``_kernels_numpy`` (same clamping, same
operand order, no fastmath), so both backends stay bit-identical. Loops are
sequential on purpose: output must not depend on worker count.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def interp_1d(field, c0):
    n0 = field.shape[0]
    out = np.empty_like(c0)
    for a in range(c0.shape[0]):
        x = c0[a]
        if x < 0.0:
            x = 0.0
        elif x > n0 - 1.0:
            x = n0 - 1.0
        i = int(np.floor(x))
        if i > n0 - 2:
            i = n0 - 2
        f0 = x - i
        v0 = field[i]
        v1 = field[i + 1]
        out[a] = (1.0 - f0) * v0 + f0 * v1
    return out


@njit(cache=True)
def interp_2d(field, c0, c1):
    n0, n1 = field.shape
    out = np.empty_like(c0)
    for a in range(c0.shape[0]):
        for b in range(c0.shape[1]):
            x = c0[a, b]
            if x < 0.0:
                x = 0.0
            elif x > n0 - 1.0:
                x = n0 - 1.0
            y = c1[a, b]
            if y < 0.0:
                y = 0.0
            elif y > n1 - 1.0:
                y = n1 - 1.0
            i = int(np.floor(x))
            if i > n0 - 2:
                i = n0 - 2
            j = int(np.floor(y))
            if j > n1 - 2:
                j = n1 - 2
            f0 = x - i
            f1 = y - j
            v00 = field[i, j]
            v01 = field[i, j + 1]
            v10 = field[i + 1, j]
            v11 = field[i + 1, j + 1]
            out[a, b] = (((1.0 - f0) * (1.0 - f1)) * v00 + ((1.0 - f0) * f1) * v01
                         + (f0 * (1.0 - f1)) * v10 + (f0 * f1) * v11)
    return out


@njit(cache=True)
def interp_3d(field, c0, c1, c2):
    n0, n1, n2 = field.shape
    out = np.empty_like(c0)
    for a in range(c0.shape[0]):
        for b in range(c0.shape[1]):
            for c in range(c0.shape[2]):
                x = c0[a, b, c]
                if x < 0.0:
                    x = 0.0
                elif x > n0 - 1.0:
                    x = n0 - 1.0
                y = c1[a, b, c]
                if y < 0.0:
                    y = 0.0
                elif y > n1 - 1.0:
                    y = n1 - 1.0
                z = c2[a, b, c]
                if z < 0.0:
                    z = 0.0
                elif z > n2 - 1.0:
                    z = n2 - 1.0
                i = int(np.floor(x))
                if i > n0 - 2:
                    i = n0 - 2
                j = int(np.floor(y))
                if j > n1 - 2:
                    j = n1 - 2
                k = int(np.floor(z))
                if k > n2 - 2:
                    k = n2 - 2
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
                out[a, b, c] = ((((1.0 - f0) * (1.0 - f1)) * (1.0 - f2)) * v000
                                + (((1.0 - f0) * (1.0 - f1)) * f2) * v001
                                + (((1.0 - f0) * f1) * (1.0 - f2)) * v010
                                + (((1.0 - f0) * f1) * f2) * v011
                                + ((f0 * (1.0 - f1)) * (1.0 - f2)) * v100
                                + ((f0 * (1.0 - f1)) * f2) * v101
                                + ((f0 * f1) * (1.0 - f2)) * v110
                                + ((f0 * f1) * f2) * v111)
    return out
