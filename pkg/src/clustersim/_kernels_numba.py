"""Jit-compiled statevector kernels.

Explicit bit-arithmetic loops over flat complex128 arrays. Qubit q of an
n-qubit state occupies bit position n-1-q of the basis index (big-endian).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def apply_1q(amps, n, q, u):
    shift = n - 1 - q
    mask = 1 << shift
    out = np.empty_like(amps)
    u00 = u[0, 0]
    u01 = u[0, 1]
    u10 = u[1, 0]
    u11 = u[1, 1]
    for i in range(amps.shape[0]):
        if i & mask == 0:
            j = i | mask
            a0 = amps[i]
            a1 = amps[j]
            out[i] = u00 * a0 + u01 * a1
            out[j] = u10 * a0 + u11 * a1
    return out


@njit(cache=True)
def apply_cnot(amps, n, control, target):
    cmask = 1 << (n - 1 - control)
    tmask = 1 << (n - 1 - target)
    out = amps.copy()
    for i in range(amps.shape[0]):
        # swap the target bit inside the control=1 subspace, once per pair
        if (i & cmask) != 0 and (i & tmask) == 0:
            j = i | tmask
            out[i] = amps[j]
            out[j] = amps[i]
    return out


@njit(cache=True)
def project_single(amps, n, q, bra):
    shift = n - 1 - q
    b0 = np.conj(bra[0])
    b1 = np.conj(bra[1])
    out = np.zeros(amps.shape[0] // 2, dtype=np.complex128)
    low = (1 << shift) - 1
    for i in range(amps.shape[0]):
        j = ((i >> (shift + 1)) << shift) | (i & low)
        if (i >> shift) & 1 == 0:
            out[j] += b0 * amps[i]
        else:
            out[j] += b1 * amps[i]
    return out


@njit(cache=True)
def project_pair(amps, n, q0, q1, bra):
    s0 = n - 1 - q0
    s1 = n - 1 - q1
    hi = s0 if s0 > s1 else s1
    lo = s1 if s0 > s1 else s0
    cb0 = np.conj(bra[0])
    cb1 = np.conj(bra[1])
    cb2 = np.conj(bra[2])
    cb3 = np.conj(bra[3])
    out = np.zeros(amps.shape[0] // 4, dtype=np.complex128)
    hlow = (1 << hi) - 1
    llow = (1 << lo) - 1
    for i in range(amps.shape[0]):
        v = 2 * ((i >> s0) & 1) + ((i >> s1) & 1)
        j = ((i >> (hi + 1)) << hi) | (i & hlow)
        j = ((j >> (lo + 1)) << lo) | (j & llow)
        if v == 0:
            out[j] += cb0 * amps[i]
        elif v == 1:
            out[j] += cb1 * amps[i]
        elif v == 2:
            out[j] += cb2 * amps[i]
        else:
            out[j] += cb3 * amps[i]
    return out
