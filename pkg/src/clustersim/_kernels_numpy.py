"""Pure-numpy statevector kernels, signature-compatible with the jit set."""

import numpy as np


def apply_1q(amps, n, q, u):
    arr = np.moveaxis(amps.reshape((2,) * n), q, -1)
    out = arr @ u.T
    return np.ascontiguousarray(np.moveaxis(out, -1, q)).reshape(-1)


def apply_cnot(amps, n, control, target):
    arr = amps.reshape((2,) * n).copy()
    sel = [slice(None)] * n
    sel[control] = 1
    t = target if target < control else target - 1
    arr[tuple(sel)] = np.flip(arr[tuple(sel)], axis=t).copy()
    return arr.reshape(-1)


def project_single(amps, n, q, bra):
    arr = np.moveaxis(amps.reshape((2,) * n), q, 0)
    out = np.tensordot(bra.conj(), arr, axes=(0, 0))
    return np.asarray(out, dtype=np.complex128).reshape(-1)


def project_pair(amps, n, q0, q1, bra):
    arr = np.moveaxis(amps.reshape((2,) * n), (q0, q1), (0, 1))
    out = np.tensordot(bra.conj().reshape(2, 2), arr, axes=([0, 1], [0, 1]))
    return np.asarray(out, dtype=np.complex128).reshape(-1)
