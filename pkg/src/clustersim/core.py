"""Dense statevector and density-matrix primitives.

Qubit order is big-endian: qubit 0 is the leftmost label in a ket, so basis
index i assigns qubit q the bit ``(i >> (n - 1 - q)) & 1``. Values are
immutable once constructed; every operation returns a new value. Nothing in
this module knows about parties or protocols.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from . import kernels

ATOL = 1e-12          # equality tolerance for amplitudes and matrix elements
NORM_ATOL = 1e-9      # slack allowed on unit norm at construction time
PSD_ATOL = 1e-10      # most negative eigenvalue tolerated in a density matrix

I2 = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)
for _m in (I2, PAULI_X, PAULI_Y, PAULI_Z, HADAMARD):
    _m.setflags(write=False)


def _as_c128(x) -> np.ndarray:
    return np.ascontiguousarray(x, dtype=np.complex128)


@dataclass(frozen=True)
class StateVector:
    """Immutable pure state of ``num_qubits`` qubits.

    ``num_qubits`` may be 0: a scalar left over after measuring out every
    qubit. ``normalized=False`` marks intermediate values (projection
    remainders, analytic branch states) whose norm carries probability
    information.
    """

    num_qubits: int
    amps: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        n = self.num_qubits
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise ValueError("num_qubits must be a non-negative integer")
        amps = np.array(self.amps, dtype=np.complex128, copy=True).reshape(-1)
        if amps.shape[0] != (1 << n):
            raise ValueError(
                f"expected {1 << n} amplitudes for {n} qubits, got {amps.shape[0]}"
            )
        if not np.all(np.isfinite(amps.real)) or not np.all(np.isfinite(amps.imag)):
            raise ValueError("amplitudes must be finite")
        if self.normalized:
            nsq = float(np.real(np.vdot(amps, amps)))
            if abs(nsq - 1.0) > NORM_ATOL:
                raise ValueError(f"state marked normalized but <psi|psi> = {nsq}")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def norm_sq(self) -> float:
        return float(np.real(np.vdot(self.amps, self.amps)))

    def normalize(self) -> "StateVector":
        nsq = self.norm_sq()
        if nsq <= 1e-28:
            raise ValueError("cannot normalize a (numerically) zero state")
        return StateVector(self.num_qubits, self.amps / np.sqrt(nsq), normalized=True)

    def probabilities(self) -> np.ndarray:
        """Born probabilities of the computational basis outcomes."""
        return np.abs(self.amps) ** 2


def basis_state(num_qubits: int, index: int = 0) -> StateVector:
    """Computational basis ket |index> on ``num_qubits`` qubits."""
    if not 0 <= index < (1 << num_qubits):
        raise ValueError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def require_unitary(u: np.ndarray, atol: float = ATOL) -> np.ndarray:
    u = _as_c128(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("unitary must be a square matrix")
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > atol:
        raise ValueError(f"matrix is not unitary (max |U+U - I| = {err:.3e})")
    return u


def _check_qubit(state: StateVector, q: int) -> None:
    if not 0 <= q < state.num_qubits:
        raise ValueError(f"qubit {q} out of range for {state.num_qubits}-qubit state")


def apply_1q(state: StateVector, target: int, u: np.ndarray) -> StateVector:
    """Apply a single-qubit unitary to ``target``. Rejects non-unitary u."""
    _check_qubit(state, target)
    u = require_unitary(u)
    out = kernels.apply_1q(state.amps, state.num_qubits, target, u)
    return StateVector(state.num_qubits, out, normalized=state.normalized)


def apply_matrix_1q(state: StateVector, target: int, m: np.ndarray) -> StateVector:
    """Apply an arbitrary 2x2 matrix (measurement collapse uses this)."""
    _check_qubit(state, target)
    out = kernels.apply_1q(state.amps, state.num_qubits, target, _as_c128(m))
    return StateVector(state.num_qubits, out, normalized=False)


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    _check_qubit(state, control)
    _check_qubit(state, target)
    if control == target:
        raise ValueError("control and target must differ")
    out = kernels.apply_cnot(state.amps, state.num_qubits, control, target)
    return StateVector(state.num_qubits, out, normalized=state.normalized)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> with the left argument conjugated."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("states live on different qubit counts")
    return complex(np.vdot(a.amps, b.amps))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    return StateVector(
        a.num_qubits + b.num_qubits,
        np.kron(a.amps, b.amps),
        normalized=a.normalized and b.normalized,
    )


def permute_qubits(state: StateVector, order: Sequence[int]) -> StateVector:
    """Reorder qubits so new position k holds old qubit ``order[k]``."""
    n = state.num_qubits
    order = tuple(int(q) for q in order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {order} is not a permutation of 0..{n - 1}")
    arr = state.amps.reshape((2,) * n).transpose(order)
    return StateVector(n, np.ascontiguousarray(arr).reshape(-1), state.normalized)


def phase_aligned_distance(a: StateVector, b: StateVector) -> float:
    """Max amplitude difference after removing one global phase.

    The phase is read off the jointly largest amplitude, so two states that
    differ only by a unit-modulus factor score ~0 while any structural or
    norm difference shows up at full size.
    """
    if a.num_qubits != b.num_qubits:
        raise ValueError("states live on different qubit counts")
    x, y = a.amps, b.amps
    k = int(np.argmax(np.abs(x) + np.abs(y)))
    if abs(x[k]) < 1e-15 or abs(y[k]) < 1e-15:
        return float(np.max(np.abs(x - y)))
    phase = y[k] / x[k]
    phase /= abs(phase)
    return float(np.max(np.abs(phase * x - y)))


def states_equal_up_to_phase(a: StateVector, b: StateVector, atol: float = ATOL) -> bool:
    return phase_aligned_distance(a, b) <= atol


@dataclass(frozen=True)
class DensityMatrix:
    """Immutable density operator; Hermitian, unit trace, PSD (all checked)."""

    num_qubits: int
    mat: np.ndarray

    def __post_init__(self):
        n = self.num_qubits
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise ValueError("num_qubits must be a non-negative integer")
        mat = np.array(self.mat, dtype=np.complex128, copy=True)
        d = 1 << n
        if mat.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix, got {mat.shape}")
        herm_err = np.max(np.abs(mat - mat.conj().T))
        if herm_err > ATOL:
            raise ValueError(f"matrix is not Hermitian (max dev {herm_err:.3e})")
        tr = float(np.real(np.trace(mat)))
        if abs(tr - 1.0) > NORM_ATOL:
            raise ValueError(f"trace must be 1, got {tr}")
        lo = float(np.min(np.linalg.eigvalsh(mat)))
        if lo < -PSD_ATOL:
            raise ValueError(f"matrix is not positive semidefinite (min eig {lo:.3e})")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))


def density_from_state(state: StateVector) -> DensityMatrix:
    v = state.amps
    if not state.normalized:
        v = state.normalize().amps
    return DensityMatrix(state.num_qubits, np.outer(v, v.conj()))


def _trace_out_one(mat: np.ndarray, n: int, q: int) -> np.ndarray:
    a = 1 << q
    b = 1 << (n - 1 - q)
    m = mat.reshape(a, 2, b, a, 2, b)
    return (m[:, 0, :, :, 0, :] + m[:, 1, :, :, 1, :]).reshape(a * b, a * b)


def partial_trace(obj: Union[StateVector, DensityMatrix], keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on ``keep`` (ascending original order), tracing the rest."""
    keep_list = sorted({int(q) for q in keep})
    n = obj.num_qubits
    if not keep_list:
        raise ValueError("keep must name at least one qubit")
    if keep_list[0] < 0 or keep_list[-1] >= n:
        raise ValueError(f"keep {keep_list} out of range for {n} qubits")
    if isinstance(obj, StateVector):
        state = obj if obj.normalized else obj.normalize()
        traced = [q for q in range(n) if q not in keep_list]
        arr = state.amps.reshape((2,) * n).transpose(keep_list + traced)
        m = np.ascontiguousarray(arr).reshape(1 << len(keep_list), 1 << len(traced))
        return DensityMatrix(len(keep_list), m @ m.conj().T)
    mat = np.asarray(obj.mat)
    nq = n
    for q in sorted((q for q in range(n) if q not in keep_list), reverse=True):
        mat = _trace_out_one(mat, nq, q)
        nq -= 1
    return DensityMatrix(len(keep_list), mat)


def fidelity_pure(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 for normalized pure states."""
    for s in (a, b):
        if abs(s.norm_sq() - 1.0) > NORM_ATOL:
            raise ValueError("fidelity_pure requires normalized states")
    return float(abs(inner_product(a, b)) ** 2)


def fidelity_state_density(state: StateVector, rho: DensityMatrix) -> float:
    """<psi|rho|psi> for a normalized pure reference state."""
    if abs(state.norm_sq() - 1.0) > NORM_ATOL:
        raise ValueError("reference state must be normalized")
    if state.num_qubits != rho.num_qubits:
        raise ValueError("state and density matrix live on different qubit counts")
    v = state.amps
    return float(np.real(np.vdot(v, rho.mat @ v)))


def _as_density(obj: Union[StateVector, DensityMatrix]) -> DensityMatrix:
    return density_from_state(obj) if isinstance(obj, StateVector) else obj


def trace_distance(a, b) -> float:
    """(1/2) tr |a - b| for density operators (states are promoted)."""
    ra, rb = _as_density(a), _as_density(b)
    if ra.num_qubits != rb.num_qubits:
        raise ValueError("operators live on different qubit counts")
    diff = ra.mat - rb.mat
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))


def von_neumann_entropy(obj) -> float:
    """Entropy in bits; eigenvalues below 1e-15 are treated as exact zeros."""
    rho = _as_density(obj)
    lam = np.linalg.eigvalsh(rho.mat)
    lam = lam[lam > 1e-15]
    return float(-np.sum(lam * np.log2(lam)))


def mutual_information(obj, part_a: Iterable[int], part_b: Iterable[int]) -> float:
    """I(A:B) = S(A) + S(B) - S(AB), in bits."""
    a = sorted({int(q) for q in part_a})
    b = sorted({int(q) for q in part_b})
    if set(a) & set(b):
        raise ValueError("parts must be disjoint")
    s_a = von_neumann_entropy(partial_trace(obj, a))
    s_b = von_neumann_entropy(partial_trace(obj, b))
    s_ab = von_neumann_entropy(partial_trace(obj, a + b))
    return s_a + s_b - s_ab
