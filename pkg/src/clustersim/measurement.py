"""Bell-basis measurements and the three-outcome recovery POVM.

Measurement never mutates its input state: distribution functions return
unnormalized remainders whose squared norms are the outcome probabilities,
and sampling functions return fresh normalized collapsed states.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from . import kernels
from .core import StateVector, apply_matrix_1q

RngLike = Union[int, np.random.Generator]

_ZERO_PROB = 1e-15  # branches at or below this are never sampled


def as_rng(rng: RngLike) -> np.random.Generator:
    """Accept a ready generator or an unsigned 64-bit seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    seed = int(rng)
    if not 0 <= seed < (1 << 64):
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    return np.random.default_rng(seed)


class BellOutcome(enum.Enum):
    """The four Bell states with their two-bit wire codes."""

    PHI_PLUS = "00"
    PHI_MINUS = "01"
    PSI_PLUS = "10"
    PSI_MINUS = "11"

    @property
    def code(self) -> str:
        return self.value

    @classmethod
    def from_code(cls, code: str) -> "BellOutcome":
        for member in cls:
            if member.value == code:
                return member
        raise ValueError(f"malformed outcome bits {code!r}")

    @property
    def is_phi(self) -> bool:
        return self in (BellOutcome.PHI_PLUS, BellOutcome.PHI_MINUS)

    @property
    def sign(self) -> int:
        """+1 for the |..> + |..> states, -1 for the |..> - |..> states."""
        return 1 if self in (BellOutcome.PHI_PLUS, BellOutcome.PSI_PLUS) else -1

    @property
    def display(self) -> str:
        kind = "Phi" if self.is_phi else "Psi"
        return kind + ("+" if self.sign > 0 else "-")

    @classmethod
    def from_display(cls, text: str) -> "BellOutcome":
        for member in cls:
            if member.display == text:
                return member
        raise ValueError(f"unknown Bell state label {text!r}")


def _bell_vec(i: int, j: int, sign: int) -> np.ndarray:
    v = np.zeros(4, dtype=np.complex128)
    v[i] = 1.0 / np.sqrt(2.0)
    v[j] = sign / np.sqrt(2.0)
    v.setflags(write=False)
    return v


BELL_VECTORS = {
    BellOutcome.PHI_PLUS: _bell_vec(0, 3, +1),
    BellOutcome.PHI_MINUS: _bell_vec(0, 3, -1),
    BellOutcome.PSI_PLUS: _bell_vec(1, 2, +1),
    BellOutcome.PSI_MINUS: _bell_vec(1, 2, -1),
}


def _check_pair(state: StateVector, pair: Sequence[int]) -> Tuple[int, int]:
    if len(pair) != 2:
        raise ValueError("pair must name exactly two qubits")
    q0, q1 = int(pair[0]), int(pair[1])
    if q0 == q1:
        raise ValueError("pair qubits must be distinct")
    for q in (q0, q1):
        if not 0 <= q < state.num_qubits:
            raise ValueError(f"qubit {q} out of range for {state.num_qubits}-qubit state")
    return q0, q1


def collapse_qubit_onto(state: StateVector, q: int, direction: np.ndarray) -> StateVector:
    """Unnormalized remainder after projecting qubit q onto <direction|."""
    if not 0 <= q < state.num_qubits:
        raise ValueError(f"qubit {q} out of range for {state.num_qubits}-qubit state")
    bra = np.ascontiguousarray(direction, dtype=np.complex128)
    if bra.shape != (2,):
        raise ValueError("direction must be a length-2 vector")
    rem = kernels.project_single(state.amps, state.num_qubits, q, bra)
    return StateVector(state.num_qubits - 1, rem, normalized=False)


def bell_distribution(
    state: StateVector, pair: Sequence[int]
) -> List[Tuple[BellOutcome, float, StateVector]]:
    """All four Bell outcomes for a pair, with probabilities and remainders.

    Remainders are unnormalized; their squared norms are the probabilities,
    which sum to 1 for a normalized input.
    """
    q0, q1 = _check_pair(state, pair)
    if abs(state.norm_sq() - 1.0) > 1e-9:
        raise ValueError("bell_distribution requires a normalized state")
    n = state.num_qubits
    result = []
    total = 0.0
    for outcome in BellOutcome:
        rem = kernels.project_pair(state.amps, n, q0, q1, BELL_VECTORS[outcome])
        p = float(np.real(np.vdot(rem, rem)))
        total += p
        result.append((outcome, p, StateVector(n - 2, rem, normalized=False)))
    if abs(total - 1.0) > 1e-9:
        raise RuntimeError(f"Bell branch probabilities sum to {total}, not 1")
    return result


def _pick(entries, r: float):
    """Cumulative draw over (item, prob); zero-probability items never win."""
    acc = 0.0
    last = None
    for item, p in entries:
        if p <= _ZERO_PROB:
            continue
        acc += p
        last = item
        if r < acc:
            return item
    if last is None:
        raise RuntimeError("no outcome has positive probability")
    return last  # r fell into the roundoff tail past the last branch


def bsm_sample(
    state: StateVector, pair: Sequence[int], rng: RngLike
) -> Tuple[BellOutcome, StateVector, float]:
    """Sample a Bell measurement of the pair.

    Returns (outcome, normalized collapsed remainder, outcome probability).
    """
    gen = as_rng(rng)
    dist = bell_distribution(state, pair)
    r = float(gen.random())
    chosen = _pick([((o, p, rem), p) for o, p, rem in dist], r)
    outcome, p, rem = chosen
    return outcome, rem.normalize(), p


class PovmOutcome(enum.Enum):
    """Recovery POVM outcomes: direct success, success after a sign flip, failure."""

    DIRECT = "K1"
    SIGN_FLIP = "K2"
    FAIL = "K3"


class PovmValidityError(ValueError):
    """The requested POVM is not a POVM (an element fails positivity)."""

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


@dataclass(frozen=True, eq=False)
class PovmSet:
    """Three-outcome POVM used by the receiver's recovery step.

    m1 and m2 are the unit vectors behind the two rank-one elements
    k1 = |m1><m1|/rho and k2 = |m2><m2|/rho; k3 is literally I - k1 - k2.
    m_norm_sq is the squared normalization 1/x^2 + 1/y^2 of the raw vectors
    |0>/x +- |1>/y before unit scaling.
    """

    x: float
    y: float
    rho: float
    m_norm_sq: float
    m1: np.ndarray
    m2: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    k3: np.ndarray
    sqrt_k1: np.ndarray
    sqrt_k2: np.ndarray
    sqrt_k3: np.ndarray

    def __post_init__(self):
        for arr in (self.m1, self.m2, self.k1, self.k2, self.k3,
                    self.sqrt_k1, self.sqrt_k2, self.sqrt_k3):
            arr.setflags(write=False)

    def completeness_error(self) -> float:
        return float(np.max(np.abs(self.k1 + self.k2 + self.k3 - np.eye(2))))


def construct_povm(beta: float, gamma: float, rho: float) -> PovmSet:
    """Build the recovery POVM; gamma divides |0>, beta divides |1>.

    Signs of beta and gamma are irrelevant to validity (only squares enter
    the elements) but are kept in m1/m2 so signed channel coefficients
    cancel during collapse. Raises PovmValidityError when K3 = I - K1 - K2
    has a negative eigenvalue, i.e. rho < 2 max(beta^2, gamma^2) / (beta^2
    + gamma^2).
    """
    beta = float(beta)
    gamma = float(gamma)
    rho = float(rho)
    if not (np.isfinite(beta) and np.isfinite(gamma) and np.isfinite(rho)):
        raise ValueError("POVM parameters must be finite")
    if abs(beta) < 1e-12 or abs(gamma) < 1e-12:
        raise ValueError("POVM coefficients must be nonzero")
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    s = 1.0 / gamma**2 + 1.0 / beta**2
    m1 = np.array([1.0 / gamma, 1.0 / beta], dtype=np.complex128) / np.sqrt(s)
    m2 = np.array([1.0 / gamma, -1.0 / beta], dtype=np.complex128) / np.sqrt(s)
    k1 = np.outer(m1, m1.conj()) / rho
    k2 = np.outer(m2, m2.conj()) / rho
    k3 = np.eye(2, dtype=np.complex128) - k1 - k2
    lam = np.linalg.eigvalsh(k3)
    lo = float(lam[0])
    if lo < -1e-12:
        raise PovmValidityError(
            f"POVM K3 not positive semidefinite (min eigenvalue {lo:.6e})", lo
        )
    return PovmSet(
        x=gamma,
        y=beta,
        rho=rho,
        m_norm_sq=s,
        m1=m1,
        m2=m2,
        k1=k1,
        k2=k2,
        k3=k3,
        sqrt_k1=np.outer(m1, m1.conj()) / np.sqrt(rho),
        sqrt_k2=np.outer(m2, m2.conj()) / np.sqrt(rho),
        sqrt_k3=_psd_sqrt(k3),
    )


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    lam, vec = np.linalg.eigh(m)
    lam = np.clip(lam, 0.0, None)
    return (vec * np.sqrt(lam)) @ vec.conj().T


def povm_probabilities(
    state: StateVector, target: int, povm: PovmSet
) -> Tuple[float, float, float]:
    """(P(K1), P(K2), P(K3)) for measuring the target qubit; input may be
    unnormalized (probabilities are relative to its norm)."""
    if not 0 <= target < state.num_qubits:
        raise ValueError(f"qubit {target} out of range")
    nsq = state.norm_sq()
    if nsq <= 1e-28:
        raise ValueError("cannot measure a (numerically) zero state")
    amps = state.amps
    n = state.num_qubits
    r1 = kernels.project_single(amps, n, target, povm.m1)
    r2 = kernels.project_single(amps, n, target, povm.m2)
    p1 = float(np.real(np.vdot(r1, r1))) / povm.rho / nsq
    p2 = float(np.real(np.vdot(r2, r2))) / povm.rho / nsq
    p3 = max(0.0, 1.0 - p1 - p2)
    return p1, p2, p3


def povm_sample(
    state: StateVector, target: int, povm: PovmSet, rng: RngLike
) -> Tuple[PovmOutcome, StateVector, float]:
    """Sample the POVM on the target qubit.

    Returns (outcome, normalized post-measurement state via the Kraus
    collapse sqrt(K)|psi>, outcome probability).
    """
    gen = as_rng(rng)
    p1, p2, p3 = povm_probabilities(state, target, povm)
    r = float(gen.random())
    outcome = _pick(
        [(PovmOutcome.DIRECT, p1), (PovmOutcome.SIGN_FLIP, p2), (PovmOutcome.FAIL, p3)],
        r,
    )
    if outcome is PovmOutcome.DIRECT:
        kraus, p = povm.sqrt_k1, p1
    elif outcome is PovmOutcome.SIGN_FLIP:
        kraus, p = povm.sqrt_k2, p2
    else:
        kraus, p = povm.sqrt_k3, p3
    collapsed = apply_matrix_1q(state, target, kraus).normalize()
    return outcome, collapsed, p
