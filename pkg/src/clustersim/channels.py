"""Quantum channel construction and labeled system registers."""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from .core import StateVector, tensor
from .measurement import BELL_VECTORS, BellOutcome
from .runtime import PartyId

MIN_RANDOM_COEFF = 0.05


class OwnershipError(Exception):
    """A party tried to act on a qubit it does not own."""


def _require_real(name: str, value) -> float:
    if isinstance(value, complex) or not isinstance(value, numbers.Real):
        raise ValueError(f"{name} must be a real number")
    v = float(value)
    if not np.isfinite(v):
        raise ValueError(f"{name} must be finite")
    return v


@dataclass(frozen=True)
class ClusterParams:
    """Coefficients of the four-qubit channel alpha|0000> + beta|1010> +
    gamma|0101> - eta|1111>.

    All four are nonzero reals (signs allowed) whose squares sum to 1
    within 1e-12.
    """

    alpha: float
    beta: float
    gamma: float
    eta: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "eta"):
            v = _require_real(name, getattr(self, name))
            if abs(v) < 1e-12:
                raise ValueError(f"{name} must be nonzero")
            object.__setattr__(self, name, v)
        ssq = self.alpha**2 + self.beta**2 + self.gamma**2 + self.eta**2
        if abs(ssq - 1.0) > 1e-12:
            raise ValueError(f"coefficient squares must sum to 1, got {ssq!r}")

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.eta)

    def coefficient(self, name: str) -> float:
        if name not in ("alpha", "beta", "gamma", "eta"):
            raise ValueError(f"unknown coefficient {name!r}")
        return getattr(self, name)


def maximal_cluster() -> ClusterParams:
    """The uniform channel (all coefficients 1/2)."""
    return ClusterParams(0.5, 0.5, 0.5, 0.5)


def make_cluster(params: ClusterParams) -> StateVector:
    amps = np.zeros(16, dtype=np.complex128)
    amps[0b0000] = params.alpha
    amps[0b1010] = params.beta
    amps[0b0101] = params.gamma
    amps[0b1111] = -params.eta
    return StateVector(4, amps)


def make_bell(kind: BellOutcome) -> StateVector:
    return StateVector(2, BELL_VECTORS[kind])


def random_cluster_params(
    rng: np.random.Generator, min_coeff: float = MIN_RANDOM_COEFF
) -> ClusterParams:
    """Uniform draw on the coefficient sphere, rejecting tiny coefficients."""
    while True:
        v = rng.normal(size=4)
        v /= np.linalg.norm(v)
        if np.min(np.abs(v)) >= min_coeff:
            return ClusterParams(*v)


@dataclass(frozen=True)
class SingleInput:
    """One-qubit message state amp0|0> + amp1|1>, normalized."""

    amp0: complex
    amp1: complex

    def __post_init__(self):
        a = complex(self.amp0)
        b = complex(self.amp1)
        if not (np.isfinite(a.real) and np.isfinite(a.imag)
                and np.isfinite(b.real) and np.isfinite(b.imag)):
            raise ValueError("amplitudes must be finite")
        nsq = abs(a) ** 2 + abs(b) ** 2
        if abs(nsq - 1.0) > 1e-9:
            raise ValueError(f"|amp0|^2 + |amp1|^2 must be 1, got {nsq!r}")
        object.__setattr__(self, "amp0", a)
        object.__setattr__(self, "amp1", b)

    def state(self) -> StateVector:
        return StateVector(1, np.array([self.amp0, self.amp1]))


@dataclass(frozen=True)
class TwoInput:
    """Two-qubit message state over |00>, |01>, |10>, |11>, normalized."""

    amp00: complex
    amp01: complex
    amp10: complex
    amp11: complex

    def __post_init__(self):
        vals = []
        for name in ("amp00", "amp01", "amp10", "amp11"):
            v = complex(getattr(self, name))
            if not (np.isfinite(v.real) and np.isfinite(v.imag)):
                raise ValueError("amplitudes must be finite")
            object.__setattr__(self, name, v)
            vals.append(v)
        nsq = sum(abs(v) ** 2 for v in vals)
        if abs(nsq - 1.0) > 1e-9:
            raise ValueError(f"amplitude squares must sum to 1, got {nsq!r}")

    def state(self) -> StateVector:
        return StateVector(2, np.array([self.amp00, self.amp01, self.amp10, self.amp11]))


def random_single_input(rng: np.random.Generator) -> SingleInput:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return SingleInput(v[0], v[1])


def random_two_input(rng: np.random.Generator) -> TwoInput:
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    v /= np.linalg.norm(v)
    return TwoInput(v[0], v[1], v[2], v[3])


@dataclass(frozen=True)
class RegisterMap:
    """Ordered qubit labels plus which party owns each one."""

    labels: Tuple[str, ...]
    owners: Mapping[str, PartyId]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        if not labels:
            raise ValueError("register must name at least one qubit")
        if len(set(labels)) != len(labels):
            raise ValueError("register label collision")
        for lab in labels:
            if not lab or any(ch in lab for ch in " \t\n,|"):
                raise ValueError(f"bad register label {lab!r}")
        owners = dict(self.owners)
        if set(owners) != set(labels):
            raise ValueError("owners must cover exactly the register labels")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "owners", MappingProxyType(owners))

    @property
    def size(self) -> int:
        return len(self.labels)

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"label {label!r} not in register {self.labels}")

    def indices_of(self, labels: Sequence[str]) -> Tuple[int, ...]:
        return tuple(self.index_of(lab) for lab in labels)

    def owner_of(self, label: str) -> PartyId:
        self.index_of(label)
        return self.owners[label]

    def owned_by(self, party: PartyId) -> Tuple[str, ...]:
        return tuple(lab for lab in self.labels if self.owners[lab] is party)

    def require_owner(self, party: PartyId, labels: Sequence[str]) -> None:
        for lab in labels:
            owner = self.owner_of(lab)
            if owner is not party:
                raise OwnershipError(
                    f"{party.value} cannot act on qubit {lab!r} owned by {owner.value}"
                )

    def without(self, labels: Sequence[str]) -> "RegisterMap":
        drop = set(labels)
        for lab in drop:
            self.index_of(lab)
        kept = tuple(lab for lab in self.labels if lab not in drop)
        return RegisterMap(kept, {lab: self.owners[lab] for lab in kept})


def compose_system(parts: Sequence[StateVector], register: RegisterMap) -> StateVector:
    """Tensor the parts in order; the register labels the resulting qubits."""
    total = sum(p.num_qubits for p in parts)
    if total != register.size:
        raise ValueError(
            f"register names {register.size} qubits but parts supply {total}"
        )
    state = parts[0]
    for p in parts[1:]:
        state = tensor(state, p)
    return state


def teleport_register() -> RegisterMap:
    """Message qubit A plus cluster 1..4: Alice (A,1), Bob (2,3), Chika (4)."""
    owners = {
        "A": PartyId.ALICE,
        "1": PartyId.ALICE,
        "2": PartyId.BOB,
        "3": PartyId.BOB,
        "4": PartyId.CHIKA,
    }
    return RegisterMap(("A", "1", "2", "3", "4"), owners)


def qis_register() -> RegisterMap:
    """Message pair (a,b), cluster 1..4, Bell pair (5,6): Alice (a,b,1,6),
    Bob (2,3), Chika (4,5)."""
    owners = {
        "a": PartyId.ALICE,
        "b": PartyId.ALICE,
        "1": PartyId.ALICE,
        "2": PartyId.BOB,
        "3": PartyId.BOB,
        "4": PartyId.CHIKA,
        "5": PartyId.CHIKA,
        "6": PartyId.ALICE,
    }
    return RegisterMap(("a", "b", "1", "2", "3", "4", "5", "6"), owners)


def insert_listener(register: RegisterMap, after: str, label: str = "E") -> RegisterMap:
    """Register with an Eve-owned qubit spliced in after an existing label."""
    pos = register.index_of(after) + 1
    labels = register.labels[:pos] + (label,) + register.labels[pos:]
    owners = dict(register.owners)
    owners[label] = PartyId.EVE
    return RegisterMap(labels, owners)
