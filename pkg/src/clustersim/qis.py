"""Splitting a two-qubit state across three parties and reassembling it.

Alice holds the message pair (a,b) plus cluster qubit 1 and Bell qubit 6;
Bob holds cluster qubits 2 and 3; Chika holds cluster qubit 4 and Bell
qubit 5. Three announced Bell measurements leave Chika's pair one phased
Pauli word away from the message. The published 64-row correction table is
transcribed verbatim (typos included) and adjudicated against corrections
synthesized from the simulated branches.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from . import kernels
from .channels import (
    ClusterParams,
    TwoInput,
    compose_system,
    make_bell,
    make_cluster,
    maximal_cluster,
    qis_register,
)
from .core import (
    I2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    DensityMatrix,
    StateVector,
    partial_trace,
    phase_aligned_distance,
    trace_distance,
)
from .measurement import BELL_VECTORS, BellOutcome, bsm_sample
from .runtime import InMemoryTransport, PartyId, SeedStreams, Stage, Transcript, Transport

_PAULI = {"I": I2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}
_PHASES = (1 + 0j, -1 + 0j, 1j, -1j)
_PHASE_PREFIX = {1 + 0j: "", -1 + 0j: "-", 1j: "i", -1j: "-i"}


@dataclass(frozen=True)
class CorrectionWord:
    """A phased two-qubit Pauli word, e.g. -i (Y (x) Z)."""

    left: str
    right: str
    phase: complex = 1 + 0j

    def __post_init__(self):
        if self.left not in _PAULI or self.right not in _PAULI:
            raise ValueError(f"unknown Pauli letter in ({self.left!r}, {self.right!r})")
        ph = complex(self.phase)
        snapped = min(_PHASES, key=lambda p: abs(ph - p))
        if abs(ph - snapped) > 1e-9:
            raise ValueError(f"phase must be one of 1, -1, i, -i; got {ph}")
        object.__setattr__(self, "phase", snapped)

    def matrix(self) -> np.ndarray:
        return self.phase * np.kron(_PAULI[self.left], _PAULI[self.right])

    def canonical(self) -> "CorrectionWord":
        return CorrectionWord(self.left, self.right, 1)

    def same_up_to_phase(self, other: "CorrectionWord") -> bool:
        return self.left == other.left and self.right == other.right

    def label(self) -> str:
        return f"{_PHASE_PREFIX[self.phase]}{self.left}x{self.right}"


def _parse_factor(token: str) -> Tuple[complex, str]:
    phase = 1 + 0j
    if token.startswith("-"):
        phase = -1 + 0j
        token = token[1:]
    if token.startswith("i"):
        phase *= 1j
        token = token[1:]
    if token not in _PAULI:
        raise ValueError(f"bad Pauli factor {token!r}")
    return phase, token


def parse_word(text: str) -> CorrectionWord:
    """Parse 'Z.I', '-iY.Z', 'I.-iY' style word notation."""
    left_s, right_s = text.split(".")
    pl, left = _parse_factor(left_s)
    pr, right = _parse_factor(right_s)
    return CorrectionWord(left, right, pl * pr)


@dataclass(frozen=True)
class QisOutcomeKey:
    """The three announced Bell outcomes addressing one branch."""

    alice1: BellOutcome
    alice2: BellOutcome
    bob: BellOutcome

    def display(self) -> str:
        return f"{self.alice1.display},{self.alice2.display},{self.bob.display}"


def all_outcome_keys() -> Iterable[QisOutcomeKey]:
    for a1 in BellOutcome:
        for a2 in BellOutcome:
            for b in BellOutcome:
                yield QisOutcomeKey(a1, a2, b)


def analytic_qis_outcome(inp: TwoInput, key: QisOutcomeKey) -> StateVector:
    """Chika's unnormalized pair after the three announcements, closed form.

    Eight sign families over (alice1, alice2, bob) kinds; verified against
    direct projection term by term (these are projection-exact, including
    global phase).
    """
    s1, s2, s3 = key.alice1.sign, key.alice2.sign, key.bob.sign
    a, b = inp.amp00, inp.amp01
    c, d = inp.amp10, inp.amp11
    p1, p2, p3 = key.alice1.is_phi, key.alice2.is_phi, key.bob.is_phi
    if p1 and p2 and p3:
        amps = [a, s2 * b, -s1 * s3 * c, -s1 * s2 * s3 * d]
    elif p1 and p2:
        amps = [s1 * c, s1 * s2 * d, s3 * a, s2 * s3 * b]
    elif p1 and p3:
        amps = [s2 * b, a, -s1 * s2 * s3 * d, -s1 * s3 * c]
    elif p1:
        amps = [s1 * s2 * d, s1 * c, s2 * s3 * b, s3 * a]
    elif p2 and p3:
        amps = [s1 * c, s1 * s2 * d, -s3 * a, -s2 * s3 * b]
    elif p2:
        amps = [a, s2 * b, s1 * s3 * c, s1 * s2 * s3 * d]
    elif p3:
        amps = [s1 * s2 * d, s1 * c, -s2 * s3 * b, -s3 * a]
    else:
        amps = [s2 * b, a, s1 * s2 * s3 * d, s1 * s3 * c]
    return StateVector(2, 0.125 * np.array(amps, dtype=np.complex128), normalized=False)


def projected_branch(
    inp: TwoInput, key: QisOutcomeKey, cluster: Optional[ClusterParams] = None
) -> StateVector:
    """Chika's unnormalized pair via direct projection of the full system."""
    params = cluster if cluster is not None else maximal_cluster()
    reg = qis_register()
    state = compose_system(
        [inp.state(), make_cluster(params), make_bell(BellOutcome.PHI_PLUS)], reg
    )
    # register order is a,b,1,2,3,4,5,6; project (a,1), then (b,6), then (2,3)
    amps = kernels.project_pair(state.amps, 8, 0, 2, BELL_VECTORS[key.alice1])
    amps = kernels.project_pair(amps, 6, 0, 5, BELL_VECTORS[key.alice2])
    amps = kernels.project_pair(amps, 4, 0, 1, BELL_VECTORS[key.bob])
    return StateVector(2, amps, normalized=False)


# --- published correction table, transcribed verbatim (including typos) ----
#
# Columns: alice1, alice2, bob result as printed, Chika's state as printed,
# correction word as printed. Single letters a..d stand for the four message
# amplitudes in ket order. Two known defect families are carried as-is:
# eight rows print Chika's state with a repeated ket, and eight rows print
# Bob's result as |01>+-|11>, which is not a Bell state.

_RAW_TABLE1 = (
    ("Phi+", "Phi+", "|00>+|11>", "a|00>+b|01>-c|10>-d|11>", "Z.I"),
    ("Phi-", "Phi+", "|00>+|11>", "a|00>+b|01>+c|10>+d|11>", "I.I"),
    ("Phi+", "Phi-", "|00>+|11>", "a|00>-b|01>-c|10>+d|11>", "Z.Z"),
    ("Phi-", "Phi-", "|00>+|11>", "a|00>-b|01>+c|10>-d|11>", "I.Z"),
    ("Phi+", "Phi+", "|00>-|11>", "a|00>+b|01>+c|10>+d|11>", "I.I"),
    ("Phi-", "Phi+", "|00>-|11>", "a|00>+b|01>-c|10>-d|11>", "Z.I"),
    ("Phi+", "Phi-", "|00>-|11>", "a|00>-b|01>+c|10>-d|11>", "I.Z"),
    ("Phi-", "Phi-", "|00>-|11>", "a|00>-b|01>-c|10>+d|11>", "Z.Z"),
    ("Phi+", "Phi+", "|01>+|10>", "a|10>+b|11>+c|10>+d|01>", "X.I"),
    ("Phi-", "Phi+", "|01>+|10>", "a|10>+b|11>-c|10>-d|01>", "-iY.I"),
    ("Phi+", "Phi-", "|01>+|10>", "a|10>-b|11>+c|10>-d|01>", "X.Z"),
    ("Phi-", "Phi-", "|01>+|10>", "a|10>-b|11>-c|10>+d|01>", "-iY.Z"),
    ("Phi+", "Phi+", "|01>-|10>", "-a|10>-b|11>+c|10>+d|01>", "iY.I"),
    ("Phi-", "Phi+", "|01>-|10>", "-a|10>-b|11>-c|10>-d|01>", "-X.I"),
    ("Phi+", "Phi-", "|01>-|10>", "-a|10>+b|11>+c|10>-d|01>", "iY.Z"),
    ("Phi-", "Phi-", "|01>-|10>", "-a|10>+b|11>-c|10>+d|01>", "-X.Z"),
    ("Phi+", "Psi+", "|00>+|11>", "a|01>+b|00>-c|11>-d|10>", "Z.X"),
    ("Phi-", "Psi+", "|00>+|11>", "a|01>+b|00>+c|11>+d|10>", "I.X"),
    ("Phi+", "Psi-", "|00>+|11>", "a|01>-b|00>-c|11>+d|10>", "Z.-iY"),
    ("Phi-", "Psi-", "|00>+|11>", "a|01>-b|00>+c|11>-d|10>", "I.-iY"),
    ("Phi+", "Psi+", "|00>-|11>", "a|01>+b|00>+c|11>+d|10>", "I.X"),
    ("Phi-", "Psi+", "|00>-|11>", "a|01>+b|00>-c|11>-d|10>", "Z.X"),
    ("Phi+", "Psi-", "|00>-|11>", "a|01>-b|00>+c|11>-d|10>", "I.-iY"),
    ("Phi-", "Psi-", "|00>-|11>", "a|01>-b|00>-c|11>+d|10>", "Z.-iY"),
    ("Phi+", "Psi+", "|01>+|10>", "a|11>+b|10>+c|01>+d|00>", "X.X"),
    ("Phi-", "Psi+", "|01>+|10>", "a|11>+b|10>-c|01>-d|00>", "-iY.X"),
    ("Phi+", "Psi-", "|01>+|10>", "a|11>-b|10>+c|01>-d|00>", "X.-iY"),
    ("Phi-", "Psi-", "|01>+|10>", "a|11>-b|10>-c|01>+d|00>", "-iY.-iY"),
    ("Phi+", "Psi+", "|01>-|10>", "-a|11>-b|10>+c|01>+d|00>", "iY.X"),
    ("Phi-", "Psi+", "|01>-|10>", "-a|11>-b|10>-c|01>-d|00>", "-X.X"),
    ("Phi+", "Psi-", "|01>-|10>", "-a|11>+b|10>+c|01>-d|00>", "-iY.iY"),
    ("Phi-", "Psi-", "|01>-|10>", "-a|11>+b|10>-c|01>+d|00>", "X.iY"),
    ("Psi+", "Phi+", "|00>+|11>", "-a|10>-b|11>+c|00>+d|01>", "iY.I"),
    ("Psi-", "Phi+", "|00>+|11>", "-a|10>-b|11>-c|00>-d|01>", "-X.I"),
    ("Psi+", "Phi-", "|00>+|11>", "-a|10>+b|11>+c|00>-d|01>", "iY.Z"),
    ("Psi-", "Phi-", "|00>+|11>", "-a|10>+b|11>-c|00>+d|01>", "-X.Z"),
    ("Psi+", "Phi+", "|00>-|11>", "a|10>+b|11>+c|00>+d|01>", "X.I"),
    ("Psi-", "Phi+", "|00>-|11>", "a|10>+b|11>-c|00>-d|01>", "-iY.I"),
    ("Psi+", "Phi-", "|00>-|11>", "a|10>-b|11>+c|00>-d|01>", "X.Z"),
    ("Psi-", "Phi-", "|00>-|11>", "a|10>-b|11>-c|00>+d|01>", "-iY.Z"),
    ("Psi+", "Phi+", "|01>+|11>", "a|00>+b|01>+c|10>+d|11>", "I.I"),
    ("Psi-", "Phi+", "|01>+|11>", "a|00>+b|01>-c|10>-d|11>", "Z.I"),
    ("Psi+", "Phi-", "|01>+|11>", "a|00>-b|01>+c|10>-d|11>", "I.Z"),
    ("Psi-", "Phi-", "|01>+|11>", "a|00>-b|01>-c|10>+d|11>", "Z.Z"),
    ("Psi+", "Phi+", "|01>-|11>", "a|00>+b|01>-c|10>-d|11>", "Z.I"),
    ("Psi-", "Phi+", "|01>-|11>", "a|00>+b|01>+c|10>+d|11>", "I.I"),
    ("Psi+", "Phi-", "|01>-|11>", "a|00>-b|01>-c|10>+d|11>", "Z.Z"),
    ("Psi-", "Phi-", "|01>-|11>", "a|00>-b|01>+c|10>-d|11>", "I.Z"),
    ("Psi+", "Psi+", "|00>+|11>", "-a|11>-b|10>+c|01>+d|00>", "iY.X"),
    ("Psi-", "Psi+", "|00>+|11>", "-a|11>-b|10>-c|01>-d|00>", "-X.X"),
    ("Psi+", "Psi-", "|00>+|11>", "-a|11>+b|10>+c|01>-d|00>", "-iY.iY"),
    ("Psi-", "Psi-", "|00>+|11>", "-a|11>+b|10>-c|01>+d|00>", "X.iY"),
    ("Psi+", "Psi+", "|00>-|11>", "a|11>+b|10>+c|01>+d|00>", "X.X"),
    ("Psi-", "Psi+", "|00>-|11>", "a|11>+b|10>-c|01>-d|00>", "-iY.X"),
    ("Psi+", "Psi-", "|00>-|11>", "a|11>-b|10>+c|01>-d|00>", "X.-iY"),
    ("Psi-", "Psi-", "|00>-|11>", "a|11>-b|10>-c|01>+d|00>", "-iY.-iY"),
    ("Psi+", "Psi+", "|01>+|10>", "a|01>+b|00>+c|11>+d|10>", "I.X"),
    ("Psi-", "Psi+", "|01>+|10>", "a|01>+b|00>-c|11>-d|10>", "Z.X"),
    ("Psi+", "Psi-", "|01>+|10>", "a|01>-b|00>+c|11>-d|10>", "I.-iY"),
    ("Psi-", "Psi-", "|01>+|10>", "a|01>-b|00>-c|11>+d|10>", "Z.-iY"),
    ("Psi+", "Psi+", "|01>-|10>", "a|01>+b|00>-c|11>-d|10>", "Z.X"),
    ("Psi-", "Psi+", "|01>-|10>", "a|01>+b|00>+c|11>+d|10>", "I.X"),
    ("Psi+", "Psi-", "|01>-|10>", "a|01>-b|00>-c|11>+d|10>", "Z.-iY"),
    ("Psi-", "Psi-", "|01>-|10>", "a|01>-b|00>+c|11>-d|10>", "I.-iY"),
)

_BOB_LABELS = {
    "|00>+|11>": BellOutcome.PHI_PLUS,
    "|00>-|11>": BellOutcome.PHI_MINUS,
    "|01>+|10>": BellOutcome.PSI_PLUS,
    "|01>-|10>": BellOutcome.PSI_MINUS,
}
# Non-Bell labels in the published table, adjudicated by their printed sign.
_BOB_LABEL_FIXUPS = {
    "|01>+|11>": BellOutcome.PSI_PLUS,
    "|01>-|11>": BellOutcome.PSI_MINUS,
}


@dataclass(frozen=True)
class Table1Row:
    index: int
    alice1: BellOutcome
    alice2: BellOutcome
    bob_as_printed: str
    bob: BellOutcome
    state_as_printed: str
    word_as_printed: str
    word: CorrectionWord

    @property
    def key(self) -> QisOutcomeKey:
        return QisOutcomeKey(self.alice1, self.alice2, self.bob)

    @property
    def bob_label_is_bell(self) -> bool:
        return self.bob_as_printed in _BOB_LABELS


def _build_table() -> Tuple[Table1Row, ...]:
    rows = []
    for idx, (a1_s, a2_s, bob_s, state_s, word_s) in enumerate(_RAW_TABLE1, start=1):
        if bob_s in _BOB_LABELS:
            bob = _BOB_LABELS[bob_s]
        elif bob_s in _BOB_LABEL_FIXUPS:
            bob = _BOB_LABEL_FIXUPS[bob_s]
        else:
            raise RuntimeError(f"table row {idx}: unreadable Bob label {bob_s!r}")
        rows.append(
            Table1Row(
                index=idx,
                alice1=BellOutcome.from_display(a1_s),
                alice2=BellOutcome.from_display(a2_s),
                bob_as_printed=bob_s,
                bob=bob,
                state_as_printed=state_s,
                word_as_printed=word_s,
                word=parse_word(word_s),
            )
        )
    keys = {r.key for r in rows}
    if len(rows) != 64 or len(keys) != 64:
        raise RuntimeError("correction table must cover all 64 outcome keys")
    return tuple(rows)


TABLE1 = _build_table()
_TABLE1_BY_KEY: Dict[QisOutcomeKey, Table1Row] = {r.key: r for r in TABLE1}


def table1_lookup(key: QisOutcomeKey) -> CorrectionWord:
    return _TABLE1_BY_KEY[key].word


def table1_row(key: QisOutcomeKey) -> Table1Row:
    return _TABLE1_BY_KEY[key]


_TERM_RE = re.compile(r"([+-]?)([abcd])\|([01]{2})>")
_AMP_BY_LETTER = {"a": "amp00", "b": "amp01", "c": "amp10", "d": "amp11"}


def _parse_state_column(text: str) -> List[Tuple[int, str, int]]:
    terms = []
    consumed = 0
    for m in _TERM_RE.finditer(text):
        if m.start() != consumed:
            raise ValueError(f"unreadable state column {text!r}")
        consumed = m.end()
        sign = -1 if m.group(1) == "-" else 1
        terms.append((sign, m.group(2), int(m.group(3), 2)))
    if consumed != len(text) or len(terms) != 4:
        raise ValueError(f"unreadable state column {text!r}")
    return terms


def _state_column_vector(row: Table1Row, inp: TwoInput) -> np.ndarray:
    v = np.zeros(4, dtype=np.complex128)
    for sign, letter, ket in _parse_state_column(row.state_as_printed):
        v[ket] += sign * getattr(inp, _AMP_BY_LETTER[letter])
    return v


def synthesize_all(
    branch: StateVector, inp: TwoInput, threshold: float = 1.0 - 1e-10
) -> Tuple[Tuple[CorrectionWord, float], ...]:
    """All Pauli words that map the branch onto the message above threshold."""
    target = inp.state().amps
    v = branch.normalize().amps
    hits = []
    for left in "IXYZ":
        for right in "IXYZ":
            cand = np.kron(_PAULI[left], _PAULI[right]) @ v
            ov = complex(np.vdot(target, cand))
            f = abs(ov) ** 2
            if f >= threshold:
                phase = np.conj(ov)
                snapped = min(_PHASES, key=lambda p: abs(phase - p))
                if abs(phase - snapped) > 1e-6:
                    snapped = 1 + 0j
                hits.append((CorrectionWord(left, right, snapped), f))
    return tuple(hits)


def synthesize_correction(
    branch: StateVector, inp: TwoInput, threshold: float = 1.0 - 1e-10
) -> Optional[CorrectionWord]:
    """Best Pauli word mapping the branch onto the message, or None.

    Searching the 16 canonical words suffices: a global phase never moves
    fidelity, so the 64 phased words collapse to 16 candidates; the
    returned phase is chosen to make the corrected state land on the
    message itself, not just its ray.
    """
    hits = synthesize_all(branch, inp, threshold)
    if not hits:
        return None
    return max(hits, key=lambda wf: wf[1])[0]


@dataclass(frozen=True)
class Table1RowResult:
    row: Table1Row
    oracle_word: Optional[CorrectionWord]
    paper_fidelity: float
    oracle_fidelity: float
    status: str
    notes: Tuple[str, ...]


@dataclass(frozen=True)
class Table1Report:
    results: Tuple[Table1RowResult, ...]

    @property
    def all_pass(self) -> bool:
        return all(r.status == "PASS" for r in self.results)

    @property
    def mismatches(self) -> Tuple[Table1RowResult, ...]:
        return tuple(r for r in self.results if r.status != "PASS")

    @property
    def min_oracle_fidelity(self) -> float:
        return min(r.oracle_fidelity for r in self.results)

    def render(self) -> str:
        lines = ["alice1,alice2,bob,paper_word,oracle_word,status"]
        for r in self.results:
            oracle = r.oracle_word.label() if r.oracle_word is not None else "none"
            lines.append(
                f"{r.row.key.display()},{r.row.word.label()},{oracle},{r.status}"
            )
        flagged = [(r, note) for r in self.results for note in r.notes]
        if flagged:
            lines.append("# flagged rows (annotations, not adjudication failures):")
            for r, note in flagged:
                lines.append(f"# row {r.row.index} ({r.row.key.display()}): {note}")
        n_pass = sum(1 for r in self.results if r.status == "PASS")
        lines.append(
            f"# summary: {len(self.results)} rows, {n_pass} PASS, "
            f"{len(self.results) - n_pass} MISMATCH, "
            f"min oracle fidelity {self.min_oracle_fidelity:.17g}"
        )
        return "\n".join(lines) + "\n"


def _word_fidelity(word: CorrectionWord, branch: StateVector, inp: TwoInput) -> float:
    v = branch.normalize().amps
    return float(abs(np.vdot(inp.state().amps, word.matrix() @ v)) ** 2)


def _default_check_inputs(extra: int, seed: int) -> List[TwoInput]:
    raw = np.array([0.46 + 0.13j, 0.27 - 0.21j, -0.35 + 0.11j, 0.22 - 0.56j])
    raw = raw / np.linalg.norm(raw)
    inputs = [TwoInput(*raw)]
    gen = np.random.default_rng(seed)
    for _ in range(extra):
        v = gen.normal(size=4) + 1j * gen.normal(size=4)
        v /= np.linalg.norm(v)
        inputs.append(TwoInput(*v))
    return inputs


def verify_table1(num_extra_inputs: int = 3, seed: int = 20240801) -> Table1Report:
    """Adjudicate every published row against synthesized corrections.

    Rows PASS when the printed word matches the oracle word up to global
    phase; defects in the printed state or Bob columns are reported as
    annotations, never repaired in place.
    """
    inputs = _default_check_inputs(num_extra_inputs, seed)
    results = []
    for row in TABLE1:
        branches = [projected_branch(inp, row.key) for inp in inputs]
        oracle = synthesize_correction(branches[0], inputs[0])
        paper_f = min(_word_fidelity(row.word, br, inp) for br, inp in zip(branches, inputs))
        if oracle is None:
            oracle_f = 0.0
            status = "MISMATCH"
        else:
            oracle_f = min(
                _word_fidelity(oracle, br, inp) for br, inp in zip(branches, inputs)
            )
            status = "PASS" if row.word.same_up_to_phase(oracle) else "MISMATCH"
        notes: List[str] = []
        if not row.bob_label_is_bell:
            notes.append(
                f"Bob result printed as {row.bob_as_printed}, which is not a Bell "
                f"state; adjudicated as {row.bob.display}"
            )
        terms = _parse_state_column(row.state_as_printed)
        kets = [k for _, _, k in terms]
        dupes = sorted({k for k in kets if kets.count(k) > 1})
        if dupes:
            pretty = ", ".join(f"|{k:02b}>" for k in dupes)
            notes.append(f"state column repeats ket {pretty} as printed")
        else:
            printed = _state_column_vector(row, inputs[0])
            printed_state = StateVector(2, printed, normalized=False)
            if (
                phase_aligned_distance(
                    printed_state.normalize(), branches[0].normalize()
                )
                > 1e-9
            ):
                notes.append("state column disagrees with the simulated branch state")
        results.append(
            Table1RowResult(row, oracle, paper_f, oracle_f, status, tuple(notes))
        )
    return Table1Report(tuple(results))


@dataclass(frozen=True)
class QisResult:
    key: QisOutcomeKey
    word: Optional[CorrectionWord]
    correction_source: str
    fidelity: float
    recovered: bool
    final: StateVector
    transcript: Optional[Transcript]


def _qis_params_string(cluster: ClusterParams, source: str) -> str:
    return (
        f"alpha={cluster.alpha:.17g},beta={cluster.beta:.17g},"
        f"gamma={cluster.gamma:.17g},eta={cluster.eta:.17g},source={source}"
    )


def run_qis(
    inp: TwoInput,
    rng_seed: int,
    transport: Optional[Transport] = None,
    correction_source: str = "table",
    cluster: Optional[ClusterParams] = None,
) -> QisResult:
    """One full splitting-and-reassembly run.

    correction_source picks where Chika's word comes from: the published
    table or a correction synthesized from the simulated branch. Exact
    recovery is only guaranteed on the maximal channel (the default).
    """
    if correction_source not in ("table", "synthesized"):
        raise ValueError("correction_source must be 'table' or 'synthesized'")
    params = cluster if cluster is not None else maximal_cluster()
    streams = SeedStreams(rng_seed)
    if transport is None:
        transport = InMemoryTransport(
            "qis", rng_seed, _qis_params_string(params, correction_source)
        )
    reg = qis_register()
    state = compose_system(
        [inp.state(), make_cluster(params), make_bell(BellOutcome.PHI_PLUS)], reg
    )
    reg.require_owner(PartyId.ALICE, ("a", "1"))
    o1, state, _ = bsm_sample(state, reg.indices_of(("a", "1")), streams.child())
    transport.broadcast(PartyId.ALICE, Stage.ALICE_BSM_A1, ("a", "1"), o1)
    reg = reg.without(("a", "1"))
    reg.require_owner(PartyId.ALICE, ("b", "6"))
    o2, state, _ = bsm_sample(state, reg.indices_of(("b", "6")), streams.child())
    transport.broadcast(PartyId.ALICE, Stage.ALICE_BSM_B6, ("b", "6"), o2)
    reg = reg.without(("b", "6"))
    reg.require_owner(PartyId.BOB, ("2", "3"))
    o3, state, _ = bsm_sample(state, reg.indices_of(("2", "3")), streams.child())
    transport.broadcast(PartyId.BOB, Stage.BOB_BSM_23, ("2", "3"), o3)
    reg = reg.without(("2", "3"))
    key = QisOutcomeKey(o1, o2, o3)
    reg.require_owner(PartyId.CHIKA, ("4", "5"))
    if correction_source == "table":
        word: Optional[CorrectionWord] = table1_lookup(key)
    else:
        word = synthesize_correction(state, inp)
    if word is None:
        final = state
    else:
        final = StateVector(2, word.matrix() @ state.amps)
    fidelity = float(abs(np.vdot(inp.state().amps, final.amps)) ** 2)
    return QisResult(
        key=key,
        word=word,
        correction_source=correction_source,
        fidelity=fidelity,
        recovered=fidelity >= 1.0 - 1e-9,
        final=final,
        transcript=transport.transcript,
    )


@dataclass(frozen=True)
class AccessReport:
    """Who can see what, before and after the announcements."""

    bob_pair_max_distance_to_mixed: float
    chika_pair_max_distance_to_mixed: float
    alice_averaged_chika_max_distance_to_mixed: float
    alice_averaged_chika_input_dependence: float
    post_announcement_joint_distance: float
    collaboration_fidelity_min: float

    @property
    def claim_holds(self) -> bool:
        return (
            self.bob_pair_max_distance_to_mixed <= 1e-12
            and self.chika_pair_max_distance_to_mixed <= 1e-12
            and self.alice_averaged_chika_max_distance_to_mixed <= 1e-12
            and self.alice_averaged_chika_input_dependence <= 1e-12
            and self.collaboration_fidelity_min >= 1.0 - 1e-10
        )

    def render(self) -> str:
        return "\n".join(
            [
                f"bob pair max distance to I/4: {self.bob_pair_max_distance_to_mixed:.6e}",
                f"chika pair max distance to I/4: {self.chika_pair_max_distance_to_mixed:.6e}",
                "alice-announcement-averaged chika state, max distance to I/4: "
                f"{self.alice_averaged_chika_max_distance_to_mixed:.6e}",
                "alice-announcement-averaged chika state, input dependence: "
                f"{self.alice_averaged_chika_input_dependence:.6e}",
                "joint bob+chika state after alice announcements, input dependence: "
                f"{self.post_announcement_joint_distance:.6e}",
                f"full-collaboration recovery fidelity, min over keys: "
                f"{self.collaboration_fidelity_min:.17g}",
                f"claim holds: {str(self.claim_holds).lower()}",
            ]
        ) + "\n"


def _alice_averaged_chika(inp: TwoInput, cluster: ClusterParams) -> DensityMatrix:
    reg = qis_register()
    state = compose_system(
        [inp.state(), make_cluster(cluster), make_bell(BellOutcome.PHI_PLUS)], reg
    )
    acc = np.zeros((4, 4), dtype=np.complex128)
    for k1 in BellOutcome:
        rem1 = kernels.project_pair(state.amps, 8, 0, 2, BELL_VECTORS[k1])
        for k2 in BellOutcome:
            rem2 = kernels.project_pair(rem1, 6, 0, 5, BELL_VECTORS[k2])
            m = rem2.reshape(4, 4)  # rows: Bob's (2,3); cols: Chika's (4,5)
            acc += m.T @ m.conj()
    return DensityMatrix(2, acc)


def _post_alice_joint(inp: TwoInput, cluster: ClusterParams) -> StateVector:
    reg = qis_register()
    state = compose_system(
        [inp.state(), make_cluster(cluster), make_bell(BellOutcome.PHI_PLUS)], reg
    )
    rem1 = kernels.project_pair(
        state.amps, 8, 0, 2, BELL_VECTORS[BellOutcome.PHI_PLUS]
    )
    rem2 = kernels.project_pair(rem1, 6, 0, 5, BELL_VECTORS[BellOutcome.PHI_PLUS])
    return StateVector(4, rem2, normalized=False).normalize()


def access_structure_check(
    inp_a: Optional[TwoInput] = None,
    inp_b: Optional[TwoInput] = None,
    cluster: Optional[ClusterParams] = None,
) -> AccessReport:
    """Check that no proper subset of announcements exposes the message.

    Bob's pair and Chika's pair are maximally mixed unconditionally, and
    Chika's pair remains maximally mixed (hence input-independent) even
    averaged over Alice's announced outcomes; only the full collaboration
    recovers the message. The joint Bob+Chika state after Alice's
    announcements does depend on the input, which is why Bob's cooperation
    is required rather than merely polite.
    """
    params = cluster if cluster is not None else maximal_cluster()
    if inp_a is None:
        inp_a = TwoInput(1, 0, 0, 0)
    if inp_b is None:
        raw = np.array([0.31 - 0.42j, 0.55 + 0.1j, -0.29 + 0.33j, 0.4 - 0.23j])
        raw = raw / np.linalg.norm(raw)
        inp_b = TwoInput(*raw)
    reg = qis_register()
    mixed = DensityMatrix(2, np.eye(4, dtype=np.complex128) / 4.0)
    bob_dist = 0.0
    chika_dist = 0.0
    avg_dist = 0.0
    averaged = []
    for inp in (inp_a, inp_b):
        state = compose_system(
            [inp.state(), make_cluster(params), make_bell(BellOutcome.PHI_PLUS)], reg
        )
        bob_dist = max(
            bob_dist,
            trace_distance(partial_trace(state, reg.indices_of(("2", "3"))), mixed),
        )
        chika_dist = max(
            chika_dist,
            trace_distance(partial_trace(state, reg.indices_of(("4", "5"))), mixed),
        )
        avg = _alice_averaged_chika(inp, params)
        averaged.append(avg)
        avg_dist = max(avg_dist, trace_distance(avg, mixed))
    input_dep = trace_distance(averaged[0], averaged[1])
    joint_dist = trace_distance(
        _post_alice_joint(inp_a, params), _post_alice_joint(inp_b, params)
    )
    worst = 1.0
    for key in all_outcome_keys():
        branch = projected_branch(inp_b, key, params)
        worst = min(worst, _word_fidelity(table1_lookup(key), branch, inp_b))
    return AccessReport(
        bob_pair_max_distance_to_mixed=bob_dist,
        chika_pair_max_distance_to_mixed=chika_dist,
        alice_averaged_chika_max_distance_to_mixed=avg_dist,
        alice_averaged_chika_input_dependence=input_dep,
        post_announcement_joint_distance=joint_dist,
        collaboration_fidelity_min=worst,
    )
