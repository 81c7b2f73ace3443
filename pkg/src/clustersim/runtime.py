"""Classical-side protocol runtime.

Parties, staged broadcast messages, transcripts, and in-memory transports.
The quantum side never appears here; a transport only checks that classical
messages arrive in protocol order from the party that owns the stage.
"""

from __future__ import annotations

import enum
import re
import threading
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .measurement import BellOutcome


class PartyId(enum.Enum):
    ALICE = "Alice"
    BOB = "Bob"
    CHIKA = "Chika"
    EVE = "Eve"


class Stage(enum.Enum):
    """Broadcast stages, named by who measures which labeled pair."""

    ALICE_BSM_A1 = "ALICE_BSM_A1"
    ALICE_BSM_B6 = "ALICE_BSM_B6"
    BOB_BSM_23 = "BOB_BSM_23"


STAGE_SENDER = {
    Stage.ALICE_BSM_A1: PartyId.ALICE,
    Stage.ALICE_BSM_B6: PartyId.ALICE,
    Stage.BOB_BSM_23: PartyId.BOB,
}

# Stage cycle per protocol; teleport repeats the cycle once per retry.
PROTOCOL_STAGES = {
    "teleport": (Stage.ALICE_BSM_A1, Stage.BOB_BSM_23),
    "qis": (Stage.ALICE_BSM_A1, Stage.ALICE_BSM_B6, Stage.BOB_BSM_23),
}


class TransportError(Exception):
    """A broadcast violated the protocol contract (order, sender, or sequence)."""


@dataclass(frozen=True)
class ClassicalMessage:
    seq: int
    sender: PartyId
    stage: Stage
    pair: Tuple[str, str]
    outcome: BellOutcome

    def serialize(self) -> str:
        return (
            f"{self.seq}|{self.sender.value}|{self.stage.value}"
            f"|{self.pair[0]},{self.pair[1]}|{self.outcome.code}"
        )


_HEADER_RE = re.compile(r"#protocol=(\S+) seed=(\d+) params=(\S*)")


@dataclass
class Transcript:
    """Ordered record of one protocol run's classical traffic.

    serialize() and parse() round-trip bit-exactly; the run id is derived
    from (protocol, seed) so the header needs no extra fields.
    """

    protocol: str
    seed: int
    params: str = ""
    messages: List[ClassicalMessage] = field(default_factory=list)

    def __post_init__(self):
        if self.protocol not in PROTOCOL_STAGES:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if not 0 <= int(self.seed) < (1 << 64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if re.search(r"[\s|]", self.params):
            raise ValueError("params must not contain whitespace or '|'")

    @property
    def run_id(self) -> str:
        return f"{self.protocol}-{self.seed}"

    def serialize(self) -> str:
        head = f"#protocol={self.protocol} seed={self.seed} params={self.params}"
        return "\n".join([head, *(m.serialize() for m in self.messages)]) + "\n"

    @classmethod
    def parse(cls, text: str) -> "Transcript":
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise ValueError("transcript line 1: empty transcript")
        m = _HEADER_RE.fullmatch(lines[0])
        if m is None:
            raise ValueError("transcript line 1: malformed header")
        protocol, seed_s, params = m.group(1), m.group(2), m.group(3)
        if protocol not in PROTOCOL_STAGES:
            raise ValueError(f"transcript line 1: unknown protocol {protocol!r}")
        seed = int(seed_s)
        if seed >= (1 << 64):
            raise ValueError("transcript line 1: seed exceeds 64 bits")
        stages = PROTOCOL_STAGES[protocol]
        messages: List[ClassicalMessage] = []
        for lineno, line in enumerate(lines[1:], start=2):
            parts = line.split("|")
            if len(parts) != 5:
                raise ValueError(
                    f"transcript line {lineno}: expected 5 '|'-separated fields"
                )
            seq_s, sender_s, stage_s, pair_s, code = parts
            try:
                seq = int(seq_s)
            except ValueError:
                raise ValueError(f"transcript line {lineno}: bad sequence number {seq_s!r}")
            if seq != len(messages) + 1:
                raise ValueError(
                    f"transcript line {lineno}: sequence number {seq} out of order"
                )
            sender = next((p for p in PartyId if p.value == sender_s), None)
            if sender is None:
                raise ValueError(f"transcript line {lineno}: unknown sender {sender_s!r}")
            if sender is PartyId.EVE:
                raise ValueError(f"transcript line {lineno}: Eve is not a valid sender")
            stage = next((s for s in Stage if s.value == stage_s), None)
            if stage is None:
                raise ValueError(f"transcript line {lineno}: unknown stage {stage_s!r}")
            expected = stages[len(messages) % len(stages)]
            if stage is not expected:
                raise ValueError(
                    f"transcript line {lineno}: stage {stage.value} out of order, "
                    f"expected {expected.value}"
                )
            if STAGE_SENDER[stage] is not sender:
                raise ValueError(
                    f"transcript line {lineno}: stage {stage.value} must be sent by "
                    f"{STAGE_SENDER[stage].value}"
                )
            labels = pair_s.split(",")
            if len(labels) != 2 or not labels[0] or not labels[1]:
                raise ValueError(f"transcript line {lineno}: malformed pair {pair_s!r}")
            try:
                outcome = BellOutcome.from_code(code)
            except ValueError:
                raise ValueError(
                    f"transcript line {lineno}: malformed outcome bits {code!r}"
                )
            messages.append(ClassicalMessage(seq, sender, stage, (labels[0], labels[1]), outcome))
        return cls(protocol, seed, params, messages)


class SeedStreams:
    """Deterministic independent RNG streams from one u64 seed.

    Stream k is seeded by SeedSequence(entropy=seed, spawn_key=(k,)), so two
    runs with the same seed draw identical randomness call for call.
    """

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < (1 << 64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        self._seed = seed
        self._count = 0

    @property
    def seed(self) -> int:
        return self._seed

    def child(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self._seed, spawn_key=(self._count,))
        self._count += 1
        return np.random.default_rng(ss)


class Transport:
    """Base transport: validates staged broadcasts, delivers nothing."""

    def __init__(self, protocol: str, parties: Optional[Sequence[PartyId]] = None):
        if protocol not in PROTOCOL_STAGES:
            raise ValueError(f"unknown protocol {protocol!r}")
        self.protocol = protocol
        self._stages = PROTOCOL_STAGES[protocol]
        self.parties = tuple(parties) if parties is not None else (
            PartyId.ALICE,
            PartyId.BOB,
            PartyId.CHIKA,
        )
        self.transcript: Optional[Transcript] = None
        self._lock = threading.Lock()
        self._count = 0

    @property
    def message_count(self) -> int:
        return self._count

    def broadcast(
        self,
        sender: PartyId,
        stage: Stage,
        pair: Sequence[str],
        outcome: BellOutcome,
    ) -> ClassicalMessage:
        with self._lock:
            if sender is PartyId.EVE:
                raise TransportError("Eve cannot send on the classical channel")
            if sender not in self.parties:
                raise TransportError(f"{sender.value} is not registered on this channel")
            expected = self._stages[self._count % len(self._stages)]
            if stage is not expected:
                raise TransportError(
                    f"stage {stage.value} out of order; expected {expected.value}"
                )
            if STAGE_SENDER[stage] is not sender:
                raise TransportError(
                    f"stage {stage.value} must be sent by {STAGE_SENDER[stage].value}"
                )
            msg = ClassicalMessage(
                self._count + 1, sender, stage, (str(pair[0]), str(pair[1])), outcome
            )
            self._count += 1
            self._deliver(msg)
            return msg

    def _deliver(self, msg: ClassicalMessage) -> None:
        pass


class NullTransport(Transport):
    """Validates and counts broadcasts without storing anything (fast path)."""


class InMemoryTransport(Transport):
    """Stores the transcript and per-party inboxes.

    Every registered non-sender receives each message exactly once, in
    sequence order.
    """

    def __init__(
        self,
        protocol: str,
        seed: int,
        params: str = "",
        parties: Optional[Sequence[PartyId]] = None,
    ):
        super().__init__(protocol, parties)
        self.transcript = Transcript(protocol=protocol, seed=seed, params=params)
        self._inboxes: Dict[PartyId, List[ClassicalMessage]] = {
            p: [] for p in self.parties
        }

    def _deliver(self, msg: ClassicalMessage) -> None:
        self.transcript.messages.append(msg)
        for p in self.parties:
            if p is not msg.sender:
                self._inboxes[p].append(msg)

    def inbox(self, party: PartyId) -> Tuple[ClassicalMessage, ...]:
        if party not in self._inboxes:
            raise ValueError(f"{party.value} is not registered on this channel")
        return tuple(self._inboxes[party])
