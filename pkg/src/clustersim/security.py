"""Passive wiretap and active substitution analyses.

The wiretap model splices a listener qubit prepared in |+> into the channel
register at a chosen point. Because the listener never interacts, every
measured branch must factor exactly as (clean branch) (x) |+>: the listener's
reduced state stays |+><+|, mutual information with the rest is zero, and no
outcome probability moves. The analysis verifies all of that branch by
branch instead of assuming it.

The substitution model has Bob forward halves of fresh Bell pairs instead of
the qubits he owes Chika. Chika's corrected state is then maximally mixed
whatever was announced, so verification rounds expose the attack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from . import kernels
from .channels import (
    ClusterParams,
    SingleInput,
    TwoInput,
    compose_system,
    insert_listener,
    make_bell,
    make_cluster,
    maximal_cluster,
    qis_register,
    teleport_register,
)
from .core import (
    DensityMatrix,
    StateVector,
    density_from_state,
    fidelity_state_density,
    mutual_information,
    partial_trace,
    tensor,
    trace_distance,
)
from .measurement import BELL_VECTORS, BellOutcome, bsm_sample
from .qis import QisOutcomeKey, all_outcome_keys, projected_branch, table1_lookup
from .runtime import SeedStreams

_PLUS = StateVector(1, np.array([1.0, 1.0], dtype=np.complex128) / math.sqrt(2.0))
_PLUS_RHO = density_from_state(_PLUS)

_TELEPORT_TAP_POINTS = ("2", "3", "4")
_QIS_TAP_POINTS = ("2", "3", "4", "5")


@dataclass(frozen=True)
class AttackConfig:
    """Where the listener sits: spliced after this channel qubit label."""

    attachment_point: str = "3"


@dataclass(frozen=True)
class LeakageReport:
    protocol: str
    attachment_point: str
    # (outcome key, probability, listener trace distance, mutual info bits)
    outcomes: Tuple[Tuple[str, float, float, float], ...]
    max_trace_distance: float
    max_mutual_info_bits: float
    max_outcome_probability_shift: float
    max_factorization_error: float

    @property
    def leak_free(self) -> bool:
        return (
            self.max_trace_distance <= 1e-12
            and self.max_mutual_info_bits <= 1e-9
            and self.max_outcome_probability_shift <= 1e-12
            and self.max_factorization_error <= 1e-12
        )

    def render(self) -> str:
        head = [
            f"protocol: {self.protocol}",
            f"listener attached after qubit: {self.attachment_point}",
            f"joint outcomes examined: {len(self.outcomes)}",
            "max trace distance of listener state from |+><+|: "
            f"{self.max_trace_distance:.6e}",
            "max listener/system mutual information (bits): "
            f"{self.max_mutual_info_bits:.6e}",
            "max outcome probability shift vs clean run: "
            f"{self.max_outcome_probability_shift:.6e}",
            "max deviation from branch (x) |+> factorization: "
            f"{self.max_factorization_error:.6e}",
            f"leak-free: {str(self.leak_free).lower()}",
            "outcome,probability,listener_trace_distance,mutual_info_bits",
        ]
        rows = [
            f"{key},{p:.17g},{td:.17g},{mi:.17g}"
            for key, p, td, mi in self.outcomes
        ]
        return "\n".join(head + rows) + "\n"


def _spliced_state(base: StateVector, register, ext) -> StateVector:
    """base (x) |+> rearranged so the listener sits at its register slot."""
    full = tensor(base, _PLUS)
    order = [
        register.size if lab == "E" else register.index_of(lab) for lab in ext.labels
    ]
    arr = full.amps.reshape((2,) * ext.size).transpose(order).reshape(-1)
    return StateVector(ext.size, arr)


def _expected_factorized(
    base_amps: np.ndarray, labels_with_e: List[str]
) -> np.ndarray:
    """Clean branch (x) |+> with the listener axis moved to its slot."""
    n = len(labels_with_e)
    full = np.kron(base_amps, _PLUS.amps)
    old = [lab for lab in labels_with_e if lab != "E"] + ["E"]
    order = [old.index(lab) for lab in labels_with_e]
    return np.transpose(full.reshape((2,) * n), order).reshape(-1)


def _validate_tap(point: str, allowed: Tuple[str, ...], protocol: str) -> None:
    if point not in allowed:
        raise ValueError(
            f"{protocol} listener must attach after one of {', '.join(allowed)}; "
            f"got {point!r}"
        )


def run_teleport_with_eve(
    inp: Optional[SingleInput] = None,
    cluster: Optional[ClusterParams] = None,
    config: Optional[AttackConfig] = None,
) -> LeakageReport:
    """Exhaustive wiretap audit over all 16 joint Bell outcomes."""
    if inp is None:
        inp = SingleInput(0.48 - 0.36j, 0.8)
    params = cluster if cluster is not None else maximal_cluster()
    cfg = config if config is not None else AttackConfig()
    _validate_tap(cfg.attachment_point, _TELEPORT_TAP_POINTS, "teleport")
    reg = teleport_register()
    base = compose_system([inp.state(), make_cluster(params)], reg)
    ext = insert_listener(reg, cfg.attachment_point)
    state = _spliced_state(base, reg, ext)
    labels = list(ext.labels)
    rows = []
    max_td = max_mi = max_shift = max_fact = 0.0
    i_a, i_1 = labels.index("A"), labels.index("1")
    labels4 = [lab for lab in labels if lab not in ("A", "1")]
    i_2, i_3 = labels4.index("2"), labels4.index("3")
    labels2 = [lab for lab in labels4 if lab not in ("2", "3")]
    e_pos = labels2.index("E")
    for a_out in BellOutcome:
        rem_a = kernels.project_pair(state.amps, 6, i_a, i_1, BELL_VECTORS[a_out])
        clean_a = kernels.project_pair(base.amps, 5, 0, 1, BELL_VECTORS[a_out])
        for b_out in BellOutcome:
            rem = kernels.project_pair(rem_a, 4, i_2, i_3, BELL_VECTORS[b_out])
            clean = kernels.project_pair(clean_a, 3, 0, 1, BELL_VECTORS[b_out])
            p = float(np.real(np.vdot(rem, rem)))
            p_clean = float(np.real(np.vdot(clean, clean)))
            max_shift = max(max_shift, abs(p - p_clean))
            expected = _expected_factorized(clean, labels2)
            max_fact = max(max_fact, float(np.max(np.abs(rem - expected))))
            cond = StateVector(2, rem, normalized=False).normalize()
            td = trace_distance(partial_trace(cond, [e_pos]), _PLUS_RHO)
            mi = mutual_information(cond, [e_pos], [1 - e_pos])
            max_td = max(max_td, td)
            max_mi = max(max_mi, mi)
            rows.append((f"{a_out.display},{b_out.display}", p, td, mi))
    return LeakageReport(
        protocol="teleport",
        attachment_point=cfg.attachment_point,
        outcomes=tuple(rows),
        max_trace_distance=max_td,
        max_mutual_info_bits=max_mi,
        max_outcome_probability_shift=max_shift,
        max_factorization_error=max_fact,
    )


def run_qis_with_eve(
    inp: Optional[TwoInput] = None,
    cluster: Optional[ClusterParams] = None,
    config: Optional[AttackConfig] = None,
) -> LeakageReport:
    """Exhaustive wiretap audit over all 64 joint Bell outcomes."""
    if inp is None:
        raw = np.array([0.46 + 0.13j, 0.27 - 0.21j, -0.35 + 0.11j, 0.22 - 0.56j])
        raw = raw / np.linalg.norm(raw)
        inp = TwoInput(*raw)
    params = cluster if cluster is not None else maximal_cluster()
    cfg = config if config is not None else AttackConfig()
    _validate_tap(cfg.attachment_point, _QIS_TAP_POINTS, "qis")
    reg = qis_register()
    base = compose_system(
        [inp.state(), make_cluster(params), make_bell(BellOutcome.PHI_PLUS)], reg
    )
    ext = insert_listener(reg, cfg.attachment_point)
    state = _spliced_state(base, reg, ext)
    labels = list(ext.labels)
    rows = []
    max_td = max_mi = max_shift = max_fact = 0.0
    i_a, i_1 = labels.index("a"), labels.index("1")
    labels7 = [lab for lab in labels if lab not in ("a", "1")]
    i_b, i_6 = labels7.index("b"), labels7.index("6")
    labels5 = [lab for lab in labels7 if lab not in ("b", "6")]
    i_2, i_3 = labels5.index("2"), labels5.index("3")
    labels3 = [lab for lab in labels5 if lab not in ("2", "3")]
    e_pos = labels3.index("E")
    rest = [k for k in range(3) if k != e_pos]
    for key in all_outcome_keys():
        rem = kernels.project_pair(state.amps, 9, i_a, i_1, BELL_VECTORS[key.alice1])
        rem = kernels.project_pair(rem, 7, i_b, i_6, BELL_VECTORS[key.alice2])
        rem = kernels.project_pair(rem, 5, i_2, i_3, BELL_VECTORS[key.bob])
        clean = projected_branch(inp, key, params).amps
        p = float(np.real(np.vdot(rem, rem)))
        p_clean = float(np.real(np.vdot(clean, clean)))
        max_shift = max(max_shift, abs(p - p_clean))
        expected = _expected_factorized(clean, labels3)
        max_fact = max(max_fact, float(np.max(np.abs(rem - expected))))
        cond = StateVector(3, rem, normalized=False).normalize()
        td = trace_distance(partial_trace(cond, [e_pos]), _PLUS_RHO)
        mi = mutual_information(cond, [e_pos], rest)
        max_td = max(max_td, td)
        max_mi = max(max_mi, mi)
        rows.append((key.display(), p, td, mi))
    return LeakageReport(
        protocol="qis",
        attachment_point=cfg.attachment_point,
        outcomes=tuple(rows),
        max_trace_distance=max_td,
        max_mutual_info_bits=max_mi,
        max_outcome_probability_shift=max_shift,
        max_factorization_error=max_fact,
    )


@dataclass(frozen=True)
class SubstitutionReport:
    rounds: int
    attack_mean_fidelity: float
    attack_pass_rate: float
    honest_mean_fidelity: float
    chika_max_distance_to_mixed: float
    input_dependence: float
    threshold: float
    attack_verdict: str
    honest_verdict: str

    def render(self) -> str:
        return "\n".join(
            [
                f"verification rounds: {self.rounds}",
                f"attack mean fidelity: {self.attack_mean_fidelity:.17g}",
                f"attack per-round pass rate: {self.attack_pass_rate:.17g}",
                f"honest mean fidelity: {self.honest_mean_fidelity:.17g}",
                "substituted chika state, max distance to I/4: "
                f"{self.chika_max_distance_to_mixed:.6e}",
                "substituted chika state, input dependence: "
                f"{self.input_dependence:.6e}",
                f"accept threshold: {self.threshold:.17g}",
                f"attack verdict: {self.attack_verdict}",
                f"honest verdict: {self.honest_verdict}",
            ]
        ) + "\n"


def _fake_chika_pair() -> StateVector:
    """What Chika holds under substitution: halves of two fresh Bell pairs.

    Qubits 0,1 are the halves Chika received; 2,3 stay with Bob. Tracing Bob
    out leaves I/4 exactly, before or after any Pauli correction.
    """
    pair = tensor(
        make_bell(BellOutcome.PHI_PLUS), make_bell(BellOutcome.PHI_PLUS)
    )  # order: (c0, b0, c1, b1)
    arr = pair.amps.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(-1)
    return StateVector(4, arr)


def _averaged_fake_chika(
    inp: TwoInput, params: ClusterParams, fake: StateVector
) -> DensityMatrix:
    eye4 = np.eye(4, dtype=np.complex128)
    acc = np.zeros((4, 4), dtype=np.complex128)
    for key in all_outcome_keys():
        p = projected_branch(inp, key, params).norm_sq()
        word = table1_lookup(key)
        corrected = StateVector(4, np.kron(word.matrix(), eye4) @ fake.amps)
        acc += p * partial_trace(corrected, [0, 1]).mat
    return DensityMatrix(2, acc)


def dishonest_bob_substitution(
    inp: Optional[TwoInput] = None,
    rounds: int = 1000,
    rng_seed: int = 0,
    cluster: Optional[ClusterParams] = None,
    threshold: float = 1.0 - 1e-6,
) -> SubstitutionReport:
    """Monte Carlo verification rounds against a substituting Bob.

    Each round runs the genuine announcements, applies the table correction
    to the substituted pair, and scores the fidelity Chika would observe in
    a verification test. The honest column replays the same announcements on
    the genuine branch.
    """
    if inp is None:
        raw = np.array([0.31 - 0.42j, 0.55 + 0.1j, -0.29 + 0.33j, 0.4 - 0.23j])
        raw = raw / np.linalg.norm(raw)
        inp = TwoInput(*raw)
    if rounds < 1:
        raise ValueError("rounds must be positive")
    params = cluster if cluster is not None else maximal_cluster()
    reg = qis_register()
    base = compose_system(
        [inp.state(), make_cluster(params), make_bell(BellOutcome.PHI_PLUS)], reg
    )
    fake = _fake_chika_pair()
    eye4 = np.eye(4, dtype=np.complex128)
    mixed = DensityMatrix(2, np.eye(4, dtype=np.complex128) / 4.0)
    target = inp.state()
    # per-word attack numbers; phases drop out so 16 entries cover all keys
    cache = {}
    for key in all_outcome_keys():
        word = table1_lookup(key)
        wk = (word.left, word.right)
        if wk not in cache:
            corrected = StateVector(4, np.kron(word.matrix(), eye4) @ fake.amps)
            rho = partial_trace(corrected, [0, 1])
            cache[wk] = (
                fidelity_state_density(target, rho),
                trace_distance(rho, mixed),
            )
    streams = SeedStreams(rng_seed)
    gen_verify = streams.child()
    fid_sum = 0.0
    honest_sum = 0.0
    passes = 0
    max_mix_dist = 0.0
    for _ in range(rounds):
        o1, state, _ = bsm_sample(base, (0, 2), streams.child())
        o2, state, _ = bsm_sample(state, (0, 5), streams.child())
        o3, genuine, _ = bsm_sample(state, (0, 1), streams.child())
        word = table1_lookup(QisOutcomeKey(o1, o2, o3))
        fid, dist = cache[(word.left, word.right)]
        fid_sum += fid
        max_mix_dist = max(max_mix_dist, dist)
        honest_sum += float(
            abs(np.vdot(target.amps, word.matrix() @ genuine.amps)) ** 2
        )
        if gen_verify.random() < fid:
            passes += 1
    ref = TwoInput(1, 0, 0, 0)
    if max(abs(inp.amp00 - 1), abs(inp.amp01), abs(inp.amp10), abs(inp.amp11)) < 1e-9:
        ref = TwoInput(0, 1, 0, 0)
    input_dep = trace_distance(
        _averaged_fake_chika(inp, params, fake),
        _averaged_fake_chika(ref, params, fake),
    )
    attack_mean = fid_sum / rounds
    honest_mean = honest_sum / rounds
    return SubstitutionReport(
        rounds=rounds,
        attack_mean_fidelity=attack_mean,
        attack_pass_rate=passes / rounds,
        honest_mean_fidelity=honest_mean,
        chika_max_distance_to_mixed=max_mix_dist,
        input_dependence=input_dep,
        threshold=threshold,
        attack_verdict="DISCARD" if attack_mean < threshold else "ACCEPT",
        honest_verdict="DISCARD" if honest_mean < threshold else "ACCEPT",
    )
