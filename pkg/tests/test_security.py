"""Listener leakage analysis and the substituted-pair verification game."""

import numpy as np
import pytest

from clustersim import security
from clustersim.channels import ClusterParams, SingleInput, TwoInput
from clustersim.security import AttackConfig


def test_teleport_listener_learns_nothing_at_any_tap_point():
    for point in ("2", "3", "4"):
        report = security.run_teleport_with_eve(config=AttackConfig(point))
        assert report.protocol == "teleport"
        assert report.attachment_point == point
        assert len(report.outcomes) == 16
        assert report.leak_free
        assert report.max_factorization_error <= 1e-12
        assert report.max_trace_distance <= 1e-12
        assert report.max_mutual_info_bits <= 1e-9
        assert report.max_outcome_probability_shift <= 1e-12
        probs = [p for _, p, _, _ in report.outcomes]
        assert sum(probs) == pytest.approx(1.0, abs=1e-12)


def test_qis_listener_learns_nothing_at_any_tap_point():
    for point in ("2", "3", "4", "5"):
        report = security.run_qis_with_eve(config=AttackConfig(point))
        assert report.protocol == "qis"
        assert report.attachment_point == point
        assert len(report.outcomes) == 64
        assert report.leak_free
        probs = [p for _, p, _, _ in report.outcomes]
        assert sum(probs) == pytest.approx(1.0, abs=1e-12)
        for p in probs:
            assert p == pytest.approx(1.0 / 64.0, abs=1e-12)


def test_leakage_maxima_agree_with_per_outcome_rows():
    report = security.run_teleport_with_eve()
    assert report.max_trace_distance == pytest.approx(
        max(td for _, _, td, _ in report.outcomes), abs=1e-15
    )
    assert report.max_mutual_info_bits == pytest.approx(
        max(mi for _, _, _, mi in report.outcomes), abs=1e-15
    )


def test_invalid_tap_points_are_rejected():
    with pytest.raises(ValueError):
        security.run_teleport_with_eve(config=AttackConfig("5"))
    with pytest.raises(ValueError):
        security.run_teleport_with_eve(config=AttackConfig("A"))
    with pytest.raises(ValueError):
        security.run_qis_with_eve(config=AttackConfig("6"))
    with pytest.raises(ValueError):
        security.run_qis_with_eve(config=AttackConfig("1"))


def test_leakage_holds_for_other_inputs_and_channels():
    skew = ClusterParams(0.7, 0.5, 0.3, np.sqrt(0.17))
    rep_t = security.run_teleport_with_eve(
        inp=SingleInput(0.36 + 0.48j, 0.8), cluster=skew
    )
    assert rep_t.leak_free
    raw = np.array([0.52, -0.31 + 0.27j, 0.44j, -0.2 - 0.55j])
    rep_q = security.run_qis_with_eve(
        inp=TwoInput(*(raw / np.linalg.norm(raw))), cluster=skew
    )
    assert rep_q.leak_free


def test_leakage_render_format():
    report = security.run_teleport_with_eve()
    text = report.render()
    lines = text.splitlines()
    assert lines[0] == "protocol: teleport"
    assert "leak-free: true" in lines
    header_idx = lines.index(
        "outcome,probability,listener_trace_distance,mutual_info_bits"
    )
    assert len(lines) - header_idx - 1 == 16
    assert text.endswith("\n")


def test_substituted_pair_fidelity_is_exactly_one_quarter():
    report = security.dishonest_bob_substitution(rounds=400, rng_seed=1)
    assert report.rounds == 400
    assert abs(report.attack_mean_fidelity - 0.25) <= 1e-12
    assert report.chika_max_distance_to_mixed <= 1e-12
    assert report.input_dependence <= 1e-12
    assert report.honest_mean_fidelity >= 1.0 - 1e-9
    assert report.attack_verdict == "DISCARD"
    assert report.honest_verdict == "ACCEPT"
    # each round passes independently with probability 1/4
    assert abs(report.attack_pass_rate - 0.25) < 0.11  # 5 sigma at 400 rounds
    text = report.render()
    assert "attack verdict: DISCARD" in text
    assert "honest verdict: ACCEPT" in text


def test_substitution_is_input_independent():
    a = security.dishonest_bob_substitution(rounds=50, rng_seed=2)
    b = security.dishonest_bob_substitution(
        inp=TwoInput(1, 0, 0, 0), rounds=50, rng_seed=2
    )
    assert abs(a.attack_mean_fidelity - b.attack_mean_fidelity) <= 1e-12
    assert b.input_dependence <= 1e-12


def test_substitution_rejects_bad_round_counts():
    with pytest.raises(ValueError):
        security.dishonest_bob_substitution(rounds=0)
