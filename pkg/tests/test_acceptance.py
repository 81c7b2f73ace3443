"""Acceptance gate: one criterion per test, one printed pass/fail line each.

Run with `pytest tests/test_acceptance.py -s` to see the lines as they go.
Every criterion carries its stated tolerance and a wall-clock budget.
"""

import time

import numpy as np

from clustersim import core, qis, security, teleport as tp
from clustersim.channels import (
    ClusterParams,
    SingleInput,
    compose_system,
    make_bell,
    make_cluster,
    maximal_cluster,
    qis_register,
    random_cluster_params,
    random_single_input,
    random_two_input,
    teleport_register,
)
from clustersim.cli import main
from clustersim.core import StateVector, phase_aligned_distance
from clustersim.measurement import (
    BellOutcome,
    PovmOutcome,
    bell_distribution,
    construct_povm,
    povm_probabilities,
    povm_sample,
    bsm_sample,
)
from clustersim.runtime import SeedStreams

import _bruteforce as bf


def _finish(name: str, ok: bool, t0: float, budget: float) -> None:
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < budget
    print(f"{name}: {'pass' if ok else 'fail'} ({elapsed:.2f}s, budget {budget:g}s)")
    assert ok


def test_c1_branch_state_equivalence():
    t0 = time.perf_counter()
    ok = True
    gen = np.random.default_rng(101)
    for _ in range(20):
        inp = random_single_input(gen)
        params = random_cluster_params(gen)
        total = 0.0
        for alice in BellOutcome:
            for bob in BellOutcome:
                ana = tp.analytic_post_bsm(inp, params, alice, bob)
                raw = bf.teleport_branch(
                    [inp.amp0, inp.amp1], params.as_tuple(),
                    alice.display, bob.display,
                )
                proj = StateVector(1, np.array(raw), normalized=False)
                ok = ok and phase_aligned_distance(ana, proj) <= 1e-12
                total += proj.norm_sq()
        ok = ok and abs(total - 1.0) <= 1e-12
    for _ in range(20):
        inp2 = random_two_input(gen)
        total = 0.0
        for key in qis.all_outcome_keys():
            ana = qis.analytic_qis_outcome(inp2, key)
            raw = bf.qis_branch(
                [inp2.amp00, inp2.amp01, inp2.amp10, inp2.amp11],
                (0.5, 0.5, 0.5, 0.5),
                key.alice1.display, key.alice2.display, key.bob.display,
            )
            proj = StateVector(2, np.array(raw), normalized=False)
            ok = ok and phase_aligned_distance(ana, proj) <= 1e-12
            total += proj.norm_sq()
        ok = ok and abs(total - 1.0) <= 1e-12
    _finish("C1 branch-state equivalence", ok, t0, 10.0)


def test_c2_povm_outcome_probabilities():
    t0 = time.perf_counter()
    ok = True
    gen = np.random.default_rng(102)
    recipe = tp.branch_recipe(BellOutcome.PHI_PLUS, BellOutcome.PSI_MINUS)
    pre = recipe.pre_matrix()
    for _ in range(100):
        v = gen.normal(size=2) + 1j * gen.normal(size=2)
        v = v / np.linalg.norm(v)
        inp = SingleInput(v[0], v[1])
        beta, gamma = gen.uniform(0.25, 0.65, size=2)
        while beta**2 + gamma**2 >= 0.95:
            beta, gamma = gen.uniform(0.25, 0.65, size=2)
        side = float(np.sqrt((1.0 - beta**2 - gamma**2) / 2.0))
        cluster = ClusterParams(side, beta, gamma, side)
        lo = 2.0 * max(beta**2, gamma**2) / (beta**2 + gamma**2)
        rho = float(gen.uniform(lo + 1e-6, 2.0))
        branch = tp.analytic_post_bsm(
            inp, cluster, BellOutcome.PHI_PLUS, BellOutcome.PSI_MINUS
        )
        work = core.apply_1q(branch, 0, pre)
        work = core.tensor(work, core.basis_state(1, 0))
        work = core.apply_cnot(work, 0, 1)
        povm = construct_povm(beta=beta, gamma=gamma, rho=rho)
        amps = work.amps

        def sandwich(k):
            return float(np.real(np.vdot(amps, np.kron(np.eye(2), k) @ amps)))

        sigma = 1.0 / gamma**2 + 1.0 / beta**2
        want = 1.0 / (4.0 * rho * sigma)
        ok = ok and abs(sandwich(povm.k1) - want) <= 1e-12
        ok = ok and abs(sandwich(povm.k2) - want) <= 1e-12
        want3 = work.norm_sq() - 1.0 / (2.0 * rho * sigma)
        ok = ok and abs(sandwich(povm.k3) - want3) <= 1e-12
    _finish("C2 POVM outcome probabilities", ok, t0, 1.0)


def test_c3_recovery_fidelity():
    t0 = time.perf_counter()
    ok = True
    inp = SingleInput(0.48 - 0.36j, 0.8)
    target = inp.state()
    params = maximal_cluster()
    for alice in BellOutcome:
        for bob in BellOutcome:
            recipe = tp.branch_recipe(alice, bob)
            raw = bf.teleport_branch(
                [inp.amp0, inp.amp1], params.as_tuple(),
                alice.display, bob.display,
            )
            collapsed = StateVector(1, np.array(raw), normalized=False).normalize()
            seen = set()
            for seed in range(3000):
                outcome, final, _ = tp.chika_recover(
                    collapsed, recipe, params, 1.5, seed
                )
                if outcome is PovmOutcome.FAIL:
                    continue
                ok = ok and core.fidelity_pure(final, target) >= 1.0 - 1e-9
                seen.add(outcome)
                if len(seen) == 2:
                    break
            ok = ok and seen == {PovmOutcome.DIRECT, PovmOutcome.SIGN_FLIP}
    gen = np.random.default_rng(103)
    inp2 = random_two_input(gen)
    for key in qis.all_outcome_keys():
        branch = qis.projected_branch(inp2, key)
        word = qis.synthesize_correction(branch, inp2)
        ok = ok and word is not None
        if word is not None:
            corrected = StateVector(2, word.matrix() @ branch.normalize().amps)
            ok = ok and core.fidelity_pure(corrected, inp2.state()) >= 1.0 - 1e-9
    _finish("C3 recovery fidelity", ok, t0, 30.0)


def test_c4_success_probability_curves(tmp_path):
    t0 = time.perf_counter()
    ok = True
    out = tmp_path / "fig1.csv"
    rc = main([
        "sweep-fig1", "--gamma", "0.5", "--rho", "1.5",
        "--beta", "0.1:0.8:0.05", "--n", "2,5,10", "--out", str(out),
    ])
    ok = ok and rc == 0
    lines = out.read_text().strip().splitlines()
    ok = ok and lines[0] == "beta,N,p_eq6,p_closed_form,p_montecarlo"
    ok = ok and len(lines) == 1 + 15 * 3
    by_beta = {}
    for line in lines[1:]:
        beta_s, n_s, p_eq_s, p_closed_s, _ = line.split(",")
        p_eq, p_closed = float(p_eq_s), float(p_closed_s)
        ok = ok and abs(p_eq - p_closed) <= 1e-12
        by_beta.setdefault(beta_s, {})[int(n_s)] = p_eq
    for curves in by_beta.values():
        ok = ok and curves[2] < curves[5] < curves[10]
    _finish("C4 success probability curves", ok, t0, 1.0)


def test_c5_correction_table_adjudication():
    t0 = time.perf_counter()
    ok = True
    report = qis.verify_table1()
    ok = ok and len(report.results) == 64
    for r in report.results:
        ok = ok and r.oracle_word is not None
        ok = ok and r.oracle_fidelity >= 1.0 - 1e-10
    # every non-passing row must be listed; the report stays complete
    ok = ok and len(report.mismatches) == sum(
        1 for r in report.results if r.status != "PASS"
    )
    rendered = report.render()
    ok = ok and rendered.count("\n") >= 65 and "# summary: 64 rows" in rendered
    _finish("C5 correction table adjudication", ok, t0, 10.0)


def test_c6_listener_isolation():
    t0 = time.perf_counter()
    ok = True
    for report in (security.run_teleport_with_eve(), security.run_qis_with_eve()):
        ok = ok and report.max_trace_distance <= 1e-12
        ok = ok and report.max_mutual_info_bits <= 1e-9
    _finish("C6 listener isolation", ok, t0, 10.0)


def test_c7_access_structure():
    t0 = time.perf_counter()
    report = qis.access_structure_check()
    ok = report.bob_pair_max_distance_to_mixed <= 1e-12
    ok = ok and report.chika_pair_max_distance_to_mixed <= 1e-12
    ok = ok and report.alice_averaged_chika_max_distance_to_mixed <= 1e-12
    ok = ok and report.alice_averaged_chika_input_dependence <= 1e-12
    ok = ok and report.collaboration_fidelity_min >= 1.0 - 1e-10
    _finish("C7 access structure", ok, t0, 5.0)


def test_c8_monte_carlo_consistency():
    t0 = time.perf_counter()
    ok = True
    n = 100_000
    streams = SeedStreams(20260815)

    def within_3_sigma(counts, probs):
        good = True
        for got, p in zip(counts, probs):
            if p <= 0.0:
                good = good and got == 0
                continue
            sigma = np.sqrt(p * (1.0 - p) / n)
            good = good and abs(got / n - p) <= 3.0 * sigma
        return good

    reg = teleport_register()
    state = compose_system(
        [SingleInput(0.48 - 0.36j, 0.8).state(), make_cluster(maximal_cluster())],
        reg,
    )
    pair = reg.indices_of(("A", "1"))
    exact = {o: p for o, p, _ in bell_distribution(state, pair)}
    gen = streams.child()
    counts = {o: 0 for o in BellOutcome}
    for _ in range(n):
        outcome, _, _ = bsm_sample(state, pair, gen)
        counts[outcome] += 1
    ok = ok and within_3_sigma(
        [counts[o] for o in BellOutcome], [exact[o] for o in BellOutcome]
    )

    recipe = tp.branch_recipe(BellOutcome.PHI_PLUS, BellOutcome.PSI_MINUS)
    raw = bf.teleport_branch(
        [0.48 - 0.36j, 0.8], (0.5, 0.5, 0.5, 0.5), "Phi+", "Psi-"
    )
    work = StateVector(1, np.array(raw), normalized=False).normalize()
    work = core.apply_1q(work, 0, recipe.pre_matrix())
    work = core.tensor(work, core.basis_state(1, 0))
    work = core.apply_cnot(work, 0, 1)
    povm = construct_povm(beta=0.5, gamma=0.5, rho=1.5)
    p1, p2, p3 = povm_probabilities(work, 1, povm)
    gen = streams.child()
    tallies = {o: 0 for o in PovmOutcome}
    for _ in range(n):
        outcome, _, _ = povm_sample(work, 1, povm, gen)
        tallies[outcome] += 1
    ok = ok and within_3_sigma(
        [tallies[PovmOutcome.DIRECT], tallies[PovmOutcome.SIGN_FLIP],
         tallies[PovmOutcome.FAIL]],
        [p1, p2, p3],
    )

    raw4 = np.array([0.46 + 0.13j, 0.27 - 0.21j, -0.35 + 0.11j, 0.22 - 0.56j])
    raw4 = raw4 / np.linalg.norm(raw4)
    from clustersim.channels import TwoInput

    base = compose_system(
        [TwoInput(*raw4).state(), make_cluster(maximal_cluster()),
         make_bell(BellOutcome.PHI_PLUS)],
        qis_register(),
    )
    gen = streams.child()
    key_counts = {key: 0 for key in qis.all_outcome_keys()}
    for _ in range(n):
        o1, s, _ = bsm_sample(base, (0, 2), gen)
        o2, s, _ = bsm_sample(s, (0, 5), gen)
        o3, _, _ = bsm_sample(s, (0, 1), gen)
        key_counts[qis.QisOutcomeKey(o1, o2, o3)] += 1
    ok = ok and within_3_sigma(
        list(key_counts.values()), [1.0 / 64.0] * 64
    )

    plan = tp.TrialPlan(cluster=maximal_cluster(), rho=1.5, max_trials=3)
    rt_a = tp.run_teleport_with_retries(SingleInput(0.6, 0.8), plan, rng_seed=12)
    rt_b = tp.run_teleport_with_retries(SingleInput(0.6, 0.8), plan, rng_seed=12)
    ok = ok and rt_a.transcript.serialize() == rt_b.transcript.serialize()
    q_a = qis.run_qis(TwoInput(*raw4), rng_seed=12)
    q_b = qis.run_qis(TwoInput(*raw4), rng_seed=12)
    ok = ok and q_a.transcript.serialize() == q_b.transcript.serialize()
    _finish("C8 Monte Carlo consistency", ok, t0, 60.0)
