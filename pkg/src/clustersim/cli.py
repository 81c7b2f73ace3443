"""Command-line entry points.

Subcommands:
  teleport       run the single-qubit protocol, optionally with retries
  qis            run the two-qubit splitting protocol
  sweep-fig1     CSV sweep of retry success probability over beta and N
  verify-table1  adjudicate the published correction table
  eve            wiretap audit, plus the substitution attack for qis

Exit codes: 0 success, 1 protocol failure, 2 configuration error,
3 verification mismatch. Identical arguments and seed produce byte-identical
output.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .channels import ClusterParams, OwnershipError, SingleInput, TwoInput, maximal_cluster
from .qis import run_qis, verify_table1
from .runtime import TransportError
from .security import (
    AttackConfig,
    dishonest_bob_substitution,
    run_qis_with_eve,
    run_teleport_with_eve,
)
from .teleport import (
    TrialPlan,
    monte_carlo_success_frequency,
    psuc_closed_form,
    psuc_formula,
    run_teleport_with_retries,
)

EXIT_OK = 0
EXIT_PROTOCOL_FAILURE = 1
EXIT_CONFIG = 2
EXIT_MISMATCH = 3


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _parse_floats(text: str, what: str) -> List[float]:
    try:
        return [float(tok) for tok in text.split(",")]
    except ValueError:
        raise ValueError(f"{what} must be a comma-separated list of numbers")


def _parse_amplitudes(text: str, num_amps: int, renormalize: bool) -> np.ndarray:
    """num_amps real values, or 2*num_amps as re,im interleaved."""
    vals = _parse_floats(text, "--input")
    if len(vals) == num_amps:
        amps = np.array(vals, dtype=np.complex128)
    elif len(vals) == 2 * num_amps:
        arr = np.array(vals, dtype=np.float64).reshape(num_amps, 2)
        amps = arr[:, 0] + 1j * arr[:, 1]
    else:
        raise ValueError(
            f"--input needs {num_amps} real values or {2 * num_amps} "
            f"re,im pairs; got {len(vals)} values"
        )
    norm = float(np.linalg.norm(amps))
    if norm < 1e-12:
        raise ValueError("--input must not be the zero vector")
    if abs(norm - 1.0) > 1e-9:
        if not renormalize:
            raise ValueError(
                f"--input has norm {norm:.12g}; pass --renormalize to scale it"
            )
        amps = amps / norm
    return amps


def _amps_csv(amps: Sequence[complex]) -> str:
    parts: List[str] = []
    for a in amps:
        parts.append(_fmt(float(np.real(a))))
        parts.append(_fmt(float(np.imag(a))))
    return ",".join(parts)


def _parse_cluster(text: Optional[str]) -> ClusterParams:
    if text is None:
        return maximal_cluster()
    vals = _parse_floats(text, "--cluster")
    if len(vals) != 4:
        raise ValueError("--cluster needs exactly 4 values: alpha,beta,gamma,eta")
    return ClusterParams(*vals)


def _write_text(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _write_transcript(path: Optional[str], transcript) -> None:
    if path and transcript is not None:
        with open(path, "w", newline="") as fh:
            fh.write(transcript.serialize())


def cmd_teleport(args: argparse.Namespace) -> int:
    cluster = _parse_cluster(args.cluster)
    amps = _parse_amplitudes(args.input, 2, args.renormalize)
    inp = SingleInput(complex(amps[0]), complex(amps[1]))
    plan = TrialPlan(cluster=cluster, rho=args.rho, max_trials=args.max_trials)
    result = run_teleport_with_retries(inp, plan, args.seed)
    _write_transcript(args.transcript, result.transcript)
    lines = [
        "protocol: teleport",
        f"cluster: {','.join(_fmt(v) for v in cluster.as_tuple())}",
        f"rho: {_fmt(plan.rho)}",
        f"input: {_amps_csv(amps)}",
        f"seed: {args.seed}",
        f"max_trials: {plan.max_trials}",
        f"success: {str(result.success).lower()}",
        f"trials_used: {result.trials_used}",
        f"povm_outcomes: {','.join(o.value for o in result.povm_outcomes)}",
        f"fidelity: {_fmt(result.fidelity)}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK if result.success else EXIT_PROTOCOL_FAILURE


def cmd_qis(args: argparse.Namespace) -> int:
    cluster = _parse_cluster(args.cluster)
    amps = _parse_amplitudes(args.input, 4, args.renormalize)
    inp = TwoInput(*(complex(a) for a in amps))
    result = run_qis(
        inp,
        args.seed,
        correction_source=args.correction,
        cluster=cluster,
    )
    _write_transcript(args.transcript, result.transcript)
    word = result.word.label() if result.word is not None else "none"
    lines = [
        "protocol: qis",
        f"cluster: {','.join(_fmt(v) for v in cluster.as_tuple())}",
        f"input: {_amps_csv(amps)}",
        f"seed: {args.seed}",
        f"correction_source: {result.correction_source}",
        f"outcome_key: {result.key.display()}",
        f"correction: {word}",
        f"fidelity: {_fmt(result.fidelity)}",
        f"recovered: {str(result.recovered).lower()}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK if result.recovered else EXIT_PROTOCOL_FAILURE


def _parse_beta_grid(text: str) -> List[float]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("--beta range must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError("--beta range must have positive step and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-6)) + 1
        return [start + k * step for k in range(count)]
    return _parse_floats(text, "--beta")


def _sweep_row(job: Tuple[float, float, float, int, int, int]) -> str:
    beta, gamma, rho, n, mc_samples, row_seed = job
    p_eq = psuc_formula(n, beta, gamma, rho)
    p_closed = psuc_closed_form(n, beta, gamma, rho)
    if mc_samples > 0:
        side = math.sqrt((1.0 - beta * beta - gamma * gamma) / 2.0)
        plan = TrialPlan(
            cluster=ClusterParams(side, beta, gamma, side), rho=rho, max_trials=n
        )
        p_mc = monte_carlo_success_frequency(
            SingleInput(0.6, 0.8), plan, mc_samples, row_seed
        )
        mc_text = _fmt(p_mc)
    else:
        mc_text = "nan"
    return f"{_fmt(beta)},{n},{_fmt(p_eq)},{_fmt(p_closed)},{mc_text}"


def cmd_sweep_fig1(args: argparse.Namespace) -> int:
    betas = _parse_beta_grid(args.beta)
    ns = [int(tok) for tok in args.n.split(",")]
    gamma = args.gamma
    rho = args.rho
    if gamma <= 0:
        raise ValueError("--gamma must be positive")
    if any(n < 2 for n in ns):
        raise ValueError("--n values must be at least 2")
    for beta in betas:
        if beta <= 0:
            raise ValueError("--beta values must be positive")
        if beta * beta + gamma * gamma >= 1.0 - 1e-12:
            raise ValueError(
                f"infeasible point beta={beta:.12g}, gamma={gamma:.12g}: "
                "beta^2 + gamma^2 must stay below 1"
            )
    jobs = []
    idx = 0
    for n in ns:
        for beta in betas:
            row_seed = int(
                np.random.SeedSequence(entropy=(args.seed, idx)).generate_state(
                    1, np.uint64
                )[0]
            )
            jobs.append((beta, gamma, rho, n, args.mc_samples, row_seed))
            idx += 1
    if args.parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.parallel) as pool:
            rows = list(pool.map(_sweep_row, jobs, chunksize=1))
    else:
        rows = [_sweep_row(job) for job in jobs]
    text = "\n".join(["beta,N,p_eq6,p_closed_form,p_montecarlo"] + rows) + "\n"
    _write_text(args.out, text)
    return EXIT_OK


def cmd_verify_table1(args: argparse.Namespace) -> int:
    report = verify_table1()
    text = report.render()
    _write_text(args.out, text)
    if args.out not in (None, "-"):
        sys.stdout.write(
            f"{len(report.results)} rows checked, "
            f"{len(report.mismatches)} mismatches\n"
        )
    return EXIT_OK if report.all_pass else EXIT_MISMATCH


def cmd_eve(args: argparse.Namespace) -> int:
    cluster = _parse_cluster(args.cluster)
    config = AttackConfig(attachment_point=args.attach)
    if args.protocol == "teleport":
        if args.substitution:
            raise ValueError("--substitution applies to the qis protocol only")
        inp1 = None
        if args.input is not None:
            amps = _parse_amplitudes(args.input, 2, args.renormalize)
            inp1 = SingleInput(complex(amps[0]), complex(amps[1]))
        report = run_teleport_with_eve(inp1, cluster, config)
    else:
        inp2 = None
        if args.input is not None:
            amps = _parse_amplitudes(args.input, 4, args.renormalize)
            inp2 = TwoInput(*(complex(a) for a in amps))
        report = run_qis_with_eve(inp2, cluster, config)
    sys.stdout.write(report.render())
    ok = report.leak_free
    if args.substitution:
        sub = dishonest_bob_substitution(
            inp2, rounds=args.rounds, rng_seed=args.seed, cluster=cluster
        )
        sys.stdout.write(sub.render())
        ok = ok and sub.attack_verdict == "DISCARD" and sub.honest_verdict == "ACCEPT"
    return EXIT_OK if ok else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clustersim",
        description="Cluster-channel teleportation and state-splitting simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_tel = sub.add_parser("teleport", help="run the single-qubit protocol")
    p_tel.add_argument("--input", required=True, help="2 reals or 4 re,im values")
    p_tel.add_argument("--cluster", default=None, help="alpha,beta,gamma,eta")
    p_tel.add_argument("--rho", type=float, default=1.5)
    p_tel.add_argument("--max-trials", "--n", dest="max_trials", type=int, default=1)
    p_tel.add_argument("--seed", type=int, default=0)
    p_tel.add_argument("--renormalize", action="store_true")
    p_tel.add_argument("--transcript", default=None, help="write transcript here")
    p_tel.set_defaults(func=cmd_teleport)

    p_qis = sub.add_parser("qis", help="run the two-qubit splitting protocol")
    p_qis.add_argument("--input", required=True, help="4 reals or 8 re,im values")
    p_qis.add_argument("--cluster", default=None, help="alpha,beta,gamma,eta")
    p_qis.add_argument("--seed", type=int, default=0)
    p_qis.add_argument(
        "--correction", choices=("table", "synthesized"), default="table"
    )
    p_qis.add_argument("--renormalize", action="store_true")
    p_qis.add_argument("--transcript", default=None, help="write transcript here")
    p_qis.set_defaults(func=cmd_qis)

    p_sweep = sub.add_parser(
        "sweep-fig1", help="sweep retry success probability to CSV"
    )
    p_sweep.add_argument("--gamma", type=float, default=0.5)
    p_sweep.add_argument("--rho", type=float, default=1.5)
    p_sweep.add_argument(
        "--beta", default="0.1:0.8:0.05", help="start:stop:step or comma list"
    )
    p_sweep.add_argument("--n", default="2,5,10", help="comma list of trial budgets")
    p_sweep.add_argument(
        "--mc-samples",
        type=int,
        default=0,
        help="full-protocol Monte Carlo runs per row (0 writes nan)",
    )
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--parallel", type=int, default=1)
    p_sweep.add_argument("--out", default="-", help="output path, - for stdout")
    p_sweep.set_defaults(func=cmd_sweep_fig1)

    p_table = sub.add_parser(
        "verify-table1", help="adjudicate the published correction table"
    )
    p_table.add_argument("--out", default="-", help="output path, - for stdout")
    p_table.set_defaults(func=cmd_verify_table1)

    p_eve = sub.add_parser("eve", help="wiretap and substitution analyses")
    p_eve.add_argument("--protocol", choices=("teleport", "qis"), required=True)
    p_eve.add_argument("--input", default=None)
    p_eve.add_argument("--cluster", default=None)
    p_eve.add_argument("--attach", default="3", help="listener attachment qubit")
    p_eve.add_argument("--renormalize", action="store_true")
    p_eve.add_argument(
        "--substitution", action="store_true", help="also run the dishonest-Bob check"
    )
    p_eve.add_argument("--rounds", type=int, default=1000)
    p_eve.add_argument("--seed", type=int, default=0)
    p_eve.set_defaults(func=cmd_eve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else EXIT_CONFIG
    try:
        return args.func(args)
    except (ValueError, OwnershipError, TransportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
