"""Compare the jit and vectorized-numpy kernel backends.

Times each statevector kernel on a dense 9-qubit state (the largest system
the simulator touches) and an end-to-end branch sweep that chains the three
pair projections of the splitting protocol over all 64 announcement
combinations. Run as a script:

    python3 benchmarks/bench_kernels.py [--qubits 9] [--reps 200]
"""

import argparse
import math
import time

import numpy as np

from clustersim import _kernels_numpy

try:
    from clustersim import _kernels_numba
except ImportError:
    _kernels_numba = None

_SQ2 = 1.0 / math.sqrt(2.0)
_BELLS = {
    "Phi+": np.array([_SQ2, 0, 0, _SQ2], dtype=np.complex128),
    "Phi-": np.array([_SQ2, 0, 0, -_SQ2], dtype=np.complex128),
    "Psi+": np.array([0, _SQ2, _SQ2, 0], dtype=np.complex128),
    "Psi-": np.array([0, _SQ2, -_SQ2, 0], dtype=np.complex128),
}
_HADAMARD = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=np.complex128)


def random_state(n: int, seed: int) -> np.ndarray:
    gen = np.random.default_rng(seed)
    amps = gen.normal(size=2**n) + 1j * gen.normal(size=2**n)
    return amps / np.linalg.norm(amps)


def best_of(fn, reps: int) -> float:
    best = math.inf
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def branch_sweep(impl, amps: np.ndarray, n: int) -> float:
    """All 64 three-stage projection chains; returns total probability."""
    total = 0.0
    for b1 in _BELLS.values():
        r1 = impl.project_pair(amps, n, 0, 2, b1)
        for b2 in _BELLS.values():
            r2 = impl.project_pair(r1, n - 2, 0, 3, b2)
            for b3 in _BELLS.values():
                r3 = impl.project_pair(r2, n - 4, 0, 1, b3)
                total += float(np.real(np.vdot(r3, r3)))
    return total


def kernel_cases(impl, amps: np.ndarray, n: int):
    bra = np.array([1.0, 0.0], dtype=np.complex128)
    return {
        "apply_1q": lambda: impl.apply_1q(amps, n, n // 2, _HADAMARD),
        "apply_cnot": lambda: impl.apply_cnot(amps, n, 0, n - 1),
        "project_single": lambda: impl.project_single(amps, n, n // 2, bra),
        "project_pair": lambda: impl.project_pair(amps, n, 0, n - 1, _BELLS["Phi+"]),
        "branch_sweep_64": lambda: branch_sweep(impl, amps, n),
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--qubits", type=int, default=9)
    parser.add_argument("--reps", type=int, default=200)
    args = parser.parse_args()
    if args.qubits < 6:
        parser.error("--qubits must be at least 6 (the sweep projects 6 away)")
    amps = random_state(args.qubits, seed=0)

    backends = {"numpy": _kernels_numpy}
    if _kernels_numba is not None:
        backends["numba"] = _kernels_numba
        for case in kernel_cases(_kernels_numba, amps, args.qubits).values():
            case()  # trigger jit compilation outside the timed region
    else:
        print("numba backend unavailable; timing numpy only")

    results = {}
    for name, impl in backends.items():
        for case, fn in kernel_cases(impl, amps, args.qubits).items():
            reps = max(args.reps // 10, 3) if case == "branch_sweep_64" else args.reps
            results[(case, name)] = best_of(fn, reps)

    sanity = {
        name: branch_sweep(impl, amps, args.qubits)
        for name, impl in backends.items()
    }
    if max(sanity.values()) - min(sanity.values()) > 1e-9:
        print("warning: backends disagree on the branch sweep:", sanity)

    cases = list(kernel_cases(_kernels_numpy, amps, args.qubits))
    header = f"{'kernel':<18}{'numpy':>12}"
    if "numba" in backends:
        header += f"{'numba':>12}{'speedup':>10}"
    print(f"{args.qubits} qubits, best of {args.reps} reps, times in us")
    print(header)
    for case in cases:
        t_np = results[(case, "numpy")] * 1e6
        line = f"{case:<18}{t_np:>12.2f}"
        if "numba" in backends:
            t_nb = results[(case, "numba")] * 1e6
            line += f"{t_nb:>12.2f}{t_np / t_nb:>10.2f}x"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
