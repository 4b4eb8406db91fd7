"""Batch experiment driver: eigenvalue gap counts, timings, extension demos, factor files.

Every subcommand emits RFC-4180-style CSV (UTF-8, LF, header row) to --out
(stdout by default).  Outputs are deterministic for a fixed --seed except
the timing columns.  Exit codes: 0 success, 1 validation error, 2 IO error.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from dataclasses import dataclass

import numpy as np

from .dpss import (
    DENSE_GUARD,
    PreconditionViolated,
    transition_count,
)
from .fft_kernels import prolate_matrix_dense
from .fourier_ext import FourierExtensionConfig, run_fourier_extension
from .lowrank import transition_count_budget
from .operators import (
    FactorFileError,
    FastFactorization,
    FastProjector,
    FastPseudoinverse,
    FastTikhonov,
    SlepianParams,
    describe_operator,
    load_operator,
    operator_to_bytes,
    save_operator,
)

__all__ = ["main", "ExperimentGrid"]

_MODES = {
    "project": FastProjector,
    "factorize": FastFactorization,
    "pinv": FastPseudoinverse,
    "tikhonov": FastTikhonov,
}


@dataclass(frozen=True)
class ExperimentGrid:
    """Cartesian experiment grid with a repetition count and an RNG seed."""

    n_values: tuple[int, ...]
    w_values: tuple[float, ...]
    eps_values: tuple[float, ...]
    trials: int
    seed: int

    def __post_init__(self):
        if any(n < 2 for n in self.n_values):
            raise ValueError("signal lengths must be at least 2")
        if any(not 0.0 < w < 0.5 for w in self.w_values):
            raise ValueError("half-bandwidths must lie in (0, 1/2)")
        if any(not 0.0 < e < 0.5 for e in self.eps_values):
            raise ValueError("tolerances must lie in (0, 1/2)")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")

    def points(self):
        for n in self.n_values:
            for w in self.w_values:
                for eps in self.eps_values:
                    yield n, w, eps


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _int_list(text):
    return tuple(int(v) for v in text.split(","))


def _float_list(text):
    return tuple(float(v) for v in text.split(","))


def _build_parser():
    parser = _Parser(
        prog="prolate",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=12345, help="RNG seed (default 12345)")
    common.add_argument("--out", default="-", help="output path, '-' for stdout (default)")
    common.add_argument(
        "--dense-guard",
        type=int,
        default=DENSE_GUARD,
        help=f"largest n for dense comparisons (default {DENSE_GUARD})",
    )
    common.add_argument("--trials", type=int, default=3, help="timing repetitions (default 3)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "gap-count",
        parents=[common],
        help="count eigenvalues between the cluster plateaus",
        description="CSV columns: n, w, eps, count (eigenvalues strictly inside "
        "(eps, 1-eps)), cor1_bound ((8/pi^2 log(8n)+12) log(15/eps)), asymptotic "
        "((2/pi^2) log(n) log(1/eps - 1)).",
    )
    p.add_argument("--n", type=_int_list, default=(256, 512, 1024, 2048, 4096))
    p.add_argument("--w", type=_float_list, default=(0.25,))
    p.add_argument("--eps", type=_float_list, default=(1e-3, 1e-6, 1e-9))

    p = sub.add_parser(
        "bench",
        parents=[common],
        help="setup/apply timings for the fast operators",
        description="CSV columns: n, w, eps, mode, setup_seconds, apply_seconds, "
        "dense_apply_seconds (blank above --dense-guard).  Medians over --trials.",
    )
    p.add_argument("--mode", choices=sorted(_MODES), action="append", default=None)
    p.add_argument("--n", type=_int_list, default=(1024, 4096, 16384))
    p.add_argument("--w", type=_float_list, default=(0.25,))
    p.add_argument("--eps", type=_float_list, default=(1e-6,))
    p.add_argument("--alpha", type=float, default=1e-2, help="tikhonov weight (default 1e-2)")

    p = sub.add_parser(
        "fourier-ext",
        parents=[common],
        help="Gibbs-suppression comparison on the extension least-squares problem",
        description="CSV columns: m, method (fourier | ext_exact_pinv | ext_fast_pinv | "
        "ext_exact_tik | ext_fast_tik), rel_rms (relative RMS error on a uniform "
        "evaluation grid of [-1, 1]), seconds (coefficient pipeline time).",
    )
    p.add_argument("--m", type=_int_list, default=(40, 80, 160, 320, 640))
    p.add_argument("--t-ext", type=float, default=1.5)
    p.add_argument("--pinv-threshold", type=float, default=1e-4)
    p.add_argument("--fast-eps", type=float, default=1e-5)
    p.add_argument("--alpha", type=float, default=1e-8)
    p.add_argument("--eval-points", type=int, default=10_000)
    p.add_argument("--constant", action="store_true", help="replace the target with f = 1")

    p = sub.add_parser(
        "linear-predict",
        parents=[common],
        help="one-step linear prediction of a bandlimited process",
        description="CSV columns: n, w, eps, coeff_l2, coeff_linf, topk_residual "
        "(norm of B a - b on the leading-k eigenspace; blank above --dense-guard).",
    )
    p.add_argument("--n", type=_int_list, default=(512,))
    p.add_argument("--w", type=_float_list, default=(0.25,))
    p.add_argument("--eps", type=_float_list, default=(1e-6,))

    p = sub.add_parser(
        "precompute",
        parents=[common],
        help="build an operator and persist its factors",
        description="Writes the binary factor file to --out (required, not '-').",
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--kind", choices=sorted(_MODES), required=True)
    p.add_argument("--alpha", type=float, default=1e-2)
    p.add_argument("--k", type=int, default=None)

    p = sub.add_parser(
        "load-check",
        parents=[common],
        help="load a factor file, verify it round-trips, print a summary",
    )
    p.add_argument("path")

    return parser


def _open_out(path):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", newline="", encoding="utf-8"), True


def _write_rows(path, header, rows):
    fh, close = _open_out(path)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if close:
            fh.close()


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return x


def _cmd_gap_count(args):
    grid = ExperimentGrid(args.n, args.w, args.eps, args.trials, args.seed)
    rows = []
    for n, w, eps in grid.points():
        count = transition_count(n, w, eps)
        bound = transition_count_budget(n, eps)
        asym = 2.0 / math.pi**2 * math.log(n) * math.log(1.0 / eps - 1.0)
        rows.append((n, _fmt(w), _fmt(eps), count, _fmt(bound), _fmt(asym)))
    _write_rows(args.out, ["n", "w", "eps", "count", "cor1_bound", "asymptotic"], rows)
    return 0


def _build_operator(mode, n, w, eps, alpha, k=None):
    params = SlepianParams.create(n, w, eps, k=k)
    if mode == "tikhonov":
        return FastTikhonov.build(params, alpha)
    return _MODES[mode].build(params)


def _median_time(fn, trials):
    times = []
    for _ in range(trials):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def _cmd_bench(args):
    grid = ExperimentGrid(args.n, args.w, args.eps, args.trials, args.seed)
    modes = args.mode or sorted(_MODES)
    seeds = np.random.SeedSequence(args.seed).spawn(len(list(grid.points())) * len(modes))
    rows = []
    i = 0
    for n, w, eps in grid.points():
        for mode in modes:
            rng = np.random.default_rng(seeds[i])
            i += 1
            x = rng.standard_normal(n)
            setup = _median_time(lambda: _build_operator(mode, n, w, eps, args.alpha), args.trials)
            op = _build_operator(mode, n, w, eps, args.alpha)
            apply_s = _median_time(lambda: op.apply(x), args.trials)
            dense_s = ""
            if n <= args.dense_guard:
                b = prolate_matrix_dense(n, w)
                dense_s = _fmt(_median_time(lambda: b @ x, args.trials))
            rows.append((n, _fmt(w), _fmt(eps), mode, _fmt(setup), _fmt(apply_s), dense_s))
    _write_rows(
        args.out,
        ["n", "w", "eps", "mode", "setup_seconds", "apply_seconds", "dense_apply_seconds"],
        rows,
    )
    return 0


def _cmd_fourier_ext(args):
    config = FourierExtensionConfig(
        t_ext=args.t_ext,
        m_values=tuple(args.m),
        pinv_threshold=args.pinv_threshold,
        fast_eps=args.fast_eps,
        alpha=args.alpha,
        eval_points=args.eval_points,
        constant_target=args.constant,
    )
    rows = [
        (m, method, _fmt(rel), _fmt(sec))
        for m, method, rel, sec in run_fourier_extension(config, seed=args.seed)
    ]
    _write_rows(args.out, ["m", "method", "rel_rms", "seconds"], rows)
    return 0


def prediction_rhs(n: int, w: float) -> np.ndarray:
    """Right-hand side for one-step prediction: b[m] = sin(2 pi w (n-m)) / (pi (n-m))."""
    gap = n - np.arange(n, dtype=float)
    return np.sin(2.0 * np.pi * w * gap) / (np.pi * gap)


def _cmd_linear_predict(args):
    grid = ExperimentGrid(args.n, args.w, args.eps, args.trials, args.seed)
    rows = []
    for n, w, eps in grid.points():
        b = prediction_rhs(n, w)
        op = FastPseudoinverse.build(SlepianParams.create(n, w, eps))
        a = op.apply(b)
        resid = ""
        if n <= args.dense_guard:
            dense = prolate_matrix_dense(n, w)
            _, vecs = np.linalg.eigh(dense)
            vk = vecs[:, ::-1][:, : op.params.k]
            resid = _fmt(float(np.linalg.norm(vk.T @ (dense @ a - b))))
        rows.append((
            n, _fmt(w), _fmt(eps),
            _fmt(float(np.linalg.norm(a))),
            _fmt(float(np.max(np.abs(a)))),
            resid,
        ))
    _write_rows(args.out, ["n", "w", "eps", "coeff_l2", "coeff_linf", "topk_residual"], rows)
    return 0


def _cmd_precompute(args):
    if args.out == "-":
        raise ValueError("precompute requires --out to be a file path")
    op = _build_operator(args.kind, args.n, args.w, args.eps, args.alpha, k=args.k)
    save_operator(op, args.out)
    print(describe_operator(op), file=sys.stderr)
    return 0


def _cmd_load_check(args):
    op = load_operator(args.path)
    with open(args.path, "rb") as fh:
        original = fh.read()
    if operator_to_bytes(op) != original:
        raise FactorFileError("file does not round-trip bit-identically")
    print(describe_operator(op))
    return 0


_COMMANDS = {
    "gap-count": _cmd_gap_count,
    "bench": _cmd_bench,
    "fourier-ext": _cmd_fourier_ext,
    "linear-predict": _cmd_linear_predict,
    "precompute": _cmd_precompute,
    "load-check": _cmd_load_check,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, PreconditionViolated, RuntimeError) as exc:
        print(f"prolate: {exc}", file=sys.stderr)
        return 1
    except FactorFileError as exc:
        print(f"prolate: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"prolate: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
