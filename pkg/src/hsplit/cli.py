"""Command-line front end: run experiments, verify properties, sweep schedules.

Subcommands
-----------
``run``            one splitting run on a shipped problem; writes a CSV
                   trace and a JSON metadata sidecar.
``verify``         seeded property suites with per-property PASS/FAIL.
``bench``          grid sweep over schedule parameters; one trace per
                   cell plus a deterministic summary CSV.
``list-problems``  shipped problem ids with manifold and provenance.

Configuration is a flat ``key = value`` text file; command-line flags
win over config values.  The output directory resolves in the order
``--out`` flag, ``HSPLIT_OUT_DIR`` environment variable, config ``out``
key, then ``./runs``.

Exit codes: 0 success / tolerance reached; 1 verification failure;
2 iteration budget exhausted before tolerance; 3 resolvent failure;
64 bad configuration or unknown suite; 65 unknown problem id.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import os
import sys
from pathlib import Path

from . import apps, splitting, verify

__all__ = ["main"]

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_MAX_ITER = 2
EXIT_RESOLVENT_FAILURE = 3
EXIT_CONFIG = 64
EXIT_UNKNOWN_PROBLEM = 65

_RUN_KEYS = {
    "problem", "algorithm", "alpha", "beta", "lambda", "r",
    "tol", "ref_tol", "max_iter", "out", "seed", "timing",
}
_BENCH_KEYS = {
    "problems", "alpha", "beta", "lambda", "r",
    "tol", "max_iter", "out", "seed", "jobs",
}


class ConfigError(ValueError):
    pass


def _parse_config_file(path: str, allowed: set[str]) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in allowed:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _merged(args: argparse.Namespace, allowed: set[str]) -> dict[str, str]:
    values: dict[str, str] = {}
    if getattr(args, "config", None):
        values.update(_parse_config_file(args.config, allowed))
    for key in allowed:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = str(flag)
    return values


def _float(values: dict[str, str], key: str, default: float) -> float:
    try:
        return float(values.get(key, default))
    except ValueError as exc:
        raise ConfigError(f"{key} must be a number, got {values[key]!r}") from exc


def _int(values: dict[str, str], key: str, default: int) -> int:
    try:
        return int(values.get(key, default))
    except ValueError as exc:
        raise ConfigError(f"{key} must be an integer, got {values[key]!r}") from exc


def _out_dir(args: argparse.Namespace, values: dict[str, str]) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    env = os.environ.get("HSPLIT_OUT_DIR")
    if env:
        return Path(env)
    return Path(values.get("out", "runs"))


def _schedule_and_stop(values: dict[str, str]):
    schedule = splitting.StepSchedule.constant(
        alpha=_float(values, "alpha", 0.5),
        beta=_float(values, "beta", 0.5),
        lam=_float(values, "lambda", 1.0),
        r=_float(values, "r", 1.0),
    )
    stop = splitting.StoppingRule(
        max_iter=_int(values, "max_iter", 10_000),
        step_tol=_float(values, "tol", 1e-9),
        ref_tol=float(values["ref_tol"]) if "ref_tol" in values else None,
    )
    return schedule, stop


def _exit_for(trace: splitting.IterationTrace) -> int:
    if trace.termination_reason in ("step_tol", "ref_tol"):
        return EXIT_OK
    if trace.termination_reason == "resolvent_failure":
        return EXIT_RESOLVENT_FAILURE
    return EXIT_MAX_ITER


def cmd_run(args: argparse.Namespace) -> int:
    try:
        values = _merged(args, _RUN_KEYS)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    problem_id = values.get("problem")
    if not problem_id:
        print("config error: no problem specified", file=sys.stderr)
        return EXIT_CONFIG
    try:
        problem = apps.get_problem(problem_id)
    except KeyError as exc:
        print(f"unknown problem: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_PROBLEM
    try:
        schedule, stop = _schedule_and_stop(values)
        timing = values.get("timing", "false").lower() in ("1", "true", "yes")
        trace = splitting.run(
            problem, schedule, stop,
            algorithm=values.get("algorithm", "auto"),
            seed=_int(values, "seed", 0),
        )
    except (splitting.ScheduleError, ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = _out_dir(args, values)
    csv_path, meta_path = trace.write(out, problem_id, deterministic_timing=not timing)
    print(f"{problem_id}: {trace.termination_reason} after {trace.iterations} iterations")
    print(f"trace: {csv_path}")
    print(f"meta:  {meta_path}")
    if trace.error:
        print(f"error: {trace.error}", file=sys.stderr)
    return _exit_for(trace)


def cmd_verify(args: argparse.Namespace) -> int:
    names = list(verify.SUITES) if args.suite == "all" else [args.suite]
    unknown = [n for n in names if n not in verify.SUITES]
    if unknown:
        print(f"unknown suite: {', '.join(unknown)}", file=sys.stderr)
        return EXIT_CONFIG
    results, all_passed = verify.run_suites(
        names, args.seed, with_anti_monotone=args.include_anti_monotone
    )
    sys.stdout.write(verify.format_report(results, args.seed))
    return EXIT_OK if all_passed else EXIT_VERIFY_FAIL


def _float_grid(values: dict[str, str], key: str, default: str) -> list[float]:
    raw = values.get(key, default)
    try:
        return [float(tok) for tok in str(raw).split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"{key} must be comma-separated numbers, got {raw!r}") from exc


def _bench_cell(problem_id: str, alpha: float, beta: float, lam: float, r: float,
                stop: splitting.StoppingRule, seed: int, out: Path):
    """Run one sweep cell; returns its summary row.  Never raises."""
    stem = f"{problem_id}__a{alpha}_b{beta}_l{lam}_r{r}"
    try:
        problem = apps.get_problem(problem_id)
    except KeyError:
        return (problem_id, alpha, beta, lam, r, "unknown_problem", "nan")
    schedule = splitting.StepSchedule.constant(alpha=alpha, beta=beta, lam=lam, r=r)
    report = splitting.validate_schedule(schedule, max(stop.max_iter, 1))
    if not report.passed:
        return (problem_id, alpha, beta, lam, r, "schedule_invalid", "nan")
    try:
        trace = splitting.run(problem, schedule, stop, seed=seed, validate=False)
    except Exception:
        return (problem_id, alpha, beta, lam, r, "error", "nan")
    trace.write(out, stem)
    final_dx = trace.final_step_distance()
    if trace.termination_reason in ("step_tol", "ref_tol"):
        iters = str(trace.iterations)
    else:
        iters = trace.termination_reason
    return (problem_id, alpha, beta, lam, r, iters, repr(float(final_dx)))


def cmd_bench(args: argparse.Namespace) -> int:
    try:
        values = _merged(args, _BENCH_KEYS)
        problems = [p.strip() for p in values.get("problems", "").split(",") if p.strip()]
        if not problems:
            raise ConfigError("no problems specified")
        alphas = _float_grid(values, "alpha", "0.5")
        betas = _float_grid(values, "beta", "0.5")
        lams = _float_grid(values, "lambda", "1.0")
        rs = _float_grid(values, "r", "1.0")
        stop = splitting.StoppingRule(
            max_iter=_int(values, "max_iter", 10_000),
            step_tol=_float(values, "tol", 1e-9),
        )
        seed = _int(values, "seed", 0)
        jobs = max(1, _int(values, "jobs", 1))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = _out_dir(args, values)
    out.mkdir(parents=True, exist_ok=True)

    cells = sorted(
        (p, a, b, l, r)
        for p in problems
        for a in alphas
        for b in betas
        for l in lams
        for r in rs
    )
    rows: list[tuple] = [None] * len(cells)
    with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = {
            pool.submit(_bench_cell, *cell, stop, seed ^ idx, out): idx
            for idx, cell in enumerate(cells)
        }
        for future in concurrent.futures.as_completed(futures):
            rows[futures[future]] = future.result()

    summary = out / "summary.csv"
    lines = ["problem,alpha,beta,lambda,r,iters_to_tol,final_dx"]
    lines.extend(
        f"{p},{a!r},{b!r},{l!r},{r!r},{iters},{dx}" for p, a, b, l, r, iters, dx in rows
    )
    summary.write_text("\n".join(lines) + "\n")
    print(f"swept {len(cells)} cells -> {summary}")
    return EXIT_OK


def cmd_list_problems(args: argparse.Namespace) -> int:
    for pid in apps.problem_ids():
        meta = apps.problem_metadata(pid)
        print(f"{pid:18s} {meta['manifold']:24s} {meta['summary']}")
        print(f"{'':18s} reference: {meta['provenance']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hsplit",
        description="Splitting iterations for common equilibrium and inclusion "
                    "solutions on Hadamard manifolds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one problem and write its trace")
    run.add_argument("--config", help="flat key = value config file")
    run.add_argument("--problem", help="problem id (see list-problems)")
    run.add_argument("--algorithm", choices=["auto", "common", "inclusion", "equilibrium"])
    run.add_argument("--alpha", type=float, help="relaxation toward the field resolvent")
    run.add_argument("--beta", type=float, help="relaxation toward the bifunction resolvent")
    run.add_argument("--lambda", dest="lambda", type=float, help="field resolvent step")
    run.add_argument("--r", type=float, help="bifunction resolvent parameter")
    run.add_argument("--tol", type=float, help="stop when d(x_{n+1}, x_n) <= tol")
    run.add_argument("--ref-tol", dest="ref_tol", type=float,
                     help="stop when d(x_n, reference) <= tol")
    run.add_argument("--max-iter", dest="max_iter", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--out", help="output directory")
    run.add_argument("--timing", action="store_const", const="true",
                     help="record measured wall times (breaks byte reproducibility)")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="run seeded property suites")
    ver.add_argument("suite", help="geometry, fields, equilibrium, splitting, apps, or all")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--include-anti-monotone", action="store_true",
                     help="register the anti-monotone fixture as if it were a real "
                          "field; the monotonicity property then fails with a witness")
    ver.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", help="sweep schedule grids over problems")
    bench.add_argument("--config", help="flat key = value config file")
    bench.add_argument("--problems", help="comma-separated problem ids")
    bench.add_argument("--alpha", help="comma-separated grid")
    bench.add_argument("--beta", help="comma-separated grid")
    bench.add_argument("--lambda", dest="lambda", help="comma-separated grid")
    bench.add_argument("--r", help="comma-separated grid")
    bench.add_argument("--tol", type=float)
    bench.add_argument("--max-iter", dest="max_iter", type=int)
    bench.add_argument("--seed", type=int)
    bench.add_argument("--jobs", type=int, help="concurrent cells")
    bench.add_argument("--out", help="output directory")
    bench.set_defaults(func=cmd_bench)

    lp = sub.add_parser("list-problems", help="show shipped problems")
    lp.set_defaults(func=cmd_list_problems)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
