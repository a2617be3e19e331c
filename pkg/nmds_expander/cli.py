"""
Command-line front end.

    nmds graph gen --kind random_regular --n 8 --delta 4 --seed 1
    nmds assign balance --graph out/graph.json --p 1/4 --pbar 1/2 --seed 1
    nmds code build --graph out/graph.json --q1 4 --q2 16 --r 1/2 --R 1/2 --p 1/4 --seed 1
    nmds decode mc --instance out/instance.json --t 0..2 --rho 0..2 --trials 50 --seed 1
    nmds tradeoff sweep2 --eps 0.1 --R 0.7 --alpha 1/2
    nmds replay out

Every command writes its artifacts and a manifest.toml into --out (default:
the output_dir preference). Exit status is 0 on success, 1 with a JSON error
record on stderr when the computation fails, 2 for bad arguments or settings.
"""

import argparse
import json
import sys
import tempfile
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .assignment import (
    balance,
    init_left_exact,
    load_assignment,
    save_assignment,
    verify_good,
)
from .debug import debug_print
from .decode import (
    DecodeOutcome,
    channel_apply,
    iter_decode,
    monte_carlo_curve,
    nearest_codewords,
)
from .errors import NmdsError, TooLarge
from .expander import (
    assemble,
    load_instance,
    min_outer_distance_bruteforce,
    outer_distance_guarantee,
    random_codeword,
    rate_of,
    save_instance,
)
from .fields import FieldError, build_tower
from .graph import GraphKind, build_graph, gamma, is_ramanujan, load_graph, ramanujan_bound, save_graph
from .paths import get_output_dir
from .preferences import ConfigError, get_preferences
from .report import ReportFormat, emit_report, file_digest, read_manifest, write_manifest
from .tradeoff import (
    DecodableDesignPoint,
    EncodableDesignPoint,
    SingleAlphabetComparison,
    SweepKind,
    sweep,
)
from .util import as_fraction

PATH_OPTIONS = ("--graph", "--assignment", "--instance")

MC_COLUMNS = ("t", "rho", "trials", "successes", "rate")


@dataclass
class RunResult:
    artifacts: list[Path] = field(default_factory=list)
    seed: int | None = None
    status: int = 0


Handler = Callable[[argparse.Namespace, Path], RunResult]
Check = Callable[[argparse.Namespace], None]

_COMMANDS: dict[tuple[str, str], Handler] = {}
_CHECKS: dict[tuple[str, str], Check] = {}


class BadArguments(NmdsError):
    """Raised when flags parse but their values cannot work together."""


def register(group: str, name: str):
    def decorator(handler: Handler) -> Handler:
        _COMMANDS[group, name] = handler
        return handler

    return decorator


def checks(group: str, name: str):
    """Registers a flag check that runs before anything is written."""

    def decorator(check: Check) -> Check:
        _CHECKS[group, name] = check
        return check

    return decorator


# ---- argument types -----------------------------------------------------------


def _rational(text: str):
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError) as ex:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from ex


def _rational_list(text: str):
    return [_rational(part) for part in text.split(",") if part.strip()]


def _int_range(text: str) -> list[int]:
    """"3", "0,2,5" or the inclusive range "0..4"."""
    try:
        if ".." in text:
            low, high = text.split("..", 1)
            return list(range(int(low), int(high) + 1))
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as ex:
        raise argparse.ArgumentTypeError(f"not an integer list or range: {text!r}") from ex


def _columns(*classes) -> list[str]:
    columns: list[str] = []
    for cls in classes:
        columns += [f.name for f in fields(cls) if f.name not in columns]
    return columns


def _require(ok: bool, message: str):
    if not ok:
        raise BadArguments(message)


def _require_share(flag: str, value, *, positive: bool = False, below_one: bool = False):
    low = value > 0 if positive else value >= 0
    high = value < 1 if below_one else value <= 1
    interval = f"{'(' if positive else '['}0, 1{')' if below_one else ']'}"
    _require(low and high, f"{flag} must lie in {interval}, got {value}")


def _report_path(out: Path, stem: str, args: argparse.Namespace) -> Path:
    return out / f"{stem}.{args.format}"


def _emit(records, args: argparse.Namespace, out: Path, stem: str, columns=None) -> Path:
    return emit_report(records, args.format, _report_path(out, stem, args), columns)


# ---- graph --------------------------------------------------------------------


@checks("graph", "gen")
def _check_graph_gen(args: argparse.Namespace):
    _require(args.n >= 1 and args.delta >= 1, f"Need --n, --delta >= 1, got {args.n}, {args.delta}")


@register("graph", "gen")
def _graph_gen(args: argparse.Namespace, out: Path) -> RunResult:
    g = build_graph(args.kind, args.n, args.delta, args.seed)
    path = out / "graph.json"
    save_graph(g, path)
    return RunResult([path], args.seed)


@register("graph", "gamma")
def _graph_gamma(args: argparse.Namespace, out: Path) -> RunResult:
    g = load_graph(args.graph)
    info = gamma(g)
    record = {
        "n": g.n,
        "delta": g.delta,
        "lambda1": info.lambda1,
        "lambda2": info.lambda2,
        "gamma": info.gamma,
        "ramanujan_bound": ramanujan_bound(g.delta),
        "ramanujan": is_ramanujan(g),
    }
    return RunResult([_emit([record], args, out, "gamma")])


# ---- assign -------------------------------------------------------------------


@checks("assign", "balance")
def _check_assign_balance(args: argparse.Namespace):
    _require_share("--p", args.p)
    _require_share("--pbar", args.pbar, below_one=True)
    _require(args.p <= args.pbar, f"Need --p <= --pbar, got {args.p} > {args.pbar}")


@register("assign", "balance")
def _assign_balance(args: argparse.Namespace, out: Path) -> RunResult:
    g = load_graph(args.graph)
    lab, trace = balance(init_left_exact(g, args.p, args.seed, pbar=args.pbar))
    path = out / "assignment.json"
    save_assignment(lab, path)

    record = {
        "reversals": trace.reversals,
        "initial_excess": trace.initial_excess,
        "phases_max": trace.phases_max,
        "good": verify_good(lab).ok,
    }
    steps = [
        {
            "source": step.source,
            "sink": step.sink,
            "path_length": step.path_length,
            "layer_sizes": ";".join(str(size) for size in step.layer_sizes),
        }
        for step in trace.steps
    ]
    columns = ("source", "sink", "path_length", "layer_sizes")
    return RunResult(
        [path, _emit([record], args, out, "balance"), _emit(steps, args, out, "reversals", columns)],
        args.seed,
    )


@register("assign", "verify")
def _assign_verify(args: argparse.Namespace, out: Path) -> RunResult:
    g = load_graph(args.graph)
    report = verify_good(load_assignment(args.assignment, g))
    records = [
        {"side": str(v.side), "vertex": v.vertex, "weight": v.weight, "bound": v.bound}
        for v in report.violations
    ]
    path = _emit(records, args, out, "violations", ("side", "vertex", "weight", "bound"))
    print(json.dumps({"good": report.ok, "violations": len(records)}))
    return RunResult([path], status=0 if report.ok else 1)


# ---- code ---------------------------------------------------------------------


@checks("code", "build")
def _check_code_build(args: argparse.Namespace):
    try:
        build_tower(args.q1, args.q2)
    except FieldError as ex:
        raise BadArguments(str(ex)) from ex

    _require_share("--r", args.r, positive=True)
    _require_share("--R", args.R, positive=True)
    _require_share("--p", args.p, below_one=True)
    _require(
        args.p <= min(args.r, args.R),
        f"Need --p <= --r and --p <= --R, got p={args.p}, r={args.r}, R={args.R}",
    )


@register("code", "build")
def _code_build(args: argparse.Namespace, out: Path) -> RunResult:
    g = load_graph(args.graph)
    tower = build_tower(args.q1, args.q2)
    inst = assemble(g, tower, args.r, args.R, args.p, args.seed)
    manifest = save_instance(inst, out)
    return RunResult(
        [manifest, out / "graph.json", out / "assignment.json"],
        args.seed,
    )


@register("code", "rate")
def _code_rate(args: argparse.Namespace, out: Path) -> RunResult:
    inst = load_instance(args.instance)
    record = {**inst.describe(), **rate_of(inst).as_record()}
    return RunResult([_emit([record], args, out, "rate")])


@register("code", "mindist")
def _code_mindist(args: argparse.Namespace, out: Path) -> RunResult:
    inst = load_instance(args.instance)
    distance = min_outer_distance_bruteforce(inst)
    spectral = gamma(inst.graph)

    bound = vacuous = None
    if 0 <= spectral.gamma < 1:
        guarantee = outer_distance_guarantee(inst, spectral.gamma)
        bound, vacuous = guarantee.value, guarantee.vacuous

    record = {
        **inst.describe(),
        "dim": inst.dim,
        "outer_distance": distance,
        "relative_distance": None if distance is None else distance / inst.n,
        "gamma": spectral.gamma,
        "theta": inst.theta,
        "delta_rel": inst.delta_rel,
        "dist_bound": bound,
        "dist_vacuous": vacuous,
    }
    return RunResult([_emit([record], args, out, "mindist")])


# ---- decode -------------------------------------------------------------------


def _check_decode_counts(t_values, rho_values, max_rounds):
    _require(min(t_values, default=0) >= 0, f"--t must be non-negative, got {t_values}")
    _require(min(rho_values, default=0) >= 0, f"--rho must be non-negative, got {rho_values}")
    _require(max_rounds is None or max_rounds >= 1, f"--max-rounds must be positive, got {max_rounds}")


@checks("decode", "mc")
def _check_decode_mc(args: argparse.Namespace):
    _check_decode_counts(args.t, args.rho, args.max_rounds)
    _require(args.trials >= 1, f"--trials must be positive, got {args.trials}")


@register("decode", "mc")
def _decode_mc(args: argparse.Namespace, out: Path) -> RunResult:
    inst = load_instance(args.instance)
    rows = monte_carlo_curve(inst, args.t, args.rho, args.trials, args.seed, args.max_rounds)
    records = [row.as_record() for row in rows]
    return RunResult([_emit(records, args, out, "mc", MC_COLUMNS)], args.seed)


@checks("decode", "one")
def _check_decode_one(args: argparse.Namespace):
    _check_decode_counts([args.t], [args.rho], args.max_rounds)


@register("decode", "one")
def _decode_one(args: argparse.Namespace, out: Path) -> RunResult:
    inst = load_instance(args.instance)
    rng = np.random.default_rng(args.seed)
    codeword = random_codeword(inst, rng)
    rw = channel_apply(inst, codeword, args.t, args.rho, int(rng.integers(2**63)))
    decoded, report = iter_decode(inst, rw, args.max_rounds, truth=codeword)

    oracle_distance = oracle_unique = agrees = None
    try:
        oracle_distance, ties = nearest_codewords(inst, rw)
        oracle_unique = len(ties) == 1
        agrees = report.outcome != DecodeOutcome.FAILURE and oracle_unique and decoded == ties[0]
    except TooLarge as ex:
        debug_print(f"Skipping the nearest-codeword oracle: {ex}")

    record = {
        "t": args.t,
        "rho": args.rho,
        "outcome": str(report.outcome),
        "rounds_used": report.rounds_used,
        "changed_blocks": ";".join(str(c) for c in report.changed_blocks),
        "oracle_distance": oracle_distance,
        "oracle_unique": oracle_unique,
        "oracle_agrees": agrees,
    }
    return RunResult([_emit([record], args, out, "decode")], args.seed)


# ---- tradeoff -----------------------------------------------------------------


def _check_sweep_shares(args: argparse.Namespace):
    for eps in args.eps:
        _require_share("--eps", eps, positive=True, below_one=True)
    for alpha in args.alpha:
        _require_share("--alpha", alpha, positive=True, below_one=True)
    for R in args.R:
        _require_share("--R", R, positive=True)


@checks("tradeoff", "sweep2")
def _check_sweep2(args: argparse.Namespace):
    _check_sweep_shares(args)


@register("tradeoff", "sweep2")
def _tradeoff_sweep2(args: argparse.Namespace, out: Path) -> RunResult:
    grid = {"eps": args.eps, "R": args.R, "alpha": args.alpha, "c_q": [args.c_q]}
    records = sweep(SweepKind.DECODABLE, grid)
    for record in records:
        for name in _columns(SingleAlphabetComparison):
            record.setdefault(name, None)

    columns = _columns(DecodableDesignPoint, SingleAlphabetComparison)
    return RunResult([_emit(records, args, out, "sweep2", columns)])


@checks("tradeoff", "sweep3")
def _check_sweep3(args: argparse.Namespace):
    _check_sweep_shares(args)
    _require(all(d > 0 for d in args.delta1), f"--delta1 must be positive, got {args.delta1}")


@register("tradeoff", "sweep3")
def _tradeoff_sweep3(args: argparse.Namespace, out: Path) -> RunResult:
    grid = {
        "eps": args.eps,
        "R": args.R,
        "r0": args.r0,
        "r_m": args.r_m,
        "kappa": args.kappa,
        "Delta1": args.delta1,
        "p": args.p,
        "alpha": args.alpha,
        "q2": [args.q2],
        "alpha_R": [args.alpha_r],
    }
    records = sweep(SweepKind.ENCODABLE, grid)
    return RunResult([_emit(records, args, out, "sweep3", _columns(EncodableDesignPoint))])


# ---- parser -------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=None, help="Artifact directory")
    common.add_argument(
        "--format", choices=[f.value for f in ReportFormat], default=ReportFormat.CSV.value
    )

    parser = argparse.ArgumentParser(prog="nmds", description="Mixed-alphabet expander codes")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    groups = parser.add_subparsers(dest="group", required=True)

    def sub(group_name, cmds, name, **kwargs):
        p = cmds.add_parser(name, parents=[common], **kwargs)
        p.set_defaults(handler=_COMMANDS[group_name, name], check=_CHECKS.get((group_name, name)))
        return p

    graph = groups.add_parser("graph", help="Bipartite graphs")
    graph_cmds = graph.add_subparsers(dest="command", required=True)
    p = sub("graph", graph_cmds, "gen", help="Build a delta-regular bipartite graph")
    p.add_argument("--kind", choices=[k.value for k in GraphKind], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p = sub("graph", graph_cmds, "gamma", help="Spectral ratio and Ramanujan check")
    p.add_argument("--graph", type=Path, required=True)

    assign = groups.add_parser("assign", help="Good edge assignments")
    assign_cmds = assign.add_subparsers(dest="command", required=True)
    p = sub("assign", assign_cmds, "balance", help="Balance a random left-exact assignment")
    p.add_argument("--graph", type=Path, required=True)
    p.add_argument("--p", type=_rational, required=True)
    p.add_argument("--pbar", type=_rational, required=True)
    p.add_argument("--seed", type=int, required=True)
    p = sub("assign", assign_cmds, "verify", help="Check both weight conditions")
    p.add_argument("--graph", type=Path, required=True)
    p.add_argument("--assignment", type=Path, required=True)

    code = groups.add_parser("code", help="Expander code instances")
    code_cmds = code.add_subparsers(dest="command", required=True)
    p = sub("code", code_cmds, "build", help="Assemble an instance and its F1 basis")
    p.add_argument("--graph", type=Path, required=True)
    p.add_argument("--q1", type=int, required=True)
    p.add_argument("--q2", type=int, required=True)
    p.add_argument("--r", type=_rational, required=True)
    p.add_argument("--R", type=_rational, required=True)
    p.add_argument("--p", type=_rational, required=True)
    p.add_argument("--seed", type=int, required=True)
    for name, help_text in (("rate", "Exact rates and bounds"), ("mindist", "Brute-force outer distance")):
        p = sub("code", code_cmds, name, help=help_text)
        p.add_argument("--instance", type=Path, required=True)

    decode = groups.add_parser("decode", help="Iterative decoding experiments")
    decode_cmds = decode.add_subparsers(dest="command", required=True)
    p = sub("decode", decode_cmds, "mc", help="Monte-Carlo success curve")
    p.add_argument("--instance", type=Path, required=True)
    p.add_argument("--t", type=_int_range, required=True)
    p.add_argument("--rho", type=_int_range, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-rounds", type=int, default=None)
    p = sub("decode", decode_cmds, "one", help="Decode one corrupted codeword")
    p.add_argument("--instance", type=Path, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--rho", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-rounds", type=int, default=None)

    tradeoff = groups.add_parser("tradeoff", help="Closed-form trade-offs")
    tradeoff_cmds = tradeoff.add_subparsers(dest="command", required=True)
    p = sub("tradeoff", tradeoff_cmds, "sweep2", help="Decodable construction design points")
    p.add_argument("--eps", type=_rational_list, required=True)
    p.add_argument("--R", type=_rational_list, required=True)
    p.add_argument("--alpha", type=_rational_list, required=True)
    p.add_argument("--c-q", type=_rational, default=1)
    p = sub("tradeoff", tradeoff_cmds, "sweep3", help="Encodable construction trade-offs")
    p.add_argument("--eps", type=_rational_list, required=True)
    p.add_argument("--R", type=_rational_list, required=True)
    p.add_argument("--r0", type=_rational_list, required=True)
    p.add_argument("--r-m", type=_rational_list, required=True)
    p.add_argument("--kappa", type=_rational_list, required=True)
    p.add_argument("--delta1", type=_rational_list, required=True)
    p.add_argument("--p", type=_rational_list, required=True)
    p.add_argument("--alpha", type=_rational_list, required=True)
    p.add_argument("--q2", type=int, default=None)
    p.add_argument("--alpha-r", type=_rational, default=None)

    replay = groups.add_parser("replay", help="Re-run a manifest and compare artifacts")
    replay.add_argument("manifest", type=Path, help="manifest.toml or its directory")
    replay.set_defaults(handler=None, check=None)

    return parser


def _recorded_command(argv: Sequence[str]) -> list[str]:
    """argv without --out, with input paths made absolute."""
    command: list[str] = []
    tokens = iter(argv)
    for token in tokens:
        name, eq, value = token.partition("=")
        if name == "--out":
            if not eq:
                next(tokens, None)
            continue
        if name in PATH_OPTIONS:
            if not eq:
                value = next(tokens, "")
            command += [name, str(Path(value).resolve())]
            continue
        command.append(token)
    return command


def _print_error(ex: Exception):
    record = {"error": type(ex).__name__, "message": str(ex)}
    print(json.dumps(record), file=sys.stderr)


def _replay(manifest_path: Path) -> int:
    manifest = read_manifest(manifest_path)
    expected: dict[str, str] = manifest.get("artifacts", {})  # type: ignore[assignment]

    with tempfile.TemporaryDirectory() as tmp:
        status = run([*manifest["command"], "--out", tmp])  # type: ignore[misc]
        mismatched = [
            name
            for name, digest in expected.items()
            if not (Path(tmp) / name).is_file() or file_digest(Path(tmp) / name) != digest
        ]

    print(json.dumps({"identical": not mismatched, "mismatched": mismatched}))
    return status or (1 if mismatched else 0)


def run(argv: Sequence[str]) -> int:
    argv = list(argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return int(ex.code or 0)

    try:
        prefs = get_preferences()
    except ConfigError as ex:
        _print_error(ex)
        return 2

    if args.check is not None:
        try:
            args.check(args)
        except BadArguments as ex:
            _print_error(ex)
            return 2

    try:
        if args.handler is None:
            return _replay(args.manifest)

        out = args.out if args.out is not None else get_output_dir()
        out.mkdir(parents=True, exist_ok=True)
        debug_print(f"{args.group} {args.command} -> {out} (debug={prefs.debug})")

        result = args.handler(args, out)
        manifest = write_manifest(out, _recorded_command(argv), result.seed, result.artifacts)
        debug_print(f"Wrote {manifest}")
        return result.status
    except NmdsError as ex:
        _print_error(ex)
        return 1
    except OSError as ex:
        _print_error(ex)
        return 1


def main() -> int:
    return run(sys.argv[1:])


__all__ = ["main", "run"]
