"""Command-line front end.

Exit codes: 0 = pass, 1 = usage or parse errors, 2 = a checked property
was violated. All output is deterministic for a fixed seed and inputs;
information quantities appear in both nats and bits, and non-finite
values are rendered as the literal strings "inf"/"-inf".
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

from . import bitops, dsl, engine, sweeps
from .errors import ThermobitError
from .markov import evolve, second_law_audit
from .thermo import SI_BOLTZMANN, check_szilard_landauer

DEFAULT_SEED = sweeps.DEFAULT_SEED  # 0xC0FFEE
SEED_ENV_VAR = "THERMOBIT_SEED"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2


@dataclass(frozen=True)
class RunConfig:
    """Resolved per-invocation options shared by the subcommands."""

    output_format: str = "table"
    tolerance: float = 1e-12
    seed: int = DEFAULT_SEED
    units: str = "natural"

    @property
    def boltzmann_default(self) -> float:
        return SI_BOLTZMANN if self.units == "si" else 1.0


def _run_config(args, *, resolve_seed: bool = False) -> RunConfig:
    return RunConfig(
        output_format=getattr(args, "format", "table"),
        tolerance=getattr(args, "tolerance", 1e-12),
        seed=_resolve_seed(getattr(args, "seed", None)) if resolve_seed else DEFAULT_SEED,
        units=getattr(args, "units", "natural"),
    )


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the CLI contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _resolve_seed(flag_value: int | None) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get(SEED_ENV_VAR)
    if env:
        try:
            return int(env, 0)
        except ValueError:
            raise ThermobitError(
                f"{SEED_ENV_VAR} must be an integer, got {env!r}"
            ) from None
    return DEFAULT_SEED


def _jsonify(value):
    """Make a structure JSON-safe: non-finite floats become strings."""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    return value


def _dump_json(payload: dict) -> str:
    return json.dumps(_jsonify(payload), indent=2) + "\n"


def _fmt_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _print_pairs(pairs: list[tuple[str, object]]) -> str:
    width = max(len(k) for k, _ in pairs)
    return "\n".join(f"{k.ljust(width)}  {_fmt_value(v)}" for k, v in pairs) + "\n"


def _csv_line(cells) -> str:
    return ",".join(_fmt_value(c) for c in cells)


def _load_document(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            source = handle.read()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None
    result = dsl.parse(source)
    for diagnostic in result.diagnostics:
        print(diagnostic.render(), file=sys.stderr)
    if not result.ok:
        return None
    return result.document


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def _cmd_check(args) -> int:
    cfg = _run_config(args)
    doc = _load_document(args.file)
    if doc is None:
        return EXIT_USAGE
    decl = doc.dists.get(args.dist)
    if decl is None:
        print(f"error: no dist named {args.dist!r} in {args.file}", file=sys.stderr)
        return EXIT_USAGE
    landscape = doc.systems[decl.system].to_landscape()
    report = check_szilard_landauer(landscape, decl.dist)
    passed = report.passes(cfg.tolerance)
    if cfg.output_format == "json":
        payload = report.to_json_dict()
        payload["tolerance"] = cfg.tolerance
        payload["passed"] = passed
        sys.stdout.write(_dump_json(payload))
    elif cfg.output_format == "csv":
        header = [
            "partition_value", "log_partition", "average_energy", "free_energy_p",
            "free_energy_gibbs", "available", "kl_nats", "kl_bits", "residual",
            "scale", "passed",
        ]
        row = [
            report.partition_value, report.log_partition, report.average_energy,
            report.free_energy_p, report.free_energy_gibbs, report.available,
            report.kl_nats.nats, report.kl_nats.bits, report.residual,
            report.scale, passed,
        ]
        sys.stdout.write(_csv_line(header) + "\n" + _csv_line(row) + "\n")
    else:
        sys.stdout.write(_print_pairs([
            ("partition Z", report.partition_value),
            ("log Z", report.log_partition),
            ("gibbs", list(map(float, report.gibbs.probs))),
            ("average energy", report.average_energy),
            ("F(p)", report.free_energy_p),
            ("F(gibbs)", report.free_energy_gibbs),
            ("available", report.available),
            ("D(p||gibbs) nats", report.kl_nats.nats),
            ("D(p||gibbs) bits", report.kl_nats.bits),
            ("residual", report.residual),
            ("tolerance", cfg.tolerance * report.scale),
            ("passed", passed),
        ]))
    return EXIT_OK if passed else EXIT_VIOLATION


def _cmd_audit(args) -> int:
    cfg = _run_config(args)
    doc = _load_document(args.file)
    if doc is None:
        return EXIT_USAGE
    channel_decl = doc.channels.get(args.channel)
    if channel_decl is None:
        print(f"error: no channel named {args.channel!r} in {args.file}", file=sys.stderr)
        return EXIT_USAGE
    p0_decl = doc.dists.get(args.p0)
    if p0_decl is None:
        print(f"error: no dist named {args.p0!r} in {args.file}", file=sys.stderr)
        return EXIT_USAGE
    reference = None
    if args.reference is not None:
        ref_decl = doc.dists.get(args.reference)
        if ref_decl is None:
            print(f"error: no dist named {args.reference!r} in {args.file}", file=sys.stderr)
            return EXIT_USAGE
        reference = ref_decl.dist
    try:
        verdict = second_law_audit(p0_decl.dist, channel_decl.channel, args.steps,
                                   reference=reference)
    except ThermobitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.trajectory_csv and verdict.stationary_found:
        trajectory = evolve(
            p0_decl.dist, channel_decl.channel, args.steps,
            verdict.stationary if reference is None else reference,
        )
        with open(args.trajectory_csv, "w", encoding="utf-8") as handle:
            handle.write(trajectory.to_csv())
    if cfg.output_format == "json":
        payload = verdict.to_json_dict()
        sys.stdout.write(_dump_json(payload))
    else:
        sys.stdout.write(_print_pairs([
            ("stationary found", verdict.stationary_found),
            ("stationary", None if verdict.stationary is None
             else list(map(float, verdict.stationary.probs))),
            ("detailed balance", verdict.detailed_balance),
            ("monotone", verdict.monotone),
            ("max violation", verdict.max_violation),
            ("steps checked", verdict.steps_checked),
        ]))
    return EXIT_OK if verdict.monotone else EXIT_VIOLATION


_BIT_BY_FLAG = {
    "0": bitops.BitState.zero,
    "1": bitops.BitState.one,
    "star": bitops.BitState.star,
}

# default inputs: each op's nominal type
_NOMINAL_BIT = {
    "erase": bitops.BitState.star,
    "not": bitops.BitState.star,
    "randomize": bitops.BitState.zero,
}


def _bit_input(op: str, flag: str | None) -> bitops.BitState:
    if flag is not None:
        return _BIT_BY_FLAG[flag]()
    return _NOMINAL_BIT[op]()


def _cmd_bitop(args) -> int:
    cfg = _run_config(args)
    boltzmann = args.kB if args.kB is not None else cfg.boltzmann_default
    kwargs = {"temperature": args.temperature, "boltzmann": boltzmann, "mode": args.mode}
    try:
        if args.op == "erase":
            _, ledger = bitops.erase(_bit_input(args.op, args.input), **kwargs)
        elif args.op == "not":
            _, ledger = bitops.not_op(_bit_input(args.op, args.input), **kwargs)
        elif args.op == "randomize":
            _, ledger = bitops.randomize(_bit_input(args.op, args.input), **kwargs)
        elif args.op == "switch":
            if args.input is not None:
                state = _BIT_BY_FLAG[args.input]()
            else:
                state = bitops.BitState.zero() if args.from_value == 0 else bitops.BitState.one()
            _, ledger = bitops.switch(state, args.from_value, args.to_value, **kwargs)
        elif args.op == "copy-szilard":
            pair = bitops.BitPairState.independent_uniform()
            _, ledger = bitops.copy_szilard(pair, **kwargs)
        else:  # copy-landauer
            pair = bitops.BitPairState.from_bits(bitops.BitState.star(), bitops.BitState.zero())
            _, ledger = bitops.copy_landauer(pair, **kwargs)
    except ThermobitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(_dump_json(ledger.to_json_dict()))
    return EXIT_OK


def _cmd_szilard(args) -> int:
    run_cfg = _run_config(args)
    boltzmann = args.kB if args.kB is not None else run_cfg.boltzmann_default
    try:
        cfg = engine.EngineConfig(temperature=args.temperature, boltzmann=boltzmann,
                                  steps=args.steps)
        rows = engine.convergence_table(cfg, args.ratio, levels=args.levels)
        exact = engine.exact_isothermal_work(cfg, cfg.volume, cfg.volume / args.ratio)
    except ThermobitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if run_cfg.output_format == "json":
        payload = {
            "ratio": args.ratio,
            "exact_work": exact,
            "rows": [{"steps": n, "work": w, "abs_error": e} for n, w, e in rows],
        }
        sys.stdout.write(_dump_json(payload))
    elif run_cfg.output_format == "csv":
        sys.stdout.write(_csv_line(["N", "work", "abs_error"]) + "\n")
        for n, work, err in rows:
            sys.stdout.write(_csv_line([n, work, err]) + "\n")
    else:
        sys.stdout.write(f"exact work kT*log({_fmt_value(args.ratio)}): {exact!r}\n")
        sys.stdout.write(f"{'N':>10}  {'work':<24}{'abs_error'}\n")
        for n, work, err in rows:
            sys.stdout.write(f"{n:>10}  {work!r:<24}{err!r}\n")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    try:
        cfg = _run_config(args, resolve_seed=True)
    except ThermobitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    seed = cfg.seed
    identity = sweeps.identity_sweep(args.instances, args.max_states, seed)
    dpi = sweeps.dpi_sweep(args.instances, min(args.max_states, 8), seed)
    monotone = sweeps.monotonicity_sweep(
        args.instances, min(args.max_states, 32), args.steps, seed,
        inject_violation=args.inject_violation,
    )
    all_passed = identity.all_passed and dpi.all_passed and monotone.all_passed
    if cfg.output_format == "json":
        payload = {
            "seed": seed,
            "identity": identity.to_json_dict(),
            "data_processing": dpi.to_json_dict(),
            "second_law": monotone.to_json_dict(),
            "all_passed": all_passed,
        }
        sys.stdout.write(_dump_json(payload))
    else:
        sys.stdout.write(_print_pairs([
            ("seed", seed),
            ("identity instances", identity.instances),
            ("identity failures", identity.identity_failures),
            ("identity worst residual/scale", identity.identity_worst),
            ("proof-step failures", identity.proof_failures),
            ("proof-step worst residual/scale", identity.proof_worst),
            ("optimality failures", identity.optimality_failures),
            ("min available", identity.min_available),
            ("DPI instances", dpi.instances),
            ("DPI failures", dpi.failures),
            ("DPI worst excess", dpi.worst_excess),
            ("second-law instances", monotone.instances),
            ("second-law failures", monotone.failures),
            ("second-law worst violation", monotone.worst_violation),
            ("non-detailed-balance chains", monotone.non_detailed_balance),
            ("all passed", all_passed),
        ]))
    return EXIT_OK if all_passed else EXIT_VIOLATION


def _cmd_fmt(args) -> int:
    doc = _load_document(args.file)
    if doc is None:
        return EXIT_USAGE
    sys.stdout.write(dsl.format_document(doc))
    return EXIT_OK


# --------------------------------------------------------------------------
# argument wiring
# --------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="thermobit",
        description="Information-thermodynamics checks over finite state spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="verify the free-energy/information identity",
                           parents=[], add_help=True)
    check.add_argument("file", help="protocol file (.tbit)")
    check.add_argument("--dist", required=True, help="name of the dist to check")
    check.add_argument("--tolerance", type=float, default=1e-12,
                       help="residual tolerance per unit scale (default 1e-12)")
    check.add_argument("--format", choices=dsl.REPORT_FORMATS, default="table")

    audit = sub.add_parser("audit", help="Second-Law audit of a channel")
    audit.add_argument("file", help="protocol file (.tbit)")
    audit.add_argument("--channel", required=True)
    audit.add_argument("--p0", required=True, help="name of the starting dist")
    audit.add_argument("--steps", type=int, default=100)
    audit.add_argument("--reference",
                       help="audit against this dist instead of the stationary one")
    audit.add_argument("--trajectory-csv", help="write the trajectory to this CSV file")
    audit.add_argument("--format", choices=("table", "json"), default="table")

    bitop = sub.add_parser("bitop", help="run one bit operation and print its ledger")
    bitop.add_argument("op", choices=dsl.BITOP_NAMES)
    bitop.add_argument("--mode", choices=("strict", "lenient"), default="strict")
    bitop.add_argument("--temperature", type=float, default=1.0)
    bitop.add_argument("--kB", type=float, default=None,
                       help="Boltzmann constant (default per --units)")
    bitop.add_argument("--units", choices=("natural", "si"), default="natural")
    bitop.add_argument("--input", choices=("0", "1", "star"), default=None,
                       help="input bit for single-bit ops (default: the op's nominal type)")
    bitop.add_argument("--from", dest="from_value", type=int, choices=(0, 1), default=0)
    bitop.add_argument("--to", dest="to_value", type=int, choices=(0, 1), default=1)

    szilard = sub.add_parser("szilard", help="isothermal work table for compression by a ratio")
    szilard.add_argument("--ratio", type=float, default=2.0)
    szilard.add_argument("--steps", type=int, default=engine.EngineConfig().steps)
    szilard.add_argument("--temperature", type=float, default=1.0)
    szilard.add_argument("--kB", type=float, default=None)
    szilard.add_argument("--units", choices=("natural", "si"), default="natural")
    szilard.add_argument("--levels", type=int, default=6,
                         help="number of N-halving rows in the table")
    szilard.add_argument("--format", choices=dsl.REPORT_FORMATS, default="table")

    sweep = sub.add_parser("sweep", help="randomized property sweeps")
    sweep.add_argument("--instances", type=int, default=1000)
    sweep.add_argument("--max-states", type=int, default=64)
    sweep.add_argument("--steps", type=int, default=100,
                       help="audit steps per second-law instance")
    sweep.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                       help=f"sweep seed (default {SEED_ENV_VAR} or 0xC0FFEE)")
    sweep.add_argument("--format", choices=("table", "json"), default="table")
    sweep.add_argument("--inject-violation", action="store_true",
                       help=argparse.SUPPRESS)  # test hook: force a caught failure

    fmt = sub.add_parser("fmt", help="canonically format a protocol file")
    fmt.add_argument("file")

    return parser


_HANDLERS = {
    "check": _cmd_check,
    "audit": _cmd_audit,
    "bitop": _cmd_bitop,
    "szilard": _cmd_szilard,
    "sweep": _cmd_sweep,
    "fmt": _cmd_fmt,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    return _HANDLERS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
