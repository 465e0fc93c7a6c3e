"""Command-line front end emitting reproducible CSV/JSON data.

Subcommands: ``pattern`` (head Bloch scatter), ``distance`` (paired-run
distance trace), ``stability`` (orbit stability report), ``oracle-check``
(simulation vs closed forms), ``lyapunov`` (divergence-rate fit).

``--alpha1`` accepts either a bare float (always treated as inexact) or a
``p/q`` pair meaning (p/q)*pi exactly; periodicity claims are only
meaningful with the exact form.  Outputs are deterministic: floats are
written with 17 significant digits, every output file gets a sibling
``<name>.manifest.json`` recording the resolved configuration and the
output checksum, and there is no randomness anywhere in the pipeline.

Exit codes: 0 success, 1 check failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import re
import sys
from pathlib import Path

from . import __version__, analysis, engine, oracle
from .analysis import ExperimentConfig, Subsystem
from .engine import TapeState
from .schedule import LOG_GOLDEN_RATIO, AngleSequence, ScheduleConfig, ScheduleMode

_EXACT_RE = re.compile(r"^\s*([+-]?\d+)\s*/\s*(\d+)\s*$")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def parse_alpha1(spec: str, mode: ScheduleMode, delta: float) -> ScheduleConfig:
    """Build a schedule config from an alpha1 spec: float or exact 'p/q' of pi."""
    match = _EXACT_RE.match(spec)
    if match:
        p, q = int(match.group(1)), int(match.group(2))
        if q == 0:
            raise ValueError(f"zero denominator in alpha1 spec {spec!r}")
        return ScheduleConfig.exact_pi(p, q, mode=mode, delta=delta)
    try:
        value = float(spec)
    except ValueError:
        raise ValueError(f"malformed alpha1 spec {spec!r}: expected float or p/q") from None
    return ScheduleConfig(mode=mode, alpha1=value, delta=delta)


def _config_json(cfg: ScheduleConfig) -> dict:
    return {
        "mode": cfg.mode.value,
        "alpha1": cfg.alpha1,
        "delta": cfg.delta,
        "exact": list(cfg.exact) if cfg.exact else None,
    }


def _write_output(path: Path, payload: str, command: str, config: dict) -> None:
    data = payload.encode("utf-8")
    path.write_bytes(data)
    manifest = {
        "command": command,
        "config": config,
        "version": __version__,
        "output": path.name,
        "sha256": hashlib.sha256(data).hexdigest(),
    }
    manifest_path = path.with_name(path.name + ".manifest.json")
    manifest_path.write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _emit_report(report: dict, out: str | None, command: str, config: dict) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out:
        _write_output(Path(out), text, command, config)
    else:
        sys.stdout.write(text)


def cmd_pattern(args: argparse.Namespace) -> int:
    schedule = parse_alpha1(args.alpha1, ScheduleMode(args.mode), 0.0)
    seq = AngleSequence(schedule)
    initial = engine.init_state(args.head_angle, TapeState(args.tape))
    records = analysis.trajectory_bloch(seq, initial, args.steps, args.record_every)
    lines = ["n,s1,s2,s3,purity"]
    for rec in records:
        h = rec.head
        lines.append(
            f"{rec.step},{_fmt(h.s1)},{_fmt(h.s2)},{_fmt(h.s3)},{_fmt(h.length_sq())}"
        )
    config = {
        "schedule": _config_json(schedule),
        "steps": args.steps,
        "head_angle": args.head_angle,
        "tape": args.tape,
        "record_every": args.record_every,
    }
    _write_output(Path(args.out), "\n".join(lines) + "\n", "pattern", config)
    return 0


def cmd_distance(args: argparse.Namespace) -> int:
    schedule = parse_alpha1(args.alpha1, ScheduleMode(args.mode), args.delta)
    cfg = ExperimentConfig(
        schedule=schedule,
        delta=args.delta,
        steps=args.steps,
        subsystem=Subsystem(args.subsystem),
        record_every=args.record_every,
    )
    trace = analysis.distance_trace(cfg)
    lines = ["n,d2,overlap"]
    for n, d2, ov in zip(trace.steps, trace.d2, trace.overlap):
        lines.append(f"{n},{_fmt(d2)},{_fmt(ov)}")
    config = {
        "schedule": _config_json(schedule),
        "delta": args.delta,
        "steps": args.steps,
        "subsystem": args.subsystem,
        "record_every": args.record_every,
    }
    _write_output(Path(args.out), "\n".join(lines) + "\n", "distance", config)
    return 0


def cmd_stability(args: argparse.Namespace) -> int:
    schedule = parse_alpha1(args.alpha1, ScheduleMode.FIBONACCI, 0.0)
    config = {
        "schedule": _config_json(schedule),
        "m": args.m,
        "deltas": args.deltas,
    }
    if schedule.exact is None:
        raise ValueError("stability requires alpha1 as an exact p/q of pi")
    p, q = schedule.exact
    if not all(oracle.orbit_conditions(p, q, args.m)):
        report = {
            "error": "not a periodic orbit",
            "alpha1": {"p": p, "q": q},
            "m": args.m,
            "conditions": list(oracle.orbit_conditions(p, q, args.m)),
        }
        _emit_report(report, args.out, "stability", config)
        return 2

    seq = AngleSequence(schedule)
    tape_defined = args.m % 2 == 0 and oracle.sin_alpha1(schedule) != 0.0
    limits = oracle.stability_limits(args.m, seq if tape_defined else None)
    results = []
    for delta in args.deltas:
        res = analysis.stability_matrix_numeric(args.m, delta, schedule)
        row = {
            "delta": delta,
            "m11": res.m11,
            "m22": res.m22,
            "m11_closed": res.m11_closed,
            "m22_closed": res.m22_closed,
            "m11_rel_err": abs(res.m11 - limits.m11) / limits.m11 if limits.m11 else None,
            "m22_abs_err": abs(res.m22 - limits.m22),
        }
        if limits.tape is not None:
            tape = analysis.tape_stability_numeric(args.m, delta, schedule)
            row["tape"] = tape
            row["tape_rel_err"] = abs(tape - limits.tape) / abs(limits.tape)
        results.append(row)
    report = {
        "alpha1": {"p": p, "q": q},
        "m": args.m,
        "period": 2 * args.m,
        "limits": {"m11": limits.m11, "m22": limits.m22, "tape": limits.tape},
        "results": results,
    }
    _emit_report(report, args.out, "stability", config)
    return 0


def cmd_oracle_check(args: argparse.Namespace) -> int:
    schedule = parse_alpha1(args.alpha1, ScheduleMode.FIBONACCI, args.delta)
    seq = AngleSequence(schedule)
    weights = oracle.SuperpositionWeights(
        1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)
    )
    state = engine.init_state(args.delta)
    max_dev = 0.0
    first_fail = None
    for n, st in engine.iterate(seq, state, args.steps):
        head = engine.bloch_vector(engine.reduce_spin(st, engine.Spin.HEAD))
        tape = engine.bloch_vector(engine.reduce_spin(st, engine.Spin.TAPE))
        pred_head = oracle.head_bloch_superposed(seq, weights, n)
        pred_t3 = oracle.tape_sigma3(seq, n)
        dev = max(
            abs(head.s1 - pred_head.s1),
            abs(head.s2 - pred_head.s2),
            abs(head.s3 - pred_head.s3),
            abs(tape.s1),
            abs(tape.s2),
            abs(tape.s3 - pred_t3),
        )
        if dev > args.tolerance and first_fail is None:
            first_fail = n
        max_dev = max(max_dev, dev)
    passed = first_fail is None
    report = {
        "steps": args.steps,
        "delta": args.delta,
        "tolerance": args.tolerance,
        "max_deviation": max_dev,
        "first_failing_step": first_fail,
        "pass": passed,
    }
    config = {
        "schedule": _config_json(schedule),
        "steps": args.steps,
        "tolerance": args.tolerance,
    }
    _emit_report(report, args.out, "oracle-check", config)
    return 0 if passed else 1


def cmd_lyapunov(args: argparse.Namespace) -> int:
    schedule = parse_alpha1(args.alpha1, ScheduleMode(args.mode), args.delta)
    cfg = ExperimentConfig(
        schedule=schedule,
        delta=args.delta,
        steps=args.steps,
        subsystem=Subsystem(args.subsystem),
    )
    trace = analysis.distance_trace(cfg)
    rate = analysis.lyapunov_estimate(trace, (args.fit_lo, args.fit_hi))
    report = {
        "rate_per_cycle": rate,
        "fit_window_cycles": [args.fit_lo, args.fit_hi],
        "reference_rate": LOG_GOLDEN_RATIO,
        "mode": args.mode,
        "delta": args.delta,
    }
    config = {
        "schedule": _config_json(schedule),
        "delta": args.delta,
        "steps": args.steps,
        "subsystem": args.subsystem,
        "fit_window": [args.fit_lo, args.fit_hi],
    }
    _emit_report(report, args.out, "lyapunov", config)
    return 0


def _parse_deltas(text: str) -> list[float]:
    vals = [float(tok) for tok in text.split(",") if tok.strip()]
    if not vals:
        raise argparse.ArgumentTypeError("empty delta list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qturing",
        description="Deterministic two-spin quantum Turing network toolkit.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(
        sp: argparse.ArgumentParser, *, delta_default: float, out_required: bool = False
    ) -> None:
        sp.add_argument("--alpha1", required=True,
                        help="first rotation angle: float, or p/q meaning (p/q)*pi exactly")
        sp.add_argument("--delta", type=float, default=delta_default,
                        help="seed/preparation perturbation (default %(default)s)")
        sp.add_argument("--steps", type=int, default=200,
                        help="number of gates to apply (default %(default)s)")
        sp.add_argument("--out", required=out_required,
                        help="output path" + ("" if out_required else " (default: report to stdout)"))

    sp = sub.add_parser("pattern", help="head Bloch scatter of a single trajectory")
    sp.add_argument("--alpha1", required=True)
    sp.add_argument("--steps", type=int, default=10000)
    sp.add_argument("--mode", choices=[m.value for m in ScheduleMode],
                    default=ScheduleMode.FIBONACCI.value)
    sp.add_argument("--head-angle", type=float, default=0.0)
    sp.add_argument("--tape", choices=[t.value for t in TapeState],
                    default=TapeState.MINUS_ONE.value)
    sp.add_argument("--record-every", type=int, default=1)
    sp.add_argument("--out", required=True, help="output CSV path")
    sp.set_defaults(func=cmd_pattern)

    sp = sub.add_parser("distance", help="distance trace between paired trajectories")
    add_common(sp, delta_default=0.001, out_required=True)
    sp.add_argument("--mode", choices=[m.value for m in ScheduleMode],
                    default=ScheduleMode.FIBONACCI.value)
    sp.add_argument("--subsystem", choices=[s.value for s in Subsystem],
                    default=Subsystem.HEAD.value)
    sp.add_argument("--record-every", type=int, default=1)
    sp.set_defaults(func=cmd_distance)

    sp = sub.add_parser("stability", help="periodic-orbit stability report")
    sp.add_argument("--alpha1", required=True, help="exact p/q of pi")
    sp.add_argument("--m", type=int, required=True, help="cycle count; period is 2m")
    sp.add_argument("--deltas", type=_parse_deltas, default=[1e-4, 1e-5, 1e-6],
                    help="comma-separated perturbations (default 1e-4,1e-5,1e-6)")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("oracle-check", help="simulation vs closed-form comparison")
    add_common(sp, delta_default=0.0)
    sp.set_defaults(steps=2000)
    sp.add_argument("--tolerance", type=float, default=1e-9)
    sp.set_defaults(func=cmd_oracle_check)

    sp = sub.add_parser("lyapunov", help="divergence-rate fit")
    add_common(sp, delta_default=1e-8)
    sp.add_argument("--mode", choices=[m.value for m in ScheduleMode],
                    default=ScheduleMode.FIBONACCI.value)
    sp.add_argument("--subsystem", choices=[s.value for s in Subsystem],
                    default=Subsystem.HEAD.value)
    sp.add_argument("--fit-lo", type=int, default=5, help="first fit cycle")
    sp.add_argument("--fit-hi", type=int, default=15, help="last fit cycle")
    sp.set_defaults(func=cmd_lyapunov)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "steps", 1) < 1:
        parser.error("--steps must be >= 1")
    if getattr(args, "steps", 0) > 10**6:
        parser.error("--steps must be <= 1e6")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
