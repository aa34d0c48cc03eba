"""Command-line front-end.

Exit codes: 0 success, 1 usage or input error, 2 mathematical violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path
from typing import Sequence

import jsonschema

from . import __version__
from .campaign import CampaignConfig, Instance, evaluate_instance, recheck_failure, run_campaign
from .exact_field import format_rational
from .report import FORMATS, dumps, emit_report, error_path, validate
from .space import inner
from .uncertainty import IDENTITIES, HypothesisError, Verdict, delta, require_normalized

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2

IDENTITY_CHECKS = tuple(c.value for c in IDENTITIES)


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _str_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _add_campaign_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, help="JSON campaign config; flags override it")
    sub.add_argument("--primes", type=_int_list)
    sub.add_argument("--dims", type=_int_list)
    sub.add_argument("--trials", type=int, dest="trials_per_cell")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--size-bound", type=int, dest="size_bound")
    sub.add_argument("--classes", type=_str_list, dest="operator_classes")
    sub.add_argument("--witnesses", type=int, dest="witnesses_per_instance")
    sub.add_argument("--format", choices=FORMATS, default="json")
    sub.add_argument("--out", type=Path, help="output file (default: stdout)")
    sub.add_argument("--mutate", action="store_true", help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="padic-uncertainty",
        description="Exact verification of p-adic uncertainty inequalities.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    verify = subs.add_parser("verify", help="run a randomized verification campaign")
    _add_campaign_flags(verify)

    identity = subs.add_parser("identity", help="run only the identity and note checks")
    _add_campaign_flags(identity)

    ev = subs.add_parser("eval", help="evaluate every applicable check on one instance")
    ev.add_argument("instance", type=Path)
    ev.add_argument("--format", choices=("text", "json"), default="text")
    ev.add_argument("--out", type=Path)

    selftest = subs.add_parser("selftest", help="check that the harness detects violations")
    selftest.add_argument("--seed", type=int, default=0)
    selftest.add_argument("--trials", type=int, default=5)
    return parser


def _read_json(path: Path) -> object:
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise UsageError(f"file not found: {path}")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON: {exc}")


def load_config(args: argparse.Namespace, checks: Sequence[str] | None = None) -> CampaignConfig:
    values: dict = {}
    if args.config is not None:
        raw = _read_json(args.config)
        try:
            validate(raw, "config")
        except jsonschema.ValidationError as exc:
            raise UsageError(f"config error at '{error_path(exc)}': {exc.message}")
        values.update(raw)
    for f in fields(CampaignConfig):
        override = getattr(args, f.name, None)
        if override is not None:
            values[f.name] = override
    if args.mutate:
        values["mutate"] = True
    if checks is not None:
        values["checks"] = list(checks)
    for key in ("primes", "dims", "operator_classes", "checks"):
        if values.get(key) is not None:
            values[key] = tuple(values[key])
    try:
        return CampaignConfig(**values)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"config error: {exc}")


def _write(data: bytes, out: Path | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    try:
        out.write_bytes(data)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}")


def cmd_verify(args: argparse.Namespace, checks: Sequence[str] | None = None) -> int:
    config = load_config(args, checks)
    report = run_campaign(config)
    _write(emit_report(report, args.format), args.out)
    return EXIT_OK if report.failed == 0 else EXIT_VIOLATION


def cmd_identity(args: argparse.Namespace) -> int:
    return cmd_verify(args, IDENTITY_CHECKS)


def _verdict_line(v: Verdict, p: int, label: str | None = None) -> str:
    status = "holds" if v.holds else "VIOLATED"
    flags = [f for f, on in (("tight", v.tight), ("degenerate", v.degenerate)) if on]
    name = label or v.check.value
    tail = f" [{', '.join(flags)}]" if flags else ""
    return f"{name:<24}{status:<10}lhs={v.lhs.describe(p)}  rhs={v.rhs.describe(p)}{tail}"


def _show_vector(x) -> str:
    if x.dim == "c0":
        body = ", ".join(f"{i}: {format_rational(v)}" for i, v in x.coords)
        return f"c0 {{{body}}}"
    return "(" + ", ".join(format_rational(v) for v in x.dense()) + ")"


def evaluate_file(path: Path) -> tuple[dict, list[str], bool]:
    """Load and evaluate one instance file.

    Returns the JSON document, the text lines and whether every verdict holds.
    Raises :class:`UsageError` for malformed input and unmet hypotheses.
    """
    raw = _read_json(path)
    try:
        validate(raw, "instance")
    except jsonschema.ValidationError as exc:
        raise UsageError(f"instance error at '{error_path(exc)}': {exc.message}")
    try:
        inst = Instance.from_json(raw)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"instance error: {exc}")
    requested = raw.get("checks")
    p = inst.p
    try:
        require_normalized(inst.x)
        dA, dB = delta(inst.A, inst.x), delta(inst.B, inst.x)
        results = evaluate_instance(inst, checks=requested, strict=True)
    except HypothesisError as exc:
        raise UsageError(str(exc))

    lines = [
        f"p = {p}",
        f"x = {_show_vector(inst.x)}",
        f"<x,x> = {format_rational(inner(inst.x, inst.x))}",
        f"Delta_x(A) = {dA.describe(p)}  (twice exponent {dA.twice})",
        f"Delta_x(B) = {dB.describe(p)}  (twice exponent {dB.twice})",
    ]
    for v, j in results:
        label = f"{v.check.value}[y{j}]" if j is not None else None
        lines.append(_verdict_line(v, p, label))
    ok = all(v.holds for v, _ in results)
    lines.append("all checks hold" if ok else "VIOLATION DETECTED")
    doc = {
        "p": p,
        "delta_A": dA.to_json(),
        "delta_B": dB.to_json(),
        "verdicts": [
            {**v.to_json(), "witness_index": j} for v, j in results
        ],
        "holds": ok,
    }
    return doc, lines, ok


def cmd_eval(args: argparse.Namespace) -> int:
    doc, lines, ok = evaluate_file(args.instance)
    data = dumps(doc) if args.format == "json" else "\n".join(lines) + "\n"
    _write(data.encode(), args.out)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_selftest(args: argparse.Namespace) -> int:
    """Mutated campaigns must fail, and every captured failure must reproduce."""
    config = CampaignConfig(primes=(2, 3), dims=(2, 3), trials_per_cell=args.trials,
                            seed=args.seed, mutate=True)
    report = run_campaign(config)
    reproduced = sum(not recheck_failure(f).holds for f in report.failures)
    detected = report.failed > 0
    print(f"mutated campaign: failed={report.failed} reproduced={reproduced}")
    ok = detected and reproduced == len(report.failures)
    print("selftest ok" if ok else "selftest FAILED: harness did not surface violations")
    return EXIT_OK if ok else EXIT_VIOLATION


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    handlers = {
        "verify": cmd_verify,
        "identity": cmd_identity,
        "eval": cmd_eval,
        "selftest": cmd_selftest,
    }
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
