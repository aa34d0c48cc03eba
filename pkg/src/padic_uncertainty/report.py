"""Report emission (json / csv / text) and the shipped JSON schemas."""

from __future__ import annotations

import csv
import io
import json
from functools import lru_cache
from importlib import resources

import jsonschema
from referencing import Registry, Resource

from .campaign import CampaignReport

FORMATS = ("json", "csv", "text")
CSV_COLUMNS = ("check", "prime", "dim", "class", "passed", "failed", "tight", "degenerate")
SCHEMAS = ("config", "instance", "report")


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files(__package__).joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


@lru_cache(maxsize=None)
def _registry() -> Registry:
    return Registry().with_resources(
        (f"{name}.schema.json", Resource.from_contents(load_schema(name))) for name in SCHEMAS
    )


def validator(name: str) -> jsonschema.Draft202012Validator:
    return jsonschema.Draft202012Validator(load_schema(name), registry=_registry())


def validate(obj, name: str) -> None:
    """Raise ``jsonschema.ValidationError`` (best match) if ``obj`` is invalid."""
    error = jsonschema.exceptions.best_match(validator(name).iter_errors(obj))
    if error is not None:
        raise error


def error_path(error: jsonschema.ValidationError) -> str:
    parts = []
    for p in error.absolute_path:
        parts.append(f"[{p}]" if isinstance(p, int) else (f".{p}" if parts else str(p)))
    return "".join(parts) or "<root>"


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def render_text(report: CampaignReport) -> str:
    lines = []
    cfg = report.config
    lines.append(
        f"campaign seed={cfg.seed} primes={list(cfg.primes)} dims={list(cfg.dims)} "
        f"classes={list(cfg.operator_classes)} trials={cfg.trials_per_cell}"
        + (" MUTATED" if cfg.mutate else "")
    )
    lines.append(f"{'check':<22}{'passed':>9}{'failed':>9}{'tight':>9}{'degenerate':>12}")
    for check, s in report.totals().items():
        if s.passed + s.failed == 0:
            continue
        lines.append(f"{check:<22}{s.passed:>9}{s.failed:>9}{s.tight:>9}{s.degenerate:>12}")
    lines.append(f"total passed={report.passed} failed={report.failed}")
    for f in sorted(report.failures, key=lambda f: f["seed"])[:20]:
        lines.append(f"FAIL {f['check']} {f['seed']}")
    if len(report.failures) > 20:
        lines.append(f"... {len(report.failures) - 20} more failures in the json report")
    lines.append(f"wall_time={report.wall_time:.3f}s")
    return "\n".join(lines) + "\n"


def render_csv(report: CampaignReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for (check, p, d, cls), s in report.sorted_cells():
        writer.writerow((check, p, d, cls, s.passed, s.failed, s.tight, s.degenerate))
    return buf.getvalue()


def emit_report(report: CampaignReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return dumps(report.to_json()).encode()
    if fmt == "csv":
        return render_csv(report).encode()
    if fmt == "text":
        return render_text(report).encode()
    raise ValueError(f"unknown report format {fmt!r}; expected one of {FORMATS}")
