"""Deterministic randomized verification campaigns.

Every trial draws its own ``random.Random`` seeded from a SHA-256 digest of
``(seed, p, dim, class, trial, attempt)``, so an instance depends only on its
coordinates and never on evaluation order.  Cells may run in worker
processes; reports are merged in sorted cell order.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import os
import random
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

from .exact_field import Prime, Rational
from .operators import (
    DenseOperator,
    DiagonalOperator,
    EntryRule,
    POperator,
    is_selfadjoint,
    operator_from_json,
)
from .space import C0, PVector, orthogonal_witness, random_rational, sample_normalized
from .uncertainty import (
    NEEDS_SELFADJOINT,
    CheckId,
    Verdict,
    check_hrs_i,
    check_hrs_ii,
    check_hrs_ii_product,
    check_hrs_iii,
    check_hrs_iv,
    check_hrs_v,
    check_hrs_vi,
    check_identity_ii,
    check_mp,
    check_notes,
)

OPERATOR_CLASSES = ("symmetric", "general", "c0_diagonal")
MIN_DIM, MAX_DIM = 2, 16
THREADS_ENV = "PADIC_UNCERTAINTY_THREADS"
MAX_ATTEMPTS = 64


@dataclass(frozen=True)
class CampaignConfig:
    primes: tuple[int, ...] = (2, 3, 5, 7)
    dims: tuple[int, ...] = (2, 3, 4)
    trials_per_cell: int = 20
    size_bound: int = 8
    operator_classes: tuple[str, ...] = OPERATOR_CLASSES
    witnesses_per_instance: int = 3
    seed: int = 0
    checks: tuple[str, ...] | None = None
    mutate: bool = False

    def __post_init__(self):
        try:
            object.__setattr__(self, "primes", tuple(int(Prime(p)) for p in self.primes))
        except (TypeError, ValueError) as exc:
            raise ValueError(f"primes: {exc}") from None
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "operator_classes", tuple(self.operator_classes))
        if not self.primes:
            raise ValueError("primes: at least one prime is required")
        if not self.dims:
            raise ValueError("dims: at least one dimension is required")
        for d in self.dims:
            if isinstance(d, bool) or not isinstance(d, int) or not MIN_DIM <= d <= MAX_DIM:
                raise ValueError(f"dims: {d!r} outside the supported range {MIN_DIM}..{MAX_DIM}")
        if isinstance(self.trials_per_cell, bool) or not isinstance(self.trials_per_cell, int) \
                or self.trials_per_cell < 1:
            raise ValueError("trials_per_cell: must be a positive integer")
        if not isinstance(self.size_bound, int) or self.size_bound < 1:
            raise ValueError("size_bound: must be a positive integer")
        if not isinstance(self.witnesses_per_instance, int) or self.witnesses_per_instance < 1:
            raise ValueError("witnesses_per_instance: must be a positive integer")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError("seed: must be an integer in [0, 2**64)")
        bad = [c for c in self.operator_classes if c not in OPERATOR_CLASSES]
        if bad or not self.operator_classes:
            raise ValueError(f"operator_classes: unknown or empty {bad}")
        if self.checks is not None:
            checks = tuple(CheckId(c).value for c in self.checks)
            object.__setattr__(self, "checks", checks)

    def cells(self) -> list[tuple[int, int, str]]:
        return [(p, d, c) for p in self.primes for d in self.dims for c in self.operator_classes]

    def wants(self, check: CheckId) -> bool:
        return self.checks is None or check.value in self.checks

    def to_json(self) -> dict:
        out = asdict(self)
        for k in ("primes", "dims", "operator_classes"):
            out[k] = list(out[k])
        if out["checks"] is not None:
            out["checks"] = list(out["checks"])
        return out


@dataclass(frozen=True)
class Instance:
    p: int
    A: POperator
    B: POperator
    x: PVector
    witnesses: tuple[PVector, ...] = ()
    seed: str = ""

    def to_json(self) -> dict:
        return {
            "p": int(self.p),
            "seed": self.seed,
            "A": self.A.to_json(),
            "B": self.B.to_json(),
            "x": self.x.to_json(),
            "y": [y.to_json() for y in self.witnesses],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "Instance":
        p = int(obj["p"])
        A = operator_from_json({"p": p, **obj["A"]})
        B = operator_from_json({"p": p, **obj["B"]})
        x = PVector.from_json({"p": p, **obj["x"]})
        ys = tuple(PVector.from_json({"p": p, **y}) for y in obj.get("y", []))
        return cls(p, A, B, x, ys, obj.get("seed", ""))


def seed_descriptor(seed: int, cell: tuple[int, int, str], trial: int, attempt: int = 0) -> str:
    p, d, cls = cell
    return f"seed={seed};p={p};dim={d};class={cls};trial={trial};attempt={attempt}"


def trial_rng(seed: int, cell: tuple[int, int, str], trial: int, attempt: int = 0) -> random.Random:
    digest = hashlib.sha256(seed_descriptor(seed, cell, trial, attempt).encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _random_matrix(p: int, d: int, rng: random.Random, bound: int, symmetric: bool) -> DenseOperator:
    rows = [[Rational(0)] * d for _ in range(d)]
    for i in range(d):
        for j in range(i if symmetric else 0, d):
            rows[i][j] = random_rational(rng, bound, p)
            if symmetric:
                rows[j][i] = rows[i][j]
    return DenseOperator.from_rows(p, rows)


def _nonzero_rational(rng: random.Random, bound: int, p: int) -> Rational:
    while True:
        q = random_rational(rng, bound, p)
        if q:
            return q


def _random_diagonal(p: int, support: Sequence[int], rng: random.Random, bound: int,
                     growth: Sequence[int]) -> DiagonalOperator:
    terms = {m: _nonzero_rational(rng, bound, p) for m in rng.sample(list(growth), 2)}
    # at least one term with |a_n| unbounded in n
    terms.setdefault(rng.choice((-1, -2)), _nonzero_rational(rng, bound, p))
    overrides = rng.sample(list(support), len(support) // 2)
    entries = {n: random_rational(rng, bound, p) for n in overrides}
    return DiagonalOperator(p, entries, EntryRule.from_mapping(terms))


def generate_instance(cell: tuple[int, int, str], trial_index: int, seed: int, *,
                      size_bound: int = 8, witnesses: int = 3, attempt: int = 0) -> Instance:
    """Deterministic in ``(cell, trial_index, seed, attempt)`` and the sizes."""
    p, d, cls = cell
    if cls not in OPERATOR_CLASSES:
        raise ValueError(f"unknown operator class {cls!r}")
    rng = trial_rng(seed, cell, trial_index, attempt)
    if cls == "c0_diagonal":
        support = sorted(rng.sample(range(3 * d), d))
        x = sample_normalized(p, d, rng, size_bound, dim=C0, support=support)
        A = _random_diagonal(p, support, rng, size_bound, (-2, -1, 0, 1))
        B = _random_diagonal(p, support, rng, size_bound, (-1, 0, 1, 2))
        free = [n for n in range(3 * d + 2) if n not in support]
        extra = rng.sample(free, 2)
    else:
        symmetric = cls == "symmetric"
        A = _random_matrix(p, d, rng, size_bound, symmetric)
        B = _random_matrix(p, d, rng, size_bound, symmetric)
        x = sample_normalized(p, d, rng, size_bound)
        extra = ()
    ys = []
    for j in range(witnesses):
        if witnesses >= 2 and j == witnesses - 1:
            ys.append(orthogonal_witness(x, z=x))  # forced zero witness
        else:
            ys.append(orthogonal_witness(x, rng, size_bound, unit=j % 2 == 0,
                                         extra_support=extra))
    return Instance(p, A, B, x, tuple(ys), seed_descriptor(seed, cell, trial_index, attempt))


def evaluate_instance(inst: Instance, *, checks: Iterable[str] | None = None,
                      mutate: bool = False, strict: bool = False) -> list[tuple[Verdict, int | None]]:
    """All applicable verdicts, paired with the witness index for MP checks.

    Checks that need self-adjoint operators are skipped for other pairs,
    unless ``strict`` is set and they were requested explicitly, in which case
    the checker's :class:`HypothesisError` propagates.
    """
    wanted = None if checks is None else {CheckId(c) for c in checks}

    def want(c: CheckId) -> bool:
        return wanted is None or c in wanted

    A, B, x, s = inst.A, inst.B, inst.x, inst.seed
    run_selfadjoint = (is_selfadjoint(A) and is_selfadjoint(B)) or (strict and wanted is not None)
    out: list[tuple[Verdict, int | None]] = []
    for check, fn in (
        (CheckId.HRS_i, check_hrs_i),
        (CheckId.HRS_ii, check_hrs_ii),
        (CheckId.HRS_ii_product, check_hrs_ii_product),
        (CheckId.HRS_iii, check_hrs_iii),
        (CheckId.HRS_iv, check_hrs_iv),
        (CheckId.HRS_v, check_hrs_v),
        (CheckId.HRS_vi, check_hrs_vi),
        (CheckId.IDENT_ii, check_identity_ii),
    ):
        if not want(check) or (check in NEEDS_SELFADJOINT and not run_selfadjoint):
            continue
        out.append((fn(A, B, x, seed=s, mutate=mutate), None))
    if run_selfadjoint and (want(CheckId.NOTE_comm_zero) or want(CheckId.NOTE_anticomm_double)):
        for v in check_notes(A, B, x, seed=s, mutate=mutate):
            if want(v.check):
                out.append((v, None))
    for j, y in enumerate(inst.witnesses):
        for sign, check in (("+", CheckId.MP_plus), ("-", CheckId.MP_minus)):
            if want(check):
                out.append((check_mp(A, B, x, y, sign, seed=f"{s};witness={j}", mutate=mutate), j))
    return out


def _is_generic(results: list[tuple[Verdict, int | None]], witnesses: Sequence[PVector]) -> bool:
    """No degenerate verdict except those forced by a zero witness."""
    for v, j in results:
        if v.degenerate and (j is None or not witnesses[j].is_zero()):
            return False
    return True


@dataclass
class CellStats:
    passed: int = 0
    failed: int = 0
    tight: int = 0
    degenerate: int = 0

    def add(self, v: Verdict) -> None:
        if v.holds:
            self.passed += 1
        else:
            self.failed += 1
        self.tight += v.tight
        self.degenerate += v.degenerate

    def merge(self, other: "CellStats") -> None:
        self.passed += other.passed
        self.failed += other.failed
        self.tight += other.tight
        self.degenerate += other.degenerate


CellKey = tuple[str, int, int, str]  # (check, prime, dim, class)


@dataclass
class CampaignReport:
    config: CampaignConfig
    cells: dict[CellKey, CellStats] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def failed(self) -> int:
        return sum(s.failed for s in self.cells.values())

    @property
    def passed(self) -> int:
        return sum(s.passed for s in self.cells.values())

    def totals(self) -> dict[str, CellStats]:
        out = {c.value: CellStats() for c in CheckId}
        for (check, *_), stats in self.cells.items():
            out[check].merge(stats)
        return out

    def merge(self, other: "CampaignReport") -> None:
        for key, stats in other.cells.items():
            self.cells.setdefault(key, CellStats()).merge(stats)
        self.failures.extend(other.failures)

    def sorted_cells(self) -> list[tuple[CellKey, CellStats]]:
        order = {c.value: i for i, c in enumerate(CheckId)}
        return sorted(self.cells.items(), key=lambda kv: (order[kv[0][0]], *kv[0][1:]))

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "passed": self.passed,
            "failed": self.failed,
            "totals": {k: asdict(v) for k, v in self.totals().items()},
            "cells": [
                {"check": c, "prime": p, "dim": d, "class": k, **asdict(s)}
                for (c, p, d, k), s in self.sorted_cells()
            ],
            "failures": sorted(self.failures, key=lambda f: f["seed"]),
            "wall_time": self.wall_time,
        }


def failure_record(inst: Instance, verdict: Verdict, witness: int | None, mutate: bool) -> dict:
    return {
        "check": verdict.check.value,
        "seed": verdict.seed,
        "witness_index": witness,
        "mutate": mutate,
        "instance": inst.to_json(),
        "verdict": verdict.to_json(),
    }


def recheck_failure(record: Mapping) -> Verdict:
    """Re-run the recorded check on the deserialized instance."""
    inst = Instance.from_json(record["instance"])
    check = CheckId(record["check"])
    mutate = bool(record.get("mutate", False))
    j = record.get("witness_index")
    if check in (CheckId.MP_plus, CheckId.MP_minus):
        sign = "+" if check is CheckId.MP_plus else "-"
        return check_mp(inst.A, inst.B, inst.x, inst.witnesses[j], sign,
                        seed=record["seed"], mutate=mutate)
    for v, _ in evaluate_instance(inst, checks=[check.value], mutate=mutate):
        return v
    raise ValueError(f"check {check} does not apply to the recorded instance")


def run_cell(config: CampaignConfig, cell: tuple[int, int, str]) -> CampaignReport:
    report = CampaignReport(config)
    p, d, cls = cell
    for trial in range(config.trials_per_cell):
        for attempt in range(MAX_ATTEMPTS):
            inst = generate_instance(cell, trial, config.seed, size_bound=config.size_bound,
                                     witnesses=config.witnesses_per_instance, attempt=attempt)
            results = evaluate_instance(inst, checks=config.checks, mutate=config.mutate)
            if _is_generic(results, inst.witnesses):
                break
        for v, j in results:
            report.cells.setdefault((v.check.value, p, d, cls), CellStats()).add(v)
            if not v.holds:
                report.failures.append(failure_record(inst, v, j, config.mutate))
    return report


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def run_campaign(config: CampaignConfig, threads: int | None = None) -> CampaignReport:
    start = time.perf_counter()
    threads = _threads() if threads is None else threads
    cells = config.cells()
    report = CampaignReport(config)
    if threads > 1 and len(cells) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run_cell, [config] * len(cells), cells))
    else:
        parts = [run_cell(config, cell) for cell in cells]
    for part in parts:
        report.merge(part)
    report.wall_time = time.perf_counter() - start
    return report
