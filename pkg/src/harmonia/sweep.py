"""Randomised verification sweeps over factored models.

``run_sweep`` draws seeded random models over a grid of (n, head size,
dependent size) cells and evaluates every placement relation that is
guaranteed for the model's regime:

* models with one shared conditional table (identical channels, even model
  indices) run the complete battery, including the relations that compare
  different dependent slots;
* models with per-slot tables (odd indices) run the subset that holds for
  every factored model, which deliberately excludes the cross-slot
  comparisons because they can genuinely fail there.

Every row lands in one CSV with a fixed sort order, so reruns with the same
config are byte-identical apart from an optional timestamp comment.  A
failing model is serialised to disk next to the report for a post-mortem.
"""

from __future__ import annotations

import csv
import os
import time
from dataclasses import dataclass, fields
from multiprocessing import get_context
from pathlib import Path
from typing import IO, Iterable

from .distributions import (
    HEAD,
    FactoredModel,
    JointTable,
    ValidationError,
    VarSet,
    build_joint,
    check_factorization,
    dep_range,
)
from .information import (
    DEFAULT_TOLERANCE,
    chain_rule_residual,
    conditional_mutual_information,
    mutual_information,
)
from .generators import ModelSpec, derive_seed, random_model
from .placement import (
    Objective,
    Relation,
    RelationCheck,
    lattice_report,
    optimal_head_position,
    remainder_relation_checks,
    verify_irrelevance,
    verify_pending_theorem,
)

#: Tolerance for conditional-independence self-checks, tighter than the
#: inequality tolerance because the factorisation is exact by construction.
INDEPENDENCE_TOL = 1e-12

CSV_HEADER = (
    "model_id",
    "theorem",
    "relation",
    "lhs_nats",
    "rhs_nats",
    "slack",
    "holds",
    "equality_diagnosis",
)


@dataclass(frozen=True)
class SweepRow:
    """One relation check, flattened to the CSV schema."""

    model_id: str
    theorem: str
    relation: str
    lhs_nats: float
    rhs_nats: float
    slack: float
    holds: bool
    equality_diagnosis: str


@dataclass(frozen=True)
class RunConfig:
    """Settings for a verification sweep (mirrored by the JSON config file)."""

    tolerance: float = DEFAULT_TOLERANCE
    sweep_size: int = 40
    n_values: tuple[int, ...] = (2, 3, 4)
    head_sizes: tuple[int, ...] = (2, 3, 5)
    dep_sizes: tuple[int, ...] = (2, 3, 5)
    concentration: float = 1.0
    seed: int = 20260814
    aggregate: str = "min"
    out: str | None = None
    timestamp: bool = True
    workers: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_values", tuple(self.n_values))
        object.__setattr__(self, "head_sizes", tuple(self.head_sizes))
        object.__setattr__(self, "dep_sizes", tuple(self.dep_sizes))
        if self.tolerance <= 0:
            raise ValidationError(f"tolerance must be positive, got {self.tolerance}")
        if self.sweep_size < 1:
            raise ValidationError(f"sweep size must be >= 1, got {self.sweep_size}")
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise ValidationError(f"n values must all be >= 1, got {self.n_values}")
        if any(s < 1 for s in self.head_sizes + self.dep_sizes):
            raise ValidationError("alphabet sizes must all be >= 1")
        if self.concentration <= 0:
            raise ValidationError(
                f"concentration must be positive, got {self.concentration}"
            )
        if self.aggregate not in ("min", "mean"):
            raise ValidationError(f"aggregate must be 'min' or 'mean', got {self.aggregate!r}")
        if self.workers is not None and self.workers < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(
                f"unknown config key(s) {sorted(unknown)}; valid keys are {sorted(known)}"
            )
        return cls(**data)

    @property
    def model_count(self) -> int:
        return (
            len(self.n_values) * len(self.head_sizes) * len(self.dep_sizes) * self.sweep_size
        )


def resolve_workers(requested: int | None) -> int:
    """Worker count: the HARMONIA_THREADS environment variable caps it."""
    cap_text = os.environ.get("HARMONIA_THREADS")
    cap = None
    if cap_text:
        try:
            cap = int(cap_text)
        except ValueError:
            raise ValidationError(
                f"HARMONIA_THREADS must be an integer, got {cap_text!r}"
            ) from None
        if cap < 1:
            raise ValidationError(f"HARMONIA_THREADS must be >= 1, got {cap}")
    workers = requested if requested is not None else (cap or 1)
    if cap is not None:
        workers = min(workers, cap)
    return max(1, workers)


# ---------------------------------------------------------------------------
# Per-model battery
# ---------------------------------------------------------------------------


def _diag_text(check: RelationCheck) -> str:
    if check.equality_diagnosis is None:
        return ""
    d = check.equality_diagnosis
    return (
        f"{check.equality_condition} [residual={d.residual:.6e} "
        f"chain={'yes' if d.is_chain else 'no'}]"
    )


def _row(model_id: str, theorem: str, check: RelationCheck) -> SweepRow:
    return SweepRow(
        model_id=model_id,
        theorem=theorem,
        relation=check.name,
        lhs_nats=check.lhs,
        rhs_nats=check.rhs,
        slack=check.slack,
        holds=check.holds,
        equality_diagnosis=_diag_text(check),
    )


def _exact_eq_check(name: str, lhs: float, rhs: float, condition: str = "") -> RelationCheck:
    """A bit-exact equality check (no tolerance at all)."""
    return RelationCheck(
        name=name,
        relation=Relation.EQ,
        lhs=lhs,
        rhs=rhs,
        tolerance=0.0,
        holds=lhs == rhs,
        slack=-abs(lhs - rhs),
        equality_condition=condition,
    )


def _bounded_check(name: str, value: float, tol: float, condition: str = "") -> RelationCheck:
    """An |value| <= tol check rendered as EQ against zero."""
    return RelationCheck(
        name=name,
        relation=Relation.EQ,
        lhs=value,
        rhs=0.0,
        tolerance=tol,
        holds=abs(value) <= tol,
        slack=-abs(value),
        equality_condition=condition,
    )


def theorem_battery(
    model: FactoredModel,
    tol: float = DEFAULT_TOLERANCE,
    cross_slot: bool | None = None,
    aggregate: str = "min",
) -> list[tuple[str, RelationCheck]]:
    """Every guaranteed relation for one model, as (theorem, check) pairs.

    ``cross_slot`` controls whether the slot-comparing relations (full
    pending part 1 and lattice relations 4..7) are included; by default they
    are included exactly when the model's dependents share one conditional
    table.
    """
    if cross_slot is None:
        cross_slot = model.has_identical_channels
    n = model.n
    joint = build_joint(model)
    head = VarSet((HEAD,))
    all_deps = dep_range(1, n)
    out: list[tuple[str, RelationCheck]] = []

    # Exact identities of the information measures themselves.
    lhs = mutual_information(joint, head, all_deps)
    rhs = mutual_information(joint, all_deps, head)
    out.append(
        ("identity", _exact_eq_check("symmetry head-vs-deps", lhs, rhs, "MI is symmetric"))
    )
    if n >= 2:
        first = dep_range(1, 1)
        rest = dep_range(2, n)
        out.append(
            (
                "identity",
                _exact_eq_check(
                    "symmetry dep1-vs-rest",
                    mutual_information(joint, first, head | rest),
                    mutual_information(joint, head | rest, first),
                    "MI is symmetric",
                ),
            )
        )
        out.append(
            (
                "identity",
                _bounded_check(
                    "chain-rule deps-about-head",
                    chain_rule_residual(joint, first, rest, head),
                    tol,
                    "chain rule of mutual information",
                ),
            )
        )
        out.append(
            (
                "identity",
                _bounded_check(
                    "chain-rule head+dep1-about-rest",
                    chain_rule_residual(joint, head, first, rest),
                    tol,
                    "chain rule of mutual information",
                ),
            )
        )
        # Dependents are independent given the head: prefix splits and pairs.
        # (For n = 2 the k=1 split *is* the only pair; keep each split once.)
        splits = [(dep_range(1, k), dep_range(k + 1, n)) for k in range(1, n)]
        splits += [
            (dep_range(i, i), dep_range(j, j))
            for i in range(1, n + 1)
            for j in range(i + 1, n + 1)
        ]
        seen: set[tuple[tuple[str, ...], tuple[str, ...]]] = set()
        for left, right in splits:
            key = (left.names, right.names)
            if key in seen:
                continue
            seen.add(key)
            residual = conditional_mutual_information(joint, left, right, head)
            name = (
                f"independence {'+'.join(left.names)} vs {'+'.join(right.names)}"
            )
            out.append(
                (
                    "given-head-independence",
                    _bounded_check(name, residual, INDEPENDENCE_TOL,
                                   "dependents independent given the head"),
                )
            )

    for check in remainder_relation_checks(joint, tol):
        out.append(("remainder", check))

    for k in range(1, n + 1):
        for j in range(k, n + 1):
            for check in verify_pending_theorem(model, k, j, tol):
                if "part1" in check.name and j > k and not cross_slot:
                    continue
                out.append(("pending", check))

    for k in range(1, n + 1):
        for j in range(k + 1, n + 1):
            out.append(("irrelevance", verify_irrelevance(model, k, j, tol)))

    for k in range(1, n):
        report = lattice_report(model, k, tol)
        for check in report.checks:
            keep = cross_slot or any(
                f"({num})" in check.name for num in (1, 2, 3)
            )
            if keep:
                out.append(("lattice", check))

    # Harmony contracts: which head positions attain each objective's max.
    head_search = optimal_head_position(
        model, Objective.HEAD_PREDICTABILITY, include_profiles=False
    )
    out.append(
        (
            "harmony",
            _exact_eq_check(
                "head-last attains head-predictability max",
                max(head_search.scores),
                head_search.scores[n],
                "producing every dependent first can only add information",
            ),
        )
    )
    dep_search = optimal_head_position(
        model,
        Objective.DEPENDENT_PREDICTABILITY,
        aggregate=aggregate,
        include_profiles=False,
    )
    out.append(
        (
            "harmony",
            RelationCheck(
                name="head-first attains dependent-predictability max",
                relation=Relation.EQ,
                lhs=max(dep_search.scores),
                rhs=dep_search.scores[0],
                tolerance=tol,
                holds=abs(max(dep_search.scores) - dep_search.scores[0]) <= tol,
                slack=-abs(max(dep_search.scores) - dep_search.scores[0]),
                equality_condition="the head informs every dependent at least as well as a sibling",
            ),
        )
    )
    if n == 1:
        remainder = optimal_head_position(
            model, Objective.REMAINDER_AT_K, k=1, include_profiles=False
        )
        out.append(
            (
                "harmony",
                _bounded_check(
                    "n=1 head-first equals head-last",
                    remainder.scores[0] - remainder.scores[1],
                    INDEPENDENCE_TOL,
                    "single dependent (symmetry)",
                ),
            )
        )
    return out


def checks_for_joint(joint: JointTable, tol: float = DEFAULT_TOLERANCE) -> list[tuple[str, RelationCheck]]:
    """Checks that make sense for an arbitrary joint table with a head.

    Used for file inputs: the factorisation itself becomes a check, and the
    remainder relations are evaluated as stated.  On a non-factored joint the
    remainder relations may genuinely fail; that is the point.
    """
    report = check_factorization(joint, tol=max(tol, 1e-12))
    rows: list[tuple[str, RelationCheck]] = [
        (
            "factorization",
            _bounded_check(
                "dependents pairwise independent given head",
                report.max_violation,
                report.tolerance,
                "factored model assumption",
            ),
        )
    ]
    for check in remainder_relation_checks(joint, tol):
        rows.append(("remainder", check))
    return rows


# ---------------------------------------------------------------------------
# Sweep driver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepTask:
    model_id: str
    spec: ModelSpec


def sweep_tasks(config: RunConfig) -> list[SweepTask]:
    """The deterministic model grid for a config, in model_id order."""
    tasks: list[SweepTask] = []
    index = 0
    for n in config.n_values:
        for hs in config.head_sizes:
            for ds in config.dep_sizes:
                for i in range(config.sweep_size):
                    identical = i % 2 == 0
                    spec = ModelSpec(
                        n=n,
                        head_size=hs,
                        dep_sizes=ds,
                        concentration=config.concentration,
                        seed=derive_seed(config.seed, index),
                        identical_channels=identical,
                    )
                    regime = "id" if identical else "ps"
                    tasks.append(
                        SweepTask(model_id=f"n{n}-h{hs}-d{ds}-{regime}-{i:04d}", spec=spec)
                    )
                    index += 1
    return tasks


def _battery_rows(task: SweepTask, tol: float, aggregate: str) -> list[SweepRow]:
    model = random_model(task.spec)
    return [
        _row(task.model_id, theorem, check)
        for theorem, check in theorem_battery(model, tol=tol, aggregate=aggregate)
    ]


def _battery_worker(args: tuple[SweepTask, float, str]) -> list[SweepRow]:
    return _battery_rows(*args)


@dataclass
class SweepResult:
    config: RunConfig
    rows: list[SweepRow]
    elapsed_seconds: float
    model_count: int

    @property
    def failures(self) -> list[SweepRow]:
        return [r for r in self.rows if not r.holds]

    @property
    def holds(self) -> bool:
        return not self.failures


def run_sweep(config: RunConfig) -> SweepResult:
    """Run the whole battery over the config's model grid."""
    start = time.perf_counter()
    tasks = sweep_tasks(config)
    workers = resolve_workers(config.workers)
    if workers > 1:
        ctx = get_context()
        args = [(t, config.tolerance, config.aggregate) for t in tasks]
        with ctx.Pool(processes=workers) as pool:
            per_task = pool.map(_battery_worker, args, chunksize=8)
    else:
        per_task = [
            _battery_rows(t, config.tolerance, config.aggregate) for t in tasks
        ]
    rows = [row for chunk in per_task for row in chunk]
    rows.sort(key=lambda r: (r.model_id, r.theorem, r.relation))
    elapsed = time.perf_counter() - start
    return SweepResult(
        config=config, rows=rows, elapsed_seconds=elapsed, model_count=len(tasks)
    )


def write_report(
    rows: Iterable[SweepRow], out: IO[str], timestamp: bool = True
) -> None:
    """Write the report CSV through one writer, sorted and reproducible."""
    ordered = sorted(rows, key=lambda r: (r.model_id, r.theorem, r.relation))
    if timestamp:
        out.write(f"# generated-at: {time.strftime('%Y-%m-%dT%H:%M:%S%z')}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in ordered:
        writer.writerow(
            (
                r.model_id,
                r.theorem,
                r.relation,
                repr(r.lhs_nats),
                repr(r.rhs_nats),
                repr(r.slack),
                "true" if r.holds else "false",
                r.equality_diagnosis,
            )
        )


def write_witnesses(result: SweepResult, directory: str | Path) -> list[Path]:
    """Serialise every failing model for inspection; returns written paths."""
    from .modelio import save_model  # local import to avoid a cycle

    by_id = {t.model_id: t.spec for t in sweep_tasks(result.config)}
    written: list[Path] = []
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for model_id in sorted({r.model_id for r in result.failures}):
        spec = by_id.get(model_id)
        if spec is None:
            continue
        path = directory / f"witness-{model_id}.json"
        save_model(
            random_model(spec),
            path,
            metadata={
                "model_id": model_id,
                "seed": spec.seed,
                "identical_channels": spec.identical_channels,
                "failing_relations": sorted(
                    r.relation for r in result.failures if r.model_id == model_id
                ),
            },
        )
        written.append(path)
    return written
