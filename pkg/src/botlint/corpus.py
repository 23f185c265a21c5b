"""Batch analysis of project directories, per-pattern aggregation and corpus comparison."""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Optional

from botlint.analysis import analyze_path
from botlint.errors import BotlintError, EmptyCorpus
from botlint.metrics import METRIC_NAMES
from botlint.patterns import ALL_IDS, Category, category_of
from botlint.registry import Registry, default_registry
from botlint.stats import mann_whitney_u, vargha_delaney_a12

log = logging.getLogger(__name__)

PROJECT_SUFFIXES = (".json", ".zip")
COUNT_METRICS = ("bugs", "smells", "perfumes")


@dataclass
class ProjectRecord:
    path: str
    metrics: dict
    counts: dict  # pattern id -> instances
    warnings: int = 0
    robot_code: bool = True

    def metric(self, name: str, per_block: bool = False) -> float:
        if name in COUNT_METRICS:
            cat = Category[name[:-1].upper()]
            value = sum(n for p, n in self.counts.items() if category_of(p) is cat)
            if per_block:
                blocks = self.metrics["block_count"]
                return value / blocks if blocks else 0.0
            return value
        return self.metrics[name]


@dataclass
class CorpusResult:
    records: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # (path, reason)
    filtered: list = field(default_factory=list)  # paths without robot code


@dataclass
class PatternAggregate:
    pattern_id: str
    instance_count: int = 0
    project_count: int = 0
    mean_wmc_of_affected: Optional[float] = None

    def to_json(self) -> dict:
        out = {
            "pattern_id": self.pattern_id,
            "instance_count": self.instance_count,
            "project_count": self.project_count,
        }
        if self.mean_wmc_of_affected is not None:
            out["mean_wmc_of_affected"] = round(self.mean_wmc_of_affected, 6)
        return out


@dataclass
class ComparisonResult:
    metric: str
    u_statistic: float
    p_value: float
    a12: float
    n1: int
    n2: int
    mean_a: float = 0.0
    mean_b: float = 0.0

    def to_json(self) -> dict:
        return {k: (round(v, 12) if isinstance(v, float) else v) for k, v in self.__dict__.items()}


def discover(directory) -> list:
    """Project files under ``directory``, sorted so that results never depend on listing order."""
    root = Path(directory)
    if not root.is_dir():
        raise BotlintError(f"{root}: not a directory")
    return sorted(str(p) for p in root.rglob("*") if p.is_file() and p.suffix.lower() in PROJECT_SUFFIXES)


_worker_registry: dict = {}


def _registry_for(path: Optional[str]) -> Registry:
    if path is None:
        return default_registry()
    if path not in _worker_registry:
        _worker_registry[path] = Registry.load(path)
    return _worker_registry[path]


def analyze_one(path: str, registry_path: Optional[str] = None):
    """Analyze one file; returns a ProjectRecord or ``(path, reason)`` on failure."""
    try:
        result = analyze_path(path, _registry_for(registry_path))
    except BotlintError as exc:
        return (path, str(exc))
    except Exception as exc:  # one broken project must not stop a batch
        return (path, f"{type(exc).__name__}: {exc}")
    return ProjectRecord(
        path=path,
        metrics=result.metrics.to_json(),
        counts=dict(Counter(i.pattern_id for i in result.issues)),
        warnings=len(result.warnings),
        robot_code=result.has_robot_code(),
    )


def analyze_corpus(paths, registry_path=None, jobs: int = 1, filter_robot_code: bool = False) -> CorpusResult:
    paths = sorted(str(p) for p in paths)
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(analyze_one, paths, [registry_path] * len(paths)))
    else:
        outcomes = [analyze_one(p, registry_path) for p in paths]
    result = CorpusResult()
    for outcome in outcomes:
        if isinstance(outcome, tuple):
            log.warning("skipped %s: %s", *outcome)
            result.skipped.append(outcome)
        elif filter_robot_code and not outcome.robot_code:
            log.info("filtered %s: robot actors contain no code", outcome.path)
            result.filtered.append(outcome.path)
        else:
            if outcome.warnings:
                log.warning("%s: %d ingest warning(s)", outcome.path, outcome.warnings)
            result.records.append(outcome)
    return result


def aggregate(records, pattern_ids=ALL_IDS) -> list:
    """One row per pattern plus a final ``Total`` row."""
    rows = []
    for pid in pattern_ids:
        affected = [r for r in records if r.counts.get(pid, 0) > 0]
        rows.append(_row(pid, sum(r.counts.get(pid, 0) for r in records), affected))
    wanted = set(pattern_ids)
    affected = [r for r in records if any(n > 0 and p in wanted for p, n in r.counts.items())]
    total = sum(n for r in records for p, n in r.counts.items() if p in wanted)
    rows.append(_row("Total", total, affected))
    return rows


def _row(pid, instances, affected) -> PatternAggregate:
    mean = fmean(r.metrics["wmc"] for r in affected) if affected else None
    return PatternAggregate(pid, instances, len(affected), mean)


def compare(records_a, records_b, metrics=METRIC_NAMES, per_block: bool = False) -> list:
    if not records_a or not records_b:
        raise EmptyCorpus("both corpora need at least one analyzable project")
    rows = []
    for name in metrics:
        a = [r.metric(name, per_block) for r in records_a]
        b = [r.metric(name, per_block) for r in records_b]
        u, p = mann_whitney_u(a, b)
        a12 = vargha_delaney_a12(a, b)
        # both statistics count the same pairs; they must agree
        assert abs(u - a12 * len(a) * len(b)) <= 1e-9 * max(1.0, u), (u, a12)
        rows.append(ComparisonResult(name, u, p, a12, len(a), len(b), fmean(a), fmean(b)))
    return rows
