"""One-project pipeline: load, build the tree, compute metrics, run finders."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from botlint.finders import run_finders
from botlint.ingest import RawProject, load_container
from botlint.metrics import ProjectMetrics, compute_metrics
from botlint.patterns import Category
from botlint.registry import Registry
from botlint.tree import Project, build_ast


@dataclass
class Analysis:
    path: str
    project: Project
    metrics: ProjectMetrics
    issues: list = field(default_factory=list)

    @property
    def warnings(self) -> list:
        return self.project.warnings

    @property
    def has_bugs(self) -> bool:
        return any(i.category is Category.BUG for i in self.issues)

    def has_robot_code(self) -> bool:
        return any(actor.scripts for actor in self.project.robots)


def analyze(raw: RawProject, registry: Optional[Registry] = None, categories=tuple(Category)) -> Analysis:
    project = build_ast(raw, registry)
    return Analysis(
        path=raw.source_path or "",
        project=project,
        metrics=compute_metrics(project),
        issues=run_finders(project, categories),
    )


def analyze_path(path, registry: Optional[Registry] = None, categories=tuple(Category)) -> Analysis:
    return analyze(load_container(Path(path)), registry, categories)
