"""Size and complexity metrics per project.

Cyclomatic complexity of a script is 1 plus the number of decision blocks
(if, if-else, repeat, repeat-until, forever, wait-until). Boolean operators
are not counted, so absolute numbers depend on this definition.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from botlint.tree import DECISION_VARIANTS, Project, Script, iter_expr, walk

METRIC_NAMES = ("block_count", "script_count", "wmc", "longest_script", "most_complex_script")


@dataclass(frozen=True)
class ProjectMetrics:
    block_count: int = 0
    script_count: int = 0
    wmc: int = 0
    longest_script: int = 0
    most_complex_script: int = 0

    def to_json(self) -> dict:
        return asdict(self)


def cyclomatic(script: Script) -> int:
    decisions = sum(1 for stmt, _ in walk(script.body) if stmt.kind.is_control(*DECISION_VARIANTS))
    return 1 + decisions


def _stmt_blocks(stmts) -> int:
    count = 0
    for stmt, _ in walk(stmts):
        count += 1
        for expr in stmt.exprs():
            count += sum(1 for e in iter_expr(expr) if e.from_block)
    return count


def script_size(script: Script) -> int:
    """Blocks in a script: the hat, every nested statement and every reporter block."""
    hat_exprs = sum(1 for e in script.hat.args.values() for n in iter_expr(e) if n.from_block)
    return 1 + hat_exprs + _stmt_blocks(script.body)


def compute_metrics(project: Project) -> ProjectMetrics:
    sizes, complexities = [], []
    loose = 0
    for actor in project.actors:
        for script in actor.scripts:
            sizes.append(script_size(script))
            complexities.append(cyclomatic(script))
        loose += _stmt_blocks(actor.loose_blocks)
    return ProjectMetrics(
        block_count=sum(sizes) + loose,
        script_count=len(sizes),
        wmc=sum(complexities),
        longest_script=max(sizes, default=0),
        most_complex_script=max(complexities, default=0),
    )
