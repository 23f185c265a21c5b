"""Pattern finders and the entry point that runs them over a project."""

from botlint.finders import bugs, perfumes, smells
from botlint.patterns import Category
from botlint.reporting import sort_issues
from botlint.tree import Project

FINDERS = {
    Category.BUG: bugs.FINDERS,
    Category.SMELL: smells.FINDERS,
    Category.PERFUME: perfumes.FINDERS,
}


def run_finders(project: Project, categories=tuple(Category)) -> list:
    """All issues of the requested categories, canonically sorted."""
    issues = []
    for category in categories:
        for finder in FINDERS[Category(category)]:
            issues.extend(finder(project))
    return sort_issues(issues)
