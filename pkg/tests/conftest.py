import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS))

from botlint.analysis import analyze  # noqa: E402
from botlint.ingest import parse_project  # noqa: E402

FIXTURES = TESTS / "fixtures"
CORPUS = FIXTURES / "corpus"


def run(project, **kw):
    """Analyze a builder project in memory."""
    return analyze(parse_project(project.to_dict()), **kw)


def counts(project, **kw) -> dict:
    out: dict = {}
    for issue in run(project, **kw).issues:
        out[issue.pattern_id] = out.get(issue.pattern_id, 0) + 1
    return out


@pytest.fixture
def corpus_dir():
    return CORPUS
