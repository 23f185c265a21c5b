"""Findings, localized hints and report serialization."""

from __future__ import annotations

import csv
import io
import json
import string
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from botlint.errors import UnknownPattern
from botlint.patterns import Category, category_of

REPORT_SCHEMA = "botlint-report-1"
CSV_HEADER = ("project", "actor", "script", "pattern_id", "category", "block_ids", "hint")
DEFAULT_LANG = "en"


@dataclass
class Issue:
    pattern_id: str
    actor: str
    script: Optional[int]
    block_ids: tuple
    params: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    hint_key: str = ""

    def __post_init__(self):
        self.block_ids = tuple(self.block_ids)
        if not self.hint_key:
            self.hint_key = self.pattern_id

    @property
    def category(self) -> Category:
        return category_of(self.pattern_id)

    def sort_key(self) -> tuple:
        script = -1 if self.script is None else self.script
        return (self.actor, script, self.block_ids, self.pattern_id)

    def to_json(self, hint: Optional[str] = None) -> dict:
        out = {
            "pattern_id": self.pattern_id,
            "category": self.category.value,
            "actor": self.actor,
            "script": self.script,
            "block_ids": list(self.block_ids),
            "params": {k: str(v) for k, v in self.params.items()},
            "metadata": self.metadata,
        }
        if hint is not None:
            out["hint"] = hint
        return out


def sort_issues(issues) -> list:
    return sorted(issues, key=Issue.sort_key)


def placeholders(template: str) -> set:
    return {name for _, name, _, _ in string.Formatter().parse(template) if name}


class HintCatalog:
    """Hint templates per pattern and language, with an English fallback."""

    def __init__(self, patterns: dict):
        self.patterns = patterns

    @classmethod
    def load(cls, path: Optional[str | Path] = None) -> "HintCatalog":
        if path is None:
            text = resources.files("botlint.data").joinpath("hints.json").read_text("utf-8")
        else:
            text = Path(path).read_text("utf-8")
        return cls(json.loads(text)["patterns"])

    def languages(self) -> set:
        return {lang for entry in self.patterns.values() for lang in entry}

    def _entry(self, pattern_id: str, lang: str) -> dict:
        entry = self.patterns.get(pattern_id)
        if not entry:
            raise UnknownPattern(pattern_id)
        return entry.get(lang) or entry.get(DEFAULT_LANG) or next(iter(entry.values()))

    def name(self, pattern_id: str, lang: str = DEFAULT_LANG) -> str:
        return self._entry(pattern_id, lang)["name"]

    def template(self, pattern_id: str, lang: str = DEFAULT_LANG) -> str:
        return self._entry(pattern_id, lang)["hint"]

    def resolve(self, issue: Issue, lang: str = DEFAULT_LANG) -> str:
        return self.template(issue.hint_key, lang).format_map(issue.params)

    def heading(self, issue: Issue, lang: str = DEFAULT_LANG) -> str:
        label = {"en": {"BUG": "Bug Pattern", "SMELL": "Code Smell", "PERFUME": "Code Perfume"},
                 "de": {"BUG": "Fehlermuster", "SMELL": "Code Smell", "PERFUME": "Code Perfume"}}
        found = {"en": "found", "de": "gefunden"}
        lang = lang if lang in label else DEFAULT_LANG
        return f"{label[lang][issue.category.value]} {self.name(issue.hint_key, lang)} {found[lang]}"


_default: Optional[HintCatalog] = None


def default_catalog() -> HintCatalog:
    global _default
    if _default is None:
        _default = HintCatalog.load()
    return _default


def resolve_hint(issue: Issue, lang: str = DEFAULT_LANG, catalog: Optional[HintCatalog] = None) -> str:
    return (catalog or default_catalog()).resolve(issue, lang)


# ---------------------------------------------------------------------------
# serialization


def report_dict(project: str, issues, metrics, lang=DEFAULT_LANG, catalog=None, warnings=()) -> dict:
    catalog = catalog or default_catalog()
    return {
        "schema": REPORT_SCHEMA,
        "project": project,
        "metrics": metrics.to_json() if hasattr(metrics, "to_json") else dict(metrics),
        "issues": [i.to_json(catalog.resolve(i, lang)) for i in sort_issues(issues)],
        "warnings": [w.to_json() for w in warnings],
    }


def dumps_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def serialize_report(
    issues, metrics, fmt: str = "text", project: str = "", lang: str = DEFAULT_LANG, catalog=None, warnings=()
) -> bytes:
    catalog = catalog or default_catalog()
    issues = sort_issues(issues)
    if fmt == "json":
        return dumps_json(report_dict(project, issues, metrics, lang, catalog, warnings)).encode("utf-8")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for i in issues:
            script = "" if i.script is None else i.script
            writer.writerow(
                [project, i.actor, script, i.pattern_id, i.category.value, ";".join(i.block_ids), catalog.resolve(i, lang)]
            )
        return buf.getvalue().encode("utf-8")
    if fmt == "text":
        return _text_report(project, issues, metrics, lang, catalog, warnings).encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def _text_report(project, issues, metrics, lang, catalog, warnings) -> str:
    lines = [f"Project: {project}" if project else "Project"]
    m = metrics.to_json() if hasattr(metrics, "to_json") else dict(metrics)
    lines.append("  " + ", ".join(f"{k}={v}" for k, v in m.items()))
    for w in warnings:
        lines.append(f"  warning [{w.target} {w.block_id}]: {w.message}")
    if not issues:
        lines.append("  no patterns found")
    actor = None
    for i in issues:
        if i.actor != actor:
            actor = i.actor
            lines.append(f"Actor {actor}:")
        where = "" if i.script is None else f"script {i.script}, "
        lines.append(f"  {catalog.heading(i, lang)}: {catalog.resolve(i, lang)}")
        lines.append(f"    ({where}blocks {', '.join(i.block_ids) or '-'})")
    return "\n".join(lines) + "\n"
