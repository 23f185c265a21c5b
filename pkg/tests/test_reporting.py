import csv
import io
import json

import pytest

from botlint.errors import UnknownPattern
from botlint.metrics import ProjectMetrics
from botlint.patterns import ALL_IDS, BUG_IDS, PERFUME_IDS, SMELL_IDS, Category, category_of
from botlint.reporting import (
    CSV_HEADER,
    HintCatalog,
    Issue,
    default_catalog,
    dumps_json,
    placeholders,
    resolve_hint,
    serialize_report,
    sort_issues,
)

from conftest import run

from builders import led_demo

LED_OFF_HINT = ("The LEDs on your robot are still turned on after the program has stopped. "
             "Add an LED Off block at the end of your program.")


def led_issue(**kw):
    return Issue("led-off-missing", "mBot", 0, ("b1",), **kw)


def test_pattern_id_sets():
    assert (len(BUG_IDS), len(SMELL_IDS), len(PERFUME_IDS)) == (26, 3, 18)
    assert len(set(ALL_IDS)) == 47
    assert category_of("waiting-aborted") is Category.BUG
    assert category_of("parallelisation") is Category.PERFUME
    with pytest.raises(UnknownPattern):
        category_of("nope")


def test_led_demo_hint_verbatim():
    assert resolve_hint(led_issue(), "en") == LED_OFF_HINT


def test_language_fallback():
    assert resolve_hint(led_issue(), "xx") == LED_OFF_HINT
    assert resolve_hint(led_issue(), "de") != LED_OFF_HINT


def test_unknown_pattern():
    with pytest.raises(UnknownPattern):
        resolve_hint(Issue("no-such-pattern", "a", 0, ("b",)), "en")


def test_catalog_covers_every_pattern_in_both_languages():
    catalog = default_catalog()
    for pid in ALL_IDS:
        en, de = catalog.template(pid, "en"), catalog.template(pid, "de")
        assert catalog.patterns[pid].keys() >= {"en", "de"}
        assert placeholders(en) == placeholders(de), pid
        assert catalog.name(pid, "en") and catalog.name(pid, "de")


def test_catalog_is_editable(tmp_path):
    path = tmp_path / "hints.json"
    path.write_text(json.dumps({"patterns": {"led-off-missing": {"en": {"name": "X", "hint": "turn it off, {who}"}}}}))
    catalog = HintCatalog.load(path)
    assert catalog.resolve(led_issue(params={"who": "please"}), "de") == "turn it off, please"


def test_heading():
    assert default_catalog().heading(led_issue()) == "Bug Pattern LED Off Missing found"


def test_sorting_is_canonical():
    a = Issue("motor-usage", "b", 1, ("x",))
    b = Issue("colour-usage", "a", None, ("y",))
    c = Issue("colour-usage", "a", 0, ("a",))
    assert sort_issues([a, c, b]) == [b, c, a]


def test_empty_json_report():
    data = json.loads(serialize_report([], ProjectMetrics(0, 0, 0, 0, 0), "json"))
    assert data["issues"] == [] and data["metrics"]["wmc"] == 0
    assert data["schema"] == "botlint-report-1"


def test_led_demo_json_and_round_trip():
    result = run(led_demo())
    raw = serialize_report(result.issues, result.metrics, "json", project="led_demo.json")
    data = json.loads(raw)
    bugs = [i for i in data["issues"] if i["category"] == "BUG"]
    assert [i["pattern_id"] for i in bugs] == ["led-off-missing"]
    assert bugs[0]["hint"] == LED_OFF_HINT
    assert dumps_json(json.loads(raw)).encode("utf-8") == raw


def test_csv_rows():
    result = run(led_demo())
    raw = serialize_report(result.issues, result.metrics, "csv", project="p").decode()
    rows = list(csv.reader(io.StringIO(raw)))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == len(result.issues) + 1


def test_text_grouped_by_actor():
    result = run(led_demo())
    text = serialize_report(result.issues, result.metrics, "text", project="p").decode()
    assert "Actor mBot:" in text and LED_OFF_HINT in text
    german = serialize_report(result.issues, result.metrics, "text", lang="de").decode()
    assert "Fehlermuster" in german


def test_unknown_format():
    with pytest.raises(ValueError):
        serialize_report([], ProjectMetrics(0, 0, 0, 0, 0), "xml")
