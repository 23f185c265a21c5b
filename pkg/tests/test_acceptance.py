"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` and look for the ``[acceptance]`` lines.
"""

from __future__ import annotations

import json
import random
import shutil
import time
from collections import Counter
from pathlib import Path

import pytest
from scipy.stats import mannwhitneyu

from botlint.analysis import analyze_path
from botlint.cli import main
from botlint.corpus import aggregate, analyze_corpus, discover
from botlint.patterns import ALL_IDS, Category, actuator_off_id, off_missing_id
from botlint.registry import Actuator, Family, Sensor, default_registry, sensor_range
from botlint.reporting import resolve_hint
from botlint.stats import mann_whitney_u, vargha_delaney_a12

from conftest import CORPUS, FIXTURES, run

from builders import FLAG, Project, R, S, Var

LED_OFF_HINT = ("The LEDs on your robot are still turned on after the program has stopped. "
             "Add an LED Off block at the end of your program.")
EXPECTED = json.loads((FIXTURES / "expected.json").read_text())
DECISION_OPCODES = {"control.if", "control.if_else", "control.repeat", "control.repeat_until",
                    "control.forever", "control.wait_until"}

# Shier (2004) diabetes-age example; normal approximation with continuity
# correction as published in the scipy.stats.mannwhitneyu documentation.
TEXTBOOK_A = [19, 22, 16, 29, 24]
TEXTBOOK_B = [20, 11, 17, 12]
TEXTBOOK_P = 0.11134688653314041


@pytest.fixture
def verdict(request):
    capture = request.config.pluginmanager.getplugin("capturemanager")

    def report(n, title, ok, detail=""):
        with capture.global_and_fixture_disabled():
            print(f"\n[acceptance] {'PASS' if ok else 'FAIL'} criterion {n}: {title}" + (f" ({detail})" if detail else ""))
        assert ok, detail

    return report


def _counts(path) -> dict:
    return dict(Counter(i.pattern_id for i in analyze_path(path).issues))


def _sensor_opcodes() -> dict:
    out: dict = {}
    for entry in default_registry().entries:
        if entry.kind.family is Family.SENSOR:
            for device in entry.devices:
                out.setdefault(device, {})[entry.kind.sensor] = entry.opcode
    return out


SENSOR_OPCODES = _sensor_opcodes()
OPS = {"Gt": "operator.gt", "Lt": "operator.lt", "Eq": "operator.equals"}
FLIP = {"Gt": "Lt", "Lt": "Gt", "Eq": "Eq"}


def test_1_seeded_fixture_exactness(verdict):
    start = time.perf_counter()
    mismatches, seeded = [], set()
    for name, expected in sorted(EXPECTED.items()):
        got = _counts(CORPUS / name)
        seeded |= {p for p, n in expected["counts"].items() if n > 0}
        for pid in ALL_IDS:
            if got.get(pid, 0) != expected["counts"].get(pid, 0):
                mismatches.append(f"{name}:{pid} expected {expected['counts'].get(pid, 0)} got {got.get(pid, 0)}")
    elapsed = time.perf_counter() - start
    missing = sorted(set(ALL_IDS) - seeded)
    ok = not mismatches and not missing and len(EXPECTED) >= 30 and elapsed < 5
    verdict(1, "seeded fixture corpus matches hand counts exactly", ok,
            f"{len(EXPECTED)} projects, {len(seeded)}/47 patterns seeded, {len(mismatches)} mismatches, "
            f"{elapsed:.2f}s{'; ' + '; '.join(mismatches[:5]) if mismatches else ''}"
            f"{'; unseeded ' + ','.join(missing) if missing else ''}")


def test_2_led_demo_end_to_end(verdict, tmp_path, capsysbinary):
    path = CORPUS / "f01_led_demo.json"
    result = analyze_path(path)
    led = [i for i in result.issues if i.pattern_id == "led-off-missing"]
    bugs = [i for i in result.issues if i.category is Category.BUG]
    hint_ok = len(led) == 1 and resolve_hint(led[0], "en") == LED_OFF_HINT
    code = main(["check", str(path), "--format", "text"])
    printed = LED_OFF_HINT in capsysbinary.readouterr().out.decode()
    ok = hint_ok and len(bugs) == 1 and code == 1 and printed
    verdict(2, "LED demo program: one led-off-missing with verbatim hint, exit 1", ok,
            f"bugs={[b.pattern_id for b in bugs]}, exit={code}, hint printed={printed}")


def _oracle(sensor, device, op, c) -> str:
    lo, hi, _ = sensor_range(sensor, device)
    domain = list(range(int(lo), int(hi) + 1))  # both endpoints are integers
    test = {"Gt": lambda v: v > c, "Lt": lambda v: v < c, "Eq": lambda v: v == c}[op]
    truth = {test(v) for v in domain}
    return "alwaysTrue" if truth == {True} else "alwaysFalse" if truth == {False} else "satisfiable"


def _random_literal(rng, lo, hi):
    kind = rng.random()
    if kind < 0.3:
        return rng.choice([lo, hi, lo - 1, hi + 1, lo + 1, hi - 1])
    if kind < 0.8:
        return rng.randint(lo - 60, hi + 60)
    return rng.randint(lo - 20, hi + 20) + rng.choice([0.5, 0.25, 0.75])


def test_3_useless_sensing_oracle(verdict):
    rng = random.Random(2024)
    agree, total, disagreements = 0, 0, []
    for _ in range(1200):
        device = rng.choice(["codey", "mcore"])
        sensor = rng.choice(sorted(SENSOR_OPCODES[device], key=lambda s: s.value))
        op = rng.choice(list(OPS))
        lo, hi, _ = sensor_range(sensor, device)
        c = _random_literal(rng, int(lo), int(hi))
        reporter = R(SENSOR_OPCODES[device][sensor])
        swapped = rng.random() < 0.3
        # with the literal on the left the operator reads mirrored
        node = R(OPS[FLIP[op]], OPERAND1=c, OPERAND2=reporter) if swapped else R(OPS[op], OPERAND1=reporter, OPERAND2=c)
        p = Project()
        p.robot("r", device).script(FLAG, S("control.forever", body=[S("control.if", CONDITION=node, body=[])]))
        useless = [i for i in run(p).issues if i.pattern_id == f"useless-{sensor.slug}-sensing"]
        got = useless[0].metadata["verdict"] if useless else "satisfiable"
        want = _oracle(sensor, device, op, c)
        total += 1
        if got == want and len(useless) <= 1:
            agree += 1
        else:
            disagreements.append(f"{device}/{sensor.value} {op} {c}: {got} vs {want}")
    verdict(3, "useless-sensing verdicts match brute force", agree == total and total >= 1000,
            f"{agree}/{total} agree{'; ' + '; '.join(disagreements[:5]) if disagreements else ''}")


MOTOR_PATTERNS = ("motor-usage", "low-motor-power", "motor-out-of-range", "negative-motor-power")


def _motor_program(rng):
    device = rng.choice(["codey", "mcore"])
    stmts, literals = [], {}
    for k in range(rng.randint(1, 6)):
        power = rng.choice([0, rng.randint(-250, 250), rng.choice([-101, -100, -25, -24, 24, 25, 100, 101]),
                            rng.randint(-30, 30) + 0.5])
        bid = f"m{k}"
        choice = rng.random()
        if choice < 0.4:
            stmts.append(S(f"{device}.{rng.choice(['move_fwd', 'move_back', 'turn_left'])}", id=bid, POWER=power))
            literals[bid] = [power]
        elif choice < 0.7:
            stmts.append(S(f"{device}.move_timed_fwd", id=bid, POWER=power, TIME=1))
            literals[bid] = [power]
        else:
            other = rng.randint(-150, 150)
            stmts.append(S(f"{device}.set_wheels", id=bid, LEFT_POWER=power, RIGHT_POWER=other))
            literals[bid] = [power, other]
        stmts.append(S("control.wait", DURATION=1))
    p = Project()
    p.robot("r", device).script(FLAG, *stmts)
    return p, literals


def _sensor_program(rng):
    device = rng.choice(["codey", "mcore"])
    sensors = sorted((s for s in SENSOR_OPCODES[device] if s is not Sensor.LINE), key=lambda s: s.value)
    body, nodes = [], {}
    for k in range(rng.randint(1, 5)):
        sensor = rng.choice(sensors)
        lo, hi, _ = sensor_range(sensor, device)
        c = _random_literal(rng, int(lo), int(hi))
        op = rng.choice(list(OPS))
        nid = f"c{k}"
        body.append(S("control.if", CONDITION=R(OPS[op], id=nid, OPERAND1=R(SENSOR_OPCODES[device][sensor]),
                                                   OPERAND2=c), body=[]))
        nodes[nid] = sensor
    p = Project()
    p.robot("r", device).script(FLAG, S("control.forever", body=body))
    return p, nodes


def test_4_partitions(verdict):
    rng = random.Random(99)
    motor_bad = []
    for n in range(200):
        project, literals = _motor_program(rng)
        claimed: dict = {}
        for issue in run(project).issues:
            if issue.pattern_id in MOTOR_PATTERNS:
                claimed.setdefault(issue.block_ids[0], []).append(issue.metadata["power"])
        for bid, powers in literals.items():
            expected = sorted(p for p in powers if p != 0)  # zero is the "nothing" outcome
            if sorted(claimed.get(bid, [])) != expected:
                motor_bad.append(f"program {n} block {bid}: {powers} -> {claimed.get(bid)}")
    sensor_bad = []
    for n in range(200):
        project, nodes = _sensor_program(rng)
        hits = Counter()
        for issue in run(project).issues:
            pid = issue.pattern_id
            if pid == "sensor-equals-check" or (pid.endswith("-sensing") and pid != "loop-sensing"):
                hits[issue.block_ids[0]] += 1
        for nid in nodes:
            if hits[nid] != 1:
                sensor_bad.append(f"program {n} node {nid}: {hits[nid]} verdicts")
    ok = not motor_bad and not sensor_bad
    verdict(4, "motor literals and sensor comparisons each get exactly one verdict", ok,
            f"motor violations={len(motor_bad)}, sensor violations={len(sensor_bad)}"
            f"{'; ' + '; '.join((motor_bad + sensor_bad)[:5]) if not ok else ''}")


def test_5_off_mutual_exclusion(verdict):
    clashes = []
    for name in sorted(EXPECTED):
        issues = analyze_path(CORPUS / name).issues
        for actuator in Actuator:
            actors_missing = {i.actor for i in issues if i.pattern_id == off_missing_id(actuator)}
            actors_off = {i.actor for i in issues if i.pattern_id == actuator_off_id(actuator)}
            clashes += [f"{name}:{a}:{actuator.value}" for a in actors_missing & actors_off]
    verdict(5, "off-missing and off perfume never co-occur per actor and actuator", not clashes,
            f"{len(EXPECTED)} fixtures checked{'; ' + ', '.join(clashes) if clashes else ''}")


def _raw_wmc(path) -> int:
    """Hats plus decision blocks reachable from hats, read straight from the JSON."""
    doc = json.loads(Path(path).read_text())
    total = 0
    for target in doc["targets"]:
        blocks = target["blocks"]
        stack = [bid for bid, b in blocks.items() if b.get("topLevel") and "when" in b["opcode"]]
        total += len(stack)
        seen = set()
        while stack:
            bid = stack.pop()
            if bid in seen:
                continue
            seen.add(bid)
            block = blocks[bid]
            total += block["opcode"] in DECISION_OPCODES
            if block.get("next"):
                stack.append(block["next"])
            for value in block.get("inputs", {}).values():
                if isinstance(value, list) and len(value) > 1 and isinstance(value[1], str):
                    stack.append(value[1])
    return total


def test_6_metrics(verdict):
    checked, wrong = 0, []
    for name, expected in sorted(EXPECTED.items()):
        if not expected["metrics"]:
            continue
        checked += 1
        got = analyze_path(CORPUS / name).metrics.to_json()
        if got != expected["metrics"]:
            wrong.append(f"{name}: {got}")
        if got["wmc"] != _raw_wmc(CORPUS / name):
            wrong.append(f"{name}: wmc {got['wmc']} vs raw {_raw_wmc(CORPUS / name)}")
    verdict(6, "hand-computed metrics match and WMC equals the raw cyclomatic sum", checked >= 10 and not wrong,
            f"{checked} fixtures{'; ' + '; '.join(wrong) if wrong else ''}")


def test_7_statistics(verdict):
    rng = random.Random(5)
    sample = [rng.randint(0, 50) for _ in range(15)]
    identical = vargha_delaney_a12(sample, list(sample)) == 0.5
    dominated = vargha_delaney_a12([x + 100 for x in sample], sample) == 1.0
    worst = 0.0
    for _ in range(100):
        a = [rng.randint(0, 10) for _ in range(rng.randint(1, 20))]
        b = [rng.randint(0, 10) for _ in range(rng.randint(1, 20))]
        pairs = sum((x > y) + 0.5 * (x == y) for x in a for y in b)
        u, _ = mann_whitney_u(a, b)
        worst = max(worst, abs(u - pairs), abs(vargha_delaney_a12(a, b) - pairs / (len(a) * len(b))))
    _, p = mann_whitney_u(TEXTBOOK_A, TEXTBOOK_B)
    scipy_p = mannwhitneyu(TEXTBOOK_A, TEXTBOOK_B, method="asymptotic", use_continuity=True).pvalue
    ok = identical and dominated and worst <= 1e-12 and abs(p - TEXTBOOK_P) <= 1e-6
    verdict(7, "A12 properties, pair-count oracle and textbook p-value", ok,
            f"identical={identical}, dominated={dominated}, max oracle error={worst:.1e}, "
            f"p={p:.12f} vs {TEXTBOOK_P} (scipy {scipy_p:.12f})")


def test_8_aggregation(verdict, capsysbinary):
    paths = discover(CORPUS)
    single = Counter()
    for path in paths:
        single.update(_counts(path))
    tables = []
    for order, jobs in ((paths, 1), (list(reversed(paths)), 1), (random.Random(3).sample(paths, len(paths)), 4)):
        tables.append({r.pattern_id: r.instance_count for r in aggregate(analyze_corpus(order, jobs=jobs).records)})
    main(["corpus", str(CORPUS), "--format", "json", "--jobs", "3"])
    cli = {r["pattern_id"]: r["instance_count"] for r in json.loads(capsysbinary.readouterr().out)["rows"]}
    tables.append(cli)
    expected = {pid: single.get(pid, 0) for pid in ALL_IDS}
    expected["Total"] = sum(expected.values())
    ok = all(t == expected for t in tables)
    verdict(8, "corpus table equals summed single runs for any order and --jobs", ok,
            f"{len(paths)} projects, {expected['Total']} instances, {len(tables)} runs compared")


def test_9_robustness(verdict, tmp_path, caplog):
    for name in ("f01_led_demo.json", "f09_parallel_led.json"):
        shutil.copy(CORPUS / name, tmp_path / name)
    (tmp_path / "corrupt.zip").write_bytes(b"PK\x03\x04 truncated archive")
    (tmp_path / "empty.json").write_text("")
    p = Project()
    bot = p.robot("mBot", "mcore")
    bot.script(FLAG, S("mcore.led_on", id="on", R=1, G=2, B=3))
    doc = p.to_dict()
    blocks = doc["targets"][0]["blocks"]
    blocks["on"]["next"] = "ghost"
    blocks["on"]["inputs"]["B"] = [3, "phantom", [4, "0"]]
    (tmp_path / "dangling.json").write_text(json.dumps(doc))
    with caplog.at_level("WARNING", logger="botlint"):
        result = analyze_corpus(discover(tmp_path))
    skipped = sorted(Path(p).name for p, _ in result.skipped)
    by_name = {Path(r.path).name: r for r in result.records}
    dangling_ok = by_name.get("dangling.json") is not None and by_name["dangling.json"].warnings == 2 \
        and by_name["dangling.json"].counts == {"led-off-missing": 1}
    good_ok = all(by_name[n].counts == EXPECTED[n]["counts"] for n in ("f01_led_demo.json", "f09_parallel_led.json"))
    logged = "corrupt.zip" in caplog.text and "empty.json" in caplog.text and "dangling.json" in caplog.text
    ok = skipped == ["corrupt.zip", "empty.json"] and dangling_ok and good_ok and logged
    verdict(9, "corrupt zip, empty JSON and dangling references handled", ok,
            f"skipped={skipped}, analyzed={sorted(by_name)}, dangling ok={dangling_ok}, logged={logged}")


def _big_project(target_blocks=3000) -> Project:
    rng = random.Random(1)
    p = Project()
    bot = p.robot("mBot", "mcore")
    made = 0
    while made < target_blocks:
        body = []
        for _ in range(40):
            kind = rng.random()
            if kind < 0.3:
                body.append(S("control.if", CONDITION=R("operator.gt", OPERAND1=R("mcore.ultrasonic_distance"),
                                                         OPERAND2=rng.randint(0, 500)),
                              body=[S("mcore.led_on", R=rng.randint(0, 300), G=0, B=0)]))
                made += 4
            elif kind < 0.6:
                body.append(S("mcore.move_fwd", POWER=rng.randint(-150, 150)))
                made += 1
            elif kind < 0.8:
                body.append(S("control.repeat", TIMES=3, body=[S("mcore.move_timed_fwd", POWER=50, TIME=0.2),
                                                               S("data.change_variable", VALUE=1)]))
                made += 3
            else:
                body.append(S("control.wait", DURATION=Var("t")))
                made += 1
        bot.script(rng.choice([FLAG, "mcore.when_start", "mcore.when_button_pressed"]),
                   S("control.forever", body=body))
        made += 2
    return p


def test_10_performance(verdict, tmp_path):
    path = _big_project().write(tmp_path / "big.json")
    start = time.perf_counter()
    result = analyze_path(path)
    elapsed = time.perf_counter() - start
    blocks = result.metrics.block_count
    verdict(10, "3,000-block project parsed and analyzed under 1 s", blocks >= 3000 and elapsed < 1.0,
            f"{blocks} blocks, {len(result.issues)} issues, {elapsed:.3f}s")
