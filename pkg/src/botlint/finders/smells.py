"""Code-smell finders for robot actors."""

from __future__ import annotations

from botlint.finders.common import (
    NEGATIVE,
    activates,
    deactivates,
    find_motor_verdict,
    fmt_number,
    make_issue,
    robot_scripts,
    robot_statements,
)
from botlint.tree import Project, Stmt, actuator_of, is_timed, time_value, walk


def find_negative_motor_power(project: Project) -> list:
    # out-of-range and low-power literals are claimed by the bug finders
    return find_motor_verdict(project, NEGATIVE)


def _setting_key(stmt: Stmt):
    """Actuator attribute an untimed on/off block sets, or None."""
    actuator = actuator_of(stmt)
    if actuator is None or is_timed(stmt):
        return None
    if activates(stmt, actuator, timed=False) or deactivates(stmt, actuator):
        return (actuator, stmt.target)
    return None


def _sequences(script) -> list:
    seqs = [script.body]
    for stmt, _ in walk(script.body):
        seqs.extend(stmt.bodies)
    return seqs


def find_noneffective_modification(project: Project) -> list:
    """Adjacent settings of the same actuator attribute with nothing in between."""
    issues = []
    for actor, script in robot_scripts(project):
        for seq in _sequences(script):
            for prev, cur in zip(seq, seq[1:]):
                key = _setting_key(prev)
                if key is not None and key == _setting_key(cur):
                    issues.append(
                        make_issue(
                            "noneffective-modification",
                            actor,
                            script,
                            [prev.block_id, cur.block_id],
                            {"actuator": key[0].value},
                            actuator=key[0].value,
                        )
                    )
    return issues


def find_noneffective_time_limit(project: Project) -> list:
    issues = []
    for actor, script, stmt, _ in robot_statements(project):
        if not is_timed(stmt):
            continue
        t = time_value(stmt)
        # negative durations are as effect-free as zero
        if t is not None and t <= 0:
            issues.append(
                make_issue("noneffective-time-limit", actor, script, [stmt.block_id], {"value": fmt_number(t)}, time=t)
            )
    return issues


FINDERS = (
    find_negative_motor_power,
    find_noneffective_modification,
    find_noneffective_time_limit,
)
