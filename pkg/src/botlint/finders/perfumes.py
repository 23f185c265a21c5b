"""Code-perfume finders: evidence of correctly used robot concepts."""

from __future__ import annotations

from botlint.finders.common import (
    CORRECT,
    USAGE,
    activates,
    colour_valid,
    comparison_verdict,
    deactivates,
    find_motor_verdict,
    fmt_number,
    make_issue,
    robot_statements,
    sensor_comparisons,
)
from botlint.patterns import ACTUATORS, SENSORS, actuator_off_id, correct_sensing_id
from botlint.registry import Actuator, Sensor
from botlint.tree import Project, colour_components, is_conditional, scripts_grouped_by_hat, sensor_reporters, walk


def find_colour_usage(project: Project) -> list:
    issues = []
    for actor, script, stmt, _ in robot_statements(project):
        comps = colour_components(stmt)
        if comps and all(colour_valid(c) for c in comps):
            issues.append(make_issue("colour-usage", actor, script, [stmt.block_id], components=list(comps)))
    return issues


def find_correct_sensing(project: Project, sensor: Sensor) -> list:
    pattern = correct_sensing_id(sensor)
    issues = []
    for actor, script, cmp in sensor_comparisons(project):
        if cmp.sensor is sensor and comparison_verdict(cmp, actor.device)[0] == CORRECT:
            issues.append(
                make_issue(pattern, actor, script, [cmp.node.block_id], {"value": fmt_number(cmp.literal)}, op=cmp.op)
            )
    return issues


def find_actuator_off(project: Project, actuator: Actuator) -> list:
    """Once per actor that switches ``actuator`` on and also switches it off."""
    pattern = actuator_off_id(actuator)
    issues = []
    for actor in project.robots:
        first_off, activated = None, False
        for script in actor.scripts:
            for stmt, _ in walk(script.body):
                if first_off is None and deactivates(stmt, actuator):
                    first_off = (script, stmt)
                activated = activated or activates(stmt, actuator)
        if first_off is not None and activated:
            script, stmt = first_off
            issues.append(make_issue(pattern, actor, script, [stmt.block_id]))
    return issues


def find_loop_sensing(project: Project) -> list:
    """Sensor queries in conditions that are re-evaluated by a loop."""
    issues = []
    for actor, script, stmt, ctx in robot_statements(project):
        if is_conditional(stmt) and ctx.loops:
            loop = ctx.loops[-1]
        elif stmt.kind.is_control("RepeatUntil"):
            loop = stmt
        else:
            continue
        for rep in sensor_reporters(stmt.condition):
            issues.append(
                make_issue(
                    "loop-sensing",
                    actor,
                    script,
                    [rep.block_id],
                    {"sensor": rep.sensor.value},
                    sensor=rep.sensor.value,
                    loop=loop.block_id,
                )
            )
    return issues


def find_motor_usage(project: Project) -> list:
    return find_motor_verdict(project, USAGE)


def find_parallelisation(project: Project) -> list:
    issues = []
    for actor in project.robots:
        for group in scripts_grouped_by_hat(actor):
            if len(group) >= 2:
                issues.append(
                    make_issue(
                        "parallelisation",
                        actor,
                        group[0],
                        [s.hat.block_id for s in group],
                        {"count": len(group)},
                        size=len(group),
                        scripts=[s.index for s in group],
                    )
                )
    return issues


FINDERS = (
    find_colour_usage,
    lambda project: [i for s in SENSORS for i in find_correct_sensing(project, s)],
    lambda project: [i for a in ACTUATORS for i in find_actuator_off(project, a)],
    find_loop_sensing,
    find_motor_usage,
    find_parallelisation,
)
