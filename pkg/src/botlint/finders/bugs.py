"""Bug-pattern finders for robot actors."""

from __future__ import annotations

from itertools import combinations

from botlint.finders.common import (
    ALWAYS_FALSE,
    EQUALS_CHECK,
    LOW_POWER,
    OUT_OF_RANGE,
    USELESS,
    activates,
    body_statements,
    colour_out_of_range,
    comparison_verdict,
    deactivates,
    find_motor_verdict,
    fmt_number,
    loop_has_time,
    make_issue,
    robot_statements,
    sensor_comparisons,
    uses,
)
from botlint.patterns import ACTUATORS, SENSORS, off_missing_id, useless_sensing_id
from botlint.registry import Actuator, Family, Sensor
from botlint.tree import (
    Project,
    colour_components,
    is_conditional,
    is_loop,
    is_stop_scripts,
    is_timed,
    is_wait,
    references_button,
    scripts_grouped_by_hat,
    sensor_refs,
    sensor_reporters,
    time_value,
    walk,
)


def find_action_not_stopped(project: Project) -> list:
    """Off-commands that leave a looping script of another script running.

    An off block in script A is flagged when some other script B of the same
    actor activates that actuator inside a loop, unless A stops the other
    scripts first.
    """
    issues = []
    for actor in project.robots:
        looped = {a: [] for a in ACTUATORS}
        for script in actor.scripts:
            for stmt, ctx in walk(script.body):
                if ctx.loops:
                    for a in ACTUATORS:
                        if activates(stmt, a):
                            looped[a].append((script.index, stmt.block_id))
        for script in actor.scripts:
            stopped = False
            for stmt, _ in walk(script.body):
                if is_stop_scripts(stmt):
                    stopped = True
                    continue
                for a in ACTUATORS:
                    if not deactivates(stmt, a) or stopped:
                        continue
                    others = [bid for idx, bid in looped[a] if idx != script.index]
                    if others:
                        issues.append(
                            make_issue(
                                "action-not-stopped",
                                actor,
                                script,
                                [stmt.block_id],
                                {"actuator": a.value},
                                actuator=a.value,
                                looped_uses=others,
                            )
                        )
    return issues


def find_actuator_off_missing(project: Project, actuator: Actuator) -> list:
    pattern = off_missing_id(actuator)
    issues = []
    for actor in project.robots:
        ons, has_off = [], False
        for script in actor.scripts:
            for stmt, _ in walk(script.body):
                if activates(stmt, actuator, timed=False):
                    ons.append((script, stmt))
                has_off = has_off or deactivates(stmt, actuator)
        if not has_off:
            issues.extend(make_issue(pattern, actor, s, [stmt.block_id]) for s, stmt in ons)
    return issues


def find_colour_out_of_range(project: Project) -> list:
    issues = []
    for actor, script, stmt, _ in robot_statements(project):
        for i, comp in enumerate(colour_components(stmt)):
            if comp is not None and colour_out_of_range(comp):
                issues.append(
                    make_issue(
                        "colour-out-of-range", actor, script, [stmt.block_id], {"value": fmt_number(comp)}, component=i
                    )
                )
    return issues


def find_interrupted_loop_sensing(project: Project) -> list:
    """Loops that both query sensors and run time-limited statements or waits."""
    issues = []
    for actor, script, loop, _ in robot_statements(project):
        if not is_loop(loop):
            continue
        delayed = [
            s.block_id
            for s in body_statements(loop)
            if (is_timed(s) or is_wait(s)) and (time_value(s) is None or time_value(s) > 0)
        ]
        if not delayed:
            continue
        queries = sensor_reporters(loop.condition)
        for s in body_statements(loop):
            if is_conditional(s) or is_loop(s):
                queries.extend(sensor_reporters(s.condition))
        for rep in queries:
            issues.append(
                make_issue(
                    "interrupted-loop-sensing",
                    actor,
                    script,
                    [loop.block_id, rep.block_id],
                    {"sensor": rep.sensor.value},
                    timed_blocks=delayed,
                )
            )
    return issues


def find_low_motor_power(project: Project) -> list:
    return find_motor_verdict(project, LOW_POWER, devices=("mcore",))


def find_missing_loop_sensing(project: Project) -> list:
    issues = []
    for actor, script, stmt, ctx in robot_statements(project):
        if is_conditional(stmt) and not ctx.loops:
            sensors = sensor_refs(stmt.condition)
            if sensors:
                issues.append(
                    make_issue(
                        "missing-loop-sensing",
                        actor,
                        script,
                        [stmt.block_id],
                        {"sensor": sensors[0].value},
                        sensors=[s.value for s in sensors],
                    )
                )
    return issues


def find_motor_out_of_range(project: Project) -> list:
    return find_motor_verdict(project, OUT_OF_RANGE)


def find_parallel_actuator_use(project: Project) -> list:
    """Pairs of same-hat scripts touching the same actuator."""
    issues = []
    for actor in project.robots:
        for group in scripts_grouped_by_hat(actor):
            used = {}
            for script in group:
                stmts = [s for s, _ in walk(script.body)]
                used[script.index] = {a: [s.block_id for s in stmts if uses(s, a)] for a in ACTUATORS}
            for first, second in combinations(group, 2):
                for a in ACTUATORS:
                    ua, ub = used[first.index][a], used[second.index][a]
                    if ua and ub:
                        issues.append(
                            make_issue(
                                "parallel-actuator-use",
                                actor,
                                first,
                                [ua[0], ub[0]],
                                {"actuator": a.value},
                                actuator=a.value,
                                scripts=[first.index, second.index],
                            )
                        )
    return issues


def _mutates_variables(stmts) -> bool:
    return any(s.kind.family in (Family.VARIABLE_SET, Family.VARIABLE_CHANGE) for s in stmts)


def _queries_input(expr) -> bool:
    return bool(sensor_refs(expr)) or references_button(expr)


def find_query_in_loop(project: Project) -> list:
    """Sensor or button checks in loops without any waiting that change variables."""
    issues = []
    for actor, script, stmt, ctx in robot_statements(project):
        if stmt.kind.is_control("If", "IfElse") and ctx.loops:
            fires = not loop_has_time(ctx.loops[-1])
        elif stmt.kind.is_control("RepeatUntil"):
            fires = not loop_has_time(stmt)
        else:
            continue
        if fires and _queries_input(stmt.condition) and _mutates_variables(body_statements(stmt)):
            loop = ctx.loops[-1] if not is_loop(stmt) else stmt
            issues.append(make_issue("query-in-loop", actor, script, [stmt.block_id], loop=loop.block_id))
    return issues


def find_sensor_equals_check(project: Project) -> list:
    issues = []
    for actor, script, cmp in sensor_comparisons(project):
        verdict, _ = comparison_verdict(cmp, actor.device)
        if verdict == EQUALS_CHECK:
            issues.append(
                make_issue(
                    "sensor-equals-check",
                    actor,
                    script,
                    [cmp.node.block_id],
                    {"sensor": cmp.sensor.value, "value": fmt_number(cmp.literal)},
                    sensor=cmp.sensor.value,
                )
            )
    return issues


def find_several_launches(project: Project) -> list:
    issues = []
    for actor in project.robots:
        if actor.device != "mcore":
            continue
        launches = [s for s in actor.scripts if s.hat.event == "launch"]
        if len(launches) >= 2:
            issues.append(
                make_issue(
                    "several-launches",
                    actor,
                    None,
                    [s.hat.block_id for s in launches],
                    {"count": len(launches)},
                    count=len(launches),
                    scripts=[s.index for s in launches],
                )
            )
    return issues


def find_stuttering_action(project: Project) -> list:
    issues = []
    for actor, script, stmt, ctx in robot_statements(project):
        timed_motor = stmt.kind.family is Family.TIMED_MOVE or (
            stmt.kind.family is Family.TIMED_ACTUATOR and stmt.kind.actuator is Actuator.MOTOR
        )
        if timed_motor and ctx.loops:
            issues.append(make_issue("stuttering-action", actor, script, [stmt.block_id], loop=ctx.loops[-1].block_id))
    return issues


def find_useless_sensing(project: Project, sensor: Sensor) -> list:
    pattern = useless_sensing_id(sensor)
    issues = []
    for actor, script, cmp in sensor_comparisons(project):
        if cmp.sensor is not sensor:
            continue
        verdict, truth = comparison_verdict(cmp, actor.device)
        if verdict == USELESS:
            key = "false" if truth == ALWAYS_FALSE else "true"
            issues.append(
                make_issue(
                    pattern,
                    actor,
                    script,
                    [cmp.node.block_id],
                    {"value": fmt_number(cmp.literal)},
                    verdict=truth,
                    always=key,
                    op=cmp.op,
                    literal=cmp.literal,
                )
            )
    return issues


def find_waiting_aborted(project: Project) -> list:
    """Codey scripts that stop everything while another script waits in a timed block."""
    issues = []
    for actor in project.robots:
        if actor.device != "codey":
            continue
        timed = [(script.index, s.block_id) for script in actor.scripts for s, _ in walk(script.body) if is_timed(s)]
        for script in actor.scripts:
            stop = next((s for s, _ in walk(script.body) if s.kind.is_control("StopAll")), None)
            if stop is None:
                continue
            at_risk = [bid for idx, bid in timed if idx != script.index]
            if at_risk:
                issues.append(make_issue("waiting-aborted", actor, script, [stop.block_id], at_risk=at_risk))
                break
    return issues


def _per_actuator(finder):
    return lambda project: [i for a in ACTUATORS for i in finder(project, a)]


def _per_sensor(finder):
    return lambda project: [i for s in SENSORS for i in finder(project, s)]


FINDERS = (
    find_action_not_stopped,
    _per_actuator(find_actuator_off_missing),
    find_colour_out_of_range,
    find_interrupted_loop_sensing,
    find_low_motor_power,
    find_missing_loop_sensing,
    find_motor_out_of_range,
    find_parallel_actuator_use,
    find_query_in_loop,
    find_sensor_equals_check,
    find_several_launches,
    find_stuttering_action,
    _per_sensor(find_useless_sensing),
    find_waiting_aborted,
)
