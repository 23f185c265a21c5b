"""Helpers shared by the bug, smell and perfume finders.

Motor-power literals and sensor comparisons are each judged by a single
verdict function here, so the finders that split them between bugs, smells
and perfumes cannot disagree about the partition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from botlint.registry import COLOUR_MAX, COLOUR_MIN, Actuator, Family, Sensor, motor_spec, sensor_range
from botlint.reporting import Issue
from botlint.tree import (
    Actor,
    Binary,
    Context,
    Project,
    Script,
    SensorReporter,
    Stmt,
    actuator_of,
    comparisons,
    is_activation,
    is_deactivation,
    is_timed,
    is_wait,
    literal_number,
    walk,
)


def robot_scripts(project: Project) -> Iterator[tuple]:
    for actor in project.robots:
        for script in actor.scripts:
            yield actor, script


def robot_statements(project: Project) -> Iterator[tuple]:
    """``(actor, script, stmt, ctx)`` over every statement in robot scripts."""
    for actor, script in robot_scripts(project):
        for stmt, ctx in walk(script.body, Context(actor=actor, script=script)):
            yield actor, script, stmt, ctx


def make_issue(pattern_id: str, actor: Actor, script: Optional[Script], blocks, params=None, **metadata) -> Issue:
    return Issue(
        pattern_id=pattern_id,
        actor=actor.name,
        script=None if script is None else script.index,
        block_ids=tuple(blocks),
        params=dict(params or {}),
        metadata=metadata,
    )


def fmt_number(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def body_statements(stmt: Stmt) -> list:
    """All statements nested anywhere inside ``stmt``'s bodies."""
    out = []
    for body in stmt.bodies:
        out.extend(s for s, _ in walk(body))
    return out


# ---------------------------------------------------------------------------
# actuator usage


def is_stop_idiom(stmt: Stmt) -> bool:
    """An untimed move whose powers are all literal 0 stops the motors."""
    if stmt.kind.family is not Family.MOVE:
        return False
    powers = [literal_number(e) for e in stmt.power_args]
    return bool(powers) and all(p == 0 for p in powers)


def activates(stmt: Stmt, actuator: Actuator, timed: Optional[bool] = None) -> bool:
    return is_activation(stmt, actuator, timed) and not is_stop_idiom(stmt)


def deactivates(stmt: Stmt, actuator: Actuator) -> bool:
    return is_deactivation(stmt, actuator) or (actuator is Actuator.MOTOR and is_stop_idiom(stmt))


def uses(stmt: Stmt, actuator: Actuator) -> bool:
    return actuator_of(stmt) is actuator


# ---------------------------------------------------------------------------
# motor power partition

OUT_OF_RANGE = "motor-out-of-range"
LOW_POWER = "low-motor-power"
NEGATIVE = "negative-motor-power"
USAGE = "motor-usage"


def motor_verdict(power: Optional[float], device: str) -> Optional[str]:
    """Which single pattern a motor power literal belongs to (None: no pattern).

    Precedence: out of range, then low power (mBot only), then negative, then
    regular usage. Zero and non-literal powers belong to nothing.
    """
    if power is None or power == 0:
        return None
    spec = motor_spec(device)
    if abs(power) > spec.max:
        return OUT_OF_RANGE
    if spec.min_effective > 0 and abs(power) < spec.min_effective:
        return LOW_POWER
    if power < 0:
        return NEGATIVE
    if spec.min_effective <= power <= spec.max:
        return USAGE
    return None


def motor_literals(project: Project) -> Iterator[tuple]:
    """``(actor, script, stmt, power)`` for every literal motor power."""
    for actor, script, stmt, _ in robot_statements(project):
        for expr in stmt.power_args:
            power = literal_number(expr)
            if power is not None:
                yield actor, script, stmt, power


def find_motor_verdict(project: Project, verdict: str, devices=("codey", "mcore")) -> list:
    issues = []
    for actor, script, stmt, power in motor_literals(project):
        if actor.device in devices and motor_verdict(power, actor.device) == verdict:
            issues.append(make_issue(verdict, actor, script, [stmt.block_id], {"value": fmt_number(power)}, power=power))
    return issues


# ---------------------------------------------------------------------------
# colour literals


def colour_out_of_range(component: float) -> bool:
    return component < COLOUR_MIN or component > COLOUR_MAX


def colour_valid(component: Optional[float]) -> bool:
    return component is not None and float(component).is_integer() and COLOUR_MIN <= component <= COLOUR_MAX


# ---------------------------------------------------------------------------
# sensor comparisons

ALWAYS_TRUE = "alwaysTrue"
ALWAYS_FALSE = "alwaysFalse"
SATISFIABLE = "satisfiable"

_FLIP = {"Gt": "Lt", "Lt": "Gt", "Eq": "Eq"}


@dataclass(frozen=True)
class SensorComparison:
    node: Binary
    reporter: SensorReporter
    op: str  # with the sensor on the left-hand side
    literal: float

    @property
    def sensor(self) -> Sensor:
        return self.reporter.sensor


def as_sensor_comparison(node: Binary) -> Optional[SensorComparison]:
    lhs, rhs = node.lhs, node.rhs
    if isinstance(lhs, SensorReporter) and not isinstance(rhs, SensorReporter):
        value = literal_number(rhs)
        if value is not None:
            return SensorComparison(node, lhs, node.op, value)
    if isinstance(rhs, SensorReporter) and not isinstance(lhs, SensorReporter):
        value = literal_number(lhs)
        if value is not None:
            return SensorComparison(node, rhs, _FLIP[node.op], value)
    return None


def truth_over_range(sensor: Sensor, device: str, op: str, c: float) -> str:
    """Whether ``sensor <op> c`` holds always, never, or sometimes over the valid range."""
    lo, hi, _ = sensor_range(sensor, device)
    if op == "Gt":
        if c >= hi:
            return ALWAYS_FALSE
        if c < lo:
            return ALWAYS_TRUE
        return SATISFIABLE
    if op == "Lt":
        if c <= lo:
            return ALWAYS_FALSE
        if c > hi:
            return ALWAYS_TRUE
        return SATISFIABLE
    if op == "Eq":
        # readings are judged on the integer grid, so a fractional literal never matches
        if c < lo or c > hi or not float(c).is_integer():
            return ALWAYS_FALSE
        return SATISFIABLE
    raise ValueError(op)


USELESS = "useless"
EQUALS_CHECK = "equals-check"
CORRECT = "correct"


def comparison_verdict(cmp: SensorComparison, device: str) -> tuple:
    """``(verdict, truth)`` with verdict one of useless / equals-check / correct."""
    truth = truth_over_range(cmp.sensor, device, cmp.op, cmp.literal)
    if truth != SATISFIABLE:
        return USELESS, truth
    if cmp.op == "Eq" and cmp.sensor is not Sensor.LINE:
        return EQUALS_CHECK, truth
    return CORRECT, truth


def sensor_comparisons(project: Project) -> Iterator[tuple]:
    """``(actor, script, SensorComparison)`` for every sensor-vs-literal comparison in robot code."""
    for actor, script, stmt, _ in robot_statements(project):
        for expr in stmt.exprs():
            for node in comparisons(expr):
                cmp = as_sensor_comparison(node)
                if cmp is not None:
                    yield actor, script, cmp


def loop_has_time(loop: Stmt) -> bool:
    """Loop body holds a wait or a time-limited statement."""
    return any(is_timed(s) or is_wait(s) for s in body_statements(loop))
