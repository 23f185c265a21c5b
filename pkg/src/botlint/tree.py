"""Typed AST of a robot project, a depth-first visitor, and semantic helpers.

The tree keeps every source block id so findings can be located again in the
editor. Hats start scripts; top-level chains without a hat are kept as loose
blocks (metrics count them, finders ignore them).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

from botlint.ingest import BlockRef, IngestWarning, Literal, RawProject, RawTarget, VarRef
from botlint.registry import (
    DEVICES,
    Actuator,
    BlockKind,
    Family,
    Registry,
    Sensor,
    default_registry,
)

LOOP_VARIANTS = ("Forever", "RepeatTimes", "RepeatUntil")
CONDITIONAL_VARIANTS = ("If", "IfElse", "WaitUntil")
DECISION_VARIANTS = ("If", "IfElse", "RepeatTimes", "RepeatUntil", "Forever", "WaitUntil")
COMPARISON_OPS = ("Eq", "Gt", "Lt")

# ---------------------------------------------------------------------------
# expressions


@dataclass(eq=False)
class Expr:
    block_id: Optional[str]
    # False for literals and shadow menus; only real blocks count as blocks
    from_block: bool = True

    def children(self) -> tuple:
        return ()


@dataclass(eq=False)
class NumberLit(Expr):
    value: Optional[float] = None  # None when the text is not numeric
    text: str = ""


@dataclass(eq=False)
class StringLit(Expr):
    text: str = ""


@dataclass(eq=False)
class ColourLit(Expr):
    components: tuple = ()
    text: str = ""


@dataclass(eq=False)
class VariableRef(Expr):
    name: str = ""


@dataclass(eq=False)
class SensorReporter(Expr):
    sensor: Sensor = Sensor.DISTANCE
    opcode: str = ""


@dataclass(eq=False)
class BooleanSensor(Expr):
    variant: str = ""
    opcode: str = ""


@dataclass(eq=False)
class Binary(Expr):
    op: str = ""
    lhs: Optional[Expr] = None
    rhs: Optional[Expr] = None

    def children(self) -> tuple:
        return tuple(e for e in (self.lhs, self.rhs) if e is not None)


@dataclass(eq=False)
class Not(Expr):
    operand: Optional[Expr] = None

    def children(self) -> tuple:
        return (self.operand,) if self.operand is not None else ()


@dataclass(eq=False)
class UnknownExpr(Expr):
    opcode: str = ""
    args: dict = field(default_factory=dict)

    def children(self) -> tuple:
        return tuple(e for e in self.args.values() if e is not None)


# ---------------------------------------------------------------------------
# statements and containers


@dataclass(eq=False)
class Stmt:
    block_id: str
    opcode: str
    kind: BlockKind
    args: dict = field(default_factory=dict)  # input slot -> Expr (substacks excluded)
    fields: dict = field(default_factory=dict)
    bodies: list = field(default_factory=list)  # nested statement lists, in slot order
    slots: dict = field(default_factory=dict)  # role -> tuple of slot names
    target: Optional[str] = None  # value of the registry's target field, e.g. an LED position

    def _slot_args(self, role: str) -> list:
        return [self.args.get(name) for name in self.slots.get(role, ())]

    @property
    def condition(self) -> Optional[Expr]:
        found = self._slot_args("condition")
        return found[0] if found else None

    @property
    def time_arg(self) -> Optional[Expr]:
        found = self._slot_args("time")
        return found[0] if found else None

    @property
    def power_args(self) -> list:
        return self._slot_args("power")

    @property
    def colour_args(self) -> list:
        return self._slot_args("colour")

    def exprs(self) -> list:
        return [e for e in self.args.values() if e is not None]


@dataclass(eq=False)
class Hat:
    block_id: str
    opcode: str
    kind: BlockKind
    fields: dict = field(default_factory=dict)
    args: dict = field(default_factory=dict)

    @property
    def event(self) -> str:
        return self.kind.variant or ""

    def key(self) -> tuple:
        """Identity used for "same hat block": opcode plus field values."""
        return (self.opcode, tuple(sorted(self.fields.items())))


@dataclass(eq=False)
class Script:
    actor: str
    index: int
    hat: Hat
    body: list = field(default_factory=list)

    @property
    def id(self) -> tuple:
        return (self.actor, self.index)


@dataclass(eq=False)
class Actor:
    name: str
    device: Optional[str] = None  # "codey" | "mcore" for robot actors
    raw_device: Optional[str] = None
    is_stage: bool = False
    scripts: list = field(default_factory=list)
    loose_blocks: list = field(default_factory=list)

    @property
    def is_robot(self) -> bool:
        return self.device is not None


@dataclass(eq=False)
class Project:
    actors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    source_path: Optional[str] = None

    @property
    def robots(self) -> list:
        return [a for a in self.actors if a.is_robot]


# ---------------------------------------------------------------------------
# building


def build_ast(raw: RawProject, registry: Optional[Registry] = None) -> Project:
    registry = registry or default_registry()
    project = Project(warnings=list(raw.warnings), source_path=raw.source_path)
    for target in raw.targets:
        builder = _TargetBuilder(target, registry, project.warnings)
        project.actors.append(builder.build())
    return project


class _TargetBuilder:
    def __init__(self, target: RawTarget, registry: Registry, warnings: list):
        self.target = target
        self.blocks = target.blocks
        self.registry = registry
        self.warnings = warnings
        device = target.device.lower() if target.device else None
        self.device = device if device in DEVICES else None
        self.seen: set = set()

    def warn(self, block_id: str, message: str) -> None:
        self.warnings.append(IngestWarning(block_id, message, self.target.name))

    def build(self) -> Actor:
        t = self.target
        actor = Actor(name=t.name, device=self.device, raw_device=t.device, is_stage=t.is_stage)
        for block in self._roots():
            kind = self.registry.classify(block.opcode, self.device, block.fields)
            if kind.family is Family.HAT:
                self.seen.add(block.block_id)
                hat = Hat(
                    block.block_id,
                    block.opcode,
                    kind,
                    dict(block.fields),
                    {s: self._expr(v, block.block_id) for s, v in block.inputs.items() if v is not None},
                )
                script = Script(t.name, len(actor.scripts), hat, self._chain(block.next))
                actor.scripts.append(script)
            else:
                actor.loose_blocks.extend(self._chain(block.block_id))
        return actor

    def _roots(self) -> list:
        referenced = set()
        for b in self.blocks.values():
            if b.next:
                referenced.add(b.next)
            referenced.update(v.block_id for v in b.inputs.values() if isinstance(v, BlockRef))
        return [
            b
            for b in self.blocks.values()
            if not b.shadow and (b.top_level or (b.parent is None and b.block_id not in referenced))
        ]

    def _chain(self, start: Optional[str]) -> list:
        out = []
        block_id = start
        while block_id is not None:
            if block_id in self.seen:
                self.warn(block_id, "block reached twice (cycle or shared link); chain cut")
                break
            self.seen.add(block_id)
            block = self.blocks[block_id]
            out.append(self._stmt(block))
            block_id = block.next
        return out

    def _stmt(self, block) -> Stmt:
        entry = self.registry.lookup(block.opcode, self.device)
        kind = self.registry.classify(block.opcode, self.device, block.fields)
        slots = dict(entry.slots) if entry is not None else {}
        substacks = slots.get("substacks", ())
        args = {}
        for slot, value in block.inputs.items():
            if slot in substacks or value is None:
                continue
            args[slot] = self._expr(value, block.block_id)
        bodies = []
        for slot in substacks:
            ref = block.inputs.get(slot)
            bodies.append(self._chain(ref.block_id) if isinstance(ref, BlockRef) else [])
        target = None
        if entry is not None and entry.target_field:
            target = block.fields.get(entry.target_field)
        return Stmt(block.block_id, block.opcode, kind, args, dict(block.fields), bodies, slots, target)

    def _expr(self, value, owner: str) -> Optional[Expr]:
        if isinstance(value, Literal):
            return literal_expr(value, owner)
        if isinstance(value, VarRef):
            return VariableRef(owner, from_block=False, name=value.name)
        if not isinstance(value, BlockRef):
            return None
        block_id = value.block_id
        if block_id in self.seen:
            self.warn(block_id, "reporter reached twice; replaced by unknown value")
            return UnknownExpr(block_id, opcode="")
        self.seen.add(block_id)
        block = self.blocks[block_id]
        if block.shadow:
            return self._shadow_literal(block)
        kind = self.registry.classify(block.opcode, self.device, block.fields)
        entry = self.registry.lookup(block.opcode, self.device)
        f = kind.family
        if f is Family.SENSOR:
            return SensorReporter(block_id, sensor=kind.sensor, opcode=block.opcode)
        if f is Family.BOOLEAN_SENSOR:
            return BooleanSensor(block_id, variant=kind.variant or "", opcode=block.opcode)
        if f is Family.VARIABLE:
            return VariableRef(block_id, name=block.fields.get("VARIABLE", ""))
        if f is Family.OPERATOR and entry is not None:
            operands = [self._expr(block.inputs.get(s), block_id) for s in entry.slots.get("operands", ())]
            if kind.variant == "Not":
                return Not(block_id, operand=operands[0] if operands else None)
            lhs = operands[0] if operands else None
            rhs = operands[1] if len(operands) > 1 else None
            return Binary(block_id, op=kind.variant, lhs=lhs, rhs=rhs)
        if kind.family not in (Family.UNKNOWN, Family.OPERATOR):
            self.warn(block_id, f"statement block {block.opcode!r} used as a value")
        args = {s: self._expr(v, block_id) for s, v in block.inputs.items() if v is not None}
        return UnknownExpr(block_id, opcode=block.opcode, args=args)

    def _shadow_literal(self, block) -> Expr:
        for value in block.inputs.values():
            if isinstance(value, Literal):
                return literal_expr(value, block.block_id)
        text = next(iter(block.fields.values()), "")
        kind = "colour" if "colour" in block.opcode or "color" in block.opcode else "string"
        if _to_number(text) is not None and kind == "string":
            kind = "number"
        return literal_expr(Literal(kind, text), block.block_id)


_HEX = re.compile(r"^#?([0-9a-fA-F]{6})$")


def _to_number(text) -> Optional[float]:
    try:
        value = float(str(text).strip())
    except (TypeError, ValueError):
        return None
    if value != value or value in (float("inf"), float("-inf")):
        return None
    return value


def literal_expr(lit: Literal, owner: Optional[str]) -> Expr:
    if lit.kind == "number":
        return NumberLit(owner, from_block=False, value=_to_number(lit.text), text=lit.text)
    if lit.kind == "colour":
        m = _HEX.match(lit.text.strip())
        if m:
            packed = m.group(1)
            comps = tuple(float(int(packed[i : i + 2], 16)) for i in (0, 2, 4))
            return ColourLit(owner, from_block=False, components=comps, text=lit.text)
        num = _to_number(lit.text)
        comps = (num,) if num is not None else ()
        return ColourLit(owner, from_block=False, components=comps, text=lit.text)
    return StringLit(owner, from_block=False, text=lit.text)


# ---------------------------------------------------------------------------
# traversal


@dataclass(frozen=True)
class Context:
    actor: Optional[Actor] = None
    script: Optional[Script] = None
    loops: tuple = ()  # enclosing loop statements, outermost first
    ancestors: tuple = ()  # all enclosing statements, outermost first
    owner: Optional[Stmt] = None  # statement whose input holds the visited expression


class Visitor:
    """Base visitor; override the hooks you need. Children are walked by ``traverse``."""

    def visit_actor(self, actor: Actor, ctx: Context) -> None:
        pass

    def visit_script(self, script: Script, ctx: Context) -> None:
        pass

    def visit_hat(self, hat: Hat, ctx: Context) -> None:
        pass

    def visit_stmt(self, stmt: Stmt, ctx: Context) -> None:
        pass

    def visit_expr(self, expr: Expr, ctx: Context) -> None:
        pass


def traverse(project: Project, visitor: Visitor) -> Visitor:
    """Depth-first, document-order walk over every node of ``project``."""
    for actor in project.actors:
        actor_ctx = Context(actor=actor)
        visitor.visit_actor(actor, actor_ctx)
        for script in actor.scripts:
            ctx = replace(actor_ctx, script=script)
            visitor.visit_script(script, ctx)
            visitor.visit_hat(script.hat, ctx)
            for expr in script.hat.args.values():
                if expr is not None:
                    _visit_exprs(expr, ctx, visitor)
            _visit_stmts(script.body, ctx, visitor)
        _visit_stmts(actor.loose_blocks, actor_ctx, visitor)
    return visitor


def _visit_stmts(stmts: list, ctx: Context, visitor: Visitor) -> None:
    for stmt, sctx in walk(stmts, ctx):
        visitor.visit_stmt(stmt, sctx)
        owner_ctx = replace(sctx, owner=stmt)
        for expr in stmt.exprs():
            _visit_exprs(expr, owner_ctx, visitor)


def _visit_exprs(expr: Expr, ctx: Context, visitor: Visitor) -> None:
    for node in iter_expr(expr):
        visitor.visit_expr(node, ctx)


def walk(stmts: list, ctx: Context = Context()) -> Iterator[tuple]:
    """Yield ``(stmt, context)`` for every statement, nested bodies included, in document order."""
    stack = [(iter(stmts), ctx)]
    while stack:
        it, cur = stack[-1]
        stmt = next(it, None)
        if stmt is None:
            stack.pop()
            continue
        yield stmt, cur
        if stmt.bodies:
            inner = replace(
                cur,
                ancestors=cur.ancestors + (stmt,),
                loops=cur.loops + ((stmt,) if is_loop(stmt) else ()),
            )
            # pushed in reverse so the first body ends up on top
            for body in reversed(stmt.bodies):
                stack.append((iter(body), inner))


def iter_expr(expr: Optional[Expr]) -> Iterator[Expr]:
    """Pre-order walk over an expression tree."""
    if expr is None:
        return
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def walk_script(script: Script, actor: Optional[Actor] = None) -> Iterator[tuple]:
    return walk(script.body, Context(actor=actor, script=script))


# ---------------------------------------------------------------------------
# semantic queries


def is_loop(stmt: Stmt) -> bool:
    return stmt.kind.is_control(*LOOP_VARIANTS)


def is_conditional(stmt: Stmt) -> bool:
    return stmt.kind.is_control(*CONDITIONAL_VARIANTS)


def is_wait(stmt: Stmt) -> bool:
    return stmt.kind.is_control("Wait")


def is_timed(stmt: Stmt) -> bool:
    """Time-limited statement: activation, waiting and deactivation in one block."""
    return stmt.kind.family in (Family.TIMED_ACTUATOR, Family.TIMED_MOVE)


def is_stop_scripts(stmt: Stmt) -> bool:
    return stmt.kind.is_control("StopAll", "StopOtherScripts")


def actuator_of(stmt: Stmt) -> Optional[Actuator]:
    f = stmt.kind.family
    if f in (Family.MOVE, Family.TIMED_MOVE):
        return Actuator.MOTOR
    if f in (Family.ACTUATOR_ON, Family.ACTUATOR_OFF, Family.TIMED_ACTUATOR):
        return stmt.kind.actuator
    return None


def is_activation(stmt: Stmt, actuator: Optional[Actuator] = None, timed: Optional[bool] = None) -> bool:
    """True for blocks switching an actuator on; ``timed`` filters timed/untimed variants."""
    if stmt.kind.family not in (Family.ACTUATOR_ON, Family.MOVE, Family.TIMED_ACTUATOR, Family.TIMED_MOVE):
        return False
    if actuator is not None and actuator_of(stmt) is not actuator:
        return False
    return timed is None or is_timed(stmt) == timed


def is_deactivation(stmt: Stmt, actuator: Optional[Actuator] = None) -> bool:
    return stmt.kind.family is Family.ACTUATOR_OFF and (actuator is None or stmt.kind.actuator is actuator)


def sensor_reporters(expr: Optional[Expr]) -> list:
    return [e for e in iter_expr(expr) if isinstance(e, SensorReporter)]


def sensor_refs(expr: Optional[Expr]) -> list:
    """Sensors read anywhere inside ``expr``, operators included."""
    return [e.sensor for e in sensor_reporters(expr)]


def references_button(expr: Optional[Expr]) -> bool:
    return any(isinstance(e, BooleanSensor) for e in iter_expr(expr))


def enclosing_loops(ctx: Context) -> tuple:
    return ctx.loops


def literal_number(expr: Optional[Expr]) -> Optional[float]:
    if isinstance(expr, NumberLit):
        return expr.value
    if isinstance(expr, StringLit):
        return _to_number(expr.text)
    if isinstance(expr, ColourLit) and len(expr.components) == 1:
        return expr.components[0]
    return None


def time_value(stmt: Stmt) -> Optional[float]:
    return literal_number(stmt.time_arg)


def colour_components(stmt: Stmt) -> list:
    """Numeric colour components of ``stmt``; ``None`` marks a non-literal component."""
    out = []
    for expr in stmt.colour_args:
        if expr is None:  # slot missing or its input was dropped
            out.append(None)
        elif isinstance(expr, ColourLit):
            out.extend(expr.components if expr.components else [None])
        else:
            out.append(literal_number(expr))
    return out


def scripts_grouped_by_hat(actor: Actor) -> list:
    """Scripts of ``actor`` grouped by identical hat (opcode and fields), first-seen order."""
    groups: dict = {}
    for script in actor.scripts:
        groups.setdefault(script.hat.key(), []).append(script)
    return list(groups.values())


def statements(script: Script) -> list:
    return [s for s, _ in walk(script.body)]


def comparisons(expr: Optional[Expr]) -> list:
    return [e for e in iter_expr(expr) if isinstance(e, Binary) and e.op in COMPARISON_OPS]
