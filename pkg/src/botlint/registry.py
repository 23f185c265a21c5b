"""Opcode registry and the sensor/actuator value tables.

The registry maps raw opcode strings to semantic block kinds. It is loaded from
a JSON data file (``data/registry.json`` by default) so that vendor opcodes can
be mapped through the ``aliases`` column without touching code.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from botlint.errors import RegistryError, UnknownDevice

DEVICES = ("codey", "mcore")
ANY_DEVICE = "*"


class Family(str, enum.Enum):
    HAT = "Hat"
    ACTUATOR_ON = "ActuatorOn"
    ACTUATOR_OFF = "ActuatorOff"
    TIMED_ACTUATOR = "TimedActuator"
    MOVE = "Move"
    TIMED_MOVE = "TimedMove"
    SENSOR = "SensorReporter"
    BOOLEAN_SENSOR = "BooleanSensor"
    CONTROL = "Control"
    OPERATOR = "Operator"
    VARIABLE_SET = "VariableSet"
    VARIABLE_CHANGE = "VariableChange"
    VARIABLE = "Variable"
    UNKNOWN = "Unknown"


class Actuator(str, enum.Enum):
    LED = "LED"
    LIGHT = "Light"
    MATRIX = "Matrix"
    MOTOR = "Motor"

    @property
    def slug(self) -> str:
        return self.value.lower()


class Sensor(str, enum.Enum):
    BATTERY = "Battery"
    COLOUR = "Colour"
    DISTANCE = "Distance"
    AMBIENT_LIGHT = "AmbientLight"
    LINE = "Line"
    LOUDNESS = "Loudness"
    PITCH_ANGLE = "PitchAngle"
    POTENTIOMETER = "Potentiometer"
    ROLL_ANGLE = "RollAngle"
    SHAKING = "Shaking"

    @property
    def slug(self) -> str:
        return _SENSOR_SLUGS[self]


_SENSOR_SLUGS = {
    Sensor.BATTERY: "battery",
    Sensor.COLOUR: "colour",
    Sensor.DISTANCE: "distance",
    Sensor.AMBIENT_LIGHT: "light",
    Sensor.LINE: "line",
    Sensor.LOUDNESS: "loudness",
    Sensor.PITCH_ANGLE: "pitch-angle",
    Sensor.POTENTIOMETER: "potentiometer",
    Sensor.ROLL_ANGLE: "roll-angle",
    Sensor.SHAKING: "shaking",
}

CONTROL_VARIANTS = (
    "If",
    "IfElse",
    "Forever",
    "RepeatTimes",
    "RepeatUntil",
    "Wait",
    "WaitUntil",
    "StopAll",
    "StopOtherScripts",
    "StopThisScript",
)
OPERATOR_VARIANTS = ("Eq", "Gt", "Lt", "And", "Or", "Not", "Add", "Sub", "Mul", "Div", "Mod")
MOVE_DIRECTIONS = ("forward", "backward", "left", "right", "wheels", "motor")


@dataclass(frozen=True)
class BlockKind:
    """Semantic classification of a block.

    ``variant`` carries the event tag for hats, the control/operator variant,
    the move direction or the boolean-sensor kind, depending on ``family``.
    """

    family: Family
    actuator: Optional[Actuator] = None
    sensor: Optional[Sensor] = None
    variant: Optional[str] = None

    def to_json(self) -> dict:
        out: dict = {"family": self.family.value}
        if self.actuator is not None:
            out["actuator"] = self.actuator.value
        if self.sensor is not None:
            out["sensor"] = self.sensor.value
        if self.variant is not None:
            out["variant"] = self.variant
        return out

    @classmethod
    def from_json(cls, data: dict) -> "BlockKind":
        try:
            family = Family(data["family"])
            actuator = Actuator(data["actuator"]) if "actuator" in data else None
            sensor = Sensor(data["sensor"]) if "sensor" in data else None
        except (KeyError, ValueError) as exc:
            raise RegistryError(f"bad kind {data!r}: {exc}") from exc
        kind = cls(family, actuator, sensor, data.get("variant"))
        kind.validate()
        return kind

    def validate(self) -> None:
        f = self.family
        needs_actuator = f in (Family.ACTUATOR_ON, Family.ACTUATOR_OFF, Family.TIMED_ACTUATOR)
        if needs_actuator and self.actuator is None:
            raise RegistryError(f"{f.value} needs an actuator")
        if f is Family.SENSOR and self.sensor is None:
            raise RegistryError("SensorReporter needs a sensor")
        if f is Family.CONTROL and self.variant not in CONTROL_VARIANTS:
            raise RegistryError(f"unknown control variant {self.variant!r}")
        if f is Family.OPERATOR and self.variant not in OPERATOR_VARIANTS:
            raise RegistryError(f"unknown operator variant {self.variant!r}")
        if f in (Family.MOVE, Family.TIMED_MOVE) and self.variant not in MOVE_DIRECTIONS:
            raise RegistryError(f"unknown move direction {self.variant!r}")
        if f is Family.HAT and not self.variant:
            raise RegistryError("Hat needs an event tag")

    # convenience predicates used all over the finders
    def is_control(self, *variants: str) -> bool:
        return self.family is Family.CONTROL and (not variants or self.variant in variants)

    def is_operator(self, *variants: str) -> bool:
        return self.family is Family.OPERATOR and (not variants or self.variant in variants)


UNKNOWN = BlockKind(Family.UNKNOWN)

# Slot roles a registry row may bind. Values are lists of input slot names.
SLOT_ROLES = ("power", "time", "colour", "condition", "substacks", "operands", "times", "value")

_REQUIRED_SLOTS = {
    Family.TIMED_ACTUATOR: ("time",),
    Family.MOVE: ("power",),
    Family.TIMED_MOVE: ("power", "time"),
}
_REQUIRED_CONTROL_SLOTS = {
    "If": ("condition", "substacks"),
    "IfElse": ("condition", "substacks"),
    "Forever": ("substacks",),
    "RepeatTimes": ("times", "substacks"),
    "RepeatUntil": ("condition", "substacks"),
    "Wait": ("time",),
    "WaitUntil": ("condition",),
}


@dataclass(frozen=True)
class RegistryEntry:
    opcode: str
    kind: BlockKind
    devices: frozenset
    slots: dict = field(default_factory=dict, hash=False, compare=True)
    aliases: tuple = ()
    # field name -> {field value -> control variant}, used by vendor "stop" blocks
    variant_field: Optional[dict] = field(default=None, hash=False)
    # field that distinguishes independent targets of one actuator (e.g. LED position)
    target_field: Optional[str] = None

    def __post_init__(self):
        required = _REQUIRED_SLOTS.get(self.kind.family, ())
        if self.kind.family is Family.CONTROL:
            required = _REQUIRED_CONTROL_SLOTS.get(self.kind.variant, ())
        missing = [role for role in required if not self.slots.get(role)]
        if missing:
            raise RegistryError(f"{self.opcode}: missing slot bindings {missing}")
        unknown = set(self.slots) - set(SLOT_ROLES)
        if unknown:
            raise RegistryError(f"{self.opcode}: unknown slot roles {sorted(unknown)}")

    def applies_to(self, device: Optional[str]) -> bool:
        return ANY_DEVICE in self.devices or device in self.devices

    def to_json(self) -> dict:
        row = {
            "opcode": self.opcode,
            "kind": self.kind.to_json(),
            "devices": sorted(self.devices),
        }
        if self.slots:
            row["slots"] = {k: list(v) for k, v in self.slots.items()}
        if self.aliases:
            row["aliases"] = list(self.aliases)
        if self.variant_field:
            row["variant_field"] = self.variant_field
        if self.target_field:
            row["target_field"] = self.target_field
        return row

    @classmethod
    def from_json(cls, row: dict) -> "RegistryEntry":
        try:
            opcode = row["opcode"]
            kind = BlockKind.from_json(row["kind"])
        except KeyError as exc:
            raise RegistryError(f"registry row lacks {exc}: {row!r}") from exc
        slots = {role: tuple(names) for role, names in row.get("slots", {}).items()}
        return cls(
            opcode=opcode,
            kind=kind,
            devices=frozenset(row.get("devices", [ANY_DEVICE])),
            slots=slots,
            aliases=tuple(row.get("aliases", ())),
            variant_field=row.get("variant_field"),
            target_field=row.get("target_field"),
        )


class Registry:
    """Immutable opcode table."""

    def __init__(self, entries: Iterable[RegistryEntry]):
        self.entries: tuple[RegistryEntry, ...] = tuple(entries)
        self._by_opcode: dict[str, list[RegistryEntry]] = {}
        for entry in self.entries:
            for name in (entry.opcode, *entry.aliases):
                self._by_opcode.setdefault(name, []).append(entry)

    def lookup(self, opcode: str, device: Optional[str]) -> Optional[RegistryEntry]:
        for entry in self._by_opcode.get(opcode, ()):
            if entry.applies_to(device):
                return entry
        return None

    def classify(self, opcode: str, device: Optional[str] = None, fields: Optional[dict] = None) -> BlockKind:
        entry = self.lookup(opcode, device)
        if entry is None:
            return UNKNOWN
        return resolve_kind(entry, fields)

    def to_json(self) -> list:
        return [entry.to_json() for entry in self.entries]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, rows: list) -> "Registry":
        if not isinstance(rows, list):
            raise RegistryError("registry file must hold a JSON list of rows")
        return cls(RegistryEntry.from_json(row) for row in rows)

    @classmethod
    def load(cls, path: Optional[str | Path] = None) -> "Registry":
        if path is None:
            text = resources.files("botlint.data").joinpath("registry.json").read_text("utf-8")
        else:
            text = Path(path).read_text("utf-8")
        try:
            rows = json.loads(text)
        except json.JSONDecodeError as exc:
            raise RegistryError(f"registry is not valid JSON: {exc}") from exc
        return cls.from_json(rows)


def resolve_kind(entry: RegistryEntry, fields: Optional[dict]) -> BlockKind:
    if entry.variant_field and fields:
        name = entry.variant_field["field"]
        variant = entry.variant_field["map"].get(str(fields.get(name, "")).strip().lower())
        if variant:
            return BlockKind(Family.CONTROL, variant=variant)
    return entry.kind


_default: Optional[Registry] = None


def default_registry() -> Registry:
    global _default
    if _default is None:
        _default = Registry.load()
    return _default


# ---------------------------------------------------------------------------
# value ranges


@dataclass(frozen=True)
class SensorRange:
    lo: float
    hi: float
    discrete: bool = False

    def __iter__(self):
        return iter((self.lo, self.hi, self.discrete))


_SENSOR_RANGES = {
    Sensor.BATTERY: SensorRange(0, 100),
    Sensor.COLOUR: SensorRange(0, 255),
    Sensor.DISTANCE: SensorRange(3, 400),
    Sensor.LINE: SensorRange(0, 3, discrete=True),
    Sensor.LOUDNESS: SensorRange(0, 100),
    Sensor.PITCH_ANGLE: SensorRange(-180, 180),
    Sensor.POTENTIOMETER: SensorRange(0, 100),
    Sensor.ROLL_ANGLE: SensorRange(-90, 90),
    Sensor.SHAKING: SensorRange(0, 100),
}
_AMBIENT_LIGHT = {"codey": SensorRange(0, 100), "mcore": SensorRange(0, 1020)}


def sensor_range(sensor: Sensor, device: str) -> SensorRange:
    """Valid reading range of ``sensor`` on ``device`` as ``(lo, hi, discrete)``."""
    if device not in DEVICES:
        raise UnknownDevice(device)
    if sensor is Sensor.AMBIENT_LIGHT:
        return _AMBIENT_LIGHT[device]
    return _SENSOR_RANGES[Sensor(sensor)]


@dataclass(frozen=True)
class MotorSpec:
    min_effective: float
    max: float = 100


_MOTOR_SPECS = {"mcore": MotorSpec(25), "codey": MotorSpec(0)}


def motor_spec(device: str) -> MotorSpec:
    if device not in DEVICES:
        raise UnknownDevice(device)
    return _MOTOR_SPECS[device]


COLOUR_MIN, COLOUR_MAX = 0, 255
