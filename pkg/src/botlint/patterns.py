"""Stable pattern ids and their categories."""

import enum

from botlint.errors import UnknownPattern
from botlint.registry import Actuator, Sensor


class Category(str, enum.Enum):
    BUG = "BUG"
    SMELL = "SMELL"
    PERFUME = "PERFUME"


SENSORS = tuple(Sensor)
ACTUATORS = tuple(Actuator)


def off_missing_id(actuator: Actuator) -> str:
    return f"{actuator.slug}-off-missing"


def actuator_off_id(actuator: Actuator) -> str:
    return f"{actuator.slug}-off"


def useless_sensing_id(sensor: Sensor) -> str:
    return f"useless-{sensor.slug}-sensing"


def correct_sensing_id(sensor: Sensor) -> str:
    return f"{sensor.slug}-sensing"


BUG_IDS = tuple(
    sorted(
        [
            "action-not-stopped",
            *(off_missing_id(a) for a in ACTUATORS),
            "colour-out-of-range",
            "interrupted-loop-sensing",
            "low-motor-power",
            "missing-loop-sensing",
            "motor-out-of-range",
            "parallel-actuator-use",
            "query-in-loop",
            "sensor-equals-check",
            "several-launches",
            "stuttering-action",
            *(useless_sensing_id(s) for s in SENSORS),
            "waiting-aborted",
        ]
    )
)
SMELL_IDS = ("negative-motor-power", "noneffective-modification", "noneffective-time-limit")
PERFUME_IDS = tuple(
    sorted(
        [
            "colour-usage",
            *(correct_sensing_id(s) for s in SENSORS),
            *(actuator_off_id(a) for a in ACTUATORS),
            "loop-sensing",
            "motor-usage",
            "parallelisation",
        ]
    )
)
ALL_IDS = BUG_IDS + SMELL_IDS + PERFUME_IDS

_CATEGORY = {
    **{p: Category.BUG for p in BUG_IDS},
    **{p: Category.SMELL for p in SMELL_IDS},
    **{p: Category.PERFUME for p in PERFUME_IDS},
}

CATEGORY_GROUPS = {"bugs": Category.BUG, "smells": Category.SMELL, "perfumes": Category.PERFUME}


def category_of(pattern_id: str) -> Category:
    try:
        return _CATEGORY[pattern_id]
    except KeyError:
        raise UnknownPattern(pattern_id) from None


def ids_for(categories) -> tuple:
    wanted = set(categories)
    return tuple(p for p in ALL_IDS if _CATEGORY[p] in wanted)
