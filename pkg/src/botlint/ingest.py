"""Loading project containers into raw block graphs.

A container is either a bare ``project.json`` or a zip archive holding one.
The JSON layout follows the sb3 conventions (``targets`` with a ``blocks``
map); see the README for the accepted input wrappers.
"""

from __future__ import annotations

import io
import json
import logging
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from botlint.errors import CorruptContainer, InvalidProject, MalformedJson, NoProjectEntry, NotFound

log = logging.getLogger(__name__)

FORMAT_TAG = "botlint-1"

# sb3 primitive type codes
_NUMBER_CODES = {4, 5, 6, 7, 8}
_COLOUR_CODE = 9
_TEXT_CODES = {10, 11}
_VARIABLE_CODE = 12
_LIST_CODE = 13
_TAGS = {"number", "string", "colour", "color", "block", "variable", "list", "broadcast"}


@dataclass(frozen=True)
class Literal:
    kind: str  # number | string | colour
    text: str


@dataclass(frozen=True)
class BlockRef:
    block_id: str


@dataclass(frozen=True)
class VarRef:
    name: str


InputValue = Union[Literal, BlockRef, VarRef]


@dataclass
class RawBlock:
    block_id: str
    opcode: str
    next: Optional[str] = None
    parent: Optional[str] = None
    top_level: bool = False
    inputs: dict = field(default_factory=dict)  # slot -> InputValue
    fields: dict = field(default_factory=dict)  # name -> str
    shadow: bool = False


@dataclass
class IngestWarning:
    block_id: str
    message: str
    target: str = ""

    def to_json(self) -> dict:
        return {"target": self.target, "block": self.block_id, "message": self.message}


@dataclass
class RawTarget:
    name: str
    is_stage: bool = False
    device: Optional[str] = None
    blocks: dict = field(default_factory=dict)  # id -> RawBlock, document order
    warnings: list = field(default_factory=list)


@dataclass
class RawProject:
    targets: list
    source_path: Optional[str] = None

    @property
    def warnings(self) -> list:
        return [w for t in self.targets for w in t.warnings]


def load_container(path: Union[str, Path]) -> RawProject:
    """Read a ``.json`` or ``.zip`` container and return the decoded project."""
    path = Path(path)
    if not path.is_file():
        raise NotFound(f"{path}: no such file")
    data = path.read_bytes()
    if zipfile.is_zipfile(io.BytesIO(data)):
        data = _project_entry(path, data)
    elif path.suffix.lower() in (".zip", ".sb3", ".mblock"):
        raise CorruptContainer(f"{path}: not a readable zip archive")
    return parse_project(data, source_path=str(path))


def _project_entry(path: Path, data: bytes) -> bytes:
    try:
        with zipfile.ZipFile(io.BytesIO(data)) as zf:
            names = [n for n in zf.namelist() if n.rsplit("/", 1)[-1] == "project.json"]
            if not names:
                raise NoProjectEntry(f"{path}: archive has no project.json")
            # breadth-first: shallowest entry wins, archive order breaks ties
            best = min(names, key=lambda n: n.count("/"))
            return zf.read(best)
    except (zipfile.BadZipFile, OSError, EOFError) as exc:
        raise CorruptContainer(f"{path}: {exc}") from exc


def parse_project(data: Union[bytes, str, dict, list], source_path: Optional[str] = None) -> RawProject:
    if isinstance(data, (dict, list)):
        doc = data
    else:
        if isinstance(data, bytes):
            try:
                text = data.decode("utf-8-sig")
            except UnicodeDecodeError as exc:
                raise MalformedJson(source_path, exc.start, "not UTF-8") from exc
        else:
            text = data
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            offset = len(text[: exc.pos].encode("utf-8"))
            raise MalformedJson(source_path, offset, exc.msg) from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("targets"), list):
        raise InvalidProject(f"{source_path}: missing 'targets' list")
    fmt = doc.get("format")
    if fmt is not None and fmt != FORMAT_TAG:
        log.warning("%s: unrecognised format tag %r, reading anyway", source_path, fmt)
    targets = []
    seen: dict[str, int] = {}
    for i, raw in enumerate(doc["targets"]):
        if not isinstance(raw, dict):
            raise InvalidProject(f"{source_path}: target {i} is not an object")
        target = _parse_target(raw, i)
        if target.name in seen:
            seen[target.name] += 1
            new_name = f"{target.name}#{seen[target.name]}"
            target.warnings.append(IngestWarning("", f"duplicate target name {target.name!r} renamed to {new_name!r}", new_name))
            target.name = new_name
        else:
            seen[target.name] = 1
        targets.append(decode_blocks(target))
    if not targets:
        raise InvalidProject(f"{source_path}: project has no targets")
    return RawProject(targets=targets, source_path=source_path)


def _parse_target(raw: dict, index: int) -> RawTarget:
    name = str(raw.get("name") or f"target{index}")
    device = raw.get("device")
    target = RawTarget(name=name, is_stage=bool(raw.get("isStage", False)), device=str(device) if device else None)
    blocks = raw.get("blocks") or {}
    if not isinstance(blocks, dict):
        target.warnings.append(IngestWarning("", "'blocks' is not an object; ignored", name))
        return target
    for block_id, b in blocks.items():
        if not isinstance(b, dict) or "opcode" not in b:
            # sb3 stores loose variable reporters as bare arrays
            target.warnings.append(IngestWarning(block_id, "not a block object; skipped", name))
            continue
        target.blocks[block_id] = RawBlock(
            block_id=block_id,
            opcode=str(b["opcode"]),
            next=b.get("next"),
            parent=b.get("parent"),
            top_level=bool(b.get("topLevel", False)),
            inputs={slot: _normalise_input(v) for slot, v in (b.get("inputs") or {}).items()},
            fields={k: _field_text(v) for k, v in (b.get("fields") or {}).items()},
            shadow=bool(b.get("shadow", False)),
        )
    return target


def _field_text(value) -> str:
    if isinstance(value, list):
        value = value[0] if value else ""
    return "" if value is None else str(value)


def _normalise_input(value) -> Optional[InputValue]:
    """Turn one input wrapper into a Literal, BlockRef or VarRef (None if empty)."""
    if value is None:
        return None
    if isinstance(value, bool):
        return Literal("string", str(value).lower())
    if isinstance(value, (int, float)):
        return Literal("number", _num_text(value))
    if isinstance(value, str):
        return Literal("string", value)
    if isinstance(value, dict):
        if "block" in value:
            return BlockRef(str(value["block"]))
        kind = value.get("kind", "string")
        return _tagged(kind, value.get("value", ""))
    if not isinstance(value, list) or not value:
        return None
    head = value[0]
    if isinstance(head, str) and head in _TAGS and len(value) >= 2:
        return _tagged(head, value[1])
    if isinstance(head, int) and head in (1, 2, 3):
        # sb3 input: [shadow-state, primary, (obscured shadow)]; a bare string there is a block id
        primary = value[1] if len(value) > 1 else None
        if isinstance(primary, str):
            return BlockRef(primary)
        return _normalise_input(primary)
    if isinstance(head, int):
        return _primitive(value)
    return None


def _tagged(kind: str, payload) -> Optional[InputValue]:
    if kind == "block":
        return BlockRef(str(payload)) if payload is not None else None
    if kind == "variable":
        return VarRef(str(payload))
    if kind in ("colour", "color"):
        return Literal("colour", str(payload))
    if kind == "number":
        return Literal("number", _num_text(payload))
    return Literal("string", "" if payload is None else str(payload))


def _primitive(value: list) -> Optional[InputValue]:
    code = value[0]
    payload = value[1] if len(value) > 1 else ""
    if code in _NUMBER_CODES:
        return Literal("number", _num_text(payload))
    if code == _COLOUR_CODE:
        return Literal("colour", str(payload))
    if code in _TEXT_CODES:
        return Literal("string", str(payload))
    if code == _VARIABLE_CODE:
        return VarRef(str(payload))
    if code == _LIST_CODE:
        return Literal("string", str(payload))
    return None


def _num_text(value) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def decode_blocks(target: RawTarget) -> RawTarget:
    """Check every id reference of ``target``; dangling links are dropped with a warning."""
    blocks = target.blocks
    for block in blocks.values():
        if block.next is not None and block.next not in blocks:
            target.warnings.append(IngestWarning(block.block_id, f"next -> missing block {block.next!r}; link dropped", target.name))
            block.next = None
        if block.parent is not None and block.parent not in blocks:
            target.warnings.append(IngestWarning(block.block_id, f"parent -> missing block {block.parent!r}; link dropped", target.name))
            block.parent = None
        if block.top_level and block.parent is not None:
            target.warnings.append(IngestWarning(block.block_id, "top-level block has a parent; parent dropped", target.name))
            block.parent = None
        for slot, value in list(block.inputs.items()):
            if isinstance(value, BlockRef) and value.block_id not in blocks:
                target.warnings.append(
                    IngestWarning(block.block_id, f"input {slot} -> missing block {value.block_id!r}; input dropped", target.name)
                )
                block.inputs[slot] = None
    for w in target.warnings:
        log.debug("%s: %s", w.block_id, w.message)
    return target
