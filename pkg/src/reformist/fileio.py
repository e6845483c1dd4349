"""Reading and writing instance, sequence, graph, and DOT documents.

Two JSON document kinds are defined here. An instance document carries the
preference lists together with the starting matching:

    {
      "version": 1,
      "items": ["x", "y", "p", "q", "r"],
      "agents": [
        {"name": "1", "prefs": ["p", "r", "q", "x"]},
        {"name": "2", "prefs": ["q", "p", "y"]}
      ],
      "initial_matching": {"1": "x", "2": "y"}
    }

A sequence document carries an exchange schedule against such an instance:

    {
      "version": 1,
      "instance": "sha256:...",
      "steps": [{"agent": "1", "from": "x", "to": "r"}],
      "annotations": ["warmup"]
    }

Schema violations (wrong types, unknown fields, unresolvable names) raise
FileFormatError with a JSON-path location such as ``$.agents[0].prefs[2]``;
malformed JSON reports the line and column.  Domain problems (duplicate
preferences, non-injective matchings, envy) are deliberately not checked
here, so callers can report them separately.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, Sequence

from .errors import FileFormatError
from .model import (
    ExchangeStep,
    Instance,
    Matching,
    ReformSequence,
    build_item_graph,
)

INSTANCE_VERSION = 1
SEQUENCE_VERSION = 1
GRAPH_VERSION = 1


def sha256_text(text: str) -> str:
    """Content reference for a document: ``sha256:`` plus the hex digest."""
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc.strerror or exc}") from exc


_read = read_text


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        raise FileFormatError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _parse_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(
            f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc


def _expect_object(value: Any, where: str) -> dict:
    if not isinstance(value, dict):
        raise FileFormatError(f"{where}: expected an object")
    return value


def _expect_list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise FileFormatError(f"{where}: expected a list")
    return value


def _expect_str(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise FileFormatError(f"{where}: expected a string")
    return value


def _check_fields(
    obj: dict, required: Sequence[str], optional: Sequence[str], where: str
) -> None:
    for key in obj:
        if key not in required and key not in optional:
            raise FileFormatError(f"unknown field {where}.{key}")
    for key in required:
        if key not in obj:
            raise FileFormatError(f"missing field {where}.{key}")


def _check_version(obj: dict, expected: int, where: str) -> None:
    version = obj["version"]
    if not isinstance(version, int) or isinstance(version, bool):
        raise FileFormatError(f"{where}.version: expected an integer")
    if version != expected:
        raise FileFormatError(
            f"{where}.version: unsupported version {version} (expected {expected})"
        )


def loads_instance(text: str) -> tuple[Instance, Matching]:
    doc = _expect_object(_parse_json(text), "$")
    _check_fields(doc, ("version", "items", "agents", "initial_matching"), (), "$")
    _check_version(doc, INSTANCE_VERSION, "$")

    items = _expect_list(doc["items"], "$.items")
    item_names: list[str] = []
    item_ids: dict[str, int] = {}
    for j, raw in enumerate(items):
        name = _expect_str(raw, f"$.items[{j}]")
        if name in item_ids:
            raise FileFormatError(f"$.items[{j}]: duplicate item name {name!r}")
        item_ids[name] = j
        item_names.append(name)

    agents = _expect_list(doc["agents"], "$.agents")
    agent_names: list[str] = []
    agent_ids: dict[str, int] = {}
    prefs: list[tuple[int, ...]] = []
    for i, raw in enumerate(agents):
        entry = _expect_object(raw, f"$.agents[{i}]")
        _check_fields(entry, ("name", "prefs"), (), f"$.agents[{i}]")
        name = _expect_str(entry["name"], f"$.agents[{i}].name")
        if name in agent_ids:
            raise FileFormatError(f"$.agents[{i}].name: duplicate agent name {name!r}")
        agent_ids[name] = i
        agent_names.append(name)
        raw_prefs = _expect_list(entry["prefs"], f"$.agents[{i}].prefs")
        row = []
        for k, raw_item in enumerate(raw_prefs):
            where = f"$.agents[{i}].prefs[{k}]"
            item = _expect_str(raw_item, where)
            if item not in item_ids:
                raise FileFormatError(f"{where}: unknown item {item!r}")
            row.append(item_ids[item])
        prefs.append(tuple(row))

    matching_doc = _expect_object(doc["initial_matching"], "$.initial_matching")
    for key in matching_doc:
        if key not in agent_ids:
            raise FileFormatError(f"$.initial_matching: unknown agent {key!r}")
    assignment = []
    for name in agent_names:
        if name not in matching_doc:
            raise FileFormatError(f"$.initial_matching: missing assignment for agent {name!r}")
        item = _expect_str(matching_doc[name], f"$.initial_matching.{name}")
        if item not in item_ids:
            raise FileFormatError(f"$.initial_matching.{name}: unknown item {item!r}")
        assignment.append(item_ids[item])

    inst = Instance(
        prefs=tuple(prefs),
        num_items=len(item_names),
        agent_names=tuple(agent_names),
        item_names=tuple(item_names),
    )
    return inst, Matching(tuple(assignment))


def dumps_instance(inst: Instance, initial: Matching) -> str:
    doc = {
        "version": INSTANCE_VERSION,
        "items": list(inst.item_names),
        "agents": [
            {
                "name": inst.agent_names[i],
                "prefs": [inst.item_names[x] for x in inst.prefs[i]],
            }
            for i in range(inst.num_agents)
        ],
        "initial_matching": {
            inst.agent_names[i]: inst.item_names[initial.item_of(i)]
            for i in range(inst.num_agents)
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def load_instance(path: str) -> tuple[Instance, Matching]:
    return loads_instance(_read(path))


def save_instance(path: str, inst: Instance, initial: Matching) -> None:
    _write(path, dumps_instance(inst, initial))


def _agent_id(inst: Instance, name: str, where: str) -> int:
    try:
        return inst.agent_names.index(name)
    except ValueError:
        raise FileFormatError(f"{where}: unknown agent {name!r}") from None


def _item_id(inst: Instance, name: str, where: str) -> int:
    try:
        return inst.item_names.index(name)
    except ValueError:
        raise FileFormatError(f"{where}: unknown item {name!r}") from None


def loads_sequence(
    text: str, inst: Instance, initial: Matching
) -> tuple[ReformSequence, tuple[str, ...] | None, str]:
    """Parse a sequence document against a known instance.

    Returns the sequence, the optional annotation strings (one per step),
    and the recorded instance reference.  Whether the steps actually replay
    is a domain question left to verify_sequence.
    """
    doc = _expect_object(_parse_json(text), "$")
    _check_fields(doc, ("version", "instance", "steps"), ("annotations",), "$")
    _check_version(doc, SEQUENCE_VERSION, "$")
    ref = _expect_str(doc["instance"], "$.instance")

    steps = []
    for k, raw in enumerate(_expect_list(doc["steps"], "$.steps")):
        where = f"$.steps[{k}]"
        entry = _expect_object(raw, where)
        _check_fields(entry, ("agent", "from", "to"), (), where)
        agent = _agent_id(inst, _expect_str(entry["agent"], f"{where}.agent"), f"{where}.agent")
        src = _item_id(inst, _expect_str(entry["from"], f"{where}.from"), f"{where}.from")
        dst = _item_id(inst, _expect_str(entry["to"], f"{where}.to"), f"{where}.to")
        steps.append(ExchangeStep(agent, src, dst))

    annotations: tuple[str, ...] | None = None
    if "annotations" in doc:
        raw_notes = _expect_list(doc["annotations"], "$.annotations")
        notes = [
            _expect_str(raw, f"$.annotations[{k}]") for k, raw in enumerate(raw_notes)
        ]
        if len(notes) != len(steps):
            raise FileFormatError(
                f"$.annotations: {len(notes)} entries for {len(steps)} steps"
            )
        annotations = tuple(notes)

    return ReformSequence(initial, tuple(steps)), annotations, ref


def dumps_sequence(
    seq: ReformSequence,
    inst: Instance,
    instance_ref: str,
    annotations: Sequence[str] | None = None,
) -> str:
    doc: dict[str, Any] = {
        "version": SEQUENCE_VERSION,
        "instance": instance_ref,
        "steps": [
            {
                "agent": inst.agent_names[step.agent],
                "from": inst.item_names[step.from_item],
                "to": inst.item_names[step.to_item],
            }
            for step in seq.steps
        ],
    }
    if annotations is not None:
        if len(annotations) != len(seq.steps):
            raise FileFormatError(
                f"{len(annotations)} annotations for {len(seq.steps)} steps"
            )
        doc["annotations"] = list(annotations)
    return json.dumps(doc, indent=2) + "\n"


def load_sequence(
    path: str, inst: Instance, initial: Matching
) -> tuple[ReformSequence, tuple[str, ...] | None, str]:
    return loads_sequence(_read(path), inst, initial)


def save_sequence(
    path: str,
    seq: ReformSequence,
    inst: Instance,
    instance_ref: str,
    annotations: Sequence[str] | None = None,
) -> None:
    _write(path, dumps_sequence(seq, inst, instance_ref, annotations))


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(inst: Instance, matching: Matching | None = None) -> str:
    """Render the item graph as DOT text.

    Vertices are items; an arc x -> y labeled with an agent means that agent
    holds y directly above x in her list.  Output order is sorted by name so
    the text is stable.  With a matching, assigned items are marked with
    their holder.
    """
    graph = build_item_graph(inst)
    holder: dict[int, int] = {}
    if matching is not None:
        for i in range(inst.num_agents):
            holder[matching.item_of(i)] = i

    lines = ["digraph items {"]
    for item in sorted(graph.vertices, key=inst.item_label):
        name = inst.item_label(item)
        if item in holder:
            agent = inst.agent_label(holder[item])
            label = f"{name} ({agent})"
            lines.append(f"  {_quote(name)} [label={_quote(label)}, peripheries=2];")
        else:
            lines.append(f"  {_quote(name)};")
    arcs = sorted(
        (inst.item_label(tail), inst.item_label(head), inst.agent_label(agent))
        for tail, head, agent in graph.arcs
    )
    for tail, head, agent in arcs:
        lines.append(f"  {_quote(tail)} -> {_quote(head)} [label={_quote(agent)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


Label = int | str


def _label(token: str) -> Label:
    try:
        return int(token)
    except ValueError:
        return token


def parse_edge_list(text: str) -> tuple[tuple[Label, Label], ...]:
    """Parse edge-list text, one ``u v`` pair per line.

    Blank lines and lines starting with ``#`` are skipped.  Tokens that look
    like integers become integers, anything else stays a string.
    """
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise FileFormatError(
                f"line {lineno}: expected two vertex names, got {len(tokens)}"
            )
        edges.append((_label(tokens[0]), _label(tokens[1])))
    return tuple(edges)


def _graph_label(value: Any, where: str) -> Label:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise FileFormatError(f"{where}: expected an integer or string vertex name")
    return value


def loads_graph(text: str) -> tuple[tuple[tuple[Label, Label], ...], tuple[tuple[Label, ...], ...] | None]:
    """Parse a graph document: JSON with optional vertex classes, or edge-list text.

    Returns (edges, parts) where parts is None unless the JSON form supplies
    vertex classes.
    """
    if text.lstrip().startswith("{"):
        doc = _expect_object(_parse_json(text), "$")
        _check_fields(doc, ("version", "edges"), ("parts",), "$")
        _check_version(doc, GRAPH_VERSION, "$")
        edges = []
        for k, raw in enumerate(_expect_list(doc["edges"], "$.edges")):
            where = f"$.edges[{k}]"
            pair = _expect_list(raw, where)
            if len(pair) != 2:
                raise FileFormatError(f"{where}: expected two vertex names")
            edges.append(
                (_graph_label(pair[0], f"{where}[0]"), _graph_label(pair[1], f"{where}[1]"))
            )
        parts = None
        if "parts" in doc:
            rows = []
            for k, raw in enumerate(_expect_list(doc["parts"], "$.parts")):
                where = f"$.parts[{k}]"
                row = _expect_list(raw, where)
                rows.append(
                    tuple(_graph_label(v, f"{where}[{j}]") for j, v in enumerate(row))
                )
            parts = tuple(rows)
        return tuple(edges), parts
    return parse_edge_list(text), None


def load_graph(path: str) -> tuple[tuple[tuple[Label, Label], ...], tuple[tuple[Label, ...], ...] | None]:
    return loads_graph(_read(path))
