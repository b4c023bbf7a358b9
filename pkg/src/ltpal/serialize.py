"""JSON loading and saving for frames, rules, systems, scores and candidates.

All loaders accept a file path or an already-parsed dict, validate shape
eagerly, and raise IngestionError with a dotted path into the offending
document node (for example "frames[0].worlds[1].atoms[2]").
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import IngestionError, ParseError
from .model import Atom, PALModel, RuleSet, World, enrich_model, equivalence_closure
from .mppe import ScoreTable
from .syntax import parse_pal_formula
from .transition import TransitionSystem, build_ts


def _load_json(source):
    if isinstance(source, dict):
        return source
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestionError(f"{path} is not valid JSON: {exc}") from None


def _as_dict(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise IngestionError(f"{where} must be an object, got {type(value).__name__}")
    return value


def _as_list(value, where: str) -> list:
    if not isinstance(value, list):
        raise IngestionError(f"{where} must be an array, got {type(value).__name__}")
    return value


def _as_str(value, where: str) -> str:
    if not isinstance(value, str):
        raise IngestionError(f"{where} must be a string, got {type(value).__name__}")
    return value


def _get(obj: dict, key: str, where: str):
    if key not in obj:
        raise IngestionError(f"{where} is missing the {key!r} field")
    return obj[key]


def _atom(value, where: str) -> Atom:
    pair = _as_list(value, where)
    if len(pair) != 2:
        raise IngestionError(f"{where} must be a [data_id, class_id] pair")
    data_id = _as_str(pair[0], f"{where}[0]")
    class_id = _as_str(pair[1], f"{where}[1]")
    try:
        return Atom(data_id, class_id)
    except ValueError as exc:
        raise IngestionError(f"{where}: {exc}") from None


def _pairs(value, where: str) -> list:
    pairs = []
    for k, entry in enumerate(_as_list(value, where)):
        pair = _as_list(entry, f"{where}[{k}]")
        if len(pair) != 2:
            raise IngestionError(f"{where}[{k}] must be a [left, right] world-id pair")
        pairs.append((_as_str(pair[0], f"{where}[{k}][0]"),
                      _as_str(pair[1], f"{where}[{k}][1]")))
    return pairs


def load_rules(source) -> RuleSet:
    """Load ontology rules: {"rules": [{"class": c, "implies": [d, ...]}]}."""
    doc = _as_dict(_load_json(source), "rules document")
    entries = _as_list(_get(doc, "rules", "rules document"), "rules")
    table: dict = {}
    for i, entry in enumerate(entries):
        where = f"rules[{i}]"
        entry = _as_dict(entry, where)
        class_id = _as_str(_get(entry, "class", where), f"{where}.class")
        implied = [
            _as_str(v, f"{where}.implies[{j}]")
            for j, v in enumerate(_as_list(_get(entry, "implies", where), f"{where}.implies"))
        ]
        table.setdefault(class_id, []).extend(implied)
    try:
        return RuleSet(table)
    except ValueError as exc:
        raise IngestionError(f"rules document: {exc}") from None


def _load_model(entry: dict, agents, where: str) -> PALModel:
    worlds_value = _as_list(_get(entry, "worlds", where), f"{where}.worlds")
    if not worlds_value:
        raise IngestionError(f"{where}.worlds must not be empty")
    worlds = []
    for j, world_value in enumerate(worlds_value):
        wwhere = f"{where}.worlds[{j}]"
        world_value = _as_dict(world_value, wwhere)
        wid = _as_str(_get(world_value, "id", wwhere), f"{wwhere}.id")
        atoms_value = world_value.get("atoms", [])
        atoms = [
            _atom(a, f"{wwhere}.atoms[{k}]")
            for k, a in enumerate(_as_list(atoms_value, f"{wwhere}.atoms"))
        ]
        worlds.append(World(wid, atoms))
    ids = [w.id for w in worlds]
    relations_value = _as_dict(entry.get("relations", {}), f"{where}.relations")
    partitions = {}
    for agent, pairs_value in relations_value.items():
        if agent not in agents:
            raise IngestionError(
                f"{where}.relations names unknown agent {agent!r}"
            )
        pairs = _pairs(pairs_value, f"{where}.relations[{agent!r}]")
        try:
            partitions[agent] = equivalence_closure(pairs, ids)
        except IngestionError as exc:
            raise IngestionError(f"{where}.relations[{agent!r}]: {exc}") from None
    try:
        return PALModel(worlds, agents, partitions)
    except IngestionError as exc:
        raise IngestionError(f"{where}: {exc}") from None


@dataclass
class FramesDocument:
    """Parsed frames input: the agent roster, group aliases and one model per frame."""

    agents: tuple
    frames: list
    groups: dict = field(default_factory=dict)


def load_frames(source) -> FramesDocument:
    """Load a frames document:

    {"agents": [...], "groups": {name: [...]}, "frames": [frame, ...]}
    where each frame is {"worlds": [{"id": w, "atoms": [[d, c], ...]}, ...],
    "relations": {agent: [[w, w'], ...], ...}}.

    Missing agents in "relations" (or empty pair lists) mean the agent
    distinguishes all worlds of that frame.
    """
    doc = _as_dict(_load_json(source), "frames document")
    agents_value = _as_list(_get(doc, "agents", "frames document"), "agents")
    if not agents_value:
        raise IngestionError("agents must not be empty")
    agents = tuple(_as_str(a, f"agents[{i}]") for i, a in enumerate(agents_value))
    if len(set(agents)) != len(agents):
        raise IngestionError("agents contains duplicate ids")

    groups = {}
    for name, members_value in _as_dict(doc.get("groups", {}), "groups").items():
        members = [
            _as_str(m, f"groups[{name!r}][{i}]")
            for i, m in enumerate(_as_list(members_value, f"groups[{name!r}]"))
        ]
        if not members:
            raise IngestionError(f"groups[{name!r}] must not be empty")
        unknown = [m for m in members if m not in agents]
        if unknown:
            raise IngestionError(
                f"groups[{name!r}] names unknown agent {unknown[0]!r}"
            )
        if name in agents:
            raise IngestionError(
                f"group name {name!r} collides with an agent id"
            )
        groups[name] = tuple(members)

    frames_value = _as_list(_get(doc, "frames", "frames document"), "frames")
    if not frames_value:
        raise IngestionError("frames must not be empty")
    frames = [
        _load_model(_as_dict(entry, f"frames[{i}]"), agents, f"frames[{i}]")
        for i, entry in enumerate(frames_value)
    ]
    return FramesDocument(agents=agents, frames=frames, groups=groups)


def ingest(frames_source, rules_source=None) -> FramesDocument:
    """Load frames and apply ontology rules to every world's atom set."""
    doc = load_frames(frames_source)
    rules = load_rules(rules_source) if rules_source is not None else RuleSet({})
    if rules:
        doc.frames = [enrich_model(frame, rules) for frame in doc.frames]
    return doc


def _relation_pairs(model: PALModel, agent: str) -> list:
    pairs = []
    for block in model.partition(agent):
        members = sorted(block)
        pairs.extend([a, b] for a, b in zip(members, members[1:]))
    return pairs


def dump_ts(ts: TransitionSystem, scores: ScoreTable | None = None) -> dict:
    """Serialize a system (and optionally its edge scores) to a JSON dict."""
    doc: dict = {"agents": list(ts.agents)}
    if ts.groups:
        doc["groups"] = {name: list(members) for name, members in ts.groups.items()}
    layers = []
    for model in ts.layers:
        layers.append({
            "worlds": [
                {"id": w.id, "atoms": [[a.data_id, a.class_id] for a in sorted(w.atoms)]}
                for w in model.worlds
            ],
            "relations": {
                agent: _relation_pairs(model, agent) for agent in ts.agents
            },
        })
    doc["layers"] = layers
    edges = []
    for u, v in ts.edges():
        entry = {"from": u, "to": v}
        if scores is not None:
            entry["score"] = scores[(u, v)]
        edges.append(entry)
    doc["edges"] = edges
    return doc


def save_ts(ts: TransitionSystem, path, scores: ScoreTable | None = None) -> None:
    Path(path).write_text(json.dumps(dump_ts(ts, scores), indent=2) + "\n")


def load_ts(source):
    """Load a serialized system.

    Returns (system, scores) where scores is a ScoreTable when every edge
    entry carries a "score" field and None when none does; a mixture is an
    error.  The edge list must match the complete bipartite edges between
    adjacent layers exactly.
    """
    doc = _as_dict(_load_json(source), "system document")
    agents_value = _as_list(_get(doc, "agents", "system document"), "agents")
    agents = tuple(_as_str(a, f"agents[{i}]") for i, a in enumerate(agents_value))

    layers_value = _as_list(_get(doc, "layers", "system document"), "layers")
    layers = [
        _load_model(_as_dict(entry, f"layers[{i}]"), agents, f"layers[{i}]")
        for i, entry in enumerate(layers_value)
    ]

    groups = {}
    for name, members_value in _as_dict(doc.get("groups", {}), "groups").items():
        members = [
            _as_str(m, f"groups[{name!r}][{i}]")
            for i, m in enumerate(_as_list(members_value, f"groups[{name!r}]"))
        ]
        groups[name] = tuple(members)

    try:
        ts = TransitionSystem(layers, groups=groups or None)
    except IngestionError as exc:
        raise IngestionError(f"system document: {exc}") from None

    edges_value = _as_list(_get(doc, "edges", "system document"), "edges")
    expected = list(ts.edges())
    seen = {}
    scored = 0
    for i, entry in enumerate(edges_value):
        where = f"edges[{i}]"
        entry = _as_dict(entry, where)
        u = _as_str(_get(entry, "from", where), f"{where}.from")
        v = _as_str(_get(entry, "to", where), f"{where}.to")
        if (u, v) in seen:
            raise IngestionError(f"{where} duplicates edge {u!r} -> {v!r}")
        if "score" in entry:
            value = entry["score"]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise IngestionError(f"{where}.score must be a number")
            seen[(u, v)] = float(value)
            scored += 1
        else:
            seen[(u, v)] = None
    missing = [e for e in expected if e not in seen]
    if missing:
        u, v = missing[0]
        raise IngestionError(f"edges is missing {u!r} -> {v!r}")
    expected_set = set(expected)
    extra = [e for e in seen if e not in expected_set]
    if extra:
        u, v = extra[0]
        raise IngestionError(
            f"edges contains {u!r} -> {v!r}, which does not connect adjacent layers"
        )
    if scored == 0:
        return ts, None
    if scored != len(seen):
        raise IngestionError(
            "either every edge must carry a score or none may"
        )
    try:
        return ts, ScoreTable(seen)
    except IngestionError as exc:
        raise IngestionError(f"edges: {exc}") from None


def load_scores(source, ts: TransitionSystem) -> ScoreTable:
    """Load a standalone scores file: {"edges": [{"from", "to", "score"}]}.

    Every edge of the system must be covered exactly once, and every score
    must lie in (0, 1].
    """
    doc = _as_dict(_load_json(source), "scores document")
    entries = _as_list(_get(doc, "edges", "scores document"), "edges")
    valid = set(ts.edges())
    table: dict = {}
    for i, entry in enumerate(entries):
        where = f"edges[{i}]"
        entry = _as_dict(entry, where)
        u = _as_str(_get(entry, "from", where), f"{where}.from")
        v = _as_str(_get(entry, "to", where), f"{where}.to")
        if (u, v) not in valid:
            raise IngestionError(f"{where}: {u!r} -> {v!r} is not an edge of the system")
        if (u, v) in table:
            raise IngestionError(f"{where} duplicates edge {u!r} -> {v!r}")
        value = _get(entry, "score", where)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise IngestionError(f"{where}.score must be a number")
        table[(u, v)] = float(value)
    try:
        scores = ScoreTable(table)
    except IngestionError as exc:
        raise IngestionError(f"scores document: {exc}") from None
    scores.validate_covers(ts)
    return scores


def load_candidates(source) -> list:
    """Load announcement candidates: {"candidates": ["formula", ...]}."""
    doc = _as_dict(_load_json(source), "candidates document")
    entries = _as_list(_get(doc, "candidates", "candidates document"), "candidates")
    if not entries:
        raise IngestionError("candidates must not be empty")
    candidates = []
    for i, text in enumerate(entries):
        text = _as_str(text, f"candidates[{i}]")
        try:
            candidates.append(parse_pal_formula(text))
        except ParseError as exc:
            raise IngestionError(f"candidates[{i}]: {exc}") from None
    return candidates


def build_from_files(frames_source, rules_source=None) -> TransitionSystem:
    """Ingest frames (and rules) and assemble the transition system."""
    doc = ingest(frames_source, rules_source)
    return build_ts(doc.frames, groups=doc.groups or None)
