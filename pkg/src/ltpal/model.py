"""Kripke-model building blocks for per-frame classifier output.

One frame of multi-classifier output becomes a small Kripke model: a set of
possible worlds (candidate readings of the frame), a valuation assigning the
detected (datum, class) atoms to each world, and one equivalence relation per
classifier grouping the worlds that classifier cannot tell apart.  Relations
are stored as partitions of the world set rather than pair lists, so
indistinguishability lookups are a single dict access.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import EvaluationError, IngestionError

_RESERVED = set(":,()[]{}")


def _check_name(value, what: str) -> None:
    if not isinstance(value, str) or not value:
        raise ValueError(f"{what} must be a non-empty string")
    for ch in value:
        if ch in _RESERVED or ch.isspace() or not ch.isprintable():
            raise ValueError(
                f"{what} {value!r} may not contain whitespace, unprintable "
                "characters or any of : , ( ) [ ] { }"
            )


@dataclass(frozen=True, order=True)
class Atom:
    """A single detection: class `class_id` reported for datum `data_id`."""

    data_id: str
    class_id: str

    def __post_init__(self):
        _check_name(self.data_id, "atom data id")
        _check_name(self.class_id, "atom class id")

    def __str__(self):
        return f"{self.data_id}:{self.class_id}"


@dataclass(frozen=True)
class World:
    """A possible reading of one frame: an id plus the atoms true in it."""

    id: str
    atoms: frozenset = frozenset()

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ValueError("world id must be a non-empty string")
        atoms = frozenset(self.atoms)
        for atom in atoms:
            if not isinstance(atom, Atom):
                raise ValueError(f"world {self.id!r} holds a non-atom value {atom!r}")
        object.__setattr__(self, "atoms", atoms)


class RuleSet:
    """Class-implication rules.

    A rule ``Cat -> Animal`` means any world containing (x, Cat) implicitly
    also contains (x, Animal), for the same datum x.  Rules are generic over
    the datum and may form cycles; closure always terminates because the
    class universe is finite.
    """

    def __init__(self, rules: Mapping[str, Iterable[str]] | None = None):
        merged: dict[str, set[str]] = {}
        for class_id, implied in dict(rules or {}).items():
            _check_name(class_id, "rule class id")
            merged.setdefault(class_id, set())
            for target in implied:
                _check_name(target, "rule implied class id")
                merged[class_id].add(target)
        self._rules = {cls: frozenset(v) for cls, v in merged.items()}

    def implied_by(self, class_id: str) -> frozenset:
        return self._rules.get(class_id, frozenset())

    def items(self):
        return self._rules.items()

    def __bool__(self):
        return bool(self._rules)

    def __eq__(self, other):
        return isinstance(other, RuleSet) and self._rules == other._rules

    def __repr__(self):
        inner = ", ".join(f"{c}->{sorted(v)}" for c, v in sorted(self._rules.items()))
        return f"RuleSet({inner})"


def rule_closure(atoms: Iterable[Atom], rules: RuleSet) -> frozenset:
    """Least superset of `atoms` closed under the implication rules."""
    closed = set(atoms)
    queue = list(closed)
    while queue:
        atom = queue.pop()
        for implied in rules.implied_by(atom.class_id):
            candidate = Atom(atom.data_id, implied)
            if candidate not in closed:
                closed.add(candidate)
                queue.append(candidate)
    return frozenset(closed)


def equivalence_closure(pairs, worlds) -> tuple:
    """Finest partition of `worlds` whose blocks join every listed pair.

    `pairs` is any iterable of (id, id) couples; reflexive and symmetric
    completions are implicit.  Returns blocks as frozensets, ordered by their
    smallest member so the result is deterministic.
    """
    ids = set(worlds)
    parent = {w: w for w in ids}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:  # path compression
            parent[x], x = root, parent[x]
        return root

    for a, b in pairs:
        for w in (a, b):
            if w not in ids:
                raise IngestionError(
                    f"relation pair ({a!r}, {b!r}) references unknown world id {w!r}"
                )
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    blocks: dict[str, set] = {}
    for w in ids:
        blocks.setdefault(find(w), set()).add(w)
    return tuple(sorted((frozenset(b) for b in blocks.values()), key=min))


class PALModel:
    """One frame as a Kripke model over a fixed classifier roster.

    Worlds keep their construction order, which later fixes path enumeration
    order, and the model is immutable once built.  `relations` maps an agent
    to a partition (an iterable of world-id blocks); agents without an entry
    get the identity partition, i.e. they can tell every pair of worlds
    apart.
    """

    def __init__(self, worlds: Iterable[World], agents: Iterable[str],
                 relations: Mapping[str, Iterable] | None = None):
        worlds = tuple(worlds)
        by_id: dict[str, World] = {}
        for world in worlds:
            if not isinstance(world, World):
                raise ValueError(f"expected World, got {world!r}")
            if world.id in by_id:
                raise IngestionError(f"duplicate world id {world.id!r}")
            by_id[world.id] = world

        agents = tuple(agents)
        seen = set()
        for agent in agents:
            if not isinstance(agent, str) or not agent:
                raise IngestionError(f"agent name must be a non-empty string, got {agent!r}")
            if agent in seen:
                raise IngestionError(f"duplicate agent {agent!r} in roster")
            seen.add(agent)

        ids = frozenset(by_id)
        relations = dict(relations or {})
        for agent in relations:
            if agent not in seen:
                raise IngestionError(f"relation listed for unknown agent {agent!r}")

        partitions: dict[str, tuple] = {}
        for agent in agents:
            supplied = relations.get(agent)
            if supplied is None:
                part = tuple(frozenset({wid}) for wid in sorted(ids))
            else:
                raw = [frozenset(block) for block in supplied]
                covered: set[str] = set()
                for block in raw:
                    if not block:
                        raise IngestionError(f"empty relation block for agent {agent!r}")
                    for wid in block:
                        if wid not in ids:
                            raise IngestionError(
                                f"relation for agent {agent!r} references unknown world id {wid!r}"
                            )
                        if wid in covered:
                            raise IngestionError(
                                f"world id {wid!r} appears in two relation blocks for agent {agent!r}"
                            )
                        covered.add(wid)
                if covered != set(ids):
                    missing = ", ".join(repr(w) for w in sorted(ids - covered))
                    raise IngestionError(
                        f"relation for agent {agent!r} does not cover world(s) {missing}"
                    )
                part = tuple(sorted(raw, key=min))
            partitions[agent] = part

        self._worlds = worlds
        self._by_id = by_id
        self._agents = agents
        self._partitions = partitions
        self._block_of = {
            agent: {wid: block for block in part for wid in block}
            for agent, part in partitions.items()
        }

    @classmethod
    def from_pairs(cls, worlds, agents, pairs_by_agent=None):
        """Build a model from relation pair lists instead of partitions."""
        worlds = tuple(worlds)
        ids = [w.id for w in worlds]
        partitions = {
            agent: equivalence_closure(pairs, ids)
            for agent, pairs in dict(pairs_by_agent or {}).items()
        }
        return cls(worlds, agents, partitions)

    @property
    def worlds(self) -> tuple:
        return self._worlds

    @property
    def agents(self) -> tuple:
        return self._agents

    @property
    def world_ids(self) -> frozenset:
        return frozenset(self._by_id)

    @property
    def is_empty(self) -> bool:
        return not self._worlds

    def world(self, world_id: str) -> World:
        try:
            return self._by_id[world_id]
        except KeyError:
            raise EvaluationError(f"unknown world id {world_id!r}") from None

    def labels(self, world_id: str) -> frozenset:
        return self.world(world_id).atoms

    def partition(self, agent: str) -> tuple:
        try:
            return self._partitions[agent]
        except KeyError:
            raise EvaluationError(f"unknown agent {agent!r}") from None

    def block(self, agent: str, world_id: str) -> frozenset:
        """Worlds `agent` cannot distinguish from `world_id` (incl. itself)."""
        try:
            by_world = self._block_of[agent]
        except KeyError:
            raise EvaluationError(f"unknown agent {agent!r}") from None
        try:
            return by_world[world_id]
        except KeyError:
            raise EvaluationError(f"unknown world id {world_id!r}") from None

    def restricted(self, keep) -> "PALModel":
        """Submodel over `keep`: worlds filtered, partitions intersected."""
        keep = frozenset(keep)
        unknown = keep - self.world_ids
        if unknown:
            raise EvaluationError(f"unknown world id {sorted(unknown)[0]!r}")
        worlds = tuple(w for w in self._worlds if w.id in keep)
        partitions = {
            agent: tuple(sorted((block & keep for block in part if block & keep), key=min))
            for agent, part in self._partitions.items()
        }
        return PALModel(worlds, self._agents, partitions)

    def renamed(self, rename) -> "PALModel":
        """Copy of the model with every world id passed through `rename`."""
        worlds = tuple(World(rename(w.id), w.atoms) for w in self._worlds)
        partitions = {
            agent: tuple(frozenset(rename(wid) for wid in block) for block in part)
            for agent, part in self._partitions.items()
        }
        return PALModel(worlds, self._agents, partitions)

    def __eq__(self, other):
        return (
            isinstance(other, PALModel)
            and self._worlds == other._worlds
            and self._agents == other._agents
            and self._partitions == other._partitions
        )

    def __repr__(self):
        return f"PALModel(worlds={[w.id for w in self._worlds]}, agents={list(self._agents)})"


def enrich_model(model: PALModel, rules: RuleSet) -> PALModel:
    """Apply rule closure to every world's atom set; structure is unchanged."""
    worlds = tuple(World(w.id, rule_closure(w.atoms, rules)) for w in model.worlds)
    partitions = {agent: model.partition(agent) for agent in model.agents}
    return PALModel(worlds, model.agents, partitions)
