"""Formula ASTs: an epistemic core embedded in a finite-trace temporal layer.

Two node families live here.  `PalFormula` covers the per-frame epistemic
language: atoms, negation, conjunction, single-agent knowledge, distributed
group knowledge, and public announcements.  `TemporalFormula` wraps PAL
formulas as leaves (`Pal`) and adds negation, conjunction, Next and Until
over finite execution paths.

Everything beyond the core operators is sugar and is rewritten into core
nodes at construction time: or, implication and the constants at both
levels, plus Future / Globally / Release / WeakUntil at the temporal level.
The constants expand over a designated tautology atom so that any formula
built here can be printed and re-parsed losslessly.

The lowercase constructor helpers (`t_not`, `t_and`, ...) produce the
canonical shape the parser emits: a boolean combination of pure PAL operands
stays inside the PAL layer instead of being lifted node by node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .model import Atom


class PalFormula:
    """Base class for per-frame (epistemic) formulas."""

    __slots__ = ()


@dataclass(frozen=True)
class Prop(PalFormula):
    atom: Atom


@dataclass(frozen=True)
class PNot(PalFormula):
    operand: PalFormula


@dataclass(frozen=True)
class PAnd(PalFormula):
    left: PalFormula
    right: PalFormula


@dataclass(frozen=True)
class Knows(PalFormula):
    """K: the agent's whole indistinguishability block satisfies the operand."""

    agent: str
    operand: PalFormula


@dataclass(frozen=True)
class Dist(PalFormula):
    """D: the intersection of the group's blocks satisfies the operand."""

    agents: frozenset
    operand: PalFormula

    def __post_init__(self):
        agents = frozenset(self.agents)
        if not agents:
            raise ValueError("distributed knowledge needs a non-empty agent set")
        object.__setattr__(self, "agents", agents)


@dataclass(frozen=True)
class Announce(PalFormula):
    """[announced] operand: operand holds after truthfully announcing."""

    announced: PalFormula
    operand: PalFormula


@dataclass(frozen=True)
class Placeholder(PalFormula):
    """Template slot ?k; must be substituted away before evaluation."""

    index: int

    def __post_init__(self):
        if not isinstance(self.index, int) or self.index < 1:
            raise ValueError("placeholder index must be a positive integer")


class TemporalFormula:
    """Base class for path formulas."""

    __slots__ = ()


@dataclass(frozen=True)
class Pal(TemporalFormula):
    formula: PalFormula


@dataclass(frozen=True)
class TNot(TemporalFormula):
    operand: TemporalFormula


@dataclass(frozen=True)
class TAnd(TemporalFormula):
    left: TemporalFormula
    right: TemporalFormula


@dataclass(frozen=True)
class Next(TemporalFormula):
    operand: TemporalFormula


@dataclass(frozen=True)
class Until(TemporalFormula):
    left: TemporalFormula
    right: TemporalFormula


Formula = Union[PalFormula, TemporalFormula]

# The constants expand over this atom.  Its truth value never matters: the
# expansions are a contradiction and its negation.  The name is a plain
# identifier so printed formulas stay parseable.
TAUT_ATOM = Atom("_true_", "_true_")


def bottom() -> PalFormula:
    return PAnd(Prop(TAUT_ATOM), PNot(Prop(TAUT_ATOM)))


def top() -> PalFormula:
    return PNot(bottom())


def is_bottom(f: PalFormula) -> bool:
    return (
        isinstance(f, PAnd)
        and isinstance(f.left, Prop)
        and f.left.atom == TAUT_ATOM
        and f.right == PNot(f.left)
    )


def is_top(f: PalFormula) -> bool:
    return isinstance(f, PNot) and is_bottom(f.operand)


def p_or(a: PalFormula, b: PalFormula) -> PalFormula:
    return PNot(PAnd(PNot(a), PNot(b)))


def p_implies(a: PalFormula, b: PalFormula) -> PalFormula:
    return PNot(PAnd(a, PNot(b)))


def lift(f: Formula) -> TemporalFormula:
    """Embed a PAL formula as a temporal leaf; temporal input passes through."""
    if isinstance(f, PalFormula):
        return Pal(f)
    if isinstance(f, TemporalFormula):
        return f
    raise TypeError(f"not a formula: {f!r}")


def t_not(f: Formula) -> TemporalFormula:
    f = lift(f)
    if isinstance(f, Pal):
        return Pal(PNot(f.formula))
    return TNot(f)


def t_and(a: Formula, b: Formula) -> TemporalFormula:
    a, b = lift(a), lift(b)
    if isinstance(a, Pal) and isinstance(b, Pal):
        return Pal(PAnd(a.formula, b.formula))
    return TAnd(a, b)


def t_or(a: Formula, b: Formula) -> TemporalFormula:
    return t_not(t_and(t_not(a), t_not(b)))


def t_implies(a: Formula, b: Formula) -> TemporalFormula:
    return t_not(t_and(lift(a), t_not(b)))


def future(f: Formula) -> TemporalFormula:
    return Until(Pal(top()), lift(f))


def release(a: Formula, b: Formula) -> TemporalFormula:
    return t_not(Until(t_not(a), t_not(b)))


def globally(f: Formula) -> TemporalFormula:
    return release(Pal(bottom()), f)


def weak_until(a: Formula, b: Formula) -> TemporalFormula:
    return release(b, t_or(a, b))


def map_pal_leaves(f: TemporalFormula, fn) -> TemporalFormula:
    """Rebuild a temporal formula with `fn` applied to each PAL payload."""
    if isinstance(f, Pal):
        return Pal(fn(f.formula))
    if isinstance(f, TNot):
        return TNot(map_pal_leaves(f.operand, fn))
    if isinstance(f, TAnd):
        return TAnd(map_pal_leaves(f.left, fn), map_pal_leaves(f.right, fn))
    if isinstance(f, Next):
        return Next(map_pal_leaves(f.operand, fn))
    if isinstance(f, Until):
        return Until(map_pal_leaves(f.left, fn), map_pal_leaves(f.right, fn))
    raise TypeError(f"not a temporal formula: {f!r}")


def _map_pal(f: PalFormula, fn) -> PalFormula:
    if isinstance(f, (Prop, Placeholder)):
        return fn(f)
    if isinstance(f, PNot):
        return PNot(_map_pal(f.operand, fn))
    if isinstance(f, PAnd):
        return PAnd(_map_pal(f.left, fn), _map_pal(f.right, fn))
    if isinstance(f, Knows):
        return Knows(f.agent, _map_pal(f.operand, fn))
    if isinstance(f, Dist):
        return Dist(f.agents, _map_pal(f.operand, fn))
    if isinstance(f, Announce):
        return Announce(_map_pal(f.announced, fn), _map_pal(f.operand, fn))
    raise TypeError(f"not a PAL formula: {f!r}")


def placeholder_indices(f: Formula) -> frozenset:
    """Every ?k index occurring anywhere in the formula."""
    found: set[int] = set()

    def visit_pal(p):
        if isinstance(p, Placeholder):
            found.add(p.index)
        return p

    if isinstance(f, PalFormula):
        _map_pal(f, visit_pal)
    else:
        map_pal_leaves(f, lambda p: _map_pal(p, visit_pal))
    return frozenset(found)


def expand_groups(f: Formula, groups: Mapping[str, Iterable[str]]) -> Formula:
    """Replace declared group aliases inside D{...} agent sets by their members."""
    table = {name: tuple(members) for name, members in dict(groups or {}).items()}
    if not table:
        return f

    def visit_pal(p):
        if isinstance(p, Dist):
            expanded: set[str] = set()
            for name in p.agents:
                expanded.update(table.get(name, (name,)))
            return Dist(frozenset(expanded), visit_pal(p.operand))
        if isinstance(p, (Prop, Placeholder)):
            return p
        if isinstance(p, PNot):
            return PNot(visit_pal(p.operand))
        if isinstance(p, PAnd):
            return PAnd(visit_pal(p.left), visit_pal(p.right))
        if isinstance(p, Knows):
            return Knows(p.agent, visit_pal(p.operand))
        if isinstance(p, Announce):
            return Announce(visit_pal(p.announced), visit_pal(p.operand))
        raise TypeError(f"not a PAL formula: {p!r}")

    if isinstance(f, PalFormula):
        return visit_pal(f)
    return map_pal_leaves(f, visit_pal)


@dataclass(frozen=True)
class Template:
    """A temporal skeleton with numbered PAL slots ?1 ... ?arity.

    Every index from 1 to `arity` must occur at least once and no higher
    index may appear, so substitution is total.
    """

    skeleton: TemporalFormula
    arity: int

    def __post_init__(self):
        if not isinstance(self.skeleton, TemporalFormula):
            object.__setattr__(self, "skeleton", lift(self.skeleton))
        present = placeholder_indices(self.skeleton)
        wanted = frozenset(range(1, self.arity + 1))
        if present != wanted:
            missing = sorted(wanted - present)
            extra = sorted(present - wanted)
            parts = []
            if missing:
                parts.append("missing " + ", ".join(f"?{i}" for i in missing))
            if extra:
                parts.append("unexpected " + ", ".join(f"?{i}" for i in extra))
            raise ValueError(f"template of arity {self.arity}: " + "; ".join(parts))

    @classmethod
    def from_skeleton(cls, skeleton: Formula) -> "Template":
        """Infer the arity as the highest placeholder index present."""
        skeleton = lift(skeleton)
        present = placeholder_indices(skeleton)
        arity = max(present, default=0)
        return cls(skeleton, arity)


def substitute(template: Template, args: Sequence[PalFormula]) -> TemporalFormula:
    """Fill every ?k slot of the template with args[k-1]."""
    args = [Prop(a) if isinstance(a, Atom) else a for a in args]
    if len(args) != template.arity:
        raise ValueError(
            f"template needs {template.arity} argument(s), got {len(args)}"
        )
    for pos, arg in enumerate(args, 1):
        if not isinstance(arg, PalFormula):
            raise ValueError(f"argument {pos} is not a PAL formula: {arg!r}")
        if placeholder_indices(arg):
            raise ValueError(f"argument {pos} still contains placeholders")

    def fill(p):
        if isinstance(p, Placeholder):
            return args[p.index - 1]
        return p

    return map_pal_leaves(template.skeleton, lambda leaf: _map_pal(leaf, fill))
