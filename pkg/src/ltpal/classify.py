"""Reliability verdicts for query templates over all total paths.

A template's slots are filled with the queried atoms, each wrapped in an
epistemic modality, and the resulting formula is quantified over every total
execution path:

* verified (group):   D_A around each slot, all paths must satisfy;
* possible (group):   "group cannot rule out", some path must satisfy;
* robust (agent):     K_i around each slot, all paths;
* possible (agent):   "agent cannot rule out", some path.

The missing-information variants ask whether announcing one of the supplied
candidate formulas would repair a query that currently fails: the base check
must fail in the required way, and the announcement-wrapped template must
then pass with the required quantifier.

Path enumeration is capped; hitting the cap without a decision yields an
explicit undecided report rather than a silently truncated answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EvaluationError
from .formulas import (
    Announce,
    Dist,
    Knows,
    PNot,
    PalFormula,
    Prop,
    Template,
    TemporalFormula,
    placeholder_indices,
    substitute,
)
from .model import Atom
from .syntax import pretty
from .temporal import tems
from .transition import ExecPath, TransitionSystem, enumerate_total_paths

DEFAULT_PATH_CAP = 1_000_000


@dataclass(frozen=True)
class VerdictReport:
    """Outcome of one verdict check.

    `path` carries the witness for existential modes and the counterexample
    for failed universal modes.  `result` is None when the path cap was hit
    before a decision; `capped` is then True.  For missing-information modes
    `qualifying` lists the candidate announcements confirmed to repair the
    query.
    """

    mode: str
    result: bool | None
    path: ExecPath | None
    paths_checked: int
    capped: bool
    group: tuple | None = None
    agent: str | None = None
    qualifying: tuple = ()
    restricted: bool = False

    def to_json_dict(self) -> dict:
        data: dict = {"mode": self.mode}
        if self.group is not None:
            data["group"] = list(self.group)
        if self.agent is not None:
            data["agent"] = self.agent
        data["result"] = self.result
        data["witness"] = list(self.path.worlds) if self.path is not None else None
        data["paths_checked"] = self.paths_checked
        data["capped"] = self.capped
        if self.mode.startswith("missing_"):
            data["qualifying"] = [pretty(f) for f in self.qualifying]
        if self.restricted:
            data["restricted"] = True
        return data


def quantify_paths(
    ts: TransitionSystem,
    formula: TemporalFormula,
    *,
    universal: bool,
    path_cap: int | None = None,
    paths: Iterable[ExecPath] | None = None,
    skip_dummies: bool = False,
):
    """Evaluate `formula` over paths until decided, exhausted or capped.

    Returns (result, decisive_path, paths_checked, capped).  Paths come from
    the lexicographic total-path enumeration unless `paths` is supplied, so
    the decisive path is always the enumeration-least one.  With
    `skip_dummies` each path is evaluated from its second world, but the
    reported path is the original.
    """
    cap = DEFAULT_PATH_CAP if path_cap is None else int(path_cap)
    if cap < 1:
        raise ValueError("path cap must be at least 1")
    source = enumerate_total_paths(ts) if paths is None else iter(paths)
    checked = 0
    for path in source:
        if checked >= cap:
            return None, None, checked, True
        checked += 1
        value = tems(ts, path.suffix(1) if skip_dummies else path, formula)
        if universal and not value:
            return False, path, checked, False
        if not universal and value:
            return True, path, checked, False
    if universal:
        return True, None, checked, False
    return False, None, checked, False


def _normalize_args(atoms) -> list:
    args = []
    for pos, value in enumerate(list(atoms), 1):
        if isinstance(value, Atom):
            value = Prop(value)
        if not isinstance(value, PalFormula):
            raise ValueError(f"query argument {pos} is not a PAL formula: {value!r}")
        if placeholder_indices(value):
            raise ValueError(f"query argument {pos} still contains placeholders")
        args.append(value)
    return args


def _require_agents(ts: TransitionSystem, agents: Iterable[str]) -> None:
    roster = set(ts.agents)
    for agent in agents:
        if agent not in roster:
            raise EvaluationError(f"unknown agent {agent!r}")


def check_verified_group(ts, template: Template, atoms, group, **kwargs) -> VerdictReport:
    """All paths must satisfy the template with D_group around each slot."""
    group = tuple(group)
    if not group:
        raise EvaluationError("group must contain at least one agent")
    _require_agents(ts, group)
    members = frozenset(group)
    args = [Dist(members, a) for a in _normalize_args(atoms)]
    wrapped = substitute(template, args)
    result, path, checked, capped = quantify_paths(ts, wrapped, universal=True, **kwargs)
    return VerdictReport(
        mode="verified_group",
        result=result,
        path=path,
        paths_checked=checked,
        capped=capped,
        group=group,
        restricted=kwargs.get("paths") is not None,
    )


def check_possible_group(ts, template: Template, atoms, group, **kwargs) -> VerdictReport:
    """Some path must satisfy the template with "group cannot rule out" slots."""
    group = tuple(group)
    if not group:
        raise EvaluationError("group must contain at least one agent")
    _require_agents(ts, group)
    members = frozenset(group)
    args = [PNot(Dist(members, PNot(a))) for a in _normalize_args(atoms)]
    wrapped = substitute(template, args)
    result, path, checked, capped = quantify_paths(ts, wrapped, universal=False, **kwargs)
    return VerdictReport(
        mode="possible_group",
        result=result,
        path=path,
        paths_checked=checked,
        capped=capped,
        group=group,
        restricted=kwargs.get("paths") is not None,
    )


def check_robust_agent(ts, template: Template, atoms, agent: str, **kwargs) -> VerdictReport:
    """All paths must satisfy the template with K_agent around each slot."""
    _require_agents(ts, [agent])
    args = [Knows(agent, a) for a in _normalize_args(atoms)]
    wrapped = substitute(template, args)
    result, path, checked, capped = quantify_paths(ts, wrapped, universal=True, **kwargs)
    return VerdictReport(
        mode="robust_agent",
        result=result,
        path=path,
        paths_checked=checked,
        capped=capped,
        agent=agent,
        restricted=kwargs.get("paths") is not None,
    )


def check_possible_agent(ts, template: Template, atoms, agent: str, **kwargs) -> VerdictReport:
    """Some path must satisfy the template with "agent cannot rule out" slots."""
    _require_agents(ts, [agent])
    args = [PNot(Knows(agent, PNot(a))) for a in _normalize_args(atoms)]
    wrapped = substitute(template, args)
    result, path, checked, capped = quantify_paths(ts, wrapped, universal=False, **kwargs)
    return VerdictReport(
        mode="possible_agent",
        result=result,
        path=path,
        paths_checked=checked,
        capped=capped,
        agent=agent,
        restricted=kwargs.get("paths") is not None,
    )


def check_missing_info(
    ts,
    template: Template,
    atoms,
    candidates: Sequence[PalFormula],
    *,
    group=None,
    agent: str | None = None,
    kind: str = "verified",
    path_cap: int | None = None,
    paths: Iterable[ExecPath] | None = None,
    skip_dummies: bool = False,
) -> VerdictReport:
    """Which candidate announcements would repair the failing query?

    For kind="verified" the base check (D/K wrapped, universal) must have
    some failing path, and announcing a qualifying candidate must make the
    announcement-wrapped template hold on every path.  For kind="possible"
    the base check (cannot-rule-out wrapped, existential) must fail on all
    paths, and a qualifying announcement must recover some satisfying path.
    """
    if (group is None) == (agent is None):
        raise ValueError("exactly one of group or agent must be given")
    if kind not in ("verified", "possible"):
        raise ValueError(f"kind must be 'verified' or 'possible', got {kind!r}")
    candidates = list(candidates)
    if not candidates:
        raise ValueError("missing-information checks need a non-empty candidate list")
    for pos, candidate in enumerate(candidates, 1):
        if not isinstance(candidate, PalFormula):
            raise ValueError(f"candidate {pos} is not a PAL formula: {candidate!r}")

    if group is not None:
        group = tuple(group)
        if not group:
            raise EvaluationError("group must contain at least one agent")
        _require_agents(ts, group)
        members = frozenset(group)
        wrap = lambda a: Dist(members, a)
    else:
        _require_agents(ts, [agent])
        wrap = lambda a: Knows(agent, a)
    if kind == "possible":
        plain_wrap = wrap
        wrap = lambda a: PNot(plain_wrap(PNot(a)))

    args = _normalize_args(atoms)
    universal = kind == "verified"
    mode = f"missing_{kind}"
    restricted = paths is not None
    path_list = list(paths) if restricted else None

    def run(formula, want_universal):
        source = list(path_list) if path_list is not None else None
        return quantify_paths(
            ts,
            formula,
            universal=want_universal,
            path_cap=path_cap,
            paths=source,
            skip_dummies=skip_dummies,
        )

    base = substitute(template, [wrap(a) for a in args])
    base_result, _, base_checked, base_capped = run(base, universal)
    checked = base_checked
    if base_capped:
        return VerdictReport(
            mode=mode, result=None, path=None, paths_checked=checked,
            capped=True, group=group, agent=agent, restricted=restricted,
        )
    # The base query must currently fail: no counterexample-free universal
    # run (verified) respectively no witness at all (possible).
    if base_result:
        return VerdictReport(
            mode=mode, result=False, path=None, paths_checked=checked,
            capped=False, group=group, agent=agent, restricted=restricted,
        )

    qualifying = []
    hit_cap = False
    for candidate in candidates:
        wrapped = substitute(
            template, [Announce(candidate, wrap(a)) for a in args]
        )
        result, _, sub_checked, capped = run(wrapped, universal)
        checked += sub_checked
        if capped:
            hit_cap = True
            continue
        if result:
            qualifying.append(candidate)

    if hit_cap:
        return VerdictReport(
            mode=mode, result=None, path=None, paths_checked=checked,
            capped=True, group=group, agent=agent,
            qualifying=tuple(qualifying), restricted=restricted,
        )
    return VerdictReport(
        mode=mode,
        result=bool(qualifying),
        path=None,
        paths_checked=checked,
        capped=False,
        group=group,
        agent=agent,
        qualifying=tuple(qualifying),
        restricted=restricted,
    )
