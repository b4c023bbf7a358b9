"""Satisfaction for the per-frame epistemic language.

Knowledge is truth across an agent's whole indistinguishability block;
distributed group knowledge intersects the group's blocks.  A public
announcement [psi] restricts the model to the worlds satisfying psi and is
vacuously true wherever psi fails, so evaluation never leaves the surviving
submodel.
"""

from __future__ import annotations

from .errors import EvaluationError
from .formulas import (
    Announce,
    Dist,
    Knows,
    PAnd,
    Placeholder,
    PNot,
    PalFormula,
    Prop,
)
from .model import PALModel


def pal_sat(model: PALModel, world_id: str, formula: PalFormula) -> bool:
    """Does `formula` hold at `world_id` of `model`?"""
    world = model.world(world_id)  # fail fast on unknown ids
    if isinstance(formula, Prop):
        return formula.atom in world.atoms
    if isinstance(formula, PNot):
        return not pal_sat(model, world_id, formula.operand)
    if isinstance(formula, PAnd):
        return pal_sat(model, world_id, formula.left) and pal_sat(
            model, world_id, formula.right
        )
    if isinstance(formula, Knows):
        block = model.block(formula.agent, world_id)
        return all(pal_sat(model, v, formula.operand) for v in sorted(block))
    if isinstance(formula, Dist):
        block = group_block(model, formula.agents, world_id)
        return all(pal_sat(model, v, formula.operand) for v in sorted(block))
    if isinstance(formula, Announce):
        if not pal_sat(model, world_id, formula.announced):
            return True
        updated = announce_update(model, formula.announced)
        return pal_sat(updated, world_id, formula.operand)
    if isinstance(formula, Placeholder):
        raise EvaluationError(
            f"placeholder ?{formula.index} cannot be evaluated; substitute template arguments first"
        )
    raise EvaluationError(f"not a PAL formula: {formula!r}")


def announce_update(model: PALModel, announced: PalFormula) -> PALModel:
    """Submodel over the worlds where `announced` holds.

    Atom sets are untouched and partitions are intersected with the survivor
    set.  The result may have no worlds at all.
    """
    survivors = frozenset(
        w.id for w in model.worlds if pal_sat(model, w.id, announced)
    )
    return model.restricted(survivors)


def group_block(model: PALModel, group, world_id: str) -> frozenset:
    """Worlds no member of `group` can rule out at `world_id`.

    The intersection of the members' blocks; it always contains `world_id`
    itself because every block does.
    """
    agents = sorted(frozenset(group))
    if not agents:
        raise EvaluationError("group must contain at least one agent")
    block = model.block(agents[0], world_id)
    for agent in agents[1:]:
        block = block & model.block(agent, world_id)
    return block
