"""Finite-path satisfaction for the temporal layer.

A formula is evaluated against an execution path.  PAL leaves are checked at
the path's first world, inside that world's own layer model.  Next moves one
world forward; Until scans forward for a position where its right operand
holds while the left operand holds strictly before it.

The empty path satisfies nothing, including negations: emptiness is checked
before any connective is examined.  Results are memoised per call, keyed by
(position, subformula identity).
"""

from __future__ import annotations

from .errors import EvaluationError
from .formulas import Formula, Next, Pal, TAnd, TNot, Until, lift
from .pal import pal_sat
from .transition import ExecPath, TransitionSystem


def tems(ts: TransitionSystem, path: ExecPath, formula: Formula) -> bool:
    """Does `formula` hold on `path` (evaluated from its first world)?"""
    root = lift(formula)
    worlds = path.worlds
    end = len(worlds)
    memo: dict = {}

    def ev(pos: int, f) -> bool:
        if pos >= end:
            return False
        key = (pos, id(f))
        cached = memo.get(key)
        if cached is not None:
            return cached
        if isinstance(f, Pal):
            model = ts.model_of(worlds[pos])
            value = pal_sat(model, worlds[pos], f.formula)
        elif isinstance(f, TNot):
            value = not ev(pos, f.operand)
        elif isinstance(f, TAnd):
            value = ev(pos, f.left) and ev(pos, f.right)
        elif isinstance(f, Next):
            value = ev(pos + 1, f.operand)
        elif isinstance(f, Until):
            value = False
            for m in range(pos, end):
                if ev(m, f.right):
                    value = True
                    break
                if not ev(m, f.left):
                    break
        else:
            raise EvaluationError(f"not a temporal formula: {f!r}")
        memo[key] = value
        return value

    return ev(0, root)
