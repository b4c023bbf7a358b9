"""Edge scoring and most-probable-path extraction.

Every adjacent pair of layers is completely connected, so a total path picks
one world per layer and its probability is the product of its edge scores.
The extraction runs a max-product dynamic program in log space, one score
lookup per edge, and breaks ties toward the lexicographically smaller
predecessor id, which makes the reported path deterministic.
"""

from __future__ import annotations

import json
import math
import subprocess
from dataclasses import dataclass
from typing import Callable, Mapping, Tuple

from .errors import ConfigurationError, IngestionError
from .transition import ExecPath, TransitionSystem

SCORE_FLOOR = 1e-6

Scorer = Callable[[frozenset, frozenset], float]


def class_labels(ts: TransitionSystem, world_id: str) -> frozenset:
    """Class ids asserted at a world, ignoring which stream they came from."""
    return frozenset(atom.class_id for atom in ts.label(world_id))


def overlap_score(a: frozenset, b: frozenset) -> float:
    """Jaccard overlap of two class-id sets; two empty sets count as equal."""
    union = a | b
    if not union:
        return 1.0
    return len(a & b) / len(union)


class ScoreTable:
    """Immutable edge-to-score mapping with validated score range."""

    def __init__(self, scores: Mapping[Tuple[str, str], float]):
        table = {}
        for edge, value in scores.items():
            u, v = edge
            score = float(value)
            if math.isnan(score) or not 0.0 < score <= 1.0:
                raise IngestionError(
                    f"score for edge {u!r} -> {v!r} must be in (0, 1], got {value!r}"
                )
            table[(str(u), str(v))] = score
        self._scores = table

    def __getitem__(self, edge: Tuple[str, str]) -> float:
        try:
            return self._scores[edge]
        except KeyError:
            u, v = edge
            raise IngestionError(f"no score for edge {u!r} -> {v!r}") from None

    def get(self, u: str, v: str) -> float:
        return self[(u, v)]

    def items(self):
        return self._scores.items()

    def __len__(self) -> int:
        return len(self._scores)

    def __contains__(self, edge) -> bool:
        return edge in self._scores

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScoreTable):
            return NotImplemented
        return self._scores == other._scores

    def validate_covers(self, ts: TransitionSystem) -> None:
        """Require a score for every edge of the system."""
        for u, v in ts.edges():
            if (u, v) not in self._scores:
                raise IngestionError(f"no score for edge {u!r} -> {v!r}")


def score_edges(ts: TransitionSystem, scorer: Scorer = overlap_score) -> ScoreTable:
    """Score every edge with `scorer` over the endpoint class-label sets.

    Edges touching the synthetic first or last layer always score 1.0 so the
    endpoints never perturb the product.  Scorer results are clamped into
    [SCORE_FLOOR, 1.0]; NaN or negative results are configuration errors.
    """
    last = len(ts.layers) - 1
    scores = {}
    for u, v in ts.edges():
        if ts.layer_index(u) == 0 or ts.layer_index(v) == last:
            scores[(u, v)] = 1.0
            continue
        raw = scorer(class_labels(ts, u), class_labels(ts, v))
        try:
            raw = float(raw)
        except (TypeError, ValueError):
            raise ConfigurationError(
                f"scorer returned a non-number for edge {u!r} -> {v!r}: {raw!r}"
            ) from None
        if math.isnan(raw):
            raise ConfigurationError(f"scorer returned NaN for edge {u!r} -> {v!r}")
        if raw < 0:
            raise ConfigurationError(
                f"scorer returned a negative score for edge {u!r} -> {v!r}: {raw!r}"
            )
        scores[(u, v)] = min(1.0, max(SCORE_FLOOR, raw))
    return ScoreTable(scores)


@dataclass(frozen=True)
class ScoredPath:
    path: ExecPath
    score: float
    log_score: float


@dataclass(frozen=True)
class FrameChoice:
    """The world selected for one input frame, with its atoms."""

    frame: int
    world: str
    atoms: tuple


def most_probable_path(ts: TransitionSystem, table: ScoreTable) -> ScoredPath:
    """Highest-product total path under `table`, by layered max-product DP.

    Each edge's score is looked up exactly once.  Ties between equal-scoring
    predecessors go to the lexicographically smaller world id, so over an
    all-ties table the result is the lexicographically least total path.
    """
    layers = ts.layers
    best = {ts.s0: 0.0}
    parent: dict = {}
    for lower, upper in zip(layers, layers[1:]):
        following = {}
        for v in upper.worlds:
            best_log = None
            best_pred = None
            for u in lower.worlds:
                weight = table[(u.id, v.id)]
                candidate = best[u.id] + math.log(weight)
                if (
                    best_pred is None
                    or candidate > best_log
                    or (candidate == best_log and u.id < best_pred)
                ):
                    best_log = candidate
                    best_pred = u.id
            following[v.id] = best_log
            parent[v.id] = best_pred
        best = following
    ids = [ts.s_minus1]
    while ids[-1] != ts.s0:
        ids.append(parent[ids[-1]])
    ids.reverse()
    log_score = best[ts.s_minus1]
    return ScoredPath(ts.path(ids), math.exp(log_score), log_score)


def project_stream(ts: TransitionSystem, scored: ScoredPath) -> tuple:
    """Corrected per-frame choices along a total path (frames are 1-based)."""
    real = scored.path.worlds[1:-1]
    return tuple(
        FrameChoice(frame, wid, tuple(sorted(ts.label(wid))))
        for frame, wid in enumerate(real, 1)
    )


def correct_stream(ts: TransitionSystem, table: ScoreTable) -> tuple:
    """Most probable per-frame world choice for each input frame."""
    return project_stream(ts, most_probable_path(ts, table))


class ExternalScorer:
    """Similarity scorer backed by a line-protocol subprocess.

    For each edge the scorer writes one JSON object per line to the child's
    stdin, `{"a": [...], "b": [...]}` with sorted class-id lists, and reads
    one JSON reply per line, `{"score": x}`.  Protocol violations raise
    ConfigurationError.
    """

    def __init__(self, command):
        self._command = list(command)
        if not self._command:
            raise ConfigurationError("external scorer command must not be empty")
        try:
            self._proc = subprocess.Popen(
                self._command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
            )
        except OSError as exc:
            raise ConfigurationError(
                f"could not start external scorer {self._command[0]!r}: {exc}"
            ) from None

    def __call__(self, a: frozenset, b: frozenset) -> float:
        request = json.dumps({"a": sorted(a), "b": sorted(b)})
        try:
            self._proc.stdin.write(request + "\n")
            self._proc.stdin.flush()
            line = self._proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise ConfigurationError(f"external scorer pipe failed: {exc}") from None
        if not line:
            raise ConfigurationError("external scorer closed its output")
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(
                f"external scorer sent invalid JSON: {exc}"
            ) from None
        if not isinstance(reply, dict) or "score" not in reply:
            raise ConfigurationError(
                f"external scorer reply is missing a 'score' field: {line.strip()!r}"
            )
        value = reply["score"]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigurationError(
                f"external scorer score is not a number: {value!r}"
            )
        return float(value)

    def close(self) -> None:
        if self._proc.stdin:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
        self._proc.terminate()
        self._proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()
        return False
