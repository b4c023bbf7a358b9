"""Command-line interface.

Subcommands: build, paths, check, classify, mppe.  Results go to stdout as
one JSON object; notes and errors go to stderr.  Exit codes: 0 for true or
plain success, 1 for a false verdict, 2 for usage, input or parse errors,
3 for undecided (path cap reached before a decision).
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
from itertools import islice

from .classify import (
    DEFAULT_PATH_CAP,
    check_missing_info,
    check_possible_agent,
    check_possible_group,
    check_robust_agent,
    check_verified_group,
    quantify_paths,
)
from .errors import ConfigurationError, EvaluationError, IngestionError, ParseError
from .formulas import Template, expand_groups
from .mppe import ExternalScorer, most_probable_path, project_stream, score_edges
from .serialize import (
    build_from_files,
    ingest,
    load_candidates,
    load_scores,
    load_ts,
    save_ts,
)
from .syntax import parse_formula, parse_pal_formula, parse_template, pretty
from .temporal import tems
from .transition import build_ts, enumerate_total_paths, total_path_count

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_UNDECIDED = 3


def _emit(payload: dict) -> None:
    print(json.dumps(payload))


def _note(message: str) -> None:
    print(f"note: {message}", file=sys.stderr)


def _resolve_cap(flag) -> int:
    if flag is not None:
        if flag < 1:
            raise ConfigurationError("--cap must be at least 1")
        return flag
    env = os.environ.get("LTPAL_PATH_CAP")
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise ConfigurationError(
                f"LTPAL_PATH_CAP must be an integer, got {env!r}"
            ) from None
        if value < 1:
            raise ConfigurationError("LTPAL_PATH_CAP must be at least 1")
        return value
    return DEFAULT_PATH_CAP


def _split_atoms(text: str) -> list:
    """Split --atoms on top-level commas only, so D{a,b} stays intact."""
    parts = []
    depth = 0
    current: list = []
    for ch in text:
        if ch in "{[(":
            depth += 1
        elif ch in "}])":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    parts = [p.strip() for p in parts]
    if not parts or any(not p for p in parts):
        raise IngestionError("--atoms must be a comma-separated list of PAL formulas")
    return parts


def _expand_group_arg(value: str, groups: dict) -> tuple:
    names = [n.strip() for n in value.split(",")]
    if any(not n for n in names):
        raise IngestionError("--group must be a comma-separated list of agent or group names")
    members = []
    for name in names:
        members.extend(groups.get(name, (name,)))
    return tuple(dict.fromkeys(members))


def _mppe_table(ts, embedded, scores_path, *, note_fallback: bool):
    if scores_path is not None:
        return load_scores(scores_path, ts)
    if embedded is not None:
        return embedded
    if note_fallback:
        _note("no edge scores supplied; using the built-in overlap scorer")
    return score_edges(ts)


def _cmd_build(args) -> int:
    doc = ingest(args.frames, args.rules)
    ts = build_ts(doc.frames, groups=doc.groups or None)
    original = [tuple(w.id for w in frame.worlds) for frame in doc.frames]
    renamed = [tuple(w.id for w in layer.worlds) for layer in ts.real_layers]
    if original != renamed:
        _note("frame world ids were prefixed by layer to keep them unique")
    save_ts(ts, args.output)
    _emit({
        "frames": len(ts.real_layers),
        "states": ts.state_count,
        "edges": ts.edge_count,
        "total_paths": total_path_count(ts),
        "output": args.output,
    })
    return EXIT_TRUE


def _cmd_paths(args) -> int:
    ts, _ = load_ts(args.ts)
    total = total_path_count(ts)
    limit = args.max if args.max is not None else 10_000
    paths = [list(p.worlds) for p in islice(enumerate_total_paths(ts), limit)]
    _emit({"count": total, "paths": paths, "truncated": total > len(paths)})
    return EXIT_TRUE


def _cmd_check(args) -> int:
    ts, embedded = load_ts(args.ts)
    formula = expand_groups(parse_formula(args.formula), ts.groups)
    if args.scores is not None and not args.mppe_only:
        raise ConfigurationError("--scores is only used together with --mppe-only")

    if args.path_index is not None:
        path = next(islice(enumerate_total_paths(ts), args.path_index, None), None)
        if path is None:
            raise ConfigurationError(
                f"--path-index {args.path_index} is out of range "
                f"(the system has {total_path_count(ts)} total paths)"
            )
        value = tems(ts, path.suffix(1) if args.skip_dummies else path, formula)
        _emit({
            "mode": "path",
            "formula": pretty(formula),
            "path_index": args.path_index,
            "path": list(path.worlds),
            "result": value,
        })
        return EXIT_TRUE if value else EXIT_FALSE

    if args.mppe_only:
        table = _mppe_table(ts, embedded, args.scores, note_fallback=True)
        scored = most_probable_path(ts, table)
        path = scored.path
        value = tems(ts, path.suffix(1) if args.skip_dummies else path, formula)
        _emit({
            "mode": "mppe-only",
            "formula": pretty(formula),
            "path": list(path.worlds),
            "score": scored.score,
            "result": value,
        })
        return EXIT_TRUE if value else EXIT_FALSE

    cap = _resolve_cap(args.cap)
    result, witness, checked, capped = quantify_paths(
        ts, formula, universal=True, path_cap=cap, skip_dummies=args.skip_dummies,
    )
    _emit({
        "mode": "all",
        "formula": pretty(formula),
        "result": result,
        "witness": list(witness.worlds) if witness is not None else None,
        "paths_checked": checked,
        "capped": capped,
    })
    if result is None:
        return EXIT_UNDECIDED
    return EXIT_TRUE if result else EXIT_FALSE


def _cmd_classify(args) -> int:
    ts, embedded = load_ts(args.ts)
    groups = ts.groups
    template = parse_template(args.template)
    template = Template(expand_groups(template.skeleton, groups), template.arity)
    atoms = [
        expand_groups(parse_pal_formula(text), groups)
        for text in _split_atoms(args.atoms)
    ]
    missing_mode = args.mode in ("missing-verified", "missing-possible")
    if args.scores is not None and not args.mppe_only:
        raise ConfigurationError("--scores is only used together with --mppe-only")
    if args.candidates is not None and not missing_mode:
        raise ConfigurationError("--candidates is only used by the missing-* modes")

    group = _expand_group_arg(args.group, groups) if args.group is not None else None
    agent = args.agent
    if args.mode in ("verified", "possible") and group is None:
        raise ConfigurationError(f"mode {args.mode!r} needs --group")
    if args.mode in ("robust", "possible-agent") and agent is None:
        raise ConfigurationError(f"mode {args.mode!r} needs --agent")

    kwargs = {
        "path_cap": _resolve_cap(args.cap),
        "skip_dummies": args.skip_dummies,
    }
    if args.mppe_only:
        table = _mppe_table(ts, embedded, args.scores, note_fallback=True)
        kwargs["paths"] = [most_probable_path(ts, table).path]

    if missing_mode:
        if args.candidates is None:
            raise ConfigurationError(f"mode {args.mode!r} needs --candidates")
        candidates = [expand_groups(c, groups) for c in load_candidates(args.candidates)]
        kind = "verified" if args.mode == "missing-verified" else "possible"
        report = check_missing_info(
            ts, template, atoms, candidates,
            group=group, agent=agent, kind=kind, **kwargs,
        )
    elif args.mode == "verified":
        report = check_verified_group(ts, template, atoms, group, **kwargs)
    elif args.mode == "possible":
        report = check_possible_group(ts, template, atoms, group, **kwargs)
    elif args.mode == "robust":
        report = check_robust_agent(ts, template, atoms, agent, **kwargs)
    else:
        report = check_possible_agent(ts, template, atoms, agent, **kwargs)

    _emit(report.to_json_dict())
    if report.result is None:
        return EXIT_UNDECIDED
    return EXIT_TRUE if report.result else EXIT_FALSE


def _cmd_mppe(args) -> int:
    ts, embedded = load_ts(args.ts)
    if args.scores is not None:
        table = load_scores(args.scores, ts)
    elif args.scorer_cmd is not None:
        with ExternalScorer(shlex.split(args.scorer_cmd)) as scorer:
            table = score_edges(ts, scorer)
    elif args.scorer is not None:
        table = score_edges(ts)
    elif embedded is not None:
        table = embedded
    else:
        _note("no edge scores supplied; using the built-in overlap scorer")
        table = score_edges(ts)
    scored = most_probable_path(ts, table)
    corrected = [
        {
            "frame": choice.frame,
            "world": choice.world,
            "atoms": [[a.data_id, a.class_id] for a in choice.atoms],
        }
        for choice in project_stream(ts, scored)
    ]
    payload = {
        "path": list(scored.path.worlds),
        "score": scored.score,
        "log_score": scored.log_score,
        "corrected": corrected,
    }
    if args.emit_corrected is not None:
        with open(args.emit_corrected, "w") as handle:
            json.dump({"corrected": corrected}, handle, indent=2)
            handle.write("\n")
    _emit(payload)
    return EXIT_TRUE


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltpal",
        description="Epistemic-temporal model checking over classifier frame streams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="assemble a transition system from frames")
    build.add_argument("--frames", required=True, help="frames JSON file")
    build.add_argument("--rules", help="ontology rules JSON file")
    build.add_argument("--output", required=True, help="where to write the system JSON")
    build.set_defaults(func=_cmd_build)

    paths = sub.add_parser("paths", help="enumerate total paths in lexicographic order")
    paths.add_argument("--ts", required=True, help="system JSON file")
    paths.add_argument("--max", type=int, help="cap on listed paths (default 10000)")
    paths.set_defaults(func=_cmd_paths)

    check = sub.add_parser("check", help="evaluate a temporal formula")
    check.add_argument("--ts", required=True, help="system JSON file")
    check.add_argument("--formula", required=True, help="temporal formula text")
    check.add_argument("--path-index", type=int,
                       help="evaluate on the n-th total path (0-based) instead of all")
    check.add_argument("--mppe-only", action="store_true",
                       help="evaluate on the most probable path only")
    check.add_argument("--scores", help="edge scores JSON (with --mppe-only)")
    check.add_argument("--cap", type=int, help="path enumeration cap")
    check.add_argument("--skip-dummies", action="store_true",
                       help="evaluate from the first real frame")
    check.set_defaults(func=_cmd_check)

    classify = sub.add_parser("classify", help="run a reliability verdict")
    classify.add_argument("--ts", required=True, help="system JSON file")
    classify.add_argument(
        "--mode", required=True,
        choices=["verified", "possible", "robust", "possible-agent",
                 "missing-verified", "missing-possible"],
    )
    classify.add_argument("--template", required=True,
                          help="temporal template with ?1, ?2, ... slots")
    classify.add_argument("--atoms", required=True,
                          help="comma-separated PAL formulas filling the slots")
    who = classify.add_mutually_exclusive_group(required=True)
    who.add_argument("--group", help="agent group (comma-separated ids or a group alias)")
    who.add_argument("--agent", help="single agent id")
    classify.add_argument("--candidates", help="candidate announcements JSON (missing-* modes)")
    classify.add_argument("--cap", type=int, help="path enumeration cap")
    classify.add_argument("--skip-dummies", action="store_true",
                          help="evaluate from the first real frame")
    classify.add_argument("--mppe-only", action="store_true",
                          help="restrict the verdict to the most probable path")
    classify.add_argument("--scores", help="edge scores JSON (with --mppe-only)")
    classify.set_defaults(func=_cmd_classify)

    mppe = sub.add_parser("mppe", help="extract the most probable path")
    mppe.add_argument("--ts", required=True, help="system JSON file")
    source = mppe.add_mutually_exclusive_group()
    source.add_argument("--scores", help="edge scores JSON file")
    source.add_argument("--scorer-cmd",
                        help="external scorer command (line-protocol subprocess)")
    source.add_argument("--scorer", choices=["overlap"],
                        help="force the built-in scorer even if scores are embedded")
    mppe.add_argument("--emit-corrected", help="also write the corrected stream JSON here")
    mppe.set_defaults(func=_cmd_mppe)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IngestionError, EvaluationError, ConfigurationError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
