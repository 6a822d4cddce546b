"""Command line front end.

    knowcast check model.kc "K{i} K{k} p"      truth of a formula at the
                                               model file's state
    knowcast states model.kc --count           enumerate or count states
    knowcast validate model.kc                 explain why a state is (in)valid
    knowcast explain model.kc -m "j -> {j,i} : p"
                                               chain justifying one message
    knowcast laws                              run the law catalog
    knowcast examples --dir out                emit the bundled model files

Exit codes: 0 true / valid / all laws as expected, 1 false / invalid /
law deviation, 2 bad input, 3 state space over the cap, 4 unknown under
a bounded run.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from typing import List, Optional

from .builtin_models import BUILTIN_NAMES, builtin
from .core import (
    Knowledge,
    KnowcastError,
    Mode,
    find_explanation,
    validate_state,
)
from .formula import classify, parse, render
from .laws import DEFAULT_RANDOM_BUDGET, LAW_IDS, LAWS, run_suite
from .modelfile import (
    ModelFile,
    parse_message_text,
    parse_model_file,
    write_model_text,
)
from .semantics import (
    DEFAULT_CAP,
    CapExceededError,
    Verdict3,
    enumerate_states,
    enumerate_states_bounded,
    get_evaluator,
    holds,
    holds_bounded,
    holds_positive_fast,
)

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_INPUT = 2
EXIT_CAP = 3
EXIT_UNKNOWN = 4


def _build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "json"), default="text",
                     help="output format (default text)")

    overrides = argparse.ArgumentParser(add_help=False)
    overrides.add_argument("--mode", choices=("telling", "forwarding"),
                           help="override the model file's mode")
    overrides.add_argument("--knowledge", choices=("common", "unknown"),
                           help="override whether the hypergraph is commonly known")

    cap = argparse.ArgumentParser(add_help=False)
    cap.add_argument("--max-states", type=int, default=DEFAULT_CAP, metavar="N",
                     help="refuse enumeration beyond N candidate states "
                          "(default %d)" % DEFAULT_CAP)

    parser = argparse.ArgumentParser(
        prog="knowcast",
        description="model checking of knowledge after broadcasts over a hypergraph")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[fmt, overrides, cap],
                       help="evaluate a formula at the model file's state")
    p.add_argument("model", help="model file")
    p.add_argument("formula", nargs="?", help="formula text")
    p.add_argument("-f", "--formula-file", help="read the formula from a file")
    p.add_argument("--bound", type=int, metavar="K",
                   help="three-valued run over states with at most K messages")
    p.add_argument("--witness", action="store_true",
                   help="on false, show a refuted operator and a path to a "
                        "refuting state")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("states", parents=[fmt, overrides, cap],
                       help="enumerate the valid states of a model")
    p.add_argument("model", help="model file")
    p.add_argument("--count", action="store_true", help="print only the count")
    p.add_argument("--bound", type=int, metavar="K",
                   help="only states with at most K messages")
    p.set_defaults(func=_cmd_states)

    p = sub.add_parser("validate", parents=[fmt, overrides],
                       help="check the model file's state and report violations")
    p.add_argument("model", help="model file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("explain", parents=[fmt, overrides],
                       help="trace a message of the state back to the atom's owner")
    p.add_argument("model", help="model file")
    p.add_argument("-m", "--message", required=True,
                   help="message in file syntax, e.g. 'j -> {j,i} : p'")
    p.set_defaults(func=_cmd_explain)

    p = sub.add_parser("laws", parents=[fmt],
                       help="check the law catalog over generated instances")
    p.add_argument("laws", nargs="*", metavar="LAW",
                   help="law ids to run (default: all)")
    p.add_argument("--list", action="store_true", help="list the catalog and exit")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--budget", type=int, metavar="N",
                   help="random instances per law (default %d)" % DEFAULT_RANDOM_BUDGET)
    p.add_argument("--witness", action="store_true",
                   help="include witnesses in text output")
    p.add_argument("--report-dir", metavar="DIR",
                   help="write laws.csv and figures into DIR")
    p.set_defaults(func=_cmd_laws)

    p = sub.add_parser("examples", parents=[fmt],
                       help="list or emit the bundled example models")
    p.add_argument("name", nargs="?", choices=BUILTIN_NAMES,
                   help="print this example instead of listing")
    p.add_argument("--dir", metavar="DIR",
                   help="write example files into DIR instead of printing")
    p.set_defaults(func=_cmd_examples)

    return parser


def _load(args) -> ModelFile:
    mf = parse_model_file(args.model)
    model = mf.model
    if getattr(args, "mode", None):
        model = replace(model, mode=Mode(args.mode))
    if getattr(args, "knowledge", None):
        model = replace(model, knowledge=Knowledge(args.knowledge))
    return ModelFile(model, mf.state)


def _print_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def _cmd_check(args) -> int:
    mf = _load(args)
    model, s = mf.model, mf.state
    if (args.formula is None) == (args.formula_file is None):
        raise KnowcastError("give exactly one of a formula argument or --formula-file")
    if args.formula_file is not None:
        with open(args.formula_file, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = args.formula
    phi = parse(model, text)

    started = time.perf_counter()
    if args.bound is not None:
        verdict = holds_bounded(model, s, phi, args.bound, args.max_states)
        engine = "bounded"
    else:
        try:
            value = holds(model, s, phi, args.max_states)
            engine = "exact"
        except CapExceededError:
            if model.mode is not Mode.TELLING or not classify(phi).positive:
                raise
            value = holds_positive_fast(model, s, phi)
            engine = "fast-positive"
        verdict = Verdict3.TRUE if value else Verdict3.FALSE
    elapsed = time.perf_counter() - started

    witness = None
    if (args.witness and engine == "exact" and verdict is Verdict3.FALSE):
        found = get_evaluator(model, args.max_states).refutation(s, phi)
        if found is not None:
            operator, path = found
            space = get_evaluator(model, args.max_states).space
            witness = {
                "operator": render(model, operator),
                "path": [{"player": model.players[p],
                          "state": model.state_label(space.states[t])}
                         for p, t in path],
            }

    if args.format == "json":
        _print_json({
            "model": args.model,
            "mode": model.mode.value,
            "knowledge": model.knowledge.value,
            "formula": render(model, phi),
            "engine": engine,
            "bound": args.bound,
            "verdict": verdict.value,
            "witness": witness,
            "timings": {"total_s": round(elapsed, 6)},
        })
    else:
        print(verdict.value)
        if witness is not None:
            print("refuted: %s" % witness["operator"])
            if not witness["path"]:
                print("  the operand already fails at the given state")
            for step in witness["path"]:
                print("  via %s: %s" % (step["player"], step["state"]))

    if verdict is Verdict3.TRUE:
        return EXIT_TRUE
    if verdict is Verdict3.FALSE:
        return EXIT_FALSE
    return EXIT_UNKNOWN


# ---------------------------------------------------------------------------
# states / validate / explain
# ---------------------------------------------------------------------------


def _cmd_states(args) -> int:
    mf = _load(args)
    model = mf.model
    if args.bound is not None:
        space = enumerate_states_bounded(model, args.bound, args.max_states)
    else:
        space = enumerate_states(model, args.max_states)
    if args.format == "json":
        _print_json({
            "model": args.model,
            "mode": model.mode.value,
            "knowledge": model.knowledge.value,
            "bound": args.bound,
            "complete": space.complete,
            "count": len(space),
            "states": None if args.count else
                      [{"valuation": [model.atoms[a] for a in t.valuation],
                        "messages": [model.message_label(m) for m in t.messages]}
                       for t in space.states],
        })
    elif args.count:
        print(len(space))
    else:
        for t in space.states:
            print(model.state_label(t))
    return EXIT_TRUE


def _cmd_validate(args) -> int:
    mf = _load(args)
    model, s = mf.model, mf.state
    violations = validate_state(model, s.valuation, s.messages)
    if args.format == "json":
        _print_json({
            "model": args.model,
            "valid": not violations,
            "violations": [{"rule": v.rule, "detail": v.detail} for v in violations],
        })
    elif not violations:
        print("valid")
    else:
        for v in violations:
            print("%s: %s" % (v.rule, v.detail))
    return EXIT_TRUE if not violations else EXIT_FALSE


def _cmd_explain(args) -> int:
    mf = _load(args)
    model, s = mf.model, mf.state
    message = parse_message_text(model, args.message)
    if message not in s.messages:
        raise KnowcastError("message %r is not part of the state"
                            % model.message_label(message))
    chain = find_explanation(model, s.valuation, s.messages, message)
    if args.format == "json":
        _print_json({
            "model": args.model,
            "message": model.message_label(message),
            "chain": None if chain is None else
                     [model.message_label(m) for m in chain],
        })
    elif chain is None:
        print("none")
    else:
        for m in chain:
            print(model.message_label(m))
    return EXIT_TRUE if chain is not None else EXIT_FALSE


# ---------------------------------------------------------------------------
# laws / examples
# ---------------------------------------------------------------------------


def _cmd_laws(args) -> int:
    if args.list:
        if args.format == "json":
            _print_json({"laws": [{"law": law, "kind": LAWS[law].kind,
                                   "description": LAWS[law].description}
                                  for law in LAW_IDS]})
        else:
            for law in LAW_IDS:
                print("%-26s %-17s %s" % (law, LAWS[law].kind, LAWS[law].description))
        return EXIT_TRUE

    result = run_suite(args.laws or None, seed=args.seed,
                       instance_budget=args.budget)
    report_paths: List[str] = []
    if args.report_dir:
        from .report import write_report
        report_paths = [str(p) for p in write_report(result, args.report_dir)]

    if args.format == "json":
        obj = result.to_json()
        if args.report_dir:
            obj["report_files"] = report_paths
        _print_json(obj)
    else:
        for r in result.reports:
            marker = "ok" if r.expected_met else "DEVIATION"
            print("%-26s %-17s %-15s %-9s checked=%-4d skipped=%d"
                  % (r.law, r.kind, r.verdict, marker,
                     r.instances_checked, r.skipped))
            if args.witness and r.witness is not None:
                print("  witness: %s" % json.dumps(r.witness))
        bad = [r.law for r in result.reports if not r.expected_met]
        if bad:
            print("deviations: %s" % ", ".join(bad))
        else:
            print("all %d laws behaved as expected" % len(result.reports))
        for path in report_paths:
            print("wrote %s" % path)
    return EXIT_TRUE if result.all_expected_met else EXIT_FALSE


def _cmd_examples(args) -> int:
    if args.dir:
        import os
        os.makedirs(args.dir, exist_ok=True)
        names = (args.name,) if args.name else BUILTIN_NAMES
        written = []
        for name in names:
            model, state = builtin(name)
            path = os.path.join(args.dir, name + ".kc")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(write_model_text(model, state))
            written.append(path)
        if args.format == "json":
            _print_json({"written": written})
        else:
            for path in written:
                print("wrote %s" % path)
        return EXIT_TRUE
    if args.name:
        model, state = builtin(args.name)
        text = write_model_text(model, state)
        if args.format == "json":
            _print_json({"name": args.name, "text": text})
        else:
            sys.stdout.write(text)
        return EXIT_TRUE
    if args.format == "json":
        _print_json({"names": list(BUILTIN_NAMES)})
    else:
        for name in BUILTIN_NAMES:
            print(name)
    return EXIT_TRUE


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceededError as err:
        print("knowcast: %s (raise --max-states or pass --bound)" % err,
              file=sys.stderr)
        return EXIT_CAP
    except KnowcastError as err:
        print("knowcast: %s" % err, file=sys.stderr)
        return EXIT_INPUT
    except OSError as err:
        print("knowcast: %s" % err, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
