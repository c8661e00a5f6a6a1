"""Command-line front end: ``morphsynth <command> [options]``.

Every command builds a report ``{command, inputs, results, deviations}``; ``--json``
prints it as one JSON document, otherwise a plain-text rendering is printed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import aggregation, check, improvement
from .errors import MorphSynthError, SchemaError
from .estimates import (
    Scale,
    enumerate_scale,
    generalized_median,
    hasse_edges,
    parse_estimates,
    set_median,
)
from .model import MorphModel, builtin_dataset, load_model
from .synthesis import bottom_up

PROG = "morphsynth"


class UsageError(Exception):
    pass


def _number(text: str) -> int | float:
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _fmt_num(x: float) -> str:
    return f"{x:g}" if isinstance(x, float) else str(x)


def _table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> list[str]:
    cells = [[str(c) for c in r] for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h) for i, h in enumerate(headers)]
    line = lambda r: " | ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
    out = [line(headers), "-+-".join("-" * w for w in widths)]
    out.extend(line(r) for r in cells)
    return out


def _read_json(path: str) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _model_from(args) -> tuple[MorphModel, bool]:
    if args.builtin and getattr(args, "model", None):
        raise UsageError("use either --model or --builtin, not both")
    if args.builtin:
        return builtin_dataset(), True
    if not getattr(args, "model", None):
        raise UsageError("a model is required: pass --model FILE or --builtin")
    return load_model(args.model), False


# --- commands ---------------------------------------------------------------

def cmd_scale(args):
    scale = Scale(args.l, args.eta)
    ests = enumerate_scale(scale)
    results: dict[str, Any] = {"scale": str(scale), "count": len(ests), "estimates": [str(e) for e in ests]}
    text = [str(e) for e in ests]
    if args.hasse:
        edges = hasse_edges(ests)
        results["hasse"] = [[str(a), str(b)] for a, b in edges]
        text.append("")
        text.extend(f"{a} > {b}" for a, b in edges)
    return {"l": args.l, "eta": args.eta, "hasse": args.hasse}, results, text


def cmd_median(args):
    scale = Scale.parse(args.scale) if args.scale else None
    ests = parse_estimates(args.estimates, scale)
    gen = generalized_median(ests, scale)
    st = set_median(ests)

    def block(m):
        return {"median": str(m.best), "ties": [str(t) for t in m.ties], "deviation": m.deviation}

    results = {"generalized": block(gen), "set": block(st)}
    text = _table(
        ["median", "estimate", "ties", "deviation"],
        [[name, str(m.best), " ".join(str(t) for t in m.ties), m.deviation] for name, m in (("generalized", gen), ("set", st))],
    )
    inputs = {"estimates": args.estimates, "scale": args.scale}
    return inputs, results, text


def cmd_synth(args):
    model, builtin = _model_from(args)
    fronts = bottom_up(model)
    if args.component:
        wanted = [c.id for c in model.iter_postorder(args.component) if not c.is_leaf]
        if not wanted:
            raise UsageError(f"component {args.component!r} is a leaf; nothing to synthesize")
        fronts = {c: fronts[c] for c in wanted}
    results = {"fronts": [f.to_dict() for f in fronts.values()]}
    text = []
    for cid, front in fronts.items():
        if text:
            text.append("")
        text.append(f"{cid}: {len(front)} Pareto-efficient solution(s)")
        text.extend(_table(
            ["composite DA", "w", "e", "median ties", "deviation"],
            [[s.id, s.w, str(s.e), " ".join(str(t) for t in s.e_ties), s.deviation] for s in front],
        ))
    inputs = {"model": "builtin" if builtin else args.model, "component": args.component}
    return inputs, results, text, builtin


def cmd_improve(args):
    if not (args.builtin or args.actions):
        raise UsageError("--actions FILE is required with --model")
    model, builtin = _model_from(args)
    if args.actions:
        solution, actions, default_budget = improvement.load_actions(args.actions, model)
    else:
        solution, actions, default_budget = improvement.builtin_actions(model)
    budget = args.budget if args.budget is not None else default_budget
    if budget is None:
        raise UsageError("no budget: pass --budget B")

    bottlenecks = improvement.find_bottlenecks(solution, model)
    plan = improvement.plan_improvement(solution, actions, budget, model)
    results = {
        "solution": solution.id,
        "bottlenecks": [b.to_dict() for b in bottlenecks],
        "plan": plan.to_dict(),
    }

    rows = []
    for i, b in enumerate(bottlenecks):
        subject = b.subject[0] if b.kind == "element" else f"({','.join(b.subject)})"
        rows.append([solution.id if i == 0 else "", subject, f"{b.current} => {b.proposed}"])
    text = ["Bottlenecks"]
    text.extend(_table(["Composite DA", "Bottleneck DA/IC", "Improvement w/e"], rows))
    text.append("")
    text.append(f"budget {_fmt_num(budget)}: actions {', '.join(plan.action_ids)}; total cost {_fmt_num(plan.choice.total_cost)}")
    text.append(f"before {solution.id} ({solution.w};{solution.e})")
    text.append(f"after  {plan.after.id} ({plan.after.w};{plan.after.e})"
                f" ties {' '.join(str(t) for t in plan.after.e_ties)} deviation {plan.after.deviation}")
    inputs = {"model": "builtin" if builtin else args.model,
              "actions": "builtin" if builtin and not args.actions else args.actions,
              "budget": budget}
    return inputs, results, text, builtin


def _list_field(doc: Any, key: str) -> list:
    if isinstance(doc, list):
        return doc
    if isinstance(doc, dict) and isinstance(doc.get(key), list):
        return doc[key]
    raise SchemaError(f"expected a list or an object with a {key!r} list")


def cmd_aggregate(args):
    builtin = args.builtin
    if builtin:
        sols, cands, default_budget = aggregation.builtin_aggregation(builtin_dataset().scale)
    else:
        if not (args.solutions and args.candidates):
            raise UsageError("--solutions FILE and --candidates FILE are required (or --builtin)")
        sols = [dict(s) for s in _list_field(_read_json(args.solutions), "solutions")]
        cands = aggregation.parse_candidates(_list_field(_read_json(args.candidates), "candidates"))
        default_budget = None
    budget = args.budget if args.budget is not None else default_budget
    if budget is None:
        raise UsageError("no budget: pass --budget B")

    union = aggregation.supersolution(sols)
    kernel = aggregation.subsolution(sols)
    exts = aggregation.extend_kernel(kernel, cands, budget)
    results = {
        "supersolution": {c: list(v) for c, v in union.items()},
        "kernel": kernel.to_dict(),
        "extensions": [e.to_dict() for e in exts],
    }
    text = ["Supersolution"]
    text.extend(_table(["component", "DAs"], [[c, ", ".join(v)] for c, v in union.items()]))
    text.append("")
    text.append("Kernel: " + ", ".join(f"{c}={d}" for c, d in kernel.fixed.items()))
    text.append("")
    text.append(f"Kernel extensions, budget {_fmt_num(budget)}")
    text.extend(_table(
        ["selection", "cost", "median", "median ties", "deviation"],
        [[" ".join(e.selection.values()), _fmt_num(e.cost), str(e.median),
          " ".join(str(t) for t in e.median_ties), e.choice.deviation] for e in exts],
    ))
    inputs = {"solutions": "builtin" if builtin else args.solutions,
              "candidates": "builtin" if builtin else args.candidates,
              "budget": budget}
    return inputs, results, text, builtin


def cmd_check(args):
    report = check.run_check()
    results = {k: report[k] for k in ("checks", "passed", "failed")}
    text = [f"{'PASS' if c['ok'] else 'FAIL'}  {c['name']}" +
            ("" if c["ok"] else f"  expected {c['expected']!r}, computed {c['computed']!r}")
            for c in report["checks"]]
    text.append(f"{report['passed']} passed, {report['failed']} failed")
    return {"model": "builtin"}, results, text, True


COMMANDS = {
    "scale": cmd_scale,
    "median": cmd_median,
    "synth": cmd_synth,
    "improve": cmd_improve,
    "aggregate": cmd_aggregate,
    "check": cmd_check,
}


def _deviation_lines(devs: list[dict]) -> list[str]:
    if not devs:
        return []
    rows = [[d["item"], d["selection"], d["annotated"], d["computed"]] for d in devs]
    return ["", "Deviations from annotated reference values"] + _table(
        ["item", "selection", "annotated", "computed"], rows
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subcommand from resetting flags given before it
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print one JSON document instead of tables")
    common.add_argument("--builtin", action="store_true", default=argparse.SUPPRESS,
                        help="use the bundled on-board telemetry dataset")

    parser = argparse.ArgumentParser(prog=PROG, description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", default=False, help=argparse.SUPPRESS)
    parser.add_argument("--builtin", action="store_true", default=False, help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("scale", parents=[common], help="list the estimates of a scale")
    p.add_argument("--l", type=int, required=True, help="number of levels")
    p.add_argument("--eta", type=int, required=True, help="number of elements")
    p.add_argument("--hasse", action="store_true", help="also list covering pairs")

    p = sub.add_parser("median", parents=[common], help="generalized and set medians")
    p.add_argument("--estimates", required=True, help='e.g. "(2,1,0,0);(0,2,1,0)"')
    p.add_argument("--scale", help='scale as "l,eta"; inferred from the estimates if omitted')

    p = sub.add_parser("synth", parents=[common], help="Pareto fronts, bottom-up")
    p.add_argument("--model", help="model JSON file")
    p.add_argument("--component", help="only this composite and the composites below it")

    p = sub.add_parser("improve", parents=[common], help="bottlenecks and budgeted improvement")
    p.add_argument("--model", help="model JSON file")
    p.add_argument("--actions", help="improvement actions JSON file")
    p.add_argument("--budget", type=_number)

    p = sub.add_parser("aggregate", parents=[common], help="kernel of several solutions and its extension")
    p.add_argument("--solutions", help="JSON list of selections (component -> DA)")
    p.add_argument("--candidates", help="JSON list of {component, id, estimate, cost}")
    p.add_argument("--budget", type=_number)

    sub.add_parser("check", parents=[common], help="golden checks on the bundled dataset")
    return parser


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        produced = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(err)
        print(f"{PROG}: error: {exc}", file=err)
        return 2
    except (MorphSynthError, OSError, json.JSONDecodeError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=err)
        return 1

    inputs, results, text, *rest = produced
    builtin = bool(rest and rest[0])
    deviations = check.annotation_deviations(builtin_dataset()) if builtin else []
    report = {"command": args.command, "inputs": inputs, "results": results, "deviations": deviations}

    if args.json:
        out.write(json.dumps(report, indent=2) + "\n")
    else:
        lines = list(text)
        if args.command == "check":
            lines += _deviation_lines(deviations)
        out.write("\n".join(lines) + "\n")

    if args.command == "check" and results["failed"]:
        print(f"GoldenCheckFailed: {results['failed']} check(s) failed", file=err)
        return 1
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
