"""Command-line entry point.

All results go to stdout in the selected format; diagnostics go to stderr.
Exit codes: 0 ok or tractable, 1 input error, 2 infeasible instance,
3 planarly intractable, 4 open self-complementary, 5 budget exhausted,
6 unknown.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import classify_boolean as cb
from . import classify_conservative as cc
from . import io
from .catalog import LANGUAGES, candidate
from .closure import Budget, saturate
from .core import INF, BudgetExceeded, Language, format_value, is_multimorphism
from .derivation import DerivationError
from .express import pi_v
from .gadgets import RealizationError, realize
from .plane import PlaneGraphError, solve, validate_instance

OK, INPUT_ERROR, INFEASIBLE, INTRACTABLE, SELF_COMPLEMENTARY, EXHAUSTED, UNKNOWN = range(7)

COMMANDS = ("solve", "express", "validate", "check-mm", "classify-boolean", "classify-conservative",
            "pair-graph", "synthesize", "saturate")
FORMATS = ("json", "dot", "text")


@dataclass
class CommandSpec:
    subcommand: str
    inputs: tuple
    max_arity: int | None = None
    max_depth: int = Budget.max_depth
    max_set: int = Budget.max_set
    max_ops: int = Budget.max_ops
    max_vars: int = 20
    workers: int | None = None
    format: str = "json"
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in COMMANDS:
            raise ValueError(f"unknown subcommand {self.subcommand!r}")
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}")
        for name in ("max_depth", "max_set", "max_ops", "max_vars"):
            if getattr(self, name) < 1:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        if self.workers is not None and self.workers < 1:
            raise ValueError("--workers must be positive")

    @property
    def budget(self) -> Budget:
        return Budget(self.max_arity, self.max_depth, self.max_set, self.max_ops)


@dataclass
class Result:
    code: int
    output: str
    diagnostics: str = ""


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="planarvcsp", description="Planar valued CSP toolkit.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-arity", type=_positive)
    common.add_argument("--max-depth", type=_positive, default=Budget.max_depth)
    common.add_argument("--max-set", type=_positive, default=Budget.max_set)
    common.add_argument("--max-ops", type=_positive, default=Budget.max_ops)
    common.add_argument("--max-vars", type=_positive, default=20)
    common.add_argument("--workers", type=_positive, help="accepted for compatibility; work is sequential")
    common.add_argument("--format", choices=FORMATS, default="json")
    sub = p.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("input", help="JSON file, or a catalog language name")
        if name == "check-mm":
            sp.add_argument("--candidate", required=True, help='comma-separated operations, e.g. "min,max"')
        if name == "saturate":
            sp.add_argument("--conservative", action="store_true")
        if name == "pair-graph":
            sp.add_argument("--dot", action="store_true", help="same as --format dot")
        if name == "express":
            sp.add_argument("--v", help="comma-separated query vertices, overriding the file")
    return p


def parse(argv) -> CommandSpec:
    args = build_parser().parse_args(argv)
    fmt = "dot" if getattr(args, "dot", False) else args.format
    options = {k: getattr(args, k) for k in ("candidate", "conservative", "v") if hasattr(args, k)}
    return CommandSpec(args.subcommand, (args.input,), args.max_arity, args.max_depth, args.max_set,
                       args.max_ops, args.max_vars, args.workers, fmt, options)


# --------------------------------------------------------------------------
# inputs


def _load_language(src: str) -> Language:
    if not Path(src).exists() and src in LANGUAGES:
        return LANGUAGES[src]
    return io.language_from_json(io.load(src))


def _load_instance(src: str):
    return io.instance_from_json(io.load(src))


def _render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return io.dumps(doc)
    if fmt == "text":
        lines = []
        for k, v in doc.items():
            if isinstance(v, (str, int, bool)) or v is None:
                lines.append(f"{k}: {v}")
            elif isinstance(v, list) and all(isinstance(x, (str, int)) for x in v):
                lines.append(f"{k}: {' '.join(map(str, v))}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"format {fmt!r} not supported by this command")


# --------------------------------------------------------------------------
# commands


def _cmd_validate(cmd: CommandSpec) -> Result:
    inst, _ = _load_instance(cmd.inputs[0])
    report = validate_instance(inst)
    doc = {"ok": report.ok,
           "violations": [{"kind": v.kind, "detail": v.detail, "constraint": v.constraint}
                          for v in report.violations]}
    return Result(OK if report.ok else INPUT_ERROR, _render(doc, cmd.format))


def _checked_instance(cmd: CommandSpec, for_expression: bool = False):
    inst, v = _load_instance(cmd.inputs[0])
    report = validate_instance(inst, for_expression)
    if not report.ok:
        raise io.InputError("; ".join(f"{x.kind}: {x.detail}" for x in report.violations))
    if inst.graph.n > cmd.max_vars:
        raise BudgetExceeded(f"{inst.graph.n} variables exceed --max-vars {cmd.max_vars}")
    return inst, v


def _cmd_solve(cmd: CommandSpec) -> Result:
    inst, _ = _checked_instance(cmd)
    value, assignment = solve(inst)
    doc = {"optimum": format_value(value), "assignment": list(assignment) if assignment is not None else None}
    return Result(INFEASIBLE if value is INF else OK, _render(doc, cmd.format))


def _cmd_express(cmd: CommandSpec) -> Result:
    inst, v = _checked_instance(cmd, for_expression=True)
    if cmd.options.get("v"):
        v = tuple(int(x) for x in cmd.options["v"].split(","))
    if v is None:
        raise io.InputError("no query tuple: give 'v' in the file or --v")
    rel = pi_v(inst, v)
    if cmd.format == "text":
        lines = [f"{' '.join(map(str, t))}  {format_value(val)}" for t, val in rel.items()]
        return Result(OK, "\n".join(lines) + "\n")
    doc = dict(schema="relation", v=list(v), **io.relation_to_json(rel))
    return Result(OK, _render(doc, cmd.format))


def _cmd_check_mm(cmd: CommandSpec) -> Result:
    lang = _load_language(cmd.inputs[0])
    try:
        m = candidate(cmd.options["candidate"], lang.domain_size)
    except KeyError as exc:
        raise io.InputError(f"unknown operation in candidate: {exc}") from exc
    verdict = is_multimorphism(m, lang)
    doc = {"candidate": cmd.options["candidate"], "status": verdict.status}
    if verdict.relation is not None:
        doc["relation"] = verdict.relation
        doc["witness"] = [list(t) for t in verdict.witness]
        doc["reason"] = verdict.reason
    return Result(OK, _render(doc, cmd.format))


def _cmd_classify_boolean(cmd: CommandSpec) -> Result:
    v = cb.classify_boolean(_load_language(cmd.inputs[0]))
    return Result(v.exit_code, _render(v.to_json(), cmd.format), v.diagnostics)


def _cmd_classify_conservative(cmd: CommandSpec) -> Result:
    v = cc.classify_conservative(_load_language(cmd.inputs[0]), cmd.budget)
    return Result(v.exit_code, _render(v.to_json(), cmd.format), "; ".join(v.diagnostics))


def _cmd_pair_graph(cmd: CommandSpec) -> Result:
    lang = _load_language(cmd.inputs[0])
    G = cc.build_pair_graph(lang, cmd.budget)
    if cmd.format == "dot":
        bip = None
        try:
            bip = cc.split_and_bipartition(G)
        except cc.BipartitionError:
            pass
        return Result(OK, G.to_dot(bip))
    return Result(OK, _render(G.to_json(), cmd.format))


def _cmd_synthesize(cmd: CommandSpec) -> Result:
    lang = _load_language(cmd.inputs[0])
    try:
        ders = cb.synthesize(lang)
    except cb.SynthesisError as exc:
        return Result(EXHAUSTED, "", str(exc))
    problems = cb.verify_derivations(lang, ders)
    real = realize(ders["rho_1in3"], lang)
    problems += real.verify()
    if not problems and real.relation() != cb.TARGETS["rho_1in3"]:
        problems.append("rho_1in3 realization does not reproduce the target")
    doc = {
        "schema": "derivations",
        "derivations": {k: d.to_json() for k, d in sorted(ders.items())},
        "rho_1in3_instance": io.instance_to_json(real.instance, real.v),
        "verified": not problems,
    }
    return Result(EXHAUSTED if problems else OK, _render(doc, cmd.format), "; ".join(problems))


def _cmd_saturate(cmd: CommandSpec) -> Result:
    S = saturate(_load_language(cmd.inputs[0]), cmd.budget, conservative=bool(cmd.options.get("conservative")))
    return Result(EXHAUSTED if S.exhausted else OK, _render(S.to_json(), cmd.format),
                  "saturation truncated by budget" if S.exhausted else "")


HANDLERS = {
    "solve": _cmd_solve,
    "express": _cmd_express,
    "validate": _cmd_validate,
    "check-mm": _cmd_check_mm,
    "classify-boolean": _cmd_classify_boolean,
    "classify-conservative": _cmd_classify_conservative,
    "pair-graph": _cmd_pair_graph,
    "synthesize": _cmd_synthesize,
    "saturate": _cmd_saturate,
}


def run(cmd: CommandSpec) -> Result:
    try:
        return HANDLERS[cmd.subcommand](cmd)
    except (io.InputError, PlaneGraphError, DerivationError, RealizationError, ValueError) as exc:
        return Result(INPUT_ERROR, "", f"error: {exc}")
    except BudgetExceeded as exc:
        return Result(EXHAUSTED, "", f"budget exhausted: {exc}")


def main(argv=None) -> int:
    try:
        cmd = parse(argv)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except SystemExit as exc:  # argparse usage errors
        return INPUT_ERROR if exc.code else OK
    result = run(cmd)
    sys.stdout.write(result.output)
    if result.diagnostics:
        print(result.diagnostics, file=sys.stderr)
    return result.code


if __name__ == "__main__":
    sys.exit(main())
