"""Command-line front end.

Exit status: 0 success or the property holds; 1 the property fails, a
countermodel was found, a proof was rejected, a search was exhausted or an
answer is indeterminate; 2 input or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from . import constructions as C
from .display import parse_consecution
from .enumeration import FAMILIES, Countermodel, SearchBudget, countermodel_search
from .fixtures import MODEL_FIXTURES, PROOF_FIXTURES, load_model, load_proof
from .formula import MACROS, FormulaSyntaxError, expand_macros, parse_formula, render
from .modal import (check_axioms, embed_formula, embed_model, frame_from_json, frame_to_json,
                    is_very_simple_sahlqvist, parse_modal, revembed_formula)
from .models import (MalformedModelError, ResourceModel, element_id, model_from_json, model_to_json,
                     validate_bbi, validate_cbi)
from .proofs import ProofFormatError, check_proof, identity_proof, proof_from_json, proof_to_json, render_proof
from .rules import audit_belnap_conditions, mutation_controls, RULES, postulate_rules
from .search import Proved, SearchConfig, prove
from .semantics import BudgetExceeded, DEFAULT_ENV_CAP, UnknownElementError, find_falsifier, sat

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, text: str, doc: Any) -> None:
    if args.json:
        print(json.dumps(doc, indent=2, ensure_ascii=False))
    else:
        print(text)


def _macros(args):
    return None if getattr(args, "no_macros", False) else expand_macros()


def _formula(text: str, args):
    return parse_formula(text, _macros(args))


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text("utf-8"))
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON: {exc}") from None


def _load_model(path: str):
    """A model file, or the name of a bundled model fixture (e.g. prop29.json)."""
    stem = Path(path).stem
    if not Path(path).exists() and stem in MODEL_FIXTURES:
        return load_model(stem)
    return model_from_json(_read_json(path))


def _load_proof(path: str):
    stem = Path(path).stem
    if not Path(path).exists() and stem in PROOF_FIXTURES:
        return load_proof(stem)
    return proof_from_json(_read_json(path))


def _env_json(env: dict) -> dict:
    return {k: sorted(element_id(x) for x in v) for k, v in sorted(env.items())}


def _write_or_print(args, doc: dict, what: str) -> None:
    if args.output:
        Path(args.output).write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", "utf-8")
        if not args.json:
            print(f"wrote {what} to {args.output}")
        else:
            print(json.dumps({"written": args.output}))
    else:
        print(json.dumps(doc, indent=2, ensure_ascii=False))


# ---------------------------------------------------------------- parse

def cmd_parse(args) -> int:
    f = _formula(args.formula, args)
    out = render(f, args.render)
    _emit(args, out, {"formula": render(f), "rendered": out, "style": args.render})
    return OK


# ---------------------------------------------------------------- model

def _ints(params, n, name):
    if len(params) != n:
        raise UsageError(f"{name} takes {n} integer parameter(s)")
    try:
        return [int(p) for p in params]
    except ValueError:
        raise UsageError(f"{name} parameters must be integers") from None


def _build(name: str, params: list[str]):
    if name == "abelian":
        if not params:
            raise UsageError("abelian takes one or more cyclic orders, e.g. abelian 2 3")
        return C.cyclic_product(_ints(params, len(params), name))
    if name == "zmod":
        return C.z_mod(*_ints(params, 2, name))
    if name == "bitvec":
        return C.bitvec(*_ints(params, 1, name))
    if name == "powerset":
        return C.powerset_model(params)
    if name == "action":
        if not params:
            raise UsageError("action takes one or more action names")
        return C.action_comm(params)
    if name == "heap":
        if len(params) != 2:
            raise UsageError("heap takes two comma-separated lists: locations and values, e.g. heap 4 0,1,2")
        return C.generalized_heap(*(p.split(",") for p in params))
    if name == "denyguar":
        if len(params) < 2:
            raise UsageError("denyguar takes a granularity k and one or more actions")
        return C.deny_guarantee(params[1:], _ints(params[:1], 1, name)[0])
    if name == "union":
        if len(params) != 2:
            raise UsageError("union takes two model files")
        return C.disjoint_union(_load_model(params[0]), _load_model(params[1]))
    if name == "product":
        if len(params) < 2:
            raise UsageError("product takes two or more model files")
        return C.product_model([_load_model(p) for p in params])
    if name == "bbiext":
        if len(params) != 1:
            raise UsageError("bbiext takes one BBI model file")
        return C.bbi_extension(_load_model(params[0]))
    if name == "nonconservativity":
        return C.nonconservativity_model()
    if name == "relational":
        return C.relational_model()
    raise UsageError(f"unknown builder {name!r}; see `model list`")


BUILDERS = {
    "abelian": "abelian N1 [N2 ...]     product of cyclic groups, infinity = unit",
    "zmod": "zmod N M                 integers mod N with infinity M",
    "bitvec": "bitvec N                 N-bit words under xor",
    "powerset": "powerset A [B ...]       subsets under disjoint union",
    "action": "action A [B ...]         actions and co-actions",
    "heap": "heap LOCS VALS           generalised heaps, comma-separated lists",
    "denyguar": "denyguar K A [B ...]     deny-guarantee permissions",
    "union": "union A.json B.json      identify units and infinities",
    "product": "product A.json B.json .. componentwise product",
    "bbiext": "bbiext M.json            CBI extension of a BBI model",
    "nonconservativity": "nonconservativity        three-element BBI model",
    "relational": "relational               three-element relational CBI model",
}


def cmd_model_list(args) -> int:
    text = "builders:\n" + "\n".join("  " + v for v in BUILDERS.values())
    text += "\nbundled models: " + ", ".join(f"{m}.json" for m in MODEL_FIXTURES)
    _emit(args, text, {"builders": list(BUILDERS), "fixtures": list(MODEL_FIXTURES)})
    return OK


def cmd_model_build(args) -> int:
    try:
        m = _build(args.name, args.params)
    except C.ConstructionError as exc:
        _emit(args, f"construction failed: {exc}", {"ok": False, "error": str(exc)})
        return FAIL
    _write_or_print(args, model_to_json(m), f"{m.size}-element model")
    return OK


def cmd_model_validate(args) -> int:
    m = _load_model(args.model)
    report = validate_cbi(m) if isinstance(m, ResourceModel) else validate_bbi(m)
    kind = "CBI" if isinstance(m, ResourceModel) else "BBI"
    if report.ok:
        text = f"ok: valid {kind}-model with {m.size} elements"
    else:
        lines = [f"invalid {kind}-model:"]
        lines += [f"  {name} fails at {', '.join(map(element_id, wit))}" for name, wit in report.failures]
        text = "\n".join(lines)
    _emit(args, text, dict(report.to_json(), kind=kind))
    return OK if report.ok else FAIL


# ---------------------------------------------------------------- eval / countermodel

def cmd_eval(args) -> int:
    m = _load_model(args.model)
    f = _formula(args.formula, args)
    if args.at is not None:
        env = {}
        if args.env:
            env = {k: frozenset(map(str, v)) for k, v in _read_json(args.env).items()}
        value = sat(m, env, args.at, f)
        _emit(args, "true" if value else "false",
              {"formula": render(f), "point": args.at, "env": _env_json(env), "value": value})
        return OK if value else FAIL
    try:
        bad = find_falsifier(m, f, args.cap)
    except BudgetExceeded as exc:
        _emit(args, f"indeterminate: {exc}", {"formula": render(f), "indeterminate": True,
                                             "environments": exc.needed, "cap": exc.cap})
        return FAIL
    if bad is None:
        _emit(args, "true", {"formula": render(f), "truth": True})
        return OK
    env = _env_json(bad.env)
    text = f"false\nwitness point: {element_id(bad.point)}\nenvironment: {json.dumps(env)}"
    _emit(args, text, {"formula": render(f), "truth": False, "point": element_id(bad.point), "env": env})
    return FAIL


def cmd_countermodel(args) -> int:
    f = _formula(args.formula, args)
    families = tuple(args.families) if args.families else FAMILIES
    unknown = set(families) - set(FAMILIES)
    if unknown:
        raise UsageError(f"unknown families {sorted(unknown)}; choose from {', '.join(FAMILIES)}")
    result = countermodel_search(f, SearchBudget(max_enum_size=args.max_size, families=families))
    if isinstance(result, Countermodel):
        env = _env_json(result.env)
        doc = {"formula": render(f), "found": True, "family": result.family,
               "point": element_id(result.point), "env": env, "model": model_to_json(result.model)}
        text = (f"countermodel ({result.family}, {result.model.size} elements, {result.model.label})\n"
                f"point: {element_id(result.point)}\nenvironment: {json.dumps(env)}\n"
                + json.dumps(model_to_json(result.model)))
        _emit(args, text, doc)
        return FAIL
    doc = {"formula": render(f), "found": False, "exhausted": True,
           "models_checked": result.models_checked, "models_skipped": result.models_skipped,
           "families": list(result.families)}
    _emit(args, f"exhausted: no countermodel among {result.models_checked} models "
                f"({result.models_skipped} skipped as too large)", doc)
    return FAIL


# ---------------------------------------------------------------- proof

def cmd_proof_check(args) -> int:
    p = _load_proof(args.proof)
    report = check_proof(p)
    if report.ok:
        text = "ok" + (", cut-free" if report.cut_free else ", uses Cut")
        if report.subformula_ok is not None:
            text += ", subformula property holds" if report.subformula_ok else ", subformula property fails"
        text += f" ({p.size} nodes, height {p.height})"
    else:
        text = "rejected:\n" + "\n".join(f"  {n}: {msg}" for n, msg in report.errors)
    _emit(args, text, report.to_json())
    return OK if report.ok else FAIL


def cmd_proof_prove(args) -> int:
    c = parse_consecution(args.consecution, _macros(args))
    cfg = SearchConfig(depth=args.depth, max_nodes=args.max_nodes, semantic_prune=not args.no_semantic_prune)
    out = prove(c, cfg)
    stats = out.stats.to_json()
    if isinstance(out, Proved):
        text = render_proof(out.proof, args.style) + f"\n\nproved: {json.dumps(stats)}"
        _emit(args, text, {"proved": True, "stats": stats, "proof": proof_to_json(out.proof)})
        return OK
    text = f"exhausted at depth {args.depth}: {json.dumps(stats)}"
    _emit(args, text, {"proved": False, "exhausted": True, "stats": stats})
    return FAIL


def cmd_proof_identity(args) -> int:
    p = identity_proof(_formula(args.formula, args))
    report = check_proof(p)
    _emit(args, render_proof(p, args.style), {"proof": proof_to_json(p), "check": report.to_json()})
    return OK if report.ok else FAIL


def cmd_proof_audit(args) -> int:
    rules = list(RULES.values()) + postulate_rules()
    if args.with_controls:
        rules += mutation_controls()
    report = audit_belnap_conditions(rules)
    lines = [f"{c}: {'pass' if report.passed(c) else 'FAIL'}" for c in ("C1", "C3", "C4", "C5")]
    lines += [f"  {r} violates {c}: {d}" for r, c, d in report.violations]
    lines.append(f"{len(report.checked)} rules checked")
    _emit(args, "\n".join(lines), report.to_json())
    return OK if report.ok else FAIL


# ---------------------------------------------------------------- modal

def cmd_modal_embed(args) -> int:
    a = embed_formula(_formula(args.formula, args))
    _emit(args, render(a, args.render), {"modal": render(a), "rendered": render(a, args.render)})
    return OK


def cmd_modal_revembed(args) -> int:
    f = revembed_formula(parse_modal(args.formula))
    _emit(args, render(f, args.render), {"formula": render(f), "rendered": render(f, args.render)})
    return OK


def cmd_modal_embed_model(args) -> int:
    m = _load_model(args.model)
    if not isinstance(m, ResourceModel):
        raise UsageError("embed-model needs a CBI-model (with inv and infinity)")
    report = validate_cbi(m)
    if not report.ok:
        _emit(args, f"not a CBI-model: {report.failures[0][0]} fails", report.to_json())
        return FAIL
    _write_or_print(args, frame_to_json(embed_model(m)), "frame")
    return OK


def cmd_modal_check_axioms(args) -> int:
    doc = _read_json(args.frame)
    fr = frame_from_json(doc)
    try:
        report = check_axioms(fr, mode=args.mode, samples=args.samples, seed=args.seed)
    except BudgetExceeded as exc:
        _emit(args, f"indeterminate: {exc}", {"indeterminate": True, "instantiations": exc.needed})
        return FAIL
    j = report.to_json()
    lines = [f"axiom {k}: {'holds' if v else 'FAILS'}" for k, v in j["axioms"].items()]
    lines.append(f"{j['passed']}/{j['total']} axioms hold" + (" (sampled)" if report.sampled else "")
                 + (", unitary" if report.unitary else ", not unitary"))
    for k, w in j["witnesses"].items():
        lines.append(f"  axiom {k} fails at {w['point']} under {json.dumps(w['env'])}")
    _emit(args, "\n".join(lines), j)
    return OK if report.all_hold else FAIL


def cmd_modal_sahlqvist(args) -> int:
    a = parse_modal(args.formula)
    value = is_very_simple_sahlqvist(a)
    _emit(args, "true" if value else "false", {"formula": render(a), "very_simple_sahlqvist": value})
    return OK if value else FAIL


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    fcommon = argparse.ArgumentParser(add_help=False)
    fcommon.add_argument("--no-macros", action="store_true",
                         help=f"do not expand the built-in macros {', '.join(MACROS)}")
    styles = ("ascii", "unicode", "latex")

    ap = _Parser(prog="cbi", description="Classical BI: models, semantics, display proofs and modal translation.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("parse", parents=[common, fcommon], help="parse and render a formula")
    p.add_argument("formula")
    p.add_argument("--render", choices=styles, default="unicode")
    p.set_defaults(func=cmd_parse)

    mp = sub.add_parser("model", help="build, validate and list models")
    msub = mp.add_subparsers(dest="model_command", required=True, parser_class=_Parser)
    p = msub.add_parser("validate", parents=[common], help="check the model axioms")
    p.add_argument("model")
    p.set_defaults(func=cmd_model_validate)
    p = msub.add_parser("build", parents=[common], help="build a model from a named construction")
    p.add_argument("name")
    p.add_argument("params", nargs="*")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_model_build)
    p = msub.add_parser("list", parents=[common], help="list builders and bundled models")
    p.set_defaults(func=cmd_model_list)

    p = sub.add_parser("eval", parents=[common, fcommon], help="evaluate a formula on a model")
    p.add_argument("model")
    p.add_argument("formula")
    p.add_argument("--env", help="JSON file mapping variables to lists of element ids")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--at", help="evaluate at this element")
    mode.add_argument("--truth", action="store_true", help="check truth at every point and environment (default)")
    p.add_argument("--cap", type=int, default=DEFAULT_ENV_CAP, help="maximum environments to enumerate")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("countermodel", parents=[common, fcommon], help="search small models for a countermodel")
    p.add_argument("formula")
    p.add_argument("--max-size", type=int, default=3, choices=(1, 2, 3))
    p.add_argument("--families", nargs="+", metavar="FAMILY", help=f"subset of: {' '.join(FAMILIES)}")
    p.set_defaults(func=cmd_countermodel)

    pp = sub.add_parser("proof", help="check, search and audit display-calculus proofs")
    psub = pp.add_subparsers(dest="proof_command", required=True, parser_class=_Parser)
    p = psub.add_parser("check", parents=[common], help="check a proof script")
    p.add_argument("proof")
    p.set_defaults(func=cmd_proof_check)
    p = psub.add_parser("prove", parents=[common, fcommon], help="bounded backward proof search")
    p.add_argument("consecution", help='e.g. "P ; Q |- Q & P"')
    p.add_argument("--depth", type=int, default=SearchConfig.depth)
    p.add_argument("--max-nodes", type=int, default=SearchConfig.max_nodes)
    p.add_argument("--no-semantic-prune", action="store_true")
    p.add_argument("--style", choices=("ascii", "unicode"), default="unicode")
    p.set_defaults(func=cmd_proof_prove)
    p = psub.add_parser("identity", parents=[common, fcommon], help="cut-free proof of F |- F")
    p.add_argument("formula")
    p.add_argument("--style", choices=("ascii", "unicode"), default="unicode")
    p.set_defaults(func=cmd_proof_identity)
    p = psub.add_parser("audit", parents=[common], help="check the Belnap conditions on the rule table")
    p.add_argument("--with-controls", action="store_true", help="include the two deliberately broken rules")
    p.set_defaults(func=cmd_proof_audit)

    mo = sub.add_parser("modal", help="modal translation and frame checks")
    osub = mo.add_subparsers(dest="modal_command", required=True, parser_class=_Parser)
    p = osub.add_parser("embed", parents=[common, fcommon], help="translate a CBI formula to modal logic")
    p.add_argument("formula")
    p.add_argument("--render", choices=styles, default="ascii")
    p.set_defaults(func=cmd_modal_embed)
    p = osub.add_parser("revembed", parents=[common], help="translate a modal formula to CBI")
    p.add_argument("formula")
    p.add_argument("--render", choices=styles, default="ascii")
    p.set_defaults(func=cmd_modal_revembed)
    p = osub.add_parser("embed-model", parents=[common], help="the modal frame of a CBI-model")
    p.add_argument("model")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_modal_embed_model)
    p = osub.add_parser("check-axioms", parents=[common], help="check the eleven frame axioms")
    p.add_argument("frame")
    p.add_argument("--mode", choices=("auto", "exact", "sampled"), default="auto")
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_modal_check_axioms)
    p = osub.add_parser("sahlqvist", parents=[common], help="recognise very simple Sahlqvist formulas")
    p.add_argument("formula")
    p.set_defaults(func=cmd_modal_sahlqvist)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormulaSyntaxError as exc:
        msg, extra = str(exc), {"offset": exc.offset}
    except (UsageError, MalformedModelError, ProofFormatError, UnknownElementError, KeyError, ValueError) as exc:
        msg, extra = str(exc.args[0]) if isinstance(exc, KeyError) else str(exc), {}
    if args.json:
        print(json.dumps(dict({"error": msg}, **extra)))
    print(f"cbi: error: {msg}", file=sys.stderr)
    return USAGE


if __name__ == "__main__":
    sys.exit(main())
