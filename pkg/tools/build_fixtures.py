"""Regenerate the proof-script and model fixtures under src/cbi/fixtures.

Each proof is written as nested (consecution, rule, premises[, direction])
tuples; the postulate trace of every DisplayEq node is found by search
between the node and its premise.  Rule labels follow the rule table.
"""

import json
import pathlib

from cbi.constructions import nonconservativity_model, relational_model
from cbi.display import find_display_trace, parse_consecution
from cbi.models import model_to_json
from cbi.proofs import Proof, check_proof, proof_to_json

OUT = pathlib.Path(__file__).resolve().parent.parent / "src" / "cbi" / "fixtures"


def build(node) -> Proof:
    text, rule, prems, *rest = node
    c = parse_consecution(text)
    kids = tuple(build(p) for p in prems)
    if rule == "D":
        trace = find_display_trace(c, kids[0].conclusion)
        if trace is None:
            raise SystemExit(f"no display trace from {text} to {prems[0][0]}")
        return Proof(c, "DisplayEq", kids, tuple(trace))
    return Proof(c, rule, kids, None, rest[0] if rest else None)


def chain(*rows, top=None):
    """Unary chain written root first; each row is (consecution, rule[, direction]).

    The last row gets `top` as premises (a list of nodes), or none.
    """
    node = None
    for row in reversed(rows):
        text, rule, *rest = row
        prems = [node] if node is not None else (top or [])
        node = (text, rule, prems, *rest)
    return node


def idp(atom):
    return (f"{atom} |- {atom}", "Id", [])


def neg_id(atom):
    """(!atom |- #atom) from Id."""
    return chain((f"!{atom} |- #{atom}", "NotL"), (f"#{atom} |- #{atom}", "D"), top=[idp(atom)])


A = "(~!P ; ~P)"
FIG4 = chain(
    ("~!P |- !~P", "NotR"),
    ("~!P |- #~P", "AER"),
    ("~!P |- #~P ; AE", "D"),
    (f"%AE |- %{A}", "CtrR"),
    (f"%AE |- %{A} ; %{A}", "D"),
    (f"#%{A} ; %AE |- %{A}", "WkL"),
    (f"#%{A} |- %{A}", "D"),
    (f"~P ; ~!P |- %#%{A}", "WkL"),
    (f"~P |- %#%{A}", "MNotL"),
    (f"%P |- %#%{A}", "D"),
    ("~!P ; ~P |- %#P", "WkL"),
    ("~!P |- %#P", "MNotL"),
    ("%!P |- %#P", "D"),
    ("#P |- !P", "NotR"),
    ("#P |- #P", "D"),
    top=[idp("P")])

B = "(R & !(P -* !Q)) * top"
S = f"%P , (#Q ; {B})"
FIG5_LEFT = (f"R ; #({S}) |- R & !(P -* !Q)", "AndR", [
    idp("R"),
    chain((f"#({S}) |- !(P -* !Q)", "NotR"),
          (f"#({S}) |- #(P -* !Q)", "D"),
          (f"P -* !Q |- {S}", "WandL"),
          top=[idp("P"), chain((f"!Q |- #Q ; {B}", "D"), (f"!Q |- {B} ; #Q", "WkR"),
                                              top=[neg_id("Q")])])])
FIG5_RIGHT = chain(("P |- top", "AEL"), ("AE ; P |- top", "WkL"), ("AE |- top", "TopR"))
FIG5 = chain(
    (f"AE |- Q & (R * P) -> {B}", "ImpR"),
    (f"AE ; Q & (R * P) |- {B}", "AEL", "bwd"),
    (f"Q & (R * P) |- {B}", "AndL"),
    (f"Q ; R * P |- {B}", "D"),
    (f"R * P |- #Q ; {B}", "StarL"),
    (f"R , P |- #Q ; {B}", "D"),
    (f"R |- {S}", "CtrR"),
    (f"R |- ({S}) ; ({S})", "D"),
    (f"(R ; #({S})) , P |- #Q ; {B}", "WkR"),
    (f"(R ; #({S})) , P |- {B}", "StarR"),
    top=[FIG5_LEFT, FIG5_RIGHT])

W1, W2, W = "(P -* !R)", "(Q -* !R)", "((P | Q) -* !R)"
D = f"({W1} ; {W2})"
K = f"(#R , %{D})"
FIG6 = chain(
    (f"AE |- !{W} -> !{W1} | !{W2}", "ImpR"),
    (f"AE ; !{W} |- !{W1} | !{W2}", "AEL", "bwd"),
    (f"!{W} |- !{W1} | !{W2}", "OrR"),
    (f"!{W} |- !{W1} ; !{W2}", "NotL"),
    (f"#{W} |- !{W1} ; !{W2}", "D"),
    (f"#{W} ; #!{W1} |- !{W2}", "NotR"),
    (f"#{W} ; #!{W1} |- #{W2}", "D"),
    (f"#{W} ; {W2} |- !{W1}", "NotR"),
    (f"#{W} ; {W2} |- #{W1}", "D"),
    (f"{D} |- {W}", "WandR"),
    (f"{D} , P | Q |- !R", "NotR"),
    (f"{D} , P | Q |- #R", "D"),
    (f"P | Q |- {K}", "CtrR"),
    (f"P | Q |- {K} ; {K}", "OrL"),
    top=[chain((f"P |- {K}", "D"), (f"{D} |- %P , #R", "WkL"), (f"{W1} |- %P , #R", "WandL"),
               top=[idp("P"), neg_id("R")]),
         chain((f"Q |- {K}", "D"), (f"{W2} ; {W1} |- %Q , #R", "WkL"), (f"{W2} |- %Q , #R", "WandL"),
               top=[idp("Q"), neg_id("R")])])


def par_leg(atom):
    """(atom |- %!!~atom), the Fig 7 leg for one disjunct."""
    n = f"!!~{atom}"
    return chain(
        (f"{atom} |- %{n}", "D"),
        (f"{n} |- %{atom}", "NotL"),
        (f"#!~{atom} |- %{atom}", "D"),
        (f"#%{atom} |- !~{atom}", "NotR"),
        (f"#%{atom} |- #~{atom}", "D"),
        (f"~{atom} |- %{atom}", "MNotL"),
        (f"%{atom} |- %{atom}", "D"),
        top=[idp(atom)])


M = "(!!~P * !!~Q)"
FIG7 = chain(
    (f"P |* Q |- !!~{M}", "NotR"),
    (f"P |* Q |- #!~{M}", "D"),
    (f"!~{M} |- #(P |* Q)", "NotL"),
    (f"#~{M} |- #(P |* Q)", "D"),
    (f"P |* Q |- ~{M}", "MNotR"),
    (f"P |* Q |- %{M}", "D"),
    (f"{M} |- %(P |* Q)", "StarL"),
    ("!!~P , !!~Q |- %(P |* Q)", "D"),
    ("P |* Q |- %!!~P , %!!~Q", "ParL"),
    top=[par_leg("P"), par_leg("Q")])

PROOFS = {"fig4": FIG4, "fig5": FIG5, "fig6": FIG6, "fig7": FIG7}


def main() -> None:
    (OUT / "proofs").mkdir(parents=True, exist_ok=True)
    (OUT / "models").mkdir(parents=True, exist_ok=True)
    for name, tree in PROOFS.items():
        p = build(tree)
        report = check_proof(p)
        print(name, report)
        (OUT / "proofs" / f"{name}.json").write_text(
            json.dumps(proof_to_json(p), indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
    for name, m in (("prop28", nonconservativity_model()), ("prop29", relational_model())):
        (OUT / "models" / f"{name}.json").write_text(json.dumps(model_to_json(m), indent=1) + "\n")


if __name__ == "__main__":
    main()
