"""Bundled proof scripts (Figs 4 to 7) and the two small witness models."""

from __future__ import annotations

import json
from importlib import resources

from ..models import BbiModel, model_from_json
from ..proofs import Proof, proof_from_json

PROOF_FIXTURES = ("fig4", "fig5", "fig6", "fig7")
MODEL_FIXTURES = ("prop28", "prop29")


def _read(kind: str, name: str) -> dict:
    return json.loads(resources.files(__package__).joinpath(kind, f"{name}.json").read_text("utf-8"))


def load_proof(name: str) -> Proof:
    if name not in PROOF_FIXTURES:
        raise KeyError(f"unknown proof fixture {name!r}; choose from {', '.join(PROOF_FIXTURES)}")
    return proof_from_json(_read("proofs", name))


def load_model(name: str) -> BbiModel:
    if name not in MODEL_FIXTURES:
        raise KeyError(f"unknown model fixture {name!r}; choose from {', '.join(MODEL_FIXTURES)}")
    return model_from_json(_read("models", name))
