"""JSON schema validation for theory and report documents."""
import json
from functools import lru_cache
from importlib import resources

import jsonschema

from .errors import SchemaError


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("incongruity").joinpath("schemas", f"{name}.json").read_text("utf-8")
    return json.loads(text)


def _validate(doc, name: str) -> None:
    validator = jsonschema.Draft202012Validator(load_schema(name))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise SchemaError(f"{name} field {where}: {e.message}")


def validate_theory(doc) -> None:
    _validate(doc, "theory")


def validate_report(doc) -> None:
    _validate(doc, "report")
