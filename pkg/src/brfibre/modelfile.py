"""Model file ingestion.

Structured text, one `key = value` pair per line under section headers:

    [model]
    label = quartic_f17
    [ambient]
    vars = X0, X1, X2, X3
    weights = 1, 1, 1, 1
    [equation]
    expr = X0^4 + 47*X1^4 - 103*X2^4 - 82297*X3^4
    [arith]
    p = 17
    [algebra]
    n = 2
    a = 17
    f_num = 20*X0^2 + 611*X1^2 + 927*X2^2
    f_den = X0^2

[equation] and [algebra] sections may repeat.  Blank lines and lines
starting with # are ignored.
"""

from fractions import Fraction

from .errors import DomainError
from .model import AmbientSpace, ModelSpec
from .poly import MultiPoly
from .torsor import SymbolAlgebra


def _parse_sections(text):
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = (line[1:-1].strip().lower(), {})
            sections.append(current)
            continue
        if "=" not in line:
            raise DomainError(f"line {lineno}: expected key = value, got {line!r}")
        if current is None:
            current = ("model", {})
            sections.append(current)
        key, _, value = line.partition("=")
        current[1][key.strip().lower()] = value.strip()
    return sections


def _split_list(value):
    return [v.strip() for v in value.split(",") if v.strip()]


def parse_model_text(text):
    """Parse a model file; returns (ModelSpec, list of SymbolAlgebra)."""
    sections = _parse_sections(text)
    label = ""
    ambient = None
    equations = []
    prime = None
    algebra_specs = []

    for name, kv in sections:
        if name == "model":
            label = kv.get("label", label)
        elif name == "ambient":
            if "vars" not in kv:
                raise DomainError("[ambient] needs vars = ...")
            names = tuple(_split_list(kv["vars"]))
            weights = tuple(int(w) for w in _split_list(kv.get(
                "weights", ",".join("1" for _ in names))))
            ambient = AmbientSpace(names, weights)
        elif name == "equation":
            equations.append(kv.get("expr", ""))
        elif name == "arith":
            prime = int(kv["p"])
            label = kv.get("label", label)
        elif name == "algebra":
            algebra_specs.append(kv)
        else:
            raise DomainError(f"unknown section [{name}]")

    if ambient is None:
        raise DomainError("missing [ambient] section")
    if prime is None:
        raise DomainError("missing [arith] section with p = ...")
    eq_polys = [MultiPoly.from_text(e, ambient.var_names, ambient.weights)
                for e in equations]
    model = ModelSpec(ambient, eq_polys, prime, label)

    algebras = []
    for kv in algebra_specs:
        for req in ("n", "a", "f_num", "f_den"):
            if req not in kv:
                raise DomainError(f"[algebra] needs {req} = ...")
        algebras.append(SymbolAlgebra(
            int(kv["n"]),
            Fraction(kv["a"]),
            MultiPoly.from_text(kv["f_num"], ambient.var_names, ambient.weights),
            MultiPoly.from_text(kv["f_den"], ambient.var_names, ambient.weights),
        ))
    return model, algebras


def load_model_file(path):
    with open(path) as fh:
        return parse_model_text(fh.read())
