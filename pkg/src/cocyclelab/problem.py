"""Problem documents: schema, validation and construction of declarations.

A problem document is a JSON tree::

    {"options": {...},
     "groups": {name: {...}}, "subgroups": {...}, "measures": {...},
     "representations": {...}, "cocycles": {...}, "algebra_actions": {...},
     "tasks": [{"type": ..., "id": ..., ...}, ...]}

Structural checks use JSON Schema; reference resolution, dimension checks
and the group/measure invariants are checked here and reported with paths.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from . import linalg as la
from .cohomology import InhomCocycle, is_cocycle
from .errors import CocycleLabError, SchemaError
from .groups import (FiniteSupportMeasure, FiniteTableGroup, FreeAbelianGroup, FreeGroup,
                     HeisenbergGroup, PresentedGroup, ProductGroup, Subgroup, center,
                     cyclic_group, enumerate_finite, permutation_group)
from .reps import Representation
from .stationarity import MatrixAlgebraAction

SCALAR = {"oneOf": [{"type": "number"}, {"type": "string"}]}
MATRIX = {"type": "array", "items": {"type": "array", "items": SCALAR}}
VECTOR = {"type": "array", "items": SCALAR}
NAMES = {"type": "array", "items": {"type": "string", "pattern": "^[A-Za-z_][A-Za-z0-9_]*$"}}
WORDS = {"type": "array", "items": {"type": "string"}}

GROUP_SCHEMA = {
    "type": "object",
    "required": ["family"],
    "properties": {
        "family": {"enum": ["free", "free_abelian", "heisenberg3", "cyclic", "permutation",
                            "finite_table", "presentation", "product"]},
        "rank": {"type": "integer", "minimum": 0},
        "order": {"type": "integer", "minimum": 1},
        "generators": NAMES,
        "relators": WORDS,
        "permutations": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "table": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "elements": {"type": "array", "items": {"type": "string"}},
        "generator_elements": {"type": "array", "items": {"type": "integer"}},
        "factors": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
        "cap": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}

SUBGROUP_SCHEMA = {
    "type": "object",
    "required": ["group"],
    "properties": {"group": {"type": "string"}, "generators": WORDS, "center": {"type": "boolean"}},
    "additionalProperties": False,
}

MEASURE_SCHEMA = {
    "type": "object",
    "required": ["group", "atoms"],
    "properties": {"group": {"type": "string"}, "atoms": {"type": "object", "additionalProperties": SCALAR}},
    "additionalProperties": False,
}

REP_SCHEMA = {
    "type": "object",
    "required": ["group"],
    "properties": {
        "group": {"type": "string"},
        "dim": {"type": "integer", "minimum": 0},
        "scalars": {"enum": ["auto", "rational", "float"]},
        "norm": {"enum": ["1", "2", "inf"]},
        "images": {"oneOf": [{"type": "array", "items": MATRIX},
                             {"type": "object", "additionalProperties": MATRIX}]},
        "trivial": {"type": "boolean"},
    },
    "additionalProperties": False,
}

COCYCLE_SCHEMA = {
    "type": "object",
    "required": ["rep", "values"],
    "properties": {
        "rep": {"type": "string"},
        "values": {"oneOf": [{"type": "array", "items": VECTOR},
                             {"type": "object", "additionalProperties": VECTOR}]},
    },
    "additionalProperties": False,
}

COMPLEX = {"oneOf": [SCALAR, {"type": "array", "items": SCALAR, "minItems": 2, "maxItems": 2}]}

ACTION_SCHEMA = {
    "type": "object",
    "required": ["group", "blocks", "perms", "unitaries"],
    "properties": {
        "group": {"type": "string"},
        "blocks": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "perms": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "unitaries": {"type": "array", "items": {"type": "array", "items": {
            "type": "array", "items": {"type": "array", "items": COMPLEX}}}},
    },
    "additionalProperties": False,
}

TASK_TYPES = (
    "validate-rep", "certify", "h1", "hn", "membership", "harmonic",
    "cesaro", "stationary-decomposition", "harmonic-space", "liouville", "stationary-states",
    "compress", "complement-b1", "center-decompose", "center-quotient", "nilpotent-reduce",
    "product-iso", "product-embed",
    "transversal", "induce-rep", "induce-cocycle", "induction-check", "induction-stages",
)

# keys a task may carry, and the declaration table each reference key points into
TASK_REFS = {
    "group": "groups", "rep": "representations", "measure": "measures", "cocycle": "cocycles",
    "action": "algebra_actions", "N": "subgroups", "C": "subgroups", "subgroup": "subgroups",
    "inner": "subgroups", "mu1": "measures", "mu2": "measures",
}

TASK_SCHEMA = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": list(TASK_TYPES)},
        "id": {"type": "string"},
        **{k: {"type": "string"} for k in TASK_REFS},
        "degree": {"type": "integer", "minimum": 0, "maximum": 3},
        "force": {"type": "boolean"},
        "p": {"enum": ["1", "2", "inf"]},
        "base_images": {"type": "array", "items": MATRIX},
        "base_values": {"type": "array", "items": VECTOR},
        "base_dim": {"type": "integer", "minimum": 0},
        "cap": {"type": "integer", "minimum": 1},
        "inner_generators": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "witnesses": {"type": "boolean"},
    },
    "additionalProperties": False,
}

OPTIONS_SCHEMA = {
    "type": "object",
    "properties": {
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "max_iter": {"type": "integer", "minimum": 1},
        "bar_budget": {"type": "integer", "minimum": 1},
        "enumeration_cap": {"type": "integer", "minimum": 1},
        "index_cap": {"type": "integer", "minimum": 1},
        "witnesses": {"type": "boolean"},
        "scalars": {"enum": ["auto", "rational", "float"]},
    },
    "additionalProperties": False,
}

PROBLEM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "cocyclelab problem document",
    "type": "object",
    "properties": {
        "options": OPTIONS_SCHEMA,
        "groups": {"type": "object", "additionalProperties": GROUP_SCHEMA},
        "subgroups": {"type": "object", "additionalProperties": SUBGROUP_SCHEMA},
        "measures": {"type": "object", "additionalProperties": MEASURE_SCHEMA},
        "representations": {"type": "object", "additionalProperties": REP_SCHEMA},
        "cocycles": {"type": "object", "additionalProperties": COCYCLE_SCHEMA},
        "algebra_actions": {"type": "object", "additionalProperties": ACTION_SCHEMA},
        "tasks": {"type": "array", "items": TASK_SCHEMA},
    },
    "additionalProperties": False,
}

DEFAULT_OPTIONS = {"tol": 1e-9, "max_iter": 10**6, "bar_budget": 2 * 10**6, "enumeration_cap": 5000,
                   "index_cap": 1000, "witnesses": True, "scalars": "auto"}

SECTIONS = ("groups", "subgroups", "measures", "representations", "cocycles", "algebra_actions")


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


@dataclass
class Problem:
    document: dict
    options: dict
    tasks: list
    _built: dict = field(default_factory=dict, repr=False)

    def decl(self, section: str, name: str):
        return self.document.get(section, {})[name]

    def get(self, section: str, name: str):
        """Build (once) and return a declaration."""
        key = (section, name)
        if key not in self._built:
            if key in self._building:
                raise SchemaError([(_path([section, name]), "cyclic definition")])
            self._building.add(key)
            try:
                self._built[key] = _BUILDERS[section](self, name, self.decl(section, name))
            except SchemaError:
                raise
            except (CocycleLabError, ValueError, ZeroDivisionError) as e:
                raise SchemaError([(_path([section, name]), str(e))]) from e
            finally:
                self._building.discard(key)
        return self._built[key]

    def __post_init__(self):
        self._building = set()

    def task_label(self, i: int) -> str:
        return self.tasks[i].get("id") or f"task{i}"


def load_document(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError([("$", f"not valid JSON: {e.msg} at line {e.lineno}")]) from e


def parse_problem(doc, build: bool = True) -> Problem:
    """Validate a problem document; with ``build`` every declaration is constructed."""
    if isinstance(doc, (str, bytes)):
        doc = load_document(doc.decode() if isinstance(doc, bytes) else doc)
    validator = jsonschema.Draft202012Validator(PROBLEM_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        raise SchemaError([(_path(e.absolute_path), e.message) for e in errors])
    errs = []
    _check_references(doc, errs)
    if errs:
        raise SchemaError(errs)
    options = dict(DEFAULT_OPTIONS)
    options.update(doc.get("options", {}))
    ids = [t.get("id") for t in doc.get("tasks", []) if t.get("id")]
    dup = sorted({i for i in ids if ids.count(i) > 1})
    if dup:
        raise SchemaError([("$.tasks", f"duplicate task id {d!r}") for d in dup])
    prob = Problem(doc, options, list(doc.get("tasks", [])))
    if build:
        for section in SECTIONS:
            for name in doc.get(section, {}):
                try:
                    prob.get(section, name)
                except SchemaError as e:
                    errs.extend(e.errors)
        if errs:
            raise SchemaError(errs)
    return prob


def _check_references(doc: dict, errs: list):
    def need(section, name, where):
        if name not in doc.get(section, {}):
            errs.append((_path(where), f"unknown {section[:-1].replace('_', ' ')} {name!r}"))

    for name, g in doc.get("groups", {}).items():
        for i, f in enumerate(g.get("factors", [])):
            need("groups", f, ["groups", name, "factors", i])
    for section in ("subgroups", "measures", "representations", "algebra_actions"):
        for name, d in doc.get(section, {}).items():
            need("groups", d["group"], [section, name, "group"])
    for name, c in doc.get("cocycles", {}).items():
        need("representations", c["rep"], ["cocycles", name, "rep"])
    for i, t in enumerate(doc.get("tasks", [])):
        for key, section in TASK_REFS.items():
            if key in t:
                need(section, t[key], ["tasks", i, key])


# -- builders -----------------------------------------------------------------

def _names(d, k, default):
    names = d.get("generators")
    if names is None:
        return default
    if len(names) != k:
        raise ValueError(f"expected {k} generator names, got {len(names)}")
    return names


def _build_group(prob: Problem, name: str, d: dict):
    fam = d["family"]
    if fam == "free":
        k = d.get("rank", len(d.get("generators", [])))
        return FreeGroup(k, _names(d, k, None))
    if fam == "free_abelian":
        k = d.get("rank", len(d.get("generators", [])))
        return FreeAbelianGroup(k, _names(d, k, None))
    if fam == "heisenberg3":
        return HeisenbergGroup(tuple(_names(d, 3, ("x", "y", "z"))))
    if fam == "cyclic":
        if "order" not in d:
            raise ValueError("cyclic group needs an order")
        gens = d.get("generators", ["a"])
        if len(gens) != 1:
            raise ValueError("cyclic group has one generator")
        return cyclic_group(d["order"], gens[0])
    if fam == "permutation":
        perms = d.get("permutations")
        if not perms:
            raise ValueError("permutation group needs permutations")
        for p in perms:
            if sorted(p) != list(range(len(perms[0]))):
                raise ValueError(f"{p} is not a permutation of 0..{len(perms[0]) - 1}")
        return permutation_group(perms, _names(d, len(perms), None))
    if fam == "finite_table":
        if "table" not in d:
            raise ValueError("finite_table needs a table")
        gens = d.get("generator_elements")
        names = d.get("generators")
        return FiniteTableGroup(np.asarray(d["table"]), d.get("elements"), gens, names)
    if fam == "presentation":
        P = PresentedGroup(d.get("generators", []), d.get("relators", []))
        return enumerate_finite(P, d.get("cap", prob.options["enumeration_cap"]))
    if fam == "product":
        left, right = (prob.get("groups", f) for f in d["factors"])
        return ProductGroup(left, right, d.get("generators"))
    raise ValueError(f"unknown family {fam}")


def _build_subgroup(prob: Problem, name: str, d: dict):
    G = prob.get("groups", d["group"])
    if d.get("center"):
        if d.get("generators"):
            raise ValueError("give either generators or center, not both")
        Z = center(G)
        return Subgroup(G, Z.generators, name)
    return Subgroup(G, [G.parse(w) for w in d.get("generators", [])], name)


def _build_measure(prob: Problem, name: str, d: dict):
    G = prob.get("groups", d["group"])
    return FiniteSupportMeasure(G, {w: p for w, p in d["atoms"].items()})


def _scalar_mode(prob: Problem, d: dict) -> bool | None:
    mode = d.get("scalars", prob.options["scalars"])
    return {"auto": None, "rational": True, "float": False}[mode]


def _per_generator(G, entries, what):
    if isinstance(entries, dict):
        unknown = sorted(set(entries) - set(G.names))
        if unknown:
            raise ValueError(f"{what} for unknown generator {unknown[0]!r}")
        missing = [n for n in G.names if n not in entries]
        if missing:
            raise ValueError(f"{what} missing for generator {missing[0]!r}")
        return [entries[n] for n in G.names]
    if len(entries) != G.ngens:
        raise ValueError(f"{G.ngens} {what} required, got {len(entries)}")
    return list(entries)


def parse_matrix(m, exact: bool | None) -> np.ndarray:
    rows = [list(r) for r in m]
    if rows and len({len(r) for r in rows}) > 1:
        raise ValueError("ragged matrix")
    want_exact = exact if exact is not None else all(_rational_entry(x) for r in rows for x in r)
    a = np.array([[la.parse_scalar(x, want_exact) for x in r] for r in rows],
                 dtype=object if want_exact else float)
    return a.reshape(len(rows), len(rows[0]) if rows else 0)


def parse_vector(v, exact: bool) -> np.ndarray:
    return np.array([la.parse_scalar(x, exact) for x in v], dtype=object if exact else float)


def _rational_entry(x) -> bool:
    if isinstance(x, bool):
        return True
    if isinstance(x, int):
        return True
    if isinstance(x, float):
        return x.is_integer()
    s = str(x).strip()
    return "." not in s and "e" not in s.lower() and "n" not in s.lower()


def build_representation(G, images, exact: bool | None, dim: int | None = None, norm: str = "2") -> Representation:
    mats = [parse_matrix(m, exact) for m in images]
    if exact is None:
        exact = all(la.is_exact(m) for m in mats)
    mats = [la.coerce(m, exact) for m in mats]
    for m in mats:
        if m.shape[0] != m.shape[1] or (dim is not None and m.shape[0] != dim):
            raise ValueError(f"image of shape {m.shape} does not match dimension {dim}")
    return Representation(G, mats, exact, norm_kind=norm, dim=dim)


def _build_rep(prob: Problem, name: str, d: dict):
    from .reps import validate_representation
    G = prob.get("groups", d["group"])
    exact = _scalar_mode(prob, d)
    if d.get("trivial"):
        if "images" in d:
            raise ValueError("give either images or trivial, not both")
        rho = Representation.trivial(G, d.get("dim", 1), exact is not False)
    else:
        if "images" not in d:
            raise ValueError("representation needs images or trivial: true")
        rho = build_representation(G, _per_generator(G, d["images"], "images"), exact, d.get("dim"),
                                   d.get("norm", "2"))
    validate_representation(rho, prob.options["tol"])
    return rho


def _build_cocycle(prob: Problem, name: str, d: dict):
    rho = prob.get("representations", d["rep"])
    vals = _per_generator(rho.group, d["values"], "values")
    vecs = [parse_vector(v, rho.exact) for v in vals]
    for v in vecs:
        if v.shape != (rho.dim,):
            raise ValueError(f"cocycle value of length {v.shape[0]} in a dimension {rho.dim} module")
    b = InhomCocycle(rho, vecs)
    ok, res = is_cocycle(b, prob.options["tol"])
    if not ok:
        raise ValueError(f"values violate the cocycle relations (residual {res:.3g})")
    return b


def _complex_entry(x) -> complex:
    if isinstance(x, list):
        return complex(float(la.parse_scalar(x[0], False)), float(la.parse_scalar(x[1], False)))
    return complex(float(la.parse_scalar(x, False)))


def _build_action(prob: Problem, name: str, d: dict):
    G = prob.get("groups", d["group"])
    if not isinstance(G, FiniteTableGroup):
        raise ValueError("algebra actions need a finite group")
    us = [[np.array([[_complex_entry(x) for x in row] for row in U], dtype=complex) for U in per]
          for per in d["unitaries"]]
    return MatrixAlgebraAction(G, list(d["blocks"]), [list(p) for p in d["perms"]], us)


_BUILDERS = {
    "groups": _build_group,
    "subgroups": _build_subgroup,
    "measures": _build_measure,
    "representations": _build_rep,
    "cocycles": _build_cocycle,
    "algebra_actions": _build_action,
}
