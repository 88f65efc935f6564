"""Model files: a bit-exact JSON schema for lattice symbols.

A model file carries the matrix dimension, variable names, the hopping
terms (exponent vector plus row-major complex matrix, each entry a
[re, im] pair), the symmetry operators, and an optional family section:
``suspension`` (constant reference matrix) for three-dimensional
mapping-torus models, or ``affine_path`` (delta terms) for one-parameter
deformations.  Terms are serialized sorted lexicographically by exponent,
so a load/save round trip is coefficient-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import NotHermitian, SchemaError, SymmetryError
from .laurent import (
    Family3D,
    LaurentMatrix,
    SymmetryData,
    check_chiral,
    check_hermitian_on_torus,
    check_inversion,
    suspend,
)

__all__ = ["ModelBundle", "load_model", "save_model", "bundle_from_parts"]


def _matrix_to_json(mat):
    mat = np.asarray(mat, dtype=complex)
    return [
        [[float(v.real), float(v.imag)] for v in row] for row in mat
    ]


def _matrix_from_json(obj, what="matrix"):
    try:
        arr = np.array(
            [[complex(e[0], e[1]) for e in row] for row in obj], dtype=complex
        )
    except (TypeError, IndexError, ValueError) as exc:
        raise SchemaError(f"malformed {what}: {exc}") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise SchemaError(f"{what} must be square")
    return arr


def _terms_to_json(m: LaurentMatrix):
    return [
        {"exp": list(exp), "matrix": _matrix_to_json(mat)}
        for exp, mat in sorted(m.terms.items())
    ]


def _terms_from_json(obj, size, nvars):
    terms = {}
    for item in obj:
        if "exp" not in item or "matrix" not in item:
            raise SchemaError("term needs 'exp' and 'matrix'")
        exp = tuple(int(e) for e in item["exp"])
        if len(exp) != nvars:
            raise SchemaError(f"term exponent {exp} has wrong length")
        mat = _matrix_from_json(item["matrix"], f"term {exp}")
        if mat.shape != (size, size):
            raise SchemaError(f"term {exp} has wrong matrix size {mat.shape}")
        if exp in terms:
            raise SchemaError(f"duplicate term exponent {exp}")
        terms[exp] = mat
    return terms


@dataclass
class ModelBundle:
    """A validated model: symbol or family, symmetry data, metadata.

    ``path`` is non-None for affine one-parameter deformations; it maps a
    real parameter r to a symbol.  ``builtin`` names a non-symbol reference
    object (the degree-one winding reference) that most commands reject.
    """

    model: object
    symmetry: SymmetryData | None
    name: str
    dimension: int
    provenance: str = ""
    path: object = None
    builtin: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def is_family(self):
        return isinstance(self.model, Family3D)


def bundle_from_parts(symbol, symmetry, name, provenance="", path=None):
    dimension = 3 if isinstance(symbol, Family3D) else 2
    return ModelBundle(
        model=symbol,
        symmetry=symmetry,
        name=name,
        dimension=dimension,
        provenance=provenance,
        path=path,
    )


def _validate(symbol2, symmetry):
    ok, defect = check_hermitian_on_torus(symbol2)
    if not ok:
        raise NotHermitian(f"symbol not Hermitian on the torus (defect {defect:.3e})")
    ok, defect = check_inversion(symbol2, symmetry)
    if not ok:
        raise SymmetryError(f"inversion relation violated (defect {defect:.3e})")
    if symmetry.chiral is not None:
        ok, defect = check_chiral(symbol2, symmetry)
        if not ok:
            raise SymmetryError(f"chiral relation violated (defect {defect:.3e})")


def load_model(path) -> ModelBundle:
    """Load and validate a model file; failures raise typed errors."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    if "builtin" in raw:
        return ModelBundle(
            model=None,
            symmetry=None,
            name=raw.get("name", "builtin"),
            dimension=int(raw.get("dimension", 0)),
            provenance=raw.get("provenance", ""),
            builtin=raw["builtin"],
        )
    for key in ("size", "vars", "terms", "symmetry"):
        if key not in raw:
            raise SchemaError(f"missing required key {key!r}")
    size = int(raw["size"])
    nvars = len(raw["vars"])
    if nvars != 2:
        raise SchemaError("model files carry two-variable symbols")
    terms = _terms_from_json(raw["terms"], size, nvars)
    base = LaurentMatrix(size, nvars, terms)

    sym_raw = raw["symmetry"]
    if "inversion" not in sym_raw:
        raise SchemaError("symmetry section needs 'inversion'")
    inv = _matrix_from_json(sym_raw["inversion"], "inversion")
    chi = None
    if sym_raw.get("chiral") is not None:
        chi = _matrix_from_json(sym_raw["chiral"], "chiral")
    symmetry = SymmetryData(inv, chi)
    if symmetry.size != size:
        raise SchemaError("symmetry operator size differs from model size")
    _validate(base, symmetry)

    fam_raw = raw.get("family")
    model = base
    path_fn = None
    if fam_raw:
        kind = fam_raw.get("kind")
        if kind == "suspension":
            eps = _matrix_from_json(fam_raw["epsilon"], "epsilon")
            model = suspend(base, symmetry, eps)
        elif kind == "affine_path":
            delta_terms = _terms_from_json(fam_raw["delta_terms"], size, nvars)
            delta = LaurentMatrix(size, nvars, delta_terms)
            _validate(base + delta, symmetry)

            def path_fn(r, _base=base, _delta=delta):
                return _base + _delta.scale(float(r))

        else:
            raise SchemaError(f"unknown family kind {kind!r}")

    return ModelBundle(
        model=model,
        symmetry=symmetry,
        name=raw.get("name", "unnamed"),
        dimension=3 if isinstance(model, Family3D) else 2,
        provenance=raw.get("provenance", ""),
        path=path_fn,
    )


def save_model(bundle_or_parts, path):
    """Serialize a two-variable model (plus optional family data)."""
    if isinstance(bundle_or_parts, ModelBundle):
        b = bundle_or_parts
        base = b.model.base if b.is_family else b.model
        symmetry = b.symmetry
        name = b.name
        provenance = b.provenance
        family = None
        if b.is_family:
            family = {
                "kind": "suspension",
                "epsilon": _matrix_to_json(b.model.epsilon),
            }
        out = _model_dict(base, symmetry, name, provenance, family)
    else:
        out = bundle_or_parts
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(out, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _model_dict(base, symmetry, name, provenance="", family=None):
    out = {
        "name": name,
        "provenance": provenance,
        "size": base.size,
        "vars": ["z", "w"],
        "terms": _terms_to_json(base),
        "symmetry": {
            "inversion": _matrix_to_json(symmetry.inversion),
            "chiral": (
                _matrix_to_json(symmetry.chiral)
                if symmetry.chiral is not None
                else None
            ),
        },
    }
    if family is not None:
        out["family"] = family
    return out
