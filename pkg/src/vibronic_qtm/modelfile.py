"""JSON model files: schema, loading with validation, and serialisation.

A model file looks like::

    {
      "schema": "vibronic-qtm/model/1",
      "units": {"energy": "cm^-1", "field": "T"},
      "multiplet": {"J": "15/2", "gJ": 1.3333333333333333,
                    "theta": {"2": -0.006349206349206349, "4": ..., "6": ...}},
      "crystalField": [{"k": 2, "q": 0, "B": 1100.0}, ...],
      "modes": [{"omega": 120.5, "derivs": [{"k": 2, "q": 0, "dB": 3.1}, ...]}, ...],
      "fields": {
        "sample": {"volume": 8.3e-08, "concentration": 170.0, "measuredMParallel": 4.07},
        "nuclear": {"I": 2.5, "gN": -0.1922, "A": [[...], [...], [...]], "P": [[...], [...], [...]]}
      }
    }

``B`` and ``dB`` are in cm^-1 (``dB`` per unit dimensionless normal
coordinate), ``omega`` in cm^-1, sample volume in m^3 and concentration in
mol/m^3. ``gJ`` and ``theta`` default to the Dy(III) 6H15/2 values for
``J = 15/2`` with a warning.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from .angmom import DY_GJ, DY_THETA, MultipletSpec
from .cfham import CrystalFieldModel, Mode
from .fields import NuclearSpinSpec, SampleSpec

SCHEMA_ID = "vibronic-qtm/model/1"

_KQ = {
    "k": {"type": "integer", "enum": [2, 4, 6]},
    "q": {"type": "integer", "minimum": -6, "maximum": 6},
}
_MATRIX = {
    "type": "array",
    "minItems": 3,
    "maxItems": 3,
    "items": {"type": "array", "minItems": 3, "maxItems": 3, "items": {"type": "number"}},
}

MODEL_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["multiplet"],
    "additionalProperties": False,
    "properties": {
        "schema": {"type": "string"},
        "units": {"type": "object"},
        "multiplet": {
            "type": "object",
            "required": ["J"],
            "additionalProperties": False,
            "properties": {
                "J": {"type": ["number", "string"]},
                "gJ": {"type": "number"},
                "theta": {
                    "type": "object",
                    "propertyNames": {"enum": ["2", "4", "6"]},
                    "additionalProperties": {"type": "number"},
                },
            },
        },
        "crystalField": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["k", "q", "B"],
                "additionalProperties": False,
                "properties": {**_KQ, "B": {"type": "number"}},
            },
        },
        "modes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["omega"],
                "additionalProperties": False,
                "properties": {
                    "omega": {"type": "number", "exclusiveMinimum": 0},
                    "derivs": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["k", "q", "dB"],
                            "additionalProperties": False,
                            "properties": {**_KQ, "dB": {"type": "number"}},
                        },
                    },
                },
            },
        },
        "fields": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "sample": {
                    "type": "object",
                    "required": ["volume"],
                    "additionalProperties": False,
                    "properties": {
                        "volume": {"type": "number", "exclusiveMinimum": 0},
                        "concentration": {"type": "number", "exclusiveMinimum": 0},
                        "nMolecules": {"type": "number", "exclusiveMinimum": 0},
                        "measuredMParallel": {"type": "number"},
                        "Msat": {"type": "number"},
                    },
                },
                "nuclear": {
                    "type": "object",
                    "required": ["I", "gN"],
                    "additionalProperties": False,
                    "properties": {
                        "I": {"type": ["number", "string"]},
                        "gN": {"type": "number"},
                        "A": _MATRIX,
                        "P": _MATRIX,
                    },
                },
            },
        },
    },
}


class ModelFileError(ValueError):
    """Invalid model file; the message names the location and the reason."""


@dataclass(frozen=True)
class LoadedModel:
    model: CrystalFieldModel
    sample: SampleSpec | None = None
    nuclear: NuclearSpinSpec | None = None


def _where(path) -> str:
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in path)


def _kq_map(entries, value_key, where):
    out = {}
    for i, e in enumerate(entries):
        kq = (e["k"], e["q"])
        if abs(kq[1]) > kq[0]:
            raise ModelFileError(f"{where}[{i}]: |q| = {abs(kq[1])} exceeds k = {kq[0]}")
        if kq in out:
            raise ModelFileError(f"{where}[{i}]: duplicate entry (k={kq[0]}, q={kq[1]})")
        out[kq] = float(e[value_key])
    return out


def parse_model(doc: dict, source: str = "<model>") -> LoadedModel:
    """Validate a decoded model document and build the model objects."""
    try:
        jsonschema.validate(doc, MODEL_SCHEMA)
    except jsonschema.ValidationError as err:
        raise ModelFileError(f"{source}: {_where(err.absolute_path)}: {err.message}") from None

    mult = doc["multiplet"]
    try:
        j = Fraction(mult["J"]) if isinstance(mult["J"], str) else mult["J"]
        j = float(j)
    except (ValueError, ZeroDivisionError):
        raise ModelFileError(f"{source}: $.multiplet.J: not a number: {mult['J']!r}") from None
    is_dy = abs(j - 7.5) < 1e-12
    if "gJ" in mult:
        gj = mult["gJ"]
    elif is_dy:
        warnings.warn(f"{source}: gJ missing, using the 6H15/2 value 4/3", stacklevel=2)
        gj = DY_GJ
    else:
        raise ModelFileError(f"{source}: $.multiplet.gJ: required when J != 15/2")
    if "theta" in mult:
        theta = {int(k): v for k, v in mult["theta"].items()}
    elif is_dy:
        warnings.warn(f"{source}: theta missing, using the 6H15/2 operator equivalent factors", stacklevel=2)
        theta = dict(DY_THETA)
    else:
        theta = {}

    try:
        spec = MultipletSpec(J=j, gJ=gj, theta=theta)
        cf = _kq_map(doc.get("crystalField", []), "B", f"{source}: $.crystalField")
        modes = [
            Mode(omega=m["omega"], derivs=_kq_map(m.get("derivs", []), "dB", f"{source}: $.modes[{i}].derivs"))
            for i, m in enumerate(doc.get("modes", []))
        ]
        missing = sorted(({k for k, _ in cf} | {k for m in modes for k, _ in m.derivs}) - set(theta))
        if missing:
            raise ModelFileError(f"{source}: $.multiplet.theta: no factor for rank(s) {missing}")
        model = CrystalFieldModel(spec, cf, modes)

        fields = doc.get("fields", {})
        sample = nuclear = None
        if "sample" in fields:
            s = fields["sample"]
            sample = SampleSpec(
                volume=s["volume"],
                concentration=s.get("concentration"),
                n_molecules=s.get("nMolecules"),
                measured_m_parallel=s.get("measuredMParallel"),
                msat=s.get("Msat"),
            )
        if "nuclear" in fields:
            n = fields["nuclear"]
            ival = float(Fraction(n["I"])) if isinstance(n["I"], str) else n["I"]
            nuclear = NuclearSpinSpec(
                I=ival, gN=n["gN"], A=n.get("A", np.zeros((3, 3))), P=n.get("P", np.zeros((3, 3)))
            )
    except ModelFileError:
        raise
    except ValueError as err:
        raise ModelFileError(f"{source}: {err}") from None
    return LoadedModel(model, sample, nuclear)


def load_model(path) -> LoadedModel:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ModelFileError(f"{path}: line {err.lineno}, column {err.colno}: {err.msg}") from None
    return parse_model(doc, str(path))


def model_to_dict(model: CrystalFieldModel, sample: SampleSpec | None = None, nuclear: NuclearSpinSpec | None = None) -> dict:
    spec = model.spec
    two_j = int(round(2 * spec.J))
    doc = {
        "schema": SCHEMA_ID,
        "units": {"energy": "cm^-1", "field": "T", "volume": "m^3", "concentration": "mol/m^3"},
        "multiplet": {
            "J": f"{two_j}/2" if two_j % 2 else str(two_j // 2),
            "gJ": spec.gJ,
            "theta": {str(k): v for k, v in sorted(spec.theta.items())},
        },
        "crystalField": [{"k": k, "q": q, "B": b} for (k, q), b in model.cf_params.items()],
        "modes": [
            {"omega": m.omega, "derivs": [{"k": k, "q": q, "dB": d} for (k, q), d in m.derivs.items()]}
            for m in model.modes
        ],
    }
    fields = {}
    if sample is not None:
        s = {"volume": sample.volume}
        for key, val in (
            ("concentration", sample.concentration),
            ("nMolecules", sample.n_molecules),
            ("measuredMParallel", sample.measured_m_parallel),
            ("Msat", sample.msat),
        ):
            if val is not None:
                s[key] = val
        fields["sample"] = s
    if nuclear is not None:
        fields["nuclear"] = {"I": nuclear.I, "gN": nuclear.gN, "A": nuclear.A.tolist(), "P": nuclear.P.tolist()}
    if fields:
        doc["fields"] = fields
    return doc


def save_model(path, model: CrystalFieldModel, sample=None, nuclear=None) -> None:
    """Write a model file; floats are written with full round-trip precision."""
    Path(path).write_text(json.dumps(model_to_dict(model, sample, nuclear), indent=2) + "\n", encoding="utf-8")
