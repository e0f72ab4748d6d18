"""JSON problem files and report serialization.

Problem file::

    {
      "A": [[1, 0], [0, 1]],
      "T": [[1, [0, 1]], [0, 1]],
      "tuple": [[[...]], [[...]]],
      "tolerances": {"conv_tol": 1e-12}
    }

Matrix entries are bare reals or ``[re, im]`` pairs. ``T`` is one matrix;
``tuple`` is a list of matrices for the joint spectral radius. At least one
of the two must be present. Reports carry ``"schema_version"``; an infinite
quantity is written as ``{"value": null, "infinite": true}``.
"""

import json
import math
from dataclasses import dataclass, field, fields
from typing import Dict, List, Optional

import numpy as np

from .errors import ShapeError
from .numerics import DEFAULT_CONFIG, ToleranceConfig, require_square
from .radii import INFINITE, AnalysisReport, GelfandTrace

__all__ = [
    "SCHEMA_VERSION",
    "ProblemFile",
    "ProblemError",
    "parse_problem",
    "load_problem",
    "encode_matrix",
    "decode_matrix",
    "encode_value",
    "decode_value",
    "analysis_to_dict",
    "analysis_from_dict",
]

SCHEMA_VERSION = 1


class ProblemError(ValueError):
    """Malformed problem file."""


@dataclass
class ProblemFile:
    A: np.ndarray
    T: Optional[np.ndarray] = None
    operators: List[np.ndarray] = field(default_factory=list)
    tolerances: Dict[str, object] = field(default_factory=dict)

    def config(self, base=DEFAULT_CONFIG):
        return base.with_overrides(**self.tolerances)


def _entry(z, where):
    if isinstance(z, bool):
        raise ProblemError(f"{where}: booleans are not matrix entries")
    if isinstance(z, (int, float)):
        return complex(z)
    if isinstance(z, list) and len(z) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in z):
        return complex(z[0], z[1])
    raise ProblemError(f"{where}: entry {z!r} is neither a real nor an [re, im] pair")


def decode_matrix(data, name="matrix"):
    if not isinstance(data, list) or not data or not all(isinstance(row, list) for row in data):
        raise ProblemError(f"{name} must be a non-empty list of rows")
    width = len(data[0])
    if any(len(row) != width for row in data):
        raise ProblemError(f"{name} has rows of different lengths")
    M = np.array([[_entry(z, f"{name}[{i}][{j}]") for j, z in enumerate(row)] for i, row in enumerate(data)])
    try:
        return require_square(M, name)
    except ShapeError as exc:
        raise ProblemError(str(exc)) from exc


def encode_matrix(M):
    """Nested lists; real entries stay bare, complex ones become ``[re, im]``."""
    M = np.asarray(M, dtype=complex)
    return [[float(z.real) if z.imag == 0 else [float(z.real), float(z.imag)] for z in row] for row in M]


_TOL_FIELDS = {f.name for f in fields(ToleranceConfig)}


def parse_problem(doc):
    if not isinstance(doc, dict):
        raise ProblemError("problem file must be a JSON object")
    unknown = set(doc) - {"A", "T", "tuple", "tolerances"}
    if unknown:
        raise ProblemError(f"unknown keys: {', '.join(sorted(unknown))}")
    if "A" not in doc:
        raise ProblemError("missing key 'A'")
    A = decode_matrix(doc["A"], "A")
    T = decode_matrix(doc["T"], "T") if "T" in doc else None
    ops = []
    if "tuple" in doc:
        if not isinstance(doc["tuple"], list) or not doc["tuple"]:
            raise ProblemError("'tuple' must be a non-empty list of matrices")
        ops = [decode_matrix(m, f"tuple[{i}]") for i, m in enumerate(doc["tuple"])]
    if T is None and not ops:
        raise ProblemError("need 'T' or 'tuple'")
    for name, M in [("T", T)] + [(f"tuple[{i}]", M) for i, M in enumerate(ops)]:
        if M is not None and M.shape != A.shape:
            raise ProblemError(f"{name} has shape {M.shape}, A has {A.shape}")
    tol = doc.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ProblemError("'tolerances' must be an object")
    bad = set(tol) - _TOL_FIELDS
    if bad:
        raise ProblemError(f"unknown tolerance fields: {', '.join(sorted(bad))}")
    try:
        DEFAULT_CONFIG.with_overrides(**tol)
    except (TypeError, ValueError) as exc:
        raise ProblemError(f"invalid tolerances: {exc}") from exc
    return ProblemFile(A, T, ops, dict(tol))


def load_problem(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ProblemError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{path}: invalid JSON ({exc})") from exc
    return parse_problem(doc)


def encode_value(x):
    if x is INFINITE:
        return {"value": None, "infinite": True}
    if x is None:
        return None
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError("non-finite float outside the infinite marker")
    return float(x)


def decode_value(x):
    if isinstance(x, dict) and x.get("infinite"):
        return INFINITE
    return x


_SCALARS = ("a_norm", "a_numerical_radius", "a_spectral_radius", "omega_max", "kittaneh_bound")


def analysis_to_dict(report):
    out = {
        "schema_version": SCHEMA_VERSION,
        "kind": "analysis",
        "dim": report.dim,
        "rank": report.rank,
        "member": report.member,
        "membership_residual": float(report.membership_residual),
    }
    for name in _SCALARS:
        out[name] = encode_value(getattr(report, name))
    out["sharp"] = None if report.sharp is None else encode_matrix(report.sharp)
    if report.gelfand is not None:
        g = report.gelfand
        out["gelfand"] = {
            "estimates": [[n, float(v)] for n, v in g.estimates],
            "converged": g.converged,
            "final": float(g.final),
        }
    out["notes"] = list(report.notes)
    return out


def analysis_from_dict(doc):
    if doc.get("schema_version") != SCHEMA_VERSION or doc.get("kind") != "analysis":
        raise ProblemError("not an analysis report of a supported schema version")
    report = AnalysisReport(
        dim=doc["dim"], rank=doc["rank"], member=doc["member"], membership_residual=doc["membership_residual"]
    )
    for name in _SCALARS:
        setattr(report, name, decode_value(doc[name]))
    if doc.get("sharp") is not None:
        report.sharp = decode_matrix(doc["sharp"], "sharp")
    if "gelfand" in doc:
        g = doc["gelfand"]
        report.gelfand = GelfandTrace([tuple(e) for e in g["estimates"]], g["converged"], g["final"])
    report.notes = list(doc.get("notes", []))
    return report
