"""JSON records for vessels, feedbacks and reports.

Complex numbers are always ``[re, im]`` pairs; matrices are nested lists of
such pairs. Readers collect every schema problem before failing so that a
malformed document is reported item by item.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .vessel import MATRIX_FIELDS, CurvePoint, Vessel

SCHEMA_VERSION = 1


def cpair(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def cvalue(pair, where: str = "value") -> complex:
    if (not isinstance(pair, (list, tuple)) or len(pair) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)):
        raise ConfigError(f"{where}: complex numbers are [re, im] pairs", {"errors": [where]})
    return complex(pair[0], pair[1])


def matrix_to_json(M) -> list:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    return [[cpair(z) for z in row] for row in M]


def vector_to_json(v) -> list:
    return [cpair(z) for z in np.ravel(v)]


def matrix_from_json(data, where: str, errors: list[str]) -> np.ndarray | None:
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        errors.append(f"{where}: expected a nested list of [re, im] pairs")
        return None
    widths = {len(r) for r in data}
    if len(widths) != 1:
        errors.append(f"{where}: ragged rows")
        return None
    try:
        return np.array([[cvalue(z, where) for z in row] for row in data], dtype=complex)
    except ConfigError:
        errors.append(f"{where}: entries must be [re, im] pairs")
        return None


def vector_from_json(data, where: str, errors: list[str]) -> np.ndarray | None:
    if not isinstance(data, list):
        errors.append(f"{where}: expected a list of [re, im] pairs")
        return None
    try:
        return np.array([cvalue(z, where) for z in data], dtype=complex)
    except ConfigError:
        errors.append(f"{where}: entries must be [re, im] pairs")
        return None


def check_fields(doc: dict, allowed: set[str], required: set[str], where: str, errors: list[str]):
    if not isinstance(doc, dict):
        errors.append(f"{where}: expected an object")
        return False
    for key in sorted(set(doc) - allowed):
        errors.append(f"{where}.{key}: unknown field")
    for key in sorted(required - set(doc)):
        errors.append(f"{where}.{key}: missing field")
    return True


_VESSEL_FIELDS = set(MATRIX_FIELDS) | {"n", "m", "m_star", "declared_r", "declared_s"}


def vessel_to_record(V: Vessel) -> dict:
    rec = {name: matrix_to_json(M) for name, M in V.matrices().items()}
    rec.update(n=V.n, m=V.m, m_star=V.m_star, declared_r=V.declared_r, declared_s=V.declared_s)
    return rec


def vessel_from_record(rec: dict, where: str = "vessel") -> Vessel:
    """Parse and shape-check a vessel record.

    Raises
    ------
    ConfigError
        With ``payload["errors"]`` listing every problem found.
    """
    errors: list[str] = []
    if not check_fields(rec, _VESSEL_FIELDS, _VESSEL_FIELDS - {"declared_r", "declared_s"}, where, errors):
        raise ConfigError(f"{where}: malformed", {"errors": errors})
    mats = {}
    for name in MATRIX_FIELDS:
        if name in rec:
            mats[name] = matrix_from_json(rec[name], f"{where}.{name}", errors)
    dims = {}
    for key in ("n", "m", "m_star"):
        val = rec.get(key)
        if key in rec and (not isinstance(val, int) or isinstance(val, bool) or val < 1):
            errors.append(f"{where}.{key}: expected a positive integer")
        dims[key] = val
    n, m, ms = dims["n"], dims["m"], dims["m_star"]
    expected = {
        "A1": (n, n), "A2": (n, n), "B_tilde": (n, m), "C": (ms, n), "D": (ms, m),
        "D_tilde": (ms, m), "sigma1": (m, m), "sigma2": (m, m), "gamma": (m, m),
        "sigma1_star": (ms, ms), "sigma2_star": (ms, ms), "gamma_star": (ms, ms),
    }
    for name, shape in expected.items():
        M = mats.get(name)
        if M is not None and all(isinstance(s, int) for s in shape) and M.shape != shape:
            errors.append(f"{where}.{name}: shape {M.shape} != declared {shape}")
    if errors:
        raise ConfigError(f"{where}: {len(errors)} schema error(s)", {"errors": errors})
    return Vessel(**mats, declared_r=int(rec.get("declared_r", 1)),
                  declared_s=int(rec.get("declared_s", 1)))


def curve_point_to_json(p: CurvePoint) -> dict:
    return {"kind": p.kind, "lambda1": cpair(p.lambda1), "lambda2": cpair(p.lambda2)}


def jsonable(obj):
    """Convert numpy scalars/arrays and complex values to JSON-native data."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return matrix_to_json(obj) if obj.ndim == 2 else vector_to_json(obj)
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return cpair(obj)
    if isinstance(obj, CurvePoint):
        return curve_point_to_json(obj)
    return obj
