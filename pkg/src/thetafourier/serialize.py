"""CSV, binary and JSON serialization for fields, coefficient tables and reports."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .core import CoeffTable, GridSpec, SampledField, ThetaError, ThetaSpec

MAGIC = 0x54485446  # "THTF"
VERSION = 1
# magic, version, n, N, T, branch_1, branch_2, reserved
HEADER = struct.Struct("<IIIIdiiI")


def atomic_write(path: str | os.PathLike, data: bytes | str) -> None:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = data.encode("utf-8") if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(raw)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- JSON ---------------------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0:
        return "0.0"
    s = f"{x:.17g}"
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def to_jsonable(obj):
    """Numpy scalars/arrays to lists, complex to ``[re, im]``, dataclass-like objects via ``to_json``."""
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, two-space indent, floats with 17 significant digits."""

    def enc(v, ind: int) -> str:
        pad = "  " * (ind + 1)
        end = "  " * ind
        if isinstance(v, dict):
            if not v:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {enc(v[k], ind + 1)}" for k in sorted(v)]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(v, list):
            if not v:
                return "[]"
            if all(not isinstance(e, (dict, list)) for e in v):
                return "[" + ", ".join(enc(e, ind + 1) for e in v) + "]"
            return "[\n" + ",\n".join(pad + enc(e, ind + 1) for e in v) + "\n" + end + "]"
        if isinstance(v, bool) or v is None:
            return json.dumps(v)
        if isinstance(v, float):
            return _fmt_float(v)
        if isinstance(v, int):
            return str(v)
        return json.dumps(v, ensure_ascii=False)

    return enc(to_jsonable(obj), 0) + "\n"


def write_json(path, obj) -> None:
    atomic_write(path, dumps(obj))


# -- CSV ----------------------------------------------------------------------------


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def coeffs_to_csv(table: CoeffTable) -> str:
    header = [f"xi_{j + 1}" for j in range(table.n)] + ["re", "im"]
    rows = ([*xi, repr(float(v.real)), repr(float(v.imag))] for xi, v in table.items())
    return _csv_text(header, rows)


def coeffs_from_csv(text: str, spec: ThetaSpec) -> CoeffTable:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ThetaError("empty coefficient CSV")
    n = spec.n
    expected = [f"xi_{j + 1}" for j in range(n)] + ["re", "im"]
    if [h.strip() for h in rows[0]] != expected:
        raise ThetaError(f"coefficient CSV header must be {expected}, got {rows[0]}")
    entries = {}
    for r in rows[1:]:
        if not r:
            continue
        if len(r) != n + 2:
            raise ThetaError(f"malformed coefficient row {r}")
        xi = tuple(int(v) for v in r[:n])
        entries[xi] = complex(float(r[n]), float(r[n + 1]))
    cutoff = max((max(abs(k) for k in xi) for xi in entries), default=0)
    return CoeffTable.from_entries(entries, spec, cutoff)


def field_to_csv(f: SampledField) -> str:
    header = [f"i_{j + 1}" for j in range(f.n)] + ["re", "im"]
    rows = ([*idx, repr(float(v.real)), repr(float(v.imag))] for idx, v in np.ndenumerate(f.values))
    return _csv_text(header, rows)


def field_from_csv(text: str, spec: ThetaSpec) -> SampledField:
    rows = list(csv.reader(io.StringIO(text)))
    n = spec.n
    expected = [f"i_{j + 1}" for j in range(n)] + ["re", "im"]
    if not rows or [h.strip() for h in rows[0]] != expected:
        raise ThetaError(f"field CSV header must be {expected}")
    data = [r for r in rows[1:] if r]
    N = round(len(data) ** (1.0 / n))
    if N ** n != len(data):
        raise ThetaError(f"field CSV has {len(data)} rows, not a full N^{n} grid")
    vals = np.full((N,) * n, np.nan, dtype=complex)
    for r in data:
        idx = tuple(int(v) for v in r[:n])
        vals[idx] = complex(float(r[n]), float(r[n + 1]))
    if np.isnan(vals).any():
        raise ThetaError("field CSV misses grid nodes")
    return SampledField(GridSpec(n, N), vals, spec)


# -- binary -------------------------------------------------------------------------


def field_to_bytes(f: SampledField) -> bytes:
    spec = f.theta_spec
    br = list(spec.log_branch) + [0] * (2 - f.n)
    head = HEADER.pack(MAGIC, VERSION, f.n, f.N, spec.T, br[0], br[1], 0)
    theta = np.asarray(spec.theta, dtype="<c16").tobytes()
    return head + theta + np.ascontiguousarray(f.values, dtype="<c16").tobytes()


def field_from_bytes(raw: bytes) -> SampledField:
    if len(raw) < HEADER.size:
        raise ThetaError("binary field truncated before header end")
    magic, version, n, N, T, b1, b2, _ = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ThetaError("not a theta field file (bad magic)")
    if version != VERSION:
        raise ThetaError(f"unsupported binary version {version}")
    if n not in (1, 2):
        raise ThetaError(f"bad dimension {n} in header")
    off = HEADER.size
    need = off + 16 * n + 16 * N ** n
    if len(raw) != need:
        raise ThetaError(f"binary field has {len(raw)} bytes, expected {need}")
    theta = np.frombuffer(raw, dtype="<c16", count=n, offset=off)
    vals = np.frombuffer(raw, dtype="<c16", count=N ** n, offset=off + 16 * n).reshape((N,) * n)
    spec = ThetaSpec(tuple(complex(t) for t in theta), T, (b1, b2)[:n])
    return SampledField(GridSpec(n, N), vals.copy(), spec)
