"""Text documents for frame families, dilations and command reports.

Frame files are JSON with every complex number written as an ``[re, im]``
pair and every float printed with 17 significant digits, so a
write/read/write cycle is byte-identical and fixtures diff cleanly.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import ShapeError
from .frames import FrameFamily
from .krein import KreinSpace
from .report import jsonable

__all__ = [
    "SCHEMA_VERSION",
    "DocumentError",
    "dumps_dilation",
    "dumps_frame",
    "dumps_report",
    "file_digest",
    "format_number",
    "loads_frame",
    "read_frame",
    "write_frame",
]

SCHEMA_VERSION = "1"


class DocumentError(ShapeError):
    """Malformed document. ``line`` and ``field`` locate the problem when known."""

    def __init__(self, msg, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{', '.join(where)}: {msg}" if where else msg)
        self.line = line
        self.field = field


def format_number(x):
    x = float(x)
    if not np.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    if x == 0.0:
        return "-0.0" if np.signbit(x) else "0"
    return format(x, ".17g")


def _pair(z):
    return f"[{format_number(z.real)}, {format_number(z.imag)}]"


def _vector_lines(rows, indent):
    pad = " " * indent
    body = ",\n".join(pad + "[" + ", ".join(_pair(z) for z in row) + "]" for row in rows)
    return "[\n" + body + "\n" + " " * (indent - 2) + "]" if rows else "[]"


def dumps_frame(F):
    """Serialize a family. Vectors are listed one per line."""
    parts = [
        f'  "schema_version": "{SCHEMA_VERSION}"',
        f'  "signature": [{", ".join(str(s) for s in F.space.signature)}]',
    ]
    if F.labels is not None:
        parts.append(f'  "labels": {json.dumps(list(F.labels))}')
    parts.append(f'  "vectors": {_vector_lines(list(F.vectors.T), 4)}')
    return "{\n" + ",\n".join(parts) + "\n}\n"


def dumps_dilation(D):
    """Serialize a dilation; matrices are listed row by row."""
    parts = [
        f'  "schema_version": "{SCHEMA_VERSION}"',
        '  "kind": "dilation"',
        f'  "big_signature": [{", ".join(str(s) for s in D.big_space.signature)}]',
        f'  "basis": {_vector_lines(list(D.basis), 4)}',
        f'  "embed": {_vector_lines(list(D.embed), 4)}',
        f'  "projection": {_vector_lines(list(D.projection), 4)}',
    ]
    return "{\n" + ",\n".join(parts) + "\n}\n"


def _line_of(text, needle):
    pos = text.find(needle)
    return None if pos < 0 else text.count("\n", 0, pos) + 1


def _real(value, field):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError(f"expected a number, got {value!r}", field=field)
    return float(value)


def loads_frame(text, neutral_tol=None):
    """Parse a frame document into a :class:`FrameFamily`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, line=exc.lineno, field=None) from None
    if not isinstance(doc, dict):
        raise DocumentError("top level must be an object", line=1)

    def fail(msg, field):
        raise DocumentError(msg, line=_line_of(text, f'"{field.split("[")[0]}"'), field=field)

    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        fail(f"unsupported schema version {version!r}", "schema_version")
    sig = doc.get("signature")
    if not isinstance(sig, list) or not sig or any(s not in (1, -1) or isinstance(s, bool) for s in sig):
        fail("expected a nonempty list of +1/-1 entries", "signature")
    vecs = doc.get("vectors")
    if not isinstance(vecs, list):
        fail("expected a list of vectors", "vectors")
    dim = len(sig)
    T = np.zeros((dim, len(vecs)), dtype=np.complex128)
    for i, v in enumerate(vecs):
        if not isinstance(v, list) or len(v) != dim:
            fail(f"vector must have {dim} entries", f"vectors[{i}]")
        for k, pair in enumerate(v):
            fld = f"vectors[{i}][{k}]"
            if not isinstance(pair, list) or len(pair) != 2:
                fail("expected an [re, im] pair", fld)
            try:
                T[k, i] = complex(_real(pair[0], fld), _real(pair[1], fld))
            except DocumentError as exc:
                fail(str(exc).split(": ", 1)[-1], fld)
    labels = doc.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != len(vecs)
                               or not all(isinstance(x, str) for x in labels)):
        fail("expected one string label per vector", "labels")
    unknown = set(doc) - {"schema_version", "signature", "vectors", "labels"}
    if unknown:
        fail(f"unknown keys {sorted(unknown)}", sorted(unknown)[0])
    kwargs = {} if neutral_tol is None else {"neutral_tol": neutral_tol}
    return FrameFamily(KreinSpace(tuple(sig)), T, labels, **kwargs)


def read_frame(path, neutral_tol=None):
    return loads_frame(Path(path).read_text(encoding="utf-8"), neutral_tol)


def write_frame(F, path):
    Path(path).write_text(dumps_frame(F), encoding="utf-8")


def file_digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _finite(value):
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_finite(v) for v in value]
    return value


def dumps_report(report):
    """JSON text of a report; infinities and NaNs become strings."""
    return json.dumps(_finite(jsonable(report)), indent=2, allow_nan=False) + "\n"
