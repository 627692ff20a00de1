"""Grid files, grayscale export and run manifests.

Grid file layout (``SRG1``)::

    SRG1
    kind sino
    n 1
    axis x 1025 -64.0 0.0625
    axis r 1025 0.0 0.0625
    meta {"source": "forward"}
    <blank line>
    <payload: float64 little-endian, row-major, complex as (re, im) pairs>

Axis records hold ``count min spacing`` with the floats written by
``repr`` so they read back bitwise. The ``meta`` line is optional JSON.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .core import AxisSpec, DataSpectrum, FieldGrid, FieldSpectrum, Sinogram

__all__ = [
    "AxisPayloadMismatchError",
    "BadMagicError",
    "GridFileError",
    "HeaderError",
    "KindMismatchError",
    "RunManifest",
    "TruncatedPayloadError",
    "atomic_write",
    "export_image",
    "file_digest",
    "grid_kind",
    "read_grid",
    "read_header",
    "read_pgm",
    "write_grid",
]

MAGIC = b"SRG1"

# kind -> (class, axis names, complex payload)
_KINDS = {
    "field": (FieldGrid, ("x", "y"), False),
    "sino": (Sinogram, ("x", "r"), False),
    "dspec": (DataSpectrum, ("xi", "s"), True),
    "fspec": (FieldSpectrum, ("xi", "eta"), True),
}


class GridFileError(Exception):
    """Base class; ``code`` names the failure for callers and manifests."""

    code = "grid-file"


class BadMagicError(GridFileError):
    code = "bad-magic"


class HeaderError(GridFileError):
    code = "bad-header"


class TruncatedPayloadError(GridFileError):
    code = "truncated-payload"


class AxisPayloadMismatchError(GridFileError):
    code = "axis-payload-mismatch"


class KindMismatchError(GridFileError):
    code = "kind-mismatch"


def grid_kind(grid) -> str:
    for kind, (cls, _, _) in _KINDS.items():
        if type(grid) is cls:
            return kind
    raise TypeError(f"not a grid type: {type(grid).__name__}")


_AXIS_ATTRS = {
    "field": ("x_axis", "y_axis"),
    "sino": ("x_axis", "r_axis"),
    "dspec": ("xi_axis", "eta_radial_axis"),
    "fspec": ("xi_axis", "eta_axis"),
}


def atomic_write(path, data: bytes):
    """Write ``data`` to a temporary file beside ``path`` and rename it into place."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=d)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _plain(obj):
    """Convert numpy scalars and tuples so ``json`` can write them."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def write_grid(path, grid, n: int = 1, meta: dict | None = None):
    """Write ``grid`` atomically. ``meta`` defaults to the grid's own metadata."""
    kind = grid_kind(grid)
    _, names, cplx = _KINDS[kind]
    lines = ["SRG1", f"kind {kind}", f"n {int(n)}"]
    for name, attr in zip(names, _AXIS_ATTRS[kind]):
        ax = getattr(grid, attr)
        lines.append(f"axis {name} {ax.count} {ax.min!r} {ax.spacing!r}")
    if meta is None:
        meta = getattr(grid, "meta", None)
    if meta:
        lines.append("meta " + json.dumps(_plain(meta), sort_keys=True))
    header = ("\n".join(lines) + "\n\n").encode("ascii")
    dtype = "<c16" if cplx else "<f8"
    payload = np.ascontiguousarray(grid.values, dtype=dtype).tobytes(order="C")
    atomic_write(path, header + payload)


def _parse_header(blob: bytes):
    if not blob.startswith(MAGIC + b"\n"):
        raise BadMagicError("not an SRG1 grid file")
    end = blob.find(b"\n\n")
    if end < 0:
        raise TruncatedPayloadError("header is not terminated by a blank line")
    try:
        lines = blob[:end].decode("ascii").split("\n")[1:]
    except UnicodeDecodeError as exc:
        raise HeaderError("header is not ASCII text") from exc
    kind, n, axes, meta = None, None, [], {}
    for line in lines:
        key, _, rest = line.partition(" ")
        try:
            if key == "kind":
                kind = rest.strip()
            elif key == "n":
                n = int(rest)
            elif key == "axis":
                name, count, lo, step = rest.split()
                axes.append((name, AxisSpec(int(count), float(lo), float(step))))
            elif key == "meta":
                meta = json.loads(rest)
            else:
                raise HeaderError(f"unknown header record {key!r}")
        except (ValueError, json.JSONDecodeError) as exc:
            if isinstance(exc, GridFileError):
                raise
            raise HeaderError(f"malformed header record {line!r}") from exc
    if kind not in _KINDS:
        raise HeaderError(f"unknown grid kind {kind!r}")
    if n is None or n < 1:
        raise HeaderError("missing or invalid dimension record")
    names = _KINDS[kind][1]
    if tuple(a[0] for a in axes) != names:
        raise HeaderError(f"{kind} grid needs axes {names}, found {[a[0] for a in axes]}")
    return kind, n, [a[1] for a in axes], meta, end + 2


def read_header(path) -> dict:
    """Header fields of a grid file: kind, n, axes and meta."""
    with open(path, "rb") as fh:
        head = fh.read(1 << 16)
    kind, n, axes, meta, _ = _parse_header(head)
    return {"kind": kind, "n": n, "axes": tuple(axes), "meta": meta}


def read_grid(path, expect: str | tuple[str, ...] | None = None):
    """Read a grid file; ``expect`` restricts the accepted kinds."""
    with open(path, "rb") as fh:
        blob = fh.read()
    kind, _, (a0, a1), meta, start = _parse_header(blob)
    if expect is not None:
        allowed = (expect,) if isinstance(expect, str) else tuple(expect)
        if kind not in allowed:
            raise KindMismatchError(f"expected a {'/'.join(allowed)} grid, file holds {kind}")
    cls, _, cplx = _KINDS[kind]
    width = 16 if cplx else 8
    need = a0.count * a1.count * width
    have = len(blob) - start
    if have < need:
        raise TruncatedPayloadError(f"payload has {have} bytes, axes need {need}")
    if have > need:
        raise AxisPayloadMismatchError(f"payload has {have} bytes, axes need {need}")
    vals = np.frombuffer(blob, dtype="<c16" if cplx else "<f8", offset=start)
    vals = vals.reshape(a0.count, a1.count).astype(np.complex128 if cplx else np.float64)
    if kind in ("dspec", "fspec"):
        return cls(a0, a1, vals, meta=meta)
    return cls(a0, a1, vals)


# ---------------------------------------------------------------------------
# grayscale export

def export_image(u: FieldGrid, path):
    """16-bit binary PGM of a field: columns are x, rows run from the largest y down.

    Values are mapped linearly from [min, max] to [0, 65535]; the bounds go
    into a comment. A constant field is written mid-gray and flagged.
    """
    v = np.asarray(u.values, dtype=np.float64)
    lo, hi = float(np.min(v)), float(np.max(v))
    img = v.T[::-1]
    comments = [f"# min {lo!r} max {hi!r}"]
    if hi > lo:
        q = np.rint((img - lo) / (hi - lo) * 65535.0)
    else:
        q = np.full(img.shape, 32768.0)
        comments.append("# constant field")
    h, w = img.shape
    header = "P5\n" + "\n".join(comments) + f"\n{w} {h}\n65535\n"
    atomic_write(path, header.encode("ascii") + q.astype(">u2").tobytes())


def read_pgm(path):
    """Read a PGM written by :func:`export_image`; returns (image, comment lines)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    pos, tokens, comments = 0, [], []
    while len(tokens) < 4:
        nl = blob.index(b"\n", pos)
        line = blob[pos:nl].decode("ascii")
        pos = nl + 1
        if line.startswith("#"):
            comments.append(line[1:].strip())
        else:
            tokens.extend(line.split())
    if tokens[0] != "P5":
        raise BadMagicError("not a binary PGM")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    dtype = ">u2" if maxval > 255 else "u1"
    img = np.frombuffer(blob, dtype=dtype, offset=pos, count=w * h).reshape(h, w)
    return img.astype(np.int64), comments


# ---------------------------------------------------------------------------
# manifests

def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _json_float(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


@dataclass
class RunManifest:
    """Record of one CLI run, written as sorted, indented JSON.

    ``parameters`` maps a name to ``{"value": ..., "source": "default" | "user"}``.
    Nothing time-dependent is recorded unless the caller adds it, so two
    runs with the same inputs give identical documents.
    """

    command: str
    parameters: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    status: str = "ok"

    def set_param(self, name: str, value, user_set: bool):
        self.parameters[name] = {"value": value, "source": "user" if user_set else "default"}

    def add_input(self, role: str, path):
        self.inputs[role] = {"path": os.fspath(path), "sha256": file_digest(path)}

    def add_output(self, role: str, path):
        self.outputs[role] = {"path": os.fspath(path), "sha256": file_digest(path)}

    def to_text(self) -> str:
        doc = {"command": self.command, "status": self.status, "parameters": self.parameters,
               "inputs": self.inputs, "outputs": self.outputs, "metrics": self.metrics}
        doc = _plain(doc)

        def fix(o):
            if isinstance(o, dict):
                return {k: fix(v) for k, v in o.items()}
            if isinstance(o, list):
                return [fix(v) for v in o]
            return _json_float(o)

        return json.dumps(fix(doc), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunManifest":
        d = json.loads(text)
        return cls(d["command"], d["parameters"], d["inputs"], d["outputs"], d["metrics"],
                   d.get("status", "ok"))
