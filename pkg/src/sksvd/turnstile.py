"""Mergeable turnstile sketch of an implicit data matrix.

The sketch ``Y`` is a dense ``m x n`` accumulator: an update ``(row, col,
delta)`` to the implicit matrix adds ``delta * phi_column(config, row)``
to column ``col``.  Linearity makes states produced under the same config
mergeable by addition, so streams may be split across processes or
sensors and combined later.

Concurrency: updates touching distinct columns may run concurrently
(disjoint writes); same-column updates must be serialized by the caller.
Snapshot/serialize assume no concurrent writers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import CorruptStateError, IncompatibleSketchError, StreamFormatError
from .jl import SketchConfig, phi_column

MAGIC = b"SKSV1\n"

MODE_MATRIX = "matrix"
MODE_GRAPH = "graph"


@dataclass(frozen=True)
class MatrixUpdate:
    row: int
    col: int
    delta: float


@dataclass
class SketchState:
    config: SketchConfig
    Y: np.ndarray
    updates_applied: int = 0


def new_sketch(config: SketchConfig) -> SketchState:
    """Empty sketch: all-zero Y, zero update counter."""
    return SketchState(config=config, Y=np.zeros((config.m, config.n)), updates_applied=0)


def _validate_update(config: SketchConfig, u: MatrixUpdate) -> None:
    # Validation precedes mutation: a rejected update leaves the state untouched.
    if isinstance(u.row, bool) or isinstance(u.col, bool):
        raise ValueError(f"update indices must be integers, got {u!r}")
    if not isinstance(u.row, (int, np.integer)) or not 0 <= u.row < config.N:
        raise IndexError(f"row {u.row!r} out of range [0, {config.N})")
    if not isinstance(u.col, (int, np.integer)) or not 0 <= u.col < config.n:
        raise IndexError(f"col {u.col!r} out of range [0, {config.n})")
    if not isinstance(u.delta, (int, float, np.floating)) or isinstance(u.delta, bool) \
            or not math.isfinite(u.delta):
        raise ValueError(f"delta must be finite, got {u.delta!r}")


def apply_update(state: SketchState, u: MatrixUpdate) -> SketchState:
    """Apply one turnstile update in place; returns the state for chaining."""
    _validate_update(state.config, u)
    state.Y[:, u.col] += u.delta * phi_column(state.config, u.row)
    state.updates_applied += 1
    return state


def merge(a: SketchState, b: SketchState) -> SketchState:
    """Combine two sketches of disjoint stream parts (same config required)."""
    if a.config != b.config:
        raise IncompatibleSketchError(
            f"cannot merge sketches with different configs: {a.config} vs {b.config}"
        )
    return SketchState(config=a.config, Y=a.Y + b.Y,
                       updates_applied=a.updates_applied + b.updates_applied)


def snapshot(state: SketchState) -> np.ndarray:
    """Immutable copy of the current sketch matrix."""
    return state.Y.copy()


def serialize(state: SketchState, mode: str = MODE_MATRIX) -> bytes:
    """Encode a state: magic, one-line JSON header, row-major little-endian f64."""
    if mode not in (MODE_MATRIX, MODE_GRAPH):
        raise ValueError(f"unknown mode {mode!r}")
    header = json.dumps({"config": state.config.to_dict(), "mode": mode,
                         "updates_applied": state.updates_applied})
    payload = np.ascontiguousarray(state.Y, dtype="<f8").tobytes()
    return MAGIC + header.encode("utf-8") + b"\n" + payload


def deserialize_with_mode(data: bytes) -> tuple[SketchState, str]:
    """Decode a serialized state, returning (state, mode)."""
    if not data.startswith(MAGIC):
        raise CorruptStateError("bad magic bytes: not a sketch-state blob")
    nl = data.find(b"\n", len(MAGIC))
    if nl < 0:
        raise CorruptStateError("missing header line")
    try:
        header = json.loads(data[len(MAGIC):nl].decode("utf-8"))
        config = SketchConfig.from_dict(header["config"])
        mode = header.get("mode", MODE_MATRIX)
        counter = header["updates_applied"]
    except (ValueError, KeyError, TypeError) as exc:
        raise CorruptStateError(f"unparseable header: {exc}") from exc
    payload = data[nl + 1:]
    expected = config.m * config.n * 8
    if len(payload) != expected:
        raise CorruptStateError(
            f"payload is {len(payload)} bytes, expected {expected} for "
            f"{config.m}x{config.n} float64"
        )
    Y = np.frombuffer(payload, dtype="<f8").reshape(config.m, config.n).copy()
    return SketchState(config=config, Y=Y, updates_applied=counter), mode


def deserialize(data: bytes) -> SketchState:
    state, _ = deserialize_with_mode(data)
    return state


def iter_updates(lines: Iterable[str]) -> Iterator[MatrixUpdate]:
    """Parse a JSON-lines update stream: {"row": int, "col": int, "delta": float}.

    Blank lines are skipped.  Raises StreamFormatError on anything else
    that is not a well-formed record; range checks happen at apply time.
    """
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise StreamFormatError(f"line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict) or set(obj) != {"row", "col", "delta"}:
            raise StreamFormatError(f'line {lineno}: expected {{"row", "col", "delta"}}, got {line!r}')
        row, col, delta = obj["row"], obj["col"], obj["delta"]
        if isinstance(row, bool) or isinstance(col, bool) or isinstance(delta, bool) \
                or not isinstance(row, int) or not isinstance(col, int) \
                or not isinstance(delta, (int, float)):
            raise StreamFormatError(f"line {lineno}: wrong field types in {line!r}")
        yield MatrixUpdate(row=row, col=col, delta=float(delta))
