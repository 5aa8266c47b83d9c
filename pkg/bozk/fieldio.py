"""
FieldFile codec
    [8-byte little-endian header length][UTF-8 JSON header][nx*ny little-endian float64]
The payload is row-major with x varying slowest, matching Field.values.
"""

import json
import logging
import struct
from pathlib import Path
from typing import Optional, Tuple, Dict, Any

import numpy as np

from .base import Params, FieldFileError
from .spectral import Grid2D, Field

logger = logging.getLogger(__name__)

MAGIC = "BOZK1"
DTYPE = "f64le"
ORDER = "row-major"
PREFIX = struct.Struct("<Q")
MAX_HEADER_BYTES = 1 << 20


def _header(field: Field, params: Optional[Params]) -> Dict[str, Any]:
    grid = field.grid
    return {
        "magic": MAGIC,
        "nx": grid.nx,
        "ny": grid.ny,
        "lx": grid.lx,
        "ly": grid.ly,
        "params": params.to_dict() if params is not None else None,
        "dtype": DTYPE,
        "order": ORDER
    }


def write_field(path, field: Field, params: Optional[Params] = None) -> Path:
    path = Path(path)
    header = json.dumps(_header(field, params), sort_keys=True).encode("utf-8")
    payload = np.ascontiguousarray(field.values, dtype="<f8").tobytes(order="C")
    with path.open("wb") as handle:
        handle.write(PREFIX.pack(len(header)))
        handle.write(header)
        handle.write(payload)
    logger.debug(f"wrote {path} ({len(payload)} payload bytes)")
    return path


def read_header(path) -> Tuple[Dict[str, Any], int]:
    """Parse and check the header; returns it with the payload offset."""

    path = Path(path)
    size = path.stat().st_size
    with path.open("rb") as handle:
        prefix = handle.read(PREFIX.size)
        if len(prefix) < PREFIX.size:
            raise FieldFileError(f"{path}: file too short for the header length prefix")
        (length,) = PREFIX.unpack(prefix)
        if length > MAX_HEADER_BYTES or PREFIX.size + length > size:
            raise FieldFileError(f"{path}: header length {length} does not fit in a file of {size} bytes")
        raw = handle.read(length)
    try:
        header = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FieldFileError(f"{path}: header is not valid JSON: {e}")
    if not isinstance(header, dict) or header.get("magic") != MAGIC:
        found = header.get("magic") if isinstance(header, dict) else None
        raise FieldFileError(f"{path}: bad magic {found!r}, expected {MAGIC!r}")
    if header.get("dtype") != DTYPE:
        raise FieldFileError(f"{path}: unsupported payload dtype {header.get('dtype')!r}")
    if header.get("order") != ORDER:
        raise FieldFileError(f"{path}: unsupported payload order {header.get('order')!r}")
    for key in ("nx", "ny"):
        if not isinstance(header.get(key), int) or header[key] <= 0:
            raise FieldFileError(f"{path}: header field {key} must be a positive integer")
    offset = PREFIX.size + length
    expected = 8 * header["nx"] * header["ny"]
    actual = size - offset
    if actual != expected:
        raise FieldFileError(
            f"{path}: payload size mismatch, expected {expected} bytes for "
            f"{header['nx']}x{header['ny']}, found {actual}"
        )
    return header, offset


def read_field(path) -> Tuple[Field, Optional[Params]]:
    header, offset = read_header(path)
    with Path(path).open("rb") as handle:
        handle.seek(offset)
        payload = handle.read()
    values = np.frombuffer(payload, dtype="<f8").reshape(header["nx"], header["ny"]).astype(float)
    try:
        grid = Grid2D(header["nx"], header["ny"], header["lx"], header["ly"])
        params = Params(**header["params"]) if header.get("params") else None
    except (KeyError, TypeError, ValueError) as e:
        raise FieldFileError(f"{path}: inconsistent header: {e}")
    return Field(grid, values), params
