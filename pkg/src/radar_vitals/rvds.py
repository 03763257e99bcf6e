"""RVDS binary tensor files.

Layout (all little-endian):

    magic   4 bytes  b"RVDS"
    version u8       1
    dtype   u8       0 = float32, 1 = float64, 2 = complex64 (interleaved re, im float32)
    ndim    u8
    reserved u8      0
    dims    ndim x u64
    payload row-major values

Payload length must equal element_size * prod(dims). Round trips are
bit-exact for the supported dtypes.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"RVDS"
VERSION = 1

_DTYPE_CODES = {
    np.dtype(np.float32): 0,
    np.dtype(np.float64): 1,
    np.dtype(np.complex64): 2,
}
_CODE_DTYPES = {v: k for k, v in _DTYPE_CODES.items()}


class RvdsError(ValueError):
    """Malformed RVDS file or unsupported tensor dtype."""


def write_tensor(path: str | Path, values: np.ndarray) -> None:
    """Write an array to an RVDS file.

    float32/float64/complex64 pass through; other float/complex inputs are
    cast to float64/complex64 first. Integers are rejected.
    """
    arr = np.asarray(values)
    if arr.dtype not in _DTYPE_CODES:
        if np.issubdtype(arr.dtype, np.complexfloating):
            arr = arr.astype(np.complex64)
        elif np.issubdtype(arr.dtype, np.floating):
            arr = arr.astype(np.float64)
        else:
            raise RvdsError(f"unsupported dtype for RVDS: {arr.dtype}")
    code = _DTYPE_CODES[arr.dtype]
    header = MAGIC + struct.pack("<BBBB", VERSION, code, arr.ndim, 0)
    header += struct.pack(f"<{arr.ndim}Q", *arr.shape)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(arr).astype(arr.dtype.newbyteorder("<")).tobytes())


def read_tensor(path: str | Path) -> np.ndarray:
    """Read an RVDS file back into a numpy array."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 8 or raw[:4] != MAGIC:
        raise RvdsError(f"{path}: not an RVDS file")
    version, code, ndim, reserved = struct.unpack("<BBBB", raw[4:8])
    if version != VERSION:
        raise RvdsError(f"{path}: unsupported RVDS version {version}")
    if reserved != 0:
        raise RvdsError(f"{path}: nonzero reserved byte")
    if code not in _CODE_DTYPES:
        raise RvdsError(f"{path}: unknown dtype code {code}")
    head_end = 8 + 8 * ndim
    if len(raw) < head_end:
        raise RvdsError(f"{path}: truncated header")
    dims = struct.unpack(f"<{ndim}Q", raw[8:head_end]) if ndim else ()
    dtype = _CODE_DTYPES[code].newbyteorder("<")
    count = int(np.prod(dims, dtype=np.int64)) if ndim else 1
    expected = count * dtype.itemsize
    payload = raw[head_end:]
    if len(payload) != expected:
        raise RvdsError(
            f"{path}: payload is {len(payload)} bytes, expected {expected} for dims {dims}"
        )
    arr = np.frombuffer(payload, dtype=dtype).reshape(dims)
    return arr.astype(_CODE_DTYPES[code])
