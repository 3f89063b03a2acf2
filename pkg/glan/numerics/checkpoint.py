"""Flat binary checkpoint format.

Layout (all integers little-endian):

    magic      8 bytes   b"GLANCKPT"
    version    u16       1
    precision  u8        32 or 64
    meta_len   u32       length of the metadata block
    metadata   bytes     UTF-8 JSON object
    count      u32       number of tensor records
    records    count x:
        name_len u16, name (UTF-8),
        ndim u8, ndim x u32 extents,
        raw IEEE-754 values in row-major order (4 or 8 bytes each)

Values are written and read back without conversion, so a round trip is
bit-exact.
"""
import json
import struct
from pathlib import Path
from typing import Any, BinaryIO, Mapping

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict

from glan.exceptions import CheckpointError

MAGIC = b"GLANCKPT"
VERSION = 1

_NUMPY_DTYPES = {32: np.dtype("<f4"), 64: np.dtype("<f8")}


class Checkpoint(BaseModel):
    """Decoded checkpoint contents."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    precision: int
    metadata: dict[str, Any]
    tensors: dict[str, torch.Tensor]


def save_checkpoint(
    path: Path,
    tensors: Mapping[str, torch.Tensor],
    precision: int,
    metadata: Mapping[str, Any] | None = None,
) -> None:
    """
    Write named tensors and a metadata dictionary to `path`.

    Args:
        path: Destination file
        tensors: Floating-point tensors by name
        precision: 32 or 64; tensors are stored at this width
        metadata: JSON-serializable dictionary

    Raises:
        CheckpointError: On unsupported precision or non-floating tensors
    """
    if precision not in _NUMPY_DTYPES:
        raise CheckpointError(f"Unsupported precision {precision}")
    dtype = _NUMPY_DTYPES[precision]
    meta_bytes = json.dumps(dict(metadata or {}), sort_keys=True).encode("utf-8")

    with open(path, "wb") as handle:
        handle.write(MAGIC)
        handle.write(struct.pack("<HBI", VERSION, precision, len(meta_bytes)))
        handle.write(meta_bytes)
        handle.write(struct.pack("<I", len(tensors)))
        for name, tensor in tensors.items():
            if not tensor.is_floating_point():
                raise CheckpointError(f"Tensor {name} is not floating point")
            name_bytes = name.encode("utf-8")
            shape = tuple(tensor.shape)
            handle.write(struct.pack("<H", len(name_bytes)))
            handle.write(name_bytes)
            handle.write(struct.pack(f"<B{len(shape)}I", len(shape), *shape))
            values = tensor.detach().cpu().contiguous().numpy().astype(dtype, copy=False)
            handle.write(values.tobytes(order="C"))


def _read(handle: BinaryIO, size: int) -> bytes:
    data = handle.read(size)
    if len(data) != size:
        raise CheckpointError("Truncated checkpoint")
    return data


def load_checkpoint(path: Path) -> Checkpoint:
    """
    Read a checkpoint written by save_checkpoint.

    Raises:
        CheckpointError: If the file is missing, truncated or of another format
    """
    try:
        handle = open(path, "rb")
    except OSError as e:
        raise CheckpointError(f"Cannot open checkpoint {path}: {e}")

    with handle:
        if _read(handle, len(MAGIC)) != MAGIC:
            raise CheckpointError(f"{path} is not a checkpoint file")
        version, precision, meta_len = struct.unpack("<HBI", _read(handle, 7))
        if version != VERSION:
            raise CheckpointError(f"Unsupported checkpoint version {version}")
        if precision not in _NUMPY_DTYPES:
            raise CheckpointError(f"Unsupported precision {precision}")
        dtype = _NUMPY_DTYPES[precision]
        metadata = json.loads(_read(handle, meta_len).decode("utf-8"))

        (count,) = struct.unpack("<I", _read(handle, 4))
        tensors: dict[str, torch.Tensor] = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<H", _read(handle, 2))
            name = _read(handle, name_len).decode("utf-8")
            (ndim,) = struct.unpack("<B", _read(handle, 1))
            shape = struct.unpack(f"<{ndim}I", _read(handle, 4 * ndim))
            numel = int(np.prod(shape, dtype=np.int64))
            raw = _read(handle, numel * dtype.itemsize)
            array = np.frombuffer(raw, dtype=dtype).reshape(shape).copy()
            tensors[name] = torch.from_numpy(array)

    return Checkpoint(precision=precision, metadata=metadata, tensors=tensors)
