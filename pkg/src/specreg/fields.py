"""Grid containers for scalar images and displacement fields, plus file I/O.

All fields live on a regular 1D/2D/3D grid and store 64-bit reals in
row-major order (last axis fastest). Containers are immutable after
construction: the wrapped arrays are marked read-only, so instances can be
shared freely across threads.

File formats:

* NDF, the package's native binary container (see ``write_ndf``). Fully
  round-trip safe, little-endian, suitable for both scalar and vector
  fields.
* Binary PGM (P5) for 2D scalar fields, for quick human inspection.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

NDF_MAGIC = b"NDF1"


class ShapeMismatchError(ValueError):
    """Two fields that must share a grid do not."""


class NdfError(ValueError):
    """Malformed NDF file."""


class NdfMagicError(NdfError):
    """File does not start with the NDF magic bytes."""


class NdfHeaderError(NdfError):
    """Header fields are inconsistent (axes, components, sizes)."""


class NdfTruncatedError(NdfError):
    """File ends before the declared payload is complete."""


class PgmError(ValueError):
    """Unsupported or malformed PGM file."""


def _as_locked(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, order="C")
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class GridShape:
    """Per-axis voxel counts of a 1D, 2D or 3D grid."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        object.__setattr__(self, "dims", dims)
        if not 1 <= len(dims) <= 3:
            raise ValueError(f"grid must have 1 to 3 axes, got {len(dims)}")
        if any(n < 2 for n in dims):
            raise ValueError(f"every axis needs at least 2 samples, got {dims}")

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        n = 1
        for d in self.dims:
            n *= d
        return n


@dataclass(frozen=True)
class ScalarField:
    """An N-dimensional grid of intensities."""

    shape: GridShape
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _as_locked(self.data))
        if self.data.shape != self.shape.dims:
            raise ShapeMismatchError(
                f"data shape {self.data.shape} != grid {self.shape.dims}")

    @classmethod
    def from_array(cls, arr) -> "ScalarField":
        arr = np.asarray(arr, dtype=np.float64)
        return cls(GridShape(arr.shape), arr)


@dataclass(frozen=True)
class VectorField:
    """A d-component displacement field; component ``a`` moves along axis ``a``.

    Displacements are measured in voxels.
    """

    shape: GridShape
    components: tuple[np.ndarray, ...]

    def __post_init__(self):
        comps = tuple(_as_locked(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != self.shape.ndim:
            raise ShapeMismatchError(
                f"{len(comps)} components for a {self.shape.ndim}D grid")
        for c in comps:
            if c.shape != self.shape.dims:
                raise ShapeMismatchError(
                    f"component shape {c.shape} != grid {self.shape.dims}")

    @classmethod
    def from_arrays(cls, comps) -> "VectorField":
        comps = [np.asarray(c, dtype=np.float64) for c in comps]
        return cls(GridShape(comps[0].shape), tuple(comps))

    @classmethod
    def zeros(cls, shape: GridShape) -> "VectorField":
        return cls(shape, tuple(np.zeros(shape.dims) for _ in range(shape.ndim)))


@dataclass(frozen=True)
class MaskField:
    """Boolean inclusion mask over a grid."""

    shape: GridShape
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=bool, order="C")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        if data.shape != self.shape.dims:
            raise ShapeMismatchError(
                f"mask shape {data.shape} != grid {self.shape.dims}")

    @classmethod
    def from_array(cls, arr) -> "MaskField":
        arr = np.asarray(arr, dtype=bool)
        return cls(GridShape(arr.shape), arr)


def normalize_intensity(field: ScalarField) -> ScalarField:
    """Affinely rescale intensities to [0, 1].

    A constant field maps to all zeros rather than raising: degenerate but
    valid input.
    """
    lo = float(field.data.min())
    hi = float(field.data.max())
    if hi == lo:
        return ScalarField(field.shape, np.zeros(field.shape.dims))
    return ScalarField(field.shape, (field.data - lo) / (hi - lo))


# ---------------------------------------------------------------------------
# NDF: magic "NDF1" | u8 d (axes) | u8 c (components; 1 = scalar) |
#      d x u32 axis sizes | c x N float64 payload, component-planar,
#      row-major. Everything little-endian.
# ---------------------------------------------------------------------------

def write_ndf(field, path) -> None:
    """Serialize a ScalarField or VectorField to the NDF binary format."""
    if isinstance(field, ScalarField):
        planes = [field.data]
    elif isinstance(field, VectorField):
        planes = list(field.components)
    else:
        raise TypeError(f"cannot serialize {type(field).__name__} as NDF")
    dims = field.shape.dims
    header = NDF_MAGIC + struct.pack("<BB", len(dims), len(planes))
    header += struct.pack(f"<{len(dims)}I", *dims)
    with open(path, "wb") as fh:
        fh.write(header)
        for plane in planes:
            fh.write(np.ascontiguousarray(plane, dtype="<f8").tobytes())


def read_ndf(path):
    """Read an NDF file back into a ScalarField or VectorField.

    The reconstruction is bit-exact: ``read_ndf(write_ndf(f))`` returns a
    field whose payload is byte-identical to ``f``'s.
    """
    raw = Path(path).read_bytes()
    if raw[:4] != NDF_MAGIC:
        raise NdfMagicError(f"{path}: bad magic {raw[:4]!r}, expected {NDF_MAGIC!r}")
    if len(raw) < 6:
        raise NdfTruncatedError(f"{path}: header cut short")
    d, c = raw[4], raw[5]
    if not 1 <= d <= 3:
        raise NdfHeaderError(f"{path}: {d} axes outside the supported 1..3")
    if c != 1 and c != d:
        raise NdfHeaderError(f"{path}: {c} components on a {d}D grid")
    offset = 6 + 4 * d
    if len(raw) < offset:
        raise NdfTruncatedError(f"{path}: header cut short")
    dims = struct.unpack(f"<{d}I", raw[6:offset])
    if any(n < 2 for n in dims):
        raise NdfHeaderError(f"{path}: axis sizes {dims} below the minimum of 2")
    n = 1
    for size in dims:
        n *= size
    expected = offset + 8 * c * n
    if len(raw) < expected:
        raise NdfTruncatedError(
            f"{path}: payload has {len(raw) - offset} bytes, expected {8 * c * n}")
    if len(raw) > expected:
        raise NdfHeaderError(f"{path}: {len(raw) - expected} trailing bytes")
    payload = np.frombuffer(raw, dtype="<f8", count=c * n, offset=offset)
    payload = payload.astype(np.float64).reshape(c, *dims)
    shape = GridShape(dims)
    if c == 1:
        return ScalarField(shape, payload[0])
    return VectorField(shape, tuple(payload))


# ---------------------------------------------------------------------------
# PGM: binary P5 only, maxval 255 or 65535. 16-bit samples are big-endian
# per the netpbm convention.
# ---------------------------------------------------------------------------

def write_pgm(field: ScalarField, path, maxval: int = 255) -> None:
    """Quantize a 1D or 2D field in [0, 1] to a binary PGM (round-half-up).

    A 1D field is written as a single-row image.
    """
    if field.shape.ndim not in (1, 2):
        raise ValueError("PGM export requires a 1D or 2D field")
    if maxval not in (255, 65535):
        raise PgmError(f"maxval must be 255 or 65535, got {maxval}")
    levels = np.floor(np.clip(field.data, 0.0, 1.0) * maxval + 0.5)
    levels = np.clip(levels, 0, maxval)
    if field.shape.ndim == 1:
        h, w = 1, field.shape.dims[0]
    else:
        h, w = field.shape.dims
    dtype = ">u2" if maxval == 65535 else "u1"
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n{maxval}\n".encode("ascii"))
        fh.write(levels.astype(dtype).tobytes())


def _pgm_tokens(raw: bytes, count: int):
    # netpbm headers allow '#' comments through end-of-line
    tokens = []
    pos = 0
    while len(tokens) < count:
        if pos >= len(raw):
            raise PgmError("header ended early")
        ch = raw[pos:pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            while pos < len(raw) and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        else:
            start = pos
            while pos < len(raw) and not raw[pos:pos + 1].isspace():
                pos += 1
            tokens.append(raw[start:pos])
    return tokens, pos + 1  # single whitespace byte separates header and raster


def read_pgm(path) -> ScalarField:
    """Read a binary (P5) PGM into a [0, 1] scalar field."""
    raw = Path(path).read_bytes()
    (magic,), _ = _pgm_tokens(raw, 1)
    if magic != b"P5":
        raise PgmError(f"{path}: unsupported PGM flavor {magic!r} (binary P5 only)")
    tokens, offset = _pgm_tokens(raw, 4)
    try:
        w, h, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise PgmError(f"{path}: non-numeric header field") from exc
    if maxval not in (255, 65535):
        raise PgmError(f"{path}: maxval {maxval} not in (255, 65535)")
    dtype = ">u2" if maxval == 65535 else "u1"
    expected = w * h * (2 if maxval == 65535 else 1)
    raster = raw[offset:offset + expected]
    if len(raster) < expected:
        raise PgmError(f"{path}: raster has {len(raster)} bytes, expected {expected}")
    pixels = np.frombuffer(raster, dtype=dtype).reshape(h, w)
    values = pixels.astype(np.float64) / maxval
    if h == 1 or w == 1:
        # a single row or column collapses to a 1D field (grid axes are >= 2)
        values = values.reshape(-1)
    return ScalarField(GridShape(values.shape), values)
