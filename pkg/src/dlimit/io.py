"""Raster and report encoders: PGM (P5) with a ``.meta`` sidecar, PNG, CSV and
JSON, all written atomically."""
from __future__ import annotations

import csv
import io as _io
import json
import math
import os
import struct
import tempfile
import zlib
from typing import Iterable, Optional

import numpy as np

from .raster import GridSpec, SetRaster

SET_BYTE, UNSET_BYTE = 0, 255


class PGMError(ValueError):
    """Malformed or truncated PGM data."""


def _umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def atomic_write(path: str, data: bytes) -> None:
    """Write to a temp file in the target directory, then rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.chmod(tmp, 0o666 & ~_umask())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- PGM ---------------------------------------------------------------------


def _image_rows(r: SetRaster) -> np.ndarray:
    # image row 0 is the top of the picture (largest y)
    return np.where(r.mask[::-1], SET_BYTE, UNSET_BYTE).astype(np.uint8)


def encode_pgm(r: SetRaster) -> bytes:
    header = f"P5\n{r.grid.nx} {r.grid.ny}\n255\n".encode("ascii")
    return header + _image_rows(r).tobytes()


def _read_token(data: bytes, pos: int) -> tuple[bytes, int, int]:
    """Next whitespace-delimited header token; skips ``#`` comments."""
    n = len(data)
    while pos < n:
        ch = data[pos : pos + 1]
        if ch == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif ch.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise PGMError(f"unexpected end of header at byte {start}")
    return data[start:pos], start, pos


def decode_pgm(data: bytes, grid: Optional[GridSpec] = None) -> SetRaster:
    """Inverse of :func:`encode_pgm`. A byte below half the maxval is a set cell.

    Without ``grid`` the raster gets the pixel grid [0, nx] x [0, ny].
    """
    if data[:2] != b"P5":
        raise PGMError(f"bad magic at byte 0: expected b'P5', got {data[:2]!r}")
    pos = 2
    values = []
    for name in ("width", "height", "maxval"):
        tok, start, pos = _read_token(data, pos)
        try:
            v = int(tok)
        except ValueError:
            raise PGMError(f"bad {name} {tok!r} at byte {start}") from None
        if v <= 0 or (name == "maxval" and v > 255):
            raise PGMError(f"{name} {v} out of range at byte {start}")
        values.append(v)
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise PGMError(f"missing whitespace after maxval at byte {pos}")
    pos += 1
    nx, ny, maxval = values
    expected = nx * ny
    payload = data[pos:]
    if len(payload) < expected:
        raise PGMError(
            f"truncated payload at byte {pos}: expected {expected} bytes, got {len(payload)}"
        )
    if len(payload) > expected:
        raise PGMError(
            f"trailing data at byte {pos + expected}: expected {expected} bytes, got {len(payload)}"
        )
    img = np.frombuffer(payload, dtype=np.uint8).reshape(ny, nx)
    mask = (img.astype(np.int32) * 2 < maxval)[::-1]
    if grid is None:
        grid = GridSpec(0.0, float(nx), 0.0, float(ny), nx, ny)
    elif (grid.nx, grid.ny) != (nx, ny):
        raise PGMError(f"image is {nx}x{ny} but grid is {grid.nx}x{grid.ny}")
    return SetRaster(grid, mask)


# -- sidecar -----------------------------------------------------------------


def meta_path(path: str) -> str:
    return path + ".meta"


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, complex):
        return f"{v.real!r}{'+' if v.imag >= 0 else '-'}{abs(v.imag)!r}i"
    return str(v)


def encode_meta(r: SetRaster) -> bytes:
    fields = {f"grid_{k}": v for k, v in r.grid.as_dict().items()}
    fields.update(r.meta)
    fields["set_cells"] = r.count
    return "".join(f"{k} = {_fmt(fields[k])}\n" for k in sorted(fields)).encode("utf-8")


def decode_meta(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"meta line {lineno} has no '=': {line!r}")
        out[key.strip()] = value.strip()
    return out


def grid_from_meta(meta: dict) -> GridSpec:
    try:
        return GridSpec(
            float(meta["grid_x_min"]), float(meta["grid_x_max"]),
            float(meta["grid_y_min"]), float(meta["grid_y_max"]),
            int(meta["grid_nx"]), int(meta["grid_ny"]),
        )
    except KeyError as exc:
        raise ValueError(f"meta lacks grid field {exc.args[0]}") from None


def write_raster(r: SetRaster, path: str) -> None:
    """PGM (or PNG when ``path`` ends in .png) plus the ``.meta`` sidecar."""
    data = encode_png(r) if path.lower().endswith(".png") else encode_pgm(r)
    atomic_write(path, data)
    atomic_write(meta_path(path), encode_meta(r))


def read_raster(path: str) -> SetRaster:
    """Read a PGM; the grid comes from the sidecar when one exists."""
    with open(path, "rb") as fh:
        data = fh.read()
    grid = None
    meta = {}
    if os.path.exists(meta_path(path)):
        with open(meta_path(path), encoding="utf-8") as fh:
            meta = decode_meta(fh.read())
        grid = grid_from_meta(meta)
    r = decode_pgm(data, grid)
    extra = {k: v for k, v in meta.items() if not k.startswith("grid_") and k != "set_cells"}
    return SetRaster(r.grid, r.mask, extra)


# -- PNG ---------------------------------------------------------------------


def _chunk(tag: bytes, body: bytes) -> bytes:
    return struct.pack(">I", len(body)) + tag + body + struct.pack(">I", zlib.crc32(tag + body) & 0xFFFFFFFF)


def encode_png(r: SetRaster) -> bytes:
    """8-bit grayscale PNG, same orientation and shades as the PGM."""
    rows = _image_rows(r)
    ny, nx = rows.shape
    raw = b"".join(b"\x00" + rows[j].tobytes() for j in range(ny))
    ihdr = struct.pack(">IIBBBBB", nx, ny, 8, 0, 0, 0, 0)
    return (b"\x89PNG\r\n\x1a\n" + _chunk(b"IHDR", ihdr)
            + _chunk(b"IDAT", zlib.compress(raw, 9)) + _chunk(b"IEND", b""))


# -- CSV / JSON ----------------------------------------------------------------


def format_number(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def encode_csv(header: Iterable[str], rows: Iterable[Iterable]) -> bytes:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([format_number(v) for v in row])
    return buf.getvalue().encode("utf-8")


def write_csv(path: str, header, rows) -> None:
    atomic_write(path, encode_csv(header, rows))


def _json_default(v):
    if isinstance(v, complex):
        return _fmt(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _finite(v):
    if isinstance(v, float) and not math.isfinite(v):
        return format_number(v)
    if isinstance(v, dict):
        return {k: _finite(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_finite(x) for x in v]
    return v


def encode_json(obj) -> bytes:
    return (json.dumps(_finite(obj), indent=2, sort_keys=True, default=_json_default) + "\n").encode("utf-8")


def write_json(path: str, obj) -> None:
    atomic_write(path, encode_json(obj))
