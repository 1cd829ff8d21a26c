"""Binary PGM (P5, maxval 255) reader and writer.

Header comments are preserved on request: :func:`save_pgm` can embed
``key=value`` metadata comments and :func:`read_pgm_comments` returns them.
Pixel data always round-trips byte for byte.
"""
import io
import re
import sys

import numpy as np

from ..errors import PGMHeaderError, PGMMaxvalError, PGMTruncatedError
from ._types import as_gray

_WS = b" \t\r\n\x0b\x0c"


def _parse(data):
    """Return (width, height, offset, comments) for a P5 byte string."""
    if data[:2] != b"P5":
        raise PGMHeaderError("not a binary PGM: magic number must be P5")
    pos = 2
    fields = []
    comments = []
    while len(fields) < 3:
        if pos >= len(data):
            raise PGMHeaderError("header ended before width/height/maxval")
        ch = data[pos:pos + 1]
        if ch in (b" ", b"\t", b"\r", b"\n", b"\x0b", b"\x0c"):
            pos += 1
        elif ch == b"#":
            end = data.find(b"\n", pos)
            if end < 0:
                raise PGMHeaderError("unterminated header comment")
            comments.append(data[pos + 1:end].decode("utf-8", "replace").strip())
            pos = end + 1
        else:
            start = pos
            while pos < len(data) and data[pos:pos + 1] not in (b"#",) and data[pos] not in _WS:
                pos += 1
            token = data[start:pos]
            if not token.isdigit():
                raise PGMHeaderError(f"bad header token {token!r}")
            fields.append(int(token))
    if pos >= len(data) or data[pos] not in _WS:
        raise PGMHeaderError("missing whitespace after maxval")
    pos += 1
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PGMHeaderError(f"bad image size {width}x{height}")
    if maxval != 255:
        raise PGMMaxvalError(f"unsupported maxval {maxval} (only 255 is accepted)")
    return width, height, pos, comments


def decode_pgm(data):
    """Decode P5 bytes into a ``(height, width)`` uint8 array."""
    width, height, offset, _ = _parse(data)
    need = width * height
    payload = data[offset:offset + need]
    if len(payload) < need:
        raise PGMTruncatedError(f"truncated payload: expected {need} bytes, got {len(payload)}")
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()


def encode_pgm(img, comments=()):
    img = as_gray(img)
    h, w = img.shape
    head = io.BytesIO()
    head.write(b"P5\n")
    for line in comments:
        if "\n" in line:
            raise ValueError("comment lines may not contain newlines")
        head.write(b"# " + line.encode("utf-8") + b"\n")
    head.write(f"{w} {h}\n255\n".encode("ascii"))
    return head.getvalue() + np.ascontiguousarray(img).tobytes()


def _read_bytes(path):
    if str(path) == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def load_pgm(path):
    """Read a P5 PGM file (``"-"`` reads stdin)."""
    return decode_pgm(_read_bytes(path))


def read_pgm_comments(path_or_bytes):
    """Return ``key=value`` pairs found in the header comments."""
    data = path_or_bytes if isinstance(path_or_bytes, bytes) else _read_bytes(path_or_bytes)
    _, _, _, comments = _parse(data)
    meta = {}
    for line in comments:
        m = re.match(r"^([A-Za-z_][\w.\-]*)=(.*)$", line)
        if m:
            meta[m.group(1)] = m.group(2).strip()
    return meta


def save_pgm(img, path, comments=()):
    """Write ``img`` as P5 PGM (``"-"`` writes stdout)."""
    data = encode_pgm(img, comments)
    if str(path) == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    with open(path, "wb") as fh:
        fh.write(data)


def load_pgm_with_meta(path):
    """Read image and header metadata with a single read (safe for stdin)."""
    data = _read_bytes(path)
    return decode_pgm(data), read_pgm_comments(data)
