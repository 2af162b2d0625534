"""Image containers and bit-exact file I/O.

Images are plain 2-D ``float64`` numpy arrays indexed ``[y, x]`` with
intensities normalized to [0, 1].  Quantization only happens at the file
boundary.  Sampling patterns travel as :class:`QuadrantPattern`.

Quadrant codes name a position inside a 2x2 fine-grid group in scan order:
``0 -> (dx, dy) = (0, 0)``, ``1 -> (1, 0)``, ``2 -> (0, 1)``, ``3 -> (1, 1)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

DISCARDED = "D"
KEPT = "K"

NSP_MAGIC = b"NSP1\n"

# code -> (dx, dy) offset within the 2x2 group
QUADRANT_OFFSETS = ((0, 0), (1, 0), (0, 1), (1, 1))


class FormatError(ValueError):
    """Raised for malformed PGM or NSP1 files."""


@dataclass(frozen=True, eq=False)
class QuadrantPattern:
    """One quadrant code per sensor pixel.

    ``codes`` has shape ``(height, width)`` in sensor pixels.  ``meaning`` says
    whether the code marks the insensitive quadrant (``"D"``) or the single
    sensitive one (``"K"``).
    """

    codes: np.ndarray
    meaning: str = DISCARDED

    def __post_init__(self):
        codes = np.ascontiguousarray(self.codes, dtype=np.uint8)
        if codes.ndim != 2:
            raise ValueError("pattern codes must be 2-D")
        if codes.size and codes.max() > 3:
            raise ValueError("invalid quadrant code")
        if self.meaning not in (DISCARDED, KEPT):
            raise ValueError(f"meaning must be 'D' or 'K', got {self.meaning!r}")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)

    @property
    def width(self) -> int:
        return self.codes.shape[1]

    @property
    def height(self) -> int:
        return self.codes.shape[0]

    def __eq__(self, other):
        if not isinstance(other, QuadrantPattern):
            return NotImplemented
        return self.meaning == other.meaning and np.array_equal(self.codes, other.codes)

    def mask(self) -> np.ndarray:
        """Fine-grid weights m[x,y] as an array of shape (2*height, 2*width).

        For DISCARDED patterns the sensitive quadrants carry 1/3, for KEPT
        patterns the kept quadrant carries 1.
        """
        h, w = self.codes.shape
        out = np.zeros((2 * h, 2 * w))
        for code, (dx, dy) in enumerate(QUADRANT_OFFSETS):
            hit = self.codes == code
            if self.meaning == DISCARDED:
                out[dy::2, dx::2] = np.where(hit, 0.0, 1.0 / 3.0)
            else:
                out[dy::2, dx::2] += np.where(hit, 1.0, 0.0)
        return out


def as_image(samples) -> np.ndarray:
    img = np.asarray(samples, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("image must be 2-D")
    return img


# -- PGM ---------------------------------------------------------------------

_WS = b" \t\r\n"


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # skip whitespace and '#' comments
    while pos < len(data):
        c = data[pos:pos + 1]
        if c in (b" ", b"\t", b"\r", b"\n"):
            pos += 1
        elif c == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        else:
            break
    start = pos
    while pos < len(data) and data[pos] not in _WS and data[pos:pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise FormatError(f"malformed PGM header at byte offset {start}: unexpected end of header")
    return data[start:pos], pos


def parse_pgm(data: bytes) -> np.ndarray:
    """Decode binary PGM (P5) bytes into a normalized float image."""
    if data[:2] != b"P5":
        raise FormatError("malformed PGM header at byte offset 0: expected magic 'P5'")
    pos = 2
    if pos >= len(data) or data[pos] not in _WS:
        raise FormatError(f"malformed PGM header at byte offset {pos}: expected whitespace")
    fields = []
    for name in ("width", "height", "maxval"):
        offset = pos
        tok, pos = _read_token(data, pos)
        if not tok.isdigit():
            raise FormatError(f"malformed PGM header at byte offset {offset}: bad {name} {tok!r}")
        fields.append(int(tok))
    width, height, maxval = fields
    if maxval not in (255, 65535):
        raise FormatError(f"unsupported maxval {maxval} (byte offset {pos - len(str(maxval))})")
    if width < 1 or height < 1:
        raise FormatError(f"malformed PGM header: zero dimension {width}x{height}")
    if pos >= len(data) or data[pos] not in _WS:
        raise FormatError(f"malformed PGM header at byte offset {pos}: expected single whitespace")
    pos += 1
    depth = 1 if maxval == 255 else 2
    need = width * height * depth
    payload = data[pos:pos + need]
    if len(payload) < need:
        raise FormatError(
            f"truncated PGM payload at byte offset {pos + len(payload)}: "
            f"expected {need} bytes, got {len(payload)}")
    dtype = np.uint8 if depth == 1 else np.dtype(">u2")
    raw = np.frombuffer(payload, dtype=dtype).reshape(height, width)
    return raw.astype(np.float64) / maxval


def encode_pgm(image, maxval: int = 255) -> bytes:
    """Encode an image as P5 bytes, rounding half away from zero after clamping."""
    if maxval not in (255, 65535):
        raise ValueError(f"unsupported maxval {maxval}")
    img = as_image(image)
    if not np.all(np.isfinite(img)):
        raise ValueError("image contains non-finite samples")
    scaled = np.clip(img, 0.0, 1.0) * maxval
    # values are non-negative, so floor(v + 0.5) is round-half-away-from-zero
    q = np.floor(scaled + 0.5)
    dtype = np.uint8 if maxval == 255 else np.dtype(">u2")
    header = b"P5\n%d %d\n%d\n" % (img.shape[1], img.shape[0], maxval)
    return header + q.astype(dtype).tobytes()


def load_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    return parse_pgm(data)


def save_pgm(image, path, maxval: int = 255) -> None:
    data = encode_pgm(image, maxval)
    with open(path, "wb") as fh:
        fh.write(data)


# -- NSP1 pattern files ------------------------------------------------------

_NSP_HEADER = re.compile(rb"(\d+) (\d+) ([DK])\n")


def encode_pattern(pattern: QuadrantPattern) -> bytes:
    header = b"%d %d %s\n" % (pattern.width, pattern.height, pattern.meaning.encode())
    return NSP_MAGIC + header + pattern.codes.tobytes()


def parse_pattern(data: bytes) -> QuadrantPattern:
    if not data.startswith(NSP_MAGIC):
        raise FormatError("bad magic: not an NSP1 pattern file")
    m = _NSP_HEADER.match(data, len(NSP_MAGIC))
    if m is None:
        raise FormatError(f"malformed NSP1 header at byte offset {len(NSP_MAGIC)}")
    width, height = int(m.group(1)), int(m.group(2))
    meaning = m.group(3).decode()
    if width < 1 or height < 1:
        raise FormatError("malformed NSP1 header: zero dimension")
    payload = data[m.end():]
    if len(payload) < width * height:
        raise FormatError(
            f"truncated pattern: expected {width * height} bytes, got {len(payload)}")
    if len(payload) > width * height:
        raise FormatError(
            f"dimension mismatch: header says {width}x{height}, payload has {len(payload)} bytes")
    codes = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    bad = np.flatnonzero(codes > 3)
    if bad.size:
        raise FormatError(
            f"invalid quadrant code {codes.flat[bad[0]]} at byte offset {m.end() + bad[0]}")
    return QuadrantPattern(codes.copy(), meaning)


def save_pattern(pattern: QuadrantPattern, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_pattern(pattern))


def load_pattern(path) -> QuadrantPattern:
    with open(path, "rb") as fh:
        return parse_pattern(fh.read())

