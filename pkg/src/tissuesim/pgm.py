"""PGM (P2 ASCII / P5 binary) parsing and thresholding into a binary mask."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class PgmParseError(ValueError):
    """Malformed or truncated PGM input; the message carries the byte offset."""


@dataclass
class BinaryMask:
    """Row-major occupancy grid; True marks tissue."""

    width: int
    height: int
    bits: np.ndarray

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=bool)
        if self.width < 1 or self.height < 1:
            raise ValueError(f"mask dimensions must be >= 1, got {self.width}x{self.height}")
        if self.bits.shape != (self.height, self.width):
            raise ValueError(
                f"bits shape {self.bits.shape} does not match {self.height}x{self.width}"
            )


_WHITESPACE = b" \t\r\n\x0b\x0c"


class _Tokenizer:
    """Walks PGM header tokens, skipping comments, tracking the byte offset."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _skip_ws_and_comments(self):
        while self.pos < len(self.data):
            b = self.data[self.pos]
            if b in _WHITESPACE:
                self.pos += 1
            elif b == ord("#"):
                nl = self.data.find(b"\n", self.pos)
                self.pos = len(self.data) if nl < 0 else nl + 1
            else:
                return

    def token(self, what: str) -> bytes:
        self._skip_ws_and_comments()
        if self.pos >= len(self.data):
            raise PgmParseError(f"unexpected end of data at byte {self.pos} while reading {what}")
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos] not in _WHITESPACE:
            if self.data[self.pos : self.pos + 1] == b"#":
                break
            self.pos += 1
        return self.data[start : self.pos]

    def integer(self, what: str, lo: int, hi: int) -> int:
        start = self.pos
        tok = self.token(what)
        try:
            value = int(tok)
        except ValueError:
            raise PgmParseError(f"invalid {what} {tok!r} at byte {start}") from None
        if not lo <= value <= hi:
            raise PgmParseError(f"{what} {value} out of range [{lo}, {hi}] at byte {start}")
        return value


def load_mask(data: bytes, threshold: int) -> BinaryMask:
    """Parse a P5/P2 PGM and threshold it: a pixel is tissue iff gray >= threshold."""
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold must lie in [0, 255], got {threshold}")
    tok = _Tokenizer(data)
    magic = tok.token("magic number")
    if magic not in (b"P2", b"P5"):
        raise PgmParseError(f"unsupported magic {magic!r} at byte 0 (expected P2 or P5)")
    width = tok.integer("width", 1, 1 << 20)
    height = tok.integer("height", 1, 1 << 20)
    maxval = tok.integer("maxval", 1, 65535)
    if maxval > 255:
        raise PgmParseError(f"maxval {maxval} unsupported (only single-byte grays, <= 255)")
    count = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates the header from the payload
        if tok.pos >= len(data) or data[tok.pos] not in _WHITESPACE:
            raise PgmParseError(f"missing whitespace after maxval at byte {tok.pos}")
        start = tok.pos + 1
        if len(data) - start < count:
            raise PgmParseError(
                f"truncated payload at byte {len(data)}: expected {count} bytes from byte {start}"
            )
        grays = np.frombuffer(data[start : start + count], dtype=np.uint8).astype(np.int64)
    else:
        values = [tok.integer("gray value", 0, maxval) for _ in range(count)]
        grays = np.array(values, dtype=np.int64)
    bits = (grays >= threshold).reshape(height, width)
    return BinaryMask(width=width, height=height, bits=bits)


def load_mask_file(path, threshold: int) -> BinaryMask:
    with open(path, "rb") as fh:
        return load_mask(fh.read(), threshold)
