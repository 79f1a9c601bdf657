"""Bit-exact device wire protocol with a resyncing stream decoder.

Frame layout (all multi-byte fields little-endian):

    A5 5A | version 0x01 | seq u16 | rows u8 | cols u8 | rows*cols samples u16 | crc u16

The CRC is CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection)
over every byte after the magic and before the CRC itself. The decoder
scans for the magic, validates the CRC, and on any failure advances one
byte and rescans, so corrupt input yields diagnostics rather than crashes.
The version byte gates future layout changes.
"""

from __future__ import annotations

import binascii
import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .circuit import ADC_COUNTS, Frame

MAGIC = b"\xa5\x5a"
VERSION = 0x01
_HEADER = struct.Struct("<2sBHBB")  # magic, version, seq, rows, cols


def crc16_ccitt_false(data: bytes) -> int:
    """CRC-16/CCITT-FALSE; check value of b"123456789" is 0x29B1."""
    return binascii.crc_hqx(data, 0xFFFF)


@dataclass(frozen=True)
class WireFrame:
    """One decoded frame: wrapping sequence number plus raw ADC samples."""

    seq: int
    rows: int
    cols: int
    samples: np.ndarray

    def to_frame(self, provenance: str = "wire") -> Frame:
        values = self.samples.astype(np.float64).reshape(self.rows, self.cols)
        return Frame(values, ADC_COUNTS, provenance=provenance)


@dataclass
class DecodeDiagnostics:
    resyncs: int = 0
    crc_failures: int = 0
    truncated_bytes: int = 0


def encode_wire(frame: Frame, seq: int) -> bytes:
    """Encode an adc_counts frame; dimensions above 255 do not fit the header."""
    if frame.unit != ADC_COUNTS:
        raise ValueError("wire frames carry adc_counts")
    rows, cols = frame.shape
    if rows > 255 or cols > 255:
        raise ValueError("wire frames are limited to 255x255")
    samples = frame.values.reshape(-1)
    if np.any(samples > 0xFFFF):
        raise ValueError("samples exceed 16 bits")
    header = _HEADER.pack(MAGIC, VERSION, seq % 0x10000, rows, cols)
    payload = header[len(MAGIC):] + samples.astype("<u2").tobytes()
    crc = crc16_ccitt_false(payload)
    return MAGIC + payload + struct.pack("<H", crc)


class StreamDecoder:
    """Explicit-state decoder for a byte stream of wire frames.

    Owned by a single consumer: feed() chunks in arrival order, collect the
    frames it returns, then finish() to account for any truncated tail.
    Every scan step either consumes a full frame or advances one byte, so
    decoding is O(length) with no unbounded lookback. A contiguous run of
    skipped bytes counts as one resync.
    """

    def __init__(self, expected_dims: Optional[tuple[int, int]] = None) -> None:
        self._buffer = bytearray()
        self._expected_dims = expected_dims
        self._skipping = False
        self.diagnostics = DecodeDiagnostics()

    def _skip(self, count: int = 1) -> None:
        del self._buffer[:count]
        if not self._skipping:
            self.diagnostics.resyncs += 1
            self._skipping = True

    def feed(self, data: bytes) -> list[WireFrame]:
        self._buffer.extend(data)
        frames: list[WireFrame] = []
        while True:
            start = self._buffer.find(MAGIC)
            if start < 0:
                # Keep one byte: it may be the first half of a split magic.
                if len(self._buffer) > 1:
                    self._skip(len(self._buffer) - 1)
                break
            if start > 0:
                self._skip(start)
            if len(self._buffer) < _HEADER.size:
                break  # wait for the rest of the header
            _, version, seq, rows, cols = _HEADER.unpack_from(self._buffer)
            plausible = version == VERSION and rows > 0 and cols > 0
            if plausible and self._expected_dims is not None:
                plausible = (rows, cols) == self._expected_dims
            if not plausible:
                self._skip(1)
                continue
            total = _HEADER.size + 2 * rows * cols + 2
            if len(self._buffer) < total:
                break  # wait for the full frame
            payload = bytes(self._buffer[len(MAGIC) : total - 2])
            (stored_crc,) = struct.unpack_from("<H", self._buffer, total - 2)
            if crc16_ccitt_false(payload) != stored_crc:
                self.diagnostics.crc_failures += 1
                self._skip(1)
                continue
            sample_bytes = bytes(self._buffer[_HEADER.size : total - 2])
            samples = np.frombuffer(sample_bytes, dtype="<u2").copy()
            del self._buffer[:total]
            self._skipping = False
            frames.append(WireFrame(seq=seq, rows=rows, cols=cols, samples=samples))
        return frames

    def finish(self) -> None:
        """Mark whatever is left in the buffer as a truncated tail."""
        self.diagnostics.truncated_bytes += len(self._buffer)
        self._buffer.clear()


def decode_stream(
    data: bytes,
    expected_dims: Optional[tuple[int, int]] = None,
) -> tuple[list[WireFrame], DecodeDiagnostics]:
    """One-shot decode of a complete byte stream."""
    decoder = StreamDecoder(expected_dims)
    frames = decoder.feed(data)
    decoder.finish()
    return frames, decoder.diagnostics
