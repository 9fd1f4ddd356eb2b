"""Covert-communication layer: Manchester symbols, framing, bandwidth.

Each payload bit is sent as an ordered pair of opposite wire states, one
measurement window per symbol.  Because both states of a pair see the
same baseline, the decoder only compares the two counts, which makes it
immune to slow frequency wander.  Frames are delimited by fixed start-
and end-of-frame bit patterns, optionally with the payload run through
8b/10b for error detection.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from . import code8b10b
from .channel import DeviceProfile, Geometry, MeasurementConfig, simulate_trace
from .patterns import PatternSpec

__all__ = [
    "LineCode",
    "Frame",
    "DEFAULT_SOF",
    "DEFAULT_EOF",
    "manchester_encode",
    "manchester_decode",
    "frame_sync",
    "frame_to_bits",
    "find_frames",
    "channel_bandwidth",
    "simulate_covert_transfer",
    "bits_to_text",
    "bits_from_text",
    "frames_to_csv",
]


class LineCode(Enum):
    NONE = "none"
    EIGHTB_TENB = "8b10b"


def _word_bits(word: int, width: int) -> tuple[int, ...]:
    return tuple((word >> (width - 1 - i)) & 1 for i in range(width))


DEFAULT_SOF = _word_bits(0xF0D5, 16)
DEFAULT_EOF = _word_bits(0x0B2F, 16)


@dataclass(frozen=True)
class Frame:
    payload: tuple[int, ...]
    sof: tuple[int, ...] = DEFAULT_SOF
    eof: tuple[int, ...] = DEFAULT_EOF
    line_code: LineCode = LineCode.NONE

    def __post_init__(self):
        if not self.sof or not self.eof:
            raise ValueError("sof and eof patterns must be non-empty")
        if any(b not in (0, 1) for b in self.sof + self.eof + self.payload):
            raise ValueError("frame fields must contain bits")
        if self.line_code is LineCode.EIGHTB_TENB and len(self.payload) % 8 != 0:
            raise ValueError("8b/10b payload length must be a multiple of 8")


def manchester_encode(bits: Iterable[int]) -> list[tuple[int, int]]:
    """0 -> (0, 1) and 1 -> (1, 0); two wire symbols per payload bit."""
    out = []
    for b in bits:
        if b not in (0, 1):
            raise ValueError("bits must be 0 or 1")
        out.append((1, 0) if b else (0, 1))
    return out


def manchester_decode(count_pairs: Iterable[tuple[float, float]]) -> list[int]:
    """Decode count pairs by order: 0 when the first count is lower, else 1."""
    return [0 if c_first < c_second else 1 for c_first, c_second in count_pairs]


def frame_sync(bitstream: Sequence[int], sof: Sequence[int]) -> list[int]:
    """All positions where the start-of-frame pattern begins.

    The payload of a frame found at position p starts at p + len(sof).
    On independent random bits the per-position false-positive rate is
    2^-len(sof).
    """
    sof = tuple(sof)
    if not sof:
        raise ValueError("sof must be non-empty")
    n, k = len(bitstream), len(sof)
    return [i for i in range(n - k + 1) if tuple(bitstream[i : i + k]) == sof]


def frame_to_bits(frame: Frame) -> list[int]:
    """Serialize a frame: SOF, line-coded payload, EOF."""
    if frame.line_code is LineCode.EIGHTB_TENB:
        data = [
            int("".join(str(b) for b in frame.payload[i : i + 8]), 2)
            for i in range(0, len(frame.payload), 8)
        ]
        body, _ = code8b10b.encode_bytes(data)
    else:
        body = list(frame.payload)
    return list(frame.sof) + body + list(frame.eof)


def find_frames(
    bitstream: Sequence[int],
    sof: Sequence[int] = DEFAULT_SOF,
    eof: Sequence[int] = DEFAULT_EOF,
    line_code: LineCode = LineCode.NONE,
) -> list[tuple[int, tuple[int, ...]]]:
    """Extract (sof_position, payload_bits) for every complete frame."""
    sof, eof = tuple(sof), tuple(eof)
    frames = []
    for pos in frame_sync(bitstream, sof):
        start = pos + len(sof)
        for end in frame_sync(bitstream, eof):
            if end < start:
                continue
            body = tuple(bitstream[start:end])
            if line_code is LineCode.EIGHTB_TENB:
                if len(body) % 10 != 0:
                    continue
                data, _ = code8b10b.decode_bits(body)
                body = tuple(int(c) for byte in data for c in format(byte, "08b"))
            frames.append((pos, body))
            break
    return frames


def channel_bandwidth(cfg: MeasurementConfig, line_code: LineCode = LineCode.NONE) -> float:
    """Payload bits per second: one bit per two windows, minus line-code overhead."""
    bps = 1.0 / (2.0 * cfg.window_seconds)
    if line_code is LineCode.EIGHTB_TENB:
        bps *= 8.0 / 10.0
    return bps


def simulate_covert_transfer(
    bits: Sequence[int],
    profile: DeviceProfile,
    cfg: MeasurementConfig,
    geom: Geometry,
    seed: int,
) -> list[int]:
    """Full pipeline: Manchester encode, drive the channel, decode counts."""
    symbols = [s for pair in manchester_encode(bits) for s in pair]
    if not symbols:
        return []
    pattern = PatternSpec.custom(symbols)
    trace = simulate_trace(profile, cfg, geom, pattern, len(symbols), seed)
    counts = trace.counts
    pairs = list(zip(counts[0::2], counts[1::2]))
    return manchester_decode(pairs)


def bits_to_text(bits: Sequence[int], width: int = 64) -> str:
    """ASCII serialization: lines of 0/1 characters."""
    chars = "".join(str(int(b)) for b in bits)
    lines = [chars[i : i + width] for i in range(0, len(chars), width)] or [""]
    return "\n".join(lines) + "\n"


def bits_from_text(text: str) -> list[int]:
    bits = []
    for ch in text:
        if ch in "01":
            bits.append(int(ch))
        elif not ch.isspace():
            raise ValueError(f"unexpected character {ch!r} in bitstream")
    return bits


def frames_to_csv(frames: Iterable[tuple[int, Sequence[int]]]) -> str:
    """CSV rows position,payload_hex (payload bits packed MSB-first)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["position", "payload_hex"])
    for pos, payload in frames:
        padded = list(payload) + [0] * (-len(payload) % 8)
        data = bytes(
            int("".join(str(b) for b in padded[i : i + 8]), 2) for i in range(0, len(padded), 8)
        )
        writer.writerow([pos, data.hex()])
    return buf.getvalue()
