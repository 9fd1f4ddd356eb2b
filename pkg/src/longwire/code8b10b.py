"""IBM 8b/10b line coding, data characters only.

Bytes map to 10-bit groups through the usual 5b/6b + 3b/4b split with a
running disparity of -1 or +1.  Each emitted group has 4 to 6 ones, so
the stream stays DC balanced and any single bit flip lands outside the
code table or breaks disparity, which the decoder reports.  Control
characters (K codes) are not implemented.

Groups are bit tuples in wire order ``a b c d e i f g h j``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import InvalidCodeGroup

__all__ = [
    "encode_8b10b",
    "decode_8b10b",
    "encode_bytes",
    "decode_bits",
    "valid_groups",
]

# 5b/6b sub-table (abcdei, MSB = a), RD = -1 column: the variant with the
# surplus of ones when the code is unbalanced.
_FIVE_SIX_RDNEG = (
    0b100111, 0b011101, 0b101101, 0b110001, 0b110101, 0b101001, 0b011001, 0b111000,
    0b111001, 0b100101, 0b010101, 0b110100, 0b001101, 0b101100, 0b011100, 0b010111,
    0b011011, 0b100011, 0b010011, 0b110010, 0b001011, 0b101010, 0b011010, 0b111010,
    0b110011, 0b100110, 0b010110, 0b110110, 0b001110, 0b101110, 0b011110, 0b101011,
)

# 3b/4b sub-table (fghj, MSB = f), RD = -1 column; index 7 is the primary D.x.P7.
_THREE_FOUR_RDNEG = (0b1011, 0b1001, 0b0101, 0b1100, 0b1101, 0b1010, 0b0110, 0b1110)

_ALT7_RDNEG, _ALT7_RDPOS = 0b0111, 0b1000
# x values whose D.x.7 takes the alternate 4b code, keyed by the disparity
# after the 6b sub-block; this is what keeps run lengths below five.
_ALT7_ON_NEG = frozenset((17, 18, 20))
_ALT7_ON_POS = frozenset((11, 13, 14))


def _ones(value: int, nbits: int) -> int:
    return bin(value & ((1 << nbits) - 1)).count("1")


def _disparity(value: int, nbits: int) -> int:
    return 2 * _ones(value, nbits) - nbits


def _pick(table, code: int, rd: int, nbits: int, flip_neutral: int | None) -> int:
    value = table[code]
    flips = _disparity(value, nbits) != 0 or code == flip_neutral
    if rd == +1 and flips:
        value = ~value & ((1 << nbits) - 1)
    return value


def _check_rd(rd: int) -> None:
    if rd not in (-1, +1):
        raise ValueError("running disparity must be -1 or +1")


def encode_8b10b(byte: int, running_disparity: int) -> tuple[tuple[int, ...], int]:
    """Encode one data byte; returns the 10-bit group and the new disparity."""
    _check_rd(running_disparity)
    if not 0 <= byte <= 0xFF:
        raise ValueError("byte must be in [0, 255]")
    x, y = byte & 0x1F, byte >> 5
    six = _pick(_FIVE_SIX_RDNEG, x, running_disparity, 6, flip_neutral=7)
    rd6 = running_disparity if _disparity(six, 6) == 0 else -running_disparity
    if y == 7 and ((rd6 == -1 and x in _ALT7_ON_NEG) or (rd6 == +1 and x in _ALT7_ON_POS)):
        four = _ALT7_RDNEG if rd6 == -1 else _ALT7_RDPOS
    else:
        four = _pick(_THREE_FOUR_RDNEG, y, rd6, 4, flip_neutral=3)
    rd_out = rd6 if _disparity(four, 4) == 0 else -rd6
    group = (six << 4) | four
    bits = tuple((group >> (9 - i)) & 1 for i in range(10))
    return bits, rd_out


def _build_decode_table() -> dict[tuple[int, ...], dict[int, tuple[int, int]]]:
    table: dict[tuple[int, ...], dict[int, tuple[int, int]]] = {}
    for byte in range(256):
        for rd in (-1, +1):
            bits, rd_out = encode_8b10b(byte, rd)
            table.setdefault(bits, {})[rd] = (byte, rd_out)
    return table


_DECODE = _build_decode_table()


def valid_groups() -> frozenset[tuple[int, ...]]:
    """All 10-bit groups some data byte encodes to (either disparity)."""
    return frozenset(_DECODE)


def decode_8b10b(ten_bits: Sequence[int], running_disparity: int) -> tuple[int, int]:
    """Decode a 10-bit group; raises InvalidCodeGroup on anything off-table."""
    _check_rd(running_disparity)
    bits = tuple(int(b) for b in ten_bits)
    if len(bits) != 10 or any(b not in (0, 1) for b in bits):
        raise ValueError("expected a sequence of 10 bits")
    entry = _DECODE.get(bits)
    if entry is None:
        raise InvalidCodeGroup(bits, "not a data character")
    hit = entry.get(running_disparity)
    if hit is None:
        raise InvalidCodeGroup(bits, f"disparity violation at RD={running_disparity:+d}")
    return hit


def encode_bytes(data: Iterable[int], running_disparity: int = -1) -> tuple[list[int], int]:
    """Encode a byte stream to a flat bit list, threading the disparity."""
    out: list[int] = []
    rd = running_disparity
    for byte in data:
        bits, rd = encode_8b10b(byte, rd)
        out.extend(bits)
    return out, rd


def decode_bits(bits: Sequence[int], running_disparity: int = -1) -> tuple[bytes, int]:
    """Decode a flat bit stream (length multiple of 10) back to bytes."""
    if len(bits) % 10 != 0:
        raise ValueError("bit stream length must be a multiple of 10")
    out = bytearray()
    rd = running_disparity
    for i in range(0, len(bits), 10):
        byte, rd = decode_8b10b(bits[i : i + 10], rd)
        out.append(byte)
    return bytes(out), rd
