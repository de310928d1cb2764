"""
Small helpers shared across the workbench: bitset masks over point indices and
exact rational parsing/formatting.

Sets of points are plain ``int`` masks (bit ``i`` set means point ``i`` is a
member). Everything measure-theoretic in the package is built on these.
"""

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, List, Sequence, Tuple, Union

import numpy as np

RationalLike = Union[Fraction, int, str]


def mask_of(points: Iterable[int]) -> int:
    """Build a mask from point indices."""
    mask = 0
    for point in points:
        if point < 0:
            raise ValueError(f"point index must be non-negative, got {point}")
        mask |= 1 << point
    return mask


def full_mask(size: int) -> int:
    """Mask containing every point of a ground set of ``size`` points."""
    return (1 << size) - 1


def iter_bits(mask: int) -> Iterator[int]:
    """Iterate over the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_of(mask: int) -> List[int]:
    return list(iter_bits(mask))


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def lowest_bit(mask: int) -> int:
    """Index of the least member of a non-empty mask."""
    if not mask:
        raise ValueError("empty mask has no least member")
    return (mask & -mask).bit_length() - 1


def union_of(masks: Iterable[int]) -> int:
    result = 0
    for mask in masks:
        result |= mask
    return result


def unions_of_blocks(blocks: Sequence[int]) -> Iterator[int]:
    """
    Enumerate every union of a selection of ``blocks`` (the power set of the
    block list), starting with the empty union.
    """
    count = len(blocks)
    for selector in range(1 << count):
        yield union_of(blocks[i] for i in iter_bits(selector))


def sample_unions(
    blocks: Sequence[int], count: int, seed: int = 0
) -> Iterator[int]:
    """
    Yield ``count`` seeded random unions of ``blocks`` plus the empty set and
    the full union, for verification above the exhaustive cap.
    """
    yield 0
    yield union_of(blocks)
    rng = np.random.default_rng(seed)
    for _ in range(count):
        picks = rng.integers(0, 2, size=len(blocks))
        yield union_of(block for block, pick in zip(blocks, picks) if pick)


def block_unions(
    blocks: Sequence[int], exhaustive_cap: int, sample_count: int, seed: int = 0
) -> Tuple[Iterator[int], bool]:
    """
    Unions of ``blocks`` for an oracle: all of them when the block count is at
    most ``exhaustive_cap``, else a seeded sample. The flag tells which.
    """
    if len(blocks) <= exhaustive_cap:
        return unions_of_blocks(blocks), True
    return sample_unions(blocks, sample_count, seed), False


def small_selections(blocks: Sequence[int], max_size: int) -> Iterator[int]:
    """Unions of at most ``max_size`` blocks."""
    for size in range(max_size + 1):
        for chosen in combinations(blocks, size):
            yield union_of(chosen)


def parse_rational(value: RationalLike) -> Fraction:
    """
    Parse an exact rational from a ``"num/den"`` string, an int or a Fraction.

    Floats are rejected: every identity checked by the workbench is exact.
    """
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Invalid rational '{value}': {str(e)}")
    raise ValueError(
        f"Unsupported rational value {value!r} of type {type(value).__name__}; "
        "use 'num/den' strings"
    )


def format_rational(value: Fraction) -> str:
    """Render a rational as ``"num/den"`` (``"n/1"`` for integers)."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def format_mask(mask: int) -> str:
    """Render a mask as a sorted index list, e.g. ``{0,2}``."""
    return "{" + ",".join(str(i) for i in iter_bits(mask)) + "}"
