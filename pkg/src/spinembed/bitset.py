"""Integer-bitmask vertex sets.

Vertex sets are plain Python ints with bit k set iff vertex k is a member.
Big-int AND/OR plus ``int.bit_count`` make the intersection-heavy density
and star kernels fast without any extra dependency.
"""

from __future__ import annotations

from typing import Iterable, Iterator, List


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> Iterator[int]:
    """Iterate set bit positions in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bit_list(mask: int) -> List[int]:
    return list(bits(mask))


def popcount(mask: int) -> int:
    return mask.bit_count()


def full_mask(n: int) -> int:
    return (1 << n) - 1
