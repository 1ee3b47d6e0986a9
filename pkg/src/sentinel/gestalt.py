"""Gestalt (Ratcliff-Obershelp) sequence similarity.

Deterministic: no junk or popularity heuristics, comparison over Unicode
scalar values. ratio(a, b) = 2M / (len(a) + len(b)) where M is the total
length of the recursively-found matching blocks. Not symmetric in general.
"""

from __future__ import annotations

from typing import NamedTuple


class MatchBlock(NamedTuple):
    a_start: int
    b_start: int
    length: int


def find_longest_match(a: str, b: str, a_lo: int, a_hi: int, b_lo: int, b_hi: int) -> MatchBlock:
    """Longest contiguous common substring of a[a_lo:a_hi] and b[b_lo:b_hi].

    Ties break to the smallest a_start, then the smallest b_start. With no
    common character the result is a zero-length block at (a_lo, b_lo).
    """
    if not (0 <= a_lo <= a_hi <= len(a) and 0 <= b_lo <= b_hi <= len(b)):
        raise ValueError("window out of range")

    b2j: dict[str, list[int]] = {}
    for j in range(b_lo, b_hi):
        b2j.setdefault(b[j], []).append(j)

    best_i, best_j, best_size = a_lo, b_lo, 0
    # j2len[j] = length of the common suffix ending at a[i-1], b[j]
    j2len: dict[int, int] = {}
    for i in range(a_lo, a_hi):
        new_j2len: dict[int, int] = {}
        for j in b2j.get(a[i], ()):
            k = j2len.get(j - 1, 0) + 1
            new_j2len[j] = k
            if k > best_size:
                best_i, best_j, best_size = i - k + 1, j - k + 1, k
        j2len = new_j2len
    return MatchBlock(best_i, best_j, best_size)


def matching_blocks(a: str, b: str) -> list[MatchBlock]:
    """Recursive longest-match decomposition, adjacent blocks coalesced,
    terminated by the (len(a), len(b), 0) sentinel."""
    queue = [(0, len(a), 0, len(b))]
    found: list[MatchBlock] = []
    while queue:
        a_lo, a_hi, b_lo, b_hi = queue.pop()
        block = find_longest_match(a, b, a_lo, a_hi, b_lo, b_hi)
        if block.length:
            found.append(block)
            queue.append((a_lo, block.a_start, b_lo, block.b_start))
            queue.append((block.a_start + block.length, a_hi, block.b_start + block.length, b_hi))
    found.sort()

    coalesced: list[MatchBlock] = []
    for block in found:
        if (
            coalesced
            and coalesced[-1].a_start + coalesced[-1].length == block.a_start
            and coalesced[-1].b_start + coalesced[-1].length == block.b_start
        ):
            prev = coalesced.pop()
            block = MatchBlock(prev.a_start, prev.b_start, prev.length + block.length)
        coalesced.append(block)
    coalesced.append(MatchBlock(len(a), len(b), 0))
    return coalesced


def ratio(a: str, b: str) -> float:
    """Similarity in [0, 1]; two empty strings compare as 1.0."""
    total = len(a) + len(b)
    if total == 0:
        return 1.0
    matched = sum(block.length for block in matching_blocks(a, b))
    return 2.0 * matched / total
