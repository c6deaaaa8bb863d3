"""Pure-Python pairing sweep: reference implementation and fallback.

A pairing of the k0 x k1 grid partitions its cells into two-cell fibers.
For every pairing in an index range the sweep counts, via the line/rectangle
characterization, how many collections of three fibers are bad, and records
the pairings with no non-bad collection at all.

Pairings are enumerated in a fixed order: repeatedly pair the least unpaired
cell with each larger unpaired cell, in increasing order.  Unranking an index
through that order makes the sweep shardable by index ranges.
"""

from __future__ import annotations

from math import comb


def pairing_count(n_cells: int) -> int:
    """(n_cells - 1)!! — the number of perfect pairings of n_cells cells."""
    if n_cells % 2 != 0:
        raise ValueError("odd cell count has no perfect pairing")
    out = 1
    for m in range(n_cells - 1, 0, -2):
        out *= m
    return out


def triple_count(n_fibers: int) -> int:
    return comb(n_fibers, 3)


def _subtree_sizes(n_pairs: int) -> list[int]:
    # sizes[i]: completions after the i-th pairing choice has been made
    sizes = [1] * n_pairs
    for i in range(n_pairs - 2, -1, -1):
        sizes[i] = sizes[i + 1] * (2 * (n_pairs - i - 1) - 1)
    return sizes


def pairing_fibers_from_index(k0: int, k1: int, index: int) -> list[int]:
    """Fiber id per cell (row-major) for the pairing at ``index``."""
    cells = k0 * k1
    n_pairs = cells // 2
    if not 0 <= index < pairing_count(cells):
        raise ValueError(f"pairing index {index} out of range")
    sizes = _subtree_sizes(n_pairs)
    avail = list(range(cells))
    fiber = [0] * cells
    for i in range(n_pairs):
        digit, index = divmod(index, sizes[i])
        a = avail.pop(0)
        b = avail.pop(digit)
        fiber[a] = fiber[b] = i
    return fiber


def _line_triples(k0: int, k1: int) -> list[tuple[int, int, int]]:
    """Cell triples lying in one row or one column."""
    triples = []
    for r in range(k0):
        row = [r * k1 + c for c in range(k1)]
        for i in range(k1):
            for j in range(i + 1, k1):
                for l in range(j + 1, k1):
                    triples.append((row[i], row[j], row[l]))
    for c in range(k1):
        col = [r * k1 + c for r in range(k0)]
        for i in range(k0):
            for j in range(i + 1, k0):
                for l in range(j + 1, k0):
                    triples.append((col[i], col[j], col[l]))
    return triples


def _rectangles(k0: int, k1: int) -> list[tuple[int, int, int, int]]:
    rects = []
    for r0 in range(k0):
        for r1 in range(r0 + 1, k0):
            for c0 in range(k1):
                for c1 in range(c0 + 1, k1):
                    rects.append(
                        (r0 * k1 + c0, r0 * k1 + c1, r1 * k1 + c0, r1 * k1 + c1)
                    )
    return rects


def _tri_index(a: int, b: int, c: int) -> int:
    # colex rank of {a < b < c}
    return c * (c - 1) * (c - 2) // 6 + b * (b - 1) // 2 + a


def bad_triple_count(
    fiber: list[int],
    k0: int,
    k1: int,
    lines=None,
    rects=None,
) -> int:
    """Number of bad three-fiber collections of a total fiber map."""
    if lines is None:
        lines = _line_triples(k0, k1)
    if rects is None:
        rects = _rectangles(k0, k1)
    bad = set()
    for x, y, z in lines:
        a, b, c = fiber[x], fiber[y], fiber[z]
        if a != b and a != c and b != c:
            if a > b:
                a, b = b, a
            if b > c:
                b, c = c, b
                if a > b:
                    a, b = b, a
            bad.add(_tri_index(a, b, c))
    for w, x, y, z in rects:
        fs = {fiber[w], fiber[x], fiber[y], fiber[z]}
        if len(fs) == 3:
            a, b, c = sorted(fs)
            bad.add(_tri_index(a, b, c))
    return len(bad)


def sweep_pairings_py(
    k0: int, k1: int, start: int, stop: int
) -> tuple[list[int], list[int]]:
    """Sweep pairings in [start, stop).

    Returns (histogram, all_bad): ``histogram[b]`` counts pairings with
    exactly ``b`` bad collections; ``all_bad`` lists indices of pairings
    where every three-fiber collection is bad.
    """
    cells = k0 * k1
    n_pairs = cells // 2
    n_triples = triple_count(n_pairs)
    sizes = _subtree_sizes(n_pairs)
    lines = _line_triples(k0, k1)
    rects = _rectangles(k0, k1)
    hist = [0] * (n_triples + 1)
    all_bad: list[int] = []
    fiber = [0] * cells
    for index in range(start, stop):
        rem = index
        avail = list(range(cells))
        for i in range(n_pairs):
            digit, rem = divmod(rem, sizes[i])
            a = avail.pop(0)
            b = avail.pop(digit)
            fiber[a] = fiber[b] = i
        bad = bad_triple_count(fiber, k0, k1, lines, rects)
        hist[bad] += 1
        if bad == n_triples:
            all_bad.append(index)
    return hist, all_bad


# fallback alias used when the compiled extension is unavailable
sweep_pairings = sweep_pairings_py
