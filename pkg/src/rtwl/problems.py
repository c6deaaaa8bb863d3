"""Catalog of problems as (instance, solution checker) pairs at desk scale.

Includes the parity-word calculus for the cofinite-to-infinite principle:
a word over naturals where symbol ``n + 1`` places one mark on color ``n``
and ``0`` is blank, with an implicit blank tail.  A natural belongs to the
described cofinite set iff its mark count is even.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .streams import EvpStream, StableColoring, ValidationError

CfiWord = tuple[int, ...]


# ---------------------------------------------------------------------------
# Flip detection (eventually-one binary sequences)


@dataclass(frozen=True)
class LpoInstance:
    """The sequence 0^omega (flip=None) or 0^flip 1^omega."""

    flip: Optional[int] = None

    def __post_init__(self):
        if self.flip is not None and self.flip < 0:
            raise ValidationError("flip index must be nonnegative")

    def bit(self, x: int) -> int:
        return 1 if self.flip is not None and x >= self.flip else 0


def lpo_answer(inst: LpoInstance) -> int:
    """0 for the all-zero sequence, 1 if the sequence ever flips."""
    return 0 if inst.flip is None else 1


# ---------------------------------------------------------------------------
# Choice over naturals (desk model: the enumerated set is given outright)


@dataclass(frozen=True)
class CnInstance:
    excluded: frozenset[int]
    universe_bound: int

    def __post_init__(self):
        if not any(x not in self.excluded for x in range(self.universe_bound + 1)):
            raise ValidationError("no admissible point below the universe bound")


def cn_is_solution(inst: CnInstance, x: int) -> bool:
    return x >= 0 and x not in inst.excluded


# ---------------------------------------------------------------------------
# Parity words


def parse_cfi_word(text: str) -> CfiWord:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(p) for p in text.split(","))


def format_cfi_word(word: CfiWord) -> str:
    return ",".join(str(s) for s in word)


def cfi_marks(word: CfiWord) -> Counter:
    """Mark count per color; symbol s > 0 marks color s - 1."""
    return Counter(s - 1 for s in word if s > 0)


def cfi_colors(word: CfiWord) -> frozenset[int]:
    """The set of colors marked at least once."""
    return frozenset(s - 1 for s in word if s > 0)


def cfi_psi(word: CfiWord) -> frozenset[int]:
    """The finite complement of the described cofinite set.

    Returns the set of colors with an odd mark count; the described set is
    the complement of the returned set.
    """
    return frozenset(n for n, c in cfi_marks(word).items() if c % 2 == 1)


def cfi_is_member(word: CfiWord, n: int) -> bool:
    """Membership in the described cofinite set (even mark count)."""
    return cfi_marks(word)[n] % 2 == 0


def cfi_bar(word: CfiWord) -> CfiWord:
    """The length-lex least extension evening out every marked color.

    Closed form: append one mark for each odd-count marked color, in
    increasing color order.  (Asserted against a brute-force length-then-lex
    oracle in the test suite.)
    """
    odd = sorted(cfi_psi(word) & cfi_colors(word))
    return word + tuple(n + 1 for n in odd)


# ---------------------------------------------------------------------------
# Sorting a binary stream by zero count


@dataclass(frozen=True)
class SortInstance:
    stream: EvpStream

    def __post_init__(self):
        if self.stream.alphabet != 2:
            raise ValidationError("sort instances are binary streams")


def sort_eval(inst: SortInstance) -> Optional[int]:
    """None if 0 occurs infinitely often, else the total number of 0s."""
    if 0 in inst.stream.cycle:
        return None
    return sum(1 for s in inst.stream.transient if s == 0)


# ---------------------------------------------------------------------------
# Homogeneity checks for stable colorings


def is_limit_homogeneous(c: StableColoring, L: frozenset[int] | set[int]) -> Optional[int]:
    """The common limit color of the rows in L, or None.

    Empty L returns 0 by convention (degenerate case; callers that care must
    test emptiness themselves).
    """
    if not L:
        return 0
    limits = {c.limit_of_row(x) for x in L}
    return limits.pop() if len(limits) == 1 else None


def is_homogeneous_window(c: StableColoring, H: frozenset[int] | set[int]) -> Optional[int]:
    """The constant value of c on pairs from H, or None if mixed."""
    if len(H) < 2:
        raise ValueError("homogeneity needs at least two elements")
    elems = sorted(H)
    values = {
        c.value(x, y) for i, x in enumerate(elems) for y in elems[i + 1 :]
    }
    return values.pop() if len(values) == 1 else None
