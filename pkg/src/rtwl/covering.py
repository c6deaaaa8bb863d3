"""Covering, fibers, transversals, and the escape property over finite grids.

A candidate backward map is a surjective partial function from a product grid
of color tuples onto N output colors.  The central question is whether some
nonempty proper set S of output colors has the escape property: every set of
grid tuples whose image is exactly S covers a tuple mapping outside S.  By
monotonicity of covering it suffices to check the minimal such sets, the
transversals (one tuple per fiber of S); that reduction is used throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterator, Mapping, Optional

from .streams import ValidationError

Cell = tuple[int, ...]

INCLUSIVE = "inclusive"
STRICT = "strict"


class BudgetExceeded(RuntimeError):
    """A configured enumeration budget was exhausted; carries the space size."""

    def __init__(self, message: str, size: int):
        super().__init__(message)
        self.size = size


@dataclass(frozen=True)
class Dims:
    """Grid dimensions (k_0, ..., k_n), each factor at least 2."""

    ks: tuple[int, ...]

    def __post_init__(self):
        if len(self.ks) < 1:
            raise ValidationError("at least one factor required")
        if any(k < 2 for k in self.ks):
            raise ValidationError("every factor must be at least 2")
        if self.cells > 2**32:
            raise ValidationError("grid too large")

    @property
    def cells(self) -> int:
        n = 1
        for k in self.ks:
            n *= k
        return n

    def tuples(self) -> Iterator[Cell]:
        return itertools.product(*(range(k) for k in self.ks))

    def contains(self, cell: Cell) -> bool:
        return len(cell) == len(self.ks) and all(
            0 <= c < k for c, k in zip(cell, self.ks)
        )


@dataclass(frozen=True)
class StarWitness:
    """A nonempty proper color set with the escape property."""

    colors: frozenset[int]

    def sorted(self) -> list[int]:
        return sorted(self.colors)


@dataclass(frozen=True)
class WitnessSearch:
    """Outcome of a witness search: found / none (exhausted) / budget."""

    status: str
    witness: Optional[StarWitness]
    checked: int


class PsiTable:
    """A surjective partial map from grid tuples to output colors."""

    def __init__(self, dims, n_colors: int, assignment: Mapping[Cell, int]):
        self.dims = dims if isinstance(dims, Dims) else Dims(tuple(dims))
        self.n_colors = n_colors
        assignment = {tuple(c): v for c, v in assignment.items()}
        for cell, value in assignment.items():
            if not self.dims.contains(cell):
                raise ValidationError(f"cell {cell} outside grid {self.dims.ks}")
            if not 0 <= value < n_colors:
                raise ValidationError(f"color {value} out of range")
        if set(assignment.values()) != set(range(n_colors)):
            raise ValidationError("assignment is not surjective")
        self._assignment = assignment
        self._fibers: dict[int, tuple[Cell, ...]] = {}
        for i in range(n_colors):
            self._fibers[i] = tuple(
                sorted(c for c, v in assignment.items() if v == i)
            )

    @property
    def assignment(self) -> Mapping[Cell, int]:
        return MappingProxyType(self._assignment)

    def get(self, cell: Cell) -> Optional[int]:
        return self._assignment.get(tuple(cell))

    def fiber(self, color: int) -> tuple[Cell, ...]:
        return self._fibers[color]

    def fibers(self) -> dict[int, tuple[Cell, ...]]:
        return dict(self._fibers)

    def singleton_colors(self) -> list[int]:
        return [i for i, f in self._fibers.items() if len(f) == 1]

    def is_total(self) -> bool:
        return len(self._assignment) == self.dims.cells

    def cells_key(self) -> tuple[int, ...]:
        """Lex scan of the table; undefined cells encode as -1."""
        return tuple(
            self._assignment.get(cell, -1) for cell in self.dims.tuples()
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PsiTable)
            and self.dims == other.dims
            and self.n_colors == other.n_colors
            and self._assignment == other._assignment
        )

    def __hash__(self):
        return hash((self.dims, self.n_colors, self.cells_key()))

    def __repr__(self):
        return f"PsiTable(dims={self.dims.ks}, n_colors={self.n_colors})"

    # -- grid text format (two-dimensional tables only) --

    def to_grid_text(self) -> str:
        if len(self.dims.ks) != 2:
            raise ValueError("grid text format is for two-dimensional tables")
        k0, k1 = self.dims.ks
        lines = []
        for r in range(k0):
            row = []
            for c in range(k1):
                v = self._assignment.get((r, c))
                row.append("." if v is None else str(v))
            lines.append(" ".join(row))
        return "\n".join(lines)

    @classmethod
    def from_grid_text(cls, text: str, n_colors: Optional[int] = None) -> "PsiTable":
        rows = [line.split() for line in text.strip().splitlines() if line.strip()]
        if not rows:
            raise ValidationError("empty grid")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValidationError("grid rows have unequal lengths")
        assignment = {}
        for r, row in enumerate(rows):
            for c, tok in enumerate(row):
                if tok != ".":
                    assignment[(r, c)] = int(tok)
        if n_colors is None:
            if not assignment:
                raise ValidationError("grid has no assigned cells")
            n_colors = max(assignment.values()) + 1
        return cls(Dims((len(rows), width)), n_colors, assignment)

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims.ks),
            "n_colors": self.n_colors,
            "cells": [[list(c), v] for c, v in sorted(self._assignment.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PsiTable":
        assignment = {tuple(c): v for c, v in data["cells"]}
        return cls(Dims(tuple(data["dims"])), data["n_colors"], assignment)


# ---------------------------------------------------------------------------
# Covering


def covered_set(X, dims) -> frozenset[Cell]:
    """All tuples agreeing with some member of X in every coordinate.

    A tuple b is covered iff for each coordinate m some member of X matches
    b at m, so the covered set is the box product of the projections of X.
    """
    dims = dims if isinstance(dims, Dims) else Dims(tuple(dims))
    X = [tuple(x) for x in X]
    if not X:
        return frozenset()
    for x in X:
        if not dims.contains(x):
            raise ValidationError(f"tuple {x} outside grid")
    projections = [sorted({x[m] for x in X}) for m in range(len(dims.ks))]
    return frozenset(itertools.product(*projections))


def transversals(psi: PsiTable, S) -> Iterator[tuple[Cell, ...]]:
    """One tuple from each fiber of S, in lexicographic order."""
    colors = sorted(S)
    for i in colors:
        if i not in psi.fibers() or not psi.fiber(i):
            raise ValidationError(f"color {i} has no fiber")
    return itertools.product(*(psi.fiber(i) for i in colors))


def transversal_count(psi: PsiTable, S) -> int:
    n = 1
    for i in S:
        n *= len(psi.fiber(i))
    return n


def _escapes(psi: PsiTable, S: frozenset[int], box, mode: str) -> bool:
    for cell in box:
        v = psi.get(cell)
        if mode == INCLUSIVE:
            if v is None or v not in S:
                return True
        else:
            if v is not None and v not in S:
                return True
    return False


def star_holds_for(
    psi: PsiTable,
    S,
    mode: str = INCLUSIVE,
    budget: Optional[int] = None,
) -> bool:
    """Whether every transversal of S covers a tuple escaping S.

    ``inclusive`` mode counts a covered cell where the table is undefined as
    an escape; ``strict`` requires a defined value outside S.  The two modes
    coincide on total tables.
    """
    S = frozenset(S)
    if not S or S >= set(range(psi.n_colors)):
        raise ValidationError("S must be a nonempty proper subset of the colors")
    if mode not in (INCLUSIVE, STRICT):
        raise ValueError(f"unknown escape mode {mode!r}")
    expansions = 0
    for tv in transversals(psi, S):
        expansions += 1
        if budget is not None and expansions > budget:
            raise BudgetExceeded(
                f"transversal budget {budget} exhausted", transversal_count(psi, S)
            )
        box = covered_set(tv, psi.dims)
        if not _escapes(psi, S, box, mode):
            return False
    return True


def find_star_witness(
    psi: PsiTable,
    max_size: Optional[int] = None,
    mode: str = INCLUSIVE,
    budget: Optional[int] = None,
) -> WitnessSearch:
    """Least witness by size then lex among S with |S| <= max_size.

    Distinguishes exhaustion ("none") from budget interruption ("budget").
    """
    if max_size is None:
        max_size = psi.n_colors - 1
    max_size = min(max_size, psi.n_colors - 1)
    checked = 0
    try:
        for size in range(1, max_size + 1):
            for combo in itertools.combinations(range(psi.n_colors), size):
                checked += 1
                if star_holds_for(psi, combo, mode, budget):
                    return WitnessSearch("found", StarWitness(frozenset(combo)), checked)
    except BudgetExceeded:
        return WitnessSearch("budget", None, checked)
    return WitnessSearch("none", None, checked)


# ---------------------------------------------------------------------------
# Bad collections of three fibers (two-dimensional grids)


def is_bad_bruteforce(psi: PsiTable, three, mode: str = INCLUSIVE) -> bool:
    """A three-fiber collection is bad iff its image lacks the escape property."""
    three = frozenset(three)
    if len(three) != 3:
        raise ValidationError("need exactly three colors")
    return not star_holds_for(psi, three, mode)


def is_bad_structural(psi: PsiTable, three) -> bool:
    """Line/rectangle characterization of badness for two-dimensional grids.

    Bad iff the union of the three fibers contains (1) three cells in one row
    or column, one from each fiber, or (2) a rectangle with all four corners
    in the union touching all three fibers.
    """
    three = sorted(frozenset(three))
    if len(three) != 3:
        raise ValidationError("need exactly three colors")
    if len(psi.dims.ks) != 2:
        raise ValidationError("structural test requires a two-dimensional grid")
    fiber_of = {}
    for i in three:
        for cell in psi.fiber(i):
            fiber_of[cell] = i
    rows = sorted({r for r, _ in fiber_of})
    cols = sorted({c for _, c in fiber_of})
    # (1) some row or column meets all three fibers
    for r in rows:
        if len({i for (rr, _), i in fiber_of.items() if rr == r}) == 3:
            return True
    for c in cols:
        if len({i for (_, cc), i in fiber_of.items() if cc == c}) == 3:
            return True
    # (2) a rectangle inside the union touching all three fibers
    for r0, r1 in itertools.combinations(rows, 2):
        for c0, c1 in itertools.combinations(cols, 2):
            corners = [(r0, c0), (r0, c1), (r1, c0), (r1, c1)]
            hit = {fiber_of.get(c) for c in corners}
            if None not in hit and len(hit) == 3:
                return True
    return False


# ---------------------------------------------------------------------------
# Singleton-based witness constructions


ONE_SINGLETON = "one_singleton"
TWO_SINGLETONS = "two_singletons"
BETTER = "better"
AUTO = "auto"


def _verify(psi, colors, mode) -> Optional[StarWitness]:
    witness = StarWitness(frozenset(colors))
    if star_holds_for(psi, witness.colors, mode):
        return witness
    return None


def _one_singleton(psi: PsiTable, mode: str) -> Optional[StarWitness]:
    # Needs a fiber sharing no coordinate value with some singleton; the
    # count N > k0 + k1 - 1 guarantees one exists.
    if len(psi.dims.ks) != 2:
        return None
    for s in psi.singleton_colors():
        (a0, a1) = psi.fiber(s)[0]
        for g, cells in psi.fibers().items():
            if g == s or not cells:
                continue
            if all(x != a0 and y != a1 for x, y in cells):
                witness = _verify(psi, {s, g}, mode)
                if witness is not None:
                    return witness
    return None


def _two_singletons(psi: PsiTable, mode: str) -> Optional[StarWitness]:
    singles = psi.singleton_colors()
    for i, j in itertools.combinations(singles, 2):
        a = psi.fiber(i)[0]
        b = psi.fiber(j)[0]
        if sum(1 for x, y in zip(a, b) if x != y) >= 2:
            witness = _verify(psi, {i, j}, mode)
            if witness is not None:
                return witness
    return None


def _better(psi: PsiTable, mode: str) -> Optional[StarWitness]:
    witness = _two_singletons(psi, mode)
    if witness is not None:
        return witness
    singles = psi.singleton_colors()
    if len(singles) < 3:
        return None
    cells = [psi.fiber(i)[0] for i in singles]
    # All singletons agree except in one coordinate m.
    varying = [
        m
        for m in range(len(psi.dims.ks))
        if len({c[m] for c in cells}) > 1
    ]
    if len(varying) != 1:
        return None
    m = varying[0]
    pattern = cells[0]
    l = len(singles)
    for u, ucells in psi.fibers().items():
        if u in singles or not 0 < len(ucells) < l:
            continue
        if any(
            all(c[i] == pattern[i] for i in range(len(c)) if i != m)
            for c in ucells
        ):
            continue
        used = {c[m] for c in ucells}
        for s, scell in zip(singles, cells):
            if scell[m] not in used:
                witness = _verify(psi, {u, s}, mode)
                if witness is not None:
                    return witness
    return None


def _check_precondition(psi: PsiTable, strategy: str):
    ks = psi.dims.ks
    N = psi.n_colors
    prod = psi.dims.cells
    if strategy == ONE_SINGLETON:
        if len(ks) != 2:
            raise ValidationError("one-singleton strategy needs a 2d grid")
        # Given an observed singleton, N > k0 + k1 - 1 is what the
        # disjoint-fiber count requires.
        if not N > ks[0] + ks[1] - 1:
            raise ValidationError(
                f"precondition N > k0 + k1 - 1 fails: {N} <= {ks[0] + ks[1] - 1}"
            )
    elif strategy == TWO_SINGLETONS:
        if not N > (max(ks) + prod) / 2:
            raise ValidationError(
                f"precondition N > (max k + prod k)/2 fails for N={N}"
            )
    elif strategy == BETTER:
        bound = max((2 + prod) / 2, max(ks) - 1 + prod / 3)
        if not N > bound:
            raise ValidationError(f"precondition N > {bound} fails for N={N}")
    else:
        raise ValueError(f"unknown strategy {strategy!r}")


def singleton_witness(
    psi: PsiTable, strategy: str = AUTO, mode: str = INCLUSIVE
) -> Optional[StarWitness]:
    """Witness built from singleton fibers per the proof strategies.

    A named strategy checks its arithmetic precondition and raises on
    violation; ``auto`` tries every applicable construction and returns the
    first that self-verifies, or None if no configuration exists.  Every
    returned witness has been re-checked with ``star_holds_for``.
    """
    if strategy == AUTO:
        if not psi.singleton_colors():
            return None
        for fn in (_two_singletons, _one_singleton, _better):
            witness = fn(psi, mode)
            if witness is not None:
                return witness
        return None
    _check_precondition(psi, strategy)
    fn = {
        ONE_SINGLETON: _one_singleton,
        TWO_SINGLETONS: _two_singletons,
        BETTER: _better,
    }[strategy]
    return fn(psi, mode)
