"""Executable encode/decode pairs for the constructive reductions.

Each reduction is a pair of pure functions: an encoder from instances of the
source problem to instances of the target, and a decoder turning target
solutions (or the finite data the backward map actually reads) back into
source solutions.  All run on the finitely presented instance classes from
:mod:`rtwl.streams`, so decoders can be validated exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .covering import Dims, PsiTable
from .problems import CfiWord, LpoInstance, cfi_bar, cfi_colors, cfi_marks
from .streams import (
    EvpStream,
    StableColoring,
    StepFunction,
    Transducer,
    ValidationError,
    combine_steps,
    product_streams,
    splice_steps,
    transduce_summary,
)


# ---------------------------------------------------------------------------
# Product pairing


def product_encode(streams: list[EvpStream], ks: tuple[int, ...]) -> EvpStream:
    """Pointwise mixed-radix pairing of one stream per factor."""
    return product_streams(streams, tuple(ks))


def product_decode(a: int, ks: tuple[int, ...]) -> tuple[int, ...]:
    """Mixed-radix digits of a code, most significant factor first."""
    prod = 1
    for k in ks:
        prod *= k
    if not 0 <= a < prod:
        raise ValidationError(f"code {a} out of range for factors {ks}")
    digits = []
    for k in reversed(ks):
        digits.append(a % k)
        a //= k
    return tuple(reversed(digits))


def product_psi_table(ks: tuple[int, ...]) -> PsiTable:
    """The bijective backward table of the product pairing."""
    ks = tuple(ks)
    dims = Dims(ks)
    assignment = {}
    for cell in dims.tuples():
        code = 0
        for v, k in zip(cell, ks):
            code = code * k + v
        assignment[cell] = code
    return PsiTable(dims, dims.cells, assignment)


# ---------------------------------------------------------------------------
# Cascade: many colors from a product of few-color instances


@dataclass(frozen=True)
class CascadeRange:
    """Factor sizes (k_0, ..., k_n) and the color intervals they induce."""

    ks: tuple[int, ...]

    def __post_init__(self):
        if len(self.ks) < 1 or any(k < 2 for k in self.ks):
            raise ValidationError("factors must all be at least 2")

    @property
    def offsets(self) -> tuple[int, ...]:
        """Partial sums: offsets[m] = sum_{i<m} (k_i - 1)."""
        acc, out = 0, [0]
        for k in self.ks:
            acc += k - 1
            out.append(acc)
        return tuple(out)

    @property
    def n_colors(self) -> int:
        return 1 + sum(k - 1 for k in self.ks)


def _argmax_smallest(counts, upper: int) -> int:
    """Index of the maximal count among colors 0..upper, smallest wins ties."""
    best = 0
    for i in range(1, upper + 1):
        if counts[i] > counts[best]:
            best = i
    return best


def cascade_transducers(rng: CascadeRange) -> list[Transducer]:
    """One derived coloring per factor, driven by running occurrence counts.

    The m-th output at position x is the most frequent color among the first
    x + 1 inputs restricted to colors <= offsets[m+1] (smallest wins ties),
    clamped up to offsets[m] when it falls at or below offsets[m].
    """
    offsets = rng.offsets
    n = rng.n_colors

    def make(m: int) -> Transducer:
        upper = offsets[m + 1]
        floor = offsets[m]

        def step(state, sym):
            counts = list(state)
            counts[sym] += 1
            best = _argmax_smallest(counts, upper)
            out = floor if best <= floor else best
            return tuple(counts), out

        return Transducer((0,) * n, step)

    return [make(m) for m in range(len(rng.ks))]


def cascade_forward(c: EvpStream, rng: CascadeRange) -> list[Transducer]:
    if c.alphabet != rng.n_colors:
        raise ValidationError(
            f"stream alphabet {c.alphabet} != cascade colors {rng.n_colors}"
        )
    return cascade_transducers(rng)


def cascade_tail_sets(
    c: EvpStream,
    rng: CascadeRange,
    horizon: Optional[int] = None,
    window: Optional[int] = None,
) -> list[frozenset[int]]:
    """Empirical tail-window color sets of the derived colorings."""
    return [
        transduce_summary(c, t, horizon, window) for t in cascade_forward(c, rng)
    ]


def cascade_exact_limits(c: EvpStream, rng: CascadeRange) -> list[int]:
    """Eventual derived colors for an eventually constant input stream.

    Once the constant tail color overtakes every frozen transient count the
    outputs never change again, which happens within 2|transient| + 2 steps.
    """
    if not c.is_eventually_constant():
        raise ValidationError("exact limits require an eventually constant stream")
    horizon = 2 * len(c.transient) + 3
    outs = []
    for t in cascade_forward(c, rng):
        last = None
        for out in t.outputs(c, horizon):
            last = out
        outs.append(last)
    return outs


def cascade_backward(a: tuple[int, ...], rng: CascadeRange) -> int:
    """Scan components from the last factor down to the first.

    The first component above its interval floor is returned; if every
    component sits at its floor the answer is color 0.
    """
    offsets = rng.offsets
    if len(a) != len(rng.ks):
        raise ValidationError("one component per factor required")
    for m, am in enumerate(a):
        if not offsets[m] <= am <= offsets[m + 1]:
            raise ValidationError(
                f"component {am} outside [{offsets[m]}, {offsets[m + 1]}]"
            )
    for m in range(len(a) - 1, -1, -1):
        if a[m] != offsets[m]:
            return a[m]
    return 0


def cascade_psi_table(rng: CascadeRange) -> PsiTable:
    """The cascade backward map materialized over the 0-based grid."""
    dims = Dims(rng.ks)
    offsets = rng.offsets
    assignment = {}
    for cell in dims.tuples():
        shifted = tuple(offsets[m] + v for m, v in enumerate(cell))
        assignment[cell] = cascade_backward(shifted, rng)
    return PsiTable(dims, rng.n_colors, assignment)


# ---------------------------------------------------------------------------
# Flip-detection codings into stable colorings


def _par(x: int) -> int:
    return x % 2


def lpo_balanced_encode(S: LpoInstance, explicit_rows: Optional[int] = None) -> StableColoring:
    """c(x, y) = par(x) while no flip has occurred below y, else 1 - par(x).

    The alternating-parity limit pattern is materialized on the explicit
    window; rows beyond it are truncated to the constant default row.
    """
    n = S.flip
    if explicit_rows is None:
        explicit_rows = (n + 2 if n is not None else 0) + 8
    rows = []
    for x in range(explicit_rows):
        if n is None:
            rows.append(StepFunction.constant(_par(x)))
        else:
            # The flip at index n is visible from y = n + 1 on.
            rows.append(StepFunction(_par(x), ((n + 1, 1 - _par(x)),)))
    default = 0 if n is None else 1
    return StableColoring(2, tuple(rows), default)


def lpo_balanced_decode(c: StableColoring, x0: int, x1: int) -> int:
    """0 iff the pair value equals the parity of the smaller element."""
    if not x0 < x1:
        raise ValidationError("need x0 < x1")
    if _par(x0) != _par(x1):
        raise ValidationError("homogeneous-set elements must share parity")
    return 0 if c.value(x0, x1) == _par(x0) else 1


def lpo_srt3_encode(S: LpoInstance, c: StableColoring) -> StableColoring:
    """d(x, y) = c(x, y) when S agrees at x and y, else the fresh color 2."""
    if c.k != 2:
        raise ValidationError("base coloring must have 2 colors")
    n = S.flip
    if n is None:
        return StableColoring(3, c.rows, c.default_limit)
    bound = max(len(c.rows), n)
    rows = []
    for x in range(bound):
        base = c.row(x)
        if x < n:
            # S(x) = 0; S(y) flips at y = n.
            low = tuple((p, v) for p, v in base.steps if p < n)
            rows.append(StepFunction(base.initial, low + ((n, 2),)).normalized())
        else:
            rows.append(base)
    return StableColoring(3, tuple(rows), c.default_limit)


def lpo_srt3_decode(S: LpoInstance, min_h: int) -> tuple[int, bool]:
    """Answer bit plus a precondition flag.

    The bit is 1 iff the flip happens at or below the least homogeneous-set
    element.  A least element below the flip cannot start a 0/1-homogeneous
    set of the encoded coloring; that violation is flagged (second component
    False) and the bit defaults to 0.
    """
    ok = not (S.flip is not None and min_h < S.flip)
    bit = 1 if S.flip is not None and S.flip <= min_h else 0
    return bit, ok


def lpo_wub_encode(S: LpoInstance) -> StableColoring:
    """c(x, y) = 1 when S agrees at x and y, else 0; escape-color witness 0."""
    n = S.flip
    if n is None:
        return StableColoring.constant(2, 1)
    rows = tuple(StepFunction(1, ((n, 0),)) for _ in range(n))
    return StableColoring(2, rows, 1)


LPO_WUB_WITNESS = 0


def lpo_wub_decode(S: LpoInstance, min_l: int) -> int:
    """1 iff the sequence flips at or below the least solution element.

    (Decoded consistently with the construction: the no-flip instance encodes
    to the constant-1 coloring, whose solutions all answer 0.)
    """
    return 1 if S.flip is not None and S.flip <= min_l else 0


def wub_merge(
    c: StableColoring, i_c: int, d: StableColoring, i_d: int
) -> StableColoring:
    """e(x, y) = i_c when c hits i_c or d hits i_d, else c(x, y)."""
    if not 0 <= i_c < c.k:
        raise ValidationError("witness color out of range for c")
    if d.k != 2 or not 0 <= i_d < 2:
        raise ValidationError("second coloring must be binary with a valid witness")
    op = lambda cv, dv: i_c if (cv == i_c or dv == i_d) else cv
    bound = max(len(c.rows), len(d.rows))
    rows = tuple(
        combine_steps(c.row(x), d.row(x), op) for x in range(bound)
    )
    default = op(c.default_limit, d.default_limit)
    return StableColoring(c.k, rows, default)


def dchar_encode(
    S: LpoInstance, c: StableColoring, ell: StepFunction
) -> StableColoring:
    """d(x, y) = c(x, y) when S agrees at x and y, else ell(y)."""
    i = ell.limit()
    if not 0 <= i < c.k:
        raise ValidationError("ell limit outside color range")
    if c.default_limit == i:
        # A witness of thin-unbalancing cannot be the limit of cofinitely
        # many rows; checkable on the presentation.
        raise ValidationError(
            "ell limit equals the default row limit: not a witness on explicit data"
        )
    n = S.flip
    if n is None:
        return c
    bound = max(len(c.rows), n)
    rows = []
    for x in range(bound):
        base = c.row(x)
        if x < n:
            rows.append(splice_steps(base, ell, n))
        else:
            rows.append(base)
    return StableColoring(c.k, tuple(rows), c.default_limit)


def dwub_to_cfi(
    c: StableColoring, ell: StepFunction, validate: bool = True
) -> StableColoring:
    """d(x, y) = 1 iff c(x, y) = 1 - ell(y); almost all rows must limit to 1.

    With ``validate`` the result is rejected unless its default row limits to
    1 (the finitely-presented check that the input was a genuine instance).
    """
    if c.k != 2:
        raise ValidationError("input coloring must be binary")
    if ell.limit() not in (0, 1):
        raise ValidationError("ell must be binary")
    op = lambda cv, lv: 1 if cv == 1 - lv else 0
    bound = max(len(c.rows), ell.settle_point() + 1)
    rows = tuple(combine_steps(c.row(x), ell, op) for x in range(bound))
    default = op(c.default_limit, ell.limit())
    d = StableColoring(2, rows, default)
    if validate and default != 1:
        raise ValidationError(
            "default row limit is 0: input is not thin-unbalanced as claimed"
        )
    return d


# ---------------------------------------------------------------------------
# Parity-word reductions


def cfi_relabel(p: CfiWord, sigma: CfiWord) -> CfiWord:
    """Prefix with the evened-out sigma and shift p's colors above sigma's.

    Colors of p are relabeled by n -> n + 1 + max(colors of sigma), a
    bijection onto the colors above sigma's; empty sigma is the identity.
    """
    shift = cfi_relabel_shift(sigma)
    shifted = tuple(0 if s == 0 else s + shift for s in p)
    return cfi_bar(sigma) + shifted


def cfi_relabel_shift(sigma: CfiWord) -> int:
    colors = cfi_colors(sigma)
    return 0 if not colors else 1 + max(colors)


def cfi_meet_tail(p: CfiWord, k: int) -> CfiWord:
    """Intersect the described set with {n : n > k} by marking small evens odd."""
    if k < 0:
        raise ValidationError("k must be nonnegative")
    marks = cfi_marks(p)
    extra = tuple(n + 1 for n in range(k + 1) if marks[n] % 2 == 0)
    return tuple(p) + extra


# ---------------------------------------------------------------------------
# Trace plumbing for the CLI


@dataclass
class ReductionTrace:
    name: str
    instance: object
    encoded: object
    solution: object
    decoded: object
    valid: Optional[bool] = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "instance": _plain(self.instance),
            "encoded": _plain(self.encoded),
            "solution": _plain(self.solution),
            "decoded": _plain(self.decoded),
            "valid": self.valid,
            "notes": list(self.notes),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def _plain(obj):
    if isinstance(obj, EvpStream):
        return {"stream": obj.to_text(), "alphabet": obj.alphabet}
    if isinstance(obj, StableColoring):
        return obj.to_json()
    if isinstance(obj, LpoInstance):
        return {"flip": obj.flip}
    if isinstance(obj, (frozenset, set)):
        return sorted(obj)
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    return obj
