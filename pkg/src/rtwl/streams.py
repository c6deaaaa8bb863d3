"""Eventually periodic streams and finitely presented stable pair-colorings.

Every "infinite" object in this package is restricted to a class with an exact
finite presentation: symbol streams are eventually periodic, and pair-colorings
are stable with eventually constant rows given as step functions.  Under that
restriction the semantic questions the rest of the toolkit cares about ("which
symbols appear infinitely often", "what is lim_y c(x,y)") are decidable by
inspecting the presentation, so tests can use exact oracles.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from math import lcm
from typing import Callable, Iterator, Optional


class ValidationError(ValueError):
    """A finite presentation violates its structural invariants."""


# ---------------------------------------------------------------------------
# Eventually periodic streams


@dataclass(frozen=True)
class EvpStream:
    """A sequence that is a finite transient followed by a repeating cycle."""

    transient: tuple[int, ...]
    cycle: tuple[int, ...]
    alphabet: int

    def __post_init__(self):
        if self.alphabet < 1:
            raise ValidationError("alphabet must be positive")
        if len(self.cycle) < 1:
            raise ValidationError("cycle must be nonempty")
        for sym in (*self.transient, *self.cycle):
            if not 0 <= sym < self.alphabet:
                raise ValidationError(
                    f"symbol {sym} outside alphabet of size {self.alphabet}"
                )

    @classmethod
    def constant(cls, symbol: int, alphabet: int) -> "EvpStream":
        return cls((), (symbol,), alphabet)

    @classmethod
    def parse(cls, text: str, alphabet: Optional[int] = None) -> "EvpStream":
        """Parse the ``transient|cycle`` literal, e.g. ``0,0|2,1``.

        The transient part may be empty (``|2`` is the constant-2 stream).
        Extra ``|`` separators are tolerated; the last field is the cycle.
        """
        chunks = text.split("|")
        if len(chunks) < 2:
            raise ValidationError(f"stream literal needs a '|': {text!r}")
        transient = _parse_symbols(chunks[0])
        cycle = _parse_symbols(chunks[-1])
        if not cycle:
            raise ValidationError(f"stream literal has empty cycle: {text!r}")
        if alphabet is None:
            alphabet = max((*transient, *cycle)) + 1
        return cls(transient, cycle, alphabet)

    def to_text(self) -> str:
        fmt = lambda seq: ",".join(str(s) for s in seq)
        return f"{fmt(self.transient)}|{fmt(self.cycle)}"

    def eval_at(self, i: int) -> int:
        """Value at position ``i``."""
        if i < 0:
            raise ValueError("negative position")
        t = len(self.transient)
        if i < t:
            return self.transient[i]
        return self.cycle[(i - t) % len(self.cycle)]

    def prefix(self, n: int) -> list[int]:
        return [self.eval_at(i) for i in range(n)]

    def infinitely_often(self) -> frozenset[int]:
        """The symbols occurring infinitely often: exactly the cycle symbols."""
        return frozenset(self.cycle)

    def is_eventually_constant(self) -> bool:
        return len(set(self.cycle)) == 1


def _parse_symbols(chunk: str) -> tuple[int, ...]:
    chunk = chunk.strip()
    if not chunk:
        return ()
    try:
        return tuple(int(p) for p in chunk.split(","))
    except ValueError as exc:
        raise ValidationError(f"bad symbol list {chunk!r}") from exc


# ---------------------------------------------------------------------------
# Transducers


@dataclass(frozen=True)
class Transducer:
    """A one-in/one-out state machine: step(state, symbol) -> (state, output)."""

    initial: object
    step: Callable[[object, int], tuple[object, int]]

    def outputs(self, stream: EvpStream, horizon: int) -> Iterator[int]:
        state = self.initial
        for i in range(horizon):
            state, out = self.step(state, stream.eval_at(i))
            yield out


def identity_transducer() -> Transducer:
    return Transducer(None, lambda state, sym: (state, sym))


def default_horizon(stream: EvpStream) -> int:
    return 20 * (len(stream.transient) + len(stream.cycle)) + 200


def default_window(stream: EvpStream) -> int:
    return 2 * len(stream.cycle) + 20


def transduce_summary(
    stream: EvpStream,
    transducer: Transducer,
    horizon: Optional[int] = None,
    window: Optional[int] = None,
) -> frozenset[int]:
    """Run ``transducer`` over ``stream`` and collect the last ``window`` outputs.

    This is an empirical approximation to the infinitely-often set of the
    output sequence; it is exact once the output has entered its periodic tail
    before position ``horizon - window``.
    """
    if horizon is None:
        horizon = default_horizon(stream)
    if window is None:
        window = default_window(stream)
    if not (horizon > window > 0):
        raise ValueError(f"need horizon > window > 0, got {horizon}, {window}")
    tail: list[int] = []
    for i, out in enumerate(transducer.outputs(stream, horizon)):
        if i >= horizon - window:
            tail.append(out)
    return frozenset(tail)


# ---------------------------------------------------------------------------
# Step functions (eventually constant sequences) and stable colorings


@dataclass(frozen=True)
class StepFunction:
    """An eventually constant function of one variable.

    The value is ``initial`` before the first step position; a step ``(p, v)``
    means the value is ``v`` from position ``p`` onwards (until the next step).
    """

    initial: int
    steps: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        positions = [p for p, _ in self.steps]
        if any(b <= a for a, b in zip(positions, positions[1:])):
            raise ValidationError("step positions must be strictly increasing")

    @classmethod
    def constant(cls, value: int) -> "StepFunction":
        return cls(value, ())

    def eval(self, y: int) -> int:
        idx = bisect_right([p for p, _ in self.steps], y) - 1
        return self.steps[idx][1] if idx >= 0 else self.initial

    def limit(self) -> int:
        return self.steps[-1][1] if self.steps else self.initial

    def settle_point(self) -> int:
        """Least position from which the function is constant."""
        return self.steps[-1][0] if self.steps else 0

    def normalized(self) -> "StepFunction":
        """Drop steps that do not change the value."""
        steps = []
        cur = self.initial
        for p, v in self.steps:
            if v != cur:
                steps.append((p, v))
                cur = v
        return StepFunction(self.initial, tuple(steps))


def combine_steps(
    f: StepFunction, g: StepFunction, op: Callable[[int, int], int]
) -> StepFunction:
    """Pointwise combination ``y -> op(f(y), g(y))`` as a step function."""
    positions = sorted({p for p, _ in f.steps} | {p for p, _ in g.steps})
    initial = op(f.initial, g.initial)
    steps = tuple((p, op(f.eval(p), g.eval(p))) for p in positions)
    return StepFunction(initial, steps).normalized()


def splice_steps(f: StepFunction, g: StepFunction, cut: int) -> StepFunction:
    """The step function equal to ``f`` below ``cut`` and to ``g`` from ``cut`` on."""
    low = tuple((p, v) for p, v in f.steps if p < cut)
    high = [(cut, g.eval(cut))]
    high += [(p, v) for p, v in g.steps if p > cut]
    return StepFunction(f.initial, low + tuple(high)).normalized()


@dataclass(frozen=True)
class StableColoring:
    """A stable pair-coloring c(x, y), x < y, with eventually constant rows.

    Rows below ``len(rows)`` are explicit step functions of y; every further
    row is constant at ``default_limit``.
    """

    k: int
    rows: tuple[StepFunction, ...]
    default_limit: int

    def __post_init__(self):
        if not 0 <= self.default_limit < self.k:
            raise ValidationError("default_limit outside color range")
        for row in self.rows:
            values = [row.initial] + [v for _, v in row.steps]
            if any(not 0 <= v < self.k for v in values):
                raise ValidationError("row value outside color range")

    @classmethod
    def constant(cls, k: int, color: int) -> "StableColoring":
        return cls(k, (), color)

    def row(self, x: int) -> StepFunction:
        if x < len(self.rows):
            return self.rows[x]
        return StepFunction.constant(self.default_limit)

    def value(self, x: int, y: int) -> int:
        if not 0 <= x < y:
            raise ValueError(f"coloring defined on pairs x < y, got ({x}, {y})")
        return self.row(x).eval(y)

    def limit_of_row(self, x: int) -> int:
        """The eventual value lim_y c(x, y)."""
        return self.row(x).limit()

    def limits(self, upto: int) -> list[int]:
        return [self.limit_of_row(x) for x in range(upto)]

    def settle_point(self) -> int:
        """Position from which every explicit row is constant."""
        return max((r.settle_point() for r in self.rows), default=0)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "rows": [
                {"initial": r.initial, "steps": [list(s) for s in r.steps]}
                for r in self.rows
            ],
            "default_limit": self.default_limit,
        }

    @classmethod
    def from_json(cls, data: dict) -> "StableColoring":
        rows = tuple(
            StepFunction(r["initial"], tuple((p, v) for p, v in r["steps"]))
            for r in data["rows"]
        )
        return cls(data["k"], rows, data["default_limit"])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def product_streams(streams: list[EvpStream], ks: tuple[int, ...]) -> EvpStream:
    """Pointwise mixed-radix pairing of component streams (most significant first)."""
    if len(streams) != len(ks):
        raise ValidationError("one stream per factor required")
    for s, k in zip(streams, ks):
        if s.alphabet != k:
            raise ValidationError(f"stream alphabet {s.alphabet} != factor {k}")
    t = max((len(s.transient) for s in streams), default=0)
    cyc = lcm(*(len(s.cycle) for s in streams))

    def code(x: int) -> int:
        acc = 0
        for s, k in zip(streams, ks):
            acc = acc * k + s.eval_at(x)
        return acc

    alphabet = 1
    for k in ks:
        alphabet *= k
    transient = tuple(code(x) for x in range(t))
    cycle = tuple(code(t + i) for i in range(cyc))
    return EvpStream(transient, cycle, alphabet)
