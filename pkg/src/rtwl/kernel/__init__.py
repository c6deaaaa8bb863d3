"""Hot-loop kernels for the pairing sweep, with a compiled fast path.

The compiled extension is used when importable; setting ``RTWL_PURE=1`` in
the environment forces the pure-Python implementation.  Both expose the same
``sweep_pairings`` contract and are cross-checked in the test suite.
"""

import os

BACKEND = "python"

if not os.environ.get("RTWL_PURE"):
    try:
        from ._sweep_cy import sweep_pairings  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from ._sweep_py import sweep_pairings  # noqa: F401

from ._sweep_py import (  # noqa: F401
    bad_triple_count,
    pairing_count,
    pairing_fibers_from_index,
    sweep_pairings_py,
    triple_count,
)
