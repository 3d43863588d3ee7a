"""Hot-kernel selection: compiled extension when built, pure Python otherwise.

``indepax._kernel.active`` is the module actually used by the evaluator and
the partition refiner.  Set INDEPAX_FORCE_PURE=1 to pin the fallback (used by
the benchmark and the parity tests).
"""

import os

from . import pure
from .program import (OP_AND, OP_ATOM, OP_EQ, OP_EXISTS, OP_FORALL, OP_NOT,
                      OP_OR, Program)

compiled = None
if not os.environ.get("INDEPAX_FORCE_PURE"):
    try:
        from . import _core as compiled  # type: ignore[no-redef]
    except ImportError:
        compiled = None

active = compiled if compiled is not None else pure

BACKEND = active.BACKEND

__all__ = [
    "Program", "OP_ATOM", "OP_EQ", "OP_NOT", "OP_AND", "OP_OR",
    "OP_EXISTS", "OP_FORALL", "active", "pure", "compiled", "BACKEND",
]
