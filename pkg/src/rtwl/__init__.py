"""Verification and search toolkit for covering properties of finite
color tables and for executable encode/decode reductions on eventually
periodic streams and stable colorings."""

from .streams import EvpStream, StableColoring, StepFunction, ValidationError
from .covering import Dims, PsiTable, StarWitness, BudgetExceeded
from .kernel import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BudgetExceeded",
    "Dims",
    "EvpStream",
    "PsiTable",
    "StableColoring",
    "StarWitness",
    "StepFunction",
    "ValidationError",
    "__version__",
]
