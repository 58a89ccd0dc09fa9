"""Truncated su(1,1) discrete-series operators, conformal time operators and their residual checks."""
from .matcore import OperatorMatrix, Window
from .records import ResidualRecord, Tier
from .su11 import Sector, sector_from_g, sector_from_k

__all__ = ["OperatorMatrix", "Window", "ResidualRecord", "Tier", "Sector",
           "sector_from_g", "sector_from_k"]
__version__ = "0.1.0"
