"""Numerical laboratory for centered rarefaction waves in 2D isentropic Euler flow."""

from .gas_model import GasLaw, PrimitiveState, ConservedState, InvariantState, ModelError

__all__ = ["GasLaw", "PrimitiveState", "ConservedState", "InvariantState", "ModelError"]
__version__ = "0.1.0"
