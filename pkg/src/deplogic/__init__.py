"""Dependence logic workbench: team semantics, Horn fragments and a polynomial
model checker for Boolean D-Horn formulae over finite successor structures."""

__version__ = "0.1.0"
