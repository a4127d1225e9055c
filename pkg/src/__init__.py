"""Hybrid Berry force: exact and adiabatic dynamics of quantum-classical hybrids."""

__version__ = "0.1.0"
