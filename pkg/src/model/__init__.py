"""Hybrid-model interface, spin–dipole example model and eigen-solvers."""
