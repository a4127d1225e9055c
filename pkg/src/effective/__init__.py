"""Adiabatic (time-averaged) slow dynamics with the curvature force."""
