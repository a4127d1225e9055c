"""Exact (unapproximated) joint evolution of the fast and slow subsystems."""
