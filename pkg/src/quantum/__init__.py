"""Fast-system states, Schrödinger evolution and action–angle variables."""
