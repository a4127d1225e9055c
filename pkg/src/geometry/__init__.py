"""Berry connection, curvature and loop phases over the particle plane."""
