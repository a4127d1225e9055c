"""Tests for hybrid-berry-force."""
