"""Atomic CSV and JSON writers for run artifacts."""
