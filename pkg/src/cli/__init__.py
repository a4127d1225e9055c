"""Command-line front end: config loading, scenario runs and artifacts."""
