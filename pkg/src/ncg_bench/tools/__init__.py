"""Command-line tools for ncg-bench."""
