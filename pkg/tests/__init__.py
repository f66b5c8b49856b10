"""Tests for __init__.py file."""
