"""Tests for test_cases module."""
