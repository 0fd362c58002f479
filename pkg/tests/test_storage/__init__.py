"""Tests for result files, field dumps and grid files."""
