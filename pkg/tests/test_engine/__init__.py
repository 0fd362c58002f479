"""Tests for the analysis engine."""
