"""Tests for the command implementations."""
