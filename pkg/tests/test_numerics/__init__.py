"""Tests for numerical kernels."""
