"""Test suite for gentlenet."""
