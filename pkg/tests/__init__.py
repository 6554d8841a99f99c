"""Tests for g2glue."""
