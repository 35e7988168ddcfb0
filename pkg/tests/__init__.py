"""Tests for stabilizer-ft."""
