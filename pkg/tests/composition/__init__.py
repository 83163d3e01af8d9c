"""Tests for the composition package."""
