"""Tests for the inverse package."""
