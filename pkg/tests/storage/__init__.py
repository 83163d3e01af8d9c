"""Tests for loading problem files."""
