"""Tests for tsvar."""
