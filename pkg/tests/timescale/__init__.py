"""Tests for the timescale package."""
