"""Tests for the expr package."""
