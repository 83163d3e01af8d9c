"""Tests for the variational package."""
