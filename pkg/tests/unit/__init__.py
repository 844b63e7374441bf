"""Unit tests for recforge."""
