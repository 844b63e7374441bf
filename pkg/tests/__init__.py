"""Test suite for recforge."""
