"""End-to-end tests for recforge."""
