"""Tests for the lqrecover library."""
