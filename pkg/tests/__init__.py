"""Tests for s3nmf."""
