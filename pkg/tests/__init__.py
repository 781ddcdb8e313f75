"""Tests for spectral-ssl."""
