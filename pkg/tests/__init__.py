"""Test suite per Cerca Dai Testi."""
