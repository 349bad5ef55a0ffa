"""
Tests for gapstress.
"""

