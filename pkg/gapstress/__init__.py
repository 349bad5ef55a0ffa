"""
gapstress - stress concentration between nearly touching rigid inclusions.

Closed-form asymptotics for the Lamé system with two close-to-touching rigid
inclusions, checked against a 2D finite-element oracle.
"""

__version__ = "0.1.0"
__author__ = "gapstress developers"
