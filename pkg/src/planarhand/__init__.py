"""Planar compliant-hand manipulation: simulator, skills, funnels, planner."""

__version__ = "0.1.0"
