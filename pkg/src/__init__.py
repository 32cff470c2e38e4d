"""Transverse Solver package."""
