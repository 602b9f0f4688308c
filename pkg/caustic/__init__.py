"""Euler characteristic relations for Lagrangian multisingularities"""
__version__ = "1.0.0"
