"""Colored Jones polynomials of cables and the strong AJ conjecture."""
