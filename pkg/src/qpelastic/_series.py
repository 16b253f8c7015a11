"""Small helpers for geometric-polynomial tail sums."""

from __future__ import annotations


def geom_poly_sum(a: float, b: float, q: float, p: int) -> float:
    """sum_{j>=0} (a + b j)^p q^j for p in {0, 1, 2} and 0 <= q < 1."""
    if not 0.0 <= q < 1.0:
        return float("inf")
    one = 1.0 - q
    if p == 0:
        return 1.0 / one
    if p == 1:
        return a / one + b * q / one**2
    if p == 2:
        return a * a / one + 2 * a * b * q / one**2 + b * b * q * (1 + q) / one**3
    raise ValueError("p must be 0, 1 or 2")
