"""Model parameters (k, n, d) with exact rational k.

The bipartite model has a left side Y of n vertices and a right side Z of
k*n vertices; every y in Y has out-degree k*d and every z in Z has
in-degree d.  k is kept as a reduced fraction so kn and kd stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DExceedsN, KdExceedsN, NonIntegerKD, NonIntegerKN


@dataclass(frozen=True)
class GraphParams:
    """Validated parameters of the biregular model.  Construct via validate_params."""

    k_num: int
    k_den: int
    n: int
    d: int

    @property
    def k(self) -> Fraction:
        return Fraction(self.k_num, self.k_den)

    @property
    def kn(self) -> int:
        """|Z|, exact."""
        return self.k_num * self.n // self.k_den

    @property
    def kd(self) -> int:
        """Out-degree of every y in Y, exact."""
        return self.k_num * self.d // self.k_den

    @property
    def edge_count(self) -> int:
        return self.kd * self.n

    def __str__(self) -> str:
        return f"G({self.k_num}/{self.k_den}, {self.n}, {self.d})"


def validate_params(k_num: int, k_den: int, n: int, d: int) -> GraphParams:
    """Normalize and validate (k, n, d); raises a named error otherwise.

    Constraints: kn and kd integral, 1 <= d <= n and kd <= n.
    """
    for name, value in (("k_num", k_num), ("k_den", k_den), ("n", n), ("d", d)):
        if not isinstance(value, int) or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value!r}")
    g = math.gcd(k_num, k_den)
    k_num, k_den = k_num // g, k_den // g
    if (k_num * n) % k_den != 0:
        raise NonIntegerKN(f"k*n = {k_num}*{n}/{k_den} is not an integer")
    if (k_num * d) % k_den != 0:
        raise NonIntegerKD(f"k*d = {k_num}*{d}/{k_den} is not an integer")
    if d > n:
        raise DExceedsN(f"d = {d} exceeds n = {n}")
    kd = k_num * d // k_den
    if kd > n:
        raise KdExceedsN(f"kd = {kd} exceeds n = {n}")
    return GraphParams(k_num, k_den, n, d)
