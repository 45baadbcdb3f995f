"""Exact rank-2 lattice and rational-number primitives.

Everything in this package is integer or rational; there is no floating
point anywhere.  Rationals are `fractions.Fraction` (always reduced, with
positive denominator), lattice vectors are plain `(x, y)` integer tuples.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

Rat = Fraction
Vec2 = tuple[int, int]


def rat_from_str(s: str) -> Rat:
    """Parse "p/q" or "p" into a reduced rational."""
    return Fraction(s.strip())


def rat_to_str(v) -> str:
    """Serialize a rational as "p/q", or "p" when the denominator is 1."""
    v = Fraction(v)
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def mu(v) -> int:
    """Smallest positive integer k with k*v integral (the reduced denominator)."""
    return Fraction(v).denominator


def primitive(v: Vec2) -> Vec2:
    """Divide a nonzero integer vector by the gcd of its coordinates."""
    x, y = v
    if x == 0 and y == 0:
        raise ValueError("zero vector has no primitive generator")
    g = gcd(abs(x), abs(y))
    return (x // g, y // g)


def det2(u: Vec2, v: Vec2) -> int:
    return u[0] * v[1] - u[1] * v[0]


def add2(u: Vec2, v: Vec2) -> Vec2:
    return (u[0] + v[0], u[1] + v[1])


def sub2(u: Vec2, v: Vec2) -> Vec2:
    return (u[0] - v[0], u[1] - v[1])


def neg2(u: Vec2) -> Vec2:
    return (-u[0], -u[1])


def smul2(c: int, u: Vec2) -> Vec2:
    return (c * u[0], c * u[1])


def cf_eval(c: Sequence[int]) -> Optional[Rat]:
    """Evaluate the continued fraction c_1 - 1/(c_2 - 1/(... c_k)).

    Returns None ("undefined") if a division by zero occurs at any stage
    of the right-to-left recursion.
    """
    if len(c) == 0:
        raise ValueError("continued fraction of an empty list")
    acc: Optional[Rat] = Fraction(c[-1])
    for ci in reversed(c[:-1]):
        if acc == 0:
            return None
        acc = Fraction(ci) - 1 / acc
    return acc


def ray_sequence(b: Sequence[int]) -> list[Vec2]:
    """Rays rho_0..rho_{n-1} of the recurrence rho_{i+1} = b_i*rho_i - rho_{i-1},
    anchored at rho_0 = (1,0), rho_1 = (0,1).  No validity checks here."""
    n = len(b)
    rays: list[Vec2] = [(1, 0), (0, 1)]
    for i in range(1, n - 1):
        rays.append(sub2(smul2(b[i], rays[i]), rays[i - 1]))
    return rays[:n]


def alpha_gamma(b: Sequence[int]) -> tuple[int, int]:
    """Index alpha with rho_alpha = -rho_0 and the defect gamma = sum(3-b_i) - 3
    over 1 <= i < alpha.

    Requires a smooth complete b-sequence of length >= 4 with b_0 < 0.
    Locates alpha via ray reconstruction and cross-checks it against the
    continued-fraction characterization [b_1,...,b_{alpha-1}] = 0.
    """
    n = len(b)
    if n < 4:
        raise ValueError("need at least 4 entries")
    if b[0] >= 0:
        raise ValueError("b_0 must be negative")
    rays = ray_sequence(b)
    hits = [i for i in range(2, n - 1) if rays[i] == neg2(rays[0])]
    if len(hits) != 1:
        raise ValueError("no unique antipodal ray; not a valid b-sequence")
    alpha = hits[0]
    # independent route: the continued fraction must vanish exactly there
    cf = cf_eval(b[1:alpha]) if alpha > 2 else Fraction(b[1])
    assert cf == 0, "ray and continued-fraction routes disagree"
    gamma = sum(3 - b[i] for i in range(1, alpha)) - 3
    return alpha, gamma
