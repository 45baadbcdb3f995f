"""Smooth complete toric surfaces from cyclic b-sequences.

A surface is encoded by the negated self-intersection numbers
(b_0,...,b_{n-1}) of its invariant divisors in counterclockwise order.
Rays are reconstructed from the recurrence b_i*rho_i = rho_{i-1} + rho_{i+1}
anchored at rho_0 = (1,0), rho_1 = (0,1); every smooth complete fan is
lattice-equivalent to one in this position.

Divisor classes live in the cokernel of M -> Z^n, m |-> (<rho_i, m>)_i.
Because of the anchoring, the first two coordinates of any divisor can be
cleared by a principal divisor, so a class is the integer vector of the
remaining n-2 coefficients.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from exsys.lattice import det2, ray_sequence, smul2, sub2


class InvalidSurfaceError(ValueError):
    """The b-sequence does not define a smooth complete toric surface."""


class ToricSurface:
    """Immutable smooth complete toric surface given by its b-sequence."""

    __slots__ = ("b", "rays", "n", "rank", "_imat", "_kcoords")

    def __init__(self, b: Sequence[int]):
        b = tuple(int(x) for x in b)
        n = len(b)
        if n < 3:
            raise InvalidSurfaceError("need at least 3 rays")
        if sum(b) != 3 * n - 12:
            raise InvalidSurfaceError(
                f"sum {sum(b)} != {3 * n - 12}: not a smooth complete surface")
        rays = ray_sequence(b)
        if sub2(smul2(b[n - 1], rays[n - 1]), rays[n - 2]) != rays[0]:
            raise InvalidSurfaceError("ray recurrence does not close up")
        if sub2(smul2(b[0], rays[0]), rays[n - 1]) != rays[1]:
            raise InvalidSurfaceError("ray recurrence does not close up")
        if len(set(rays)) != n:
            raise InvalidSurfaceError("rays are not pairwise distinct")
        # each consecutive pair spans a smooth cone; the recurrence preserves
        # the determinant, so checking one step of completeness is the winding
        wind = 0
        for i in range(n):
            u, v = rays[i], rays[(i + 1) % n]
            if det2(u, v) != 1:
                raise InvalidSurfaceError("consecutive rays not unimodular")
            if u == rays[0] or (det2(u, rays[0]) > 0 and det2(rays[0], v) > 0):
                wind += 1
        if wind != 1:
            raise InvalidSurfaceError("rays wrap the plane %d times" % wind)
        self.b = b
        self.rays = tuple(rays)
        self.n = n
        self.rank = n - 2
        self._imat = None
        self._kcoords = None

    def __repr__(self):
        return f"ToricSurface{self.b}"

    def __eq__(self, other):
        return isinstance(other, ToricSurface) and self.b == other.b

    def __hash__(self):
        return hash(self.b)

    # -- divisors and classes ------------------------------------------------

    def class_of(self, coeffs: Sequence[int]) -> "DivisorClass":
        """Class of the invariant divisor sum(coeffs[i] * D_i)."""
        if len(coeffs) != self.n:
            raise ValueError("coefficient vector has wrong length")
        a0, a1 = coeffs[0], coeffs[1]
        coords = tuple(
            coeffs[i] - a0 * self.rays[i][0] - a1 * self.rays[i][1]
            for i in range(2, self.n))
        return DivisorClass(self, coords)

    def class_of_ray(self, i: int) -> "DivisorClass":
        coeffs = [0] * self.n
        coeffs[i % self.n] = 1
        return self.class_of(coeffs)

    def zero_class(self) -> "DivisorClass":
        return DivisorClass(self, (0,) * self.rank)

    def representative(self, c: "DivisorClass") -> tuple[int, ...]:
        """Canonical invariant divisor representing the class."""
        return (0, 0) + c.coords

    def intersection_matrix(self) -> tuple[tuple[int, ...], ...]:
        if self._imat is None:
            n = self.n
            m = [[0] * n for _ in range(n)]
            for i in range(n):
                m[i][i] = -self.b[i]
                m[i][(i + 1) % n] += 1
                m[i][(i - 1) % n] += 1
            self._imat = tuple(tuple(r) for r in m)
        return self._imat

    def canonical(self) -> "DivisorClass":
        if self._kcoords is None:
            self._kcoords = self.class_of([-1] * self.n).coords
        return DivisorClass(self, self._kcoords)


@dataclass(frozen=True)
class DivisorClass:
    """Element of the divisor class lattice in the fixed quotient basis."""

    surface: ToricSurface
    coords: tuple[int, ...]

    def __post_init__(self):
        assert len(self.coords) == self.surface.rank

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        assert self.surface == other.surface
        return DivisorClass(self.surface,
                            tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        assert self.surface == other.surface
        return DivisorClass(self.surface,
                            tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(self.surface, tuple(-a for a in self.coords))

    def __rmul__(self, k: int) -> "DivisorClass":
        return DivisorClass(self.surface, tuple(k * a for a in self.coords))

    def __repr__(self):
        return f"Cl{self.coords}"


def surface_from_b(b: Sequence[int]) -> ToricSurface:
    return ToricSurface(b)


def intersect(c: DivisorClass, d: DivisorClass) -> int:
    """Intersection number, bilinear extension of D_i.D_i = -b_i,
    D_i.D_{i+1} = 1, zero otherwise."""
    if c.surface != d.surface:
        raise ValueError("classes live on different surfaces")
    x = c.surface
    m = x.intersection_matrix()
    a = x.representative(c)
    bb = x.representative(d)
    return sum(a[i] * m[i][j] * bb[j]
               for i in range(x.n) for j in range(x.n)
               if a[i] != 0 and m[i][j] != 0)


def canonical_class(x: ToricSurface) -> DivisorClass:
    return x.canonical()


def euler_char(d: DivisorClass) -> int:
    """chi(O(D)) = 1 + (D.D - K.D)/2."""
    k = d.surface.canonical()
    num = intersect(d, d) - intersect(k, d)
    assert num % 2 == 0
    return 1 + num // 2


# -- section counting ------------------------------------------------------

_H0_CACHE: dict = {}


def _polytope_count(x: ToricSurface, a: tuple[int, ...]) -> int:
    """Lattice points of P = {m : <rho_i, m> >= -a_i}, bounded as the fan
    is complete.  Vertices arise as intersections of two supporting lines."""
    rays = x.rays
    n = x.n
    verts = []
    for i, j in itertools.combinations(range(n), 2):
        (xi, yi), (xj, yj) = rays[i], rays[j]
        det = xi * yj - yi * xj
        if det == 0:
            continue
        mx = Fraction(-a[i] * yj + a[j] * yi, det)
        my = Fraction(-a[j] * xi + a[i] * xj, det)
        if all(rays[k][0] * mx + rays[k][1] * my >= -a[k] for k in range(n)):
            verts.append((mx, my))
    if not verts:
        return 0
    x_lo = min(v[0] for v in verts)
    x_hi = max(v[0] for v in verts)
    y_lo = min(v[1] for v in verts)
    y_hi = max(v[1] for v in verts)
    count = 0
    for px in range(-((-x_lo).__ceil__()), x_hi.__floor__() + 1):
        for py in range(-((-y_lo).__ceil__()), y_hi.__floor__() + 1):
            if all(rays[k][0] * px + rays[k][1] * py >= -a[k] for k in range(n)):
                count += 1
    return count


def h0(d: DivisorClass) -> int:
    """Number of global sections, by exact lattice-point enumeration."""
    key = (d.surface.b, d.coords)
    val = _H0_CACHE.get(key)
    if val is None:
        val = _polytope_count(d.surface, d.surface.representative(d))
        _H0_CACHE[key] = val
    return val


def is_effective(d: DivisorClass) -> bool:
    return h0(d) > 0


def cohomology(d: DivisorClass) -> tuple[int, int, int]:
    """(h0, h1, h2) via lattice counting, Serre duality and Riemann-Roch."""
    k = d.surface.canonical()
    hh0 = h0(d)
    hh2 = h0(k - d)
    hh1 = hh0 + hh2 - euler_char(d)
    assert hh1 >= 0, "negative h1; internal inconsistency"
    return (hh0, hh1, hh2)


def cohomology_oracle(d: DivisorClass) -> tuple[int, int, int]:
    """Independent per-degree computation.

    For each weight m, the contribution to H^* is the reduced cohomology of
    the arc complex of rays with <rho_i, m> < -a_i: empty set -> h0, full
    circle -> h2, and k arcs -> k-1 to h1.  All contributing weights lie in
    bounded cells of the line arrangement <rho_i, m> = -a_i, so a bounding
    box of pairwise line intersections suffices.
    """
    x = d.surface
    a = x.representative(d)
    rays = x.rays
    n = x.n
    pts = []
    for i, j in itertools.combinations(range(n), 2):
        (xi, yi), (xj, yj) = rays[i], rays[j]
        det = xi * yj - yi * xj
        if det == 0:
            continue
        pts.append((Fraction(-a[i] * yj + a[j] * yi, det),
                    Fraction(-a[j] * xi + a[i] * xj, det)))
    assert pts, "complete fan must have non-parallel rays"
    x_lo = min(p[0] for p in pts).__floor__() - 1
    x_hi = max(p[0] for p in pts).__ceil__() + 1
    y_lo = min(p[1] for p in pts).__floor__() - 1
    y_hi = max(p[1] for p in pts).__ceil__() + 1
    hh0 = hh1 = hh2 = 0
    for px in range(x_lo, x_hi + 1):
        for py in range(y_lo, y_hi + 1):
            neg = [rays[i][0] * px + rays[i][1] * py < -a[i] for i in range(n)]
            cnt = sum(neg)
            if cnt == 0:
                hh0 += 1
            elif cnt == n:
                hh2 += 1
            else:
                arcs = sum(1 for i in range(n) if neg[i] and not neg[i - 1])
                hh1 += arcs - 1
    assert hh0 - hh1 + hh2 == euler_char(d), "oracle box too small"
    return (hh0, hh1, hh2)


# -- blowups and blowdowns --------------------------------------------------

def _solve_integer(cols: Sequence[Sequence[int]], target: Sequence[int]) -> tuple[int, ...]:
    """Solve sum x_s * cols[s] = target exactly; the solution must exist and
    be integral (used to invert injective pullback maps)."""
    rows = len(target)
    k = len(cols)
    mat = [[Fraction(cols[s][r]) for s in range(k)] + [Fraction(target[r])]
           for r in range(rows)]
    piv_cols = []
    rr = 0
    for col in range(k):
        piv = next((i for i in range(rr, rows) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[rr], mat[piv] = mat[piv], mat[rr]
        mat[rr] = [v / mat[rr][col] for v in mat[rr]]
        for i in range(rows):
            if i != rr and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [a - f * bb for a, bb in zip(mat[i], mat[rr])]
        piv_cols.append(col)
        rr += 1
    if any(all(mat[i][c] == 0 for c in range(k)) and mat[i][k] != 0
           for i in range(rows)):
        raise ValueError("inconsistent system; class not in the image")
    sol = [Fraction(0)] * k
    for i, col in enumerate(piv_cols):
        sol[col] = mat[i][k]
    if any(v.denominator != 1 for v in sol):
        raise ValueError("non-integral solution")
    return tuple(int(v) for v in sol)


@dataclass(frozen=True)
class Blowup:
    """One-point invariant blowup down: X_up -> X_down, with the exceptional
    class and exact class-level pullback/pushforward maps."""

    down: ToricSurface
    up: ToricSurface
    new_index: int                     # ray index of the exceptional divisor on up
    index_map: tuple[int, ...]         # down ray index -> up ray index

    @property
    def exceptional(self) -> DivisorClass:
        return self.up.class_of_ray(self.new_index)

    def pull_divisor(self, coeffs: Sequence[int]) -> tuple[int, ...]:
        out = [0] * self.up.n
        for k, c in enumerate(coeffs):
            out[self.index_map[k]] = c
        left = (self.new_index - 1) % self.up.n
        right = (self.new_index + 1) % self.up.n
        out[self.new_index] = out[left] + out[right]
        return tuple(out)

    def pullback(self, c: DivisorClass) -> DivisorClass:
        assert c.surface == self.down
        return self.up.class_of(self.pull_divisor(self.down.representative(c)))

    def pushforward(self, c: DivisorClass) -> DivisorClass:
        """Unique c' with pullback(c') = c + (c.E) E."""
        assert c.surface == self.up
        e = self.exceptional
        target = (c + intersect(c, e) * e).coords
        rk = self.down.rank
        basis = [DivisorClass(self.down, tuple(1 if t == s else 0 for t in range(rk)))
                 for s in range(rk)]
        cols = [self.pullback(bc).coords for bc in basis]
        sol = _solve_integer(cols, target)
        return DivisorClass(self.down, sol)


def toric_blowup(x: ToricSurface, j: int) -> Blowup:
    """Blow up the fixed point between rays j and j+1."""
    n = x.n
    j %= n
    c = list(x.b)
    c[j] += 1
    c[(j + 1) % n] += 1
    c.insert(j + 1, 1)
    up = ToricSurface(c)
    index_map = tuple(k if k <= j else k + 1 for k in range(n))
    return Blowup(down=x, up=up, new_index=j + 1, index_map=index_map)


def blowdown_at(x: ToricSurface, i: int):
    """Contract the invariant minus-one curve D_i.

    Returns (X', pullback, pushforward) where pullback/pushforward are the
    class-level maps Pic(X') -> Pic(X) and Pic(X) -> Pic(X')."""
    n = x.n
    i %= n
    if x.b[i] != 1:
        raise ValueError(f"ray {i} is not a minus-one curve (b={x.b[i]})")
    if n < 4:
        raise ValueError("cannot blow down a surface with 3 rays")
    c = list(x.b)
    c[(i - 1) % n] -= 1
    c[(i + 1) % n] -= 1
    del c[i]
    down = ToricSurface(c)
    index_map = tuple(k if k < i else k + 1 for k in range(n - 1))
    bl = Blowup(down=down, up=x, new_index=i, index_map=index_map)
    return down, bl.pullback, bl.pushforward


def minus_one_rays(x: ToricSurface) -> list[int]:
    return [i for i in range(x.n) if x.b[i] == 1]


def normal_form(x) -> tuple[int, ...]:
    """Lexicographically minimal b-sequence over rotations and reflections."""
    b = x.b if isinstance(x, ToricSurface) else tuple(x)
    n = len(b)
    best = None
    for seq in (b, b[::-1]):
        for r in range(n):
            cand = seq[r:] + seq[:r]
            if best is None or cand < best:
                best = cand
    return best


def same_surface(x, y) -> bool:
    return normal_form(x) == normal_form(y)


def hirzebruch(r: int) -> ToricSurface:
    """The Hirzebruch surface with b-sequence (r, 0, -r, 0)."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    return ToricSurface((r, 0, -r, 0))


def hirzebruch_pq(x: ToricSurface) -> tuple[DivisorClass, DivisorClass]:
    """(P, Q) on a surface built by hirzebruch(): P the fiber class,
    Q with Q.Q = r and P.Q = 1 (for F_0 the two rulings, P = D_1, Q = D_2)."""
    r = x.b[0]
    assert x.b == (r, 0, -r, 0), "not in hirzebruch() form"
    return x.class_of_ray(1), x.class_of_ray(2)


def enumerate_surfaces(rank: int, bound: int) -> list[tuple[int, ...]]:
    """Normal forms of all smooth complete b-sequences of length rank+2 with
    max |b_i| <= bound, by iterated blowup from Hirzebruch surfaces.

    Intermediate stages are allowed entries in [-(bound+rank-2), bound]:
    along any blowdown path from a bounded target, entries only decrease,
    and by at most one per step.
    """
    if rank < 2:
        raise ValueError("rank must be at least 2")
    lower = -(bound + rank - 2)
    level = {normal_form((r, 0, -r, 0)) for r in range(0, bound + 1)}
    for _ in range(rank - 2):
        nxt = set()
        for b in level:
            n = len(b)
            for j in range(n):
                c = list(b)
                c[j] += 1
                c[(j + 1) % n] += 1
                c.insert(j + 1, 1)
                if all(lower <= v <= bound for v in c):
                    nxt.add(normal_form(tuple(c)))
        level = nxt
    return sorted(b for b in level if all(abs(v) <= bound for v in b))
