"""Multidivisors, degeneration diagrams, and the induced Picard transport.

A multidivisor is a finite family of rational subdivisions of Q indexed by
points of the projective line (only nontrivial slices are stored; the
trivial subdivision has a single vertex at 0), plus two boundary markers.
A degeneration diagram adds a connected, non-crossing bipartite graph on
the vertices of the 0- and s-slices; Minkowski-summing its edges into the
0-slice produces the special fiber of a one-parameter family, and the
divisor-level transport map descends to an isomorphism of Picard groups.

Conventions: slice "0" embeds at height +1 (vertex p/q -> ray (p, q)),
slice "s" at height -1 (vertex p/q -> ray (p, -q)); a "dot" marker
contributes the horizontal ray (1, 0) on the plus side and (-1, 0) on the
minus side.  Surfaces here are always smooth and complete.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import Optional, Sequence

from exsys.lattice import Vec2, add2, det2, mu, neg2, rat_to_str
from exsys.surface import (
    DivisorClass,
    InvalidSurfaceError,
    ToricSurface,
    normal_form,
    surface_from_b,
)

CIRC = "circ"
DOT = "dot"

ZERO = "0"
S = "s"


class InvalidMultidivisorError(ValueError):
    pass


class InvalidDiagramError(ValueError):
    pass


def _as_subdivision(verts) -> tuple[Fraction, ...]:
    vs = tuple(Fraction(v) for v in verts)
    if len(vs) == 0:
        raise InvalidMultidivisorError("subdivision needs at least one vertex")
    if any(vs[i] >= vs[i + 1] for i in range(len(vs) - 1)):
        raise InvalidMultidivisorError("vertices must be strictly increasing")
    return vs


@dataclass(frozen=True)
class Multidivisor:
    slices: tuple[tuple[str, tuple[Fraction, ...]], ...]
    m_minus: str = CIRC
    m_plus: str = CIRC

    @staticmethod
    def make(slices: dict, m_minus: str = CIRC, m_plus: str = CIRC) -> "Multidivisor":
        stored = []
        for label, verts in slices.items():
            vs = _as_subdivision(verts)
            if vs != (Fraction(0),):
                stored.append((str(label), vs))
        m = Multidivisor(tuple(sorted(stored)), m_minus, m_plus)
        m.check()
        return m

    def check(self):
        if self.m_minus not in (CIRC, DOT) or self.m_plus not in (CIRC, DOT):
            raise InvalidMultidivisorError("markers must be 'circ' or 'dot'")
        if len({lab for lab, _ in self.slices}) != len(self.slices):
            raise InvalidMultidivisorError("duplicate slice labels")
        if self.m_minus == CIRC and sum(vs[0] for _, vs in self.slices) >= 0:
            raise InvalidMultidivisorError("circ minus marker needs sum of minima < 0")
        if self.m_plus == CIRC and sum(vs[-1] for _, vs in self.slices) <= 0:
            raise InvalidMultidivisorError("circ plus marker needs sum of maxima > 0")

    def vertices(self, label: str) -> tuple[Fraction, ...]:
        for lab, vs in self.slices:
            if lab == label:
                return vs
        return (Fraction(0),)

    def nontrivial_labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.slices)

    def replace_slice(self, label: str, verts) -> "Multidivisor":
        d = {lab: vs for lab, vs in self.slices}
        if verts is None:
            d.pop(label, None)
        else:
            d[label] = verts
        return Multidivisor.make(d, self.m_minus, self.m_plus)

    def to_json(self) -> dict:
        return {
            "slices": {lab: [rat_to_str(v) for v in vs] for lab, vs in self.slices},
            "m_minus": self.m_minus,
            "m_plus": self.m_plus,
        }


def _circ_side_ok(extrema: Sequence[Fraction]) -> bool:
    """Smoothness test next to a contracted boundary curve.

    Two points carry the non-integral data; every other slice must have an
    integral extremum, and those integers shift the unimodularity test of
    the boundary cone (they are absorbed by a global function choice).
    """
    vals = list(extrema) + [Fraction(0), Fraction(0)]  # two generic points
    for a, b in itertools.combinations(range(len(vals)), 2):
        others = [vals[t] for t in range(len(vals)) if t not in (a, b)]
        if any(v.denominator != 1 for v in others):
            continue
        t = sum(int(v) for v in others)
        p1, q1 = vals[a].numerator, vals[a].denominator
        p2, q2 = vals[b].numerator, vals[b].denominator
        if abs(p1 * q2 + p2 * q1 + t * q1 * q2) == 1:
            return True
    return False


def is_smooth(m: Multidivisor) -> bool:
    """Combinatorial smoothness of the encoded surface."""
    for _, vs in m.slices:
        for v, w in zip(vs, vs[1:]):
            if abs(v.numerator * w.denominator - w.numerator * v.denominator) != 1:
                return False
    for marker, pick in ((m.m_plus, max), (m.m_minus, min)):
        extrema = [pick(vs) for _, vs in m.slices]
        if marker == DOT:
            if any(v.denominator != 1 for v in extrema):
                return False
        else:
            if not _circ_side_ok(extrema):
                return False
    return True


# -- the toric fiber ---------------------------------------------------------

VKey = tuple  # ("v", label, Fraction) | ("plus",) | ("minus",)


def _ray_of_key(key: VKey) -> Vec2:
    if key == ("plus",):
        return (1, 0)
    if key == ("minus",):
        return (-1, 0)
    _, label, v = key
    p, q = v.numerator, v.denominator
    return (p, q) if label == ZERO else (p, -q)


def _ccw_cmp(u: Vec2, v: Vec2) -> int:
    def half(w):
        return 0 if (w[1] > 0 or (w[1] == 0 and w[0] > 0)) else 1
    hu, hv = half(u), half(v)
    if hu != hv:
        return -1 if hu < hv else 1
    d = det2(u, v)
    return 0 if d == 0 else (-1 if d > 0 else 1)


@dataclass(frozen=True)
class FiberModel:
    """A toric surface together with the slice-vertex labelling of its rays."""

    surface: ToricSurface
    keys: tuple[VKey, ...]
    up_label: str
    down_label: str

    def index_of(self, key: VKey) -> int:
        return self.keys.index(key)

    def class_of_key(self, key: VKey) -> DivisorClass:
        return self.surface.class_of_ray(self.index_of(key))

    def class_of_divisor(self, coeffs: dict) -> DivisorClass:
        vec = [0] * self.surface.n
        for key, c in coeffs.items():
            vec[self.index_of(key)] += c
        return self.surface.class_of(vec)


def fiber_surface(m: Multidivisor) -> FiberModel:
    """The surface of a multidivisor with at most two nontrivial slices."""
    nontriv = list(m.nontrivial_labels())
    if len(nontriv) > 2:
        raise ValueError("fiber not toric: more than two nontrivial slices")
    if not is_smooth(m):
        raise ValueError("multidivisor is not smooth")
    # choose the two relevant points: 0 up and s down whenever possible
    others = [lab for lab in nontriv if lab not in (ZERO, S)]
    if not others:
        up, down = ZERO, S
    elif len(others) == 1:
        if S in nontriv and ZERO not in nontriv:
            up, down = others[0], S
        else:
            up, down = ZERO, others[0]
    else:
        up, down = others[0], others[1]
    keyed: list[tuple[VKey, Vec2]] = []
    for v in m.vertices(up):
        keyed.append((("v", up, v), (v.numerator, v.denominator)))
    for v in m.vertices(down):
        keyed.append((("v", down, v), (v.numerator, -v.denominator)))
    if m.m_plus == DOT:
        keyed.append((("plus",), (1, 0)))
    if m.m_minus == DOT:
        keyed.append((("minus",), (-1, 0)))
    keyed.sort(key=cmp_to_key(lambda a, b: _ccw_cmp(a[1], b[1])))
    rays = [rv for _, rv in keyed]
    n = len(rays)
    if n < 3:
        raise ValueError("fewer than three rays; not a surface")
    b = []
    for i in range(n):
        u, v, w = rays[(i - 1) % n], rays[i], rays[(i + 1) % n]
        s = add2(u, w)
        if v[0] != 0:
            if s[0] % v[0] != 0:
                raise InvalidSurfaceError("rays do not span a smooth fan")
            bi = s[0] // v[0]
        else:
            if s[1] % v[1] != 0:
                raise InvalidSurfaceError("rays do not span a smooth fan")
            bi = s[1] // v[1]
        if (bi * v[0], bi * v[1]) != s:
            raise InvalidSurfaceError("rays do not span a smooth fan")
        b.append(bi)
    surf = surface_from_b(b)
    # ray index i corresponds to keys[i]; the re-anchored rays of `surf`
    # differ from the geometric ones by a single unimodular map
    keys = tuple(k for k, _ in keyed)
    return FiberModel(surface=surf, keys=keys, up_label=up, down_label=down)


# -- degeneration diagrams ---------------------------------------------------

@dataclass(frozen=True)
class DegenerationDiagram:
    m: Multidivisor
    edges: tuple[tuple[Fraction, Fraction], ...]

    @staticmethod
    def make(m: Multidivisor, edges) -> "DegenerationDiagram":
        es = tuple(sorted((Fraction(a), Fraction(b)) for a, b in set(map(tuple, edges))))
        d = DegenerationDiagram(m, es)
        d.check()
        return d

    def check(self):
        m = self.m
        if not is_smooth(m):
            raise InvalidDiagramError("multidivisor is not smooth")
        v0s, vss = m.vertices(ZERO), m.vertices(S)
        for a, b in self.edges:
            if a not in v0s or b not in vss:
                raise InvalidDiagramError(f"edge ({a},{b}) not on slice vertices")
        if not self.edges:
            raise InvalidDiagramError("graph must be nonempty")
        # coverage
        cov0 = {a for a, _ in self.edges}
        covs = {b for _, b in self.edges}
        if cov0 != set(v0s) or covs != set(vss):
            raise InvalidDiagramError("graph must cover every slice vertex")
        # non-crossing (planar segment realization on parallel lines)
        for (a, b), (c, d) in itertools.combinations(self.edges, 2):
            if (a - c) * (b - d) < 0:
                raise InvalidDiagramError("crossing edges")
        # connectivity of the bipartite graph
        parent = {("0", v): ("0", v) for v in v0s}
        parent.update({("s", v): ("s", v) for v in vss})

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            parent[find(("0", a))] = find(("s", b))
        roots = {find(x) for x in parent}
        if len(roots) != 1:
            raise InvalidDiagramError("graph not connected")
        # high-valency vertices are lattice points
        for v in v0s:
            if sum(1 for a, _ in self.edges if a == v) > 1 and v.denominator != 1:
                raise InvalidDiagramError(f"vertex {v} has valency > 1 but is not integral")
        for v in vss:
            if sum(1 for _, b in self.edges if b == v) > 1 and v.denominator != 1:
                raise InvalidDiagramError(f"vertex {v} has valency > 1 but is not integral")

    def valency0(self, v: Fraction) -> int:
        return sum(1 for a, _ in self.edges if a == v)

    def valencyS(self, v: Fraction) -> int:
        return sum(1 for _, b in self.edges if b == v)

    def to_json(self) -> dict:
        out = self.m.to_json()
        out["edges"] = [[rat_to_str(a), rat_to_str(b)] for a, b in self.edges]
        return out


def special_fiber(d: DegenerationDiagram) -> Multidivisor:
    """Minkowski-sum the edges into the 0-slice and trivialize the s-slice."""
    merged = sorted({a + b for a, b in d.edges})
    slices = {lab: vs for lab, vs in d.m.slices if lab not in (ZERO, S)}
    slices[ZERO] = merged
    out = Multidivisor.make(slices, d.m.m_minus, d.m.m_plus)
    assert is_smooth(out), "special fiber of a valid diagram must be smooth"
    return out


def general_fiber(d: DegenerationDiagram) -> FiberModel:
    return fiber_surface(d.m)


def special_fiber_model(d: DegenerationDiagram) -> FiberModel:
    return fiber_surface(special_fiber(d))


# -- the transport map -------------------------------------------------------

@dataclass(frozen=True)
class PiCircMap:
    """Divisor-level transport from the general to the special fiber, plus
    the induced matrix on divisor-class coordinates when both are toric."""

    diagram: DegenerationDiagram
    src: Optional[FiberModel]
    dst: Optional[FiberModel]
    divisor_map: tuple  # ((src_key, ((dst_key, coeff), ...)), ...)
    matrix: Optional[tuple]  # rows, acting on class coordinates

    def divisor_images(self) -> dict:
        return {k: dict(v) for k, v in self.divisor_map}

    def apply(self, c: DivisorClass) -> DivisorClass:
        assert self.matrix is not None, "divisor-level only on non-toric fibers"
        assert c.surface == self.src.surface
        rk = len(self.matrix)
        coords = tuple(sum(self.matrix[r][t] * c.coords[t] for t in range(rk))
                       for r in range(rk))
        return DivisorClass(self.dst.surface, coords)

    def apply_inverse(self, c: DivisorClass) -> DivisorClass:
        assert self.matrix is not None
        assert c.surface == self.dst.surface
        from exsys.surface import _solve_integer
        rk = len(self.matrix)
        cols = [tuple(self.matrix[r][t] for r in range(rk)) for t in range(rk)]
        sol = _solve_integer(cols, c.coords)
        return DivisorClass(self.src.surface, sol)


def pi_circ(d: DegenerationDiagram) -> PiCircMap:
    """Transport of invariant divisors, per edge weighted by denominators:
    the entry of D_{0,v0} (resp. D_{s,vs}) on D_{0,v0+vs} is
    mu(v0+vs)/mu(v0) (resp. mu(v0+vs)/mu(vs))."""
    m = d.m
    dmap = []
    src_keys: list[VKey] = []
    for lab, vs in m.slices:
        for v in vs:
            src_keys.append(("v", lab, v))
    for lab in (ZERO, S):
        if lab not in m.nontrivial_labels():
            src_keys.append(("v", lab, Fraction(0)))
    if m.m_plus == DOT:
        src_keys.append(("plus",))
    if m.m_minus == DOT:
        src_keys.append(("minus",))
    for key in src_keys:
        if key in (("plus",), ("minus",)):
            dmap.append((key, ((key, 1),)))
            continue
        _, lab, v = key
        if lab not in (ZERO, S):
            dmap.append((key, ((key, 1),)))
            continue
        images = []
        for v0, vs in d.edges:
            if (lab == ZERO and v0 == v) or (lab == S and vs == v):
                w = v0 + vs
                num = mu(w)
                den = mu(v0) if lab == ZERO else mu(vs)
                assert num % den == 0, "non-integral transport coefficient"
                images.append((("v", ZERO, w), num // den))
        dmap.append((key, tuple(images)))
    src = dst = matrix = None
    try:
        src = fiber_surface(m)
        dst = fiber_surface(special_fiber(d))
    except ValueError:
        src = dst = None
    if src is not None and dst is not None:
        lookup = dict(dmap)
        cols = []
        for k in src.keys:
            img = lookup[k]
            cols.append(dst.class_of_divisor({kk: c for kk, c in img}).coords)
        rk = src.surface.rank
        assert rk == dst.surface.rank, "transport must preserve the Picard rank"
        # matrix on class coordinates: column t = image of the basis class e_t,
        # computed through the canonical divisor representative
        mat_rows = []
        basis_imgs = []
        for t in range(rk):
            rep = src.surface.representative(DivisorClass(
                src.surface, tuple(1 if s == t else 0 for s in range(rk))))
            img = dst.surface.zero_class()
            for idx, a in enumerate(rep):
                if a:
                    img = img + a * DivisorClass(dst.surface, cols[idx])
            basis_imgs.append(img.coords)
        mat_rows = tuple(tuple(basis_imgs[t][r] for t in range(rk))
                         for r in range(rk))
        # principal divisors must map to principal divisors
        for mm in ((1, 0), (0, 1)):
            rep = [mm[0] * x + mm[1] * y for x, y in src.surface.rays]
            img = dst.surface.zero_class()
            for idx, a in enumerate(rep):
                if a:
                    img = img + a * DivisorClass(dst.surface, cols[idx])
            assert img == dst.surface.zero_class(), "transport not defined on Pic"
        matrix = mat_rows
    return PiCircMap(diagram=d, src=src, dst=dst,
                     divisor_map=tuple(dmap), matrix=matrix)


# -- toric one-parameter moves ------------------------------------------------

def toricdef(b: Sequence[int], r: int) -> tuple[DegenerationDiagram, tuple[int, ...]]:
    """Homogeneous deformation of the surface with b-sequence b (b_0 < 0)
    and parameter 0 <= r <= -b_0.

    Returns the diagram (whose special fiber is the input surface) together
    with the b-sequence of the general fiber,
    (b_0+gamma+2r, b_{alpha-1},...,b_1, b_alpha-gamma-2r, b_{alpha+1},...).
    """
    from exsys.lattice import alpha_gamma

    x0 = surface_from_b(b)
    n = x0.n
    if n < 4:
        raise ValueError("need at least four rays")
    if b[0] >= 0:
        raise ValueError("b_0 must be negative")
    if not (0 <= r <= -b[0]):
        raise ValueError("need 0 <= r <= -b_0")
    alpha, gamma = alpha_gamma(x0.b)
    # reposition: rho_0 = (0,-1), rho_1 = (1, r); then only rho_0 lies below
    rays = [(y, -xx + r * y) for xx, y in x0.rays]
    assert rays[0] == (0, -1) and rays[1] == (1, r)
    verts = {}
    m_plus = m_minus = CIRC
    for i, (p, q) in enumerate(rays):
        if q > 0:
            verts[Fraction(p, q)] = i
        elif q == 0:
            if p == 1:
                m_plus = DOT
            else:
                m_minus = DOT
        else:
            assert i == 0 and (p, q) == (0, -1), "only rho_0 may lie below"
    assert (m_plus == DOT) == (r == 0)
    assert (m_minus == DOT) == (r == -b[0])
    all_vs = sorted(verts)
    m0 = [v for v in all_vs if v <= 0]
    ms = [v for v in all_vs if v >= 0]
    m = Multidivisor.make({ZERO: m0, S: ms}, m_minus, m_plus)
    edges = {(v, Fraction(0)) for v in m0} | {(Fraction(0), v) for v in ms}
    d = DegenerationDiagram.make(m, edges)
    # the special fiber must reproduce the input surface
    sf = special_fiber(d)
    assert sf.vertices(ZERO) == tuple(all_vs)
    assert normal_form(fiber_surface(sf).surface) == normal_form(x0)
    general = (b[0] + gamma + 2 * r,) + tuple(b[alpha - 1:0:-1]) + \
        (b[alpha] - gamma - 2 * r,) + tuple(b[alpha + 1:])
    assert sum(general) == sum(b)
    assert normal_form(fiber_surface(m).surface) == normal_form(general), \
        "diagram general fiber disagrees with the predicted b-sequence"
    return d, general


# -- blowing diagrams up and down ---------------------------------------------

@dataclass(frozen=True)
class DiagramBlowdown:
    diagram: DegenerationDiagram        # the blown-down diagram
    special_key: VKey                   # contracted curve on the special fiber
    general_key: VKey                   # induced contracted curve on the general fiber


def blowdown_diagram(d: DegenerationDiagram, key: VKey,
                     check_minus_one: bool = True) -> DiagramBlowdown:
    """Blow down the invariant minus-one curve named by a special-fiber key."""
    if check_minus_one:
        try:
            fm0 = special_fiber_model(d)
        except ValueError:
            fm0 = None  # non-toric special fiber: caller asserts the property
        if fm0 is not None:
            i = fm0.index_of(key)
            if fm0.surface.b[i] != 1:
                raise ValueError(f"{key} is not a minus-one curve "
                                 f"(b = {fm0.surface.b[i]})")
    m = d.m
    if key == ("plus",):
        m2 = Multidivisor.make(dict(m.slices), m.m_minus, CIRC)
        return DiagramBlowdown(DegenerationDiagram.make(m2, d.edges), key, key)
    if key == ("minus",):
        m2 = Multidivisor.make(dict(m.slices), CIRC, m.m_plus)
        return DiagramBlowdown(DegenerationDiagram.make(m2, d.edges), key, key)
    _, lab, v = key
    if lab not in (ZERO, S):
        vs = [w for w in m.vertices(lab) if w != v]
        if v not in m.vertices(lab):
            raise ValueError(f"no vertex {v} on slice {lab}")
        if not vs:
            raise AssertionError("contraction would empty a slice")
        m2 = m.replace_slice(lab, vs)
        return DiagramBlowdown(DegenerationDiagram.make(m2, d.edges), key, key)
    # a vertical curve on the special fiber: v = v0 + vs for a unique edge
    if lab != ZERO:
        raise ValueError("special-fiber vertical keys live on slice 0")
    edge = next(((a, bb) for a, bb in d.edges if a + bb == v), None)
    if edge is None:
        raise ValueError(f"no edge sums to {v}")
    v0, vs = edge
    if d.valency0(v0) == 1:
        side, w = ZERO, v0
    elif d.valencyS(vs) == 1:
        side, w = S, vs
    else:
        raise AssertionError("a minus-one edge must have a valency-one endpoint")
    verts = [u for u in m.vertices(side) if u != w]
    if not verts:
        raise AssertionError("contraction would empty a slice")
    m2 = m.replace_slice(side, verts)
    edges2 = [e for e in d.edges if e != edge]
    return DiagramBlowdown(DegenerationDiagram.make(m2, edges2), key,
                           ("v", side, w))


@dataclass(frozen=True)
class DiagramBlowup:
    diagram: DegenerationDiagram
    special_key: VKey                   # new exceptional curve on the special fiber
    general_key: VKey                   # new exceptional curve on the general fiber


def blowup_diagram(d: DegenerationDiagram, spec) -> DiagramBlowup:
    """Lift a one-point blowup across the family.

    spec is one of ("marker", "plus"|"minus"), ("generic", label, v),
    ("slice0", v), ("sliceS", v); the latter two say explicitly whether the
    new vertex of the special fiber is carried by the 0- or the s-slice.
    """
    m = d.m
    kind = spec[0]
    if kind == "marker":
        side = spec[1]
        if side == "plus":
            if m.m_plus == DOT:
                raise ValueError("plus marker already a section")
            m2 = Multidivisor.make(dict(m.slices), m.m_minus, DOT)
            key = ("plus",)
        else:
            if m.m_minus == DOT:
                raise ValueError("minus marker already a section")
            m2 = Multidivisor.make(dict(m.slices), DOT, m.m_plus)
            key = ("minus",)
        d2 = DegenerationDiagram.make(m2, d.edges)
        _require_smooth_pair(d2)
        return DiagramBlowup(d2, key, key)
    if kind == "generic":
        _, lab, v = spec
        v = Fraction(v)
        if lab in (ZERO, S):
            raise ValueError("use slice0/sliceS for the graph slices")
        vs = sorted(set(m.vertices(lab)) | {v})
        if len(vs) == len(m.vertices(lab)):
            raise ValueError(f"vertex {v} already present")
        m2 = m.replace_slice(lab, vs)
        d2 = DegenerationDiagram.make(m2, d.edges)
        _require_smooth_pair(d2)
        key = ("v", lab, v)
        return DiagramBlowup(d2, key, key)
    if kind in ("slice0", "sliceS"):
        v = Fraction(spec[1])
        lab = ZERO if kind == "slice0" else S
        old = m.vertices(lab)
        if v in old:
            raise ValueError(f"vertex {v} already present")
        vs = sorted(set(old) | {v})
        pos = vs.index(v)
        nbrs = [vs[t] for t in (pos - 1, pos + 1) if 0 <= t < len(vs)]
        if lab == ZERO:
            partners = [w for w in m.vertices(S)
                        if all((u, w) in d.edges for u in nbrs)]
        else:
            partners = [w for w in m.vertices(ZERO)
                        if all((w, u) in d.edges for u in nbrs)]
        if not partners:
            raise ValueError("no admissible partner vertex for the insertion")
        if len(nbrs) == 2:
            assert len(partners) == 1
            w = partners[0]
        else:
            w = min(partners) if v < nbrs[0] else max(partners)
        m2 = m.replace_slice(lab, vs)
        new_edge = (v, w) if lab == ZERO else (w, v)
        d2 = DegenerationDiagram.make(m2, list(d.edges) + [new_edge])
        _require_smooth_pair(d2)
        gkey = ("v", lab, v)
        skey = ("v", ZERO, v + w)
        return DiagramBlowup(d2, skey, gkey)
    raise ValueError(f"unknown blowup spec {spec!r}")


def _require_smooth_pair(d: DegenerationDiagram):
    if not is_smooth(d.m):
        raise ValueError("blowup breaks smoothness of the general fiber")
    if not is_smooth(special_fiber(d)):
        raise ValueError("blowup breaks smoothness of the special fiber")


# -- degenerating to a toric surface ------------------------------------------

def _relabel(m: Multidivisor, mapping: dict) -> Multidivisor:
    slices = {}
    for lab, vs in m.slices:
        slices[mapping.get(lab, lab)] = vs
    return Multidivisor.make(slices, m.m_minus, m.m_plus)


def degenerate_to_toric(m: Multidivisor) -> list[DegenerationDiagram]:
    """Chain of homogeneous degenerations reducing the number of nontrivial
    slices until the surface is toric (at most two nontrivial slices)."""
    if not is_smooth(m):
        raise ValueError("multidivisor is not smooth")
    chain = []
    cur = m
    fresh = 0
    while len(cur.nontrivial_labels()) > 2:
        pair = None
        for p in cur.nontrivial_labels():
            for q in cur.nontrivial_labels():
                if p == q:
                    continue
                if cur.vertices(p)[0].denominator == 1 and \
                        cur.vertices(q)[-1].denominator == 1:
                    pair = (p, q)
                    break
            if pair:
                break
        if pair is None:
            raise AssertionError(
                "smooth multidivisor with three nontrivial slices must admit "
                "an integral extremal pair")
        p, q = pair
        mapping = {}
        for lab in (ZERO, S):
            if lab in cur.nontrivial_labels() and lab not in (p, q):
                fresh += 1
                mapping[lab] = f"p{fresh}"
        mapping[p] = ZERO
        mapping[q] = S
        rel = _relabel(cur, mapping)
        w_p = rel.vertices(ZERO)[0]
        w_q = rel.vertices(S)[-1]
        edges = {(v, w_q) for v in rel.vertices(ZERO)} | \
                {(w_p, v) for v in rel.vertices(S)}
        d = DegenerationDiagram.make(rel, edges)
        chain.append(d)
        cur = special_fiber(d)
    return chain


# -- searching for toric-to-toric diagrams ------------------------------------

def _staircase_trees(k0: int, ks: int):
    """Non-crossing spanning trees of the complete bipartite graph on two
    ordered point rows: monotone staircases from (0,0) to (k0-1, ks-1)."""
    def walk(i, j, acc):
        if i == k0 - 1 and j == ks - 1:
            yield acc + [(i, j)]
            return
        if i < k0 - 1:
            yield from walk(i + 1, j, acc + [(i, j)])
        if j < ks - 1:
            yield from walk(i, j + 1, acc + [(i, j)])
    yield from walk(0, 0, [])


def _two_slice_realizations(x: ToricSurface, vbound: int):
    """All embeddings of the fan of x with slices of bounded vertices,
    normalized so the smallest 0-slice vertex lies in [0, 1)."""
    n = x.n
    seen = set()
    for lx, ly in itertools.product(range(-vbound, vbound + 1), repeat=2):
        if (lx, ly) == (0, 0) or gcd(abs(lx), abs(ly)) != 1:
            continue
        q = [lx * rx + ly * ry for rx, ry in x.rays]
        if any(abs(v) > vbound for v in q):
            continue
        if all(v >= 0 for v in q) or all(v <= 0 for v in q):
            continue
        # complete lambda to a unimodular basis; both orientations
        g, a, bb = _ext_gcd(ly, -lx)
        assert g == 1
        for mu0 in ((a, bb), (-a, -bb)):
            p = [mu0[0] * rx + mu0[1] * ry for rx, ry in x.rays]
            up = [(Fraction(p[i], q[i]), i) for i in range(n) if q[i] > 0]
            dn = [(Fraction(-p[i], q[i]), i) for i in range(n) if q[i] < 0]
            horiz = [i for i in range(n) if q[i] == 0]
            if len(horiz) > 2:
                continue
            m_plus = m_minus = CIRC
            ok = True
            for i in horiz:
                if p[i] == 1:
                    m_plus = DOT
                elif p[i] == -1:
                    m_minus = DOT
                else:
                    ok = False
            if not ok:
                continue
            shift = -min(v for v, _ in up).__floor__()
            upv = sorted(v + shift for v, _ in up)
            dnv = sorted(v - shift for v, _ in dn)
            if any(abs(v.numerator) > vbound for v in upv + dnv):
                continue
            key = (tuple(upv), tuple(dnv), m_minus, m_plus)
            if key in seen:
                continue
            seen.add(key)
            try:
                m = Multidivisor.make({ZERO: upv, S: dnv}, m_minus, m_plus)
            except InvalidMultidivisorError:
                continue
            assert is_smooth(m)
            assert normal_form(fiber_surface(m).surface) == normal_form(x)
            yield m


def _ext_gcd(a: int, b: int):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, xx, yy = _ext_gcd(b, a % b)
    return (g, yy, xx - (a // b) * yy)


def find_toric_degenerations(xs_b, x0_b, vbound: int = 6) -> list[DegenerationDiagram]:
    """All diagrams (up to slice translation) with general fiber xs_b and
    special fiber x0_b, both toric, and slice vertices bounded by vbound."""
    xs = surface_from_b(xs_b) if not isinstance(xs_b, ToricSurface) else xs_b
    target = normal_form(x0_b if not isinstance(x0_b, ToricSurface) else x0_b.b)
    out = {}
    for m in _two_slice_realizations(xs, vbound):
        v0s, vss = m.vertices(ZERO), m.vertices(S)
        for path in _staircase_trees(len(v0s), len(vss)):
            edges = [(v0s[i], vss[j]) for i, j in path]
            try:
                d = DegenerationDiagram.make(m, edges)
            except InvalidDiagramError:
                continue
            try:
                sf = special_fiber(d)
                fm0 = fiber_surface(sf)
            except (ValueError, AssertionError):
                continue
            if normal_form(fm0.surface) != target:
                continue
            out[_diagram_key(d)] = d
    return [out[k] for k in sorted(out)]


def _diagram_key(d: DegenerationDiagram):
    import json
    return json.dumps(d.to_json(), sort_keys=True)


# -- connecting surfaces through the move graph --------------------------------

def _dihedral_variants(b):
    n = len(b)
    out = set()
    for seq in (tuple(b), tuple(b)[::-1]):
        for r in range(n):
            out.add(seq[r:] + seq[:r])
    return sorted(out)


def _move_graph(rank: int, bmax: int) -> dict:
    """Adjacency of toric one-parameter moves between all normal forms with
    entries bounded by bmax.  Edge data: (special nf, general nf, b given to
    toricdef, r)."""
    from exsys.surface import enumerate_surfaces

    adj: dict = {}
    for nf in enumerate_surfaces(rank, bmax):
        for variant in _dihedral_variants(nf):
            if variant[0] >= 0:
                continue
            for r in range(0, -variant[0] + 1):
                try:
                    _, general = toricdef(variant, r)
                except (ValueError, AssertionError):
                    continue
                if any(abs(v) > bmax for v in general):
                    continue
                gnf = normal_form(general)
                move = (nf, gnf, variant, r)
                adj.setdefault(nf, []).append(("deform", gnf, move))
                adj.setdefault(gnf, []).append(("degenerate", nf, move))
    return adj


def connect(b_from, b_to, bmax: int = 6) -> list[dict]:
    """Breadth-first chain of toric one-parameter moves from one surface to
    the other; each step records the diagram and the travel direction
    ("deform" runs special -> general, "degenerate" the other way)."""
    src = normal_form(b_from)
    dst = normal_form(b_to)
    if len(src) != len(dst):
        raise ValueError("surfaces must have equal Picard rank")
    if src == dst:
        return []
    bmax = max(bmax, max(abs(v) for v in src), max(abs(v) for v in dst))
    adj = _move_graph(len(src) - 2, bmax)
    seen = {src: None}
    frontier = [src]
    while frontier and dst not in seen:
        nxt = []
        for nf in sorted(frontier):
            for direction, there, move in sorted(adj.get(nf, [])):
                if there not in seen:
                    seen[there] = (nf, direction, move)
                    nxt.append(there)
        frontier = nxt
    if dst not in seen:
        raise ValueError(f"no toric move chain within |b| <= {bmax}; "
                         "raise the bound")
    chain = []
    at = dst
    while seen[at] is not None:
        prev, direction, move = seen[at]
        d, _ = toricdef(move[2], move[3])
        chain.append({"diagram": d, "direction": direction,
                      "special": move[0], "general": move[1],
                      "from": prev, "to": at})
        at = prev
    chain.reverse()
    return chain


# -- the Hirzebruch catalogue of degenerations ---------------------------------

@dataclass(frozen=True)
class HirzebruchDegeneration:
    diagram: DegenerationDiagram
    pi: PiCircMap
    p_src: DivisorClass
    q_src: DivisorClass
    p_dst: DivisorClass
    q_dst: DivisorClass


def hirzebruch_diagram(r: int, alpha: int, variant: str = "G") -> DegenerationDiagram:
    """The degeneration of F_{r+2alpha} to F_r: 0-slice {-1/(r+alpha), 0},
    s-slice {0, 1/alpha}.  Variant G joins both zeros to everything;
    tildeG (only r=0, alpha=1) puts the zeros at valency one."""
    if r < 0 or alpha <= 0:
        raise ValueError("need r >= 0 and alpha > 0")
    v_left = -Fraction(1, r + alpha)
    v_right = Fraction(1, alpha)
    m = Multidivisor.make({ZERO: [v_left, Fraction(0)],
                           S: [Fraction(0), v_right]}, CIRC, CIRC)
    if variant == "G":
        edges = [(Fraction(0), Fraction(0)), (Fraction(0), v_right),
                 (v_left, Fraction(0))]
    elif variant == "tildeG":
        if not (r == 0 and alpha == 1):
            raise ValueError("tildeG exists only for r = 0, alpha = 1")
        edges = [(v_left, Fraction(0)), (v_left, v_right),
                 (Fraction(0), v_right)]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return DegenerationDiagram.make(m, edges)


def hirzebruch_pi(r: int, alpha: int, variant: str = "G") -> HirzebruchDegeneration:
    """The transport map of the catalogue degeneration, with the fiber-class
    and section-class generators identified on both sides."""
    d = hirzebruch_diagram(r, alpha, variant)
    pi = pi_circ(d)
    src, dst = pi.src, pi.dst
    # the fiber class P is carried by D_{s,1/alpha} (self-intersection 0) and
    # the degree-r section class Q by D_{s,0}, as the transport formulas show
    p_src = src.class_of_key(("v", S, Fraction(1, alpha)))
    q_src = src.class_of_key(("v", S, Fraction(0)))
    p_dst, q_dst = _intrinsic_pq(dst)
    return HirzebruchDegeneration(diagram=d, pi=pi, p_src=p_src, q_src=q_src,
                                  p_dst=p_dst, q_dst=q_dst)


def _intrinsic_pq(fm: FiberModel) -> tuple[DivisorClass, DivisorClass]:
    """(P, Q) on a Hirzebruch fiber with r > 0: P from a zero entry of the
    b-sequence, Q from the -r entry."""
    b = fm.surface.b
    r = max(abs(v) for v in b)
    assert r > 0, "the two rulings of F_0 cannot be told apart intrinsically"
    p = fm.surface.class_of_ray(b.index(0))
    q = fm.surface.class_of_ray(b.index(-r))
    return p, q
