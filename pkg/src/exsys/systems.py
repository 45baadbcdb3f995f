"""Toric systems: cyclic sequences of divisor classes with A_i.A_{i+1} = 1,
all other products zero, summing to -K.  Exceptionality is detected through
vanishing of the cohomology of negated partial sums; constructibility by
recursive de-augmentation down to a Hirzebruch surface."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from exsys.surface import (
    Blowup,
    DivisorClass,
    ToricSurface,
    blowdown_at,
    canonical_class,
    cohomology,
    euler_char,
    hirzebruch,
    hirzebruch_pq,
    intersect,
    minus_one_rays,
    normal_form,
    surface_from_b,
)


class InvalidSystemError(ValueError):
    pass


@dataclass(frozen=True)
class ToricSystem:
    surface: ToricSurface
    entries: tuple[DivisorClass, ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def coords(self) -> tuple[tuple[int, ...], ...]:
        return tuple(e.coords for e in self.entries)

    def __repr__(self):
        return f"ToricSystem({self.surface.b}, {self.coords()})"


def validate(surface: ToricSurface, entries: Sequence[DivisorClass]) -> ToricSystem:
    """Check the three toric-system conditions, naming any violated pair."""
    n = len(entries)
    if n != surface.rank + 2:
        raise InvalidSystemError(
            f"need {surface.rank + 2} entries on a rank-{surface.rank} surface, got {n}")
    for e in entries:
        if e.surface != surface:
            raise InvalidSystemError("entry on a different surface")
    for i in range(n):
        for j in range(i, n):
            prod = intersect(entries[i], entries[j])
            adjacent = (j - i) % n == 1 or (i - j) % n == 1
            if i != j:
                want = 1 if adjacent else 0
                if prod != want:
                    raise InvalidSystemError(
                        f"A_{i}.A_{j} = {prod}, expected {want}")
    total = entries[0]
    for e in entries[1:]:
        total = total + e
    if total != -canonical_class(surface):
        raise InvalidSystemError("entries do not sum to -K")
    return ToricSystem(surface, tuple(entries))


def canonical_system(x: ToricSurface) -> ToricSystem:
    """The invariant divisors in cyclic order."""
    return validate(x, [x.class_of_ray(i) for i in range(x.n)])


def dihedral_canonical(ts: ToricSystem) -> tuple[tuple[int, ...], ...]:
    """Minimal coordinate tuple over cyclic rotations and reflections."""
    cs = ts.coords()
    n = len(cs)
    best = None
    for seq in (cs, cs[::-1]):
        for r in range(n):
            cand = seq[r:] + seq[:r]
            if best is None or cand < best:
                best = cand
    return best


def tv_of(ts: ToricSystem) -> ToricSurface:
    """The toric surface with b_i = 2 - chi(O(A_i))."""
    b = tuple(2 - euler_char(e) for e in ts.entries)
    try:
        return surface_from_b(b)
    except ValueError as exc:
        raise AssertionError(
            f"associated sequence {b} is not a surface; corrupt input") from exc


def _ranges(n: int):
    # partial sums A_j + ... + A_k for 1 <= j <= k < n (1-indexed)
    for j in range(n - 1):
        for k in range(j, n - 1):
            yield j, k


def is_exceptional(ts: ToricSystem) -> bool:
    for j, k in _ranges(ts.n):
        s = ts.entries[j]
        for t in range(j + 1, k + 1):
            s = s + ts.entries[t]
        if cohomology(-s) != (0, 0, 0):
            return False
    return True


def is_strongly_exceptional(ts: ToricSystem) -> bool:
    if not is_exceptional(ts):
        return False
    for j, k in _ranges(ts.n):
        s = ts.entries[j]
        for t in range(j + 1, k + 1):
            s = s + ts.entries[t]
        hh = cohomology(s)
        if hh[1] != 0 or hh[2] != 0:
            return False
    return True


# -- Hirzebruch catalogue ----------------------------------------------------

def hirzebruch_family_entries(p: DivisorClass, q: DivisorClass, r: int, i: int,
                              variant: str) -> tuple[DivisorClass, ...]:
    """Entries of the standard families on F_r in terms of given P, Q classes."""
    if variant == "plain":
        return (p, i * p + q, p, -(r + i) * p + q)
    if variant == "tilde":
        if r % 2 != 0:
            raise ValueError("tilde family needs even r")
        h = -(r // 2) * p + q
        return (h, p + i * h, h, p - i * h)
    raise ValueError(f"unknown variant {variant!r}")


def hirzebruch_system(r: int, i: int, variant: str = "plain") -> ToricSystem:
    x = hirzebruch(r)
    p, q = hirzebruch_pq(x)
    return validate(x, hirzebruch_family_entries(p, q, r, i, variant))


def recognize_hirzebruch_family(ts: ToricSystem):
    """Return (P, Q, r, i) if the entries are exactly (P, iP+Q, P, -(r+i)P+Q)
    in the intrinsic P/Q classes of the Hirzebruch surface, else None."""
    x = ts.surface
    if x.rank != 2:
        return None
    r = max(abs(v) for v in x.b)
    zero_rays = [k for k in range(4) if x.b[k] == 0]
    if r == 0:
        p_cands = [x.class_of_ray(0), x.class_of_ray(1)]
    else:
        neg = x.b.index(-r)
        p_cands = [x.class_of_ray(zero_rays[0])]
        q = x.class_of_ray(neg)
    for p in p_cands:
        if r == 0:
            q = next(c for c in (x.class_of_ray(0), x.class_of_ray(1)) if c != p)
        if ts.entries[0] != p or ts.entries[2] != p:
            continue
        i = intersect(ts.entries[1], q) - r
        if ts.entries == hirzebruch_family_entries(p, q, r, i, "plain"):
            return p, q, r, i
    return None


def mutate_L1(ts: ToricSystem, alpha: int = 1) -> ToricSystem:
    """Iterated left mutation at the first slot on the line-bundle family:
    sends the system with parameter i to the one with parameter i + alpha."""
    rec = recognize_hirzebruch_family(ts)
    if rec is None:
        raise ValueError("system is not in the (P, iP+Q, P, -(r+i)P+Q) family")
    p, q, r, i = rec
    return validate(ts.surface,
                    hirzebruch_family_entries(p, q, r, i + alpha, "plain"))


# -- augmentation ------------------------------------------------------------

def augment(ts: ToricSystem, i: int, blowup: Blowup) -> ToricSystem:
    """Insert the exceptional class after cyclic position i:
    (..., A_i - R, R, A_{i+1} - R, ...), everything pulled back."""
    if blowup.down != ts.surface:
        raise ValueError("blowup does not start at the system's surface")
    n = ts.n
    i %= n
    r = blowup.exceptional
    pulled = [blowup.pullback(e) for e in ts.entries]
    pulled[i] = pulled[i] - r
    pulled[(i + 1) % n] = pulled[(i + 1) % n] - r
    entries = pulled[: i + 1] + [r] + pulled[i + 1:]
    return validate(blowup.up, entries)


def _insert_at(ts: ToricSystem, j: int, blowup: Blowup) -> ToricSystem:
    """Augmentation variant placing R exactly at index j (used for replay)."""
    n = ts.n
    pulled = [blowup.pullback(e) for e in ts.entries]
    entries = pulled[:j] + [blowup.exceptional] + pulled[j:]
    m = len(entries)
    entries[(j - 1) % m] = entries[(j - 1) % m] - blowup.exceptional
    entries[(j + 1) % m] = entries[(j + 1) % m] - blowup.exceptional
    return validate(blowup.up, entries)


def _reblowup(x: ToricSurface, e: int) -> Blowup:
    """The Blowup datum contracting ray e of x (inverse of blowdown_at)."""
    n = x.n
    c = list(x.b)
    c[(e - 1) % n] -= 1
    c[(e + 1) % n] -= 1
    del c[e]
    down = surface_from_b(c)
    index_map = tuple(k if k < e else k + 1 for k in range(n - 1))
    return Blowup(down=down, up=x, new_index=e, index_map=index_map)


def deaugment_candidates(ts: ToricSystem):
    """All (position j, ray e, de-augmented system) triples: ray e is an
    invariant minus-one curve whose class occurs as entry j."""
    x = ts.surface
    if x.rank < 3:
        return []
    out = []
    for e in minus_one_rays(x):
        r = x.class_of_ray(e)
        bl = _reblowup(x, e)
        for j, entry in enumerate(ts.entries):
            if entry != r:
                continue
            pushed = [bl.pushforward(ts.entries[t]) for t in range(ts.n) if t != j]
            out.append((j, e, validate(bl.down, pushed)))
    return out


# -- constructibility --------------------------------------------------------

_CONSTR_MEMO: dict = {}


def clear_constructibility_memo():
    _CONSTR_MEMO.clear()


def is_constructible(ts: ToricSystem):
    """Decide constructibility; return (flag, certificate).

    A success certificate is a de-augmentation chain ending in an
    exceptional system on a Hirzebruch surface; a refutation records every
    explored branch of the exhaustive search.
    """
    key = (ts.surface.b, dihedral_canonical(ts))
    hit = _CONSTR_MEMO.get(key)
    if hit is not None:
        return hit
    if ts.surface.rank == 2:
        ok = is_exceptional(ts)
        cert = {
            "constructible": ok,
            "chain": [],
            "base": {"surface": list(ts.surface.b),
                     "entries": [list(c) for c in ts.coords()],
                     "exceptional": ok},
        }
        result = (ok, cert)
    else:
        branches = []
        result = None
        for j, e, sub in deaugment_candidates(ts):
            ok, subcert = is_constructible(sub)
            if ok:
                chain = [{"surface": list(ts.surface.b),
                          "entries": [list(c) for c in ts.coords()],
                          "position": j, "ray": e}] + subcert["chain"]
                result = (True, {"constructible": True, "chain": chain,
                                 "base": subcert["base"]})
                break
            branches.append({"position": j, "ray": e, "refuted": subcert})
        if result is None:
            result = (False, {"constructible": False,
                              "surface": list(ts.surface.b),
                              "entries": [list(c) for c in ts.coords()],
                              "branches": branches})
    _CONSTR_MEMO[key] = result
    return result


def replay_certificate(cert) -> ToricSystem:
    """Rebuild the toric system from a success certificate by augmenting the
    base system along the recorded chain."""
    assert cert["constructible"]
    base = cert["base"]
    x = surface_from_b(base["surface"])
    ts = validate(x, [DivisorClass(x, tuple(c)) for c in base["entries"]])
    for step in reversed(cert["chain"]):
        up = surface_from_b(step["surface"])
        bl = _reblowup(up, step["ray"])
        assert bl.down == ts.surface
        ts = _insert_at(ts, step["position"], bl)
    return ts


# -- special basis and Picard isometries -------------------------------------

def _blowdown_chain_to_odd(x: ToricSurface):
    """Depth-first chain of minus-one contractions ending on an odd
    Hirzebruch surface; returns list of ray indices (top first)."""
    if x.rank == 2:
        r = max(abs(v) for v in x.b)
        return [] if r % 2 == 1 else None
    for e in minus_one_rays(x):
        down, _, _ = blowdown_at(x, e)
        sub = _blowdown_chain_to_odd(down)
        if sub is not None:
            return [e] + sub
    return None


def special_basis(x: ToricSurface) -> list[DivisorClass]:
    """Basis (H, R_1, ..., R_{rank-1}) diagonalizing the pairing with
    signature (1,-1,...,-1) and K = -3H + sum R_i."""
    if x.rank == 1:
        basis = [x.class_of_ray(0)]
    elif x.rank == 2:
        r = max(abs(v) for v in x.b)
        if r % 2 == 0:
            raise ValueError("even Hirzebruch surfaces admit no special basis")
        a = (r - 1) // 2
        zero = next(k for k in range(4) if x.b[k] == 0)
        neg = x.b.index(-r)
        p, q = x.class_of_ray(zero), x.class_of_ray(neg)
        basis = [q - a * p, q - (a + 1) * p]
    else:
        chain = _blowdown_chain_to_odd(x)
        assert chain is not None, "every toric surface of rank >= 3 blows down oddly"
        surfaces = [x]
        blowups = []
        for e in chain:
            bl = _reblowup(surfaces[-1], e)
            blowups.append(bl)
            surfaces.append(bl.down)
        basis = special_basis(surfaces[-1])
        for bl in reversed(blowups):
            basis = [bl.pullback(v) for v in basis] + [bl.exceptional]
    rk = x.rank
    for s in range(rk):
        for t in range(rk):
            want = (1 if s == 0 else -1) if s == t else 0
            assert intersect(basis[s], basis[t]) == want
    ksum = -3 * basis[0]
    for v in basis[1:]:
        ksum = ksum + v
    assert ksum == canonical_class(x)
    return basis


def to_special_coords(basis: Sequence[DivisorClass], c: DivisorClass) -> tuple[int, ...]:
    """Coordinates w.r.t. the special basis, read off the diagonal pairing."""
    out = [intersect(c, basis[0])]
    out += [-intersect(c, v) for v in basis[1:]]
    got = out[0] * basis[0]
    for s, v in enumerate(basis[1:], 1):
        got = got + out[s] * v
    assert got == c, "class outside the lattice spanned by the basis"
    return tuple(out)


def from_special_coords(basis: Sequence[DivisorClass], coords: Sequence[int]) -> DivisorClass:
    out = coords[0] * basis[0]
    for s, v in enumerate(basis[1:], 1):
        out = out + coords[s] * v
    return out


def pic_isometries(x: ToricSurface, bound: int = 2) -> list[tuple[tuple[int, ...], ...]]:
    """All integer matrices with entries in [-bound, bound] preserving the
    diagonalized pairing and fixing K, in the special basis.  The returned
    set is verified to be closed under composition."""
    rk = x.rank
    special_basis(x)  # existence check; coordinates are abstract from here on
    sig = [1] + [-1] * (rk - 1)
    kvec = tuple([-3] + [1] * (rk - 1))

    def qdot(u, v):
        return sum(s * a * b for s, a, b in zip(sig, u, v))

    vals = range(-bound, bound + 1)
    cols_by_norm = {1: [], -1: []}
    for v in itertools.product(vals, repeat=rk):
        nrm = qdot(v, v)
        if nrm in cols_by_norm:
            cols_by_norm[nrm].append(v)

    found = []

    def extend(cols):
        s = len(cols)
        if s == rk:
            m = tuple(tuple(cols[c][r] for c in range(rk)) for r in range(rk))
            img = tuple(sum(m[r][c] * kvec[c] for c in range(rk)) for r in range(rk))
            if img == kvec:
                found.append(m)
            return
        for v in cols_by_norm[sig[s]]:
            if all(qdot(v, c) == 0 for c in cols):
                extend(cols + [v])

    extend([])
    found.sort()
    fset = set(found)
    ident = tuple(tuple(1 if r == c else 0 for c in range(rk)) for r in range(rk))
    assert ident in fset
    for m1 in found:
        for m2 in found:
            prod = tuple(
                tuple(sum(m1[r][t] * m2[t][c] for t in range(rk)) for c in range(rk))
                for r in range(rk))
            if prod not in fset:
                raise ValueError(
                    "isometry set not closed under composition; raise the bound")
    return found
