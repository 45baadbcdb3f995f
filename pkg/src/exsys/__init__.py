"""Exact toric-surface computations: toric systems, exceptional sequences,
and transport along homogeneous degenerations."""

from exsys.lattice import Rat, Vec2, cf_eval, alpha_gamma, mu, primitive
from exsys.surface import (
    ToricSurface,
    DivisorClass,
    surface_from_b,
    intersect,
    canonical_class,
    euler_char,
    h0,
    cohomology,
    cohomology_oracle,
    is_effective,
    blowdown_at,
    toric_blowup,
    minus_one_rays,
    normal_form,
    enumerate_surfaces,
    hirzebruch,
)

__all__ = [
    "Rat",
    "Vec2",
    "cf_eval",
    "alpha_gamma",
    "mu",
    "primitive",
    "ToricSurface",
    "DivisorClass",
    "surface_from_b",
    "intersect",
    "canonical_class",
    "euler_char",
    "h0",
    "cohomology",
    "cohomology_oracle",
    "is_effective",
    "blowdown_at",
    "toric_blowup",
    "minus_one_rays",
    "normal_form",
    "enumerate_surfaces",
    "hirzebruch",
]
