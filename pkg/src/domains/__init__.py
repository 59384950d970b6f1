"""
Domains, start points and comparison domains.
"""

from domains.shapes import (
    Ball,
    BaseDomain,
    ConvexPolygon,
    Domain,
    Geometry,
    HalfPlane,
    Interval,
    Lens,
    Rectangle,
    ShapeKind,
    Slab,
    Sphere,
    StartPoint,
    as_start,
    parse_domain,
    unit_ball_volume,
)
from domains.symmetrize import ComparisonKind, canonical_start, symmetrize

__all__ = [
    "Ball",
    "BaseDomain",
    "ComparisonKind",
    "ConvexPolygon",
    "Domain",
    "Geometry",
    "HalfPlane",
    "Interval",
    "Lens",
    "Rectangle",
    "ShapeKind",
    "Slab",
    "Sphere",
    "StartPoint",
    "as_start",
    "canonical_start",
    "parse_domain",
    "symmetrize",
    "unit_ball_volume",
]
