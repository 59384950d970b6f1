"""
Tests for domain shapes and comparison domains.
"""

import math

import numpy as np
import pytest

from common.exceptions import DomainError, PreconditionError, ValidationException
from domains import (
    Ball,
    ComparisonKind,
    ConvexPolygon,
    Interval,
    Lens,
    Rectangle,
    Slab,
    StartPoint,
    canonical_start,
    parse_domain,
    symmetrize,
)

SQRT3 = math.sqrt(3.0)
TRIANGLE = [(0.0, 0.0), (2.0, 0.0), (1.0, SQRT3)]


def test_rectangle_geometry():
    """(-1,1) x (-2,2) has volume 8, inradius 1 and diameter 2 sqrt(5)"""
    rect = Rectangle(xmin=-1, xmax=1, ymin=-2, ymax=2)
    volume, inradius, diameter = rect.geometry()
    assert volume == 8.0
    assert inradius == 1.0
    assert diameter == pytest.approx(2.0 * math.sqrt(5.0))


def test_ball_geometry():
    ball = Ball(center=[0.0, 0.0], radius=2.0)
    assert ball.volume() == pytest.approx(4.0 * math.pi)
    assert ball.inradius() == 2.0
    assert ball.diameter() == 4.0
    assert Ball(center=[0, 0, 0], radius=1.0).volume() == pytest.approx(4.0 * math.pi / 3.0)


def test_triangle_geometry():
    """Equilateral triangle of side 2"""
    triangle = ConvexPolygon(vertices=TRIANGLE)
    center, radius = triangle.chebyshev_center()
    assert radius == pytest.approx(1.0 / SQRT3, abs=1e-7)
    assert center.tolist() == pytest.approx([1.0, 1.0 / SQRT3], abs=1e-6)
    assert triangle.diameter() == pytest.approx(2.0)
    assert triangle.volume() == pytest.approx(SQRT3)


def test_polygon_inradius_matches_grid_search():
    """The inscribed radius is the largest boundary distance over a grid"""
    pentagon = ConvexPolygon(vertices=[(0, 0), (3, 0), (4, 2), (2, 3.5), (-0.5, 2)])
    xs, ys = np.meshgrid(np.linspace(-0.5, 4.0, 301), np.linspace(0.0, 3.5, 301))
    points = np.column_stack([xs.ravel(), ys.ravel()])
    best = pentagon.signed_distance(points).max()
    spacing = 4.5 / 300
    assert best <= pentagon.inradius() + 1e-9
    assert best >= pentagon.inradius() - spacing


@pytest.mark.parametrize(
    "vertices",
    [
        [(0, 0), (2, 0), (1, 0.2), (2, 2), (0, 2)],
        [(0, 0), (1, 0), (2, 0), (1, 1)],
        [(0, 0), (1, SQRT3), (2, 0)],
        [(0, 0), (1, 0)],
    ],
    ids=["reflex", "collinear", "clockwise", "too-few"],
)
def test_polygon_rejects_nonconvex(vertices):
    """Only strictly convex counterclockwise polygons are accepted"""
    with pytest.raises(ValidationException):
        ConvexPolygon(vertices=vertices)


def test_invalid_shapes_rejected():
    with pytest.raises(ValidationException):
        Interval(a=1.0, b=1.0)
    with pytest.raises(ValidationException):
        Ball(center=[0, 0, 0, 0], radius=1.0)
    with pytest.raises(ValidationException):
        Lens(half_width=0.0, radius=1.0)


def test_contains_and_distance():
    """Membership is for the open set; distance is 0 outside"""
    rect = Rectangle(xmin=-1, xmax=1, ymin=-2, ymax=2)
    assert rect.contains([0.5, 1.5])
    assert not rect.contains([1.0, 0.0])
    assert rect.distance_to_boundary([0.5, 1.5]) == pytest.approx(0.5)

    disk = Ball(center=[0.0, 1.0], radius=1.0)
    assert not disk.contains([2.0, 0.0])
    assert disk.distance_to_boundary([2.0, 0.0]) == 0.0
    assert disk.distance_to_boundary([0.0, 1.25]) == pytest.approx(0.75)


def test_lens_distance():
    """Lens h = 1, rho = 3: the strip side is nearest at (0, 0.5)"""
    lens = Lens(half_width=1.0, radius=3.0)
    assert lens.contains([0.0, 0.5])
    assert lens.distance_to_boundary([0.0, 0.5]) == pytest.approx(0.5)
    assert lens.distance_to_boundary([2.8, 0.0]) == pytest.approx(0.2)
    assert not lens.contains([0.0, 1.5])


def test_lens_volume_limits():
    """A lens narrower than its strip is a disk"""
    assert Lens(half_width=2.0, radius=1.0).volume() == pytest.approx(math.pi)
    lens = Lens(half_width=1.0, radius=2.0)
    assert 4.0 < lens.volume() < 4.0 * math.pi


def test_distance_dimension_mismatch():
    with pytest.raises(DomainError):
        Interval(a=-1, b=1).distance_to_boundary([0.0, 0.0])


def test_scaled_domain():
    rect = Rectangle(xmin=-1, xmax=1, ymin=-2, ymax=2).scaled(2.0)
    assert rect.volume() == pytest.approx(32.0)
    triangle = ConvexPolygon(vertices=TRIANGLE).scaled(3.0)
    assert triangle.inradius() == pytest.approx(3.0 / SQRT3, abs=1e-6)


def test_equal_volume_ball():
    """Rectangle of area 8 symmetrizes to the disk of radius sqrt(8/pi)"""
    rect = Rectangle(xmin=-1, xmax=1, ymin=-2, ymax=2)
    ball = symmetrize(rect, ComparisonKind.EQUAL_VOLUME_BALL)
    assert isinstance(ball, Ball)
    assert ball.radius == pytest.approx(math.sqrt(8.0 / math.pi))
    assert ball.volume() == pytest.approx(rect.volume(), rel=1e-12)
    assert ball.center == [0.0, 0.0]


def test_slab_and_interval_comparisons():
    rect = Rectangle(xmin=-1, xmax=1, ymin=-2, ymax=2)
    slab = symmetrize(rect, ComparisonKind.SLAB_S)
    assert isinstance(slab, Slab)
    assert slab.half_width == 1.0
    assert slab.dimension == 2
    assert symmetrize(rect, "interval-I") == Interval(a=-1.0, b=1.0)
    assert isinstance(symmetrize(Interval(a=0, b=3), ComparisonKind.SLAB_S), Interval)


def test_lens_comparison():
    """Lens of the rectangle uses h = R and rho = d - R"""
    rect = Rectangle(xmin=-1, xmax=1, ymin=-2, ymax=2)
    lens = symmetrize(rect, ComparisonKind.LENS_C)
    assert lens.half_width == 1.0
    assert lens.radius == pytest.approx(2.0 * math.sqrt(5.0) - 1.0)


def test_inadmissible_comparisons():
    """Unbounded or wrong-dimension domains are rejected up front"""
    with pytest.raises(PreconditionError):
        symmetrize(Slab(half_width=1.0), ComparisonKind.EQUAL_VOLUME_BALL)
    with pytest.raises(PreconditionError):
        symmetrize(Slab(half_width=1.0), ComparisonKind.LENS_C)
    with pytest.raises(PreconditionError):
        symmetrize(Ball(center=[0, 0, 0], radius=1.0), ComparisonKind.LENS_C)


def test_canonical_start_is_origin():
    assert canonical_start(Slab(half_width=1.0, dimension=3)).tolist() == [0.0, 0.0, 0.0]


@pytest.mark.parametrize(
    "domain, expected",
    [
        (Interval(a=0.0, b=3.0), [1.5]),
        (Ball(center=[1.0, -2.0], radius=0.5), [1.0, -2.0]),
        (Rectangle(xmin=0, xmax=2, ymin=1, ymax=5), [1.0, 3.0]),
        (ConvexPolygon(vertices=TRIANGLE), [1.0, SQRT3 / 3.0]),
        (Slab(half_width=1.0, dimension=3), [0.0, 0.0, 0.0]),
        (Lens(half_width=0.5, radius=2.0), [0.0, 0.0]),
    ],
)
def test_incenter(domain, expected):
    """The incenter is inside, at distance inradius from the boundary for bounded shapes"""
    center = domain.incenter()
    assert center.tolist() == pytest.approx(expected, abs=1e-6)
    assert domain.distance_to_boundary(center) == pytest.approx(domain.inradius(), abs=1e-6)


def test_parse_domain_by_shape():
    """Configuration records dispatch on the shape tag"""
    rect = parse_domain({"shape": "rectangle", "xmin": -1, "xmax": 1, "ymin": -2, "ymax": 2})
    assert isinstance(rect, Rectangle)
    slab = parse_domain({"shape": "slab", "half_width": 0.5, "dimension": 3})
    assert slab.dimension == 3
    polygon = parse_domain({"shape": "convex_polygon", "vertices": [[0, 0], [2, 0], [1, 1]]})
    assert polygon.volume() == pytest.approx(1.0)


def test_parse_domain_rejects_bad_polygon():
    with pytest.raises(ValidationException):
        parse_domain({"shape": "convex_polygon", "vertices": [[0, 0], [1, 1], [2, 0]]})


def test_start_point_validation():
    """Start points must lie strictly inside and match the dimension"""
    rect = Rectangle(xmin=-1, xmax=1, ymin=-2, ymax=2)
    assert StartPoint.of([0.5, 1.0]).validate_in(rect).tolist() == [0.5, 1.0]
    with pytest.raises(PreconditionError):
        StartPoint.of([1.0, 0.0]).validate_in(rect)
    with pytest.raises(DomainError):
        StartPoint.of(0.0).validate_in(rect)
