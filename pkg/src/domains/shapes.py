"""
Domain shapes with their geometric quantities.

Every shape is an immutable pydantic record tagged by `shape`, so domains
can be read straight from experiment configuration files, e.g.

    {"shape": "rectangle", "xmin": -1, "xmax": 1, "ymin": -2, "ymax": 2}

All shipped shapes are convex and are described by bounding half-planes
(`faces`) and bounding spheres (`spheres`); membership and distance to
the boundary are computed from those.
"""

import logging
import math
from abc import ABC, abstractmethod
from enum import Enum
from typing import Annotated, Any, Dict, List, Literal, NamedTuple, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator
from scipy.optimize import linprog
from scipy.spatial.distance import pdist
from scipy.special import gamma

from common.exceptions import DomainError, PreconditionError, ValidationException
from common.validators import validate_point

logger = logging.getLogger(__name__)


class ShapeKind(str, Enum):
    """Supported domain shapes."""

    INTERVAL = "interval"
    BALL = "ball"
    RECTANGLE = "rectangle"
    CONVEX_POLYGON = "convex_polygon"
    SLAB = "slab"
    LENS = "lens"


class HalfPlane(NamedTuple):
    """The set {x : normal . x < offset}; normal has unit length."""

    normal: np.ndarray
    offset: float


class Sphere(NamedTuple):
    """The open ball {x : |x - center| < radius}."""

    center: np.ndarray
    radius: float


class Geometry(NamedTuple):
    volume: float
    inradius: float
    diameter: float


def unit_ball_volume(dimension: int) -> float:
    """Volume of the unit ball in R^dimension."""
    return math.pi ** (dimension / 2.0) / gamma(dimension / 2.0 + 1.0)


class BaseDomain(BaseModel, ABC):
    """Open convex set in R^n."""

    model_config = ConfigDict(frozen=True)

    @property
    @abstractmethod
    def dimension(self) -> int:
        """Ambient dimension n."""

    @abstractmethod
    def volume(self) -> float:
        """Lebesgue measure, math.inf if unbounded."""

    @abstractmethod
    def inradius(self) -> float:
        """Supremum of radii of balls contained in the domain."""

    @abstractmethod
    def diameter(self) -> float:
        """Supremum of distances between points, math.inf if unbounded."""

    @abstractmethod
    def faces(self) -> List[HalfPlane]:
        """Bounding half-planes."""

    def spheres(self) -> List[Sphere]:
        """Bounding spheres."""
        return []

    @abstractmethod
    def scaled(self, factor: float) -> "BaseDomain":
        """Dilation about the origin by `factor` > 0."""

    def incenter(self) -> np.ndarray:
        """Center of a largest inscribed ball; the origin for unbounded shapes."""
        return np.zeros(self.dimension)

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.diameter())

    def geometry(self) -> Geometry:
        return Geometry(self.volume(), self.inradius(), self.diameter())

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        """
        Distance to the boundary, negative outside.

        Args:
            points: Array of shape (m, n)

        Returns:
            Array of shape (m,); exact for points inside
        """
        points = np.asarray(points, dtype=float).reshape(-1, self.dimension)
        distance = np.full(points.shape[0], np.inf)
        for face in self.faces():
            distance = np.minimum(distance, face.offset - points @ face.normal)
        for sphere in self.spheres():
            radial = np.linalg.norm(points - sphere.center, axis=1)
            distance = np.minimum(distance, sphere.radius - radial)
        return distance

    def contains(self, x: Any) -> bool:
        """Exact membership in the open set."""
        point = validate_point(x, self.dimension, "x")
        return bool(self.signed_distance(point[None, :])[0] > 0)

    def distance_to_boundary(self, x: Any) -> float:
        """Distance from x to the boundary; 0 for points outside."""
        point = validate_point(x, self.dimension, "x")
        return float(max(self.signed_distance(point[None, :])[0], 0.0))


class Interval(BaseDomain):
    """Open interval (a, b) in R^1."""

    shape: Literal["interval"] = "interval"
    a: float
    b: float

    @model_validator(mode="after")
    def check_order(self) -> "Interval":
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or self.a >= self.b:
            raise ValidationException("interval requires finite a < b", {"a": self.a, "b": self.b})
        return self

    @property
    def dimension(self) -> int:
        return 1

    def volume(self) -> float:
        return self.b - self.a

    def inradius(self) -> float:
        return (self.b - self.a) / 2.0

    def diameter(self) -> float:
        return self.b - self.a

    def incenter(self) -> np.ndarray:
        return np.array([(self.a + self.b) / 2.0])

    def faces(self) -> List[HalfPlane]:
        return [HalfPlane(np.array([-1.0]), -self.a), HalfPlane(np.array([1.0]), self.b)]

    def scaled(self, factor: float) -> "Interval":
        return Interval(a=self.a * factor, b=self.b * factor)


class Ball(BaseDomain):
    """Open ball B(center, radius) in R^n, n <= 3."""

    shape: Literal["ball"] = "ball"
    center: List[float]
    radius: float

    @model_validator(mode="after")
    def check_ball(self) -> "Ball":
        if not 1 <= len(self.center) <= 3:
            raise ValidationException("ball center must have 1 to 3 coordinates", {"center": self.center})
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValidationException("ball radius must be positive", {"radius": self.radius})
        return self

    @property
    def dimension(self) -> int:
        return len(self.center)

    def volume(self) -> float:
        return unit_ball_volume(self.dimension) * self.radius**self.dimension

    def inradius(self) -> float:
        return self.radius

    def incenter(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)

    def diameter(self) -> float:
        return 2.0 * self.radius

    def faces(self) -> List[HalfPlane]:
        if self.dimension == 1:
            c = self.center[0]
            return [HalfPlane(np.array([-1.0]), self.radius - c), HalfPlane(np.array([1.0]), c + self.radius)]
        return []

    def spheres(self) -> List[Sphere]:
        if self.dimension == 1:
            return []
        return [Sphere(np.asarray(self.center, dtype=float), self.radius)]

    def scaled(self, factor: float) -> "Ball":
        return Ball(center=[c * factor for c in self.center], radius=self.radius * factor)


class Rectangle(BaseDomain):
    """Axis-aligned open rectangle (xmin, xmax) x (ymin, ymax)."""

    shape: Literal["rectangle"] = "rectangle"
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    @model_validator(mode="after")
    def check_sides(self) -> "Rectangle":
        values = (self.xmin, self.xmax, self.ymin, self.ymax)
        if not all(math.isfinite(v) for v in values) or self.xmin >= self.xmax or self.ymin >= self.ymax:
            raise ValidationException("rectangle requires xmin < xmax and ymin < ymax", {"sides": values})
        return self

    @property
    def dimension(self) -> int:
        return 2

    def volume(self) -> float:
        return (self.xmax - self.xmin) * (self.ymax - self.ymin)

    def inradius(self) -> float:
        return min(self.xmax - self.xmin, self.ymax - self.ymin) / 2.0

    def incenter(self) -> np.ndarray:
        return np.array([(self.xmin + self.xmax) / 2.0, (self.ymin + self.ymax) / 2.0])

    def diameter(self) -> float:
        return math.hypot(self.xmax - self.xmin, self.ymax - self.ymin)

    def faces(self) -> List[HalfPlane]:
        return [
            HalfPlane(np.array([-1.0, 0.0]), -self.xmin),
            HalfPlane(np.array([1.0, 0.0]), self.xmax),
            HalfPlane(np.array([0.0, -1.0]), -self.ymin),
            HalfPlane(np.array([0.0, 1.0]), self.ymax),
        ]

    def sides(self) -> Tuple["Interval", "Interval"]:
        """The two coordinate intervals whose product is the rectangle."""
        return Interval(a=self.xmin, b=self.xmax), Interval(a=self.ymin, b=self.ymax)

    def scaled(self, factor: float) -> "Rectangle":
        return Rectangle(
            xmin=self.xmin * factor, xmax=self.xmax * factor,
            ymin=self.ymin * factor, ymax=self.ymax * factor,
        )


class ConvexPolygon(BaseDomain):
    """Strictly convex polygon with counterclockwise vertices."""

    shape: Literal["convex_polygon"] = "convex_polygon"
    vertices: List[Tuple[float, float]]

    @model_validator(mode="after")
    def check_convex(self) -> "ConvexPolygon":
        pts = np.asarray(self.vertices, dtype=float)
        if pts.shape[0] < 3:
            raise ValidationException("polygon needs at least 3 vertices", {"count": int(pts.shape[0])})
        if not np.all(np.isfinite(pts)):
            raise ValidationException("polygon vertices must be finite")

        edges = np.roll(pts, -1, axis=0) - pts
        following = np.roll(edges, -1, axis=0)
        cross = edges[:, 0] * following[:, 1] - edges[:, 1] * following[:, 0]
        if np.any(np.linalg.norm(edges, axis=1) == 0):
            raise ValidationException("polygon has repeated vertices")
        if np.any(cross <= 0):
            raise ValidationException(
                "polygon must be strictly convex and counterclockwise",
                {"turns": cross.tolist()},
            )
        turning = np.arctan2(cross, np.sum(edges * following, axis=1)).sum()
        if not math.isclose(turning, 2.0 * math.pi, rel_tol=1e-9):
            raise ValidationException("polygon boundary must wind exactly once")
        return self

    @property
    def dimension(self) -> int:
        return 2

    def _points(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    def volume(self) -> float:
        pts = self._points()
        x, y = pts[:, 0], pts[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def faces(self) -> List[HalfPlane]:
        pts = self._points()
        edges = np.roll(pts, -1, axis=0) - pts
        faces = []
        for start, edge in zip(pts, edges):
            # outward normal of a counterclockwise edge
            normal = np.array([edge[1], -edge[0]]) / np.linalg.norm(edge)
            faces.append(HalfPlane(normal, float(normal @ start)))
        return faces

    def chebyshev_center(self) -> Tuple[np.ndarray, float]:
        """
        Center and radius of the largest inscribed disk.

        Solves max r s.t. n_i . x + r <= c_i over the edge half-planes
        (unit normals) with HiGHS.
        """
        faces = self.faces()
        a = np.array([f.normal for f in faces])
        b = np.array([f.offset for f in faces])
        a_ub = np.hstack([a, np.ones((a.shape[0], 1))])
        res = linprog(
            np.array([0.0, 0.0, -1.0]),
            A_ub=a_ub,
            b_ub=b,
            bounds=[(None, None), (None, None), (0, None)],
            method="highs",
        )
        if not res.success:
            raise ValidationException(f"Chebyshev center LP failed: {res.message}")
        return res.x[:2], float(res.x[2])

    def inradius(self) -> float:
        return self.chebyshev_center()[1]

    def incenter(self) -> np.ndarray:
        return self.chebyshev_center()[0]

    def diameter(self) -> float:
        return float(np.max(pdist(self._points())))

    def scaled(self, factor: float) -> "ConvexPolygon":
        return ConvexPolygon(vertices=[(x * factor, y * factor) for x, y in self.vertices])


class Slab(BaseDomain):
    """R^{n-1} x (-h, h); exit is governed by the last coordinate alone."""

    shape: Literal["slab"] = "slab"
    half_width: float
    dim: int = Field(default=2, ge=2, le=3, alias="dimension")

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    @model_validator(mode="after")
    def check_width(self) -> "Slab":
        if not (math.isfinite(self.half_width) and self.half_width > 0):
            raise ValidationException("slab half-width must be positive", {"half_width": self.half_width})
        return self

    @property
    def dimension(self) -> int:
        return self.dim

    def volume(self) -> float:
        return math.inf

    def inradius(self) -> float:
        return self.half_width

    def diameter(self) -> float:
        return math.inf

    def faces(self) -> List[HalfPlane]:
        normal = np.zeros(self.dim)
        normal[-1] = 1.0
        return [HalfPlane(normal, self.half_width), HalfPlane(-normal, self.half_width)]

    def cross_section(self) -> Interval:
        """The interval I = (-h, h) in the last coordinate."""
        return Interval(a=-self.half_width, b=self.half_width)

    def scaled(self, factor: float) -> "Slab":
        return Slab(half_width=self.half_width * factor, dimension=self.dim)


class Lens(BaseDomain):
    """Planar [R x (-h, h)] intersected with B(0, radius)."""

    shape: Literal["lens"] = "lens"
    half_width: float
    radius: float

    @model_validator(mode="after")
    def check_lens(self) -> "Lens":
        for name in ("half_width", "radius"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationException(f"lens {name} must be positive", {name: value})
        return self

    @property
    def dimension(self) -> int:
        return 2

    def volume(self) -> float:
        h, rho = self.half_width, self.radius
        if rho <= h:
            return math.pi * rho**2
        return 2.0 * (h * math.sqrt(rho**2 - h**2) + rho**2 * math.asin(h / rho))

    def inradius(self) -> float:
        return min(self.half_width, self.radius)

    def diameter(self) -> float:
        return 2.0 * self.radius

    def faces(self) -> List[HalfPlane]:
        if self.radius <= self.half_width:
            return []
        return [
            HalfPlane(np.array([0.0, 1.0]), self.half_width),
            HalfPlane(np.array([0.0, -1.0]), self.half_width),
        ]

    def spheres(self) -> List[Sphere]:
        return [Sphere(np.zeros(2), self.radius)]

    def scaled(self, factor: float) -> "Lens":
        return Lens(half_width=self.half_width * factor, radius=self.radius * factor)


Domain = Annotated[
    Union[Interval, Ball, Rectangle, ConvexPolygon, Slab, Lens],
    Field(discriminator="shape"),
]

_DOMAIN_ADAPTER = TypeAdapter(Domain)


def parse_domain(spec: Dict[str, Any]) -> BaseDomain:
    """Build a domain from its tagged configuration record."""
    return _DOMAIN_ADAPTER.validate_python(spec)


class StartPoint(BaseModel):
    """Start point z of a process in a domain."""

    z: List[float]

    model_config = ConfigDict(frozen=True)

    @classmethod
    def of(cls, z: Any) -> "StartPoint":
        return cls(z=np.atleast_1d(np.asarray(z, dtype=float)).tolist())

    @property
    def point(self) -> np.ndarray:
        return np.asarray(self.z, dtype=float)

    def validate_in(self, domain: BaseDomain) -> np.ndarray:
        """
        Check that z lies strictly inside `domain`.

        Raises:
            DomainError: On dimension mismatch
            PreconditionError: If z is on the boundary or outside
        """
        point = validate_point(self.z, domain.dimension, "start")
        if not domain.contains(point):
            raise PreconditionError("start point must lie strictly inside the domain", {"z": self.z})
        return point


def as_start(z: Any) -> StartPoint:
    if isinstance(z, StartPoint):
        return z
    if z is None:
        raise DomainError("start point is required")
    return StartPoint.of(z)
