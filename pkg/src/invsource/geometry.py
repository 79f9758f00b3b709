"""Parametric source supports in two and three dimensions.

Two-dimensional shapes are closed parametric curves ``x(t), t in [0, 2pi)``
around a center; three-dimensional shapes (ball, cube) are handled
analytically. A :class:`Union` joins two disjoint components.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from matplotlib.path import Path
from scipy.optimize import minimize_scalar

DEFAULT_BOUNDARY_SAMPLES = 4096
_REFINE_TOL = 1e-10


class GeometryError(ValueError):
    """Invalid geometric input (non-unit direction, receiver inside support...)."""


class UnsupportedShapeError(GeometryError):
    pass


@dataclass(frozen=True)
class Extent:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise GeometryError(f"extent lo={self.lo} exceeds hi={self.hi}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, value, margin: float = 0.0):
        value = np.asarray(value)
        return (value > self.lo + margin) & (value < self.hi - margin)


class Separation(Enum):
    HOLDS_A = "HoldsA"
    HOLDS_B = "HoldsB"
    FAILS = "Fails"


def _as_unit(direction, dim: int) -> np.ndarray:
    d = np.asarray(direction, dtype=float)
    if d.shape != (dim,):
        raise GeometryError(f"direction must have {dim} components, got shape {d.shape}")
    if abs(np.linalg.norm(d) - 1.0) > 1e-12:
        raise GeometryError(f"direction {d.tolist()} is not a unit vector")
    return d


def _golden_max(func, a: float, b: float) -> float:
    """Maximise a scalar function on [a, b]; returns the best value found."""
    res = minimize_scalar(lambda t: -func(t), bounds=(a, b), method="bounded",
                          options={"xatol": _REFINE_TOL})
    return max(-res.fun, func(a), func(b))


class Shape:
    """Base class; concrete shapes are frozen dataclasses."""

    kind: str = "shape"
    dim: int = 2

    def describe(self) -> dict:
        raise NotImplementedError

    def contains(self, points) -> np.ndarray:
        raise NotImplementedError

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def support_extent(self, direction, samples: int = DEFAULT_BOUNDARY_SAMPLES) -> Extent:
        raise NotImplementedError

    def distance_extent(self, receiver, samples: int = DEFAULT_BOUNDARY_SAMPLES) -> Extent:
        raise NotImplementedError

    @property
    def components(self) -> tuple["Shape", ...]:
        return (self,)


@dataclass(frozen=True)
class CurveShape(Shape):
    """A region bounded by a closed curve ``center + offset(t)``."""

    center: tuple[float, float] = (0.0, 0.0)

    dim = 2

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if len(self.center) != 2:
            raise GeometryError("2D shapes need a 2-component center")

    # subclasses provide offset(t) and its t-derivative, both shape (..., 2)
    def offset(self, t):
        raise NotImplementedError

    def offset_derivative(self, t):
        raise NotImplementedError

    def boundary_point(self, t):
        return np.asarray(self.center) + self.offset(np.asarray(t, dtype=float))

    def boundary_tangent(self, t):
        return self.offset_derivative(np.asarray(t, dtype=float))

    def boundary_samples(self, samples: int = DEFAULT_BOUNDARY_SAMPLES) -> np.ndarray:
        t = 2 * np.pi * np.arange(samples) / samples
        return self.boundary_point(t)

    def _polygon(self, samples: int) -> Path:
        return _polygon_cache(self, samples)

    def contains(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(-1, 2)
        inside = self._polygon(DEFAULT_BOUNDARY_SAMPLES).contains_points(flat)
        return inside.reshape(pts.shape[:-1])

    def bounding_box(self):
        lo, hi = [], []
        for axis in np.eye(2):
            e = self.support_extent(axis)
            lo.append(e.lo)
            hi.append(e.hi)
        return np.array(lo), np.array(hi)

    def _refined_max(self, func, samples: int) -> float:
        t = 2 * np.pi * np.arange(samples) / samples
        vals = func(t)
        i = int(np.argmax(vals))
        h = 2 * np.pi / samples
        return _golden_max(lambda s: float(func(np.array(s))), t[i] - h, t[i] + h)

    def support_extent(self, direction, samples: int = DEFAULT_BOUNDARY_SAMPLES) -> Extent:
        d = _as_unit(direction, 2)
        proj = lambda t: self.boundary_point(t) @ d
        hi = self._refined_max(proj, samples)
        lo = -self._refined_max(lambda t: -proj(t), samples)
        return Extent(lo, hi)

    def distance_extent(self, receiver, samples: int = DEFAULT_BOUNDARY_SAMPLES) -> Extent:
        x = np.asarray(receiver, dtype=float)
        if self.contains(x):
            raise GeometryError(f"receiver {x.tolist()} lies inside the support")
        dist = lambda t: np.linalg.norm(self.boundary_point(t) - x, axis=-1)
        hi = self._refined_max(dist, samples)
        lo = -self._refined_max(lambda t: -dist(t), samples)
        return Extent(lo, hi)


_POLY_CACHE: dict = {}


def _polygon_cache(shape: CurveShape, samples: int) -> Path:
    key = (shape, samples)
    path = _POLY_CACHE.get(key)
    if path is None:
        path = Path(shape.boundary_samples(samples), closed=False)
        _POLY_CACHE[key] = path
    return path


@dataclass(frozen=True)
class Peanut(CurveShape):
    """``x(t) = c + a r sqrt(b cos^2 t + 1) (cos t, sin t)``."""

    a: float = 1.0
    b: float = 1.0
    r: float = 1.0
    kind = "Peanut"

    def _radius(self, t):
        return self.a * self.r * np.sqrt(self.b * np.cos(t) ** 2 + 1)

    def offset(self, t):
        rho = self._radius(t)
        return np.stack([rho * np.cos(t), rho * np.sin(t)], axis=-1)

    def offset_derivative(self, t):
        rho = self._radius(t)
        drho = -(self.a * self.r) ** 2 * self.b * np.cos(t) * np.sin(t) / rho
        return np.stack([drho * np.cos(t) - rho * np.sin(t),
                         drho * np.sin(t) + rho * np.cos(t)], axis=-1)

    def describe(self):
        return {"kind": self.kind, "center": list(self.center), "a": self.a, "b": self.b, "r": self.r}


@dataclass(frozen=True)
class RoundSquare(CurveShape):
    """``x(t) = c + r (cos^3 t + cos t, sin^3 t + sin t)``."""

    r: float = 0.8
    kind = "RoundSquare"

    def offset(self, t):
        c, s = np.cos(t), np.sin(t)
        return self.r * np.stack([c ** 3 + c, s ** 3 + s], axis=-1)

    def offset_derivative(self, t):
        c, s = np.cos(t), np.sin(t)
        return self.r * np.stack([-3 * c ** 2 * s - s, 3 * s ** 2 * c + c], axis=-1)

    def describe(self):
        return {"kind": self.kind, "center": list(self.center), "r": self.r}


@dataclass(frozen=True)
class Kite(CurveShape):
    """``x(t) = c + (r cos t + a r (cos 2t - 1), b r sin t)``."""

    r: float = 1.0
    a: float = 0.65
    b: float = 1.5
    kind = "Kite"

    def offset(self, t):
        return np.stack([self.r * np.cos(t) + self.a * self.r * (np.cos(2 * t) - 1),
                         self.b * self.r * np.sin(t)], axis=-1)

    def offset_derivative(self, t):
        return np.stack([-self.r * np.sin(t) - 2 * self.a * self.r * np.sin(2 * t),
                         self.b * self.r * np.cos(t)], axis=-1)

    def describe(self):
        return {"kind": self.kind, "center": list(self.center), "r": self.r, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Ellipse(CurveShape):
    """``x(t) = c + (a cos t, b sin t)``; a disk when ``a == b``."""

    a: float = 1.0
    b: float = 1.0
    kind = "Ellipse"

    def offset(self, t):
        return np.stack([self.a * np.cos(t), self.b * np.sin(t)], axis=-1)

    def offset_derivative(self, t):
        return np.stack([-self.a * np.sin(t), self.b * np.cos(t)], axis=-1)

    def contains(self, points):
        p = np.asarray(points, dtype=float) - np.asarray(self.center)
        return (p[..., 0] / self.a) ** 2 + (p[..., 1] / self.b) ** 2 <= 1.0

    def describe(self):
        return {"kind": self.kind, "center": list(self.center), "a": self.a, "b": self.b}


def Disk(center=(0.0, 0.0), radius: float = 1.0) -> Ellipse:
    return Ellipse(center=center, a=radius, b=radius)


@dataclass(frozen=True)
class Ball(Shape):
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    r: float = 1.0
    kind = "Ball"
    dim = 3

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def boundary_point(self, param):
        theta, phi = param
        st = np.sin(theta)
        return np.asarray(self.center) + self.r * np.stack(
            [st * np.cos(phi), st * np.sin(phi), np.cos(theta) * np.ones_like(phi)], axis=-1)

    def contains(self, points):
        p = np.asarray(points, dtype=float) - np.asarray(self.center)
        return np.sum(p ** 2, axis=-1) <= self.r ** 2

    def bounding_box(self):
        c = np.asarray(self.center)
        return c - self.r, c + self.r

    def support_extent(self, direction, samples: int = DEFAULT_BOUNDARY_SAMPLES) -> Extent:
        d = _as_unit(direction, 3)
        m = float(np.asarray(self.center) @ d)
        return Extent(m - self.r, m + self.r)

    def distance_extent(self, receiver, samples: int = DEFAULT_BOUNDARY_SAMPLES) -> Extent:
        x = np.asarray(receiver, dtype=float)
        dc = float(np.linalg.norm(x - np.asarray(self.center)))
        if dc <= self.r:
            raise GeometryError(f"receiver {x.tolist()} lies inside the support")
        return Extent(dc - self.r, dc + self.r)

    def describe(self):
        return {"kind": self.kind, "center": list(self.center), "r": self.r}


@dataclass(frozen=True)
class Cube(Shape):
    """Axis-aligned cube ``|x_i - c_i| <= r``."""

    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    r: float = 1.0
    kind = "Cube"
    dim = 3

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def boundary_point(self, param):
        # param = (face index 0..5, u, v) with u, v in [-1, 1]
        face, u, v = param
        axis, sign = divmod(int(face), 2)
        p = np.zeros(3)
        others = [i for i in range(3) if i != axis]
        p[axis] = 1.0 if sign == 0 else -1.0
        p[others[0]], p[others[1]] = u, v
        return np.asarray(self.center) + self.r * p

    def contains(self, points):
        p = np.asarray(points, dtype=float) - np.asarray(self.center)
        return np.all(np.abs(p) <= self.r, axis=-1)

    def bounding_box(self):
        c = np.asarray(self.center)
        return c - self.r, c + self.r

    def support_extent(self, direction, samples: int = DEFAULT_BOUNDARY_SAMPLES) -> Extent:
        d = _as_unit(direction, 3)
        m = float(np.asarray(self.center) @ d)
        h = self.r * float(np.sum(np.abs(d)))
        return Extent(m - h, m + h)

    def distance_extent(self, receiver, samples: int = DEFAULT_BOUNDARY_SAMPLES) -> Extent:
        x = np.asarray(receiver, dtype=float)
        if self.contains(x):
            raise GeometryError(f"receiver {x.tolist()} lies inside the support")
        p = x - np.asarray(self.center)
        nearest = np.clip(p, -self.r, self.r)
        far = -np.sign(p) * self.r
        far[far == 0] = self.r
        return Extent(float(np.linalg.norm(p - nearest)), float(np.linalg.norm(p - far)))

    def describe(self):
        return {"kind": self.kind, "center": list(self.center), "r": self.r}


@dataclass(frozen=True)
class Union(Shape):
    """Two disjoint components."""

    first: Shape = field(default_factory=Ellipse)
    second: Shape = field(default_factory=Ellipse)
    kind = "Union"

    def __post_init__(self):
        if isinstance(self.first, Union) or isinstance(self.second, Union):
            raise GeometryError("Union supports exactly two non-union components")
        if self.first.dim != self.second.dim:
            raise GeometryError("Union components must share a dimension")
        lo1, hi1 = self.first.bounding_box()
        lo2, hi2 = self.second.bounding_box()
        if np.all(lo1 <= hi2) and np.all(lo2 <= hi1):
            if _sample_overlap(self.first, self.second):
                raise GeometryError("Union components overlap")

    @property
    def dim(self):
        return self.first.dim

    @property
    def components(self):
        return (self.first, self.second)

    def contains(self, points):
        return self.first.contains(points) | self.second.contains(points)

    def bounding_box(self):
        lo1, hi1 = self.first.bounding_box()
        lo2, hi2 = self.second.bounding_box()
        return np.minimum(lo1, lo2), np.maximum(hi1, hi2)

    def support_extent(self, direction, samples: int = DEFAULT_BOUNDARY_SAMPLES) -> Extent:
        e1 = self.first.support_extent(direction, samples)
        e2 = self.second.support_extent(direction, samples)
        return Extent(min(e1.lo, e2.lo), max(e1.hi, e2.hi))

    def distance_extent(self, receiver, samples: int = DEFAULT_BOUNDARY_SAMPLES) -> Extent:
        e1 = self.first.distance_extent(receiver, samples)
        e2 = self.second.distance_extent(receiver, samples)
        return Extent(min(e1.lo, e2.lo), max(e1.hi, e2.hi))

    def describe(self):
        return {"kind": self.kind, "first": self.first.describe(), "second": self.second.describe()}


def _sample_overlap(s1: Shape, s2: Shape, n: int = 64) -> bool:
    lo = np.maximum(s1.bounding_box()[0], s2.bounding_box()[0])
    hi = np.minimum(s1.bounding_box()[1], s2.bounding_box()[1])
    axes = [np.linspace(l, h, n) for l, h in zip(lo, hi)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
    return bool(np.any(s1.contains(pts) & s2.contains(pts)))


SHAPES = {cls.kind: cls for cls in (Peanut, RoundSquare, Kite, Ellipse, Ball, Cube)}


def make_shape(spec: dict) -> Shape:
    """Build a shape from a plain description (as produced by ``describe``)."""
    spec = dict(spec)
    kind = spec.pop("kind")
    if kind == "Union":
        return Union(make_shape(spec["first"]), make_shape(spec["second"]))
    if kind == "Disk":
        return Disk(center=tuple(spec.get("center", (0.0, 0.0))), radius=spec.get("r", 1.0))
    try:
        cls = SHAPES[kind]
    except KeyError:
        raise UnsupportedShapeError(f"unknown shape kind {kind!r}") from None
    if "center" in spec:
        spec["center"] = tuple(spec["center"])
    try:
        return cls(**spec)
    except TypeError as exc:
        raise GeometryError(f"bad parameters for {kind}: {exc}") from None


# -- functional API -------------------------------------------------------

def boundary_point(shape: Shape, param):
    if not hasattr(shape, "boundary_point"):
        raise UnsupportedShapeError(f"{shape.kind} has no single boundary parameterisation")
    return shape.boundary_point(param)


def contains(shape: Shape, y) -> np.ndarray:
    return shape.contains(y)


def support_extent(shape: Shape, direction, samples: int = DEFAULT_BOUNDARY_SAMPLES) -> Extent:
    return shape.support_extent(direction, samples)


def distance_extent(shape: Shape, receiver, samples: int = DEFAULT_BOUNDARY_SAMPLES) -> Extent:
    return shape.distance_extent(receiver, samples)


def separation_condition(shape: Shape, direction, T: float) -> Separation:
    """Classify whether the two components' projections are more than ``T`` apart."""
    if not isinstance(shape, Union):
        raise GeometryError("separation_condition needs a two-component Union")
    if T <= 0:
        raise GeometryError("radiating period T must be positive")
    e1 = shape.first.support_extent(direction)
    e2 = shape.second.support_extent(direction)
    if e2.lo - e1.hi > T:
        return Separation.HOLDS_A
    if e1.lo - e2.hi > T:
        return Separation.HOLDS_B
    return Separation.FAILS


def strip_mask(shape: Shape, directions: Sequence, points, margin: float = 0.0) -> np.ndarray:
    """Points lying in every strip ``inf(d.D) + margin < d.y < sup(d.D) - margin``.

    A negative margin dilates the strips.
    """
    pts = np.asarray(points, dtype=float)
    mask = np.ones(pts.shape[:-1], dtype=bool)
    for d in directions:
        e = shape.support_extent(d)
        mask &= e.contains(pts @ np.asarray(d, dtype=float), margin)
    return mask


def annulus_mask(shape: Shape, receivers: Sequence, points, margin: float = 0.0) -> np.ndarray:
    """Points in every annulus ``inf|x-D| + margin < |x-y| < sup|x-D| - margin``."""
    pts = np.asarray(points, dtype=float)
    mask = np.ones(pts.shape[:-1], dtype=bool)
    for x in receivers:
        e = shape.distance_extent(x)
        mask &= e.contains(np.linalg.norm(pts - np.asarray(x, dtype=float), axis=-1), margin)
    return mask
