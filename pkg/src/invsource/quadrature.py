"""Spatial and temporal quadrature rules over source supports.

The default ``fitted`` scheme maps the support onto a reference domain:

* 2D curves: fan map ``c + rho (x(t) - c)`` with Gauss-Legendre in ``rho`` and
  the trapezoid rule in ``t`` (spectrally accurate for smooth closed curves);
* balls: spherical coordinates, Gauss-Legendre in radius and ``cos(theta)``;
* cubes: tensor Gauss-Legendre.

The ``midpoint`` scheme is a masked tensor midpoint rule over the bounding box.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

from functools import lru_cache

import numpy as np

from .geometry import Ball, Cube, CurveShape, Shape, Union


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    """Resolution settings; ``n`` is the node count per axis.

    For the fitted 2D rule ``n`` radial by ``2n`` angular nodes are used, for
    balls ``n`` radial by ``n`` polar by ``2n`` azimuthal nodes.
    """

    scheme: str = "fitted"
    n: int = 64
    n_time: int = 64

    def __post_init__(self):
        if self.scheme not in ("fitted", "midpoint"):
            raise QuadratureError(f"unknown quadrature scheme {self.scheme!r}")
        if self.n < 1 or self.n_time < 1:
            raise QuadratureError("quadrature needs at least one node per axis")

    def refined(self, factor: int = 2) -> "QuadratureSpec":
        return QuadratureSpec(self.scheme, self.n * factor, self.n_time * factor)

    def describe(self) -> dict:
        return asdict(self)


DEFAULT_2D = QuadratureSpec("fitted", 64, 64)
DEFAULT_3D = QuadratureSpec("fitted", 24, 64)


def default_spec(dim: int) -> QuadratureSpec:
    return DEFAULT_2D if dim == 2 else DEFAULT_3D


@lru_cache(maxsize=64)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1), half * w


def spatial_rule(shape: Shape, spec: QuadratureSpec) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``(m, dim)`` and weights ``(m,)`` integrating over the support."""
    if isinstance(shape, Union):
        p1, w1 = spatial_rule(shape.first, spec)
        p2, w2 = spatial_rule(shape.second, spec)
        return np.concatenate([p1, p2]), np.concatenate([w1, w2])
    if spec.scheme == "midpoint":
        return _midpoint_rule(shape, spec.n)
    if isinstance(shape, CurveShape):
        return _fan_rule(shape, spec.n)
    if isinstance(shape, Ball):
        return _ball_rule(shape, spec.n)
    if isinstance(shape, Cube):
        return _cube_rule(shape, spec.n)
    raise QuadratureError(f"no quadrature rule for {shape.kind}")


def _fan_rule(shape: CurveShape, n: int):
    m = 2 * n
    t = 2 * np.pi * np.arange(m) / m
    rho, w_rho = gauss_legendre(n, 0.0, 1.0)
    off = shape.offset(t)
    jac = off[:, 0] * shape.offset_derivative(t)[:, 1] - off[:, 1] * shape.offset_derivative(t)[:, 0]
    pts = np.asarray(shape.center) + rho[:, None, None] * off[None, :, :]
    w = (w_rho * rho)[:, None] * jac[None, :] * (2 * np.pi / m)
    return pts.reshape(-1, 2), w.reshape(-1)


def _ball_rule(shape: Ball, n: int):
    r, w_r = gauss_legendre(n, 0.0, shape.r)
    mu, w_mu = gauss_legendre(n, -1.0, 1.0)
    m = 2 * n
    phi = 2 * np.pi * np.arange(m) / m
    st = np.sqrt(1 - mu ** 2)
    dirs = np.stack([st[:, None] * np.cos(phi), st[:, None] * np.sin(phi),
                     np.repeat(mu[:, None], m, axis=1)], axis=-1)
    pts = np.asarray(shape.center) + r[:, None, None, None] * dirs[None]
    w = (w_r * r ** 2)[:, None, None] * w_mu[None, :, None] * np.full(m, 2 * np.pi / m)[None, None, :]
    return pts.reshape(-1, 3), w.reshape(-1)


def _cube_rule(shape: Cube, n: int):
    axes = []
    weights = []
    for c in shape.center:
        x, w = gauss_legendre(n, c - shape.r, c + shape.r)
        axes.append(x)
        weights.append(w)
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    w = np.einsum("i,j,k->ijk", *weights).reshape(-1)
    return pts, w


def _midpoint_rule(shape: Shape, n: int):
    lo, hi = shape.bounding_box()
    h = (hi - lo) / n
    axes = [l + (np.arange(n) + 0.5) * s for l, s in zip(lo, h)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
    keep = shape.contains(pts)
    return pts[keep], np.full(int(keep.sum()), float(np.prod(h)))
