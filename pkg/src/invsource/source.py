"""Time-dependent sources ``S(x, t)`` and their frequency-domain transform.

``f(x, k) = (2 pi)^{-1/2} int_{t_min}^{t_max} S(x, t) exp(i k t) dt``.
"""
from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import Shape, make_shape
from .quadrature import gauss_legendre
from .special import ball_average, sinc

SQRT_2PI = np.sqrt(2 * np.pi)


class SourceError(ValueError):
    pass


@dataclass(frozen=True)
class SeparableAmplitude:
    """``S(y, t) = scale * p(y) * sum_j c_j t^j``.

    ``spatial`` selects ``p``: ``"constant"`` (1) or ``"radial2"`` (``|y|^2``).
    Time polynomials of degree <= 1 are transformed in closed form.
    """

    spatial: str = "constant"
    scale: float = 1.0
    time_coeffs: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        if self.spatial not in ("constant", "radial2"):
            raise SourceError(f"unknown spatial profile {self.spatial!r}")
        object.__setattr__(self, "time_coeffs", tuple(float(c) for c in self.time_coeffs))
        if not self.time_coeffs:
            raise SourceError("time polynomial needs at least one coefficient")

    separable = True

    def spatial_profile(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if self.spatial == "constant":
            return np.full(pts.shape[:-1], self.scale)
        return self.scale * np.sum(pts ** 2, axis=-1)

    def time_profile(self, t) -> np.ndarray:
        return np.polynomial.polynomial.polyval(np.asarray(t, dtype=float), self.time_coeffs)

    def __call__(self, points, t):
        return self.spatial_profile(points) * self.time_profile(t)

    def time_transform(self, k, t_min: float, t_max: float, n_time: int = 64) -> np.ndarray:
        """``(2 pi)^{-1/2} int q(t) exp(i k t) dt`` over ``[t_min, t_max]``."""
        k = np.asarray(k, dtype=float)
        if len(self.time_coeffs) <= 2:
            return _linear_time_transform(k, self.time_coeffs, t_min, t_max)
        t, w = gauss_legendre(n_time, t_min, t_max)
        phase = np.exp(1j * np.multiply.outer(k, t))
        return phase @ (w * self.time_profile(t)) / SQRT_2PI

    def time_transform_dk(self, k, t_min: float, t_max: float, n_time: int = 64) -> np.ndarray:
        """k-derivative of :meth:`time_transform` by quadrature."""
        t, w = gauss_legendre(n_time, t_min, t_max)
        phase = np.exp(1j * np.multiply.outer(np.asarray(k, dtype=float), t))
        return phase @ (1j * t * w * self.time_profile(t)) / SQRT_2PI

    def describe(self) -> dict:
        return {"type": "separable", "spatial": self.spatial, "scale": self.scale,
                "time_coeffs": list(self.time_coeffs)}


def _linear_time_transform(k, coeffs, a, b):
    c0 = coeffs[0]
    c1 = coeffs[1] if len(coeffs) > 1 else 0.0
    m, h = 0.5 * (a + b), 0.5 * (b - a)
    u = k * h
    base = np.exp(1j * k * m)
    # int_{-h}^{h} s exp(iks) ds = 2i h^3 k g(kh) / 3 with g the 3D ball average
    moment1 = 2j * h ** 3 * k * ball_average(u) / 3
    total = (c0 + c1 * m) * 2 * h * sinc(u) + c1 * moment1
    return base * total / SQRT_2PI


@dataclass(frozen=True)
class FunctionAmplitude:
    """Arbitrary real amplitude ``func(points, t)``; transformed by Gauss-Legendre."""

    func: Callable = field(compare=False)
    label: str = "custom"

    separable = False

    def __call__(self, points, t):
        return np.asarray(self.func(np.asarray(points, dtype=float), np.asarray(t, dtype=float)),
                          dtype=float)

    def describe(self) -> dict:
        return {"type": "function", "label": self.label}


def constant_amplitude(c: float = 1.0) -> SeparableAmplitude:
    return SeparableAmplitude("constant", c, (1.0,))


def quadratic_amplitude() -> SeparableAmplitude:
    """``S(x, t) = 3 |x|^2 (t + 1)``."""
    return SeparableAmplitude("radial2", 3.0, (1.0, 1.0))


AMPLITUDES = {
    "constant": lambda c=1.0: constant_amplitude(c),
    "radial2-linear": lambda scale=3.0, alpha=1.0, beta=1.0: SeparableAmplitude("radial2", scale, (beta, alpha)),
    "constant-linear": lambda scale=1.0, alpha=1.0, beta=1.0: SeparableAmplitude("constant", scale, (beta, alpha)),
    "quadratic": lambda: quadratic_amplitude(),
}


@dataclass(frozen=True)
class SourceModel:
    shape: Shape
    amplitude: SeparableAmplitude | FunctionAmplitude = field(default_factory=constant_amplitude)
    t_min: float = 0.0
    t_max: float = 1.0
    c0: float = 1e-6

    def __post_init__(self):
        if self.t_min < 0:
            raise SourceError("t_min must be non-negative")
        if not self.t_max > self.t_min:
            raise SourceError(f"t_max={self.t_max} must exceed t_min={self.t_min}")
        if self.c0 <= 0:
            raise SourceError("positivity floor c0 must be positive")

    @property
    def T(self) -> float:
        return self.t_max - self.t_min

    @property
    def dim(self) -> int:
        return self.shape.dim

    def __call__(self, points, t):
        return self.amplitude(points, t)

    def spectral_density(self, points, k, n_time: int = 64) -> np.ndarray:
        """``f(y, k)`` for nodes assumed inside the support; shape ``(len(k), m)``."""
        k = np.atleast_1d(np.asarray(k, dtype=float))
        pts = np.asarray(points, dtype=float)
        if self.amplitude.separable:
            q = self.amplitude.time_transform(k, self.t_min, self.t_max, n_time)
            return np.multiply.outer(q, self.amplitude.spatial_profile(pts))
        t, w = gauss_legendre(n_time, self.t_min, self.t_max)
        vals = np.stack([self.amplitude(pts, tl) for tl in t])  # (n_time, m)
        phase = np.exp(1j * np.multiply.outer(k, t))
        return phase @ (w[:, None] * vals) / SQRT_2PI

    def positivity_audit(self, samples: int = 10_000, seed: int = 0) -> float:
        """Smallest amplitude value over random points of the support and period."""
        rng = np.random.default_rng(seed)
        lo, hi = self.shape.bounding_box()
        pts = np.empty((0, self.dim))
        while len(pts) < samples:
            cand = rng.uniform(lo, hi, size=(2 * samples, self.dim))
            pts = np.concatenate([pts, cand[self.shape.contains(cand)]])
        pts = pts[:samples]
        t = rng.uniform(self.t_min, self.t_max, size=samples)
        vals = np.array([self.amplitude(p[None, :], tt)[0] for p, tt in zip(pts, t)]) \
            if not self.amplitude.separable else self.amplitude(pts, t)
        low = float(np.min(vals))
        if low < self.c0:
            warnings.warn(f"source amplitude dips to {low:.3g} below the floor c0={self.c0:g}",
                          stacklevel=2)
        return low

    def describe(self) -> dict:
        return {"shape": self.shape.describe(), "amplitude": self.amplitude.describe(),
                "t_min": self.t_min, "t_max": self.t_max, "c0": self.c0}

    def hash(self) -> str:
        text = json.dumps(self.describe(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def scaled(self, alpha: float) -> "SourceModel":
        amp = self.amplitude
        if not amp.separable:
            raise SourceError("scaling is only supported for separable amplitudes")
        return SourceModel(self.shape, SeparableAmplitude(amp.spatial, amp.scale * alpha, amp.time_coeffs),
                           self.t_min, self.t_max, self.c0)

    def with_period(self, t_min: float, t_max: float) -> "SourceModel":
        return SourceModel(self.shape, self.amplitude, t_min, t_max, self.c0)


def model_from_description(desc: dict) -> SourceModel:
    amp = desc["amplitude"]
    if amp["type"] != "separable":
        raise SourceError("only separable amplitudes can be rebuilt from a description")
    return SourceModel(make_shape(desc["shape"]),
                       SeparableAmplitude(amp["spatial"], amp["scale"], tuple(amp["time_coeffs"])),
                       desc["t_min"], desc["t_max"], desc.get("c0", 1e-6))


def frequency_source(model: SourceModel, x, k):
    """``f(x, k)``; zero for points outside the closed support."""
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    k_arr = np.asarray(k, dtype=float)
    vals = model.spectral_density(pts, k_arr.ravel())
    vals = np.where(model.shape.contains(pts)[None, :], vals, 0.0)
    vals = vals.reshape(k_arr.shape + (len(pts),))
    return vals[..., 0] if single else vals


def conjugate_symmetry_check(model: SourceModel, x, k, rtol: float = 1e-12) -> bool:
    """``f(x, -k) == conj(f(x, k))`` to relative tolerance ``rtol``."""
    k = np.asarray(k, dtype=float)
    plus = frequency_source(model, x, k)
    minus = frequency_source(model, x, -k)
    scale = np.maximum(np.abs(plus), np.finfo(float).tiny)
    return bool(np.all(np.abs(minus - np.conj(plus)) <= rtol * scale))
