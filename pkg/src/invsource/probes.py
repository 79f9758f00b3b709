"""Test functions for the range criteria.

A probe averages ``exp(i k (t - d.y))`` (far field) or ``exp(i k (t + |x - y|))``
(near field) over a time window whose free end is ``eta``:

* ``TMAX_UNKNOWN``: window ``[t_min, eta]`` with ``eta > t_min``;
* ``TMIN_UNKNOWN``: window ``[eta, t_max]`` with ``eta < t_max``.

An optional radius ``eps > 0`` also averages ``y`` over the ball ``B_eps(y)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .frequency import FrequencyGrid
from .geometry import Ball
from .quadrature import QuadratureSpec, spatial_rule
from .special import ball_average, disk_average, window_average
from .synthesis import FarField, NearField


class ProbeError(ValueError):
    pass


class Regime(str, Enum):
    TMAX_UNKNOWN = "TmaxUnknown"
    TMIN_UNKNOWN = "TminUnknown"


@dataclass(frozen=True)
class ProbeSpec:
    """Parameters of one probe.

    ``known`` is the known moment: ``t_min`` for ``TMAX_UNKNOWN`` and
    ``t_max`` for ``TMIN_UNKNOWN``.
    """

    regime: Regime
    eta: float
    known: float
    mode: FarField | NearField
    y: tuple = field(default=(0.0, 0.0))
    eps: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if self.eps < 0:
            raise ProbeError("ball radius eps must be non-negative")
        check_window(self.regime, self.eta, self.known)
        if len(self.y) != len(self.mode.vector):
            raise ProbeError(f"sampling point has dimension {len(self.y)}, "
                             f"observation has {len(self.mode.vector)}")

    @property
    def window(self) -> tuple[float, float]:
        return time_window(self.regime, self.eta, self.known)

    def at(self, y) -> "ProbeSpec":
        return ProbeSpec(self.regime, self.eta, self.known, self.mode, tuple(y), self.eps)

    def opposite(self) -> "ProbeSpec":
        return ProbeSpec(self.regime, self.eta, self.known, self.mode.opposite(), self.y, self.eps)


def check_window(regime, eta: float, known: float):
    regime = Regime(regime)
    if regime is Regime.TMAX_UNKNOWN and not eta > known:
        raise ProbeError(f"eta={eta} must exceed the known t_min={known}")
    if regime is Regime.TMIN_UNKNOWN and not eta < known:
        raise ProbeError(f"eta={eta} must lie below the known t_max={known}")


def time_window(regime, eta: float, known: float) -> tuple[float, float]:
    check_window(regime, eta, known)
    if Regime(regime) is Regime.TMAX_UNKNOWN:
        return float(known), float(eta)
    return float(eta), float(known)


def _time_factor(spec: ProbeSpec, k):
    a, b = spec.window
    return window_average(k, a, b)


def far_probe(spec: ProbeSpec, k):
    """Far-field probe with ``eps = 0``; equals 1 at ``k = 0``."""
    if not isinstance(spec.mode, FarField):
        raise ProbeError("far_probe needs a far-field observation")
    k = np.asarray(k, dtype=float)
    proj = float(np.dot(spec.mode.vector, spec.y))
    return _time_factor(spec, k) * np.exp(-1j * k * proj)


def far_probe_ball(spec: ProbeSpec, k):
    """Far-field probe averaged over ``B_eps(y)``."""
    if spec.eps <= 0:
        raise ProbeError("far_probe_ball needs eps > 0")
    k = np.asarray(k, dtype=float)
    return far_probe(spec, k) * _ball_factor(k * spec.eps, len(spec.y))


def _ball_factor(u, dim):
    return disk_average(u) if dim == 2 else ball_average(u)


def near_probe(spec: ProbeSpec, k, quad: QuadratureSpec | None = None):
    """Near-field probe; ``eps > 0`` is averaged over the ball by quadrature."""
    if not isinstance(spec.mode, NearField):
        raise ProbeError("near_probe needs a near-field observation")
    k = np.asarray(k, dtype=float)
    y = np.asarray(spec.y)
    if spec.eps == 0:
        dist = float(np.linalg.norm(spec.mode.vector - y))
        if dist == 0:
            raise ProbeError("sampling point coincides with the receiver")
        return _time_factor(spec, k) * np.exp(1j * k * dist)
    pts, w = spatial_rule(Ball(tuple(y), spec.eps), quad or QuadratureSpec("fitted", 12, 1))
    dist = np.linalg.norm(pts - spec.mode.vector, axis=1)
    avg = np.exp(1j * np.multiply.outer(k, dist)) @ w / w.sum()
    return _time_factor(spec, k) * avg


def probe(spec: ProbeSpec, k):
    if isinstance(spec.mode, NearField):
        return near_probe(spec, k)
    return far_probe_ball(spec, k) if spec.eps > 0 else far_probe(spec, k)


def discretize_probe(spec: ProbeSpec, grid: FrequencyGrid, expected: FrequencyGrid | None = None):
    """Probe values at ``tau_1 .. tau_N``."""
    if expected is not None and expected != grid:
        raise ProbeError(f"probe grid {grid.describe()} does not match spectrum grid "
                         f"{expected.describe()}")
    return np.asarray(probe(spec, grid.tau), dtype=complex)


def probe_matrix(regime, eta: float, known: float, mode, points, taus,
                 eps: float = 0.0) -> np.ndarray:
    """Probe vectors for many sampling points at once, shape ``(len(points), len(taus))``.

    Near-field probes with ``eps = 0`` are evaluated by the closed form even at
    the receiver itself, where the phase is simply 1.
    """
    a, b = time_window(regime, eta, known)
    taus = np.asarray(taus, dtype=float)
    pts = np.asarray(points, dtype=float)
    factor = window_average(taus, a, b)
    if isinstance(mode, FarField):
        phase = np.exp(-1j * np.multiply.outer(pts @ mode.vector, taus))
        if eps > 0:
            factor = factor * _ball_factor(taus * eps, pts.shape[1])
        return phase * factor
    if eps > 0:
        return np.stack([discretize_vec(ProbeSpec(regime, eta, known, mode, p, eps), taus)
                         for p in pts])
    dist = np.linalg.norm(pts - mode.vector, axis=1)
    return np.exp(1j * np.multiply.outer(dist, taus)) * factor


def discretize_vec(spec: ProbeSpec, taus):
    return np.asarray(probe(spec, taus), dtype=complex)
