"""Forward data: multi-frequency far-field and near-field samples.

``w_inf(d, k) = int_D exp(-i k d.y) f(y, k) dy`` and
``w(x, k) = int_D exp(i k |x-y|) / (4 pi |x-y|) f(y, k) dy``.
The same far-field formula is used in 2D and 3D.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .frequency import FrequencyGrid
from .geometry import Ball, CurveShape, GeometryError, Shape, Union, _as_unit
from .quadrature import QuadratureSpec, default_spec, gauss_legendre, spatial_rule
from .source import SourceModel

_CHUNK = 1 << 21
# polygon used to locate chord end points before Newton refinement
_CHORD_VERTICES = 1024


class SynthesisError(ValueError):
    pass


class IncompleteDatasetError(SynthesisError):
    pass


@dataclass(frozen=True)
class FarField:
    direction: tuple[float, ...]
    kind = "far"

    def __post_init__(self):
        object.__setattr__(self, "direction", tuple(float(v) for v in self.direction))
        _as_unit(self.direction, len(self.direction))

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.direction)

    def opposite(self) -> "FarField":
        return FarField(tuple(-v for v in self.direction))

    def describe(self):
        return {"mode": "far", "direction": list(self.direction)}


@dataclass(frozen=True)
class NearField:
    receiver: tuple[float, ...]
    kind = "near"

    def __post_init__(self):
        object.__setattr__(self, "receiver", tuple(float(v) for v in self.receiver))
        if len(self.receiver) != 3:
            raise SynthesisError("near-field receivers are 3D points")

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.receiver)

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.vector))

    def opposite(self) -> "NearField":
        return NearField(tuple(-v for v in self.receiver))

    def describe(self):
        return {"mode": "near", "receiver": list(self.receiver)}


@dataclass
class FieldDataset:
    """Samples at the grid's ``2N - 1`` wavenumbers, ascending in ``k``."""

    mode: FarField | NearField
    grid: FrequencyGrid
    wavenumbers: np.ndarray
    values: np.ndarray
    manifest: dict = field(default_factory=dict)

    def __post_init__(self):
        self.wavenumbers = np.asarray(self.wavenumbers, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.wavenumbers.shape != self.values.shape:
            raise SynthesisError("wavenumbers and values differ in length")

    @property
    def model_hash(self) -> str:
        return self.manifest.get("model_hash", "")

    def sample_at_offsets(self) -> np.ndarray:
        """Values ordered by offset ``d = -(N-1) .. N-1`` (``k = k_c + (d + 1/2) dk``)."""
        expected = self.grid.sample_wavenumbers
        out = np.empty(len(expected), dtype=complex)
        tol = 1e-9 * max(1.0, self.grid.dk)
        for i, k in enumerate(expected):
            hit = np.nonzero(np.abs(self.wavenumbers - k) <= tol)[0]
            if len(hit) == 0:
                raise IncompleteDatasetError(f"dataset lacks the sample at k = {k!r}")
            out[i] = self.values[hit[0]]
        return out

    def conjugate_pairs(self):
        """Index pairs ``(i, j)`` with ``k_j == -k_i`` and ``k_i > 0``."""
        pairs = []
        k = self.wavenumbers
        tol = 1e-9 * max(1.0, self.grid.dk)
        for i in np.nonzero(k > 0)[0]:
            j = np.nonzero(np.abs(k + k[i]) <= tol)[0]
            if len(j):
                pairs.append((int(i), int(j[0])))
        return pairs

    def symmetry_residuals(self) -> list[tuple[float, float]]:
        """``(k, |w(-k) - conj(w(k))| / |w(k)|)`` for every conjugate pair."""
        out = []
        for i, j in self.conjugate_pairs():
            a, b = self.values[i], self.values[j]
            scale = max(abs(a), np.finfo(float).tiny)
            out.append((float(self.wavenumbers[i]), float(abs(b - np.conj(a)) / scale)))
        return out


# -- field evaluators ---------------------------------------------------------

def _resolve(model: SourceModel, quad: QuadratureSpec | None) -> QuadratureSpec:
    quad = quad or default_spec(model.dim)
    if quad.n < 1 or quad.n_time < 1:
        raise SynthesisError("degenerate quadrature spec")
    return quad


def _weighted_field(model, points, coeffs, phase, k, quad):
    """``sum_j coeffs_j exp(i k phase_j) f(y_j, k)`` for each ``k``."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    out = np.empty(k.shape, dtype=complex)
    m = max(len(points), 1)
    step = max(1, _CHUNK // m)
    amp = model.amplitude
    if amp.separable:
        c = coeffs * amp.spatial_profile(points)
        q = amp.time_transform(k, model.t_min, model.t_max, quad.n_time)
        for lo in range(0, len(k), step):
            kk = k[lo:lo + step]
            out[lo:lo + step] = np.exp(1j * np.multiply.outer(kk, phase)) @ c
        return out * q
    for lo in range(0, len(k), step):
        kk = k[lo:lo + step]
        f = model.spectral_density(points, kk, quad.n_time)
        out[lo:lo + step] = np.sum(np.exp(1j * np.multiply.outer(kk, phase)) * f * coeffs, axis=1)
    return out


def far_field(model: SourceModel, direction, k, quad: QuadratureSpec | None = None):
    quad = _resolve(model, quad)
    d = _as_unit(direction, model.dim)
    pts, w = spatial_rule(model.shape, quad)
    vals = _weighted_field(model, pts, w, -(pts @ d), k, quad)
    return vals[0] if np.ndim(k) == 0 else vals


def near_field(model: SourceModel, receiver, k, quad: QuadratureSpec | None = None):
    quad = _resolve(model, quad)
    if model.dim != 3:
        raise SynthesisError("near-field data use the 3D Helmholtz kernel")
    x = np.asarray(receiver, dtype=float)
    if model.shape.contains(x):
        raise GeometryError(f"receiver {x.tolist()} lies in the support: singular kernel")
    pts, w = spatial_rule(model.shape, quad)
    r = np.linalg.norm(x - pts, axis=1)
    vals = _weighted_field(model, pts, w / (4 * np.pi * r), r, k, quad)
    return vals[0] if np.ndim(k) == 0 else vals


def _evaluate(model, mode, k, quad):
    if isinstance(mode, FarField):
        return far_field(model, mode.direction, k, quad)
    return near_field(model, mode.receiver, k, quad)


def synthesize_dataset(model: SourceModel, mode: FarField | NearField, grid: FrequencyGrid,
                       quad: QuadratureSpec | None = None, threads: int = 1) -> FieldDataset:
    """Evaluate the field at the grid's ``2N - 1`` wavenumbers.

    For a symmetric band only ``k > 0`` is integrated; ``k < 0`` is filled by
    conjugation.
    """
    quad = _resolve(model, quad)
    ks = grid.sample_wavenumbers
    if grid.is_symmetric:
        todo = ks[ks > 0]
    else:
        todo = ks
    # fixed partition so results do not depend on the worker count
    parts = [todo[i:i + 4] for i in range(0, len(todo), 4)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            chunks = list(pool.map(lambda kk: _evaluate(model, mode, kk, quad), parts))
    else:
        chunks = [_evaluate(model, mode, kk, quad) for kk in parts]
    computed = np.concatenate(chunks)
    if grid.is_symmetric:
        values = np.empty(len(ks), dtype=complex)
        lookup = dict(zip(todo.tolist(), computed))
        for i, k in enumerate(ks):
            # (d+1/2)dk mirrored is (-d-1+1/2)dk: the same float magnitude
            values[i] = lookup[k] if k > 0 else np.conj(lookup[-k])
    else:
        values = computed
    manifest = {
        "model": model.describe(),
        "model_hash": model.hash(),
        "grid": grid.describe(),
        "observation": mode.describe(),
        "quadrature": quad.describe(),
    }
    return FieldDataset(mode, grid, ks, values, manifest)


def inject_noise(dataset: FieldDataset, level: float, seed: int = 0) -> FieldDataset:
    """Add complex Gaussian noise of relative size ``level`` to each sample.

    Positive-k samples are perturbed and mirrored by conjugation so symmetric
    pairs survive.
    """
    if level < 0:
        raise SynthesisError("noise level must be non-negative")
    if level == 0:
        return replace(dataset, values=dataset.values.copy(), manifest=dict(dataset.manifest))
    rng = np.random.default_rng(seed)
    vals = dataset.values.copy()
    noise = (rng.standard_normal(len(vals)) + 1j * rng.standard_normal(len(vals))) / np.sqrt(2)
    vals = vals + level * np.abs(vals) * noise
    for i, j in dataset.conjugate_pairs():
        vals[j] = np.conj(vals[i])
    manifest = dict(dataset.manifest)
    manifest["noise"] = {"level": level, "seed": seed}
    return replace(dataset, values=vals, manifest=manifest)


# -- time-domain far field ------------------------------------------------------

def time_domain_far_field(model: SourceModel, direction, t, c: float = 1.0,
                          n_slab: int = 256, n_chord: int = 32) -> np.ndarray:
    """``U_inf(d, t) = (1/4pi) int_D S(y, t + d.y / c) dy``.

    The support is sliced perpendicular to ``d``: Gauss-Legendre over the
    admissible slab positions and along each chord (2D) or slice disk (ball).
    """
    d = _as_unit(direction, model.dim)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    comps = model.shape.components if isinstance(model.shape, Union) else (model.shape,)
    parts = [(comp, comp.support_extent(d)) for comp in comps]
    out = np.array([sum(_tdff_single(model, comp, ext, d, tt, c, n_slab, n_chord) for comp, ext in parts)
                    for tt in ts])
    return out[0] if np.ndim(t) == 0 else out


def _tdff_single(model, shape, ext, d, t, c, n_slab, n_chord) -> float:
    # admissible s = d.y with t_min <= t + s/c <= t_max
    lo = max(ext.lo, c * (model.t_min - t))
    hi = min(ext.hi, c * (model.t_max - t))
    if hi <= lo:
        return 0.0
    s, ws = gauss_legendre(n_slab, lo, hi)
    if isinstance(shape, CurveShape):
        pts, wp = _chord_nodes(shape, d, s, n_chord)
    elif isinstance(shape, Ball):
        pts, wp = _disk_slice_nodes(shape, d, s, n_chord)
    else:
        return _tdff_masked(model, shape, d, t, c)
    # pts: (n_slab, q, dim); wp: (n_slab, q)
    vals = model.amplitude(pts, (t + s / c)[:, None])
    return float(np.sum(ws * np.sum(wp * vals, axis=1)) / (4 * np.pi))


def _chord_nodes(shape: CurveShape, d, s, n_chord):
    e = np.array([-d[1], d[0]])
    v = shape.boundary_samples(_CHORD_VERTICES)
    sig = v @ d
    sig2 = np.roll(sig, -1)
    ss = s[:, None]
    cross = ((sig <= ss) & (ss < sig2)) | ((sig2 <= ss) & (ss < sig))
    rows, cols = np.nonzero(cross)
    target = s[rows]
    frac = (target - sig[cols]) / (sig2[cols] - sig[cols])
    # polygon crossing as the start, then Newton on d.x(t) = s along the exact curve
    m = len(sig)
    tp = 2 * np.pi * (cols + frac) / m
    for _ in range(3):
        slope = shape.boundary_tangent(tp) @ d
        safe = np.where(np.abs(slope) > 1e-12, slope, 1.0)
        step = np.where(np.abs(slope) > 1e-12, (shape.boundary_point(tp) @ d - target) / safe, 0.0)
        tp = tp - np.clip(step, -2 * np.pi / m, 2 * np.pi / m)
    u = np.full(cross.shape, np.inf)
    u[rows, cols] = shape.boundary_point(tp) @ e
    count = cross.sum(axis=1)
    width = int(count.max())
    u = np.sort(np.partition(u, width - 1, axis=1)[:, :width], axis=1)
    g, wg = np.polynomial.legendre.leggauss(n_chord)
    lo_u, hi_u = u[:, 0::2], u[:, 1::2]
    valid = np.isfinite(lo_u) & np.isfinite(hi_u)
    lo_u = np.where(valid, lo_u, 0.0)
    hi_u = np.where(valid, hi_u, 0.0)
    half = 0.5 * (hi_u - lo_u)
    nodes = lo_u[..., None] + half[..., None] * (g + 1)  # (ns, intervals, q)
    weights = half[..., None] * wg
    pts = ss[..., None, None] * d + nodes[..., None] * e
    ns = len(s)
    return pts.reshape(ns, -1, 2), weights.reshape(ns, -1)


def _disk_slice_nodes(shape: Ball, d, s, n_chord):
    # orthonormal frame (d, e1, e2)
    a = np.eye(3)[np.argmin(np.abs(d))]
    e1 = np.cross(d, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    cd = float(np.asarray(shape.center) @ d)
    rad = np.sqrt(np.clip(shape.r ** 2 - (s - cd) ** 2, 0.0, None))
    rho, wr = gauss_legendre(n_chord, 0.0, 1.0)
    m = 2 * n_chord
    phi = 2 * np.pi * np.arange(m) / m
    base = np.asarray(shape.center) - cd * d
    ring = np.cos(phi)[:, None] * e1 + np.sin(phi)[:, None] * e2  # (m, 3)
    pts = (base + s[:, None, None, None] * d
           + (rad[:, None, None, None] * rho[None, :, None, None]) * ring[None, None])
    w = (rad[:, None] ** 2) * (wr * rho)[None, :]
    w = np.repeat(w[:, :, None], m, axis=2) * (2 * np.pi / m)
    return pts.reshape(len(s), -1, 3), w.reshape(len(s), -1)


def _tdff_masked(model, shape, d, t, c, n: int = 48):
    pts, w = spatial_rule(shape, QuadratureSpec("fitted", n, 1))
    tt = t + (pts @ d) / c
    inside = (tt >= model.t_min) & (tt <= model.t_max)
    vals = model.amplitude(pts[inside], tt[inside])
    return float(np.sum(w[inside] * vals) / (4 * np.pi))


def manifest_json(manifest: dict) -> str:
    return json.dumps(manifest, sort_keys=True, separators=(",", ":"))
