"""Picard-series indicators, grid sweeps and the eta-scan.

For one data set the auxiliary indicator of a sampling point is the Picard sum
of its probe vector; summing over an opposite pair (or several pairs) and
taking the reciprocal gives an indicator that is large inside the strip (or
annulus) intersection and nearly zero elsewhere.
"""
from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

from .frequency import FrequencyGrid
from .probes import ProbeSpec, Regime, discretize_probe, probe_matrix, time_window
from .spectral import EPS_REG, OperatorSpectrum, dataset_spectrum
from .synthesis import FieldDataset

CHUNK = 4096


class ImagingError(ValueError):
    pass


class MissingOppositeError(ImagingError):
    pass


def picard_sum(spectrum: OperatorSpectrum, probe_vec) -> float:
    """``sum_n |<probe, psi_n>|^2 / max(lambda_n, eps_reg)``."""
    return float(picard_sums(spectrum, np.asarray(probe_vec)[None, :])[0])


def picard_sums(spectrum: OperatorSpectrum, probes) -> np.ndarray:
    """Row-wise :func:`picard_sum` for a ``(m, N)`` stack of probe vectors."""
    probes = np.asarray(probes, dtype=complex)
    if probes.shape[-1] != spectrum.n:
        raise ImagingError(f"probe length {probes.shape[-1]} does not match spectrum size {spectrum.n}")
    coeff = probes @ spectrum.vectors.conj()
    return (np.abs(coeff) ** 2) @ (1.0 / spectrum.scaled_floor())


@dataclass
class Observation:
    """A data set together with its (once computed) spectrum."""

    dataset: FieldDataset
    spectrum: OperatorSpectrum

    @classmethod
    def from_dataset(cls, dataset: FieldDataset, method: str = "abs-sum") -> "Observation":
        return cls(dataset, dataset_spectrum(dataset, method))

    @property
    def mode(self):
        return self.dataset.mode

    @property
    def key(self) -> tuple:
        return (self.mode.kind,) + tuple(float(v) for v in self.mode.vector)


def _sorted_observations(items, method="abs-sum") -> list[Observation]:
    obs = [o if isinstance(o, Observation) else Observation.from_dataset(o, method) for o in items]
    if not obs:
        raise ImagingError("need at least one observation")
    return sorted(obs, key=lambda o: o.key)


def _check_pairs(obs: list[Observation], tol: float = 1e-12):
    vecs = np.array([o.mode.vector for o in obs])
    for o in obs:
        if not np.any(np.linalg.norm(vecs + o.mode.vector, axis=1) <= tol):
            raise MissingOppositeError(
                f"no data for the observation opposite to {o.mode.describe()}")


def _check_grids(obs: list[Observation]) -> FrequencyGrid:
    grid = obs[0].dataset.grid
    kinds = {o.mode.kind for o in obs}
    if len(kinds) > 1:
        raise ImagingError("cannot mix far-field and near-field data")
    for o in obs[1:]:
        if o.dataset.grid != grid:
            raise ImagingError(f"frequency grids differ: {grid.describe()} vs {o.dataset.grid.describe()}")
    return grid


def pair_indicator(spec: ProbeSpec, spectrum, opposite_spectrum, grid: FrequencyGrid) -> float:
    """``[I^{(d)}(y) + I^{(-d)}(y)]^{-1}`` for the probe ``spec`` and its mirror."""
    if opposite_spectrum is None:
        raise MissingOppositeError("the pair indicator needs the opposite observation")
    total = picard_sum(spectrum, discretize_probe(spec, grid)) \
        + picard_sum(opposite_spectrum, discretize_probe(spec.opposite(), grid))
    return 1.0 / total if total > 0 else np.inf


def multi_indicator(spec: ProbeSpec, observations, grid: FrequencyGrid | None = None) -> float:
    """Reciprocal of the Picard sums over all observations (pairs required)."""
    obs = _sorted_observations(observations)
    _check_pairs(obs)
    grid = grid or _check_grids(obs)
    total = 0.0
    for o in obs:
        total += picard_sum(o.spectrum, discretize_probe(replace(spec, mode=o.mode), grid))
    return 1.0 / total if total > 0 else np.inf


# -- lattice sweeps ------------------------------------------------------------

@dataclass(frozen=True)
class SearchBox:
    lo: tuple
    hi: tuple
    counts: tuple

    def __post_init__(self):
        if not (len(self.lo) == len(self.hi) == len(self.counts)):
            raise ImagingError("search box bounds and counts must have the same length")
        if any(c < 1 for c in self.counts):
            raise ImagingError("each axis needs at least one point")
        if any(h < l for l, h in zip(self.lo, self.hi)):
            raise ImagingError("search box upper bounds must not be below lower bounds")

    @classmethod
    def cube(cls, half: float, count: int, dim: int) -> "SearchBox":
        return cls((-half,) * dim, (half,) * dim, (count,) * dim)

    @property
    def dim(self) -> int:
        return len(self.counts)

    def axes(self) -> list[np.ndarray]:
        return [np.linspace(l, h, c) if c > 1 else np.array([0.5 * (l + h)])
                for l, h, c in zip(self.lo, self.hi, self.counts)]

    def points(self) -> np.ndarray:
        """Lattice points, first axis varying slowest."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def describe(self):
        return {"lo": list(self.lo), "hi": list(self.hi), "counts": list(self.counts)}


@dataclass
class IndicatorGrid:
    axes: list
    raw: np.ndarray
    normalized: np.ndarray
    manifest: dict = field(default_factory=dict)
    mask: np.ndarray | None = None

    @property
    def shape(self) -> tuple:
        return tuple(len(a) for a in self.axes)

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def normalize(raw) -> np.ndarray:
    raw = np.asarray(raw, dtype=float)
    top = raw.max() if raw.size else 0.0
    return raw / top if top > 0 else np.zeros_like(raw)


def sweep_values(observations: list[Observation], points, regime, eta: float, known: float,
                 eps: float = 0.0, threads: int = 1, chunk: int = CHUNK) -> np.ndarray:
    """Summed Picard series at each point; fixed chunks and summation order."""
    points = np.asarray(points, dtype=float)
    grid = observations[0].dataset.grid
    taus = grid.tau

    def work(lo):
        pts = points[lo:lo + chunk]
        total = np.zeros(len(pts))
        for o in observations:
            total = total + picard_sums(o.spectrum, probe_matrix(regime, eta, known, o.mode, pts, taus, eps))
        return total

    starts = range(0, len(points), chunk)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    return np.concatenate(parts) if parts else np.zeros(0)


def grid_sweep(datasets, box: SearchBox, eta: float = 0.1, regime=Regime.TMAX_UNKNOWN,
               known: float = 0.0, eps: float = 0.0, threads: int = 1,
               method: str = "abs-sum", chunk: int = CHUNK) -> IndicatorGrid:
    """Multi-observation indicator on the lattice of ``box``."""
    regime = Regime(regime)
    time_window(regime, eta, known)
    obs = _sorted_observations(datasets, method)
    grid = _check_grids(obs)
    _check_pairs(obs)
    if box.dim != len(obs[0].mode.vector):
        raise ImagingError(f"search box is {box.dim}D but the data are {len(obs[0].mode.vector)}D")
    sums = sweep_values(obs, box.points(), regime, eta, known, eps, threads, chunk)
    with np.errstate(divide="ignore"):
        raw = np.where(sums > 0, 1.0 / np.where(sums > 0, sums, 1.0), np.inf)
    raw = raw.reshape(box.counts)
    manifest = {
        "observations": [o.mode.describe() for o in obs],
        "model_hashes": sorted({o.dataset.model_hash for o in obs}),
        "regime": regime.value, "eta": eta, "known": known, "eps": eps,
        "grid": grid.describe(), "eps_reg": EPS_REG, "method": method,
        "box": box.describe(),
    }
    return IndicatorGrid(box.axes(), raw, normalize(raw), manifest)


def threshold_mask(grid: IndicatorGrid, delta: float) -> np.ndarray:
    if not 0 < delta <= 1:
        raise ImagingError(f"threshold delta={delta} must lie in (0, 1]")
    mask = grid.normalized >= delta
    grid.mask = mask
    grid.manifest["delta"] = delta
    return mask


def connected_components(mask) -> tuple[np.ndarray, int]:
    """Face-connected labelling of a boolean lattice."""
    return ndimage.label(np.asarray(mask, dtype=bool))


# -- eta scan ------------------------------------------------------------------

DROP_THRESHOLD = 2.0


@dataclass
class ScanCurve:
    etas: np.ndarray
    values: np.ndarray
    z: tuple
    eps: float
    estimate: float | None
    resolution: float
    manifest: dict = field(default_factory=dict)

    @property
    def normalized(self) -> np.ndarray:
        return normalize(self.values)

    def value_at(self, eta: float) -> float:
        idx = int(np.argmin(np.abs(self.etas - eta)))
        return float(self.normalized[idx])


def detect_drop(etas, values, threshold: float = DROP_THRESHOLD, decreasing: bool = False):
    """Location of the steepest proportional drop of ``values`` along the scan.

    For a decreasing scan the drop is sought while ``eta`` decreases.  Returns
    ``None`` when no step falls faster than ``threshold`` (in log units per
    unit ``eta``).
    """
    etas = np.asarray(etas, dtype=float)
    vals = np.asarray(values, dtype=float)
    if len(etas) < 2:
        return None
    logs = np.log(np.maximum(vals, np.finfo(float).tiny))
    rate = -np.diff(logs) / np.diff(etas)
    if decreasing:
        rate = -rate
    best = int(np.argmax(rate))
    if rate[best] < threshold:
        return None
    return float(0.5 * (etas[best] + etas[best + 1]))


def boundary_scan_point(shape, direction, regime, eps0: float = 0.01, samples: int = 4096) -> np.ndarray:
    """Test point at distance ``eps0`` inside the strip edge used by the scan.

    ``TMAX_UNKNOWN`` uses the lower edge ``inf(d.D)``, ``TMIN_UNKNOWN`` the
    upper edge ``sup(d.D)``.
    """
    d = np.asarray(direction, dtype=float)
    ext = shape.support_extent(d, samples)
    if Regime(regime) is Regime.TMAX_UNKNOWN:
        return (ext.lo + eps0) * d
    return (ext.hi - eps0) * d


def moment_scan(dataset: FieldDataset, z, etas, regime=Regime.TMAX_UNKNOWN, known: float = 0.0,
                eps: float = 0.0, opposite: FieldDataset | None = None, method: str = "abs-sum",
                threshold: float = DROP_THRESHOLD) -> ScanCurve:
    """``eta -> 1 / I_eta(z)`` and the detected unknown moment."""
    regime = Regime(regime)
    etas = np.asarray(etas, dtype=float)
    if regime is Regime.TMIN_UNKNOWN:
        etas = np.sort(etas)
    manifest = {"regime": regime.value, "known": known, "eps": eps,
                "observation": dataset.mode.describe(), "model_hash": dataset.model_hash,
                "grid": dataset.grid.describe(), "method": method, "warnings": []}
    ok = (etas > known) if regime is Regime.TMAX_UNKNOWN else (etas < known)
    if not np.all(ok):
        raise ImagingError("eta range leaves the admissible half-line of the regime")
    obs = [Observation.from_dataset(dataset, method)]
    if opposite is not None:
        obs.append(Observation.from_dataset(opposite, method))
    z = np.asarray(z, dtype=float)
    if "model" in dataset.manifest:
        from .geometry import make_shape
        shape = make_shape(dataset.manifest["model"]["shape"])
        ext = shape.support_extent(dataset.mode.vector)
        proj = float(z @ dataset.mode.vector)
        gap = proj - ext.lo if regime is Regime.TMAX_UNKNOWN else ext.hi - proj
        if not 0 <= gap <= 0.1:
            msg = f"test point sits {gap:.3g} from the strip edge; small positive offsets are expected"
            manifest["warnings"].append(msg)
            warnings.warn(msg, stacklevel=2)
    values = np.empty(len(etas))
    for i, eta in enumerate(etas):
        values[i] = 1.0 / sweep_values(obs, z[None, :], regime, eta, known, eps)[0]
    est = detect_drop(etas, values, threshold, decreasing=regime is Regime.TMIN_UNKNOWN)
    res = float(np.min(np.diff(etas))) if len(etas) > 1 else 0.0
    return ScanCurve(etas, values, tuple(float(v) for v in z), eps, est, res, manifest)
