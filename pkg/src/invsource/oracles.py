"""Independent numerical checks of the forward model and the probes.

Each check returns a :class:`CheckResult` with the measured quantity and the
bound it is compared against; nothing here raises on a failed check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import sici

from .frequency import FrequencyGrid
from .probes import ProbeSpec, Regime, far_probe
from .quadrature import QuadratureSpec
from .source import SQRT_2PI, SourceModel
from .spectral import SourceSamples, verify_factorization
from .synthesis import FarField, FieldDataset, far_field, near_field, synthesize_dataset, \
    time_domain_far_field


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    bound: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.bound)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"CHECK {self.name} {status} value={self.value:.3e} bound={self.bound:.3e}"
        return text + (f" {self.detail}" if self.detail else "")


def inverse_ft(k, values, t) -> np.ndarray:
    """Trapezoid rule for ``(2 pi)^{-1/2} int values(k) exp(-i k t) dk`` on a uniform ``k``."""
    k = np.asarray(k, dtype=float)
    w = np.full(len(k), k[1] - k[0])
    w[[0, -1]] *= 0.5
    phase = np.exp(-1j * np.multiply.outer(np.asarray(t, dtype=float), k))
    return phase @ (w * values) / SQRT_2PI


def symmetric_band(k_max: float, dk: float) -> np.ndarray:
    n = int(round(k_max / dk))
    return np.arange(-n, n + 1) * (k_max / n)


# -- conjugate symmetry ---------------------------------------------------------

def symmetry_check(dataset: FieldDataset, bound: float = 1e-12) -> CheckResult:
    """``w(-k) = conj(w(k))`` on every stored pair; names the worst ``k``."""
    res = dataset.symmetry_residuals()
    if not res:
        return CheckResult("conjugate-symmetry", 0.0, bound, "no conjugate pairs")
    k, worst = max(res, key=lambda r: r[1])
    return CheckResult("conjugate-symmetry", worst, bound, f"worst_k={k:.17g}")


def direct_symmetry_residual(model: SourceModel, mode, k, quad: QuadratureSpec | None = None) -> float:
    """Largest relative ``|w(-k) - conj(w(k))|`` with both signs evaluated directly."""
    k = np.asarray(k, dtype=float)
    field = far_field if isinstance(mode, FarField) else near_field
    plus = field(model, mode.vector, k, quad)
    minus = field(model, mode.vector, -k, quad)
    return float(np.max(np.abs(minus - np.conj(plus)) / np.abs(plus)))


# -- probe Fourier transform --------------------------------------------------

def probe_box(spec: ProbeSpec, t) -> np.ndarray:
    """Exact inverse transform of the probe: a box of height ``sqrt(2 pi) / |window|``."""
    a, b = _box_edges(spec)
    t = np.asarray(t, dtype=float)
    return np.where((t > a) & (t < b), SQRT_2PI / (b - a), 0.0)


def probe_box_truncated(spec: ProbeSpec, t, k_max: float) -> np.ndarray:
    """Inverse transform of the probe restricted to ``|k| <= k_max`` via sine integrals."""
    a, b = _box_edges(spec)
    t = np.asarray(t, dtype=float)
    si_b = sici(k_max * (b - t))[0]
    si_a = sici(k_max * (a - t))[0]
    return 2 * (si_b - si_a) / (SQRT_2PI * (b - a))


def _box_edges(spec: ProbeSpec):
    lo, hi = spec.window
    proj = float(np.dot(spec.mode.vector, spec.y))
    return lo - proj, hi - proj


def probe_ft_check(spec: ProbeSpec, k_max: float = 40 * np.pi, dk: float = 0.01,
                   margin: float = 0.1, bound: float = 0.05, n_t: int = 801) -> CheckResult:
    """Sup-norm error of the numerical transform against the box, away from its edges."""
    a, b = _box_edges(spec)
    width = b - a
    t = np.linspace(a - width - 1.0, b + width + 1.0, n_t)
    k = symmetric_band(k_max, dk)
    g = inverse_ft(k, far_probe(spec, k), t).real
    height = SQRT_2PI / width
    inside = (t > a + margin) & (t < b - margin)
    outside = (t < a - margin) | (t > b + margin)
    err_in = np.max(np.abs(g[inside] - height)) / height
    err_out = np.max(np.abs(g[outside])) / height
    return CheckResult("probe-ft-box", max(err_in, err_out), bound,
                       f"inside={err_in:.3e} outside={err_out:.3e}")


# -- time domain ----------------------------------------------------------------

def time_domain_check(model: SourceModel, direction, k_max: float = 40 * np.pi, dk: float = 0.05,
                      t_range=(-2.0, 2.0), n_t: int = 201, bound: float = 0.02,
                      quad: QuadratureSpec | None = None) -> CheckResult:
    """Transform of ``w / (4 pi)`` against the slab-integrated time-domain pattern."""
    k = symmetric_band(k_max, dk)
    pos = k[len(k) // 2 + 1:]
    w_pos = far_field(model, direction, pos, quad)
    w_zero = far_field(model, direction, np.array([0.0]), quad)
    w = np.concatenate([np.conj(w_pos[::-1]), w_zero, w_pos])
    t = np.linspace(*t_range, n_t)
    numeric = inverse_ft(k, w / (4 * np.pi), t).real
    exact = time_domain_far_field(model, direction, t)
    peak = np.max(np.abs(exact))
    err = float(np.max(np.abs(numeric - exact)) / peak)
    return CheckResult("time-domain", err, bound, f"peak={peak:.6g}")


def ft_support_check(model: SourceModel, direction, margin: float = 0.05, n_inside: int = 20,
                     bound: float = 1e-14) -> CheckResult:
    """Time-domain pattern vanishes off ``[t_min - sup(d.D), t_max - inf(d.D)]`` and is positive inside."""
    ext = model.shape.support_extent(direction)
    lo, hi = model.t_min - ext.hi, model.t_max - ext.lo
    outside = np.concatenate([np.linspace(lo - 2.0, lo - 1e-9, 25), np.linspace(hi + 1e-9, hi + 2.0, 25)])
    inside = np.linspace(lo + margin, hi - margin, n_inside)
    off = float(np.max(np.abs(time_domain_far_field(model, direction, outside))))
    on = time_domain_far_field(model, direction, inside)
    positive = bool(np.all(on > 0))
    value = off if positive else np.inf
    return CheckResult("ft-support", value, bound, f"outside_max={off:.3e} min_inside={np.min(on):.3e}")


# -- factorization ----------------------------------------------------------------

def factorization_check(model: SourceModel, mode, grid: FrequencyGrid, dataset: FieldDataset | None = None,
                        coarse: int = 4, bound: float = 5e-2, min_ratio: float = 3.0,
                        scheme: str = "fitted") -> CheckResult:
    """Residual of the data matrix against ``L T L*`` built on an independent rule.

    The rule is evaluated at ``coarse`` and ``2 * coarse`` nodes per axis; the
    check fails if the finer residual exceeds ``bound`` or the reduction is
    below ``min_ratio``.
    """
    if dataset is None:
        dataset = synthesize_dataset(model, mode, grid)
    res = []
    for n in (coarse, 2 * coarse):
        samples = SourceSamples.from_model(model, QuadratureSpec(scheme, n, n))
        res.append(verify_factorization(model, mode, grid, samples, dataset))
    ratio = res[0] / res[1] if res[1] > 0 else np.inf
    value = res[1] if ratio >= min_ratio else np.inf
    return CheckResult("factorization", value, bound,
                       f"coarse={res[0]:.3e} fine={res[1]:.3e} ratio={ratio:.3g}")


def default_probe(dim: int = 2) -> ProbeSpec:
    d = (1.0,) + (0.0,) * (dim - 1)
    y = (0.3,) + (0.2,) * (dim - 1)
    return ProbeSpec(Regime.TMAX_UNKNOWN, 1.0, 0.0, FarField(d), y)
