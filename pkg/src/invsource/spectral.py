"""Discrete far/near-field operators and their eigensystems.

The operator ``(F phi)(tau) = int_0^K w(k_c + tau - s) phi(s) ds`` is
discretised by the rectangle rule on ``tau_n = n dk``, ``s_m = (m - 1/2) dk``,
which gives a Toeplitz matrix built from the ``2N - 1`` data samples.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .frequency import FrequencyGrid
from .quadrature import QuadratureSpec, default_spec, gauss_legendre, spatial_rule
from .source import SQRT_2PI, SourceModel
from .synthesis import FarField, FieldDataset, NearField, synthesize_dataset

EPS_REG = 1e-12


class SpectralError(RuntimeError):
    pass


def assemble_toeplitz(dataset: FieldDataset) -> np.ndarray:
    """``M[n, m] = dk * w(k_c + tau_n - s_m) = dk * w(k_c + (n - m + 1/2) dk)``."""
    grid = dataset.grid
    n = grid.n
    v = dataset.sample_at_offsets()  # index d + n - 1 for offset d
    col = v[n - 1:]
    row = v[n - 1::-1]
    return grid.dk * la.toeplitz(col, row)


@dataclass
class OperatorSpectrum:
    """Eigensystem of a discrete operator with the sharpened eigenvalues.

    ``vectors[:, i]`` pairs with ``raw[i]`` and ``sharp[i]``.
    """

    matrix: np.ndarray
    raw: np.ndarray
    vectors: np.ndarray
    sharp: np.ndarray
    floor: float
    method: str = "abs-sum"

    @property
    def n(self) -> int:
        return len(self.sharp)

    def scaled_floor(self) -> np.ndarray:
        return np.maximum(self.sharp, self.floor)

    def residuals(self) -> np.ndarray:
        if self.method != "abs-sum":
            return np.zeros(self.n)
        r = self.matrix @ self.vectors - self.vectors * self.raw
        return np.linalg.norm(r, axis=0)


def eigensystem(matrix, method: str = "abs-sum", eps_reg: float = EPS_REG,
                residual_tol: float = 1e-10) -> OperatorSpectrum:
    """Eigen-decompose ``matrix`` and sharpen its spectrum.

    ``method="abs-sum"``: eigenpairs of the matrix itself with
    ``lambda = |Re lambda~| + |Im lambda~|`` and unchanged eigenvectors.
    ``method="exact"``: eigenpairs of the Hermitian ``|Re M| + |Im M|``.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SpectralError(f"expected a square matrix, got shape {m.shape}")
    if method == "abs-sum":
        try:
            raw, vecs = la.eig(m)
        except la.LinAlgError as exc:
            raise SpectralError(f"eigensolver failed: {exc}") from exc
        norms = np.linalg.norm(vecs, axis=0)
        vecs = vecs / np.where(norms == 0, 1.0, norms)
        sharp = np.abs(raw.real) + np.abs(raw.imag)
    elif method == "exact":
        re = 0.5 * (m + m.conj().T)
        im = (m - m.conj().T) / 2j
        sharp_op = _hermitian_abs(re) + _hermitian_abs(im)
        vals, vecs = la.eigh(sharp_op)
        raw = vals.astype(complex)
        sharp = np.abs(vals)
    else:
        raise SpectralError(f"unknown sharpening method {method!r}")
    floor = eps_reg * float(sharp.max()) if sharp.size and sharp.max() > 0 else np.finfo(float).tiny
    spec = OperatorSpectrum(m, raw, vecs, sharp, floor, method)
    if method == "abs-sum":
        scale = np.linalg.norm(m, 2) if m.size else 0.0
        res = spec.residuals()
        if scale > 0 and np.any(res > residual_tol * scale):
            worst = int(np.argmax(res))
            raise SpectralError(
                f"eigenpair {worst} residual {res[worst]:.3e} exceeds {residual_tol:g} * |M| = "
                f"{residual_tol * scale:.3e}")
    return spec


def _hermitian_abs(h):
    vals, vecs = la.eigh(h)
    return (vecs * np.abs(vals)) @ vecs.conj().T


def dataset_spectrum(dataset: FieldDataset, method: str = "abs-sum") -> OperatorSpectrum:
    return eigensystem(assemble_toeplitz(dataset), method=method)


# -- data-to-pattern operator --------------------------------------------------

@dataclass
class SourceSamples:
    """Tensor quadrature of the space-time cylinder ``D x (t_min, t_max)``."""

    points: np.ndarray
    weights: np.ndarray
    times: np.ndarray
    time_weights: np.ndarray

    @classmethod
    def from_model(cls, model: SourceModel, quad: QuadratureSpec | None = None) -> "SourceSamples":
        quad = quad or default_spec(model.dim)
        pts, w = spatial_rule(model.shape, quad)
        t, wt = gauss_legendre(quad.n_time, model.t_min, model.t_max)
        return cls(pts, w, t, wt)

    @property
    def size(self) -> int:
        return len(self.weights) * len(self.time_weights)

    def tensor_weights(self) -> np.ndarray:
        return np.multiply.outer(self.weights, self.time_weights).ravel()

    def amplitude(self, model: SourceModel) -> np.ndarray:
        """``S(y_j, t_l)`` flattened with ``j`` major."""
        return np.stack([model.amplitude(self.points, t) for t in self.times], axis=1).ravel()


def _travel_times(mode, samples: SourceSamples) -> np.ndarray:
    """``t - d.y`` (far field) or ``t + |x - y|`` (near field), ``j`` major."""
    if isinstance(mode, FarField):
        shift = -(samples.points @ mode.vector)
    else:
        shift = np.linalg.norm(samples.points - mode.vector, axis=1)
    return np.add.outer(shift, samples.times).ravel()


def data_to_pattern_matrix(mode: FarField | NearField, taus, samples: SourceSamples,
                           weighted: bool = True) -> np.ndarray:
    """Rows ``tau``, columns ``(y_j, t_l)``: ``w_jl exp(i tau xi_jl)``."""
    xi = _travel_times(mode, samples)
    mat = np.exp(1j * np.multiply.outer(np.asarray(taus, dtype=float), xi))
    if weighted:
        mat = mat * samples.tensor_weights()
    return mat


def multiplication_operator(model: SourceModel, mode, grid: FrequencyGrid,
                            samples: SourceSamples) -> np.ndarray:
    """Diagonal of the middle factor evaluated on the sample nodes."""
    xi = _travel_times(mode, samples)
    s_vals = samples.amplitude(model)
    if isinstance(mode, FarField):
        return np.exp(1j * grid.k_c * xi) * s_vals / SQRT_2PI
    r = np.repeat(np.linalg.norm(samples.points - mode.vector, axis=1), len(samples.times))
    return np.exp(1j * grid.k_c * xi) * s_vals / (np.sqrt(32 * np.pi ** 3) * r)


def factorized_operator(model: SourceModel, mode, grid: FrequencyGrid,
                        samples: SourceSamples) -> np.ndarray:
    """``L T L*`` with ``L`` on the ``tau`` grid and ``L*`` on the ``s`` grid."""
    left = data_to_pattern_matrix(mode, grid.tau, samples)
    right = grid.dk * data_to_pattern_matrix(mode, grid.s, samples, weighted=False).conj().T
    middle = multiplication_operator(model, mode, grid, samples)
    return left @ (middle[:, None] * right)


def verify_factorization(model: SourceModel, mode, grid: FrequencyGrid, samples: SourceSamples,
                         dataset: FieldDataset | None = None,
                         quad: QuadratureSpec | None = None) -> float:
    """Relative Frobenius distance between the data Toeplitz matrix and ``L T L*``."""
    if dataset is None:
        dataset = synthesize_dataset(model, mode, grid, quad)
    toep = assemble_toeplitz(dataset)
    fact = factorized_operator(model, mode, grid, samples)
    ref = np.linalg.norm(toep)
    if ref == 0:
        return 0.0 if np.linalg.norm(fact) == 0 else float("inf")
    return float(np.linalg.norm(toep - fact) / ref)
