"""Frequency band discretisation shared by synthesis, spectra and probes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class FrequencyGrid:
    """Band ``[k_min, k_max]`` split into ``n`` cells of width ``dk = K / n``.

    Data are needed at ``k_c + (d + 1/2) dk`` for offsets ``d = -(n-1) .. n-1``,
    i.e. ``k_c + k_n`` (n = 1..N) and ``k_c - k_n`` (n = 1..N-1).
    """

    k_min: float
    k_max: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise GridError("need at least one frequency cell")
        if not (self.k_max > self.k_min >= -self.k_max):
            raise GridError(f"invalid band [{self.k_min}, {self.k_max}]")

    @classmethod
    def doubled(cls, k_max: float, n: int) -> "FrequencyGrid":
        """Band ``(0, k_max)`` extended to ``(-k_max, k_max)`` by conjugate symmetry."""
        return cls(-float(k_max), float(k_max), int(n))

    @property
    def is_symmetric(self) -> bool:
        return self.k_min == -self.k_max

    @property
    def k_c(self) -> float:
        return 0.5 * (self.k_min + self.k_max)

    @property
    def K(self) -> float:
        return 0.5 * (self.k_max - self.k_min)

    @property
    def dk(self) -> float:
        return self.K / self.n

    @property
    def k_nodes(self) -> np.ndarray:
        return (np.arange(1, self.n + 1) - 0.5) * self.dk

    @property
    def tau(self) -> np.ndarray:
        return np.arange(1, self.n + 1) * self.dk

    @property
    def s(self) -> np.ndarray:
        return (np.arange(1, self.n + 1) - 0.5) * self.dk

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(-(self.n - 1), self.n)

    @property
    def sample_wavenumbers(self) -> np.ndarray:
        """The 2N-1 wavenumbers, ascending."""
        return self.k_c + (self.offsets + 0.5) * self.dk

    def describe(self) -> dict:
        return {"k_min": self.k_min, "k_max": self.k_max, "N": self.n}
