"""Convergence of the factorization residual under quadrature refinement.

The data are synthesised on a fine boundary-fitted rule; the data matrix is
then compared with L T L* assembled from coarser rules, both for the masked
midpoint rule and the boundary-fitted rule.
"""
import argparse

import numpy as np

from invsource.frequency import FrequencyGrid
from invsource.geometry import Disk, Peanut
from invsource.quadrature import QuadratureSpec
from invsource.source import SourceModel, quadratic_amplitude
from invsource.spectral import SourceSamples, verify_factorization
from invsource.synthesis import FarField, synthesize_dataset


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reference", type=int, nargs=2, default=[96, 64], metavar=("NR", "NS"))
    args = ap.parse_args()
    grid = FrequencyGrid.doubled(8 * np.pi / 3, 16)
    mode = FarField((1.0, 0.0))
    plan = (("midpoint", (16, 32, 64, 128)), ("fitted", (2, 4, 8, 16, 32)))
    for shape in (Peanut(), Disk()):
        model = SourceModel(shape, quadratic_amplitude(), 0.0, 1.0)
        ds = synthesize_dataset(model, mode, grid, QuadratureSpec("fitted", *args.reference))
        for scheme, sizes in plan:
            prev = None
            for n in sizes:
                res = verify_factorization(model, mode, grid,
                                           SourceSamples.from_model(model, QuadratureSpec(scheme, n, n)), ds)
                gain = "" if prev is None else f"  reduction {prev / res:.2f}"
                print(f"{shape.kind:7s} {scheme:8s} n={n:4d}  residual {res:.3e}{gain}")
                prev = res


if __name__ == "__main__":
    main()
