"""Write the regression fixtures under tests/fixtures.

The peanut spectrum at the reference 2D settings (band (0, 8pi/3), N = 16,
direction (1, 0)) is stored with its sharpened eigenvalues; the test suite
compares the leading part of the decay curve against it.
"""
import argparse
from pathlib import Path

import numpy as np

from invsource import io as fio
from invsource.frequency import FrequencyGrid
from invsource.geometry import Peanut
from invsource.source import SourceModel, quadratic_amplitude
from invsource.spectral import dataset_spectrum
from invsource.synthesis import FarField, synthesize_dataset


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests" / "fixtures"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    model = SourceModel(Peanut(), quadratic_amplitude(), 0.0, 1.0)
    ds = synthesize_dataset(model, FarField((1.0, 0.0)), FrequencyGrid.doubled(8 * np.pi / 3, 16))
    spec = dataset_spectrum(ds)
    fio.write_dataset(ds, out / "peanut_far_x.dat")
    fio.write_spectrum(spec, out / "peanut_far_x.spectrum")
    lam = np.sort(spec.sharp)[::-1]
    print("sharpened eigenvalues (descending):")
    for i, v in enumerate(lam, 1):
        print(f"{i:2d} {v:.6e}")
    print(f"lambda_1 / lambda_N = {lam[0] / lam[-1]:.3e}")


if __name__ == "__main__":
    main()
