"""Theta-convex hull from eight opposite pairs of far-field directions.

For each test shape the thresholded mask is compared with the intersection of
the eight strips: points outside the 0.3-dilated hull, coverage of the true
support, and mask area relative to the hull area.
"""
import argparse
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from invsource.frequency import FrequencyGrid
from invsource.geometry import Disk, Kite, Peanut, RoundSquare
from invsource.imaging import SearchBox, grid_sweep, threshold_mask
from invsource.source import SourceModel, quadratic_amplitude
from invsource.synthesis import FarField, synthesize_dataset


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/hull")
    ap.add_argument("--angles", type=int, default=8)
    ap.add_argument("--resolution", type=int, default=161)
    ap.add_argument("--dilation", type=float, default=0.3)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = FrequencyGrid.doubled(8 * np.pi / 3, 16)
    theta = np.arange(args.angles) * np.pi / args.angles
    half = [(np.cos(t), np.sin(t)) for t in theta]
    dirs = half + [(-a, -b) for a, b in half]
    box = SearchBox.cube(4, args.resolution, 2)
    pts = box.points()
    shapes = (Peanut(), Disk(), Kite(), RoundSquare())
    fig, axes = plt.subplots(1, len(shapes), figsize=(4 * len(shapes), 4))
    for ax, shape in zip(axes, shapes):
        model = SourceModel(shape, quadratic_amplitude(), 0.0, 1.0)
        data = [synthesize_dataset(model, FarField(d), grid) for d in dirs]
        img = grid_sweep(data, box, 0.1)
        mask = threshold_mask(img, 3e-3).ravel()
        hull = np.ones(len(pts), bool)
        wide = np.ones(len(pts), bool)
        for d in half:
            e = shape.support_extent(d)
            p = pts @ np.asarray(d)
            hull &= (p >= e.lo) & (p <= e.hi)
            wide &= (p >= e.lo - args.dilation) & (p <= e.hi + args.dilation)
        inside = shape.contains(pts)
        print(f"{shape.kind:12s} escaped {int(np.sum(mask & ~wide)):5d}  "
              f"coverage {np.sum(mask & inside) / np.sum(inside):.3f}  mask/hull {mask.sum() / hull.sum():.3f}")
        lo, hi = box.lo, box.hi
        ax.imshow(mask.reshape(img.shape).T, origin="lower", extent=(lo[0], hi[0], lo[1], hi[1]), cmap="gray")
        ax.set_title(shape.kind)
    fig.tight_layout()
    fig.savefig(out / "hull.png", dpi=120)
    print(f"figure written to {out / 'hull.png'}")


if __name__ == "__main__":
    main()
