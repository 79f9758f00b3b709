"""Near-field annuli around the unit ball from one pair of receivers.

Receivers at (+-3, 0, 0), source on [0, 0.5].  For several eta and delta the
script reports the mask size, the number of points outside the 0.3-dilated
annuli, the largest receiver distance and the coverage of the ball.
"""
import argparse

import numpy as np

from invsource.frequency import FrequencyGrid
from invsource.geometry import Ball
from invsource.imaging import SearchBox, grid_sweep
from invsource.source import SourceModel, quadratic_amplitude
from invsource.synthesis import NearField, synthesize_dataset


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolution", type=int, default=41)
    ap.add_argument("--etas", type=float, nargs="+", default=[0.1, 0.2, 0.3, 0.4, 0.5])
    ap.add_argument("--deltas", type=float, nargs="+", default=[1e-3, 3e-3, 1e-2])
    ap.add_argument("--dilation", type=float, default=0.3)
    args = ap.parse_args()
    grid = FrequencyGrid.doubled(8 * np.pi / 3, 16)
    shape = Ball((0.0, 0.0, 0.0), 1.0)
    model = SourceModel(shape, quadratic_amplitude(), 0.0, 0.5)
    receivers = [(3.0, 0.0, 0.0), (-3.0, 0.0, 0.0)]
    data = [synthesize_dataset(model, NearField(x), grid) for x in receivers]
    box = SearchBox.cube(3, args.resolution, 3)
    pts = box.points()
    r1 = np.linalg.norm(pts - receivers[0], axis=1)
    r2 = np.linalg.norm(pts - receivers[1], axis=1)
    lo, hi = 2.0 - args.dilation, 4.0 + args.dilation
    allowed = (r1 > lo) & (r1 < hi) & (r2 > lo) & (r2 < hi)
    ball = np.linalg.norm(pts, axis=1) < 1
    print("eta    delta   mask  escaped  max|x-x1|  ball coverage")
    for eta in args.etas:
        val = grid_sweep(data, box, eta).normalized.ravel()
        for delta in args.deltas:
            m = val >= delta
            print(f"{eta:4.2f}  {delta:7.1e}  {m.sum():5d}  {np.sum(m & ~allowed):7d}  "
                  f"{r1[m].max():9.3f}  {np.sum(m & ball) / ball.sum():.3f}")


if __name__ == "__main__":
    main()
