#!/usr/bin/env python3
"""Render one or more tubes as 3D scatter plots of their ball centers.

Usage: plot_tube3d.py <glob> --axes i,j,k [--wrap-angles] <out.png>

Each tube file gets its own color; marker areas scale with the certified
radius so the picture reads as a translucent tube. ``--axes`` picks the
three state coordinates (0-based) to project onto. ``--wrap-angles`` wraps
the selected coordinates named in the tube to [0, 2*pi) at render time; the
files themselves always store unwrapped values.
"""
import argparse
import glob as globmod
import math
import sys

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from torus_lasso.serialize import read_tube_csv  # noqa: E402


def plot_tube3d(paths, axes, out_path, wrap_angles=False) -> None:
    if not paths:
        raise ValueError("no input tube files")
    if len(axes) != 3 or len(set(axes)) != 3:
        raise ValueError(f"need three distinct projection axes, got {axes}")

    fig = plt.figure(figsize=(8, 7))
    ax3 = fig.add_subplot(projection="3d")
    cmap = plt.get_cmap("tab10")
    for idx, path in enumerate(sorted(paths)):
        tube = read_tube_csv(path)
        C = tube.centers
        if C.shape[1] <= max(axes):
            raise ValueError(
                f"{path}: state dimension {C.shape[1]} too small for axes {axes}"
            )
        P = C[:, list(axes)]
        if wrap_angles:
            P = np.mod(P, 2.0 * math.pi)
        # marker area proportional to the ball cross-section
        sizes = 2e4 * tube.radii**2
        ax3.scatter(P[:, 0], P[:, 1], P[:, 2], s=sizes, alpha=0.08,
                    color=cmap(idx % 10), linewidths=0)
        ax3.plot(P[:, 0], P[:, 1], P[:, 2], lw=0.5, color=cmap(idx % 10))
    ax3.set_xlabel(f"x{axes[0] + 1}")
    ax3.set_ylabel(f"x{axes[1] + 1}")
    ax3.set_zlabel(f"x{axes[2] + 1}")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("pattern", help="glob pattern matching tube CSV files")
    parser.add_argument("out", help="output PNG path")
    parser.add_argument("--axes", default="0,1,2",
                        help="three comma-separated 0-based state indices")
    parser.add_argument("--wrap-angles", action="store_true")
    args = parser.parse_args(argv)
    try:
        axes = tuple(int(v) for v in args.axes.split(","))
        paths = globmod.glob(args.pattern)
        plot_tube3d(paths, axes, args.out, wrap_angles=args.wrap_angles)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
