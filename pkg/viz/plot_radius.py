#!/usr/bin/env python3
"""Plot the certified radius of a tube against time.

Usage: plot_radius.py <tube.csv> <out.png>

If a sibling summary file ``<tube>.summary.json`` exists, period boundaries
(t = T, 2T, ...) are marked with vertical lines. The script is a read-only
consumer of the CLI exports: every number in the figure comes from the files.
"""
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from torus_lasso.serialize import read_tube_csv  # noqa: E402


def plot_radius(tube_path, out_path) -> None:
    tube = read_tube_csv(tube_path)
    times, radii = tube.times, tube.radii

    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(times, radii, lw=1.0, color="tab:blue")
    ax.set_xlabel("t")
    ax.set_ylabel("radius")
    ax.set_title(Path(tube_path).name)

    summary_path = Path(tube_path).with_suffix(".summary.json")
    if summary_path.exists():
        summary = json.loads(summary_path.read_text())
        T = summary.get("T")
        if T:
            t = T
            while t <= times[-1] + 1e-12:
                ax.axvline(t, color="gray", lw=0.6, ls="--")
                t += T
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 2:
        print(__doc__, file=sys.stderr)
        return 1
    try:
        plot_radius(argv[0], argv[1])
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
