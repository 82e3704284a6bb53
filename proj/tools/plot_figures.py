#!/usr/bin/env python3
"""Render the CSV series emitted by `rydrep figures` as PNG plots.

Usage:
    rydrep figures --out figures/
    python tools/plot_figures.py figures/ [--out figures/]

Each input file is plotted into a PNG of the same stem next to it (or into
the directory given with --out).
"""

import argparse
import csv
import pathlib
import sys


def read_csv(path: pathlib.Path):
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], rows[1:]
    columns = {name: [float(row[i]) for row in data] for i, name in enumerate(header)}
    return header, columns


def plot_time_comparison(path: pathlib.Path, out_dir: pathlib.Path, plt):
    header, col = read_csv(path)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(col["l_km"], col["log10_direct_time_s"], "k--", label="direct transmission")
    ax.plot(col["l_km"], col["log10_protocol_time_s"], "b-", label="repeater chain (N=16)")
    ax.set_xlabel("total distance L [km]")
    ax.set_ylabel("log10(average time [s])")
    ax.set_title("Entanglement distribution time vs distance")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_dir / (path.stem + ".png"), dpi=150)
    print(f"wrote {out_dir / (path.stem + '.png')}")


def plot_round_pmf(path: pathlib.Path, out_dir: pathlib.Path, plt):
    header, col = read_csv(path)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for name in header[1:]:
        p0 = name.rsplit("_", 1)[-1]
        ax.plot(col["n"], col[name], label=f"p0 = {p0}")
    ax.set_xlabel("synchronized rounds n")
    ax.set_ylabel("P(all links done at round n)")
    ax.set_title("Round-count distribution (maximum of geometrics)")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_dir / (path.stem + ".png"), dpi=150)
    print(f"wrote {out_dir / (path.stem + '.png')}")


def plot_round_mean(path: pathlib.Path, out_dir: pathlib.Path, plt):
    header, col = read_csv(path)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    colors = {"0.1": "C0", "0.2": "C1", "0.3": "C2"}
    for p0, color in colors.items():
        ax.plot(col["n_nodes"], col[f"n_bar_p0_{p0}"], color + "-", label=f"mean, p0 = {p0}")
        ax.plot(col["n_nodes"], col[f"two_n_max_p0_{p0}"], color + "--",
                label=f"2 x mode, p0 = {p0}")
    ax.set_xlabel("chain nodes N")
    ax.set_ylabel("rounds")
    ax.set_title("Expected rounds vs twice the distribution mode")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_dir / (path.stem + ".png"), dpi=150)
    print(f"wrote {out_dir / (path.stem + '.png')}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv_dir", type=pathlib.Path,
                        help="directory holding the CSVs written by `rydrep figures`")
    parser.add_argument("--out", type=pathlib.Path, default=None,
                        help="output directory for PNGs (default: csv_dir)")
    args = parser.parse_args()

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib is required: pip install matplotlib", file=sys.stderr)
        return 1

    out_dir = args.out or args.csv_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    plotters = {
        "fig3.csv": plot_time_comparison,
        "figA1.csv": plot_round_pmf,
        "figA2.csv": plot_round_mean,
    }
    found = False
    for name, plot in plotters.items():
        path = args.csv_dir / name
        if path.exists():
            plot(path, out_dir, plt)
            found = True
    if not found:
        print(f"no known CSVs found in {args.csv_dir}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
