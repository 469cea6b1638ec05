#!/usr/bin/env python3
"""Plot sweep CSVs emitted by `tscc sweep-snr` / `tscc sweep-ratio`.

Usage:
    plot_sweep.py sweep_snr.csv [out.png]

Groups rows by method, averages replicate seeds, and draws task score and
PSNR against SNR (or against achieved compression ratio when the file comes
from a ratio sweep). Needs matplotlib; the simulator itself does not.
"""

import csv
import sys
from collections import defaultdict


def load(path):
    rows = []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            rows.append(
                {
                    "method": row["method"],
                    "snr_db": float(row["snr_db"]),
                    "ratio": float(row["compression_ratio"]),
                    "task_score": float(row["task_score"]),
                    "psnr": float(row["psnr"]),
                }
            )
    return rows


def main():
    if len(sys.argv) < 2:
        print(__doc__)
        return 1
    rows = load(sys.argv[1])
    out = sys.argv[2] if len(sys.argv) > 2 else None

    import matplotlib

    if out:
        matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    snrs = {r["snr_db"] for r in rows}
    ratio_mode = len(snrs) == 1  # ratio sweeps run at one fixed SNR

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
    by_method = defaultdict(list)
    for r in rows:
        by_method[r["method"]].append(r)

    for method, points in sorted(by_method.items()):
        grouped = defaultdict(lambda: [0.0, 0.0, 0])
        for p in points:
            key = p["ratio"] if ratio_mode else p["snr_db"]
            g = grouped[key]
            g[0] += p["task_score"]
            g[1] += p["psnr"]
            g[2] += 1
        xs = sorted(grouped)
        score = [grouped[x][0] / grouped[x][2] for x in xs]
        fidelity = [grouped[x][1] / grouped[x][2] for x in xs]
        ax1.plot(xs, score, marker="o", label=method)
        ax2.plot(xs, fidelity, marker="o", label=method)

    xlabel = "compression ratio k/l" if ratio_mode else "SNR [dB]"
    if ratio_mode:
        ax1.set_xscale("log")
        ax2.set_xscale("log")
    for ax, ylabel in ((ax1, "task score"), (ax2, "PSNR [dB]")):
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)
        ax.legend()
    fig.tight_layout()
    if out:
        fig.savefig(out, dpi=150)
        print(f"wrote {out}")
    else:
        plt.show()
    return 0


if __name__ == "__main__":
    sys.exit(main())
