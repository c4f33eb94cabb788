#!/usr/bin/env python3
"""Plot helpers for the solver's CSV outputs.

Usage:
  plot_csv.py profiles <run-dir> [--out fig.png]     overlay the profile_t*.csv dumps
  plot_csv.py invariants <run-dir> [--out fig.png]   log10 relative drifts vs t
  plot_csv.py indicators <run-dir> [--out fig.png]   amplitude/phase/shape errors vs t
  plot_csv.py rates <run-dir> [--out fig.png]        error-vs-h loglog from rates.csv
"""

import argparse
import csv
import glob
import math
import os
import re
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_csv(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    return rows


def fnum(row, key):
    v = row.get(key, "")
    return float(v) if v not in ("", None) else math.nan


def plot_profiles(run_dir, out):
    files = glob.glob(os.path.join(run_dir, "profile_t*.csv"))

    def t_of(p):
        m = re.search(r"profile_t([-0-9.e+]+)\.csv$", p)
        return float(m.group(1))

    files.sort(key=t_of)
    if not files:
        sys.exit(f"no profile dumps in {run_dir}")
    fig, ax = plt.subplots(figsize=(9, 4))
    for p in files:
        rows = read_csv(p)
        ax.plot([fnum(r, "x") for r in rows], [fnum(r, "u") for r in rows],
                lw=0.9, label=f"t = {t_of(p):g}")
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(out)


def plot_invariants(run_dir, out):
    rows = read_csv(os.path.join(run_dir, "invariants.csv"))
    cols = [c for c in rows[0] if c.startswith("E") and not c.startswith("Et")] + \
           [c for c in rows[0] if c.startswith("Et")]
    fig, ax = plt.subplots(figsize=(9, 4))
    t = [fnum(r, "t") for r in rows]
    for c in cols:
        ax.plot(t, [fnum(r, c) for r in rows], lw=0.9, label=c)
    ax.set_xlabel("t")
    ax.set_ylabel("log10 relative drift")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(out)


def plot_indicators(run_dir, out):
    rows = read_csv(os.path.join(run_dir, "indicators.csv"))
    fig, ax = plt.subplots(figsize=(9, 4))
    t = [fnum(r, "t") for r in rows]
    for c in ("e_amp", "e_phase", "e_speed", "e_shape"):
        ax.semilogy(t, [fnum(r, c) for r in rows], lw=0.9, label=c)
    ax.set_xlabel("t")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(out)


def plot_rates(run_dir, out):
    rows = read_csv(os.path.join(run_dir, "rates.csv"))
    fig, ax = plt.subplots(figsize=(6, 4.5))
    h = [fnum(r, "h") for r in rows]
    for c in rows[0]:
        if c.endswith("_l2") or c.endswith("_linf") or c.endswith("_h1"):
            ax.loglog(h, [fnum(r, c) for r in rows], "o-", lw=0.9, label=c)
    ax.set_xlabel("h")
    ax.set_ylabel("error")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(out)


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("kind", choices=["profiles", "invariants", "indicators", "rates"])
    ap.add_argument("run_dir")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    out = args.out or os.path.join(args.run_dir, args.kind + ".png")
    {"profiles": plot_profiles, "invariants": plot_invariants,
     "indicators": plot_indicators, "rates": plot_rates}[args.kind](args.run_dir, out)


if __name__ == "__main__":
    main()
