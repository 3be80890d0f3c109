#!/usr/bin/env python3
"""Multivariate depth: Monte Carlo against the chi-square closed form.

Generates the bivariate-normal benchmark with the command-line tool,
scores every point with the Mahalanobis criterion both ways, and checks
that the Monte Carlo estimate tracks 1 - F_chi2(2) of the squared
criterion value to within 0.02 everywhere. Exits nonzero if it does not.
"""

import csv
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from fdepth.criteria import Criterion
from fdepth.depth import mc_depth
from fdepth.simgen import mvn_sample
from fdepth.special import chi2_cdf


def main() -> int:
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "sim6.csv"
        subprocess.run(
            [sys.executable, "-m", "fdepth.cli", "simulate", "--preset", "sim6",
             "--seed", "0", "--out", str(out)],
            check=True,
        )
        meta = json.loads((Path(tmp) / "sim6.meta.json").read_text())
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))[1:]
        points = np.array([[float(r[1]), float(r[2])] for r in rows])

    mu = np.array(meta["mu"])
    sigma = np.array(meta["sigma"])
    crit = Criterion.mahalanobis(sigma, mean=mu)
    reference = mvn_sample(mu, sigma, 20000, seed=1)

    worst = 0.0
    print("first five points:")
    for k, x in enumerate(points):
        res = mc_depth(x, None, crit, reference, seed=1)
        closed = 1.0 - chi2_cdf(res.criterion_value**2, 2)
        worst = max(worst, abs(res.value - closed))
        if k < 5:
            print(f"  ({x[0]: .3f}, {x[1]: .3f})  mc {res.value:.4f}  "
                  f"closed {closed:.4f}")

    print(f"\nmax |monte carlo - closed form| over {len(points)} points: {worst:.4f}")
    if worst > 0.02:
        print("FAIL: disagreement above 0.02")
        return 1
    print("OK: within 0.02")
    return 0


if __name__ == "__main__":
    sys.exit(main())
