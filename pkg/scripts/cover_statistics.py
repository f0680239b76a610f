"""Witness histograms of the box cover for n = 2..nmax, written as CSV."""

import argparse
import csv
import sys
from dataclasses import asdict, dataclass

import numpy as np

from symsector.boxcover import BoxParams, cover_witness, membership_agreement, random_line_configuration


@dataclass
class Config:
    nmax: int = 10
    samples: int = 10_000
    seed: int = 0
    margin: float = 1e-6


def run(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    for n in range(2, cfg.nmax + 1):
        params = BoxParams.uniform(n)
        witness = np.zeros(n + 1, dtype=int)
        disagree = np.zeros(n + 1, dtype=int)
        near = np.zeros(n + 1, dtype=int)
        for _ in range(cfg.samples):
            xs = random_line_configuration(rng, n)
            witness[cover_witness(xs, params)] += 1
            for k in range(n + 1):
                agree = membership_agreement(xs, params, k, cfg.margin)
                near[k] += agree is None
                disagree[k] += agree is False
        for k in range(n + 1):
            yield {"n": n, "k": k, "witness": int(witness[k]), "disagree": int(disagree[k]),
                   "within_margin": int(near[k])}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    for k, v in asdict(Config()).items():
        p.add_argument(f"--{k}", type=type(v), default=v)
    cfg = Config(**vars(p.parse_args()))
    w = csv.DictWriter(sys.stdout, ["n", "k", "witness", "disagree", "within_margin"], lineterminator="\n")
    w.writeheader()
    w.writerows(run(cfg))


if __name__ == "__main__":
    main()
