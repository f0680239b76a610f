"""Pushout formula against the relative tensor product on random modules.

Also prints the composites of the trinion model for every pair of legs.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from symsector.catcomplex import delta_tensor_check, pushout_formula, random_bimodule, trinion_model


@dataclass
class Config:
    modules: int = 50
    max_weight: int = 5
    max_dim: int = 4
    seed: int = 0


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--modules", type=int, default=Config.modules)
    p.add_argument("--max-weight", type=int, default=Config.max_weight)
    p.add_argument("--max-dim", type=int, default=Config.max_dim)
    p.add_argument("--seed", type=int, default=Config.seed)
    a = p.parse_args()
    cfg = Config(a.modules, a.max_weight, a.max_dim, a.seed)
    T = trinion_model()
    rng = np.random.default_rng(cfg.seed)
    checked = iso = 0
    for _ in range(cfg.modules):
        M = random_bimodule(rng, cfg.max_weight, cfg.max_dim)
        for n in range(1, max(M.weights()) + 2):
            rep = pushout_formula(T, M, n)
            checked += 1
            iso += rep.isomorphism
    print(f"pushout isomorphic to the tensor product in {iso}/{checked} weights")
    for pair, v in delta_tensor_check(T)["pairs"].items():
        vals = [x for k, x in v.items() if k.startswith("d1")]
        print(f"legs {pair}: composites {vals[0]} and {vals[1]}  commute={v['commute']}")


if __name__ == "__main__":
    main()
