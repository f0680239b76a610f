"""Tables of dim H_q(Sym^n) of glued surfaces: derived tensor next to the oracle."""

import argparse
import itertools
from dataclasses import dataclass

from symsector.homology import SurfaceDescriptor, row, verify_gluing


@dataclass
class Config:
    gmax: int = 3
    cmax: int = 3
    nmax: int = 6
    bar_nmax: int = -1


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--gmax", type=int, default=Config.gmax)
    p.add_argument("--cmax", type=int, default=Config.cmax)
    p.add_argument("--nmax", type=int, default=Config.nmax)
    p.add_argument("--bar-nmax", type=int, default=Config.bar_nmax)
    a = p.parse_args()
    cfg = Config(a.gmax, a.cmax, a.nmax, a.bar_nmax)
    total = bad = 0
    for gl, gr, c in itertools.product(range(cfg.gmax + 1), range(cfg.gmax + 1), range(1, cfg.cmax + 1)):
        rep = verify_gluing(SurfaceDescriptor((gl,)), SurfaceDescriptor((gr,)), cfg.nmax,
                            strips=c, bar_nmax=cfg.bar_nmax)
        rows = " ".join(str(tuple(row(rep.computed, n))) for n in range(cfg.nmax + 1))
        print(f"{gl} u_{c} {gr} -> g={rep.glued.genera[0]}  {'ok ' if rep.passed else 'BAD'}  {rows}")
        total += 1
        bad += not rep.passed
    print(f"{total - bad}/{total} gluings agree with the oracle")


if __name__ == "__main__":
    main()
