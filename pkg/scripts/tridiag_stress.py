"""Stress the tridiagonal class against the enumeration oracle.

Counts instances where signed Gaussian elimination disagrees with the unique
solution, split by symmetric / general tridiagonal input and by norm bound,
and writes each failing instance to --out in the instance text format.

    python scripts/tridiag_stress.py --seeds 1000 --norms 0.7,0.9,0.99 --out failures/
"""

import argparse
from pathlib import Path

import numpy as np

from avesolve.core import StructureClass, strict_sign
from avesolve.corpus import gen_random
from avesolve.fileio import write_instance
from avesolve.oracle import enumerate_solutions
from avesolve.sge_tridiag import tridiag_sge_solve


def first_sign_wrong(inst, z):
    c = inst.rhs
    k = int(np.argmax(np.abs(c)))
    return z[k] != 0 and strict_sign(c[k]) != strict_sign(z[k])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=1000)
    ap.add_argument("--nmax", type=int, default=10)
    ap.add_argument("--norms", default="0.7,0.8,0.9,0.95,0.99")
    ap.add_argument("--out", default=None, help="directory for failing instances")
    args = ap.parse_args()
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)

    print("norm,symmetric,n,instances,failures,first_sign_wrong")
    for norm in (float(x) for x in args.norms.split(",")):
        for sym in (True, False):
            for n in range(1, args.nmax + 1):
                fails = wrong_first = 0
                for seed in range(args.seeds):
                    inst, z = gen_random(StructureClass.TridiagonalNormBelowOne, n, norm,
                                         seed, symmetric=sym)
                    ref = enumerate_solutions(inst).unique()
                    sol = tridiag_sge_solve(inst)
                    if np.abs(sol.z - ref).max() > 1e-10 * max(1.0, np.abs(ref).max()):
                        fails += 1
                        wrong_first += first_sign_wrong(inst, ref)
                        if out:
                            tag = "sym" if sym else "gen"
                            write_instance(out / f"{tag}_norm{norm}_n{n}_seed{seed}.txt", inst)
                print(f"{norm},{sym},{n},{args.seeds},{fails},{wrong_first}", flush=True)


if __name__ == "__main__":
    main()
