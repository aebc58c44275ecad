"""Table of the sharpness constructions: norm, class and what SGE does.

    python scripts/sharpness_table.py --sizes 2,3,5,10 --eps 1e-3,1e-1
"""

import argparse

import numpy as np

from avesolve.core import BadParameter, classify, inf_norm, is_irreducible
from avesolve.corpus import ARCHIVE, CATALOG, archived, catalog
from avesolve.oracle import enumerate_solutions
from avesolve.sge_dense import sge_solve


def row(case):
    S = case.S
    sol = sge_solve(case.instance)
    en = enumerate_solutions(case.instance) if case.n <= 12 else None
    err = np.abs(sol.z - case.z).max()
    return [
        case.id, case.n, f"{case.eps:g}", f"{inf_norm(S):.6f}", classify(S).name,
        is_irreducible(S), case.expected_property.name, case.check(),
        f"{err:.2e}", "-" if en is None else en.count,
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="2,3,5,10")
    ap.add_argument("--eps", default="1e-3,1e-1")
    args = ap.parse_args()
    sizes = [int(x) for x in args.sizes.split(",")]
    epsilons = [float(x) for x in args.eps.split(",")]

    head = ["id", "n", "eps", "norm", "class", "irreducible", "property", "holds",
            "|z_sge - z|", "solutions"]
    rows = []
    for cid in CATALOG:
        for n in sizes:
            for eps in epsilons:
                try:
                    rows.append(row(catalog(cid, n=n, eps=eps, check=False)))
                except BadParameter as exc:
                    rows.append([cid, n, f"{eps:g}", "-", "-", "-", "-", f"n/a ({exc})", "-", "-"])
    rows += [row(archived(a)) for a in ARCHIVE]
    widths = [max(len(str(r[i])) for r in rows + [head]) for i in range(len(head))]
    for r in [head] + rows:
        print("  ".join(str(v).ljust(w) for v, w in zip(r, widths)))


if __name__ == "__main__":
    main()
