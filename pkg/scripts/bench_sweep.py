"""Operation counts and timings for dense and tridiagonal SGE.

Prints the raw CSV plus fitted constants: flops / (n^3/3) for dense,
flops / n and queue_ops / (n log2 n) for the tridiagonal solver.

    python scripts/bench_sweep.py --dense 50,100,200,400 --tridiag 1e3,1e4,1e5,1e6
"""

import argparse

import numpy as np

from avesolve.cli import bench_record


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dense", default="50,100,200,400")
    ap.add_argument("--tridiag", default="1e3,1e4,1e5,1e6")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    bench_record("tridiag", 4, 0)  # compile
    print("n,method,wall_time,arith_ops,aux_ops,residual,fit,fit_aux")
    for method, spec in (("dense", args.dense), ("tridiag", args.tridiag)):
        for n in (int(float(x)) for x in spec.split(",")):
            recs = [bench_record(method, n, args.seed) for _ in range(args.repeat)]
            r = min(recs, key=lambda x: x["wall_time"])
            if method == "dense":
                fit, fit_aux = r["arith_ops"] / (n**3 / 3), r["aux_ops"] / (n * n / 2)
            else:
                fit, fit_aux = r["arith_ops"] / n, r["aux_ops"] / (n * np.log2(max(n, 2)))
            print(f"{n},{method},{r['wall_time']:.6f},{r['arith_ops']},{r['aux_ops']},"
                  f"{r['residual']:.3e},{fit:.4f},{fit_aux:.4f}", flush=True)


if __name__ == "__main__":
    main()
