"""Run every experiment once and print the tables, tomography and a few transactions.

    python scripts/reproduce_all.py [--seed 2017] [--noise-file PATH]
"""

import argparse
import time

from qcheque.experiments import ideal_p0, table_rows, tomography_report
from qcheque.noise import default_params, load_params
from qcheque.protocol import run_transaction


def _matrix(rho) -> str:
    m = rho.matrix
    return "  ".join(f"[{m[i, 0].real:+.3f}{m[i, 0].imag:+.3f}i {m[i, 1].real:+.3f}{m[i, 1].imag:+.3f}i]" for i in range(2))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=2017)
    ap.add_argument("--noise-file", default=None)
    args = ap.parse_args()
    noise = load_params(args.noise_file) if args.noise_file else default_params()
    t0 = time.perf_counter()

    for which, title in ((1, "cheque generation"), (2, "cheque verification")):
        print(f"== Table {which}: {title} (analytic ideal P(0) = {ideal_p0(which):.5f})")
        for row in table_rows(which, args.seed, noise):
            print(f"  {row.label:<20} P(0)={row.p0:.3f}  P(1)={row.p1:.3f}")

    for target in ("cheque", "ancilla"):
        rep = tomography_report(target, 8192, args.seed, noise)
        print(f"== tomography: {target}")
        for name, rho in rep["matrices"].items():
            print(f"  {name:<15} {_matrix(rho)}")
        for name, c in rep["comparisons"].items():
            print(f"  {name:<26} F={c.fidelity:.4f}  D={c.trace_distance:.4f}")

    print("== transactions (m=3)")
    cases = [("paper", "none"), ("hashed", "none"), ("hashed", "amount"), ("paper", "serial"),
             ("paper", "signature"), ("paper", "double_spend")]
    for mode, tamper in cases:
        outcomes, _ = run_transaction(3, 100, args.seed, mode=mode, tamper=tamper)
        print(f"  {mode:<7} tamper={tamper:<13} -> {', '.join(o.label for o in outcomes)}")
    print(f"noise {noise}; done in {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
