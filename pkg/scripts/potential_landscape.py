"""Sweep the statistical-equilibrium layer for a calibrated economy.

Calibrates the firm layer, takes the resting fragile share as the
observed mix, and prints the MaxEnt diagnostics: beta, the outcome gap,
both share estimates, the hazard numbers and the flagged caveats. Can
write the potential profile U(n) as CSV for plotting elsewhere.
"""

import argparse
import sys

import numpy as np

from fragility.asymptotics import stationary_drift
from fragility.equilibrium import equilibrium_report
from fragility.model_core import ModelParams, calibrate


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-firms", type=int, default=100)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--a0", type=float, default=-2.0)
    p.add_argument("--a1", type=float, default=-1.0)
    p.add_argument("--eta", type=float, default=0.4)
    p.add_argument("--share", type=float, default=None,
                   help="override the observed fragile share (default: resting share)")
    p.add_argument("--points", type=int, default=199)
    p.add_argument("--csv", type=str, default=None, help="optional profile output")
    args = p.parse_args(argv)

    params = ModelParams(
        N=args.n_firms, r=args.r, c=args.c, a0=args.a0, a1=args.a1, eta=args.eta
    )
    rates = calibrate(params)
    if rates.degenerate:
        print("calibration is degenerate (lambda = gamma = 0); no mix to analyze")
        return 1
    n1 = args.share if args.share is not None else stationary_drift(rates)
    print(
        f"outputs: robust q0 = {rates.q0:.6g}, fragile q1 = {rates.q1:.6g}, "
        f"observed fragile share = {n1:.6g}"
    )
    rep = equilibrium_report(rates.q0, rates.q1, n1, params.N, profile_points=args.points)
    print(f"beta = {rep.beta:.6f}   g = {rep.g:.6f}   entropy = {rep.entropy:.6f}")
    print(
        f"share estimates: odds form {rep.n_star:.6f}, "
        f"symmetric form {rep.share_symmetric:.6f}"
    )
    print(
        f"hazard: F = {rep.hazard_cdf:.6f}, h = {rep.hazard_rate:.6f}, "
        f"conditional = {rep.hazard_conditional:.6f} "
        f"(small-beta reference {rep.hazard_small_beta_ref:.6f}, "
        f"ratio {rep.hazard_ratio:.6f})"
    )
    print(f"a-priori weight = {rep.eta_gibbs:.6f} (constraint gap {rep.eta_gibbs_gap:+.6f})")
    for note in rep.notes:
        print(f"  - {note}")

    if args.csv:
        np.savetxt(
            args.csv,
            np.column_stack([rep.potential_n, rep.potential_u]),
            delimiter=",", header="n,U", comments="", fmt="%.10g",
        )
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
