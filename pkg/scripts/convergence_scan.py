"""Finite-time convergence of the localisation probabilities and the scaled law.

For the phased Hadamard coins at 0, 40, 50 and 80 degrees (kappa = 3, equal
weights with phases 10, 30, 340 degrees), one walk per angle is run to the
largest time, and at each checkpoint ``t`` it prints:

  * the relative error of P(X_{t,0}=x) against the long-time formula, x in (2, 6, 8);
  * the relative peak-to-peak of P(X_{t,0}=1) over odd times in [t-100, t];
  * the KS distance of X_{t,0}/t on (10/t, |a|) against the limit law.

Usage: python3 scripts/convergence_scan.py [--times 10000 20000 40000]
"""
import argparse

import numpy as np

from jkwalk import harness, theory
from jkwalk.coin_params import InitialState, derive_params, make_phased_hadamard
from jkwalk.reduced import ReducedWalk, prob_xtr

PSI = InitialState.from_phases([10, 30, 340])
ANGLES = (0, 40, 50, 80)
XS = (2, 6, 8)
WINDOW = 100
ATOM_WINDOW = 10


def ks_at(meas, probs, t, A):
    x = np.arange(probs.size)
    keep = (x >= ATOM_WINDOW) & (x / t < A)
    xs, w = x[keep] / t, probs[keep]
    lo = ATOM_WINDOW / t
    mass = meas.cdf_on([A], lo)[0]
    return harness.ks_distance(xs, w / w.sum(), meas.cdf_on(xs, lo) / mass)


def scan_angle(deg, times):
    coin = make_phased_hadamard(np.deg2rad(deg))
    p = derive_params(coin, 3)
    meas = theory.limit_measure(0, p, 3, PSI)
    walk = ReducedWalk(coin, 3, max(times))
    rows = []
    for t in sorted(times):
        window = []
        while walk.time < t:
            walk.step()
            if walk.time >= t - WINDOW and walk.time % 2 == 1:
                window.append(float(prob_xtr(walk.amps[:, :2], PSI, 0)[1]))
        probs = prob_xtr(walk, PSI, 0)
        errs = {}
        for x in XS:
            pred = float(theory.localization_asymptotic(t, x, 0, p, 3, PSI))
            errs[x] = (probs[x] - pred) / pred if (t + x) % 2 == 0 and pred > 1e-8 else float("nan")
        osc = harness.oscillation_stats(window)["rel_ptp"]
        rows.append((t, errs, osc, ks_at(meas, probs, t, p.abs_a)))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--times", type=int, nargs="+", default=[2000, 10_000, 20_000, 40_000])
    args = ap.parse_args()
    for deg in ANGLES:
        print(f"{deg} deg", flush=True)
        for t, errs, osc, ks in scan_angle(deg, args.times):
            e = "  ".join(f"x={x}: {v:+.2e}" for x, v in errs.items())
            print(f"  t={t:6d}  rel err {e}  osc {osc:.2e}  KS {ks:.4f}", flush=True)


if __name__ == "__main__":
    main()
