"""Acceptance criteria 1-11.

Each test records one PASS/FAIL line with the measured numbers and then
asserts, so failures show up both in the summary section and as test
failures. Run directly (``python3 tests/test_acceptance.py``) to print only
the summary lines.
"""
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import FIG_PSI  # noqa: E402
from jkwalk import harness, theory  # noqa: E402
from jkwalk.coin_params import (classify_regime, derive_params, make_phased_hadamard,  # noqa: E402
                                random_coin, random_initial_state)
from jkwalk.genfun import gen_amplitudes, make_context, residue_asymptotics  # noqa: E402
from jkwalk.reduced import ReducedWalk, branch_weights, reduction_oracle  # noqa: E402
from jkwalk.walker import initial_joined_state, step_joined, tree_reduce_compare  # noqa: E402

ANGLES = (0, 40, 50, 80)


def _fig_cfg(deg, t, **kw):
    return harness.ExperimentConfig.from_dict(
        {"kappa": 3, "psi_phases_deg": [10, 30, 340],
         "coin": {"type": "hadamard", "phase": float(np.deg2rad(deg))}, "t": t, **kw})


def test_c01_unitarity(record_criterion):
    t0 = time.perf_counter()
    walk = ReducedWalk(make_phased_hadamard(np.deg2rad(80)), 3, 10_000)
    prev, drift_red = 1.0, 0.0
    for _ in range(10_000):
        walk.step()
        n = float(np.sum(np.abs(walk.amps) ** 2))
        drift_red = max(drift_red, abs(n - prev))
        prev = n
    st = initial_joined_state(FIG_PSI, 501)
    prev, drift_dir = st.norm_sq(), 0.0
    coin = make_phased_hadamard(np.deg2rad(40))
    for _ in range(500):
        st = step_joined(st, coin)
        n = st.norm_sq()
        drift_dir = max(drift_dir, abs(n - prev))
        prev = n
    dt = time.perf_counter() - t0
    ok = drift_red < 1e-12 and drift_dir < 1e-12 and dt < 10
    assert record_criterion(1, ok, f"reduced drift {drift_red:.2e}, direct drift {drift_dir:.2e}, "
                                   f"{dt:.1f}s")


def test_c02_reduction(record_criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for kappa in (1, 2, 3, 5):
        for _ in range(20):
            coin = random_coin(rng)
            for _ in range(20):
                rep = reduction_oracle(coin, kappa, random_initial_state(rng, kappa), 100)
                worst = max(worst, rep.max_abs_err)
    dt = time.perf_counter() - t0
    ok = worst < 1e-10 and dt < 60
    assert record_criterion(2, ok, f"max |diff| {worst:.2e} over 1600 runs, {dt:.1f}s")


def test_c03_tree(record_criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    worst, worst_lit = 0.0, 0.0
    for k, kp in ((3, 3), (3, 2), (2, 3)):
        for omega in (1.0, np.exp(1j * np.pi / 3)):
            psi = random_initial_state(rng, kp)
            worst = max(worst, tree_reduce_compare(k, kp, omega, psi, 10, 10).max_abs_err)
            worst_lit = max(worst_lit, tree_reduce_compare(k, kp, omega, psi, 10, 10,
                                                           literal=True).max_abs_err)
    dt = time.perf_counter() - t0
    ok = worst < 1e-10 and dt < 30
    assert record_criterion(3, ok, f"max |diff| {worst:.2e} with coin C X "
                                   f"(literal coin C: {worst_lit:.2e}), {dt:.1f}s")


def test_c04_genfun(record_criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    worst = 0.0
    for kappa in (1, 3):
        for _ in range(5):
            coin = random_coin(rng)
            ctx = make_context(coin, kappa, order=60)
            walk = ReducedWalk(coin, kappa, 61)
            hist = [walk.amps.copy()]
            for _ in range(60):
                walk.step()
                hist.append(walk.amps.copy())
            hist = np.array(hist)[:, :, :21, :]
            for x in range(21):
                g = gen_amplitudes(ctx, x)
                for m in range(2):
                    for l in range(2):
                        worst = max(worst, np.max(np.abs(g[m, l].coeffs - hist[:, m, x, l])))
    dt = time.perf_counter() - t0
    ok = worst < 1e-8 and dt < 60
    assert record_criterion(4, ok, f"max |diff| {worst:.2e}, {dt:.1f}s")


def test_c05_localization(record_criterion):
    t0 = time.perf_counter()
    errs = {}
    for deg in ANGLES:
        res = harness.run_fig3(_fig_cfg(deg, 10_000, x_max=10))
        errs[deg] = res.footer["max_rel_err"]
    dt = time.perf_counter() - t0
    ok = all(e < 0.01 for e in errs.values()) and dt < 120
    detail = ", ".join(f"{d}deg {e:.2%}" for d, e in errs.items())
    assert record_criterion(5, ok, f"max rel err {detail}, {dt:.1f}s")


def test_c06_oscillation(record_criterion):
    rel = {}
    for deg in ANGLES:
        res = harness.run_fig2(_fig_cfg(deg, 10_000, options={"x0": 1, "t_start": 9_900}))
        rel[deg] = res.footer["sim_rel_ptp"]
    ok = rel[50] > 1e-2 and rel[80] > 1e-2 and rel[0] < 1e-4 and rel[40] < 1e-4
    detail = ", ".join(f"{d}deg {v:.2e}" for d, v in rel.items())
    assert record_criterion(6, ok, f"relative peak-to-peak {detail}")


def test_c07_sum_rule(record_criterion):
    rng = np.random.default_rng(7)
    worst = 0.0
    for kappa in (1, 2, 3, 5):
        for _ in range(50):
            coin, psi = random_coin(rng), random_initial_state(rng, kappa)
            for t in rng.integers(0, 10 ** 5, 3):
                for x in range(12):
                    worst = max(worst, abs(theory.oscillation_sum_rule(t, x, coin, kappa, psi)))
    for deg in ANGLES:
        for t in (9_999, 10_000):
            for x in range(12):
                worst = max(worst, abs(theory.oscillation_sum_rule(
                    t, x, make_phased_hadamard(np.deg2rad(deg)), 3, FIG_PSI)))
    assert record_criterion(7, worst < 1e-12, f"max |sum_r L_c| {worst:.2e}")


def test_c08_scaled_distribution(record_criterion):
    t0 = time.perf_counter()
    out = {}
    for deg in ANGLES:
        f = harness.run_fig4(_fig_cfg(deg, 2000)).footer
        out[deg] = (f["ks"], f["near_zero_mass"], f["atom"])
    dt = time.perf_counter() - t0
    ok = all(ks < 0.02 and abs(n - a) <= 0.01 for ks, n, a in out.values()) and dt < 60
    detail = "; ".join(f"{d}deg KS {ks:.3f} near {n:.4f} atom {a:.4f}"
                       for d, (ks, n, a) in out.items())
    assert record_criterion(8, ok, f"{detail}, {dt:.1f}s")


def test_c09_total_mass(record_criterion):
    rng = np.random.default_rng(9)
    worst = 0.0
    for i in range(20):
        kappa = (1, 2, 3, 5)[i % 4]
        worst = max(worst, abs(theory.total_mass(random_coin(rng), kappa,
                                                 random_initial_state(rng, kappa)) - 1))
    assert record_criterion(9, worst < 1e-6, f"max |mass - 1| {worst:.2e}")


def _phi0_coin(rng):
    th = rng.uniform(0.01, np.pi / 2 - 0.01)
    al, be = rng.uniform(0, 2 * np.pi, 2)
    a, b, c = np.cos(th) * np.exp(1j * al), np.sin(th) * np.exp(1j * be), np.sin(th)
    from jkwalk.coin_params import CoinU2
    return CoinU2.from_matrix([[a, b], [c, -np.conj(a) * c / np.conj(b)]])


def _density_gap(ma, mb, support):
    xs = support * np.linspace(0.01, 0.99, 40)
    db = mb.density(xs)
    return max(abs(ma.atom - mb.atom),
               float(np.max(np.abs(ma.density(xs) - db) / np.maximum(1, np.abs(db)))))


def test_c10_corollaries(record_criterion):
    rng = np.random.default_rng(10)
    w1 = w2 = 0.0
    for _ in range(100):
        kappa = int(rng.choice([1, 2, 3, 5]))
        coin, psi = _phi0_coin(rng), random_initial_state(rng, kappa)
        r = int(rng.integers(kappa))
        t, x = int(rng.integers(0, 10 ** 4)), int(rng.integers(0, 30))
        w1 = max(w1, abs(theory.corollary_phi0_localization(t, x, r, coin, kappa, psi)
                         - theory.localization_asymptotic(t, x, r, coin, kappa, psi)))
        w1 = max(w1, _density_gap(theory.corollary_phi0_measure(r, coin, kappa, psi),
                                  theory.limit_measure(r, coin, kappa, psi), abs(coin.a)))
        coin = random_coin(rng)
        w2 = max(w2, abs(theory.corollary_halfline_localization(t, x, coin)
                         - theory.localization_asymptotic(t, x, 0, coin, 1, [1.0])))
        w2 = max(w2, _density_gap(theory.corollary_halfline_measure(coin),
                                  theory.limit_measure(0, coin, 1, [1.0]), abs(coin.a)))
    ok = w1 < 1e-12 and w2 < 1e-12
    assert record_criterion(10, ok, f"phi=0 gap {w1:.2e}, half-line gap {w2:.2e}")


def _regime_coins(rng, want, n):
    found = []
    while len(found) < n:
        coin = random_coin(rng, margin=0.05)
        reg = classify_regime(derive_params(coin, 3))
        if (reg.has_Lm, reg.has_Lp, reg.has_Lc) == want:
            found.append(coin)
    return found


def test_c11_residues(record_criterion):
    rng = np.random.default_rng(11)
    t = 10_000
    worst, count = 0.0, 0
    regimes = {"L_m only": (True, False, False), "L_p only": (False, True, False),
               "all three": (True, True, True)}
    per = {}
    for name, want in regimes.items():
        w = 0.0
        for coin in _regime_coins(rng, want, 5):
            psi = random_initial_state(rng, 3)
            ctx = make_context(coin, 3, order=64)
            for r in range(3):
                wo, wt = branch_weights(psi, r)
                for x in range(0, 6, 2):
                    amp = residue_asymptotics(ctx, x, t)
                    res = float(np.sum(np.abs(wo * amp[0] + wt * amp[1]) ** 2))
                    pred = float(theory.localization_asymptotic(t, x, r, coin, 3, psi))
                    if pred > 1e-14:
                        w = max(w, abs(res - pred) / pred)
                        count += 1
        per[name] = w
        worst = max(worst, w)
    detail = ", ".join(f"{k} {v:.2e}" for k, v in per.items())
    assert record_criterion(11, worst < 1e-6, f"max rel err {detail} ({count} points)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
