"""Experiment runners behind the command line.

Each runner takes an :class:`ExperimentConfig` and returns a
:class:`RunResult`: CSV rows, a summary footer and a pass flag for the
comparison modes. Everything is deterministic given the config and seed.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import theory
from .coin_params import (CoinU2, InitialState, derive_params, make_coin, random_coin,
                          random_initial_state)
from .errors import ValidationError
from .genfun import make_context, residue_asymptotics
from .reduced import ReducedWalk, branch_weights, prob_xtr, reduction_oracle
from .report import LimitReport, _fmt, format_footer
from .walker import tree_reduce_compare

__all__ = [
    "ExperimentConfig",
    "RunResult",
    "simulate",
    "theory_table",
    "run_fig2",
    "run_fig3",
    "run_fig4",
    "run_reduction",
    "run_residue",
    "genfun_check",
    "tree_check",
    "compare",
    "oscillation_stats",
    "ks_distance",
]

COMPARE_MODES = ("fig2", "fig3", "reduction", "residue")


def _parse_complex(v, what: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        try:
            return complex(float(v[0]), float(v[1]))
        except (TypeError, ValueError):
            pass
    raise ValidationError(f"{what} must be a real number or an [re, im] pair, got {v!r}")


@dataclass
class ExperimentConfig:
    """Validated contents of a JSON config file.

    Keys: ``kappa``, ``coin`` (``{"type", "phase", "entries"}``), the initial
    state as ``psi`` (reals or ``[re, im]`` pairs) or ``psi_phases_deg``
    (equal weights), ``t``, ``r``, ``x_max``, optional ``kappa_prime`` and
    ``omega`` for trees, ``mode`` for ``compare``, ``tolerance``, ``seed`` and
    free-form ``options``.
    """

    kappa: int
    coin: CoinU2
    psi: InitialState
    t: int = 100
    r: int = 0
    x_max: int = 10
    kappa_prime: int | None = None
    omega: complex = 1.0
    mode: str = "fig3"
    tolerance: float | None = None
    seed: int = 0
    literal: bool = False
    options: dict = field(default_factory=dict)
    coin_spec: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ValidationError("config must be a JSON object")
        known = {"kappa", "coin", "psi", "psi_phases_deg", "t", "r", "x_max", "kappa_prime",
                 "omega", "mode", "tolerance", "seed", "literal", "options"}
        extra = set(d) - known
        if extra:
            raise ValidationError(f"unknown config keys: {sorted(extra)}")
        try:
            kappa = int(d.get("kappa", 3))
            t = int(d.get("t", 100))
            r = int(d.get("r", 0))
            x_max = int(d.get("x_max", 10))
            seed = int(d.get("seed", 0))
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"integer field is malformed: {exc}") from exc
        if kappa < 1:
            raise ValidationError("kappa must be >= 1")
        if t < 0 or x_max < 0:
            raise ValidationError("t and x_max must be non-negative")
        kp = d.get("kappa_prime")
        try:
            kp = None if kp is None else int(kp)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"kappa_prime is malformed: {exc}") from exc
        ncomp = kappa if kp is None else kp
        if ncomp < 1:
            raise ValidationError("kappa_prime must be >= 1")
        if "psi" in d and "psi_phases_deg" in d:
            raise ValidationError("give either psi or psi_phases_deg, not both")
        if "psi" in d:
            raw = d["psi"]
            if not isinstance(raw, list):
                raise ValidationError("psi must be a list")
            psi = InitialState([_parse_complex(v, "psi entry") for v in raw])
        elif "psi_phases_deg" in d:
            psi = InitialState.from_phases(d["psi_phases_deg"])
        else:
            psi = InitialState.symmetric(ncomp)
        if psi.kappa != ncomp:
            what = "kappa" if kp is None else "kappa_prime"
            raise ValidationError(f"psi has {psi.kappa} components but {what}={ncomp}")
        if not 0 <= r < ncomp:
            raise ValidationError(f"branch r={r} out of range for {ncomp} branches")
        spec = d.get("coin", {"type": "hadamard"})
        coin = make_coin(spec)
        omega = _parse_complex(d.get("omega", 1.0), "omega")
        if abs(abs(omega) - 1) > 1e-12:
            raise ValidationError("omega must have unit modulus")
        mode = d.get("mode", "fig3")
        if mode not in COMPARE_MODES:
            raise ValidationError(f"mode must be one of {COMPARE_MODES}, got {mode!r}")
        tol = d.get("tolerance")
        options = d.get("options", {})
        if not isinstance(options, dict):
            raise ValidationError("options must be a JSON object")
        return cls(kappa=kappa, coin=coin, psi=psi, t=t, r=r, x_max=x_max,
                   kappa_prime=kp, omega=omega, mode=mode,
                   tolerance=None if tol is None else float(tol), seed=seed,
                   literal=bool(d.get("literal", False)), options=options, coin_spec=spec)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read config {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def override(self, t: int | None = None, seed: int | None = None,
                 tolerance: float | None = None) -> "ExperimentConfig":
        out = self
        if t is not None:
            if t < 0:
                raise ValidationError("t must be non-negative")
            out = replace(out, t=int(t))
        if seed is not None:
            out = replace(out, seed=int(seed))
        if tolerance is not None:
            out = replace(out, tolerance=float(tolerance))
        return out


@dataclass
class RunResult:
    """Header, rows and footer of one CSV, plus the tolerance verdict."""

    header: list
    rows: list
    footer: dict
    passed: bool = True

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue() + format_footer(self.footer)

    @classmethod
    def from_report(cls, rep: LimitReport, footer: dict, passed: bool = True) -> "RunResult":
        rows = [[int(a), int(b), int(c), d, e, f, g] for a, b, c, d, e, f, g in
                zip(rep.t, rep.x, rep.r, rep.simulated, rep.predicted, rep.abs_err, rep.rel_err)]
        info = rep.summary()
        info.update(footer)
        return cls(["t", "x", "r", "simulated", "predicted", "abs_err", "rel_err"],
                   rows, info, passed)


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return _fmt(float(v))
    return v


def _run_probs(cfg: ExperimentConfig, t: int | None = None) -> np.ndarray:
    t = cfg.t if t is None else t
    walk = ReducedWalk(cfg.coin, cfg.kappa, max(t, 1))
    walk.run(t)
    return prob_xtr(walk, cfg.psi, cfg.r)


def simulate(cfg: ExperimentConfig) -> RunResult:
    """``P(X_{t,r} = x)`` for every branch and ``x <= x_max`` at time ``t``."""
    walk = ReducedWalk(cfg.coin, cfg.kappa, max(cfg.t, 1))
    walk.run(cfg.t)
    rows, total = [], 0.0
    for r in range(cfg.kappa):
        p = prob_xtr(walk, cfg.psi, r)
        total += float(p.sum())
        for x in range(min(cfg.x_max, p.size - 1) + 1):
            rows.append([cfg.t, x, r, float(p[x])])
    return RunResult(["t", "x", "r", "probability"], rows,
                     {"t": cfg.t, "kappa": cfg.kappa, "total_probability": total})


def theory_table(cfg: ExperimentConfig) -> RunResult:
    """Localisation terms for ``x <= x_max`` and the limit measure of branch ``r``."""
    p = derive_params(cfg.coin, cfg.kappa)
    x = np.arange(cfg.x_max + 1)
    terms = theory.localization_terms(cfg.t, x, cfg.r, p, cfg.kappa, cfg.psi, cfg.literal)
    pred = theory.localization_asymptotic(cfg.t, x, cfg.r, p, cfg.kappa, cfg.psi, cfg.literal)
    rows = []
    for i in x:
        rows += [[int(i), "L_m", float(terms.Lm[i])], [int(i), "L_p", float(terms.Lp[i])],
                 [int(i), "L_c", float(terms.Lc[i])], [int(i), "predicted", float(pred[i])]]
    meas = theory.limit_measure(cfg.r, p, cfg.kappa, cfg.psi, cfg.literal)
    npts = int(cfg.options.get("density_points", 50))
    for xv in np.linspace(0, p.abs_a, npts, endpoint=False)[1:]:
        rows.append([float(xv), "density", float(meas.density(xv))])
    reg = theory.classify_regime(p)
    footer = {"t": cfg.t, "r": cfg.r, "literal": cfg.literal, "phi": p.phi,
              "has_Lm": reg.has_Lm, "has_Lp": reg.has_Lp, "has_Lc": reg.has_Lc,
              "atom": meas.atom, "density_mass": meas.integrate(),
              "total_mass_all_branches": theory.total_mass(p, cfg.kappa, cfg.psi, cfg.literal)}
    return RunResult(["x_or_t", "quantity", "value"], rows, footer)


def oscillation_stats(values: np.ndarray) -> dict:
    """Peak-to-peak spread of a sequence, absolute and relative to its mean."""
    v = np.asarray(values, dtype=float)
    ptp = float(np.ptp(v)) if v.size else 0.0
    mean = float(np.mean(v)) if v.size else 0.0
    return {"ptp": ptp, "mean": mean, "rel_ptp": ptp / mean if mean > 0 else float("inf")}


def run_fig2(cfg: ExperimentConfig) -> RunResult:
    """``P(X_{t,r} = x0)`` against ``t`` over a window ending at ``cfg.t``.

    Options: ``x0`` (default 1) and ``t_start`` (default ``t - 100``). Only
    times with ``t + x0`` even are listed; the others are identically zero.
    The footer reports the peak-to-peak spread of both curves.
    """
    x0 = int(cfg.options.get("x0", 1))
    t0 = int(cfg.options.get("t_start", max(cfg.t - 100, 0)))
    walk = ReducedWalk(cfg.coin, cfg.kappa, max(cfg.t, 1))
    ts, sims = [], []

    def grab(w):
        if w.time >= t0 and (w.time + x0) % 2 == 0:
            ts.append(w.time)
            sims.append(float(prob_xtr(w.amps[:, : x0 + 1], cfg.psi, cfg.r)[x0]))

    if t0 == 0 and x0 % 2 == 0:
        grab(walk)
    walk.run(cfg.t, grab)
    ts = np.array(ts, dtype=np.int64)
    pred = theory.localization_asymptotic(ts, x0, cfg.r, cfg.coin, cfg.kappa, cfg.psi, cfg.literal)
    rep = LimitReport(ts, x0, cfg.r, sims, pred, label="fig2")
    so, po = oscillation_stats(rep.simulated), oscillation_stats(rep.predicted)
    footer = {"x0": x0, "t_start": t0, "t_end": cfg.t,
              "sim_ptp": so["ptp"], "sim_rel_ptp": so["rel_ptp"],
              "pred_ptp": po["ptp"], "pred_rel_ptp": po["rel_ptp"],
              "has_Lc": theory.classify_regime(derive_params(cfg.coin, cfg.kappa)).has_Lc}
    tol = cfg.tolerance if cfg.tolerance is not None else 0.01
    footer["tolerance"] = tol
    return RunResult.from_report(rep, footer, rep.max_rel_err <= tol)


def run_fig3(cfg: ExperimentConfig) -> RunResult:
    """``P(X_{t,r} = x)`` against ``x <= x_max`` at time ``t``.

    The footer carries the maximum relative error over rows with
    ``predicted > 1e-8`` and a least-squares decay rate of ``log P`` over the
    non-zero parity sites in ``[fit_lo, fit_hi]`` (options, default 2 and 12),
    next to ``ln(K_pm / |a|^2)``.
    """
    p = derive_params(cfg.coin, cfg.kappa)
    lo, hi = int(cfg.options.get("fit_lo", 2)), int(cfg.options.get("fit_hi", 12))
    floor = float(cfg.options.get("pred_floor", 1e-8))
    xm = max(cfg.x_max, hi)
    probs = _run_probs(cfg)
    x = np.arange(xm + 1)
    sim = probs[: xm + 1]
    pred = theory.localization_asymptotic(cfg.t, x, cfg.r, p, cfg.kappa, cfg.psi, cfg.literal)
    keep = x <= cfg.x_max
    rep = LimitReport(cfg.t, x[keep], cfg.r, sim[keep], pred[keep], label="fig3", rel_floor=floor)
    fit = (x >= lo) & (x <= hi) & ((x + cfg.t) % 2 == 0)

    def rate(v):
        v = v[fit]
        if v.size < 2 or np.any(v <= 0):
            return float("nan")
        # consecutive listed sites are two apart
        return float(-np.polyfit(x[fit], np.log(v), 1)[0])

    tol = cfg.tolerance if cfg.tolerance is not None else 0.01
    footer = {"sim_decay_rate": rate(sim), "pred_decay_rate": rate(pred),
              "ln_K_plus_over_a2": float(np.log(p.K_plus / p.abs_a ** 2)),
              "ln_K_minus_over_a2": float(np.log(p.K_minus / p.abs_a ** 2)),
              "pred_floor": floor, "tolerance": tol}
    return RunResult.from_report(rep, footer, rep.max_rel_err <= tol)


def ks_distance(xs: np.ndarray, weights: np.ndarray, cdf_vals: np.ndarray) -> float:
    """Kolmogorov distance between a weighted point mass and a continuous CDF.

    ``xs`` must be sorted, ``weights`` sum to one and ``cdf_vals`` is the
    theoretical CDF at ``xs``. Both one-sided limits of the step function are
    checked at every jump.
    """
    fe = np.cumsum(weights)
    fe_left = np.concatenate([[0.0], fe[:-1]])
    return float(max(np.max(np.abs(fe - cdf_vals)), np.max(np.abs(fe_left - cdf_vals))))


def run_fig4(cfg: ExperimentConfig) -> RunResult:
    """Scaled position ``X_{t,r} / t`` against the limit density.

    Sites ``x < atom_window`` (option, default 10) hold the atom; the rest,
    restricted to ``x / t < |a|`` and renormalised, is compared with the
    renormalised density on ``(atom_window / t, |a|)``. Rows are histogram bins
    (option ``bins``, default 50) of both renormalised distributions. The
    footer reports the KS distance, near-zero mass versus the atom and the
    mass beyond ``|a| + 0.02``.
    """
    t = cfg.t
    if t < 1:
        raise ValidationError("scaled-dist needs t >= 1")
    p = derive_params(cfg.coin, cfg.kappa)
    win = int(cfg.options.get("atom_window", 10))
    nbins = int(cfg.options.get("bins", 50))
    probs = _run_probs(cfg)
    x = np.arange(probs.size)
    meas = theory.limit_measure(cfg.r, p, cfg.kappa, cfg.psi, cfg.literal)
    A = p.abs_a
    lo = win / t
    m = (x >= win) & (x / t < A)
    xs, w = x[m] / t, probs[m]
    wsum = float(w.sum())
    dens_mass = meas.cdf_on([A], lo)[0]
    if wsum <= 0 or dens_mass <= 0:
        raise ValidationError("nothing to compare: empty window")
    cdf_t = meas.cdf_on(xs, lo) / dens_mass
    ks = ks_distance(xs, w / wsum, cdf_t)
    edges = np.linspace(lo, A, nbins + 1)
    emp_hist = np.histogram(xs, bins=edges, weights=w / wsum)[0]
    th_hist = np.diff(meas.cdf_on(edges, lo)) / dens_mass
    rows = [[float(edges[i]), float(edges[i + 1]), float(emp_hist[i]), float(th_hist[i])]
            for i in range(nbins)]
    near = float(probs[:win].sum())
    beyond = float(probs[x / t > A + 0.02].sum())
    ks_tol = cfg.tolerance if cfg.tolerance is not None else 0.02
    atom_tol = float(cfg.options.get("atom_tolerance", 0.01))
    footer = {"t": t, "r": cfg.r, "support": A, "ks": ks, "ks_tolerance": ks_tol,
              "near_zero_mass": near, "atom": meas.atom, "atom_abs_diff": abs(near - meas.atom),
              "atom_tolerance": atom_tol, "beyond_support_mass": beyond,
              "window_mass_sim": wsum, "window_mass_theory": dens_mass}
    passed = ks <= ks_tol and abs(near - meas.atom) <= atom_tol
    return RunResult(["x_lo", "x_hi", "empirical", "theoretical"], rows, footer, passed)


def run_reduction(cfg: ExperimentConfig) -> RunResult:
    """Direct walk on ``J_kappa`` against the two-channel reduction up to ``t``."""
    rep = reduction_oracle(cfg.coin, cfg.kappa, cfg.psi, cfg.t)
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-10
    return RunResult.from_report(rep, {"tolerance": tol}, rep.max_abs_err <= tol)


def run_residue(cfg: ExperimentConfig) -> RunResult:
    """Pole contributions of the generating function against the localisation formula.

    Rows cover ``x <= x_max`` with ``t + x`` even; ``simulated`` holds the
    branch-``r`` probability built from the residues.
    """
    ctx = make_context(cfg.coin, cfg.kappa, order=int(cfg.options.get("order", 64)))
    wo, wt = branch_weights(cfg.psi, cfg.r)
    xs = [x for x in range(cfg.x_max + 1) if (x + cfg.t) % 2 == 0]
    res = []
    for x in xs:
        amp = residue_asymptotics(ctx, x, cfg.t)
        res.append(float(np.sum(np.abs(wo * amp[0] + wt * amp[1]) ** 2)))
    pred = theory.localization_asymptotic(cfg.t, np.array(xs), cfg.r, cfg.coin, cfg.kappa,
                                          cfg.psi, cfg.literal)
    rep = LimitReport(cfg.t, xs, cfg.r, res, pred, label="residue", rel_floor=1e-14)
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-6
    return RunResult.from_report(rep, {"tolerance": tol}, rep.max_rel_err <= tol)


def genfun_check(cfg: ExperimentConfig) -> RunResult:
    """Series coefficients against reduced-walk amplitudes for ``t <= cfg.t``, ``x <= x_max``.

    Options: ``coins`` (default 1) extra random coins drawn from ``seed`` on
    top of the configured one.
    """
    from .genfun import gen_amplitudes

    rng = np.random.default_rng(cfg.seed)
    coins = [cfg.coin] + [random_coin(rng) for _ in range(int(cfg.options.get("coins", 0)))]
    order = max(cfg.t, 1)
    names = ["own_up", "own_down", "other_up", "other_down"]
    rows, worst = [], 0.0
    for ci, coin in enumerate(coins):
        ctx = make_context(coin, cfg.kappa, order=order)
        hist = []
        walk = ReducedWalk(coin, cfg.kappa, order + 1)
        hist.append(walk.amps.copy())
        for _ in range(order):
            walk.step()
            hist.append(walk.amps.copy())
        for x in range(cfg.x_max + 1):
            g = gen_amplitudes(ctx, x)
            for m in range(2):
                for l in range(2):
                    if x == 0 and l == 1:
                        continue
                    ser = g[m, l].coeffs
                    for t in range(cfg.t + 1):
                        sim = hist[t][m, x, l]
                        d = abs(sim - ser[t])
                        worst = max(worst, d)
                        rows.append([ci, t, x, names[2 * m + l], _cstr(sim), _cstr(ser[t]), d])
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-8
    return RunResult(["coin", "t", "x", "component", "simulated", "series", "abs_diff"], rows,
                     {"coins": len(coins), "max_abs_diff": worst, "tolerance": tol},
                     worst <= tol)


def _cstr(v: complex) -> str:
    v = complex(v)
    return f"{v.real!r}{v.imag:+.17g}j"


def tree_check(cfg: ExperimentConfig) -> RunResult:
    """Tree walk shells against the joined walk on ``J_kappa_prime``.

    ``kappa`` is the interior degree and ``kappa_prime`` (default ``kappa``)
    the root degree; ``psi`` lives on the root ports so it needs
    ``kappa_prime`` components. The option ``max_depth`` bounds the tree.
    """
    kp = cfg.kappa_prime if cfg.kappa_prime is not None else cfg.kappa
    if cfg.psi.kappa != kp:
        raise ValidationError(f"psi needs kappa_prime={kp} components, has {cfg.psi.kappa}")
    depth = int(cfg.options.get("max_depth", max(cfg.t, 1)))
    rep = tree_reduce_compare(cfg.kappa, kp, cfg.omega, cfg.psi, cfg.t, depth, cfg.literal)
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-10
    return RunResult.from_report(rep, {"kappa_prime": kp, "omega": str(cfg.omega),
                                       "tolerance": tol}, rep.max_abs_err <= tol)


def compare(cfg: ExperimentConfig) -> RunResult:
    """Dispatch on ``cfg.mode``."""
    return {"fig2": run_fig2, "fig3": run_fig3, "reduction": run_reduction,
            "residue": run_residue}[cfg.mode](cfg)


def random_config(seed: int, kappa: int, t: int = 100, **kw) -> ExperimentConfig:
    """Config with a random coin and state, used by property runs."""
    rng = np.random.default_rng(seed)
    coin = random_coin(rng)
    psi = random_initial_state(rng, kappa)
    return ExperimentConfig(kappa=kappa, coin=coin, psi=psi, t=t, seed=seed, **kw)
