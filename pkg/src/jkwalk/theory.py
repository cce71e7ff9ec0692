"""Closed-form long-time behaviour of the walk on ``J_kappa``.

Two families of formulas are evaluated here:

* localisation: the limit of ``P(X_{t,r} = x)`` at fixed ``x``, a sum of two
  geometrically decaying terms ``L_m``, ``L_p`` and an oscillating term
  ``L_c`` whose phase turns by ``arg(K_x / conj(K_x)) / 2`` per step;
* weak convergence: ``X_{t,r} / t`` tends to an atom at 0 plus a density
  ``C_d^r(x) f_K(x)`` on ``[0, |a|)``.

Every evaluator takes ``literal``. With ``literal=False`` (default) it uses
the forms that agree with simulation; ``literal=True`` evaluates the
formulas exactly as originally stated, kept for comparison. The two differ
in three places:

1. ``L_c`` carries the opposite overall sign.
2. ``theta_3`` is ``|sum_{j != r} psi_j|^2``; the stated sum counts every
   cross pair twice.
3. The density. Writing ``S = sum_j psi_j`` and ``D_r = sum_j (psi_j - psi_r)``,
   the branch amplitude splits as ``(b_k / 2)(S phi_+ - D_r phi_-)``, where
   ``phi_+`` and ``phi_-`` are half-line walks whose origin reflects with sign
   ``+1`` and ``-1``. The limit density is then
   ``(b_k^2/4)[|S|^2 rho_+ + |D_r|^2 rho_- - 2 Re(conj(S) D_r chi)]``, with
   ``rho_+-`` the half-line densities and ``chi`` their cross density. The
   stated ``Gamma_1..3`` drop an odd-in-``x`` part of ``chi``. That part sums
   to zero over branches, so total mass is unaffected, but each branch's
   density is wrong for ``kappa >= 2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .coin_params import CoinU2, DerivedParams, as_psi, classify_regime, derive_params
from .errors import RegimeError

__all__ = [
    "ThetaTriple",
    "LocalizationTerms",
    "LimitMeasure",
    "theta_triple",
    "gamma_pm",
    "gamma_times",
    "oscillation_phase",
    "localization_terms",
    "localization_asymptotic",
    "oscillation_sum_rule",
    "atom_weights",
    "localized_mass",
    "f_K",
    "density_gammas",
    "limit_measure",
    "total_mass",
    "corollary_phi0_localization",
    "corollary_phi0_measure",
    "corollary_halfline_localization",
    "corollary_halfline_measure",
]

PHI0_TOL = 1e-12


def _params(coin, kappa) -> DerivedParams:
    if isinstance(coin, DerivedParams):
        return coin
    if not isinstance(coin, CoinU2):
        coin = CoinU2.from_matrix(coin)
    return derive_params(coin, kappa)


def _sums(psi: np.ndarray, r: int) -> tuple[complex, complex]:
    """``S = sum psi_j`` and ``D_r = sum (psi_j - psi_r)``."""
    s = complex(psi.sum())
    return s, s - psi.size * complex(psi[r])


@dataclass(frozen=True)
class ThetaTriple:
    """Quadratic forms of the initial state seen from branch ``r``."""

    theta1: float
    theta2: complex
    theta3: float


def theta_triple(psi, r: int, literal: bool = False) -> ThetaTriple:
    """``theta1 = |psi_r|^2``, ``theta2 = conj(psi_r) sum_{j != r} psi_j``, ``theta3``.

    ``theta3 = |sum_{j != r} psi_j|^2``; with ``literal=True`` the cross
    pairs are counted twice.
    """
    p = as_psi(psi)
    others = np.delete(p, r)
    v = others.sum()
    th3 = abs(v) ** 2
    if literal:
        th3 += abs(v) ** 2 - np.sum(np.abs(others) ** 2)
    return ThetaTriple(float(abs(p[r]) ** 2), complex(np.conj(p[r]) * v), float(th3))


@dataclass(frozen=True)
class LocalizationTerms:
    """Terms of the localisation formula at one ``(t, x, r)``."""

    Lm: float
    Lp: float
    Lc: float
    Gamma_plus: float
    Gamma_minus: float
    Gamma_times: complex


def gamma_pm(x, p: DerivedParams, sign: int) -> np.ndarray:
    """``Gamma_+(x)`` for ``sign = +1`` and ``Gamma_-(x)`` for ``sign = -1``.

    ``b_k^2 |c|^2 (cos phi +- |c|)^2 / K_pm^2`` times ``1`` at ``x = 0`` and
    ``q^(x-1) (1 + q)``, ``q = |a|^2 / K_pm``, for ``x >= 1``.
    """
    x = np.asarray(x)
    K = p.K_plus if sign > 0 else p.K_minus
    pref = p.b_kappa ** 2 * p.abs_c ** 2 * (np.cos(p.phi) + sign * p.abs_c) ** 2 / K ** 2
    q = p.abs_a ** 2 / K
    # q > 1 only when the term is switched off; let it overflow quietly
    with np.errstate(over="ignore"):
        body = q ** (np.maximum(x, 1) - 1) * (1 + q)
    return pref * np.where(x == 0, 1.0, body)


def oscillation_phase(p: DerivedParams) -> float:
    """Half the argument of ``K_x / conj(K_x)``, in ``(-pi/2, pi/2]``."""
    return 0.5 * float(np.angle(p.K_times / np.conj(p.K_times)))


def gamma_times(x, t, p: DerivedParams) -> np.ndarray:
    """``Gamma_x(x, t)``, the complex amplitude of the oscillating term.

    The power ``sqrt(K_x / conj K_x)^(t+1)`` is evaluated as
    ``exp(i (t+1) theta)`` with ``theta`` from :func:`oscillation_phase`.
    """
    x = np.asarray(x)
    th = oscillation_phase(p)
    kx = p.K_times
    pref = (np.exp(1j * (np.asarray(t) + 1) * th) * p.abs_c ** 2
            * (np.cos(p.phi) ** 2 - p.abs_c ** 2) / kx ** 2)
    q = p.abs_a ** 2 / np.sqrt(p.K_plus * p.K_minus)
    with np.errstate(over="ignore", invalid="ignore"):
        body = q ** (np.maximum(x, 1) - 1) * (1 - p.abs_a ** 2 / np.conj(kx))
        return pref * np.where(x == 0, -np.exp(1j * th), body)


def localization_terms(t, x, r: int, coin, kappa: int, psi,
                       literal: bool = False) -> LocalizationTerms:
    """All terms of the localisation formula, before indicators and parity."""
    p = _params(coin, kappa)
    ps = as_psi(psi)
    s, d = _sums(ps, r)
    gp = gamma_pm(x, p, +1)
    gm = gamma_pm(x, p, -1)
    gx = gamma_times(x, t, p)
    with np.errstate(over="ignore", invalid="ignore"):
        lc = 2 * p.b_kappa ** 2 * np.real(gx * np.conj(s) * d)
        lm, lp = gm * abs(s) ** 2, gp * abs(d) ** 2
    if not literal:
        lc = -lc
    return LocalizationTerms(Lm=lm, Lp=lp, Lc=lc, Gamma_plus=gp, Gamma_minus=gm, Gamma_times=gx)


def localization_asymptotic(t, x, r: int, coin, kappa: int, psi,
                            literal: bool = False) -> np.ndarray:
    """Predicted ``P(X_{t,r} = x)`` for large ``t``.

    ``(1 + (-1)^(t+x)) / 2`` times the sum of ``L_m``, ``L_p`` and ``L_c``,
    each switched on by its indicator on ``cos phi`` (see
    :func:`~jkwalk.coin_params.classify_regime`). ``t`` and ``x`` broadcast.

    Examples
    --------
    >>> from jkwalk.coin_params import make_phased_hadamard
    >>> float(localization_asymptotic(11, 2, 0, make_phased_hadamard(0.0), 3, [1, 0, 0]))
    0.0
    """
    p = _params(coin, kappa)
    reg = classify_regime(p)
    terms = localization_terms(t, x, r, p, kappa, psi, literal)
    zero = np.zeros(np.broadcast(np.asarray(t), np.asarray(x)).shape)
    total = (np.where(reg.has_Lm, terms.Lm, zero) + np.where(reg.has_Lp, terms.Lp, zero)
             + np.where(reg.has_Lc, terms.Lc, zero))
    parity = (1 + (-1.0) ** (np.asarray(t) + np.asarray(x))) / 2
    return np.asarray(parity * total, dtype=float)


def oscillation_sum_rule(t, x, coin, kappa: int, psi, literal: bool = False) -> np.ndarray:
    """``sum_r L_c^r(x, t)``, which vanishes because ``sum_r D_r = 0``."""
    ps = as_psi(psi)
    return sum(localization_terms(t, x, r, coin, kappa, ps, literal).Lc for r in range(ps.size))


def atom_weights(p: DerivedParams, psi, r: int) -> tuple[float, float]:
    """``(C_m, C_p^r)``: weights of the atom at 0 before indicators."""
    ps = as_psi(psi)
    s, d = _sums(ps, r)
    bk2, ac, cp = p.b_kappa ** 2, p.abs_c, np.cos(p.phi)
    cm = bk2 * ac * (ac - cp) / (2 * p.K_minus) * abs(s) ** 2
    cpl = bk2 * ac * (ac + cp) / (2 * p.K_plus) * abs(d) ** 2
    return float(cm), float(cpl)


def localized_mass(t: int, r: int, coin, kappa: int, psi, parity: bool = True,
                   x_max: int = 4000) -> dict:
    """Sums of ``L_m`` and ``L_p`` over ``x`` next to the atom weights.

    With ``parity=True`` each term carries ``(1 + (-1)^(t+x)) / 2``, which is
    what the walk sees at a single time; the unweighted sums are twice the
    atom weights. Only terms switched on for the coin are meaningful: an
    inactive term grows in ``x`` and its sum is reported as ``nan``.
    """
    p = _params(coin, kappa)
    x = np.arange(x_max + 1)
    terms = localization_terms(t, x, r, p, kappa, psi)
    w = (1 + (-1.0) ** (t + x)) / 2 if parity else np.ones(x.size)
    cm, cpl = atom_weights(p, psi, r)
    reg = classify_regime(p)
    with np.errstate(invalid="ignore"):
        lm = float(np.sum(w * terms.Lm)) if reg.has_Lm else float("nan")
        lp = float(np.sum(w * terms.Lp)) if reg.has_Lp else float("nan")
    return {"Lm_sum": lm, "Lp_sum": lp, "C_m": cm, "C_p": cpl}


def f_K(x, p: DerivedParams) -> np.ndarray:
    """``sqrt(1 - |a|^2) / (pi (1 - x^2) sqrt(|a|^2 - x^2))`` on ``[0, |a|)``, else 0."""
    return _f_K(x, p.abs_a)


def _f_K(x, A: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    inside = (x >= 0) & (x < A)
    xs = np.where(inside, x, 0.0)
    val = np.sqrt(1 - A * A) / (np.pi * (1 - xs * xs) * np.sqrt(A * A - xs * xs))
    return np.where(inside, val, 0.0)


def density_gammas(x, p: DerivedParams, literal: bool = False):
    """``(Gamma_1, Gamma_2, Gamma_3)`` of the density numerator at ``x``.

    The corrected forms are built from ``E_pm = K_pm - (1 - x^2) sin^2 phi``:
    ``R_+ = 2 (1 - |c| cos phi) E_+``, ``R_- = 2 (1 + |c| cos phi) E_-`` and
    the cross polynomial
    ``X = -(2 s^2 x^3 + (1 + (|a|^2 - |c|^2) cos 2phi) x)
    + 2i |c| s ((cos^2 phi - |c|^2) - (1 + cos^2 phi) x^2)``, ``s = sin phi``.
    """
    x = np.asarray(x, dtype=float)
    ac, A2 = p.abs_c, p.abs_a ** 2
    cp, sp = np.cos(p.phi), np.sin(p.phi)
    ak, bk, k = p.a_kappa, p.b_kappa, p.kappa
    if literal:
        e = 1 + ac ** 2 - 2 * ac ** 2 * cp ** 2 - (1 - x * x) * sp ** 2
        g1 = 4 * ak * ac * (A2 - x * x) * cp * sp ** 2 + (ak ** 2 + 2 * ak * ac * cp + 1) * e
        g2 = (-2 * bk * ac * (A2 - x * x) * 1j * np.exp(1j * p.phi) * cp * sp
              + bk * (ak + ac * np.exp(1j * p.phi)) * e)
        g3 = bk ** 2 * e
        return g1, g2, g3
    ep = p.K_plus - (1 - x * x) * sp ** 2
    em = p.K_minus - (1 - x * x) * sp ** 2
    rp = 2 * (1 - ac * cp) * ep
    rm = 2 * (1 + ac * cp) * em
    cross = (-(2 * sp ** 2 * x ** 3 + (1 + (A2 - ac ** 2) * np.cos(2 * p.phi)) * x)
             + 2j * ac * sp * ((cp ** 2 - ac ** 2) - (1 + cp ** 2) * x * x))
    w = bk ** 2 / 4
    g1 = w * (rp + (k - 1) ** 2 * rm + 2 * (k - 1) * cross.real)
    g2 = w * (rp - (k - 1) * rm - cross + (k - 1) * np.conj(cross))
    g3 = w * (rp + rm - 2 * cross.real)
    return g1, g2, g3


@dataclass
class LimitMeasure:
    """Atom at 0 plus the density ``weight(x) f_K(x)`` on ``[0, support)``.

    Attributes
    ----------
    atom : float
    weight : callable
        Vectorised ``C_d^r(x)``; smooth on ``[0, support]``.
    support : float
        Right end ``|a|``.
    """

    atom: float
    weight: object
    support: float

    def density(self, x) -> np.ndarray:
        """``weight(x) f_K(x)``; zero outside ``[0, support)``."""
        x = np.asarray(x, dtype=float)
        return self.weight(x) * _f_K(x, self.support)

    def _u_integrand(self, u):
        # with x = A sin u, f_K(x) dx = sqrt(1 - A^2) / (pi (1 - x^2)) du exactly
        A = self.support
        x = A * np.sin(u)
        return self.weight(x) * np.sqrt(1 - A * A) / (np.pi * (1 - x * x))

    def _u_range(self, lo: float, hi: float | None) -> tuple[float, float]:
        A = self.support
        hi = A if hi is None else min(hi, A)
        lo = min(max(lo, 0.0), A)
        return float(np.arcsin(lo / A)), float(np.arcsin(max(hi, lo) / A))

    def integrate(self, lo: float = 0.0, hi: float | None = None) -> float:
        """Mass of the density on ``[lo, hi]``, by adaptive quadrature in ``u``."""
        u0, u1 = self._u_range(lo, hi)
        if u1 <= u0:
            return 0.0
        f = lambda u: float(self._u_integrand(u))
        # for |a| near 1 the integrand peaks within ~sqrt(1 - |a|^2) of pi/2
        cuts = [u0]
        width = np.sqrt(max(1 - self.support ** 2, 0.0))
        for k in (100, 10, 1):
            uc = np.pi / 2 - k * width
            if cuts[-1] < uc < u1:
                cuts.append(uc)
        cuts.append(u1)
        return float(sum(integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-11, limit=500)[0]
                         for a, b in zip(cuts[:-1], cuts[1:])))

    def cdf_on(self, xs, lo: float = 0.0, nodes: int = 200_001) -> np.ndarray:
        """Density mass on ``[lo, x]`` for each ``x`` in ``xs``.

        Cumulative trapezoid rule in ``u`` on a fixed grid of ``nodes`` points.
        """
        A = self.support
        u0, _ = self._u_range(lo, None)
        ug = np.linspace(u0, np.pi / 2, nodes)
        cum = integrate.cumulative_trapezoid(self._u_integrand(ug), ug, initial=0.0)
        xs = np.clip(np.asarray(xs, dtype=float), max(lo, 0.0), A)
        return np.interp(np.arcsin(xs / A), ug, cum)

    def total(self) -> float:
        return self.atom + self.integrate()


def limit_measure(r: int, coin, kappa: int, psi, literal: bool = False) -> LimitMeasure:
    """Weak limit of ``X_{t,r} / t``.

    The atom is ``C_m`` if ``cos phi < |c|`` plus ``C_p^r`` if
    ``cos phi > -|c|``; the density is
    ``(Gamma_1 theta_1 + 2 Re(Gamma_2 theta_2) + Gamma_3 theta_3) x^2 f_K(x)
    / (E_+ E_-)``.
    """
    p = _params(coin, kappa)
    ps = as_psi(psi)
    reg = classify_regime(p)
    cm, cpl = atom_weights(p, ps, r)
    atom = reg.has_Lm * cm + reg.has_Lp * cpl
    th = theta_triple(ps, r, literal)
    sp2 = np.sin(p.phi) ** 2

    def weight(x):
        x = np.asarray(x, dtype=float)
        g1, g2, g3 = density_gammas(x, p, literal)
        den = (p.K_plus - (1 - x * x) * sp2) * (p.K_minus - (1 - x * x) * sp2)
        num = g1 * th.theta1 + 2 * np.real(g2 * th.theta2) + g3 * th.theta3
        return np.real(num) * x * x / den

    return LimitMeasure(float(atom), weight, p.abs_a)


def total_mass(coin, kappa: int, psi, literal: bool = False) -> float:
    """``sum_r`` of atom plus density mass; equals 1 for a valid measure."""
    ps = as_psi(psi)
    return float(sum(limit_measure(r, coin, kappa, ps, literal).total() for r in range(ps.size)))


def _require_phi0(p: DerivedParams) -> None:
    if abs(p.phi) > PHI0_TOL:
        raise RegimeError(f"this formula needs arg(c) = 0, got {p.phi:.3e}")


def corollary_phi0_localization(t, x, r: int, coin, kappa: int, psi,
                                literal: bool = False) -> np.ndarray:
    """Localisation at ``arg(c) = 0``, where only ``L_p`` survives.

    ``b_k^2 |c|^2 / (1 + |c|)^2 {delta_0(x) + (1 - delta_0(x)) (2 / (1 + |c|))
    ((1 - |c|) / (1 + |c|))^(x-1)} |D_r|^2`` times parity. ``literal=True``
    uses ``1 + |c|^2`` in the leading denominator instead.
    """
    p = _params(coin, kappa)
    _require_phi0(p)
    ps = as_psi(psi)
    _, d = _sums(ps, r)
    ac = p.abs_c
    x = np.asarray(x)
    lead = p.b_kappa ** 2 * ac ** 2 / ((1 + ac ** 2) if literal else (1 + ac) ** 2)
    body = (2 / (1 + ac)) * ((1 - ac) / (1 + ac)) ** (np.maximum(x, 1) - 1)
    parity = (1 + (-1.0) ** (np.asarray(t) + x)) / 2
    return np.asarray(parity * lead * np.where(x == 0, 1.0, body) * abs(d) ** 2, dtype=float)


def corollary_phi0_measure(r: int, coin, kappa: int, psi, literal: bool = False) -> LimitMeasure:
    """Weak limit at ``arg(c) = 0``.

    Atom ``b_k^2 |c| / (2 (1 + |c|)) |D_r|^2``; density
    ``(b_k^2 / (2 |a|^2)) [(1 + |c|)|S|^2 + (1 - |c|)|D_r|^2 + 2x Re(conj(S) D_r)]
    x^2 f_K(x)``. ``literal=True`` drops the term linear in ``x``, which gives
    ``(|(|c| - 1) psi_r + b_k S|^2 + |a|^2 |psi_r|^2) x^2 f_K / |a|^2``.
    """
    p = _params(coin, kappa)
    _require_phi0(p)
    ps = as_psi(psi)
    s, d = _sums(ps, r)
    ac, A2, bk2 = p.abs_c, p.abs_a ** 2, p.b_kappa ** 2
    atom = bk2 * ac / (2 * (1 + ac)) * abs(d) ** 2
    base = bk2 / (2 * A2) * ((1 + ac) * abs(s) ** 2 + (1 - ac) * abs(d) ** 2)
    lin = 0.0 if literal else bk2 / A2 * np.real(np.conj(s) * d)

    def weight(x):
        x = np.asarray(x, dtype=float)
        return (base + lin * x) * x * x

    return LimitMeasure(float(atom), weight, p.abs_a)


def _require_halfline(kappa: int) -> None:
    if kappa != 1:
        raise RegimeError(f"the half-line formulas need kappa = 1, got {kappa}")


def corollary_halfline_localization(t, x, coin, kappa: int = 1) -> np.ndarray:
    """Localisation on the half line (``kappa = 1``, origin reflects).

    ``4 |c|^2 (cos phi - |c|)^2 / K_-^2 {...}`` when ``cos phi < |c|``.
    """
    _require_halfline(kappa)
    p = _params(coin, 1)
    x = np.asarray(x)
    q = p.abs_a ** 2 / p.K_minus
    pref = 4 * p.abs_c ** 2 * (np.cos(p.phi) - p.abs_c) ** 2 / p.K_minus ** 2
    body = q ** (np.maximum(x, 1) - 1) * (1 + q)
    parity = (1 + (-1.0) ** (np.asarray(t) + x)) / 2
    on = float(np.cos(p.phi) < p.abs_c)
    return np.asarray(on * parity * pref * np.where(x == 0, 1.0, body), dtype=float)


def corollary_halfline_measure(coin, kappa: int = 1) -> LimitMeasure:
    """Weak limit on the half line.

    Atom ``2|c|(|c| - cos phi) / K_-`` when ``cos phi < |c|``; density
    ``2 (1 - |c| cos phi) / (K_- - (1 - x^2) sin^2 phi) x^2 f_K(x)``.
    """
    _require_halfline(kappa)
    p = _params(coin, 1)
    ac, cp, sp2 = p.abs_c, np.cos(p.phi), np.sin(p.phi) ** 2
    atom = float(cp < ac) * 2 * ac * (ac - cp) / p.K_minus

    def weight(x):
        x = np.asarray(x, dtype=float)
        return 2 * (1 - ac * cp) / (p.K_minus - (1 - x * x) * sp2) * x * x

    return LimitMeasure(float(atom), weight, p.abs_a)
