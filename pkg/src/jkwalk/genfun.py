"""Generating functions of the reduced walk and their residue asymptotics.

With ``Psi*_t(x)`` the reduced state, ``sum_t Psi*_t(x) z^t`` has closed
forms built from the smaller root ``lambda(z)`` of

    lambda^2 - (Delta z + 1/z) lambda / d + a / d = 0.

Everything is available twice: as truncated :class:`~jkwalk.series.Series`
(coefficient ``t`` is the amplitude at time ``t``, an independent oracle
for the walk) and pointwise for complex ``z`` (used by the contour
integrals that extract the non-decaying part of the amplitudes).

The square root ``sqrt(nu(z))`` is never taken independently; it is
``1 + Delta z^2 - 2 d z lambda(z)``, so one branch choice (that of
``lambda``) governs every formula.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coin_params import CoinU2, DerivedParams, derive_params
from .errors import BranchError, SingularSeriesError
from .reduced import DOWN, OTHER, OWN, UP
from .series import Series

DEFAULT_ORDER = 256

__all__ = [
    "GenFunContext",
    "make_context",
    "lambda_series",
    "gen_amplitudes",
    "appendix_b_functions",
    "lambda_point",
    "gen_point",
    "branch_points",
    "contour_residue",
    "residue_asymptotics",
]


@dataclass
class GenFunContext:
    """Series and constants shared by the generating-function formulas.

    Attributes
    ----------
    coin : CoinU2
    params : DerivedParams
    order : int
        Truncation order of every series.
    lam, sqrt_nu, mu, eta_plus, eta_minus, core : Series
        ``lambda(z)``; ``1 + Delta z^2 - 2 d z lambda``;
        ``mu = (d lambda - Delta z) z / c``; ``2c + 1 - Delta z^2``;
        ``2c - 1 + Delta z^2``; and the common factor of ``Phi(x; z)``.
    w_plus_sq, w_minus_sq : complex
        Squared pole locations, both of unit modulus.
    r1 : float
        Radius inside which ``|lambda| < 1`` and ``|mu| < 1``.
    sign : int
        Global sign of the amplitude formulas, fixed against the walk.
    """

    coin: CoinU2
    params: DerivedParams
    order: int
    lam: Series
    sqrt_nu: Series
    mu: Series
    eta_plus: Series
    eta_minus: Series
    core: Series
    w_plus_sq: complex
    w_minus_sq: complex
    r1: float = field(default=0.0)
    sign: int = -1


def _pole_squares(coin: CoinU2) -> tuple[complex, complex]:
    # |a|^2 - 1 -+ c = -c (conj(c) +- 1), so -+c(1 +- c) / (Delta (|a|^2 - 1 -+ c))
    # reduces to (1 +- c) / (Delta (1 +- conj c)), which stays unimodular as c -> -+1
    c, D = coin.c, coin.delta
    wp2 = (1 + c) / (D * (1 + np.conj(c)))
    wm2 = (1 - c) / (D * (1 - np.conj(c)))
    return complex(wp2), complex(wm2)


def lambda_series(coin: CoinU2, order: int) -> Series:
    """Series of ``(Delta z^2 + 1 - sqrt(nu(z))) / (2 d z)``.

    ``nu(z) = 1 + 2 Delta (1 - 2|a|^2) z^2 + Delta^2 z^4``; the numerator has
    no constant term, which is checked before dividing by ``z``. One extra
    order is carried internally so that the result is exact to ``order``.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    n = order + 1
    D, a, d = coin.delta, coin.a, coin.d
    z2 = Series.z(n, 2)
    nu = 1 + 2 * D * (1 - 2 * abs(a) ** 2) * z2 + D * D * Series.z(n, 4)
    num = 1 + D * z2 - nu.sqrt()
    if abs(num[0]) > 1e-14:
        raise BranchError(f"numerator of lambda has constant term {num[0]}")
    return Series(num.shift(-1).coeffs[: order + 1] / (2 * d))


def _radius_r1(coin: CoinU2) -> float:
    rad = abs(coin.c)
    th = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    for _ in range(60):
        z = rad * np.exp(1j * th)
        lam = lambda_point(coin, z)
        mu = (coin.d * lam - coin.delta * z) * z / coin.c
        if np.max(np.abs(lam)) < 1 and np.max(np.abs(mu)) < 1:
            return float(rad)
        rad *= 0.95
    raise BranchError("could not find a radius with |lambda| < 1")


def make_context(coin: CoinU2, kappa: int, order: int = DEFAULT_ORDER) -> GenFunContext:
    """Build every series needed by :func:`gen_amplitudes` up to ``order``."""
    params = derive_params(coin, kappa)
    a, c, d, D = coin.a, coin.c, coin.d, coin.delta
    z = Series.z(order)
    z2 = Series.z(order, 2)
    lam = lambda_series(coin, order)
    sqrt_nu = 1 + D * z2 - 2 * d * z * lam
    mu = (d * lam - D * z) * z / c
    eta_p = (2 * c + 1) - D * z2
    eta_m = (2 * c - 1) + D * z2
    wp2, wm2 = _pole_squares(coin)
    den = (z2 - wp2) * (z2 - wm2) * (4 * (1 - c * c))
    core = (eta_p + sqrt_nu) * (eta_m - sqrt_nu) * (wp2 * wm2) / den
    return GenFunContext(coin, params, order, lam, sqrt_nu, mu, eta_p, eta_m, core,
                         wp2, wm2, _radius_r1(coin))


def gen_amplitudes(ctx: GenFunContext, x: int) -> np.ndarray:
    """Generating functions of the four amplitudes at site ``x``.

    Returns
    -------
    numpy.ndarray of Series, shape (2, 2)
        Entry ``[m, l]`` is the series of the amplitude on ``|m, x, l>``,
        indexed like :class:`~jkwalk.reduced.ReducedState`.

    Notes
    -----
    For ``x >= 1`` with ``Phi = (d lambda / a)^(x-1) core``::

        Own, Up     = -(d / ac) (lambda - a z) (mu + a_k) Phi
        Other, Up   = -(d sqrt(k-1) / ac) (lambda - a z) b_k Phi
        Own, Down   = -z (mu + a_k) Phi
        Other, Down = -z sqrt(k-1) b_k Phi

    At the origin the factor is ``core`` itself (no power of ``lambda``)
    and the ``Own`` channel also carries the identity term of the ``t = 0``
    state: ``Own = 1 - (mu + a_k) mu core``,
    ``Other = -sqrt(k-1) b_k mu core``, and both Down slots vanish.
    """
    if x < 0:
        raise ValueError("x must be non-negative")
    p = ctx.params
    a, c, d = ctx.coin.a, ctx.coin.c, ctx.coin.d
    ak, bk = p.a_kappa, p.b_kappa
    sk = np.sqrt(p.kappa - 1)
    s = ctx.sign
    n = ctx.order
    out = np.empty((2, 2), dtype=object)
    if x == 0:
        out[OWN, UP] = 1 + s * (ctx.mu + ak) * ctx.mu * ctx.core
        out[OTHER, UP] = s * sk * bk * ctx.mu * ctx.core
        out[OWN, DOWN] = Series.const(0, n)
        out[OTHER, DOWN] = Series.const(0, n)
        return out
    phi = (ctx.lam * (d / a)) ** (x - 1) * ctx.core
    z = Series.z(n)
    lz = ctx.lam - a * z
    out[OWN, UP] = s * (d / (a * c)) * lz * (ctx.mu + ak) * phi
    out[OTHER, UP] = s * (d * sk * bk / (a * c)) * lz * phi
    out[OWN, DOWN] = s * z * (ctx.mu + ak) * phi
    out[OTHER, DOWN] = s * sk * bk * z * phi
    return out


def appendix_b_functions(ctx: GenFunContext, x: int) -> dict:
    """Path-weight generating functions of the half-line walk.

    Returns a dict with keys ``"Bq"``, ``"Br"`` (paths ``0 -> x``),
    ``"Brt"`` and ``"BrtI"`` (returns ``0 -> 0`` through the origin block).
    With ``B = (d lambda - Delta z) z / c``: ``Brt = B / (1 - B^2)`` holds the
    odd powers of ``B`` and ``BrtI = B^2 / (1 - B^2)`` the even ones.
    """
    if x < 0:
        raise ValueError("x must be non-negative")
    a, c, d = ctx.coin.a, ctx.coin.c, ctx.coin.d
    n = ctx.order
    lamx = (ctx.lam * (d / a)) ** x
    if x == 0:
        bq = Series.const(0, n)
    else:
        bq = lamx * (1 / d)
    z = Series.z(n)
    try:
        br = lamx * (ctx.lam - a * z).shift(-1) / (a * c)
    except SingularSeriesError as exc:
        raise BranchError("lambda - a z is not divisible by z") from exc
    blk = ctx.mu
    inv = (1 - blk * blk).invert()
    return {"Bq": bq, "Br": br, "Brt": blk * inv, "BrtI": blk * blk * inv}


def lambda_point(coin: CoinU2, z) -> np.ndarray:
    """Root of smaller modulus of the lambda equation at each ``z``."""
    z = np.asarray(z, dtype=complex)
    a, d, D = coin.a, coin.d, coin.delta
    bb = -(D * z + 1 / z) / d
    disc = np.sqrt(bb * bb - 4 * a / d)
    r1 = (-bb + disc) / 2
    r2 = (-bb - disc) / 2
    # take the small root from the product a/d to avoid cancellation
    big = np.where(np.abs(r1) >= np.abs(r2), r1, r2)
    return (a / d) / big


def gen_point(ctx: GenFunContext, x: int, z) -> np.ndarray:
    """Pointwise values of :func:`gen_amplitudes`, shape ``(2, 2) + z.shape``."""
    z = np.asarray(z, dtype=complex)
    p = ctx.params
    a, c, d, D = ctx.coin.a, ctx.coin.c, ctx.coin.d, ctx.coin.delta
    ak, bk = p.a_kappa, p.b_kappa
    sk = np.sqrt(p.kappa - 1)
    s = ctx.sign
    lam = lambda_point(ctx.coin, z)
    sq = 1 + D * z * z - 2 * d * z * lam
    mu = (d * lam - D * z) * z / c
    wp2, wm2 = ctx.w_plus_sq, ctx.w_minus_sq
    core = (wp2 * wm2 * ((2 * c + 1 - D * z * z) + sq) * ((2 * c - 1 + D * z * z) - sq)
            / (4 * (1 - c * c) * (z * z - wp2) * (z * z - wm2)))
    out = np.zeros((2, 2) + z.shape, dtype=complex)
    if x == 0:
        out[OWN, UP] = 1 + s * (mu + ak) * mu * core
        out[OTHER, UP] = s * sk * bk * mu * core
        return out
    phi = (d * lam / a) ** (x - 1) * core
    out[OWN, UP] = s * (d / (a * c)) * (lam - a * z) * (mu + ak) * phi
    out[OTHER, UP] = s * (d * sk * bk / (a * c)) * (lam - a * z) * phi
    out[OWN, DOWN] = s * z * (mu + ak) * phi
    out[OTHER, DOWN] = s * sk * bk * z * phi
    return out


def branch_points(coin: CoinU2) -> np.ndarray:
    """The four zeros of ``nu(z)``; they lie on the unit circle."""
    D, a = coin.delta, coin.a
    u = np.roots([D * D, 2 * D * (1 - 2 * abs(a) ** 2), 1])
    r = np.sqrt(u.astype(complex))
    return np.concatenate([r, -r])


def contour_residue(ctx: GenFunContext, x: int, pole: complex, eps: float,
                    nodes: int = 512) -> np.ndarray:
    """Trapezoid rule for ``(1 / 2 pi i)`` times the integral around ``pole``."""
    th = 2 * np.pi * np.arange(nodes) / nodes
    ring = eps * np.exp(1j * th)
    vals = gen_point(ctx, x, pole + ring)
    return np.mean(vals * ring, axis=-1)


def poles(ctx: GenFunContext, tol: float = 1e-9) -> list[complex]:
    """Distinct points ``+-w_+`` and ``+-w_-``."""
    out = []
    for w2 in (ctx.w_plus_sq, ctx.w_minus_sq):
        w = np.sqrt(complex(w2))
        for p in (w, -w):
            if all(abs(p - q) > tol for q in out):
                out.append(complex(p))
    return out


def adaptive_residue(ctx: GenFunContext, x: int, pole: complex, eps: float = 1e-3,
                     eps_min: float = 1e-6, nodes: int = 512,
                     rtol: float = 1e-9, atol: float = 1e-12) -> np.ndarray:
    """Residue at ``pole`` with the contour radius halved until it is stable.

    The radius starts at ``eps``. It is halved while a branch point of
    ``lambda`` lies within ``2 eps`` of the pole, and then until estimates at
    ``eps`` and ``eps / 2`` agree to ``rtol`` (relative) or ``atol``.

    Raises
    ------
    BranchError
        If no stable estimate is found before the radius drops below ``eps_min``.
    """
    bp = branch_points(ctx.coin)
    gap = float(np.min(np.abs(bp - pole)))
    while eps >= eps_min and gap < 2 * eps:
        eps /= 2
    prev = None
    while eps >= eps_min:
        cur = contour_residue(ctx, x, pole, eps, nodes)
        if prev is not None:
            diff = np.max(np.abs(cur - prev))
            if diff <= atol + rtol * np.max(np.abs(cur)):
                return cur
        prev = cur
        eps /= 2
    raise BranchError(f"residue at {pole:.6f} did not stabilise above eps_min={eps_min}")


def residue_asymptotics(ctx: GenFunContext, x: int, t: int, **kwargs) -> np.ndarray:
    """Non-decaying part of ``Psi*_t(x)`` from the poles on the unit circle.

    Returns ``-sum_p Res(p) p^{-(t+1)}`` over the distinct poles ``+-w_pm``,
    shape ``(2, 2)`` indexed ``[m, l]``. When ``w_+^2 = w_-^2`` (real ``c``)
    the two pairs coincide and are counted once.
    """
    total = np.zeros((2, 2), dtype=complex)
    for p in poles(ctx):
        res = adaptive_residue(ctx, x, p, **kwargs)
        total += res * np.exp(-1j * (t + 1) * np.angle(p)) * abs(p) ** (-(t + 1))
    return -total
