"""Coin operators and the scalars derived from them.

A coin is a 2x2 unitary ``[[a, b], [c, d]]`` with ``abcd != 0``. Every
closed-form quantity used by :mod:`jkwalk.theory` is derived here once, in
:func:`derive_params`, so the other modules never recompute ``K_pm`` and
friends by hand.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

UNITARY_TOL = 1e-12
NORM_TOL = 1e-12

__all__ = [
    "CoinU2",
    "DerivedParams",
    "InitialState",
    "Regime",
    "make_grover",
    "make_phased_hadamard",
    "make_coin",
    "grover_weights",
    "derive_params",
    "classify_regime",
    "random_coin",
    "random_initial_state",
]


@dataclass(frozen=True)
class CoinU2:
    """A 2x2 unitary coin with all four entries nonzero.

    Parameters
    ----------
    a, b, c, d : complex
        Matrix entries, row-major: ``[[a, b], [c, d]]``.

    Raises
    ------
    ValidationError
        If the matrix is not unitary to ``UNITARY_TOL`` or an entry vanishes.
    """

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        m = self.matrix
        dev = np.max(np.abs(m.conj().T @ m - np.eye(2)))
        if not np.isfinite(dev) or dev > UNITARY_TOL:
            raise ValidationError(f"coin is not unitary (max |C^H C - I| = {dev:.3e})")
        if min(abs(self.a), abs(self.b), abs(self.c), abs(self.d)) < UNITARY_TOL:
            raise ValidationError("coin entries must satisfy abcd != 0")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def delta(self) -> complex:
        """Determinant ``ad - bc``."""
        return self.a * self.d - self.b * self.c

    @classmethod
    def from_matrix(cls, m) -> "CoinU2":
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise ValidationError(f"coin matrix must be 2x2, got shape {m.shape}")
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def scaled(self, factor: complex) -> "CoinU2":
        """Return ``factor * C``; ``factor`` must have unit modulus."""
        return CoinU2.from_matrix(factor * self.matrix)


def make_grover(d: int) -> np.ndarray:
    """Grover matrix ``G_d`` with diagonal ``2/d - 1`` and off-diagonal ``2/d``.

    Parameters
    ----------
    d : int
        Dimension, at least 1. ``G_1`` is the 1x1 identity.

    Returns
    -------
    numpy.ndarray
        Real symmetric orthogonal matrix of shape ``(d, d)`` and complex dtype.
    """
    if int(d) != d or d < 1:
        raise ValidationError(f"Grover dimension must be a positive integer, got {d}")
    d = int(d)
    if d == 1:
        return np.ones((1, 1), dtype=complex)
    return np.full((d, d), 2.0 / d, dtype=complex) - np.eye(d)


def make_phased_hadamard(varphi: float) -> CoinU2:
    """Return ``exp(i varphi) H`` with ``H = [[1, 1], [1, -1]] / sqrt(2)``."""
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    return CoinU2.from_matrix(np.exp(1j * varphi) * h)


def make_coin(spec: dict) -> CoinU2:
    """Build a coin from a config mapping.

    The mapping has a ``type`` of ``"hadamard"``, ``"grover"`` or ``"custom"``,
    an optional real ``phase`` applied as ``exp(i phase)``, and for custom coins
    ``entries``: four ``[re, im]`` pairs in row-major order. ``"grover"`` is the
    half-line coin ``[[s, a_k], [-a_k, s]]``, ``s = sqrt(kappa-1) b_k``, that
    reproduces the interior of a tree of degree ``spec["kappa"]`` (default 3)
    under the joined-walk shift.
    """
    if not isinstance(spec, dict):
        raise ValidationError("coin spec must be a JSON object")
    kind = spec.get("type")
    phase = float(spec.get("phase", 0.0))
    if kind == "hadamard":
        return make_phased_hadamard(phase)
    if kind == "grover":
        kappa = int(spec.get("kappa", 3))
        if kappa < 3:
            raise ValidationError("grover coin needs kappa >= 3 so that abcd != 0")
        ak, bk = grover_weights(kappa)
        s = np.sqrt(kappa - 1) * bk
        return CoinU2.from_matrix(np.exp(1j * phase) * np.array([[s, ak], [-ak, s]]))
    if kind == "custom":
        entries = spec.get("entries")
        try:
            vals = [complex(float(re), float(im)) for re, im in entries]
        except (TypeError, ValueError) as exc:
            raise ValidationError("custom coin entries must be four [re, im] pairs") from exc
        if len(vals) != 4:
            raise ValidationError("custom coin entries must be four [re, im] pairs")
        return CoinU2.from_matrix(np.exp(1j * phase) * np.array(vals).reshape(2, 2))
    raise ValidationError(f"unknown coin type {kind!r}")


def grover_weights(kappa: int) -> tuple[float, float]:
    """Return ``(a_kappa, b_kappa)``; for ``kappa = 1`` this is ``(1, 2)``."""
    if int(kappa) != kappa or kappa < 1:
        raise ValidationError(f"kappa must be a positive integer, got {kappa}")
    if kappa == 1:
        return 1.0, 2.0
    return 2.0 / kappa - 1.0, 2.0 / kappa


@dataclass(frozen=True)
class DerivedParams:
    """Scalars derived from a coin and a branch count ``kappa``.

    Attributes
    ----------
    phi : float
        ``arg(c)`` in ``(-pi, pi]``.
    abs_a, abs_c : float
        Moduli of the coin entries, ``abs_a**2 + abs_c**2 = 1``.
    K_plus, K_minus : float
        ``|1 + c|**2`` and ``|1 - c|**2``.
    K_times : complex
        ``(1 - c)(1 + conj(c))``; ``|K_times|**2 = K_plus K_minus``.
    Delta : complex
        ``ad - bc``.
    kappa : int
    a_kappa, b_kappa : float
        Grover weights of the origin coin.
    """

    phi: float
    abs_a: float
    abs_c: float
    K_plus: float
    K_minus: float
    K_times: complex
    Delta: complex
    kappa: int
    a_kappa: float
    b_kappa: float
    coin: CoinU2 = field(repr=False, compare=False, default=None)


def derive_params(coin: CoinU2, kappa: int) -> DerivedParams:
    """Populate :class:`DerivedParams` for ``coin`` on ``kappa`` half lines."""
    if not isinstance(coin, CoinU2):
        coin = CoinU2.from_matrix(coin)
    ak, bk = grover_weights(kappa)
    c = coin.c
    return DerivedParams(
        phi=float(np.angle(c)),
        abs_a=float(abs(coin.a)),
        abs_c=float(abs(c)),
        K_plus=float(abs(1 + c) ** 2),
        K_minus=float(abs(1 - c) ** 2),
        K_times=complex((1 - c) * (1 + np.conj(c))),
        Delta=complex(coin.delta),
        kappa=int(kappa),
        a_kappa=ak,
        b_kappa=bk,
        coin=coin,
    )


@dataclass(frozen=True)
class Regime:
    """Which localisation terms are switched on for a coin."""

    has_Lm: bool
    has_Lp: bool
    has_Lc: bool


def classify_regime(p: DerivedParams) -> Regime:
    """Evaluate the half-open indicators on ``cos(phi)``.

    ``L_m`` needs ``cos(phi)`` in ``[-1, |c|)``, ``L_p`` needs ``(-|c|, 1]`` and
    the oscillating term needs both, i.e. ``(-|c|, |c|)``.
    """
    cp = np.cos(p.phi)
    has_m = bool(cp < p.abs_c)
    has_p = bool(cp > -p.abs_c)
    return Regime(has_Lm=has_m, has_Lp=has_p, has_Lc=has_m and has_p)


@dataclass(frozen=True)
class InitialState:
    """Origin amplitudes ``psi_j`` on the labels ``eps_j``, unit norm."""

    psi: tuple

    def __post_init__(self):
        arr = np.asarray(self.psi, dtype=complex).ravel()
        if arr.size < 1:
            raise ValidationError("initial state needs at least one component")
        nrm = float(np.sum(np.abs(arr) ** 2))
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValidationError(f"initial state must have unit norm, got |psi|^2 = {nrm:.15g}")
        object.__setattr__(self, "psi", tuple(complex(v) for v in arr))

    @property
    def kappa(self) -> int:
        return len(self.psi)

    def array(self) -> np.ndarray:
        return np.array(self.psi, dtype=complex)

    @classmethod
    def from_phases(cls, degrees) -> "InitialState":
        """Equal-weight state ``exp(i pi deg / 180) / sqrt(kappa)``."""
        deg = np.asarray(degrees, dtype=float)
        return cls(np.exp(1j * np.pi * deg / 180.0) / np.sqrt(deg.size))

    @classmethod
    def symmetric(cls, kappa: int) -> "InitialState":
        return cls(np.full(kappa, 1.0 / np.sqrt(kappa)))


def as_psi(psi) -> np.ndarray:
    """Validate ``psi`` (array-like or :class:`InitialState`) and return an array."""
    if isinstance(psi, InitialState):
        return psi.array()
    return InitialState(psi).array()


def random_coin(rng: np.random.Generator, margin: float = 1e-3) -> CoinU2:
    """Draw ``exp(i alpha) [[cos t e^{i beta}, sin t e^{i gamma}], [-sin t e^{-i gamma}, cos t e^{-i beta}]]``.

    ``t`` is uniform on ``[margin, pi/2 - margin]`` so that ``abcd != 0``.
    """
    al, be, ga = rng.uniform(0.0, 2 * np.pi, 3)
    th = rng.uniform(margin, np.pi / 2 - margin)
    m = np.exp(1j * al) * np.array(
        [
            [np.cos(th) * np.exp(1j * be), np.sin(th) * np.exp(1j * ga)],
            [-np.sin(th) * np.exp(-1j * ga), np.cos(th) * np.exp(-1j * be)],
        ]
    )
    return CoinU2.from_matrix(m)


def random_initial_state(rng: np.random.Generator, kappa: int) -> InitialState:
    """Complex Gaussian vector normalised to one."""
    v = rng.normal(size=kappa) + 1j * rng.normal(size=kappa)
    return InitialState(v / np.linalg.norm(v))
