"""The four-channel half-line reduction of the walk on ``J_kappa``.

Tensoring the walk with a ``kappa``-level register turns any origin state
into the single symmetric vector ``|Own, 0, eps>``. The span of

* ``|Own, x, l>``: register label equal to the branch index,
* ``|Other, x, l>``: register label different, normalised by ``1/sqrt(kappa-1)``,

is invariant, so the walk lives on a half line with four amplitudes per
site. Branch probabilities come back through the projector ``Lambda_r``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coin_params import CoinU2, DerivedParams, as_psi, derive_params
from .errors import ValidationError
from .report import LimitReport
from .walker import branch_probabilities, initial_joined_state, step_joined

OWN, OTHER = 0, 1
UP, DOWN = 0, 1

__all__ = [
    "ReducedState",
    "ReducedWalk",
    "initial_reduced_state",
    "step_reduced",
    "branch_weights",
    "prob_xtr",
    "prob_all_branches",
    "reduction_oracle",
]


@dataclass
class ReducedState:
    """Amplitudes of the reduced walk.

    ``amps[m, x, l]`` is the amplitude of ``|m, x, l>`` with ``m`` in
    ``{OWN, OTHER}`` and ``l`` in ``{UP, DOWN}``. At ``x = 0`` only the
    ``UP`` slot is used; it stands for the origin label ``eps``.
    """

    amps: np.ndarray
    time: int = 0

    @property
    def origin(self) -> np.ndarray:
        return self.amps[:, 0, UP]

    @property
    def body(self) -> np.ndarray:
        return self.amps[:, 1:, :]

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


def initial_reduced_state(size: int = 1) -> ReducedState:
    """``|Own, 0, eps>`` with storage for sites ``0..size``."""
    amps = np.zeros((2, size + 1, 2), dtype=complex)
    amps[OWN, 0, UP] = 1.0
    return ReducedState(amps, 0)


def _origin_block(params: DerivedParams) -> tuple[float, float]:
    return params.a_kappa, np.sqrt(params.kappa - 1) * params.b_kappa


def _step_into(src: np.ndarray, dst: np.ndarray, m: np.ndarray, ak: float, s: float) -> None:
    """Write one step of ``src`` into ``dst`` (same shape, last site empty)."""
    dst.fill(0)
    o, ot = src[OWN, 0, UP], src[OTHER, 0, UP]
    up = src[:, 1:-1, UP]
    dn = src[:, 1:-1, DOWN]
    dst[:, :-2, UP] = m[0, 0] * up + m[0, 1] * dn
    dst[:, 2:, DOWN] = m[1, 0] * up + m[1, 1] * dn
    dst[OWN, 1, DOWN] += ak * o + s * ot
    dst[OTHER, 1, DOWN] += s * o - ak * ot


def step_reduced(state: ReducedState, coin: CoinU2, params: DerivedParams) -> ReducedState:
    """Apply the reduced one-step rules and return a new state.

    Origin: ``Own -> a_k Own(1, Down) + s Other(1, Down)`` and
    ``Other -> s Own(1, Down) - a_k Other(1, Down)`` with
    ``s = sqrt(kappa - 1) b_k``. Elsewhere, for both channels,
    ``Up -> a (x-1, Up) + c (x+1, Down)`` and
    ``Down -> b (x-1, Up) + d (x+1, Down)``; ``(0, Up)`` is the origin label.
    """
    m = coin.matrix if isinstance(coin, CoinU2) else np.asarray(coin, complex)
    ak, s = _origin_block(params)
    amps = state.amps
    if amps.shape[1] < state.time + 3:
        grow = state.time + 3 - amps.shape[1]
        amps = np.concatenate([amps, np.zeros((2, grow, 2), complex)], axis=1)
    out = np.empty_like(amps)
    _step_into(amps, out, m, ak, s)
    return ReducedState(out, state.time + 1)


class ReducedWalk:
    """In-place evolution of the reduced walk up to a fixed horizon.

    Two buffers of ``t_max + 2`` sites are swapped each step, so long runs
    (``t`` of order ``10**4``) cost one vectorised pass per step.

    Examples
    --------
    >>> from jkwalk.coin_params import make_phased_hadamard
    >>> w = ReducedWalk(make_phased_hadamard(0.0), kappa=3, t_max=4)
    >>> w.run(4).time
    4
    """

    def __init__(self, coin, kappa: int, t_max: int, params: DerivedParams | None = None):
        self.coin = coin if isinstance(coin, CoinU2) else CoinU2.from_matrix(coin)
        self.params = params if params is not None else derive_params(self.coin, kappa)
        self.t_max = int(t_max)
        self._a = np.zeros((2, self.t_max + 2, 2), dtype=complex)
        self._b = np.zeros_like(self._a)
        self._a[OWN, 0, UP] = 1.0
        self.time = 0
        self._m = self.coin.matrix
        self._ak, self._s = _origin_block(self.params)

    @property
    def amps(self) -> np.ndarray:
        """View of the current amplitudes (overwritten by the next step)."""
        return self._a

    @property
    def state(self) -> ReducedState:
        return ReducedState(self._a.copy(), self.time)

    def step(self) -> None:
        if self.time >= self.t_max:
            raise ValidationError(f"horizon t_max={self.t_max} reached")
        # sites beyond time + 1 are still zero in both buffers
        n = min(self.time + 3, self._a.shape[1])
        _step_into(self._a[:, :n], self._b[:, :n], self._m, self._ak, self._s)
        self._a, self._b = self._b, self._a
        self.time += 1

    def run(self, t: int, callback=None) -> ReducedState:
        """Step until ``time == t``; ``callback(self)`` runs after every step."""
        while self.time < t:
            self.step()
            if callback is not None:
                callback(self)
        return self.state


def branch_weights(psi, r: int) -> tuple[complex, complex]:
    """Coefficients ``(w_own, w_other)`` of ``Lambda_r`` on the two channels.

    ``w_own = psi_r`` and ``w_other = sum_{j != r} psi_j / sqrt(kappa - 1)``.
    The ``1/sqrt(kappa-1)`` follows from the normalisation of ``|Other>``:
    each register label ``k != j`` carries amplitude ``1/sqrt(kappa-1)`` of
    the Other channel, so this is the reading under which the projected
    probabilities equal the direct branch probabilities.
    """
    p = as_psi(psi)
    k = p.size
    if not 0 <= r < k:
        raise ValidationError(f"branch index {r} out of range for kappa={k}")
    if k == 1:
        return complex(p[0]), 0j
    return complex(p[r]), complex((p.sum() - p[r]) / np.sqrt(k - 1))


def _project(amps: np.ndarray, w_own: complex, w_other: complex) -> np.ndarray:
    return np.sum(np.abs(w_own * amps[OWN] + w_other * amps[OTHER]) ** 2, axis=-1)


def prob_xtr(state, psi, r: int) -> np.ndarray:
    """``P(X_{t,r} = x)`` for every stored site ``x``.

    Parameters
    ----------
    state : ReducedState, ReducedWalk or ndarray
        Reduced amplitudes evolved from ``|Own, 0, eps>``.
    psi : array_like
        Unit-norm origin state of the joined walk.
    r : int
        Branch index.
    """
    amps = state.amps if hasattr(state, "amps") else np.asarray(state)
    wo, wt = branch_weights(psi, r)
    return _project(amps, wo, wt)


def prob_all_branches(state, psi) -> np.ndarray:
    """Stack of :func:`prob_xtr` over all branches, shape ``(kappa, sites)``."""
    p = as_psi(psi)
    return np.stack([prob_xtr(state, p, r) for r in range(p.size)])


def reduction_oracle(coin: CoinU2, kappa: int, psi, t_max: int) -> LimitReport:
    """Check the reduced walk against the direct walk on ``J_kappa``.

    ``simulated`` holds direct-walk branch probabilities and ``predicted`` the
    projected reduced-walk ones, for all ``t <= t_max``, ``x <= t`` and ``r``.
    """
    p = as_psi(psi)
    if p.size != kappa:
        raise ValidationError(f"psi has {p.size} components, expected kappa={kappa}")
    walk = ReducedWalk(coin, kappa, t_max)
    direct = initial_joined_state(p, t_max + 1)
    ts, xs, rs, sim, pred = [], [], [], [], []
    xgrid = np.arange(t_max + 1)
    for t in range(t_max + 1):
        pd = branch_probabilities(direct)[:, : t_max + 1]
        pr = prob_all_branches(walk.amps, p)[:, : t_max + 1]
        for r in range(kappa):
            ts.append(np.full(t_max + 1, t))
            xs.append(xgrid)
            rs.append(np.full(t_max + 1, r))
            sim.append(pd[r])
            pred.append(pr[r])
        if t < t_max:
            direct = step_joined(direct, coin)
            walk.step()
    return LimitReport(np.concatenate(ts), np.concatenate(xs), np.concatenate(rs),
                       np.concatenate(sim), np.concatenate(pred),
                       label=f"reduction kappa={kappa}")
