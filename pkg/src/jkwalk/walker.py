"""Direct simulation on joined half lines and on (semi-)homogeneous trees.

Joined half lines ``J_kappa``: ``kappa`` copies of the positive integers glued
at a common origin. Away from the origin each vertex carries two labels,
``Up`` (moving towards the origin) and ``Down`` (moving away); the origin
carries one label ``eps_r`` per branch. One step is coin then shift:

* origin: the Grover coin mixes the ``eps`` labels, then ``eps_r`` moves to
  ``(r, 1, Down)``;
* ``x >= 1``: the 2x2 coin acts on ``(Up, Down)``, the ``Up`` output moves to
  ``x - 1`` (to ``eps_r`` when ``x = 1``) and the ``Down`` output to ``x + 1``.

Trees are stored sparsely, one amplitude per (vertex, port) pair, with
vertices named by their path from the root (see :class:`TreeWalkState`).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .coin_params import CoinU2, as_psi, grover_weights, make_grover
from .errors import CapacityError, ValidationError
from .report import LimitReport

UP, DOWN = 0, 1

__all__ = [
    "WalkState",
    "TreeWalkState",
    "initial_joined_state",
    "step_joined",
    "run_joined",
    "joined_probabilities",
    "branch_probabilities",
    "initial_tree_state",
    "step_tree",
    "tree_shell_probabilities",
    "tree_coin",
    "port_coin",
    "tree_reduce_compare",
]


def _coin_matrix(coin) -> np.ndarray:
    if isinstance(coin, CoinU2):
        return coin.matrix
    m = np.asarray(coin, dtype=complex)
    if m.shape != (2, 2):
        raise ValidationError(f"coin must be 2x2, got shape {m.shape}")
    return m


@dataclass
class WalkState:
    """State of the walk on ``J_kappa``.

    Attributes
    ----------
    origin : ndarray, shape (kappa,)
        Amplitudes on ``|0, eps_r>``.
    body : ndarray, shape (kappa, size, 2)
        ``body[r, x - 1, l]`` is the amplitude on ``|h_r(x), l>`` with
        ``l = 0`` for Up and ``1`` for Down.
    time : int
    """

    origin: np.ndarray
    body: np.ndarray
    time: int = 0

    @property
    def kappa(self) -> int:
        return self.origin.shape[0]

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.origin) ** 2) + np.sum(np.abs(self.body) ** 2))


def initial_joined_state(psi, size: int = 0) -> WalkState:
    """``sum_j psi_j |0, eps_j>`` with room for ``size`` sites per branch."""
    p = as_psi(psi)
    return WalkState(p.copy(), np.zeros((p.size, max(size, 1), 2), dtype=complex), 0)


def step_joined(state: WalkState, coin, kappa: int | None = None,
                origin_coin: np.ndarray | None = None) -> WalkState:
    """Apply one step ``S_J F_J`` and return the new state.

    Parameters
    ----------
    state : WalkState
    coin : CoinU2 or array_like, shape (2, 2)
        Coin on every non-origin vertex.
    kappa : int, optional
        Number of branches; checked against the state if given.
    origin_coin : array_like, optional
        Coin on the origin labels; defaults to the Grover matrix.
    """
    k = state.kappa
    if kappa is not None and kappa != k:
        raise ValidationError(f"state has {k} branches, expected {kappa}")
    if state.origin.ndim != 1 or state.body.ndim != 3 or state.body.shape[0] != k \
            or state.body.shape[2] != 2:
        raise ValidationError("malformed joined-walk state")
    m = _coin_matrix(coin)
    g = make_grover(k) if origin_coin is None else np.asarray(origin_coin, dtype=complex)
    body = state.body
    size = body.shape[1]
    need = state.time + 2
    if size < need:
        body = np.concatenate([body, np.zeros((k, need - size, 2), complex)], axis=1)
        size = need
    up = m[0, 0] * body[:, :, UP] + m[0, 1] * body[:, :, DOWN]
    dn = m[1, 0] * body[:, :, UP] + m[1, 1] * body[:, :, DOWN]
    new = np.zeros_like(body)
    new[:, :-1, UP] = up[:, 1:]
    new[:, 1:, DOWN] = dn[:, :-1]
    new[:, 0, DOWN] = g @ state.origin
    return WalkState(up[:, 0].copy(), new, state.time + 1)


def run_joined(coin, psi, t: int, origin_coin=None, callback=None) -> WalkState:
    """Evolve ``psi`` for ``t`` steps; ``callback(state)`` sees every state."""
    p = as_psi(psi)
    st = initial_joined_state(p, t + 1)
    if callback is not None:
        callback(st)
    for _ in range(t):
        st = step_joined(st, coin, origin_coin=origin_coin)
        if callback is not None:
            callback(st)
    return st


def branch_probabilities(state: WalkState) -> np.ndarray:
    """Array ``P[r, x]`` with ``P[r, 0] = |alpha(0, eps_r)|^2`` and ``P[r, x] = ||Psi(h_r(x))||^2``."""
    out = np.empty((state.kappa, state.body.shape[1] + 1))
    out[:, 0] = np.abs(state.origin) ** 2
    out[:, 1:] = np.sum(np.abs(state.body) ** 2, axis=-1)
    return out


def joined_probabilities(state: WalkState) -> tuple[dict, float]:
    """Return ``({(r, x): P(W = h_r(x))}, P(W = 0))`` for ``x >= 1``."""
    p = branch_probabilities(state)
    table = {(r, x): float(p[r, x]) for r in range(state.kappa) for x in range(1, p.shape[1])}
    return table, float(p[:, 0].sum())


@dataclass
class TreeWalkState:
    """Sparse state of a Grover walk on a tree.

    Vertices are tuples: ``()`` is the root, ``(r,)`` its neighbour through
    port ``r`` and ``w + (p,)`` the child of ``w`` through port ``p``. At a
    non-root vertex port 0 leads to the parent and ports ``1..kappa-1`` to
    the children; the root has ports ``0..kappa_prime-1``. These are reduced
    words: no step ever produces a backtracking pair. Every amplitude key is
    ``(vertex, port)``. The shift keeps the port label, so right after a
    step it names the arc just traversed, pointing back; the coin then
    redistributes over the ports that the next shift follows.

    Attributes
    ----------
    amps : dict
    kappa : int
        Degree of non-root vertices.
    kappa_prime : int
        Degree of the root.
    omega : complex
        Unit-modulus phase multiplying the root coin.
    time : int
    max_depth : int
        Largest word length allowed; exceeding it raises ``CapacityError``.
    """

    amps: dict
    kappa: int
    kappa_prime: int
    omega: complex = 1.0
    time: int = 0
    max_depth: int = 14

    def norm_sq(self) -> float:
        return float(sum(abs(v) ** 2 for v in self.amps.values()))


def initial_tree_state(psi, kappa: int, kappa_prime: int | None = None,
                       omega: complex = 1.0, max_depth: int = 14) -> TreeWalkState:
    """``sum_j psi_j |root, sigma_j>`` on ``T_{kappa', kappa}``."""
    p = as_psi(psi)
    kp = p.size if kappa_prime is None else kappa_prime
    if p.size != kp:
        raise ValidationError(f"psi has {p.size} components but the root has degree {kp}")
    if kappa < 2:
        raise ValidationError("tree degree must be at least 2")
    if abs(abs(omega) - 1.0) > 1e-12:
        raise ValidationError("omega must have unit modulus")
    amps = {((), j): complex(v) for j, v in enumerate(p) if v != 0}
    return TreeWalkState(amps, kappa, kp, complex(omega), 0, max_depth)


def step_tree(state: TreeWalkState) -> TreeWalkState:
    """Apply one Grover coin (``omega G_kappa'`` at the root) and the shift."""
    sums = defaultdict(complex)
    for (w, _), v in state.amps.items():
        sums[w] += v
    out = defaultdict(complex)
    k, kp = state.kappa, state.kappa_prime
    for w, s in sums.items():
        if w:
            deg, phase = k, 1.0
        else:
            deg, phase = kp, state.omega
        avg = 2.0 * s / deg
        for port in range(deg):
            v = phase * (avg - state.amps.get((w, port), 0.0))
            if v == 0:
                continue
            if not w:
                dest = ((port,), 0)
            elif port == 0:
                dest = (w[:-1], w[-1])
            else:
                if len(w) + 1 > state.max_depth:
                    raise CapacityError(
                        f"tree walk reached depth {len(w) + 1} > max_depth={state.max_depth}")
                dest = (w + (port,), 0)
            out[dest] += v
    return TreeWalkState(dict(out), k, kp, state.omega, state.time + 1, state.max_depth)


def tree_shell_probabilities(state: TreeWalkState, size: int) -> np.ndarray:
    """``P[r, x]``: probability on vertices at distance ``x`` inside subtree ``r``.

    ``P[r, 0]`` is ``|<root, sigma_r|Psi>|^2`` so that it lines up with the
    origin label ``eps_r`` of the joined walk.
    """
    out = np.zeros((state.kappa_prime, size + 1))
    for (w, port), v in state.amps.items():
        if w:
            if len(w) <= size:
                out[w[0], len(w)] += abs(v) ** 2
        else:
            out[port, 0] += abs(v) ** 2
    return out


def port_coin(kappa: int) -> np.ndarray:
    """``[[a_k, s], [s, -a_k]]`` with ``s = sqrt(kappa-1) b_k``.

    This is the Grover coin restricted to (parent port, normalised sum of
    child ports), i.e. with labels naming the arc a state will leave along.
    """
    ak, bk = grover_weights(kappa)
    s = np.sqrt(kappa - 1) * bk
    return np.array([[ak, s], [s, -ak]], dtype=complex)


def tree_coin(kappa: int) -> np.ndarray:
    """Joined-walk coin equivalent to the interior of a ``kappa``-regular tree.

    The joined walk labels a state by the direction it just moved (Up
    arrives from below), whereas after the tree shift an arriving state sits
    on the port pointing back where it came from. Translating input labels
    swaps Up and Down, so the equivalent coin is ``port_coin(kappa) @ X``,
    ``[[s, a_k], [-a_k, s]]``.
    """
    return port_coin(kappa) @ np.array([[0, 1], [1, 0]], dtype=complex)


def tree_reduce_compare(kappa: int, kappa_prime: int, omega: complex, psi,
                        t_max: int, max_depth: int = 14, literal: bool = False) -> LimitReport:
    """Compare a tree walk with the joined walk on ``J_kappa'`` it reduces to.

    The tree has root degree ``kappa_prime`` and interior degree ``kappa``.
    The joined walk uses the coin of :func:`tree_coin` off the origin and
    ``omega G_kappa'`` at the origin; ``literal=True`` swaps in
    :func:`port_coin` instead, which does not reproduce the tree. Each row
    holds a shell probability of the tree (``simulated``) and the matching
    joined-walk probability (``predicted``).
    """
    p = as_psi(psi)
    tree = initial_tree_state(p, kappa, kappa_prime, omega, max(max_depth, 1))
    if t_max > tree.max_depth:
        raise CapacityError(f"t_max={t_max} exceeds max_depth={tree.max_depth}")
    joined = initial_joined_state(p, t_max + 1)
    cmat = port_coin(kappa) if literal else tree_coin(kappa)
    gmat = omega * make_grover(kappa_prime)
    rows = []
    for t in range(t_max + 1):
        pt = tree_shell_probabilities(tree, t_max)
        pj = branch_probabilities(joined)[:, : t_max + 1]
        for r in range(kappa_prime):
            for x in range(t_max + 1):
                rows.append((t, x, r, pt[r, x], pj[r, x]))
        if t < t_max:
            tree = step_tree(tree)
            joined = step_joined(joined, cmat, origin_coin=gmat)
    arr = np.array(rows)
    return LimitReport(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4],
                       label=f"tree kappa={kappa} kappa'={kappa_prime}")
