import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jkwalk.coin_params import InitialState, make_phased_hadamard
from jkwalk.errors import CapacityError, ValidationError
from jkwalk.walker import (branch_probabilities, initial_joined_state, initial_tree_state,
                           joined_probabilities, port_coin, run_joined, step_joined, step_tree,
                           tree_coin, tree_reduce_compare)

from conftest import coins, states

H = make_phased_hadamard(0.0)


def test_symmetric_first_step():
    st0 = initial_joined_state(InitialState.symmetric(3).array(), 4)
    st1 = step_joined(st0, H)
    assert np.allclose(st1.body[:, 0, 1], 1 / np.sqrt(3))
    assert np.allclose(st1.origin, 0)


def test_single_label_first_step():
    st1 = step_joined(initial_joined_state([1, 0, 0], 4), H)
    assert np.allclose(st1.body[:, 0, 1], [-1 / 3, 2 / 3, 2 / 3])


def test_probabilities_small_times():
    _, p0 = joined_probabilities(initial_joined_state([1, 0, 0]))
    assert p0 == 1.0
    table, _ = joined_probabilities(run_joined(H, InitialState.symmetric(3), 1))
    for r in range(3):
        assert table[(r, 1)] == pytest.approx(1 / 3)


def test_half_line_two_steps():
    table, p0 = joined_probabilities(run_joined(H, [1.0], 2))
    assert p0 == pytest.approx(0.5)
    assert table[(0, 2)] == pytest.approx(0.5)


def test_kappa_mismatch():
    with pytest.raises(ValidationError):
        step_joined(initial_joined_state([1, 0, 0]), H, kappa=2)


@settings(max_examples=25)
@given(coins(), st.integers(1, 5).flatmap(lambda k: states(k)))
def test_norm_parity_speed(coin, psi):
    st_ = initial_joined_state(psi, 51)
    for t in range(1, 51):
        prev = st_.norm_sq()
        st_ = step_joined(st_, coin)
        assert abs(st_.norm_sq() - prev) < 1e-12
        p = branch_probabilities(st_)
        x = np.arange(p.shape[1])
        assert np.all(p[:, (x + t) % 2 == 1] == 0)
        assert np.all(p[:, x > t] == 0)


def test_tree_first_step():
    tr = step_tree(initial_tree_state([1, 0, 0], 3))
    assert tr.amps[((0,), 0)] == pytest.approx(-1 / 3)
    assert tr.amps[((1,), 0)] == pytest.approx(2 / 3)
    assert tr.amps[((2,), 0)] == pytest.approx(2 / 3)


def test_tree_omega_is_global_phase_after_one_step():
    w = np.exp(0.7j)
    a = step_tree(initial_tree_state([1, 0, 0], 3))
    b = step_tree(initial_tree_state([1, 0, 0], 3, omega=w))
    for k, v in a.amps.items():
        assert b.amps[k] == pytest.approx(w * v)


def test_tree_norm_and_capacity():
    tr = initial_tree_state(InitialState.symmetric(3), 3, max_depth=10)
    for _ in range(10):
        tr = step_tree(tr)
    assert tr.norm_sq() == pytest.approx(1, abs=1e-12)
    with pytest.raises(CapacityError):
        step_tree(tr)


def test_tree_coin_is_swap_of_port_coin():
    for k in (2, 3, 4):
        assert np.allclose(tree_coin(k), port_coin(k)[:, ::-1])


def test_tree_reduction_t0_exact():
    rep = tree_reduce_compare(3, 3, 1.0, InitialState.symmetric(3), 0)
    assert rep.max_abs_err == 0.0


@pytest.mark.parametrize("kappa,kappa_prime", [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (4, 3)])
@pytest.mark.parametrize("omega", [1.0, np.exp(1j * np.pi / 3)])
def test_tree_reduction(kappa, kappa_prime, omega):
    psi = np.exp(1j * np.arange(kappa_prime)) / np.sqrt(kappa_prime)
    t = 10 if kappa < 4 else 8
    rep = tree_reduce_compare(kappa, kappa_prime, omega, psi, t)
    assert rep.max_abs_err < 1e-10


def test_tree_reduction_literal_coin_differs():
    rep = tree_reduce_compare(3, 3, 1.0, InitialState.symmetric(3), 6, literal=True)
    assert rep.max_abs_err > 1e-3
