import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from meshc.bruhat import bruhat_decompose
from meshc.circuit import ChipLayout, MZI, Circuit, evaluate, mzi_depth
from meshc.compiler import (
    Infeasible,
    compile,
    minimal_depth,
    reachable_check,
    reachable_set,
    shallowest_compile,
    sort_pass,
)
from meshc.core import haar_random_unitary
from meshc.networks import full_sorting_network, reck_network

from _support import random_angles, random_layout, with_permutation


def brick(m, terminal=True):
    return full_sorting_network(m).to_layout(terminal)


def test_identity_all_inactive():
    res = compile(np.eye(5), brick(5))
    assert not any(s.active for s in res.slots)
    assert res.used_depth == 0
    assert np.allclose(res.terminal_phases, 0)


@pytest.mark.parametrize("m", range(2, 9))
def test_haar_on_brick_wall(m):
    u = haar_random_unitary(m, seed=10 + m)
    res = compile(u, brick(m))
    assert len(res.slots) == brick(m).slot_count
    assert np.linalg.norm(evaluate(res.to_circuit()) - u) < 1e-8


@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_reversal_on_one_layer_is_infeasible(m):
    rev = np.fliplr(np.eye(m))
    with pytest.raises(Infeasible) as exc:
        compile(rev, brick(m).truncate(1))
    assert sorted(exc.value.residual) == list(range(m))
    assert exc.value.residual != tuple(range(m))
    i, j = exc.value.blocking_pair
    assert exc.value.residual[i] > exc.value.residual[j]


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="modes"):
        compile(np.eye(3), brick(4))


@given(st.integers(0, 10**6))
def test_round_trip_random_settings(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 7))
    lay = random_layout(rng, m, int(rng.integers(1, 2 * m + 1)), terminal=bool(rng.integers(2)))
    u = evaluate(lay.to_circuit(random_angles(rng, lay.slot_count)))
    if lay.terminal_phase_layer:
        u = np.exp(1j * rng.uniform(0, 6, m))[:, None] * u
    res = compile(u, lay)
    got = evaluate(res.to_circuit())
    if lay.terminal_phase_layer:
        assert np.linalg.norm(got - u) < 1e-8
    else:
        assert res.up_to_output_phases and res.terminal_phases is None
        d = np.exp(1j * np.array(res.output_phases))
        assert np.linalg.norm(d[:, None] * got - u) < 1e-8


def test_no_terminal_layer_reports_phases():
    u = np.diag(np.exp(1j * np.array([0.1, 0.2, 0.3])))
    res = compile(u, brick(3, terminal=False))
    assert res.up_to_output_phases
    assert np.allclose(res.output_phases, [0.1, 0.2, 0.3])
    assert np.allclose(evaluate(res.to_circuit()), np.eye(3))


def brute_min_depth(u, lay):
    p = bruhat_decompose(u).p
    for depth in range(lay.depth + 1):
        if reachable_check(lay.truncate(depth), p):
            return depth
    return None


@given(st.integers(0, 10**6))
def test_shallowest_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 6))
    lay = random_layout(rng, m, int(rng.integers(1, 9)), max_slots=12)
    used = int(rng.integers(0, lay.depth + 1))
    head = lay.truncate(used)
    u = evaluate(head.to_circuit(random_angles(rng, head.slot_count)))
    res, depth = shallowest_compile(u, lay)
    assert depth <= used
    assert depth == brute_min_depth(u, lay)
    assert len(res.slots) == lay.slot_count
    assert np.linalg.norm(evaluate(res.to_circuit()) - u) < 1e-8
    assert all(not s.active for s in res.slots if s.layer >= depth)


@pytest.mark.parametrize("first_layer, expected", [([(3, 4)], 1), ([(0, 1), (2, 3), (4, 5)], 2)])
def test_single_mzi_depth(first_layer, expected):
    other = [(1, 2), (3, 4)] if expected == 2 else [(0, 1), (2, 3), (4, 5)]
    lay = ChipLayout(6, [first_layer, other] * 3)
    u = evaluate(Circuit(6, [MZI((3, 4), 1.0, 0.4)]))
    assert shallowest_compile(u, lay)[1] == expected


def test_haar_needs_full_brick_wall():
    depths = [minimal_depth(haar_random_unitary(6, s), brick(6)) for s in range(10)]
    assert depths == [6] * 10


def test_shallowest_infeasible():
    with pytest.raises(Infeasible):
        shallowest_compile(np.fliplr(np.eye(4)), brick(4).truncate(2))


def test_reachable_examples():
    assert reachable_set(brick(4)) == set(itertools.permutations(range(4)))
    assert reachable_set(ChipLayout(3, [[(0, 1)]])) == {(0, 1, 2), (1, 0, 2)}
    assert reachable_check(ChipLayout(3, []), (0, 1, 2))


@pytest.mark.parametrize("seed", range(20))
def test_infeasible_iff_unreachable(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(3, 6))
    lay = random_layout(rng, m, 6, max_slots=12)
    reach = reachable_set(lay)
    for sigma in itertools.permutations(range(m)):
        u = with_permutation(sigma, seed)
        try:
            compile(u, lay)
            ok = True
        except Infeasible:
            ok = False
        assert ok == (sigma in reach)


def test_order_within_layer_irrelevant():
    # a layer's pairs are disjoint, so any visiting order gives the same swaps
    rng = np.random.default_rng(3)
    lay = random_layout(rng, 7, 6, density=0.9)
    p = bruhat_decompose(haar_random_unitary(7, 1)).p
    swaps, lab = sort_pass(p, lay)
    flipped = list(p)
    for layer in reversed(lay.layers):
        for i, j in reversed(layer):
            if flipped[i] > flipped[j]:
                flipped[i], flipped[j] = flipped[j], flipped[i]
    assert flipped == lab


def test_reck_layout_compiles():
    u = haar_random_unitary(6, seed=2)
    res = compile(u, reck_network(6).to_layout())
    c = res.to_circuit()
    assert mzi_depth(c) <= 9
    assert np.linalg.norm(evaluate(c) - u) < 1e-8


def test_partial_labels_leave_tail_free():
    # only the first column is targeted; the backward walk bubbles label 0 up
    lay = ChipLayout(4, [[(0, 1)], [(1, 2)], [(2, 3)]])
    u = haar_random_unitary(4, seed=5)
    with pytest.raises(Infeasible):
        compile(u, lay)
    res = compile(u, lay, n_labels=1)
    assert np.linalg.norm(evaluate(res.to_circuit())[:, 0] - u[:, 0]) < 1e-8
