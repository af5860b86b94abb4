import itertools

import numpy as np
import pytest

from meshc.circuit import mzi_count
from meshc.networks import (
    ComparatorNetwork,
    all_permutations,
    block_layout,
    diamond_block_depth,
    diamond_network,
    full_sorting_network,
    partial_count,
    partial_sorting_network,
    reck_network,
    sorts_blocks,
    sorts_partially,
    universal_block_count,
)


@pytest.mark.parametrize("m", range(1, 9))
def test_full_network_sorts(m):
    net = full_sorting_network(m)
    assert net.is_lnn and net.size == m * (m - 1) // 2
    assert net.depth == (m if m > 2 else m - 1)
    assert sorts_partially(net, m)
    assert sorts_partially(net.reversed(), m)


@pytest.mark.parametrize("m", range(2, 9))
def test_reck_network_sorts(m):
    net = reck_network(m)
    assert net.size == m * (m - 1) // 2
    assert net.depth == max(1, 2 * m - 3)
    assert sorts_partially(net, m)
    assert sorts_partially(net.reversed(), m)


@pytest.mark.parametrize("m, n", [(m, n) for m in range(1, 9) for n in range(1, m + 1)])
def test_partial_network(m, n):
    net = partial_sorting_network(m, n)
    assert net.is_lnn
    assert net.size == partial_count(m, n)
    assert net.depth <= m
    if m >= 3 and n >= 2:
        assert net.depth == m
    assert sorts_partially(net, n)


def test_partial_network_is_minimal_per_label():
    # dropping any comparator breaks partial sorting
    net = partial_sorting_network(6, 3)
    for skip in range(net.size):
        comps = net.comparators[:skip] + net.comparators[skip + 1 :]
        assert not sorts_partially(ComparatorNetwork(6, comps), 3)


def test_partial_network_frozen():
    net = partial_sorting_network(4, 2)
    assert net.comparators == ((2, 3), (1, 2), (0, 1), (2, 3), (1, 2))
    assert net.layers == (((2, 3),), ((1, 2),), ((0, 1), (2, 3)), ((1, 2),))


def test_partial_network_large_sampled():
    assert sorts_partially(partial_sorting_network(14, 5), 5, samples=4000)
    with pytest.raises(ValueError, match="exhaustive"):
        sorts_partially(partial_sorting_network(12, 2), 2)


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_diamond(p):
    net = diamond_network(p)
    assert net.size == p * p
    assert net.depth == 2 * p - 1
    if p <= 3:
        assert sorts_blocks(net, p)


def test_apply_vectorized():
    perms = all_permutations(4)
    out = full_sorting_network(4).apply(perms)
    assert np.all(out == np.arange(4))
    assert perms.dtype == np.int8


def test_comparator_validation():
    with pytest.raises(ValueError):
        ComparatorNetwork(3, [(1, 0)])


@pytest.mark.parametrize(
    "m, p, count, depth, uni_count, uni_depth",
    [(8, 2, 28, 14, 40, 18), (12, 3, 66, 23, 102, 27), (12, 2, 66, 20, 96, 26)],
)
def test_block_layouts(m, p, count, depth, uni_count, uni_depth):
    dia = block_layout(m, p, "diamond")
    uni = block_layout(m, p, "universal")
    assert dia.mzi_count == count == m * (m - 1) // 2 == mzi_count(dia.to_circuit())
    assert dia.depth == depth == diamond_block_depth(m, p)
    assert uni.mzi_count == uni_count == universal_block_count(m, p)
    assert uni.depth == uni_depth == 2 * m + p
    for lay in (dia, uni):
        assert sorts_partially(lay.flat_network(), m, samples=3000, seed=m + p)
        assert lay.mzi_depth <= lay.depth


def test_block_layout_physical_is_universal():
    from meshc.compiler import compile
    from meshc.core import haar_random_unitary

    lay = block_layout(8, 2, "diamond").physical_layout()
    for seed in range(5):
        compile(haar_random_unitary(8, seed), lay)


def test_block_layout_rejects():
    with pytest.raises(ValueError, match="divide"):
        block_layout(7, 2)
    with pytest.raises(ValueError, match="variant"):
        block_layout(8, 2, "hex")


def test_small_block_sorts_exhaustively():
    for variant in ("diamond", "universal"):
        assert sorts_partially(block_layout(6, 2, variant).flat_network(), 6)


def test_all_permutations_count():
    assert len(all_permutations(5)) == 120
    assert len(set(map(tuple, all_permutations(4)))) == len(list(itertools.permutations(range(4))))
