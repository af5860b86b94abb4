"""Nearest-neighbour comparator networks and the chip layouts built from them.

A comparator ``(i, j)`` is a conditional swap that leaves the smaller label on
wire ``i``. Read generatively, the same pairs are MZI slots.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .circuit import ChipBlock, ChipLayout, Circuit, layered, mzi_depth
from .core import IDENTITY_MZI


@dataclass(frozen=True)
class ComparatorNetwork:
    wires: int
    comparators: tuple[tuple[int, int], ...]

    def __post_init__(self):
        comps = tuple((int(i), int(j)) for i, j in self.comparators)
        object.__setattr__(self, "comparators", comps)
        for i, j in comps:
            if not 0 <= i < j < self.wires:
                raise ValueError(f"bad comparator {(i, j)} on {self.wires} wires")

    @property
    def layers(self):
        return layered(self.wires, self.comparators)

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def size(self) -> int:
        return len(self.comparators)

    @property
    def is_lnn(self) -> bool:
        return all(j == i + 1 for i, j in self.comparators)

    def reversed(self) -> "ComparatorNetwork":
        return ComparatorNetwork(self.wires, self.comparators[::-1])

    def to_layout(self, terminal_phase_layer: bool = True) -> ChipLayout:
        return ChipLayout(self.wires, self.layers, terminal_phase_layer)

    def apply(self, labels) -> np.ndarray:
        """Run the network on a batch of label rows (shape ``(..., wires)``)."""
        x = np.array(labels, copy=True)
        for i, j in self.comparators:
            a, b = x[..., i].copy(), x[..., j]
            x[..., i] = np.minimum(a, b)
            x[..., j] = np.maximum(a, b)
        return x


def _diagonal(c: int, lo: int, hi: int):
    # pairs (j, j+1) on the anti-diagonal t + j = c, in time order
    return [(c - j, j) for j in range(hi, lo - 1, -1)]


def full_sorting_network(m: int) -> ComparatorNetwork:
    """Odd-even transposition (brick-wall) network: ``m`` alternating layers."""
    if m < 1:
        raise ValueError("m must be >= 1")
    comps = [(i, i + 1) for t in range(m) for i in range(t % 2, m - 1, 2)]
    return ComparatorNetwork(m, comps)


def reck_network(m: int) -> ComparatorNetwork:
    """Bubble the smallest remaining label to the top, one label at a time."""
    if m < 1:
        raise ValueError("m must be >= 1")
    comps = [(j, j + 1) for d in range(m - 1) for j in range(m - 2, d - 1, -1)]
    return ComparatorNetwork(m, comps)


def partial_sorting_network(m: int, n: int) -> ComparatorNetwork:
    """Network that puts labels ``0..n-1`` on wires ``0..n-1``, in order.

    Built from the single-label diagonal by alternately appending a
    subdiagonal (after) and prepending a superdiagonal (before). The added
    diagonals interleave on the brick-wall grid, so depth stays ``m``.
    """
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= m, got m={m}, n={n}")
    slots = _diagonal(m - 2, 0, m - 2)
    for label in range(2, n + 1):
        r = label // 2
        if label % 2 == 0:
            slots += _diagonal(m - 2 + 2 * r, 2 * r - 1, m - 2)
        else:
            slots += _diagonal(m - 2 - 2 * r, 0, m - 2 - 2 * r)
    slots.sort()
    return ComparatorNetwork(m, [(j, j + 1) for _, j in slots])


def diamond_network(p: int) -> ComparatorNetwork:
    """Two-block sorter on ``2p`` wires: ``p`` diagonals of ``p`` comparators.

    Diagonal ``a`` lifts one label from the lower block into the upper one.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    slots = sorted((a + b, p - 1 + a - b) for a in range(p) for b in range(p))
    return ComparatorNetwork(2 * p, [(j, j + 1) for _, j in slots])


def all_permutations(m: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(m))), dtype=np.int8)


def sorts_partially(net: ComparatorNetwork, n: int, samples: int | None = None, seed: int = 0) -> bool:
    """True iff ``net`` leaves labels ``0..n-1`` sorted on the top ``n`` wires.

    Exhaustive over all permutations unless ``samples`` is given.
    """
    m = net.wires
    if samples is None:
        if m > 10:
            raise ValueError("exhaustive check limited to 10 wires; pass samples=")
        perms = all_permutations(m)
    else:
        rng = np.random.default_rng(seed)
        perms = np.argsort(rng.random((samples, m)), axis=1)
    out = net.apply(perms)
    return bool(np.all(out[:, :n] == np.arange(n)))


def sorts_blocks(net: ComparatorNetwork, p: int) -> bool:
    """True iff the ``p`` smallest labels always end on the top ``p`` wires."""
    out = net.apply(all_permutations(net.wires))
    return bool(np.all(out[:, :p] < p))


@dataclass(frozen=True)
class PlacedChip:
    """A chip in a block design. ``depth`` is its nominal column count.

    A universal ``q``-mode chip counts ``q`` columns even for ``q = 2``, where
    its single MZI only needs one.
    """

    stage: int
    modes: tuple[int, ...]
    network: ComparatorNetwork
    depth: int


@dataclass(frozen=True)
class BlockLayout:
    """Chip-of-chips design: two-block sorters, then per-block universal chips.

    ``chips`` is in sorting order. The physical interferometer realizing
    arbitrary unitaries through :func:`meshc.compiler.compile` is the reverse
    (see :meth:`physical_layout`).
    """

    modes: int
    block: int
    variant: str
    chips: tuple[PlacedChip, ...]

    @property
    def mzi_count(self) -> int:
        return sum(c.network.size for c in self.chips)

    def to_circuit(self) -> Circuit:
        blocks = []
        for chip in self.chips:
            inner = chip.network.to_layout().to_circuit([IDENTITY_MZI] * chip.network.size)
            blocks.append(ChipBlock(chip.modes, inner))
        return Circuit(self.modes, blocks)

    @property
    def depth(self) -> int:
        """Chip-level depth: chips are atomic and scheduled as early as possible."""
        ready = [0] * self.modes
        for chip in self.chips:
            t = max(ready[i] for i in chip.modes) + chip.depth
            for i in chip.modes:
                ready[i] = t
        return max(ready, default=0)

    @property
    def mzi_depth(self) -> int:
        return mzi_depth(self.to_circuit())

    def flat_network(self) -> ComparatorNetwork:
        comps = []
        for chip in self.chips:
            base = chip.modes[0]
            comps.extend((base + i, base + j) for i, j in chip.network.comparators)
        return ComparatorNetwork(self.modes, comps)

    def physical_layout(self, terminal_phase_layer: bool = True) -> ChipLayout:
        return self.flat_network().reversed().to_layout(terminal_phase_layer)


def block_layout(m: int, p: int, variant: Literal["universal", "diamond"] = "diamond") -> BlockLayout:
    """Sort ``m`` labels by blocks of ``p``.

    ``k = m/p`` blocks are ordered by a ``k``-wire brick-wall of two-block
    sorters on ``2p`` modes, then each block is finished by a ``p``-mode
    universal chip.
    """
    if p < 1 or m % p:
        raise ValueError(f"block size {p} does not divide {m} modes")
    if variant == "universal":
        sorter, sorter_depth = full_sorting_network(2 * p), 2 * p
    elif variant == "diamond":
        sorter, sorter_depth = diamond_network(p), 2 * p - 1
    else:
        raise ValueError(f"unknown variant {variant!r}")
    k = m // p
    chips = []
    stage = 0
    if k > 1:
        for stage, layer in enumerate(full_sorting_network(k).layers):
            for b, _ in layer:
                chips.append(PlacedChip(stage, tuple(range(b * p, b * p + 2 * p)), sorter, sorter_depth))
        stage += 1
    finisher = full_sorting_network(p)
    for b in range(k):
        chips.append(PlacedChip(stage, tuple(range(b * p, b * p + p)), finisher, p))
    return BlockLayout(m, p, variant, tuple(chips))


def partial_count(m: int, n: int) -> int:
    return m * n - n * (n + 1) // 2


def universal_block_count(m: int, p: int) -> int:
    k = m // p
    return k * (k - 1) // 2 * (2 * p) * (2 * p - 1) // 2 + k * p * (p - 1) // 2


def diamond_block_depth(m: int, p: int) -> int:
    # (2 - 1/p) m + p, exact in integers since p | m
    return 2 * m - m // p + p

