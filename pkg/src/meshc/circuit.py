"""Optical circuits, static chip layouts, evaluation and depth metrics.

Elements are applied in list order; a later element multiplies the running
matrix on the left.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator, Union

import numpy as np

from .core import IDENTITY_MZI, MZIParams, mzi_matrix, split_mzi, wrap_angle


@dataclass(frozen=True)
class MZI:
    """Two-mode MZI; ``modes[0]`` is the top arm. Long-range pairs are allowed.

    ``adjoint`` marks the reversed element produced by inversion, whose matrix
    is the conjugate transpose of the forward MZI.
    """

    modes: tuple[int, int]
    theta: float
    phi: float
    active: bool = True
    adjoint: bool = False

    @property
    def params(self) -> MZIParams:
        return MZIParams(self.theta, self.phi)

    def matrix(self) -> np.ndarray:
        t = mzi_matrix(self.params)
        return t.conj().T if self.adjoint else t


@dataclass(frozen=True)
class PhaseShifter:
    mode: int
    phi: float


@dataclass(frozen=True)
class Coupling:
    """Free mode permutation: the amplitude on mode ``i`` moves to ``perm[i]``."""

    perm: tuple[int, ...]

    def matrix(self) -> np.ndarray:
        m = len(self.perm)
        p = np.zeros((m, m), dtype=complex)
        p[list(self.perm), range(m)] = 1
        return p


@dataclass(frozen=True)
class ChipBlock:
    """A flat sub-circuit placed on ``modes`` (local mode ``t`` -> ``modes[t]``)."""

    modes: tuple[int, ...]
    circuit: "Circuit"


Element = Union[MZI, PhaseShifter, Coupling, ChipBlock]


@dataclass(frozen=True)
class Circuit:
    modes: int
    elements: tuple[Element, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        for el in self.elements:
            _validate_element(el, self.modes)

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.modes != self.modes:
            raise ValueError("cannot concatenate circuits on different mode counts")
        return Circuit(self.modes, self.elements + other.elements)


def _validate_element(el: Element, m: int) -> None:
    def in_range(i):
        if not (isinstance(i, (int, np.integer)) and 0 <= i < m):
            raise IndexError(f"mode {i!r} out of range for {m} modes")

    if isinstance(el, MZI):
        i, j = el.modes
        in_range(i)
        in_range(j)
        if i == j:
            raise ValueError(f"MZI modes must be distinct, got {el.modes}")
    elif isinstance(el, PhaseShifter):
        in_range(el.mode)
    elif isinstance(el, Coupling):
        if sorted(el.perm) != list(range(m)):
            raise ValueError(f"coupling {el.perm} is not a permutation of {m} modes")
    elif isinstance(el, ChipBlock):
        for i in el.modes:
            in_range(i)
        if len(set(el.modes)) != len(el.modes):
            raise ValueError(f"block modes repeat: {el.modes}")
        if el.circuit.modes != len(el.modes):
            raise ValueError("block circuit width does not match its mode list")
        if any(isinstance(e, ChipBlock) for e in el.circuit.elements):
            raise ValueError("chip blocks nest one level deep only")
    else:
        raise TypeError(f"unknown circuit element {el!r}")


def evaluate(c: Circuit) -> np.ndarray:
    """Unitary implemented by ``c``."""
    u = np.eye(c.modes, dtype=complex)
    for el in c.elements:
        _apply(el, u)
    return u


def _apply(el: Element, u: np.ndarray) -> None:
    # in-place left multiplication of u by the element's matrix
    if isinstance(el, MZI):
        rows = list(el.modes)
        u[rows] = el.matrix() @ u[rows]
    elif isinstance(el, PhaseShifter):
        u[el.mode] *= np.exp(1j * el.phi)
    elif isinstance(el, Coupling):
        u[list(el.perm)] = u.copy()
    elif isinstance(el, ChipBlock):
        rows = list(el.modes)
        u[rows] = evaluate(el.circuit) @ u[rows]


def mzi_depth(c: Circuit) -> int:
    """Greedy earliest-start schedule length over MZIs.

    Phase shifters and couplings are free and do not take part in scheduling.
    A chip block holds all of its modes for its own internal depth.
    """
    ready = [0] * c.modes
    for el in c.elements:
        if isinstance(el, MZI):
            i, j = el.modes
            ready[i] = ready[j] = max(ready[i], ready[j]) + 1
        elif isinstance(el, ChipBlock):
            d = mzi_depth(el.circuit)
            if d == 0:
                continue
            t = max(ready[i] for i in el.modes) + d
            for i in el.modes:
                ready[i] = t
    return max(ready, default=0)


def _mzis(c: Circuit) -> Iterator[MZI]:
    for el in c.elements:
        if isinstance(el, MZI):
            yield el
        elif isinstance(el, ChipBlock):
            yield from _mzis(el.circuit)


def mzi_count(c: Circuit) -> int:
    return sum(1 for _ in _mzis(c))


def active_mzi_count(c: Circuit) -> int:
    return sum(1 for el in _mzis(c) if el.active)


def inverse(c: Circuit) -> Circuit:
    """Circuit implementing ``evaluate(c)^H``."""
    out = []
    for el in reversed(c.elements):
        if isinstance(el, MZI):
            out.append(replace(el, adjoint=not el.adjoint))
        elif isinstance(el, PhaseShifter):
            out.append(PhaseShifter(el.mode, wrap_angle(-el.phi)))
        elif isinstance(el, Coupling):
            inv = [0] * len(el.perm)
            for i, j in enumerate(el.perm):
                inv[j] = i
            out.append(Coupling(tuple(inv)))
        else:
            out.append(ChipBlock(el.modes, inverse(el.circuit)))
    return Circuit(c.modes, out)


def propagate_phases(c: Circuit) -> Circuit:
    """Rewrite ``c`` as forward MZIs followed by a single terminal phase layer.

    Input may mix forward and reversed MZIs, phase shifters and couplings.
    Every phase met on the way is pushed through the next MZI on its modes;
    couplings just relabel the pending phases. Output: one MZI per input MZI,
    in the same order and on the same modes, then one phase per mode.
    """
    pending = np.zeros(c.modes)
    out: list[Element] = []
    for el in c.elements:
        if isinstance(el, PhaseShifter):
            pending[el.mode] += el.phi
        elif isinstance(el, MZI):
            i, j = el.modes
            w = el.matrix() * np.exp(1j * pending[[i, j]])[None, :]
            p, alpha, beta = split_mzi(w)
            out.append(MZI((i, j), p.theta, p.phi, active=el.active))
            pending[i], pending[j] = alpha, beta
        elif isinstance(el, Coupling):
            moved = np.empty_like(pending)
            moved[list(el.perm)] = pending
            pending = moved
            out.append(el)
        else:
            raise TypeError(f"cannot propagate phases through {type(el).__name__}")
    out.extend(PhaseShifter(k, wrap_angle(a)) for k, a in enumerate(pending))
    return Circuit(c.modes, out)


def terminal_phases(c: Circuit) -> list[float]:
    """Phases of the trailing phase-shifter run of ``c`` (0 where absent)."""
    phases = [0.0] * c.modes
    for el in reversed(c.elements):
        if not isinstance(el, PhaseShifter):
            break
        phases[el.mode] = wrap_angle(phases[el.mode] + el.phi)
    return phases


@dataclass(frozen=True)
class ChipLayout:
    """Fixed LNN interferometer: layers of disjoint adjacent pairs ``(i, i+1)``."""

    modes: int
    layers: tuple[tuple[tuple[int, int], ...], ...]
    terminal_phase_layer: bool = True

    def __post_init__(self):
        layers = tuple(tuple(sorted((int(a), int(b)) for a, b in layer)) for layer in self.layers)
        object.__setattr__(self, "layers", layers)
        for depth, layer in enumerate(layers):
            used: set[int] = set()
            for i, j in layer:
                if j != i + 1:
                    raise ValueError(f"layer {depth}: pair {(i, j)} is not nearest-neighbour")
                if not (0 <= i and j < self.modes):
                    raise IndexError(f"layer {depth}: pair {(i, j)} out of range")
                if i in used or j in used:
                    raise ValueError(f"layer {depth}: pairs overlap at {(i, j)}")
                used.update((i, j))

    @property
    def depth(self) -> int:
        return len(self.layers)

    def slots(self) -> list[tuple[int, tuple[int, int]]]:
        """``(layer, pair)`` in forward order, pairs by increasing lower mode."""
        return [(d, pair) for d, layer in enumerate(self.layers) for pair in layer]

    @property
    def slot_count(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def truncate(self, n_layers: int) -> "ChipLayout":
        return replace(self, layers=self.layers[:n_layers])

    def to_circuit(self, angles=None) -> Circuit:
        """Place ``angles`` (one ``MZIParams`` per slot, default identity) in the layout."""
        slots = self.slots()
        if angles is None:
            angles = [IDENTITY_MZI] * len(slots)
        if len(angles) != len(slots):
            raise ValueError(f"{len(angles)} angle pairs for {len(slots)} slots")
        return Circuit(self.modes, [MZI(pair, *a) for (_, pair), a in zip(slots, angles)])


def layered(modes: int, pairs) -> tuple[tuple[tuple[int, int], ...], ...]:
    """ASAP layering of an ordered pair sequence (order-preserving on shared modes)."""
    ready = [0] * modes
    layers: list[list[tuple[int, int]]] = []
    for i, j in pairs:
        t = max(ready[i], ready[j])
        if t == len(layers):
            layers.append([])
        layers[t].append((i, j))
        ready[i] = ready[j] = t + 1
    return tuple(tuple(layer) for layer in layers)


def layout_from_circuit(c: Circuit, terminal_phase_layer: bool = True) -> ChipLayout:
    return ChipLayout(c.modes, layered(c.modes, [el.modes for el in _mzis(c)]), terminal_phase_layer)


__all__ = [
    "MZI",
    "PhaseShifter",
    "Coupling",
    "ChipBlock",
    "Circuit",
    "ChipLayout",
    "evaluate",
    "mzi_depth",
    "mzi_count",
    "active_mzi_count",
    "inverse",
    "propagate_phases",
    "terminal_phases",
    "layered",
    "layout_from_circuit",
]
