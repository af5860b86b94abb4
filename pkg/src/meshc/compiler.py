"""Angle assignment for a fixed LNN interferometer.

The layout, read forwards, is a mixing network: each MZI may or may not
exchange the Bruhat labels of its two rows. Walking the layout backwards as
a sorting network (swap iff the upper label is larger) undoes every reachable
permutation, so the target is implementable iff the backward walk sorts the
Bruhat labels of ``u``. Which slots actually swap is decided by labels alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bruhat import bruhat_decompose, swap_rows_mzi
from .circuit import MZI, ChipLayout, Circuit, PhaseShifter, evaluate, propagate_phases
from .core import IDENTITY_MZI, MZIParams, check_unitary, mzi_matrix, wrap_angle

#: Reconstruction tolerance for compiled angle sets.
RECONSTRUCTION_TOL = 1e-8


@dataclass(frozen=True)
class SlotAngles:
    layer: int
    modes: tuple[int, int]
    theta: float
    phi: float
    active: bool

    @property
    def params(self) -> MZIParams:
        return MZIParams(self.theta, self.phi)


@dataclass(frozen=True)
class AngleAssignment:
    """Per-slot settings for a layout, in the layout's forward slot order.

    Without a terminal phase layer the layout realizes ``D^H u``, where
    ``D = diag(exp(i * output_phases))`` is reported and ``up_to_output_phases``
    is set.
    """

    modes: int
    slots: tuple[SlotAngles, ...]
    used_depth: int
    terminal_phases: tuple[float, ...] | None
    output_phases: tuple[float, ...] = ()
    up_to_output_phases: bool = False

    def to_circuit(self) -> Circuit:
        els = [MZI(s.modes, s.theta, s.phi, active=s.active) for s in self.slots]
        if self.terminal_phases is not None:
            els += [PhaseShifter(k, a) for k, a in enumerate(self.terminal_phases)]
        return Circuit(self.modes, els)


class Infeasible(Exception):
    """Raised when the layout cannot realize the target.

    ``residual`` is the label arrangement left after the backward walk;
    ``blocking_pair`` is the first adjacent pair still out of order.
    """

    def __init__(self, residual, blocking_pair, message=None):
        self.residual = tuple(int(x) for x in residual)
        self.blocking_pair = blocking_pair
        super().__init__(
            message
            or f"layout cannot realize the target: residual labels {list(self.residual)}, "
            f"first inversion at modes {blocking_pair}"
        )


def sort_pass(labels, layout: ChipLayout, n_labels: int | None = None) -> tuple[list[bool], list[int]]:
    """Backward walk of ``layout`` as a sorting network on ``labels``.

    With ``n_labels`` set, labels ``>= n_labels`` are treated as equal and never
    swapped among themselves. Returns per-slot swap flags (forward slot order)
    and the final labels.
    """
    cap = len(labels) if n_labels is None else n_labels
    lab = list(labels)
    slots = layout.slots()
    swaps = [False] * len(slots)
    for s in range(len(slots) - 1, -1, -1):
        i, j = slots[s][1]
        if min(lab[i], cap) > min(lab[j], cap):
            lab[i], lab[j] = lab[j], lab[i]
            swaps[s] = True
    return swaps, lab


def _sorted_ok(lab, n_labels):
    n = len(lab) if n_labels is None else n_labels
    return all(lab[i] == i for i in range(n))


def _first_inversion(lab, n_labels):
    n = len(lab) if n_labels is None else n_labels
    for i in range(len(lab) - 1):
        if min(lab[i], n) > min(lab[i + 1], n):
            return (i, i + 1)
    return None


def compile(u, layout: ChipLayout, *, n_labels: int | None = None) -> AngleAssignment:
    """Angles placing ``u`` on ``layout``; raises :class:`Infeasible` otherwise.

    With ``n_labels = n`` only the first ``n`` columns of ``u`` are targeted
    (the remaining columns are free), as used for boson-sampling layouts.
    """
    u = check_unitary(u)
    m = len(u)
    if layout.modes != m:
        raise ValueError(f"layout has {layout.modes} modes, target has {m}")
    state = bruhat_decompose(u)
    swaps, lab = sort_pass(state.p, layout, n_labels)
    if not _sorted_ok(lab, n_labels):
        raise Infeasible(lab, _first_inversion(lab, n_labels))

    slots = layout.slots()
    n = m if n_labels is None else n_labels
    residual = u.copy()
    ops: list[MZIParams | None] = [None] * len(slots)
    for s in range(len(slots) - 1, -1, -1):
        if swaps[s]:
            i = slots[s][1][0]
            ops[s], state = swap_rows_mzi(state, i)
            residual[[i, i + 1]] = mzi_matrix(ops[s]) @ residual[[i, i + 1]]
    assert state.p[:n] == tuple(range(n)), state.p

    # sorted labels: the first n columns of the residual are diagonal
    diag = residual[range(n), range(n)]
    off = residual[:, :n].copy()
    off[range(n), range(n)] = 0
    if np.linalg.norm(off) > RECONSTRUCTION_TOL:
        raise FloatingPointError(f"residual not diagonal after sorting (off-diagonal {np.linalg.norm(off):.2e})")
    phases = np.zeros(m)
    phases[:n] = np.angle(diag)

    # residual = C u with C the product of the swap MZIs, so u = C^H residual
    pre = [PhaseShifter(k, float(a)) for k, a in enumerate(phases) if a != 0.0]
    for s, (_, pair) in enumerate(slots):
        if ops[s] is None:
            pre.append(MZI(pair, *IDENTITY_MZI, active=False))
        else:
            pre.append(MZI(pair, *ops[s], adjoint=True))
    std = propagate_phases(Circuit(m, pre))
    mzis = [el for el in std.elements if isinstance(el, MZI)]
    tail = [wrap_angle(el.phi) for el in std.elements if isinstance(el, PhaseShifter)]

    out_slots = tuple(
        SlotAngles(layer, pair, el.theta, el.phi, el.active) for (layer, pair), el in zip(slots, mzis)
    )
    used = len({sl.layer for sl in out_slots if sl.active})
    if layout.terminal_phase_layer:
        result = AngleAssignment(m, out_slots, used, tuple(tail))
        target = u
    else:
        result = AngleAssignment(m, out_slots, used, None, tuple(tail), True)
        target = np.exp(-1j * np.array(tail))[:, None] * u
    got = evaluate(result.to_circuit())
    err = np.linalg.norm((got - target)[:, :n])
    if err > RECONSTRUCTION_TOL:
        raise FloatingPointError(f"compiled angles reproduce target only to {err:.2e}")
    return result


def minimal_depth(u, layout: ChipLayout, *, n_labels: int | None = None) -> int:
    """Fewest leading layers of ``layout`` that can realize ``u``."""
    p = bruhat_decompose(check_unitary(u)).p
    for depth in range(layout.depth + 1):
        _, lab = sort_pass(p, layout.truncate(depth), n_labels)
        if _sorted_ok(lab, n_labels):
            return depth
    _, lab = sort_pass(p, layout, n_labels)
    raise Infeasible(lab, _first_inversion(lab, n_labels))


def shallowest_compile(u, layout: ChipLayout, *, n_labels: int | None = None) -> tuple[AngleAssignment, int]:
    """Compile on the shortest prefix of layers that works; later layers idle.

    Returns the assignment for the full layout (trailing slots at the
    identity setting) and the minimal number of layers used.
    """
    depth = minimal_depth(u, layout, n_labels=n_labels)
    head = compile(u, layout.truncate(depth), n_labels=n_labels)
    idle = tuple(
        SlotAngles(layer, pair, *IDENTITY_MZI, False)
        for layer, pair in layout.slots()
        if layer >= depth
    )
    full = AngleAssignment(
        head.modes,
        head.slots + idle,
        head.used_depth,
        head.terminal_phases,
        head.output_phases,
        head.up_to_output_phases,
    )
    return full, depth


def reachable_set(layout: ChipLayout) -> set[tuple[int, ...]]:
    """All label arrangements the layout can produce as a mixing network."""
    reach = {tuple(range(layout.modes))}
    for _, (i, j) in layout.slots():
        grown = set(reach)
        for lab in reach:
            t = list(lab)
            t[i], t[j] = t[j], t[i]
            grown.add(tuple(t))
        reach = grown
    return reach


def reachable_check(layout: ChipLayout, sigma) -> bool:
    return tuple(int(x) for x in sigma) in reachable_set(layout)
