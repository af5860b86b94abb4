"""Greedy elimination over coupled chips, and the long-range MZI variant.

Rows of the working isometry carry the label of their leftmost nonzero
column (``n`` for an all-zero row). Each stage permutes rows for free (a
fibre coupling) and then lets every ``k``-mode chip push its rows toward
echelon form. The physical device is the inverse of the elimination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import MZI, ChipBlock, Circuit, Coupling, PhaseShifter, evaluate, propagate_phases
from .core import check_isometry, mzi_matrix, random_isometry, zeroing_angles

#: Entries below ``CHOP_RTOL`` times the largest magnitude are set to exact zero.
CHOP_RTOL = 1e-12


class NonConvergence(RuntimeError):
    """The elimination hit its stage cap; carries the working matrix."""

    def __init__(self, stages: int, work: np.ndarray):
        self.work = work
        super().__init__(
            f"no convergence after {stages} stages; labels {row_labels(work).tolist()}"
        )


@dataclass(frozen=True)
class Block:
    """A chip on ``modes`` implementing ``unitary``; ``circuit`` is its mesh, if built."""

    modes: tuple[int, ...]
    unitary: np.ndarray
    circuit: Circuit | None = None


@dataclass(frozen=True)
class Stage:
    """A coupling followed by parallel chips, in physical order."""

    coupling: tuple[int, ...]
    blocks: tuple[Block, ...]


@dataclass(frozen=True)
class CoupledCircuit:
    """Physical coupled-chip device: input phases, stages, output coupling.

    ``input_phases`` act on the first ``n`` modes. Coupling ``perm`` sends the
    amplitude on mode ``i`` to ``perm[i]``.
    """

    modes: int
    photons: int
    input_phases: tuple[float, ...]
    stages: tuple[Stage, ...]
    output_coupling: tuple[int, ...]
    chip_size: int = 0

    @property
    def stage_count(self) -> int:
        return len(self.stages)

    def to_circuit(self) -> Circuit:
        els: list = [PhaseShifter(i, a) for i, a in enumerate(self.input_phases) if a != 0.0]
        for st in self.stages:
            els.append(Coupling(st.coupling))
            for b in st.blocks:
                inner = b.circuit if b.circuit is not None else _matrix_circuit(b.unitary)
                els.append(ChipBlock(b.modes, inner))
        els.append(Coupling(self.output_coupling))
        return Circuit(self.modes, els)

    def matrix(self) -> np.ndarray:
        """Full ``m x m`` unitary, from the block unitaries directly."""
        u = np.eye(self.modes, dtype=complex)
        u[: len(self.input_phases)] *= np.exp(1j * np.array(self.input_phases))[:, None]
        for st in self.stages:
            u[list(st.coupling)] = u.copy()
            for b in st.blocks:
                rows = list(b.modes)
                u[rows] = b.unitary @ u[rows]
        u[list(self.output_coupling)] = u.copy()
        return u


def _matrix_circuit(w: np.ndarray) -> Circuit:
    from .synthesis import synth_clements

    return synth_clements(w)


def stage_depth_mzi(cc: CoupledCircuit, k: int) -> int:
    """MZI-depth with each stage's chips run in parallel at internal depth ``k``."""
    return cc.stage_count * k


def row_labels(work: np.ndarray) -> np.ndarray:
    """Leftmost nonzero column of each row, ``n`` for zero rows."""
    nz = work != 0
    return np.where(nz.any(axis=1), nz.argmax(axis=1), work.shape[1])


def _chop(work: np.ndarray) -> None:
    scale = np.abs(work).max(initial=0.0)
    work[np.abs(work) <= CHOP_RTOL * scale] = 0


def _is_done(labels: np.ndarray, n: int) -> bool:
    return bool(np.all(labels[:n] == np.arange(n)) and np.all(labels[n:] == n))


def echelon_unitary(w: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Unitary ``q`` with ``q @ w`` in row echelon form; returns ``(q, q @ w)``.

    Entries below the staircase are exact zeros.
    """
    r = np.array(w, dtype=complex)
    q = _echelon_inplace(r, r.shape[1], tol, track=True)
    return q, r


def _echelon_inplace(block: np.ndarray, pivot_cols: int, tol: float, track: bool):
    """Householder echelon reduction of ``block`` on its first ``pivot_cols`` columns.

    The pivot row only advances on columns with a nonzero remainder, so a
    rank-deficient column does not waste a pivot. All columns of ``block``
    are transformed. Returns the accumulated unitary when ``track`` is set.
    """
    rows = block.shape[0]
    q = np.eye(rows, dtype=complex) if track else None
    piv = 0
    for c in range(pivot_cols):
        if piv >= rows:
            break
        x = block[piv:, c]
        norm = np.linalg.norm(x)
        if norm <= tol:
            block[piv:, c] = 0
            continue
        if len(x) > 1 and np.linalg.norm(x[1:]) > 0:
            alpha = -np.exp(1j * np.angle(x[0])) * norm
            h = x.copy()
            h[0] -= alpha
            h /= np.linalg.norm(h)
            tail = block[piv:, c:]
            tail -= 2.0 * np.outer(h, h.conj() @ tail)
            if track:
                q[piv:] -= 2.0 * np.outer(h, h.conj() @ q[piv:])
        block[piv + 1 :, c] = 0
        piv += 1
    return q


def _stage_start(labels: np.ndarray, m: int, n: int, k: int) -> int:
    # first row whose label it shares with the next one, capped so the first
    # chip still fits inside the device
    pairs = np.nonzero((labels[:-1] == labels[1:]) & (labels[:-1] < n))[0]
    first = int(pairs[0]) if len(pairs) else 0
    return min(first, max(0, m - k))


def _greedy_stages(v: np.ndarray, k: int, track: bool = True):
    """Run the elimination; yield ``(order, groups)`` per stage and the final matrix.

    ``order`` is the row permutation applied first (new row ``r`` is old row
    ``order[r]``); ``groups`` maps row ranges to the unitaries applied next.
    """
    m, n = v.shape
    work = np.array(v, dtype=complex)
    _chop(work)
    tol = CHOP_RTOL * max(1.0, np.abs(work).max(initial=0.0))
    stages = []
    zeros = int(np.count_nonzero(work == 0))
    for _ in range(m * n + 1):
        labels = row_labels(work)
        order = np.argsort(labels, kind="stable")
        work = work[order]
        labels = labels[order]
        if _is_done(labels, n):
            if not np.array_equal(order, np.arange(m)):
                stages.append((order, []))
            return stages, work
        start = _stage_start(labels, m, n, k)
        groups = []
        for lo in range(start, m, k):
            hi = min(lo + k, m)
            q = int(labels[lo:hi].min())
            if q >= n or hi - lo < 2:
                continue
            block = work[lo:hi, q:]
            u = _echelon_inplace(block, min(k, n - q), tol, track)
            groups.append(((lo, hi), u))
        _chop(work)
        now = int(np.count_nonzero(work == 0))
        assert now >= zeros, "structural zeros decreased"
        zeros = now
        stages.append((order, groups))
    raise NonConvergence(len(stages), work)


def greedy_stage_count(v, k: int) -> int:
    """Number of coupled stages the greedy elimination needs for ``v``."""
    v = check_isometry(v)
    if not 2 <= k:
        raise ValueError(f"chip size must be >= 2, got {k}")
    stages, _ = _greedy_stages(v, min(k, v.shape[0]), track=False)
    return sum(1 for _, g in stages if g)


def greedy_coupled(v, k: int, synthesize: bool = True) -> CoupledCircuit:
    """Coupled-chip device for the isometry ``v`` using ``k``-mode chips.

    With ``synthesize`` each chip also carries its rectangular-mesh circuit.
    """
    v = check_isometry(v)
    m, n = v.shape
    if not 2 <= k <= m:
        raise ValueError(f"need 2 <= k <= m, got k={k}, m={m}")
    stages, final = _greedy_stages(v, k)

    # elimination: final = T v with T = ... B_s P_s ...; device: v = T^H D (I; 0)
    diag = final[np.arange(n), np.arange(n)]
    phases = tuple(float(a) for a in np.angle(diag))
    # trailing pure permutation (no chips) folds into the output coupling
    tail = np.arange(m)
    if stages and not stages[-1][1]:
        tail = stages.pop()[0]

    phys: list[Stage] = []
    pending = _perm_of(tail)  # inverse of the last elimination permutation
    for order, groups in reversed(stages):
        blocks = []
        for (lo, hi), u in groups:
            w = u.conj().T
            blocks.append(Block(tuple(range(lo, hi)), w, _matrix_circuit(w) if synthesize else None))
        phys.append(Stage(pending, tuple(blocks)))
        pending = _perm_of(order)
    cc = CoupledCircuit(m, n, phases, tuple(phys), pending, k)
    err = np.linalg.norm(cc.matrix()[:, :n] - v)
    if err > 1e-8:
        raise FloatingPointError(f"coupled device reproduces v only to {err:.2e}")
    return cc


def _perm_of(order: np.ndarray) -> tuple[int, ...]:
    # undoing "new row r = old row order[r]" sends amplitude on r to order[r]
    return tuple(int(x) for x in order)


def _longrange_eliminate(v: np.ndarray):
    """Layered long-range elimination; returns ``(layers, mzis, final matrix)``."""
    m, n = v.shape
    work = np.array(v, dtype=complex)
    _chop(work)
    elim: list[MZI] = []
    top = np.arange(min(n, m))
    for layers in range(m * n + 1):
        labels = row_labels(work)
        if _is_done(labels, n):
            return layers, elim, work
        eff = labels.copy()
        eff[top] = np.minimum(labels[top], top)
        before = len(elim)
        for lab in range(n):
            rows = np.nonzero(eff == lab)[0]
            for a, b in zip(rows[0::2], rows[1::2]):
                params = zeroing_angles(work[a, lab], work[b, lab])
                work[[a, b]] = mzi_matrix(params) @ work[[a, b]]
                work[b, : lab + 1] = 0
                elim.append(MZI((int(a), int(b)), *params))
        _chop(work)
        if len(elim) == before:
            break
    raise NonConvergence(layers, work)


def longrange_layer_count(v) -> int:
    """Layers the long-range elimination needs for ``v``."""
    return _longrange_eliminate(check_isometry(v))[0]


def greedy_longrange(v) -> Circuit:
    """Layers of long-range MZIs implementing ``v`` (the ``k = 2`` variant).

    Rows sharing a label pair up in index order; the MZI on ``(i, j)`` clears
    ``V[j, label]``. Row ``i < n`` whose label exceeds ``i`` counts as label
    ``i``, which keeps the pivots on the top ``n`` rows.
    """
    v = check_isometry(v)
    m, n = v.shape
    _, elim, work = _longrange_eliminate(v)
    phases = np.angle(work[np.arange(n), np.arange(n)])
    pre = [PhaseShifter(i, float(a)) for i, a in enumerate(phases)]
    pre += [MZI(el.modes, el.theta, el.phi, adjoint=True) for el in reversed(elim)]
    c = propagate_phases(Circuit(m, pre))
    err = np.linalg.norm(evaluate(c)[:, :n] - v)
    if err > 1e-8:
        raise FloatingPointError(f"long-range circuit reproduces v only to {err:.2e}")
    return c


def dense_generic_isometry(m: int, n: int, seed: int = 0, max_tries: int = 100) -> np.ndarray:
    """Random isometry whose leading minors are all well away from singular."""
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        v = random_isometry(m, n, int(rng.integers(2**63)))
        # leading minors judged by conditioning, which does not shrink with m
        conds = [np.linalg.cond(v[:j, :j]) for j in range(1, n + 1)]
        if max(conds) < 1e8 and np.all(np.abs(v) > 1e-6 * np.abs(v).max()):
            return v
    raise RuntimeError(f"no dense generic {m}x{n} isometry after {max_tries} draws")
