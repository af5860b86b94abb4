"""Bruhat decomposition ``A = U1 P U2`` and its local update rules.

``P`` is stored as a label array ``p`` with ``P[i, p[i]] = 1``: row ``i`` of
``A`` carries label ``p[i]``. ``U1`` is unit upper triangular, ``U2`` upper
triangular and invertible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MZIParams, mzi_matrix, zero_tol, zeroing_angles


@dataclass(frozen=True)
class BruhatState:
    u1: np.ndarray
    p: tuple[int, ...]
    u2: np.ndarray

    @property
    def modes(self) -> int:
        return len(self.p)

    def perm_matrix(self) -> np.ndarray:
        m = self.modes
        out = np.zeros((m, m), dtype=complex)
        out[range(m), self.p] = 1
        return out

    def reconstruct(self) -> np.ndarray:
        # P @ U2 is U2 with row p[i] moved to row i
        return self.u1 @ self.u2[list(self.p)]


def bruhat_decompose(a) -> BruhatState:
    """Bruhat decomposition of an invertible square matrix.

    Rows are processed bottom-up. Each row is reduced against the rows below
    it (unit upper triangular row operations) until its leftmost nonzero sits
    in a column no lower row has claimed; that column is the row's label.
    """
    a = np.array(a, dtype=complex)
    m = a.shape[0]
    if a.shape != (m, m):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    tol = zero_tol(a)
    work = a.copy()
    # ops @ a == work throughout; ops stays unit upper triangular
    ops = np.eye(m, dtype=complex)
    owner = [-1] * m  # owner[col] = row whose leading entry is col
    p = [0] * m
    for i in range(m - 1, -1, -1):
        for j in range(m):
            k = owner[j]
            if k >= 0:
                c = work[i, j] / work[k, j]
                if c != 0:
                    work[i, j:] -= c * work[k, j:]
                    ops[i] -= c * ops[k]
                work[i, j] = 0
            elif abs(work[i, j]) > tol:
                owner[j] = i
                p[i] = j
                break
            else:
                work[i, j] = 0
        else:
            raise np.linalg.LinAlgError("matrix is numerically singular")
    u1 = _unit_upper_inverse(ops)
    u2 = np.zeros_like(work)
    u2[p] = work
    return BruhatState(u1, tuple(p), np.triu(u2))


def _unit_upper_inverse(t: np.ndarray) -> np.ndarray:
    m = len(t)
    inv = np.linalg.solve(t, np.eye(m))
    inv = np.triu(inv)
    np.fill_diagonal(inv, 1)
    return inv


def _normalise(u1: np.ndarray, p: list[int], u2: np.ndarray, rows) -> None:
    # restore unit diagonal of u1 on the touched columns; push the diagonal into u2
    for r in rows:
        d = u1[r, r]
        if d != 1:
            u1[: r + 1, r] /= d
            u1[r, r] = 1
            u2[p[r]] *= d


def apply_two_mode(state: BruhatState, i: int, e) -> BruhatState:
    """Bruhat state of ``E @ A`` for ``E`` acting on rows ``i, i+1``."""
    e = np.asarray(e, dtype=complex)
    if e.shape != (2, 2):
        raise ValueError("two-mode operator must be 2x2")
    if abs(np.linalg.det(e)) <= 1e-12 * max(1.0, np.linalg.norm(e) ** 2):
        raise np.linalg.LinAlgError("two-mode operator is singular")
    u1 = state.u1.copy()
    u2 = state.u2.copy()
    p = list(state.p)
    rows = [i, i + 1]
    u1[rows] = e @ u1[rows]
    tol = zero_tol(u1)
    beta, gamma = u1[i + 1, i], u1[i + 1, i + 1]
    if abs(beta) <= tol:
        # still triangular: P unchanged
        u1[i + 1, i] = 0
    elif abs(gamma) <= tol:
        _swap_case(u1, p, i)
    else:
        if p[i] < p[i + 1]:
            u1[:, rows] = u1[:, rows[::-1]]
            p[i], p[i + 1] = p[i + 1], p[i]
            beta, gamma = u1[i + 1, i], u1[i + 1, i + 1]
        # now p[i] > p[i+1]: column op on u1, compensating row op on u2
        r = beta / gamma
        u1[:, i] -= r * u1[:, i + 1]
        u1[i + 1, i] = 0
        j1, j2 = p[i], p[i + 1]
        u2[j2] += r * u2[j1]
    _normalise(u1, p, u2, rows)
    return BruhatState(u1, tuple(p), np.triu(u2))


def _swap_case(u1: np.ndarray, p: list[int], i: int) -> None:
    u1[:, [i, i + 1]] = u1[:, [i + 1, i]]
    u1[i + 1, i] = 0
    p[i], p[i + 1] = p[i + 1], p[i]


def swap_rows_mzi(state: BruhatState, i: int) -> tuple[MZIParams, BruhatState]:
    """MZI on modes ``i, i+1`` that exchanges labels ``p[i]`` and ``p[i+1]``.

    The MZI maps ``(U1[i, i+1], 1)`` to ``(b', 0)``, which zeroes the entry
    that would otherwise keep ``U1`` triangular, forcing the column swap.
    """
    if not 0 <= i < state.modes - 1:
        raise IndexError(f"no mode pair ({i}, {i + 1}) on {state.modes} modes")
    params = zeroing_angles(state.u1[i, i + 1], 1.0)
    u1 = state.u1.copy()
    u2 = state.u2.copy()
    p = list(state.p)
    rows = [i, i + 1]
    u1[rows] = mzi_matrix(params) @ u1[rows]
    _swap_case(u1, p, i)
    _normalise(u1, p, u2, rows)
    return params, BruhatState(u1, tuple(p), u2)


def rank_profile_permutation(a, rtol: float = 1e-9) -> tuple[int, ...]:
    """Bruhat permutation read off ranks of bottom-left submatrices.

    ``rank(A[i:, :j]) = #{r >= i : p[r] < j}``; independent of the elimination.
    """
    a = np.asarray(a, dtype=complex)
    m = len(a)
    scale = np.linalg.norm(a, 2)
    rk = np.zeros((m + 1, m + 1), dtype=int)
    for i in range(m):
        for j in range(1, m + 1):
            s = np.linalg.svd(a[i:, :j], compute_uv=False)
            rk[i, j] = int(np.sum(s > rtol * scale))
    p = [0] * m
    for i in range(m):
        for j in range(m):
            if rk[i, j + 1] - rk[i, j] - rk[i + 1, j + 1] + rk[i + 1, j] == 1:
                p[i] = j
    return tuple(p)
