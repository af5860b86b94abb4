"""Dense mesh-scale linear algebra and the optical primitives.

Matrices are plain complex ``numpy`` arrays. Modes index rows: column ``k`` of
a unitary is the image of the creation operator of mode ``k``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi

#: Relative zero threshold, scaled by the RMS magnitude of the matrix entries.
ZERO_RTOL = 1e-10
#: Frobenius tolerance on ``U^H U - I`` when accepting user input.
UNITARITY_TOL = 1e-9


class MZIParams(NamedTuple):
    """Internal phase ``theta`` and external (input) phase ``phi``, in radians."""

    theta: float
    phi: float

    def canonical(self) -> "MZIParams":
        return MZIParams(wrap_angle(self.theta), wrap_angle(self.phi))


#: Setting at which an MZI implements the 2x2 identity.
IDENTITY_MZI = MZIParams(math.pi, math.pi)


def wrap_angle(x: float) -> float:
    """Map an angle into [0, 2*pi)."""
    y = math.fmod(float(x), TWO_PI)
    if y < 0:
        y += TWO_PI
    # fmod can land exactly on 2*pi after the shift for tiny negatives
    return 0.0 if y >= TWO_PI else y


def zero_tol(a: np.ndarray) -> float:
    """Scale-invariant threshold below which an entry of ``a`` counts as zero."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return ZERO_RTOL * np.linalg.norm(a) / math.sqrt(a.size)


def beamsplitter_matrix() -> np.ndarray:
    return np.array([[1, 1j], [1j, 1]], dtype=complex) / math.sqrt(2)


def phase_top(x: float) -> np.ndarray:
    return np.diag([np.exp(1j * x), 1.0 + 0j])


def mzi_matrix(p: MZIParams | tuple[float, float]) -> np.ndarray:
    """Transfer matrix ``BS . PS_top(theta) . BS . PS_top(phi)``.

    Closed form: ``i e^{i theta/2} [[e^{i phi} s, c], [e^{i phi} c, -s]]`` with
    ``s = sin(theta/2)`` and ``c = cos(theta/2)``.
    """
    theta, phi = p
    s, c = math.sin(theta / 2), math.cos(theta / 2)
    g = 1j * np.exp(0.5j * theta)
    e = np.exp(1j * phi)
    return g * np.array([[e * s, c], [e * c, -s]], dtype=complex)


def zeroing_angles(a: complex, b: complex) -> MZIParams:
    """Angles such that ``mzi_matrix(angles) @ (a, b)`` has a zero second entry.

    Raises ``ValueError`` on the degenerate vector ``(0, 0)``; callers walking an
    elimination order must detect already-zero pairs themselves.
    """
    if a == 0 and b == 0:
        raise ValueError("degenerate vector: cannot zero (0, 0)")
    theta = 2.0 * math.atan2(abs(a), abs(b))
    phi = 0.0 if (a == 0 or b == 0) else np.angle(b) - np.angle(a)
    return MZIParams(theta, phi).canonical()


def split_mzi(w: np.ndarray) -> tuple[MZIParams, float, float]:
    """Write a 2x2 unitary as ``diag(e^{i alpha}, e^{i beta}) @ mzi_matrix(p)``.

    Returns ``(p, alpha, beta)``. When ``w`` is diagonal the MZI part is the
    identity setting, so phases pass through untouched.
    """
    w = np.asarray(w, dtype=complex)
    mag_s, mag_c = abs(w[0, 0]), abs(w[0, 1])
    theta = 2.0 * math.atan2(mag_s, mag_c)
    tol = 1e-12 * max(mag_s, mag_c)
    if mag_c <= tol:
        p = IDENTITY_MZI
    elif mag_s <= tol:
        p = MZIParams(0.0, 0.0)
    else:
        p = MZIParams(theta, float(np.angle(w[0, 0] * np.conj(w[0, 1]))))
    p = p.canonical()
    d = w @ mzi_matrix(p).conj().T
    return p, float(np.angle(d[0, 0])), float(np.angle(d[1, 1]))


def check_unitary(u, tol: float = UNITARITY_TOL) -> np.ndarray:
    """Return ``u`` as a complex square array, rejecting non-unitary input."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise ValueError("matrix has non-finite entries")
    err = np.linalg.norm(u.conj().T @ u - np.eye(len(u)))
    if err > tol:
        raise ValueError(f"matrix is not unitary: ||U^H U - I||_F = {err:.3e}")
    return u


def check_isometry(v, tol: float = UNITARITY_TOL) -> np.ndarray:
    """Return ``v`` as a complex m x n array with orthonormal columns (m >= n)."""
    v = np.asarray(v, dtype=complex)
    if v.ndim != 2 or v.size == 0:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {v.shape}")
    m, n = v.shape
    if n > m:
        raise ValueError(f"isometry needs rows >= cols, got {m} x {n}")
    if not np.all(np.isfinite(v)):
        raise ValueError("matrix has non-finite entries")
    err = np.linalg.norm(v.conj().T @ v - np.eye(n))
    if err > tol:
        raise ValueError(f"columns are not orthonormal: ||V^H V - I||_F = {err:.3e}")
    return v


def haar_random_unitary(m: int, seed: int | None = None) -> np.ndarray:
    """Haar-distributed ``m x m`` unitary, deterministic per ``seed``.

    QR of a complex Ginibre matrix, with the phases of ``diag(R)`` moved back
    into ``Q`` so the distribution is invariant.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_isometry(m: int, n: int, seed: int | None = None) -> np.ndarray:
    """Haar-random ``m x n`` isometry (first ``n`` columns of a Haar unitary).

    Orthonormalizes an ``m x n`` Ginibre matrix directly, so the cost is
    ``O(m n^2)`` rather than ``O(m^3)``.
    """
    if n < 1 or n > m:
        raise ValueError(f"need 1 <= n <= m, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def complete_isometry(v: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns ``v`` to a full unitary ``[v | w]``."""
    m, n = v.shape
    if n == m:
        return np.array(v, dtype=complex)
    # complement via SVD of the projector's range; deterministic for given v
    _, _, vh = np.linalg.svd(v.conj().T)
    w = vh[n:].conj().T
    return np.hstack([v, w])
