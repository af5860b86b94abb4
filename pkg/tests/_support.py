"""Generators and oracles shared by the test modules."""

import numpy as np

from meshc.circuit import ChipLayout


def random_layout(rng, m, n_layers, density=0.6, terminal=True, max_slots=None):
    layers = []
    used = 0
    for _ in range(n_layers):
        pairs = []
        i = int(rng.integers(2))
        while i < m - 1:
            if rng.random() < density and (max_slots is None or used < max_slots):
                pairs.append((i, i + 1))
                used += 1
                i += 2
            else:
                i += 1
        layers.append(pairs)
    return ChipLayout(m, layers, terminal)


def random_angles(rng, count):
    return [tuple(rng.uniform(0, 2 * np.pi, 2)) for _ in range(count)]


def with_permutation(sigma, seed):
    """Unitary whose Bruhat labels are ``sigma`` (QR keeps the double coset)."""
    rng = np.random.default_rng(seed)
    m = len(sigma)

    def g():
        return rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))

    u1 = np.triu(g(), 1) + np.eye(m)
    u2 = np.triu(g()) + 3 * np.eye(m)
    p = np.zeros((m, m))
    p[range(m), list(sigma)] = 1
    q, _ = np.linalg.qr(u1 @ p @ u2)
    return q
