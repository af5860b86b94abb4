"""End-to-end synthesis: full unitaries on universal meshes, isometries on partial ones.

Every scheme here is a fixed layout handed to :func:`meshc.compiler.compile`;
the layout alone fixes the MZI count and depth.
"""

from __future__ import annotations

import numpy as np

from .circuit import Circuit, evaluate
from .compiler import compile
from .core import check_isometry, check_unitary, complete_isometry
from .networks import full_sorting_network, partial_sorting_network, reck_network


def synth_clements(u) -> Circuit:
    """Rectangular (brick-wall) mesh: ``m(m-1)/2`` MZIs, depth ``m``."""
    u = check_unitary(u)
    layout = full_sorting_network(len(u)).to_layout()
    return compile(u, layout).to_circuit()


def synth_reck(u) -> Circuit:
    """Triangular mesh: ``m(m-1)/2`` MZIs, depth ``2m - 3``."""
    u = check_unitary(u)
    layout = reck_network(len(u)).to_layout()
    return compile(u, layout).to_circuit()


def boson_sampling_layout(m: int, n: int):
    """Physical layout for ``n``-photon inputs on ``m`` modes.

    The compiler walks a layout backwards, so the physical mesh is the
    reverse of the partial sorting network.
    """
    return partial_sorting_network(m, n).reversed().to_layout()


def synth_boson_sampling(v) -> Circuit:
    """Circuit whose first ``n`` columns equal the ``m x n`` isometry ``v``.

    Uses ``mn - n(n+1)/2`` MZIs in depth at most ``m``. The isometry is
    completed to a unitary only to run the elimination; the extra columns are
    left to whatever the mesh produces.
    """
    v = check_isometry(v)
    m, n = v.shape
    u = complete_isometry(v)
    return compile(u, boson_sampling_layout(m, n), n_labels=n).to_circuit()


def parameter_count(m: int, n: int) -> int:
    """Real parameters of an ``m x n`` isometry: ``2nm - n(n+1)``.

    Each MZI carries two, so half of this is a lower bound on the MZI count.
    The rectangular mesh cut down to ``n`` inputs needs about
    ``(m^2 - n^2 + 2mn)/4`` MZIs by comparison.
    """
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= m, got m={m}, n={n}")
    return 2 * n * m - n * (n + 1)


def column_error(c: Circuit, v) -> float:
    """Frobenius distance between the first ``n`` columns of ``c`` and ``v``."""
    v = np.asarray(v)
    return float(np.linalg.norm(evaluate(c)[:, : v.shape[1]] - v))
