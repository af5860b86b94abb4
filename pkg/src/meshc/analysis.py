"""Depth recurrence and bounds for long-range elimination; transmission design space.

The long-range elimination is summarized by label occupancy arrays ``T``:
``T[i]`` rows carry label ``i`` (``i = n`` for finished zero rows). One layer
halves every label class, sending the lower halves one label up.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .coupled import dense_generic_isometry, greedy_stage_count

# --------------------------------------------------------------------------
# occupancy recurrence and bounds


class RegimeWarning(UserWarning):
    """The closed-form depth bound was evaluated outside its ``K > 2n`` regime."""


def tk_step(t) -> tuple[int, ...]:
    """One layer of pairing: ``T'[i] = ceil(T[i]/2) + floor(T[i-1]/2)``; the last class only grows."""
    t = [int(x) for x in t]
    n = len(t) - 1
    if n < 1 or any(x < 0 for x in t):
        raise ValueError(f"occupancy array needs >= 2 nonnegative entries, got {t}")
    out = [0] * (n + 1)
    out[0] = (t[0] + 1) // 2
    for i in range(1, n):
        out[i] = (t[i] + 1) // 2 + t[i - 1] // 2
    out[n] = t[n] + t[n - 1] // 2
    return tuple(out)


def equilibrium(m: int, n: int) -> tuple[int, ...]:
    return (1,) * n + (m - n,)


def tk_simulate(m: int, n: int) -> tuple[int, list[tuple[int, ...]]]:
    """Layers until ``[m, 0, ..., 0]`` reaches ``[1, ..., 1, m - n]``, with the trace."""
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= m, got m={m}, n={n}")
    t = (m,) + (0,) * n
    goal = equilibrium(m, n)
    trace = [t]
    while t != goal:
        t = tk_step(t)
        trace.append(t)
    return len(trace) - 1, trace


def _ineq_holds(m: int, n: int, k: int) -> bool:
    # m * sum_{i<n} C(K, i) < 2^K, exactly
    return m * sum(math.comb(k, i) for i in range(n)) < (1 << k)


def depth_bound_inequality(m: int, n: int) -> int:
    """Smallest ``K`` with ``m * sum_{i<n} C(K, i) < 2^K`` (exact integers)."""
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= m, got m={m}, n={n}")
    cap = 64 * n + 64 * math.ceil(math.log2(m))
    for k in range(cap + 1):
        if _ineq_holds(m, n, k):
            return k
    raise ArithmeticError(f"no K <= {cap} satisfies the binomial inequality for m={m}, n={n}")


def depth_bound_analytic(m: int, n: int) -> int:
    """``ceil(2n + 2L + 2 sqrt(nL + L^2))`` with ``L = ln(m/2)``.

    Derived assuming ``K > 2n``; a :class:`RegimeWarning` flags results outside it.
    """
    if m < 3 or n < 1:
        raise ValueError(f"closed form needs m >= 3 and n >= 1, got m={m}, n={n}")
    lg = math.log(m / 2)
    k = math.ceil(2 * n + 2 * lg + 2 * math.sqrt(n * lg + lg * lg))
    if k <= 2 * n:
        warnings.warn(f"K = {k} <= 2n = {2 * n}: outside the bound's regime", RegimeWarning, stacklevel=2)
    return k


def _c(n: int, k: int) -> int:
    return math.comb(n, k) if 0 <= k <= n else 0


def lemma_identities_check(m: int, n: int, k_max: int) -> bool:
    """Check the parity expansions of ``T_k`` against exact simulation.

    With ``S_k[i] = T_k[i] mod 2``, verifies for every ``k <= k_max`` and ``i < n``

        T_k[i] = C(k,i) m / 2^k
                 + sum_{l=1..k} 2^-l sum_{j=0..min(l,i)} (C(l-1,j) - C(l-1,j-1)) S_{k-l}[i-j]

    and the summed form

        sum_{i<n} T_k[i] = sum_{i<n} C(k,i) m / 2^k
                           + sum_{i<n} sum_{l=i+1..k} 2^-l C(l-1,i) S_{k-l}[n-1-i]

    in exact rationals.
    """
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= m, got m={m}, n={n}")
    trace = [(m,) + (0,) * n]
    for _ in range(k_max):
        trace.append(tk_step(trace[-1]))
    par = [[x % 2 for x in t] for t in trace]
    for k in range(k_max + 1):
        for i in range(n):
            val = Fraction(_c(k, i) * m, 2**k)
            for l in range(1, k + 1):
                inner = sum(
                    (_c(l - 1, j) - _c(l - 1, j - 1)) * par[k - l][i - j] for j in range(min(l, i) + 1)
                )
                val += Fraction(inner, 2**l)
            if val != trace[k][i]:
                return False
        total = sum(Fraction(_c(k, i) * m, 2**k) for i in range(n))
        for i in range(n):
            for l in range(i + 1, k + 1):
                total += Fraction(_c(l - 1, i) * par[k - l][n - 1 - i], 2**l)
        if total != sum(trace[k][:n]):
            return False
    return True


@dataclass(frozen=True)
class DepthRow:
    m: int
    n: int
    k_exact: int
    k_ineq: int
    k_analytic: int | None


def depth_sweep(pairs) -> list[DepthRow]:
    """Exact layers, inequality bound and closed form for each ``(m, n)``."""
    rows = []
    for m, n in pairs:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            ana = depth_bound_analytic(m, n) if m >= 3 else None
        rows.append(DepthRow(m, n, tk_simulate(m, n)[0], depth_bound_inequality(m, n), ana))
    return rows


# --------------------------------------------------------------------------
# transmission


@dataclass(frozen=True)
class TransmissionParams:
    eta_mzi: float
    eta_c: float
    m: int
    n: int
    k: int

    def __post_init__(self):
        _check_eta(eta_mzi=self.eta_mzi, eta_c=self.eta_c)
        if not 1 <= self.n <= self.m:
            raise ValueError(f"need 1 <= n <= m, got m={self.m}, n={self.n}")
        if not 2 <= self.k <= self.m:
            raise ValueError(f"need 2 <= k <= m, got k={self.k}")


def transmission(p: TransmissionParams, d: int) -> tuple[float, float]:
    """Per-photon ``eta = eta_mzi^(d k) eta_c^(d + 1)`` and the ``n``-photon ``eta^n``.

    A single ``m``-mode chip is the case ``k = m``, ``d = 1``.
    """
    if d < 1:
        raise ValueError(f"stage count must be >= 1, got {d}")
    eta = p.eta_mzi ** (d * p.k) * p.eta_c ** (d + 1)
    return eta, eta**p.n


def default_cache_path() -> Path:
    env = os.environ.get("MESHC_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "meshc" / "stage_depths.json"


class DepthCache:
    """Persistent map ``"(m,n,k)" -> d`` backed by a JSON file.

    Reads tolerate a missing or unreadable file. Writes go to a temporary
    file that is renamed over the target, so readers never see partial JSON;
    one writer at a time is assumed.
    """

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path is not None else default_cache_path()
        self.data: dict[str, int] = {}
        try:
            self.data = {str(k): int(v) for k, v in json.loads(self.path.read_text()).items()}
        except (OSError, ValueError, AttributeError):
            self.data = {}
        self._dirty = False

    @staticmethod
    def key(m: int, n: int, k: int) -> str:
        return f"({m},{n},{k})"

    def get(self, m: int, n: int, k: int) -> int | None:
        return self.data.get(self.key(m, n, k))

    def put(self, m: int, n: int, k: int, d: int) -> None:
        self.data[self.key(m, n, k)] = int(d)
        self._dirty = True

    def save(self) -> None:
        if not self._dirty:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".stage_depths.", suffix=".tmp")
        with os.fdopen(fd, "w") as f:
            json.dump(dict(sorted(self.data.items())), f, indent=0)
        os.replace(tmp, self.path)
        self._dirty = False


class StageDepths:
    """Measured ``d(m, n, k)`` on one dense generic instance, memoized.

    ``k = m`` is the single chip: one stage by definition.
    """

    def __init__(self, m: int, n: int, cache: DepthCache | None = None, seed: int = 0):
        if not 1 <= n <= m:
            raise ValueError(f"need 1 <= n <= m, got m={m}, n={n}")
        self.m, self.n, self.seed = m, n, seed
        self.cache = cache
        self._v = None
        self._memo: dict[int, int] = {}

    def __call__(self, k: int) -> int:
        if k in self._memo:
            return self._memo[k]
        if k >= self.m:
            d = 1
        else:
            d = self.cache.get(self.m, self.n, k) if self.cache is not None else None
            if d is None:
                if self._v is None:
                    self._v = dense_generic_isometry(self.m, self.n, self.seed)
                d = greedy_stage_count(self._v, k)
                if self.cache is not None:
                    self.cache.put(self.m, self.n, k, d)
        self._memo[k] = d
        return d


def chip_sizes(m: int, k_max: int | None = None, stride: int = 1) -> list[int]:
    """Scanned chip sizes: ``2, 2 + stride, ...`` up to ``k_max``, plus the single chip ``m``."""
    top = m if k_max is None else min(k_max, m)
    ks = list(range(2, top + 1, max(1, stride)))
    if m not in ks:
        ks.append(m)
    return ks


@dataclass(frozen=True)
class ChipChoice:
    k: int
    eta: float
    d: int
    single_chip: bool


def _check_eta(**kw) -> None:
    for name, x in kw.items():
        if not 0.0 < x <= 1.0:
            raise ValueError(f"{name} must lie in (0, 1], got {x}")


def optimal_chip_size(
    m: int,
    n: int,
    eta_mzi: float,
    eta_c: float,
    *,
    depths: StageDepths | None = None,
    k_max: int | None = None,
    stride: int = 1,
) -> ChipChoice:
    """Chip size maximizing per-photon transmission; ties go to the larger ``k``.

    Since ``d >= 1``, ``eta_mzi^k eta_c^2`` bounds every ``k``-chip design; the
    scan stops once that bound drops below the best value found.
    """
    _check_eta(eta_mzi=eta_mzi, eta_c=eta_c)
    depths = depths or StageDepths(m, n)
    best: tuple[int, float, int] | None = None
    for k in chip_sizes(m, k_max, stride):
        if best is not None and eta_mzi**k * eta_c**2 < best[1]:
            break
        d = depths(k)
        eta = eta_mzi ** (d * k) * eta_c ** (d + 1)
        if best is None or eta >= best[1]:
            best = (k, eta, d)
    assert best is not None
    return ChipChoice(best[0], best[1], best[2], best[0] == m)


@dataclass(frozen=True)
class IsoPoint:
    eta_mzi: float
    eta_c: float | None  # required coupling transmission, None if unattainable
    k: int | None
    single_chip_eta_c: float | None


@dataclass(frozen=True)
class IsoCurve:
    target: float
    points: tuple[IsoPoint, ...]
    cutoff: float  # eta_mzi below which no eta_c <= 1 reaches the target


def iso_transmission_curve(
    m: int,
    n: int,
    target: float,
    eta_mzi_grid,
    *,
    depths: StageDepths | None = None,
    k_max: int | None = None,
    stride: int = 1,
) -> IsoCurve:
    """Smallest coupling transmission reaching ``target`` at each ``eta_mzi``.

    Chip size ``k`` needs ``eta_c >= (target / eta_mzi^(d k))^(1/(d+1))``; the
    curve takes the minimum over ``k`` (ties to larger ``k``). This is the
    exact solution of ``max_k eta = target``, so no root search is needed.
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target transmission must lie in (0, 1), got {target}")
    depths = depths or StageDepths(m, n)
    ks = chip_sizes(m, k_max, stride)
    points = []
    for x in eta_mzi_grid:
        x = float(x)
        _check_eta(eta_mzi=x)
        best: tuple[float, int] | None = None
        for k in ks:
            # d >= 1 gives eta_c >= sqrt(target) x^(-k/2), growing with k
            if best is not None and math.sqrt(target) * x ** (-k / 2) > best[0]:
                break
            d = depths(k)
            need = (target / x ** (d * k)) ** (1.0 / (d + 1))
            if best is None or need <= best[0]:
                best = (need, k)
        single = math.sqrt(target / x**m)
        ok = best is not None and best[0] <= 1.0
        points.append(
            IsoPoint(x, best[0] if ok else None, best[1] if ok else None, single if single <= 1.0 else None)
        )
    cutoff = None
    for k in ks:
        # target^(1/(d k)) >= target^(1/k), growing with k
        if cutoff is not None and target ** (1.0 / k) > cutoff:
            break
        c = target ** (1.0 / (depths(k) * k))
        cutoff = c if cutoff is None else min(cutoff, c)
    return IsoCurve(target, tuple(points), cutoff)


@dataclass(frozen=True)
class HeatmapRow:
    eta_mzi: float
    eta_c: float
    k_star: int
    eta_star: float


def heatmap(
    m: int,
    n: int,
    eta_mzi_grid,
    eta_c_grid,
    *,
    depths: StageDepths | None = None,
    k_max: int | None = None,
    stride: int = 1,
) -> list[HeatmapRow]:
    """Optimal chip size over a grid, rows ordered by ``eta_mzi`` then ``eta_c``."""
    depths = depths or StageDepths(m, n)
    rows = []
    for x in eta_mzi_grid:
        for y in eta_c_grid:
            ch = optimal_chip_size(m, n, float(x), float(y), depths=depths, k_max=k_max, stride=stride)
            rows.append(HeatmapRow(float(x), float(y), ch.k, ch.eta))
    return rows
