"""``meshc`` command line: synthesis, compilation, coupled designs, depth and loss scans.

Exit codes: 0 success, 1 malformed input or usage, 2 infeasible layout,
3 numerical failure (including a failed ``verify``).
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import io
from .analysis import (
    DepthCache,
    StageDepths,
    depth_sweep,
    heatmap,
    iso_transmission_curve,
    optimal_chip_size,
)
from .circuit import evaluate
from .compiler import Infeasible, compile, shallowest_compile
from .core import check_isometry, check_unitary, haar_random_unitary, random_isometry
from .coupled import NonConvergence, greedy_coupled, greedy_longrange
from .synthesis import synth_boson_sampling, synth_clements, synth_reck

EXIT_OK, EXIT_MALFORMED, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 1, 2, 3
VERIFY_TOL = 1e-8


class UsageError(Exception):
    pass


class VerifyFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1, keeping 2 for infeasible layouts
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(x) for x in r])
    return buf.getvalue()


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return x


def _read_matrix(path):
    return io.load(path, io.matrix_from_json)


def _unitary(path):
    u = _read_matrix(path)
    try:
        return check_unitary(u)
    except ValueError as e:
        raise io.FormatError(str(path), str(e)) from e


def _isometry(path):
    v = _read_matrix(path)
    try:
        return check_isometry(v)
    except ValueError as e:
        raise io.FormatError(str(path), str(e)) from e


def _check_reconstruction(c, target) -> float:
    n = target.shape[1]
    err = float(np.linalg.norm(evaluate(c)[:, :n] - target))
    if err > VERIFY_TOL:
        raise FloatingPointError(f"reconstruction error {err:.3e} exceeds {VERIFY_TOL}")
    return err


# --------------------------------------------------------------------------
# subcommands


def cmd_synth(a):
    u = _unitary(a.unitary)
    c = synth_clements(u) if a.scheme == "clements" else synth_reck(u)
    _check_reconstruction(c, u)
    _emit(io.dumps(io.circuit_to_json(c)), a.output)


def cmd_bs_synth(a):
    v = _isometry(a.isometry)
    c = synth_boson_sampling(v)
    _check_reconstruction(c, v)
    _emit(io.dumps(io.circuit_to_json(c)), a.output)


def cmd_compile(a):
    layout = io.load(a.layout, io.layout_from_json)
    u = _unitary(a.unitary)
    if layout.modes != len(u):
        raise io.FormatError(str(a.layout), f"layout has {layout.modes} modes, unitary has {len(u)}")
    res = shallowest_compile(u, layout)[0] if a.shallowest else compile(u, layout)
    _emit(io.dumps(io.assignment_to_json(res)), a.output)


def cmd_coupled(a):
    v = _isometry(a.isometry)
    if a.longrange:
        _emit(io.dumps(io.circuit_to_json(greedy_longrange(v))), a.output)
        return
    if a.chip_size is None:
        raise UsageError("coupled: --chip-size is required unless --longrange is given")
    if not 2 <= a.chip_size <= v.shape[0]:
        raise UsageError(f"coupled: --chip-size must lie in [2, {v.shape[0]}]")
    cc = greedy_coupled(v, a.chip_size, synthesize=not a.no_synth)
    _emit(io.dumps(io.coupled_to_json(cc)), a.output)


def cmd_depth(a):
    pairs = [(m, n) for m in a.m for n in a.n]
    for m, n in pairs:
        if not 1 <= n <= m:
            raise UsageError(f"depth: need 1 <= n <= m, got m={m}, n={n}")
        if a.bound in ("analytic", "all") and m < 3:
            raise UsageError(f"depth: the analytic bound needs m >= 3, got m={m}")
    rows = depth_sweep(pairs)
    cols = {"exact": "k_exact", "ineq": "k_ineq", "analytic": "k_analytic"}
    if a.bound != "all" and len(rows) == 1 and not a.output:
        print(getattr(rows[0], cols[a.bound]))
        return
    names = list(cols) if a.bound == "all" else [a.bound]
    header = ["m", "n"] + [f"K_{b}" for b in names]
    body = [[r.m, r.n] + [getattr(r, cols[b]) for b in names] for r in rows]
    _emit(_csv(header, body), a.output)


def _grid(spec: str):
    try:
        lo, hi, count = spec.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError as e:
        raise UsageError(f"bad grid {spec!r}; expected LO:HI:COUNT") from e
    if count < 1 or not 0 < lo <= hi <= 1:
        raise UsageError(f"bad grid {spec!r}; need 0 < LO <= HI <= 1 and COUNT >= 1")
    return [float(x) for x in np.linspace(lo, hi, count)]


def cmd_transmission(a):
    if not 1 <= a.n <= a.m:
        raise UsageError(f"transmission: need 1 <= n <= m, got m={a.m}, n={a.n}")
    cache = DepthCache()
    depths = StageDepths(a.m, a.n, cache)
    scan = {"depths": depths, "k_max": a.k_max, "stride": a.stride}
    try:
        if a.heatmap:
            parts = a.heatmap.split(",")
            gx = _grid(parts[0])
            gy = _grid(parts[1]) if len(parts) > 1 else gx
            rows = heatmap(a.m, a.n, gx, gy, **scan)
            out = _csv(["eta_mzi", "eta_c", "k_star", "eta_star"], [[r.eta_mzi, r.eta_c, r.k_star, r.eta_star] for r in rows])
        elif a.iso_curve is not None:
            if not 0 < a.iso_curve < 1:
                raise UsageError("transmission: --iso-curve target must lie in (0, 1)")
            curve = iso_transmission_curve(a.m, a.n, a.iso_curve, _grid(a.grid), **scan)
            body = [[p.eta_mzi, p.eta_c, p.k, p.single_chip_eta_c] for p in curve.points]
            out = _csv(["eta_mzi", "eta_c_required", "k_star", "eta_c_single_chip"], body)
            print(f"# cutoff eta_mzi = {curve.cutoff!r}", file=sys.stderr)
        else:
            if a.eta_mzi is None or a.eta_c is None:
                raise UsageError("transmission: give --eta-mzi and --eta-c, --heatmap, or --iso-curve")
            for name in ("eta_mzi", "eta_c"):
                if not 0 < getattr(a, name) <= 1:
                    raise UsageError(f"transmission: --{name.replace('_', '-')} must lie in (0, 1]")
            ch = optimal_chip_size(a.m, a.n, a.eta_mzi, a.eta_c, **scan)
            out = _csv(
                ["m", "n", "eta_mzi", "eta_c", "k_star", "d", "eta_star", "eta_n_photons", "single_chip"],
                [[a.m, a.n, a.eta_mzi, a.eta_c, ch.k, ch.d, ch.eta, ch.eta**a.n, int(ch.single_chip)]],
            )
    finally:
        cache.save()
    _emit(out, a.output)


def cmd_random(a):
    if a.m < 1:
        raise UsageError("random: --m must be >= 1")
    if a.n is None:
        mat = haar_random_unitary(a.m, a.seed)
    else:
        if not 1 <= a.n <= a.m:
            raise UsageError(f"random: need 1 <= n <= m, got m={a.m}, n={a.n}")
        mat = random_isometry(a.m, a.n, a.seed)
    _emit(io.dumps(io.matrix_to_json(mat)), a.output)


def cmd_verify(a):
    c = io.load(a.circuit, io.circuit_from_json)
    target = _read_matrix(a.unitary)
    if target.shape[0] != c.modes or target.shape[1] > c.modes:
        raise io.FormatError(str(a.unitary), f"shape {target.shape} does not fit a {c.modes}-mode circuit")
    err = float(np.linalg.norm(evaluate(c)[:, : target.shape[1]] - target))
    ok = err <= a.tol
    print(json.dumps({"error": err, "columns": int(target.shape[1]), "tolerance": a.tol, "ok": ok}))
    if not ok:
        raise VerifyFailed(f"reconstruction error {err:.3e} exceeds {a.tol}")


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="meshc", description=__doc__.splitlines()[0])
    p.add_argument("--json-errors", action="store_true", help="report errors on stderr as JSON lines")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="synthesize a unitary on a universal mesh")
    s.add_argument("--scheme", choices=["clements", "reck"], default="clements")
    s.add_argument("--unitary", required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("bs-synth", help="synthesize an isometry on the partial mesh")
    s.add_argument("--isometry", required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_bs_synth)

    s = sub.add_parser("compile", help="angles for a unitary on a given layout")
    s.add_argument("--layout", required=True)
    s.add_argument("--unitary", required=True)
    s.add_argument("--shallowest", action="store_true", help="use the fewest leading layers")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_compile)

    s = sub.add_parser("coupled", help="greedy coupled-chip design for an isometry")
    s.add_argument("--isometry", required=True)
    s.add_argument("--chip-size", type=int)
    s.add_argument("--longrange", action="store_true", help="long-range MZI variant instead of chips")
    s.add_argument("--no-synth", action="store_true", help="omit per-chip mesh circuits")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_coupled)

    s = sub.add_parser("depth", help="long-range elimination depth and its bounds")
    s.add_argument("--m", type=int, nargs="+", required=True)
    s.add_argument("--n", type=int, nargs="+", required=True)
    s.add_argument("--bound", choices=["ineq", "analytic", "exact", "all"], default="all")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_depth)

    s = sub.add_parser("transmission", help="optimal chip size, heatmaps and iso-transmission curves")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--eta-mzi", type=float)
    s.add_argument("--eta-c", type=float)
    s.add_argument("--heatmap", metavar="GRIDSPEC", help="LO:HI:COUNT[,LO:HI:COUNT] for eta_mzi[,eta_c]")
    s.add_argument("--iso-curve", type=float, metavar="TARGET")
    s.add_argument("--grid", default="0.9:1:101", help="eta_mzi grid for --iso-curve (LO:HI:COUNT)")
    s.add_argument("--k-max", type=int, help="largest chip size scanned (the single chip is always included)")
    s.add_argument("--stride", type=int, default=1)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_transmission)

    s = sub.add_parser("random", help="Haar-random unitary or isometry")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_random)

    s = sub.add_parser("verify", help="compare a circuit against a matrix")
    s.add_argument("--circuit", required=True)
    s.add_argument("--unitary", required=True, help="unitary, or isometry for its first columns")
    s.add_argument("--tol", type=float, default=VERIFY_TOL)
    s.set_defaults(func=cmd_verify)
    return p


@dataclass
class _Failure:
    code: int
    kind: str
    message: str
    extra: dict


def _classify(e: Exception) -> _Failure:
    if isinstance(e, Infeasible):
        extra = {"residual": list(e.residual), "blocking_pair": e.blocking_pair and list(e.blocking_pair)}
        return _Failure(EXIT_INFEASIBLE, "infeasible", str(e), extra)
    if isinstance(e, io.FormatError):
        return _Failure(EXIT_MALFORMED, "malformed", str(e), {"where": e.where})
    if isinstance(e, UsageError):
        return _Failure(EXIT_MALFORMED, "usage", str(e), {})
    if isinstance(e, (VerifyFailed, FloatingPointError, np.linalg.LinAlgError, NonConvergence, ArithmeticError)):
        return _Failure(EXIT_NUMERIC, "numeric", str(e), {})
    if isinstance(e, ValueError):
        return _Failure(EXIT_MALFORMED, "malformed", str(e), {})
    raise e


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    json_errors = "--json-errors" in argv
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
        return EXIT_OK
    except Exception as e:  # mapped to exit codes; unknown errors re-raise
        f = _classify(e)
        if json_errors:
            print(json.dumps({"error": f.kind, "exit": f.code, "message": f.message, **f.extra}), file=sys.stderr)
        else:
            print(f"meshc: {f.kind}: {f.message}", file=sys.stderr)
        return f.code


if __name__ == "__main__":
    sys.exit(main())
