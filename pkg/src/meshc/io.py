"""JSON encodings of matrices, circuits, layouts, angle assignments and coupled devices.

Floats are written with Python's shortest round-trip ``repr``, so every
document re-parses to bit-identical values and equal inputs give equal bytes.
Parse errors carry a path such as ``elements[3].modes[1]``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .circuit import MZI, ChipBlock, ChipLayout, Circuit, Coupling, PhaseShifter
from .compiler import AngleAssignment, SlotAngles
from .coupled import Block, CoupledCircuit, Stage


class FormatError(ValueError):
    """Malformed input document; ``where`` locates the offending field."""

    def __init__(self, where: str, message: str):
        self.where = where
        self.message = message
        super().__init__(f"{where}: {message}" if where else message)


def dumps(obj) -> str:
    return json.dumps(obj, allow_nan=False) + "\n"


def read_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise FormatError(str(path), f"cannot read file ({e.strerror})") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}:{e.lineno}:{e.colno}", e.msg) from e


def load(path, parse):
    """Read ``path`` and decode it with ``parse``; errors name the file."""
    obj = read_json(path)
    try:
        return parse(obj)
    except FormatError as e:
        where = f"{path}: {e.where}" if e.where else str(path)
        raise FormatError(where, e.message) from e


# --------------------------------------------------------------------------
# field helpers


def _get(obj, key, where):
    if not isinstance(obj, dict):
        raise FormatError(where, f"expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise FormatError(where, f"missing key {key!r}")
    return obj[key]


def _sub(where, key):
    return f"{where}.{key}" if where else key


def _int(x, where, lo=None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise FormatError(where, f"expected an integer, got {x!r}")
    if lo is not None and x < lo:
        raise FormatError(where, f"expected an integer >= {lo}, got {x}")
    return x


def _float(x, where) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise FormatError(where, f"expected a number, got {x!r}")
    if not math.isfinite(x):
        raise FormatError(where, "number is not finite")
    return float(x)


def _bool(x, where) -> bool:
    if not isinstance(x, bool):
        raise FormatError(where, f"expected true/false, got {x!r}")
    return x


def _list(x, where) -> list:
    if not isinstance(x, list):
        raise FormatError(where, f"expected an array, got {type(x).__name__}")
    return x


def _ints(x, where) -> tuple[int, ...]:
    return tuple(_int(v, f"{where}[{i}]", 0) for i, v in enumerate(_list(x, where)))


def _floats(x, where) -> tuple[float, ...]:
    return tuple(_float(v, f"{where}[{i}]") for i, v in enumerate(_list(x, where)))


def _build(where, fn, *args):
    # domain validation errors become location-bearing format errors
    try:
        return fn(*args)
    except (ValueError, IndexError) as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(where, str(e)) from e


# --------------------------------------------------------------------------
# matrix


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[[float(z.real), float(z.imag)] for z in row] for row in a],
    }


def matrix_from_json(obj, where: str = "") -> np.ndarray:
    rows = _int(_get(obj, "rows", where), _sub(where, "rows"), 1)
    cols = _int(_get(obj, "cols", where), _sub(where, "cols"), 1)
    data = _list(_get(obj, "data", where), _sub(where, "data"))
    w = _sub(where, "data")
    if len(data) != rows:
        raise FormatError(w, f"expected {rows} rows, got {len(data)}")
    out = np.empty((rows, cols), dtype=complex)
    for i, row in enumerate(data):
        row = _list(row, f"{w}[{i}]")
        if len(row) != cols:
            raise FormatError(f"{w}[{i}]", f"ragged row: expected {cols} entries, got {len(row)}")
        for j, z in enumerate(row):
            loc = f"{w}[{i}][{j}]"
            z = _list(z, loc)
            if len(z) != 2:
                raise FormatError(loc, "complex entry must be [re, im]")
            out[i, j] = complex(_float(z[0], loc + "[0]"), _float(z[1], loc + "[1]"))
    return out


# --------------------------------------------------------------------------
# circuit


def circuit_to_json(c: Circuit) -> dict:
    return {"modes": c.modes, "elements": [_element_to_json(el) for el in c.elements]}


def _element_to_json(el) -> dict:
    if isinstance(el, MZI):
        out = {"kind": "mzi", "modes": list(el.modes), "theta": el.theta, "phi": el.phi, "active": el.active}
        if el.adjoint:
            out["adjoint"] = True
        return out
    if isinstance(el, PhaseShifter):
        return {"kind": "phase", "mode": el.mode, "phi": el.phi}
    if isinstance(el, Coupling):
        return {"kind": "coupling", "perm": list(el.perm)}
    if isinstance(el, ChipBlock):
        return {"kind": "block", "modes": list(el.modes), "circuit": circuit_to_json(el.circuit)}
    raise TypeError(f"unknown element {el!r}")


def circuit_from_json(obj, where: str = "") -> Circuit:
    modes = _int(_get(obj, "modes", where), _sub(where, "modes"), 1)
    items = _list(_get(obj, "elements", where), _sub(where, "elements"))
    els = []
    for i, item in enumerate(items):
        loc = f"{_sub(where, 'elements')}[{i}]"
        el = _element_from_json(item, loc)
        _build(loc, Circuit, modes, [el])
        els.append(el)
    return Circuit(modes, els)


def _element_from_json(obj, where: str):
    kind = _get(obj, "kind", where)
    if kind == "mzi":
        pair = _ints(_get(obj, "modes", where), _sub(where, "modes"))
        if len(pair) != 2:
            raise FormatError(_sub(where, "modes"), "an MZI needs exactly two modes")
        return MZI(
            pair,
            _float(_get(obj, "theta", where), _sub(where, "theta")),
            _float(_get(obj, "phi", where), _sub(where, "phi")),
            _bool(obj.get("active", True), _sub(where, "active")),
            _bool(obj.get("adjoint", False), _sub(where, "adjoint")),
        )
    if kind == "phase":
        return PhaseShifter(
            _int(_get(obj, "mode", where), _sub(where, "mode"), 0),
            _float(_get(obj, "phi", where), _sub(where, "phi")),
        )
    if kind == "coupling":
        return Coupling(_ints(_get(obj, "perm", where), _sub(where, "perm")))
    if kind == "block":
        modes = _ints(_get(obj, "modes", where), _sub(where, "modes"))
        inner = circuit_from_json(_get(obj, "circuit", where), _sub(where, "circuit"))
        return ChipBlock(modes, inner)
    raise FormatError(_sub(where, "kind"), f"unknown element kind {kind!r}")


# --------------------------------------------------------------------------
# layout and angle assignment


def layout_to_json(layout: ChipLayout) -> dict:
    return {
        "modes": layout.modes,
        "layers": [[list(p) for p in layer] for layer in layout.layers],
        "terminal_phase_layer": layout.terminal_phase_layer,
    }


def layout_from_json(obj, where: str = "") -> ChipLayout:
    modes = _int(_get(obj, "modes", where), _sub(where, "modes"), 1)
    raw = _list(_get(obj, "layers", where), _sub(where, "layers"))
    layers = []
    for d, layer in enumerate(raw):
        loc = f"{_sub(where, 'layers')}[{d}]"
        pairs = []
        for t, pair in enumerate(_list(layer, loc)):
            pair = _ints(pair, f"{loc}[{t}]")
            if len(pair) != 2:
                raise FormatError(f"{loc}[{t}]", "a slot needs exactly two modes")
            pairs.append(pair)
        layers.append(pairs)
    tpl = _bool(obj.get("terminal_phase_layer", True), _sub(where, "terminal_phase_layer"))
    return _build(where or "layout", ChipLayout, modes, layers, tpl)


def assignment_to_json(a: AngleAssignment) -> dict:
    out = {
        "modes": a.modes,
        "slots": [
            {"layer": s.layer, "modes": list(s.modes), "theta": s.theta, "phi": s.phi, "active": s.active}
            for s in a.slots
        ],
        "terminal_phases": None if a.terminal_phases is None else list(a.terminal_phases),
        "used_depth": a.used_depth,
    }
    if a.up_to_output_phases:
        out["output_phases"] = list(a.output_phases)
    return out


def assignment_from_json(obj, where: str = "") -> AngleAssignment:
    modes = _int(_get(obj, "modes", where), _sub(where, "modes"), 1)
    slots = []
    for i, s in enumerate(_list(_get(obj, "slots", where), _sub(where, "slots"))):
        loc = f"{_sub(where, 'slots')}[{i}]"
        pair = _ints(_get(s, "modes", loc), _sub(loc, "modes"))
        if len(pair) != 2:
            raise FormatError(_sub(loc, "modes"), "a slot needs exactly two modes")
        slots.append(
            SlotAngles(
                _int(_get(s, "layer", loc), _sub(loc, "layer"), 0),
                pair,
                _float(_get(s, "theta", loc), _sub(loc, "theta")),
                _float(_get(s, "phi", loc), _sub(loc, "phi")),
                _bool(_get(s, "active", loc), _sub(loc, "active")),
            )
        )
    tp = _get(obj, "terminal_phases", where)
    terminal = None if tp is None else _floats(tp, _sub(where, "terminal_phases"))
    used = _int(_get(obj, "used_depth", where), _sub(where, "used_depth"), 0)
    if "output_phases" in obj:
        return AngleAssignment(
            modes, tuple(slots), used, terminal, _floats(obj["output_phases"], _sub(where, "output_phases")), True
        )
    return AngleAssignment(modes, tuple(slots), used, terminal)


# --------------------------------------------------------------------------
# coupled device


def coupled_to_json(cc: CoupledCircuit) -> dict:
    return {
        "modes": cc.modes,
        "photons": cc.photons,
        "chip_size": cc.chip_size,
        "input_phases": list(cc.input_phases),
        "stages": [
            {
                "coupling": list(st.coupling),
                "blocks": [
                    {
                        "modes": list(b.modes),
                        "unitary": matrix_to_json(b.unitary),
                        "circuit": None if b.circuit is None else circuit_to_json(b.circuit),
                    }
                    for b in st.blocks
                ],
            }
            for st in cc.stages
        ],
        "output_coupling": list(cc.output_coupling),
    }


def coupled_from_json(obj, where: str = "") -> CoupledCircuit:
    modes = _int(_get(obj, "modes", where), _sub(where, "modes"), 1)
    photons = _int(_get(obj, "photons", where), _sub(where, "photons"), 1)
    k = _int(obj.get("chip_size", 0), _sub(where, "chip_size"), 0)
    phases = _floats(_get(obj, "input_phases", where), _sub(where, "input_phases"))
    stages = []
    for s, st in enumerate(_list(_get(obj, "stages", where), _sub(where, "stages"))):
        loc = f"{_sub(where, 'stages')}[{s}]"
        coupling = _ints(_get(st, "coupling", loc), _sub(loc, "coupling"))
        _build(_sub(loc, "coupling"), Circuit, modes, [Coupling(coupling)])
        blocks = []
        for b, blk in enumerate(_list(_get(st, "blocks", loc), _sub(loc, "blocks"))):
            bl = f"{_sub(loc, 'blocks')}[{b}]"
            bmodes = _ints(_get(blk, "modes", bl), _sub(bl, "modes"))
            u = matrix_from_json(_get(blk, "unitary", bl), _sub(bl, "unitary"))
            if u.shape != (len(bmodes), len(bmodes)):
                raise FormatError(_sub(bl, "unitary"), f"shape {u.shape} does not match {len(bmodes)} modes")
            c = blk.get("circuit")
            circ = None if c is None else circuit_from_json(c, _sub(bl, "circuit"))
            blocks.append(Block(bmodes, u, circ))
        stages.append(Stage(coupling, tuple(blocks)))
    out = _ints(_get(obj, "output_coupling", where), _sub(where, "output_coupling"))
    _build(_sub(where, "output_coupling"), Circuit, modes, [Coupling(out)])
    return CoupledCircuit(modes, photons, phases, tuple(stages), out, k)
