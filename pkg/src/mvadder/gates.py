"""Behavioral gate primitive library.

Each primitive bundles a logic function, an electrical model (lumped-RC
delay, switched-capacitance energy) and a transistor inventory used only
for the diameter-sum area metric. Gate internals are behavioral: the
inventory declares what a transmission-gate realization would cost, it is
not a switch-level netlist.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

from .levels import DomainError, Level, SignalEncoding

# Chirality index -> nanotube diameter (nm). Diameter sets the device
# threshold, so threshold detectors and successor circuits need specific
# entries from this table; everything else defaults to n=19.
DIAMETER_NM: dict[int, float] = {
    8: 0.626,
    10: 0.783,
    13: 1.017,
    19: 1.487,
    29: 2.270,
    37: 2.896,
}

#: Reference supply at which drive_resistance_ref is specified.
V_REF = 0.9


class LibraryError(ValueError):
    """Malformed cell library or unknown inventory entry."""


class NonFunctionalGateError(ValueError):
    """Gate biased below threshold: it cannot switch at all."""


@dataclass(frozen=True)
class TransistorInventory:
    """Multiset of (device_type, chirality, count) transistor entries."""

    entries: tuple[tuple[str, int, int], ...]

    def __post_init__(self):
        for dev, n, count in self.entries:
            if dev not in ("N", "P"):
                raise LibraryError(f"device type must be N or P, got {dev!r}")
            if count < 1:
                raise LibraryError(f"count must be >= 1, got {count}")
            if int(n) < 1:
                raise LibraryError(f"chirality must be positive, got {n}")

    @property
    def total_count(self) -> int:
        return sum(c for _, _, c in self.entries)

    def __add__(self, other: "TransistorInventory") -> "TransistorInventory":
        return TransistorInventory(self.entries + other.entries)


def inventory_area(inv: TransistorInventory) -> float:
    """Sum of transistor diameters (nm); additive over concatenation."""
    total = 0.0
    for _, n, count in inv.entries:
        try:
            total += count * DIAMETER_NM[n]
        except KeyError:
            raise LibraryError(f"chirality {n} not in the diameter table") from None
    return total


@dataclass(frozen=True)
class ElectricalParams:
    """Per-gate electrical model parameters.

    ``supply_voltage`` is per gate, not global: reduced-swing carry
    inverters run from a lower rail than the rest of their cell.
    """

    supply_voltage: float
    input_cap_per_pin: float
    drive_resistance_ref: float
    intrinsic_delay: float
    threshold_voltage: float
    output_encoding: SignalEncoding

    def __post_init__(self):
        for field in ("supply_voltage", "input_cap_per_pin", "drive_resistance_ref",
                      "intrinsic_delay", "threshold_voltage"):
            if getattr(self, field) <= 0:
                raise DomainError(f"{field} must be > 0")


# Gate kinds. det{k}: inverting threshold detector plus buffered
# complement; succ{k}: (in + k) mod 4; the rest are conventional.
KINDS = (
    "det1", "det2", "det3",
    "succ1", "succ2", "succ3",
    "mux4", "mux2",
    "inv", "buf", "nand", "nor", "xor_tg", "maj3",
)

_INPUT_PINS: dict[str, tuple[str, ...]] = {
    "mux4": ("d0", "d1", "d2", "d3", "sel"),
    "mux2": ("d0", "d1", "sel"),
    "nand": ("a", "b"),
    "nor": ("a", "b"),
    "xor_tg": ("a", "b"),
    "maj3": ("a", "b", "c"),
}
for _k in ("det1", "det2", "det3", "succ1", "succ2", "succ3", "inv", "buf"):
    _INPUT_PINS[_k] = ("a",)

# det/xor_tg expose a complementary second output ("yb"): the detector's
# buffered complement rail, and the dual rail a transmission-gate XOR
# produces for free.
_OUTPUT_PINS: dict[str, tuple[str, ...]] = {k: ("y",) for k in KINDS}
for _k in ("det1", "det2", "det3", "xor_tg"):
    _OUTPUT_PINS[_k] = ("y", "yb")


def input_pins(kind: str) -> tuple[str, ...]:
    return _INPUT_PINS[kind]


def output_pins(kind: str) -> tuple[str, ...]:
    return _OUTPUT_PINS[kind]


@dataclass(frozen=True)
class GatePrimitive:
    kind: str
    params: ElectricalParams
    inventory: TransistorInventory

    def __post_init__(self):
        if self.kind not in KINDS:
            raise LibraryError(f"unknown gate kind {self.kind!r}")

    @property
    def input_pins(self) -> tuple[str, ...]:
        return _INPUT_PINS[self.kind]

    @property
    def output_pins(self) -> tuple[str, ...]:
        return _OUTPUT_PINS[self.kind]


_X = Level.X


def _bit(name: str, v: Level) -> int:
    if v not in (Level.L0, Level.L1):
        raise DomainError(f"{name} must be binary 0/1, got {v}")
    return int(v)


def eval_primitive(kind: str, inputs: Sequence[Level]) -> tuple[Level, ...]:
    """Evaluate one gate on logical levels.

    X propagates only when it can influence the result: an X on an
    unselected MUX data input does not poison the output, and a
    controlling 0/1 on NAND/NOR/MAJ3 decides the output regardless of X
    elsewhere.
    """
    if kind not in KINDS:
        raise DomainError(f"unknown gate kind {kind!r}")
    ins = [Level(v) for v in inputs]
    if len(ins) != len(_INPUT_PINS[kind]):
        raise DomainError(
            f"{kind} takes {len(_INPUT_PINS[kind])} inputs, got {len(ins)}"
        )

    if kind.startswith("det"):
        k = int(kind[3])
        v = ins[0]
        if v is _X:
            return (_X, _X)
        low = Level.L1 if int(v) < k else Level.L0
        return (low, Level(1 - int(low)))

    if kind.startswith("succ"):
        k = int(kind[4])
        v = ins[0]
        if v is _X:
            return (_X,)
        return (Level((int(v) + k) % 4),)

    if kind == "mux4":
        sel = ins[4]
        if sel is _X:
            return (_X,)
        return (ins[int(sel)],)

    if kind == "mux2":
        sel = ins[2]
        if sel is _X:
            return (_X,)
        return (ins[_bit("sel", sel)],)

    if kind == "inv":
        v = ins[0]
        if v is _X:
            return (_X,)
        return (Level(1 - _bit("in", v)),)

    if kind == "buf":
        v = ins[0]
        if v is _X:
            return (_X,)
        return (Level(_bit("in", v)),)

    if kind == "nand":
        bits = [None if v is _X else _bit("in", v) for v in ins]
        if 0 in bits:
            return (Level.L1,)
        if None in bits:
            return (_X,)
        return (Level.L0,)

    if kind == "nor":
        bits = [None if v is _X else _bit("in", v) for v in ins]
        if 1 in bits:
            return (Level.L0,)
        if None in bits:
            return (_X,)
        return (Level.L1,)

    if kind == "xor_tg":
        if _X in ins:
            return (_X, _X)
        y = _bit("a", ins[0]) ^ _bit("b", ins[1])
        return (Level(y), Level(1 - y))

    if kind == "maj3":
        bits = [None if v is _X else _bit("in", v) for v in ins]
        if bits.count(1) >= 2:
            return (Level.L1,)
        if bits.count(0) >= 2:
            return (Level.L0,)
        return (_X,)

    raise AssertionError(kind)


def propagation_delay(gate: GatePrimitive, load_cap: float) -> float:
    """Lumped-RC gate delay in seconds for a given output load.

    The drive resistance is referenced at V_REF and scales with gate
    overdrive, so a reduced supply slows the gate:
    R_eff = R_ref * (V_REF - V_th) / (V_supply - V_th).
    """
    if load_cap < 0:
        raise DomainError("load_cap must be >= 0")
    p = gate.params
    if p.supply_voltage <= p.threshold_voltage:
        raise NonFunctionalGateError(
            f"{gate.kind}: supply {p.supply_voltage} V at or below threshold "
            f"{p.threshold_voltage} V"
        )
    r_eff = p.drive_resistance_ref * (V_REF - p.threshold_voltage) / (
        p.supply_voltage - p.threshold_voltage
    )
    return p.intrinsic_delay + r_eff * load_cap


def switching_energy(node_cap: float, v_from: float, v_to: float) -> float:
    """Energy charged to the ledger for one transition: C*(dV)^2/2.

    Symmetric in direction; both edges of a pulse are counted.
    """
    if node_cap < 0:
        raise DomainError("node_cap must be >= 0")
    dv = v_to - v_from
    return 0.5 * node_cap * dv * dv


# --------------------------------------------------------------------------
# Cell library: per-kind electrical parameters and inventories, overridable
# from a JSON file.

_E = lambda entries: TransistorInventory(tuple(entries))  # noqa: E731

# Default inventories. Detector and successor cells mix chiralities (their
# thresholds are diameter-set); multiplexers are transmission-gate trees at
# n=13/19. The mix is calibrated so a full quaternary adder lands near 4x
# the diameter sum of a pair of 14T binary adders.
DEFAULT_INVENTORIES: dict[str, TransistorInventory] = {
    "inv": _E([("N", 19, 1), ("P", 19, 1)]),
    "buf": _E([("N", 19, 2), ("P", 19, 2)]),
    "nand": _E([("N", 19, 2), ("P", 19, 2)]),
    "nor": _E([("N", 19, 2), ("P", 19, 2)]),
    "xor_tg": _E([("N", 19, 3), ("P", 19, 3)]),
    "maj3": _E([("N", 19, 5), ("P", 19, 5)]),
    "mux2": _E([("N", 19, 3), ("P", 19, 3)]),
    "mux4": _E([("N", 13, 8), ("P", 13, 8), ("N", 19, 1), ("P", 19, 1)]),
    "det1": _E([("N", 37, 1), ("P", 37, 1), ("N", 29, 2), ("P", 29, 2)]),
    "det2": _E([("N", 29, 1), ("P", 29, 1), ("N", 29, 2), ("P", 29, 2)]),
    "det3": _E([("N", 10, 1), ("P", 10, 1), ("N", 29, 2), ("P", 29, 2)]),
    "succ1": _E([("N", 13, 2), ("P", 29, 2), ("N", 19, 2), ("P", 19, 2)]),
    "succ2": _E([("N", 10, 2), ("P", 37, 2), ("N", 19, 2), ("P", 19, 2)]),
    "succ3": _E([("N", 8, 2), ("P", 29, 2), ("N", 19, 2), ("P", 19, 2)]),
}

DEFAULT_INPUT_CAP_F = 0.2e-15
DEFAULT_DRIVE_RESISTANCE_OHM = 10e3
DEFAULT_INTRINSIC_DELAY_S = 1e-12
DEFAULT_THRESHOLD_V = 0.2


@dataclass(frozen=True)
class CellSpec:
    """Supply-independent part of a primitive's model."""

    input_cap_per_pin: float
    drive_resistance_ref: float
    intrinsic_delay: float
    threshold_voltage: float
    inventory: TransistorInventory


class CellLibrary:
    """Per-kind :class:`CellSpec` table used by the circuit generators."""

    def __init__(self, cells: Mapping[str, CellSpec]):
        missing = [k for k in KINDS if k not in cells]
        if missing:
            raise LibraryError(f"library missing kinds: {missing}")
        self.cells = dict(cells)

    @classmethod
    def default(cls) -> "CellLibrary":
        return cls({
            kind: CellSpec(
                input_cap_per_pin=DEFAULT_INPUT_CAP_F,
                drive_resistance_ref=DEFAULT_DRIVE_RESISTANCE_OHM,
                intrinsic_delay=DEFAULT_INTRINSIC_DELAY_S,
                threshold_voltage=DEFAULT_THRESHOLD_V,
                inventory=DEFAULT_INVENTORIES[kind],
            )
            for kind in KINDS
        })

    def make_primitive(
        self,
        kind: str,
        supply_voltage: float,
        output_encoding: SignalEncoding,
        inventory: TransistorInventory | None = None,
    ) -> GatePrimitive:
        spec = self.cells[kind]
        params = ElectricalParams(
            supply_voltage=supply_voltage,
            input_cap_per_pin=spec.input_cap_per_pin,
            drive_resistance_ref=spec.drive_resistance_ref,
            intrinsic_delay=spec.intrinsic_delay,
            threshold_voltage=spec.threshold_voltage,
            output_encoding=output_encoding,
        )
        return GatePrimitive(kind, params, inventory or spec.inventory)


_LIB_FIELDS = {
    "input_cap_per_pin_f",
    "drive_resistance_ohm",
    "intrinsic_delay_s",
    "threshold_voltage_v",
    "inventory",
}


def _parse_inventory(raw) -> TransistorInventory:
    entries = []
    for item in raw:
        if not (isinstance(item, (list, tuple)) and len(item) == 3):
            raise LibraryError(f"inventory entry must be [device, chirality, count]: {item!r}")
        dev, n, count = item
        entries.append((str(dev), int(n), int(count)))
    inv = TransistorInventory(tuple(entries))
    inventory_area(inv)  # reject unknown chiralities up front
    return inv


def load_library(path: str | Path) -> CellLibrary:
    """Load a cell library JSON file of per-kind overrides.

    Schema: ``{kind: {input_cap_per_pin_f, drive_resistance_ohm,
    intrinsic_delay_s, threshold_voltage_v, inventory}}`` where
    ``inventory`` is a list of ``[device, chirality, count]`` triples.
    Unknown kinds or fields are rejected.
    """
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise LibraryError("library file must be a JSON object keyed by gate kind")
    lib = CellLibrary.default()
    for kind, fields in raw.items():
        if kind not in KINDS:
            raise LibraryError(f"unknown gate kind {kind!r} in library file")
        if not isinstance(fields, dict):
            raise LibraryError(f"{kind}: overrides must be a JSON object")
        unknown = set(fields) - _LIB_FIELDS
        if unknown:
            raise LibraryError(f"{kind}: unknown library keys {sorted(unknown)}")
        spec = lib.cells[kind]
        kwargs = {}
        if "input_cap_per_pin_f" in fields:
            kwargs["input_cap_per_pin"] = float(fields["input_cap_per_pin_f"])
        if "drive_resistance_ohm" in fields:
            kwargs["drive_resistance_ref"] = float(fields["drive_resistance_ohm"])
        if "intrinsic_delay_s" in fields:
            kwargs["intrinsic_delay"] = float(fields["intrinsic_delay_s"])
        if "threshold_voltage_v" in fields:
            kwargs["threshold_voltage"] = float(fields["threshold_voltage_v"])
        if "inventory" in fields:
            kwargs["inventory"] = _parse_inventory(fields["inventory"])
        lib.cells[kind] = replace(spec, **kwargs)
    return lib
