"""Deterministic event-driven simulation and measurement helpers.

All nets start at X. A settle phase applies the stimulus's initial levels
and runs to quiescence; stimulus events then play out in a measurement
window whose time origin sits one nanosecond after the settle finished.
Settle energy is kept in the ledger but reported separately so it never
contaminates power comparisons.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernel
from ._kernel import TICK_PS, compile_circuit
from .levels import DomainError, Level
from .netlist import Circuit, validate

#: Quiet gap inserted between settle quiescence and the stimulus origin.
SETTLE_GAP_TICKS = 10_000  # 1 ns

_MAX_EVENTS_PER_NET = 10_000


class StimulusError(ValueError):
    """Stimulus inconsistent with the circuit's input ports."""


class SimulationTimeoutError(RuntimeError):
    """Circuit failed to reach quiescence within the stimulus duration."""


class UnsettledOutputError(RuntimeError):
    """An output port was still X after the settle phase."""


@dataclass(frozen=True)
class Stimulus:
    """Initial input levels plus timed input events.

    ``events`` entries are (time_ps, port, level) with time measured from
    the stimulus origin (after settle). ``duration_ps`` bounds the
    measurement window; the circuit must be quiescent again by then.
    """

    initial: dict
    events: tuple = ()
    duration_ps: float = 1000.0

    def to_json(self) -> dict:
        return {
            "initial": {p: int(l) for p, l in self.initial.items()},
            "events": [[float(t), p, int(l)] for t, p, l in self.events],
            "duration_ps": float(self.duration_ps),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Stimulus":
        return cls(
            initial={p: Level(int(l)) for p, l in data["initial"].items()},
            events=tuple((float(t), p, Level(int(l))) for t, p, l in data["events"]),
            duration_ps=float(data["duration_ps"]),
        )

    @classmethod
    def load(cls, path: str | Path) -> "Stimulus":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def save(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)


@dataclass
class Trace:
    """Time-ordered transition record plus the per-transition energy ledger.

    ``times`` are absolute ticks (settle included); ``origin_ticks`` marks
    the stimulus origin. ``srcs`` distinguishes externally driven input
    transitions (1, zero energy) from gate-driven ones (0).
    """

    circuit: Circuit
    times: np.ndarray
    nets: np.ndarray
    levels: np.ndarray
    energies: np.ndarray
    srcs: np.ndarray
    origin_ticks: int
    n_settle: int
    duration_ticks: int
    stim_events: tuple  # (abs_ticks, port, level), sorted
    final_levels: np.ndarray
    _compiled: object = field(repr=False, default=None)

    @property
    def total_energy(self) -> float:
        return float(self.energies.sum())

    @property
    def settle_energy(self) -> float:
        return float(self.energies[: self.n_settle].sum())

    @property
    def measurement_energy(self) -> float:
        return float(self.energies[self.n_settle:].sum())

    def net_index(self, name: str) -> int:
        comp = self._compiled
        if name in self.circuit.ports:
            name = self.circuit.ports[name].net
        if name not in comp.net_index:
            raise DomainError(f"unknown net or port {name!r}")
        return comp.net_index[name]

    def waveform(self, name: str) -> list:
        """[(time_ps, Level, voltage)] for a net or port, settle included."""
        ni = self.net_index(name)
        comp = self._compiled
        mask = self.nets == ni
        out = []
        for t, lvl in zip(self.times[mask], self.levels[mask]):
            v = float(comp.net_volt[ni, lvl]) if lvl >= 0 else float("nan")
            out.append((float(t) * TICK_PS, Level(int(lvl)), v))
        return out

    def final_level(self, port: str) -> Level:
        return Level(int(self.final_levels[self.net_index(port)]))

    def transition_count(self, name: str, measurement_only: bool = True) -> int:
        ni = self.net_index(name)
        lo = self.n_settle if measurement_only else 0
        return int((self.nets[lo:] == ni).sum())

    def write_csv(self, path: str | Path) -> None:
        comp = self._compiled
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time_ps", "net", "level", "voltage"])
            for t, n, l in zip(self.times, self.nets, self.levels):
                volt = repr(float(comp.net_volt[n, l])) if l >= 0 else ""
                w.writerow([repr(float(t) * TICK_PS), comp.net_ids[n], int(l), volt])

    def write_energy_csv(self, path: str | Path) -> None:
        comp = self._compiled
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time_ps", "net", "joules"])
            for t, n, e, s in zip(self.times, self.nets, self.energies, self.srcs):
                if s == 0:
                    w.writerow([repr(float(t) * TICK_PS), comp.net_ids[n], repr(float(e))])


def _ticks(ps: float) -> int:
    return int(round(ps * _kernel.TICKS_PER_PS))


def _check_stimulus(circuit: Circuit, comp, stim: Stimulus) -> None:
    inputs = set(comp.in_port_net)
    given = set(stim.initial)
    if given != inputs:
        raise StimulusError(
            f"initial levels must cover exactly the input ports; "
            f"missing {sorted(inputs - given)}, extra {sorted(given - inputs)}"
        )
    seen: dict = {}
    for t, port, lvl in stim.events:
        if port not in inputs:
            raise StimulusError(f"event on non-input port {port!r}")
        if t < 0 or t > stim.duration_ps:
            raise StimulusError(f"event at {t} ps outside [0, {stim.duration_ps}] ps")
        last = seen.get(port)
        if last is not None and t < last:
            raise StimulusError(f"events on {port!r} not in time order")
        # compare at tick resolution: distinct ps times that quantize to the
        # same tick would double-toggle the net within one tick
        if last is not None and _ticks(t) == _ticks(last):
            raise StimulusError(f"events on {port!r} collide at {t} ps (0.1 ps ticks)")
        seen[port] = t
    for port, lvl in list(stim.initial.items()) + [(p, l) for _, p, l in stim.events]:
        try:
            lvl = Level(int(lvl))
        except ValueError:
            raise StimulusError(f"{port}: {lvl!r} is not a logic level") from None
        if lvl == Level.X:
            raise StimulusError(f"{port}: inputs cannot be driven to X")
        enc = comp.port_encoding[port]
        if int(lvl) >= enc.radix:
            raise StimulusError(
                f"{port}: level {int(lvl)} outside {enc.radix}-level encoding {enc.name!r}"
            )


def _ensure_valid(circuit: Circuit) -> None:
    if not getattr(circuit, "_validated", False):
        diags = validate(circuit)
        if diags:
            raise DomainError(f"circuit invalid: {diags}")
        circuit._validated = True


def simulate(circuit: Circuit, stimulus: Stimulus) -> Trace:
    """Run one stimulus; returns the full trace with the energy ledger."""
    _ensure_valid(circuit)
    comp = compile_circuit(circuit)
    _check_stimulus(circuit, comp, stimulus)

    init = sorted((comp.in_port_net[p], int(l)) for p, l in stimulus.initial.items())
    init_net = np.array([n for n, _ in init], np.int64)
    init_lvl = np.array([l for _, l in init], np.int64)

    ev = sorted(
        ((_ticks(t), comp.in_port_net[p], int(l), p) for t, p, l in stimulus.events),
        key=lambda e: (e[0], e[1]),
    )
    stim_time = np.array([e[0] for e in ev], np.int64)
    stim_net = np.array([e[1] for e in ev], np.int64)
    stim_lvl = np.array([e[2] for e in ev], np.int64)

    duration_ticks = _ticks(stimulus.duration_ps)
    max_events = _MAX_EVENTS_PER_NET * (comp.n_nets + len(ev) + 1)

    status, origin, n_settle, n_rec, rt, rn, rl, re, rs, cur = _kernel._run_single(
        comp.gate_kind, comp.gate_karg, comp.gate_in, comp.gate_out,
        comp.gate_nout, comp.gate_delay, comp.fan_ptr, comp.fan_gate,
        comp.net_cap, comp.net_volt, comp.net_init, comp.out_nets,
        init_net, init_lvl, stim_net, stim_time, stim_lvl,
        np.int64(duration_ticks), np.int64(SETTLE_GAP_TICKS), np.int64(max_events),
    )
    if status == _kernel.ERR_UNSETTLED:
        raise UnsettledOutputError("an output was still X at the end of the settle phase")
    if status == _kernel.ERR_TIMEOUT:
        raise SimulationTimeoutError(
            f"circuit not quiescent within duration ({stimulus.duration_ps} ps)"
        )
    if status == _kernel.ERR_EVENT_CAP:
        raise SimulationTimeoutError("event budget exceeded; circuit appears unstable")

    stim_events = tuple(
        (int(tick) + int(origin), port, Level(int(lvl)))
        for (tick, _net, lvl, port) in ev
    )
    return Trace(
        circuit=circuit,
        times=rt[:n_rec].copy(),
        nets=rn[:n_rec].copy(),
        levels=rl[:n_rec].copy(),
        energies=re[:n_rec].copy(),
        srcs=rs[:n_rec].copy(),
        origin_ticks=int(origin),
        n_settle=int(n_settle),
        duration_ticks=duration_ticks,
        stim_events=stim_events,
        final_levels=cur,
        _compiled=comp,
    )


def settle_matrix(circuit: Circuit, in_ports, vectors, out_ports=None) -> np.ndarray:
    """Low-overhead batch settle: ``vectors[r, i]`` is the level driven on
    ``in_ports[i]``; returns an int64 matrix aligned to ``out_ports``
    (all outputs, sorted, when omitted). This is the hot path for
    exhaustive and random functional verification."""
    _ensure_valid(circuit)
    comp = compile_circuit(circuit)
    in_ports = list(in_ports)
    if set(in_ports) != set(comp.in_port_net) or len(in_ports) != len(comp.in_port_net):
        raise StimulusError(
            f"in_ports must cover exactly the input ports {sorted(comp.in_port_net)}"
        )
    vectors = np.ascontiguousarray(vectors, dtype=np.int64)
    if vectors.ndim != 2 or vectors.shape[1] != len(in_ports):
        raise StimulusError("vectors must be (n_vectors, n_input_ports)")
    for i, p in enumerate(in_ports):
        radix = comp.port_encoding[p].radix
        col = vectors[:, i]
        if len(col) and (col.min() < 0 or col.max() >= radix):
            raise StimulusError(f"{p}: levels outside {radix}-level encoding")

    # kernel applies t=0 events in ascending net order
    nets = np.array([comp.in_port_net[p] for p in in_ports], np.int64)
    order = np.argsort(nets, kind="stable")
    in_nets = nets[order]
    vectors = np.ascontiguousarray(vectors[:, order])

    if out_ports is None:
        out_ports = sorted(comp.out_port_net)
    out_nets = np.array([comp.out_port_net[p] for p in out_ports], np.int64)
    max_events = _MAX_EVENTS_PER_NET * (comp.n_nets + 1)
    status, out_lvls = _kernel._run_batch(
        comp.gate_kind, comp.gate_karg, comp.gate_in, comp.gate_out,
        comp.gate_nout, comp.gate_delay, comp.fan_ptr, comp.fan_gate,
        comp.net_cap, comp.net_volt, comp.net_init, in_nets, out_nets,
        vectors, np.int64(max_events),
    )
    if status != _kernel.OK:
        raise SimulationTimeoutError("event budget exceeded during batch settle")
    if (out_lvls < 0).any():
        raise UnsettledOutputError("an output settled to X during batch evaluation")
    return out_lvls


def settle_levels(circuit: Circuit, assignments: list) -> list:
    """Dict-friendly batch settle: one {port: level} mapping per row in,
    one {port: Level} mapping per row out."""
    comp = compile_circuit(circuit)
    in_ports = sorted(comp.in_port_net)
    vectors = np.empty((len(assignments), len(in_ports)), np.int64)
    for r, assign in enumerate(assignments):
        if set(assign) != set(in_ports):
            raise StimulusError(
                f"assignment {r} must cover exactly the input ports {in_ports}"
            )
        for ci, p in enumerate(in_ports):
            vectors[r, ci] = int(assign[p])
    out_ports = sorted(comp.out_port_net)
    out_lvls = settle_matrix(circuit, in_ports, vectors, out_ports)
    return [
        {p: Level(int(out_lvls[r, i])) for i, p in enumerate(out_ports)}
        for r in range(len(assignments))
    ]


# --------------------------------------------------------------------------
# Measurements


def _stim_times(trace: Trace) -> list:
    return sorted({t for t, _, _ in trace.stim_events})


def _window_after(trace: Trace, t_src: int) -> int:
    later = [t for t in _stim_times(trace) if t > t_src]
    if later:
        return later[0]
    return int(trace.origin_ticks + trace.duration_ticks)


def measure_delay(trace: Trace, src_port: str, src_event_index: int,
                  dst_port: str) -> float | None:
    """Delay from a stimulus event to the LAST transition it causes on
    ``dst_port`` (ps). Returns None when the destination never moves —
    distinct from a zero delay."""
    events = [(t, p, l) for t, p, l in trace.stim_events if p == src_port]
    if src_event_index < 0 or src_event_index >= len(events):
        raise DomainError(
            f"{src_port!r} has {len(events)} stimulus events; index {src_event_index}"
        )
    t_src = events[src_event_index][0]
    t_hi = _window_after(trace, t_src)
    ni = trace.net_index(dst_port)
    mask = (trace.nets == ni) & (trace.times > t_src) & (trace.times <= t_hi)
    if not mask.any():
        return None
    return float((trace.times[mask].max() - t_src) * TICK_PS)


def step_response_delays(trace: Trace, dst_port: str) -> list:
    """Per stimulus step (grouped by event time): (time_ps, delay_ps|None)
    to the last caused transition on ``dst_port``."""
    ni = trace.net_index(dst_port)
    out = []
    for t_src in _stim_times(trace):
        t_hi = _window_after(trace, t_src)
        mask = (trace.nets == ni) & (trace.times > t_src) & (trace.times <= t_hi)
        delay = float((trace.times[mask].max() - t_src) * TICK_PS) if mask.any() else None
        out.append(((t_src - trace.origin_ticks) * TICK_PS, delay))
    return out


def measure_power(trace: Trace, window: tuple) -> float:
    """Average power (W) over a window given in measurement-frame ps.

    Only gate-driven transitions count; the window [w0, w1) excludes the
    settle phase by construction (measurement time 0 = stimulus origin).
    """
    w0, w1 = window
    if not (0 <= w0 < w1 <= trace.duration_ticks * TICK_PS):
        raise DomainError(f"window {window} empty or outside the trace")
    t0 = trace.origin_ticks + _ticks(w0)
    t1 = trace.origin_ticks + _ticks(w1)
    mask = (trace.srcs == 0) & (trace.times >= t0) & (trace.times < t1)
    energy = float(trace.energies[mask].sum())
    return energy / ((w1 - w0) * 1e-12)


# --------------------------------------------------------------------------
# Worst-case stimuli


def _digit_bits(d: int) -> tuple:
    return d & 1, (d >> 1) & 1


def worst_case_stimulus(target: str, kind: str, vdd: float = 0.9,
                        step_ps: float = 2000.0, b_level: int = 3) -> Stimulus:
    """The stressing input sequences used for delay/power comparisons.

    ``input_to_carry`` walks A through 0,1,2,3,2,1,0 with Cin held low
    (B defaults to 3, which toggles the carry on every step);
    ``carry_to_carry`` pulses Cin with A=2, B=1 held, the combination that
    sensitizes the carry path end to end. Two-cell binary slices get the
    bit-encoded equivalents.
    """
    kind = kind.lower()
    L = Level
    if target not in ("input_to_carry", "carry_to_carry"):
        raise DomainError(f"unknown stimulus target {target!r}")

    if kind in ("qfa1", "qfa2"):
        if target == "input_to_carry":
            seq = (1, 2, 3, 2, 1, 0)
            events = tuple((step_ps * (i + 1), "A", L(v)) for i, v in enumerate(seq))
            return Stimulus(
                initial={"A": L.L0, "B": L(b_level), "Cin": L.L0},
                events=events,
                duration_ps=step_ps * (len(seq) + 1),
            )
        return Stimulus(
            initial={"A": L.L2, "B": L.L1, "Cin": L.L0},
            events=((step_ps, "Cin", L.L1), (2 * step_ps, "Cin", L.L0)),
            duration_ps=3 * step_ps,
        )

    if kind in ("bfa1x2", "bfa2x2"):
        if target == "input_to_carry":
            seq = (1, 2, 3, 2, 1, 0)
            b0, b1 = _digit_bits(b_level)
            events = []
            prev = (0, 0)
            for i, d in enumerate(seq):
                bits = _digit_bits(d)
                t = step_ps * (i + 1)
                if bits[0] != prev[0]:
                    events.append((t, "A0", L(bits[0])))
                if bits[1] != prev[1]:
                    events.append((t, "A1", L(bits[1])))
                prev = bits
            return Stimulus(
                initial={"A0": L.L0, "A1": L.L0, "B0": L(b0), "B1": L(b1),
                         "Cin": L.L0},
                events=tuple(events),
                duration_ps=step_ps * (len(seq) + 1),
            )
        return Stimulus(
            initial={"A0": L.L0, "A1": L.L1, "B0": L.L1, "B1": L.L0, "Cin": L.L0},
            events=((step_ps, "Cin", L.L1), (2 * step_ps, "Cin", L.L0)),
            duration_ps=3 * step_ps,
        )

    if kind in ("bfa1", "bfa2"):
        if target == "input_to_carry":
            seq = (1, 0, 1, 0, 1, 0)
            events = tuple((step_ps * (i + 1), "A", L(v)) for i, v in enumerate(seq))
            return Stimulus(
                initial={"A": L.L0, "B": L.L1, "Cin": L.L0},
                events=events,
                duration_ps=step_ps * (len(seq) + 1),
            )
        return Stimulus(
            initial={"A": L.L0, "B": L.L1, "Cin": L.L0},
            events=((step_ps, "Cin", L.L1), (2 * step_ps, "Cin", L.L0)),
            duration_ps=3 * step_ps,
        )

    raise DomainError(f"unknown cell kind {kind!r}")
