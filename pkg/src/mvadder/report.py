"""Comparison harness: delay / power / PDP / diameter-sum per adder config.

Every row is measured fresh from a build + two worst-case stimuli, so
reports are reproducible bit for bit; configs are independent and may be
measured on a thread pool without affecting the output bytes.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .engine import (
    Stimulus,
    measure_power,
    simulate,
    step_response_delays,
    worst_case_stimulus,
)
from .gates import CellLibrary
from .levels import DomainError, Level
from .netlist import (
    Circuit,
    area_report,
    build_bfa,
    build_binary_slice,
    build_cpa,
    build_qfa,
)
from .timing import sta

CONFIG_KINDS = ("qfa1", "qfa2", "bfa1x2", "bfa2x2")


@dataclass(frozen=True)
class AdderConfig:
    """One comparison column: cell kind, supply, per-output load."""

    kind: str
    vdd: float
    cl: float = 2e-15
    n_digits: int = 1

    def label(self) -> str:
        return f"{self.kind}@{self.vdd:g}"


@dataclass(frozen=True)
class ComparisonRow:
    config: AdderConfig
    delay_input_to_cout_ps: float
    delay_cin_to_cout_ps: float
    delay_cin_to_sum_ps: float
    power_uw: float
    pdp_fj: float
    sigma_di_nm: float
    transistor_count: int

    def as_dict(self) -> dict:
        return {
            "config": self.config.label(),
            "kind": self.config.kind,
            "vdd": self.config.vdd,
            "cl_f": self.config.cl,
            "delay_input_to_cout_ps": self.delay_input_to_cout_ps,
            "delay_cin_to_cout_ps": self.delay_cin_to_cout_ps,
            "delay_cin_to_sum_ps": self.delay_cin_to_sum_ps,
            "power_uw": self.power_uw,
            "pdp_fj": self.pdp_fj,
            "sigma_di_nm": self.sigma_di_nm,
            "transistor_count": self.transistor_count,
        }


def build_config_cell(config: AdderConfig, lib: CellLibrary | None = None) -> Circuit:
    kind = config.kind.lower()
    if kind in ("qfa1", "qfa2"):
        return build_qfa(kind, config.vdd, lib, cl=config.cl)
    if kind in ("bfa1x2", "bfa2x2"):
        return build_binary_slice(kind[:4], config.vdd, lib, cl=config.cl)
    if kind in ("bfa1", "bfa2"):
        return build_bfa(kind, config.vdd, lib, cl=config.cl)
    raise DomainError(f"unknown config kind {config.kind!r}")


def _sum_ports(cell: Circuit) -> list:
    return sorted(p.name for p in cell.output_ports() if p.name != "Cout")


def _worst_step(trace, dst_port) -> float | None:
    delays = [d for _, d in step_response_delays(trace, dst_port) if d is not None]
    return max(delays) if delays else None


def measure_config(config: AdderConfig, lib: CellLibrary | None = None) -> ComparisonRow:
    """Build one cell, run both worst-case stimuli, collect the row."""
    try:
        cell = build_config_cell(config, lib)
        stim_in = worst_case_stimulus("input_to_carry", config.kind, config.vdd)
        stim_cc = worst_case_stimulus("carry_to_carry", config.kind, config.vdd)
        trace_in = simulate(cell, stim_in)
        trace_cc = simulate(cell, stim_cc)
    except Exception as exc:
        raise type(exc)(f"[config {config.label()}] {exc}") from exc

    d_in = _worst_step(trace_in, "Cout")
    d_cc = _worst_step(trace_cc, "Cout")
    d_cs_candidates = [_worst_step(trace_cc, p) for p in _sum_ports(cell)]
    d_cs_candidates = [d for d in d_cs_candidates if d is not None]
    d_cs = max(d_cs_candidates) if d_cs_candidates else None
    if d_in is None or d_cc is None or d_cs is None:
        raise DomainError(f"[config {config.label()}] a worst-case path did not toggle")

    power_w = measure_power(trace_in, (0.0, stim_in.duration_ps))
    # PDP convention: power times the worst of the three reported delays.
    worst_ps = max(d_in, d_cc, d_cs)
    pdp_fj = power_w * worst_ps * 1e-12 * 1e15
    area = area_report(cell)
    return ComparisonRow(
        config=config,
        delay_input_to_cout_ps=d_in,
        delay_cin_to_cout_ps=d_cc,
        delay_cin_to_sum_ps=d_cs,
        power_uw=power_w * 1e6,
        pdp_fj=pdp_fj,
        sigma_di_nm=area.total_sigma_di_nm,
        transistor_count=area.transistor_count,
    )


def compare(configs, lib: CellLibrary | None = None, threads: int = 1) -> list:
    """Measure every config; row order follows input order regardless of
    thread count."""
    configs = list(configs)
    if threads <= 1:
        return [measure_config(c, lib) for c in configs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda c: measure_config(c, lib), configs))


@dataclass(frozen=True)
class ScalingRow:
    n_digits: int
    sta_arrival_ps: float
    measured_ps: float
    cells_on_path: int

    def as_dict(self) -> dict:
        return {
            "n_digits": self.n_digits,
            "sta_arrival_ps": self.sta_arrival_ps,
            "measured_ps": self.measured_ps,
            "cells_on_path": self.cells_on_path,
        }


def cpa_scaling(config: AdderConfig, n_list, lib: CellLibrary | None = None) -> list:
    """Full-chain arrival and a measured full ripple per CPA size.

    The measured stimulus holds every A digit at radix-1 with B at 0
    (propagate mode on every cell) and steps C0, so the carry walks the
    whole chain.
    """
    kind = config.kind.lower()
    base_kind = kind[:4]
    quaternary = base_kind.startswith("qfa")
    rows = []
    for n in n_list:
        cells = n if quaternary else 2 * n
        cell = (build_qfa if quaternary else build_bfa)(base_kind, config.vdd, lib)
        cpa = build_cpa(cell, cells, cl=config.cl)
        last = cells - 1
        rep = sta(cpa, ("C0", "A0", "B0"), (f"C{cells}", f"S{last}"))

        radix = 4 if quaternary else 2
        initial = {"C0": Level.L0}
        for i in range(cells):
            initial[f"A{i}"] = Level(radix - 1)
            initial[f"B{i}"] = Level.L0
        step = 2000.0
        duration = 2 * step + max(2000.0, 2 * rep.worst_arrival_ps)
        stim = Stimulus(initial=initial, events=((step, "C0", Level.L1),),
                        duration_ps=duration)
        trace = simulate(cpa, stim)
        delays = [d for _, d in step_response_delays(trace, f"C{cells}") if d is not None]
        measured = max(delays) if delays else float("nan")
        rows.append(ScalingRow(
            n_digits=n,
            sta_arrival_ps=rep.worst_arrival_ps,
            measured_ps=measured,
            cells_on_path=rep.stage_cells,
        ))
    return rows


# --------------------------------------------------------------------------
# Serialization (deterministic bytes)

_CSV_FIELDS = (
    "config", "kind", "vdd", "cl_f",
    "delay_input_to_cout_ps", "delay_cin_to_cout_ps", "delay_cin_to_sum_ps",
    "power_uw", "pdp_fj", "sigma_di_nm", "transistor_count",
)


def rows_to_json(rows) -> str:
    return json.dumps([r.as_dict() for r in rows], indent=2, sort_keys=True) + "\n"


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=_CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        d = r.as_dict()
        w.writerow({k: repr(d[k]) if isinstance(d[k], float) else d[k]
                    for k in _CSV_FIELDS})
    return buf.getvalue()


def parse_config_spec(spec: str, cl: float) -> AdderConfig:
    """Parse 'kind@vdd' (e.g. 'qfa2@0.9') into an AdderConfig."""
    spec = spec.strip().lower()
    if "@" not in spec:
        raise DomainError(f"config spec {spec!r} must look like kind@vdd")
    kind, _, vdd = spec.partition("@")
    if kind not in CONFIG_KINDS + ("bfa1", "bfa2"):
        raise DomainError(f"unknown config kind {kind!r}")
    try:
        vdd_f = float(vdd)
    except ValueError:
        raise DomainError(f"bad supply voltage {vdd!r} in {spec!r}") from None
    if vdd_f <= 0:
        raise DomainError(f"supply must be > 0 in {spec!r}")
    return AdderConfig(kind=kind, vdd=vdd_f, cl=cl)
