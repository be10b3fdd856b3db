"""Flattened-circuit representation and the event-loop kernels.

The simulator's inner loops run over plain int64/float64 arrays so they can
be JIT-compiled. Set ``MVADDER_DISABLE_NUMBA=1`` before import to run the
same code as interpreted Python/numpy (useful for debugging and as the
reference for the benchmark in benchmarks/bench_modes.py). Results are
bit-identical in both modes.
"""

from __future__ import annotations

import os

import numpy as np

from .gates import propagation_delay

USE_NUMBA = os.environ.get("MVADDER_DISABLE_NUMBA", "").lower() not in ("1", "true", "yes")
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a hard dep, but be graceful
        USE_NUMBA = False
if not USE_NUMBA:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(fn):
            return fn

        return deco

#: Event-time quantum: one tick is 0.1 ps. All delays are integer ticks,
#: which keeps event ordering exact and runs deterministic.
TICK_PS = 0.1
TICKS_PER_PS = 10

# Gate kind opcodes for the kernel.
K_DET, K_SUCC, K_MUX4, K_MUX2, K_INV, K_NAND, K_NOR, K_XOR, K_MAJ3, K_BUF = range(10)

_KIND_CODE = {
    "det1": (K_DET, 1), "det2": (K_DET, 2), "det3": (K_DET, 3),
    "succ1": (K_SUCC, 1), "succ2": (K_SUCC, 2), "succ3": (K_SUCC, 3),
    "mux4": (K_MUX4, 0), "mux2": (K_MUX2, 0),
    "inv": (K_INV, 0), "nand": (K_NAND, 0), "nor": (K_NOR, 0),
    "xor_tg": (K_XOR, 0), "maj3": (K_MAJ3, 0), "buf": (K_BUF, 0),
}

# Status codes returned by the kernels.
OK = 0
ERR_EVENT_CAP = 1
ERR_TIMEOUT = 2
ERR_UNSETTLED = 3

LVL_X = -1


class CompiledCircuit:
    """Array form of a validated circuit, ready for the kernels."""

    def __init__(self, circuit):
        net_ids = list(circuit.nets)
        self.net_index = {nid: i for i, nid in enumerate(net_ids)}
        self.net_ids = net_ids
        n = len(net_ids)
        self.n_nets = n

        self.net_cap = np.zeros(n, np.float64)
        self.net_volt = np.zeros((n, 4), np.float64)
        self.net_init = np.full(n, LVL_X, np.int64)
        self.net_radix = np.zeros(n, np.int64)
        for nid, net in circuit.nets.items():
            i = self.net_index[nid]
            self.net_cap[i] = net.total_cap
            volts = net.encoding.level_voltages
            self.net_volt[i, : len(volts)] = volts
            self.net_radix[i] = len(volts)
            if net.driver is not None and net.driver[0] == "const":
                self.net_init[i] = net.driver[1]

        insts = list(circuit.instances.values())
        g = len(insts)
        self.n_gates = g
        self.gate_ids = [inst.id for inst in insts]
        self.gate_kind = np.zeros(g, np.int64)
        self.gate_karg = np.zeros(g, np.int64)
        self.gate_nout = np.zeros(g, np.int64)
        self.gate_in = np.full((g, 5), -1, np.int64)
        self.gate_out = np.full((g, 2), -1, np.int64)
        self.gate_delay = np.zeros((g, 2), np.int64)
        fanout: list[list[int]] = [[] for _ in range(n)]
        for gi, inst in enumerate(insts):
            code, karg = _KIND_CODE[inst.primitive.kind]
            self.gate_kind[gi] = code
            self.gate_karg[gi] = karg
            ipins = inst.primitive.input_pins
            opins = inst.primitive.output_pins
            self.gate_nout[gi] = len(opins)
            for j, pin in enumerate(ipins):
                ni = self.net_index[inst.pins[pin]]
                self.gate_in[gi, j] = ni
                fanout[ni].append(gi)
            for j, pin in enumerate(opins):
                ni = self.net_index[inst.pins[pin]]
                self.gate_out[gi, j] = ni
                delay_s = propagation_delay(inst.primitive, circuit.nets[inst.pins[pin]].total_cap)
                # floor at one tick: zero-delay events would break the
                # one-transition-per-net-per-tick invariant
                self.gate_delay[gi, j] = max(1, round(delay_s / (TICK_PS * 1e-12)))

        ptr = np.zeros(n + 1, np.int64)
        for i in range(n):
            ptr[i + 1] = ptr[i] + len(fanout[i])
        flat = np.zeros(ptr[-1], np.int64)
        for i in range(n):
            flat[ptr[i]: ptr[i + 1]] = fanout[i]
        self.fan_ptr = ptr
        self.fan_gate = flat

        self.in_port_net = {p.name: self.net_index[p.net] for p in circuit.input_ports()}
        self.out_port_net = {p.name: self.net_index[p.net] for p in circuit.output_ports()}
        self.out_nets = np.array(sorted(self.out_port_net.values()), np.int64)
        self.port_encoding = {p.name: p.encoding for p in circuit.ports.values()}


def compile_circuit(circuit) -> CompiledCircuit:
    """Compile (and cache on the circuit) the kernel array form."""
    cached = getattr(circuit, "_compiled", None)
    if cached is None:
        cached = CompiledCircuit(circuit)
        circuit._compiled = cached
    return cached


# --------------------------------------------------------------------------
# Kernels. Everything below must stay numba-compilable.


@njit(cache=True)
def _hpush(keys, vals, n, key, val):
    if n >= keys.shape[0]:
        nk = np.empty(keys.shape[0] * 2, np.int64)
        nk[:n] = keys[:n]
        keys = nk
        nv = np.empty(vals.shape[0] * 2, np.int64)
        nv[:n] = vals[:n]
        vals = nv
    keys[n] = key
    vals[n] = val
    i = n
    n += 1
    while i > 0:
        p = (i - 1) >> 1
        if keys[p] <= keys[i]:
            break
        keys[p], keys[i] = keys[i], keys[p]
        vals[p], vals[i] = vals[i], vals[p]
        i = p
    return keys, vals, n


@njit(cache=True)
def _hpop(keys, vals, n):
    key = keys[0]
    val = vals[0]
    n -= 1
    keys[0] = keys[n]
    vals[0] = vals[n]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= n:
            break
        m = l
        r = l + 1
        if r < n and keys[r] < keys[l]:
            m = r
        if keys[i] <= keys[m]:
            break
        keys[i], keys[m] = keys[m], keys[i]
        vals[i], vals[m] = vals[m], vals[i]
        i = m
    return key, val, n


@njit(cache=True)
def _eval_gate(g, kind, karg, gin, cur, out_buf):
    k = kind[g]
    if k == K_DET:
        v = cur[gin[g, 0]]
        if v < 0:
            out_buf[0] = -1
            out_buf[1] = -1
        else:
            lo = 1 if v < karg[g] else 0
            out_buf[0] = lo
            out_buf[1] = 1 - lo
    elif k == K_SUCC:
        v = cur[gin[g, 0]]
        out_buf[0] = -1 if v < 0 else (v + karg[g]) & 3
    elif k == K_MUX4:
        s = cur[gin[g, 4]]
        out_buf[0] = -1 if s < 0 else cur[gin[g, s]]
    elif k == K_MUX2:
        s = cur[gin[g, 2]]
        out_buf[0] = -1 if s < 0 else cur[gin[g, s]]
    elif k == K_INV:
        v = cur[gin[g, 0]]
        out_buf[0] = -1 if v < 0 else 1 - v
    elif k == K_BUF:
        out_buf[0] = cur[gin[g, 0]]
    elif k == K_NAND:
        a = cur[gin[g, 0]]
        b = cur[gin[g, 1]]
        if a == 0 or b == 0:
            out_buf[0] = 1
        elif a < 0 or b < 0:
            out_buf[0] = -1
        else:
            out_buf[0] = 0
    elif k == K_NOR:
        a = cur[gin[g, 0]]
        b = cur[gin[g, 1]]
        if a == 1 or b == 1:
            out_buf[0] = 0
        elif a < 0 or b < 0:
            out_buf[0] = -1
        else:
            out_buf[0] = 1
    elif k == K_XOR:
        a = cur[gin[g, 0]]
        b = cur[gin[g, 1]]
        if a < 0 or b < 0:
            out_buf[0] = -1
            out_buf[1] = -1
        else:
            y = a ^ b
            out_buf[0] = y
            out_buf[1] = 1 - y
    else:  # K_MAJ3
        ones = 0
        zeros = 0
        for j in range(3):
            v = cur[gin[g, j]]
            if v == 1:
                ones += 1
            elif v == 0:
                zeros += 1
        if ones >= 2:
            out_buf[0] = 1
        elif zeros >= 2:
            out_buf[0] = 0
        else:
            out_buf[0] = -1


@njit(cache=True)
def _propagate(net, t, n_nets, cur, pend_t, pend_v, hk, hv, hn,
               kind, karg, gin, gout, nout, gdelay, fan_ptr, fan_gate, out_buf):
    """Re-evaluate every gate fed by ``net``; (re)schedule output events.

    Inertial behavior: a pending event is kept if the recomputed target
    agrees, cancelled if the target reverted to the current value (pulse
    absorbed), and replaced otherwise.
    """
    for fi in range(fan_ptr[net], fan_ptr[net + 1]):
        g = fan_gate[fi]
        _eval_gate(g, kind, karg, gin, cur, out_buf)
        for j in range(nout[g]):
            o = gout[g, j]
            target = out_buf[j]
            if pend_t[o] >= 0:
                if target == pend_v[o]:
                    continue
                pend_t[o] = -1
                if target != cur[o]:
                    tt = t + gdelay[g, j]
                    pend_t[o] = tt
                    pend_v[o] = target
                    hk, hv, hn = _hpush(hk, hv, hn, tt * n_nets + o, o)
            else:
                if target != cur[o]:
                    tt = t + gdelay[g, j]
                    pend_t[o] = tt
                    pend_v[o] = target
                    hk, hv, hn = _hpush(hk, hv, hn, tt * n_nets + o, o)
    return hk, hv, hn


@njit(cache=True)
def _rec(rt, rn, rl, re, rs, nr, t, net, lvl, energy, src):
    if nr >= rt.shape[0]:
        cap = rt.shape[0] * 2
        t2 = np.empty(cap, np.int64); t2[:nr] = rt[:nr]; rt = t2
        n2 = np.empty(cap, np.int64); n2[:nr] = rn[:nr]; rn = n2
        l2 = np.empty(cap, np.int64); l2[:nr] = rl[:nr]; rl = l2
        e2 = np.empty(cap, np.float64); e2[:nr] = re[:nr]; re = e2
        s2 = np.empty(cap, np.int64); s2[:nr] = rs[:nr]; rs = s2
    rt[nr] = t
    rn[nr] = net
    rl[nr] = lvl
    re[nr] = energy
    rs[nr] = src
    return rt, rn, rl, re, rs, nr + 1


@njit(cache=True)
def _volt(net_volt, net, lvl):
    if lvl < 0:
        return 0.0
    return net_volt[net, lvl]


@njit(cache=True)
def _run_single(kind, karg, gin, gout, nout, gdelay, fan_ptr, fan_gate,
                net_cap, net_volt, net_init, out_nets,
                init_net, init_lvl, stim_net, stim_time, stim_lvl,
                duration_ticks, gap_ticks, max_events):
    """Settle from the initial assignment, then play the stimulus.

    Returns (status, origin_ticks, n_settle, n_rec, records..., cur).
    Simultaneous events are processed in (time, net index) order; the
    stimulus stream is merged against the event heap on the same key.
    """
    n_nets = net_cap.shape[0]
    cur = net_init.copy()
    pend_t = np.full(n_nets, -1, np.int64)
    pend_v = np.zeros(n_nets, np.int64)
    hk = np.empty(64, np.int64)
    hv = np.empty(64, np.int64)
    hn = 0
    cap0 = 256
    rt = np.empty(cap0, np.int64)
    rn = np.empty(cap0, np.int64)
    rl = np.empty(cap0, np.int64)
    re = np.empty(cap0, np.float64)
    rs = np.empty(cap0, np.int64)
    nr = 0
    out_buf = np.zeros(2, np.int64)
    events = 0
    status = OK

    # Settle phase: initial input levels land at t = 0.
    for i in range(init_net.shape[0]):
        net = init_net[i]
        lvl = init_lvl[i]
        if lvl == cur[net]:
            continue
        rt, rn, rl, re, rs, nr = _rec(rt, rn, rl, re, rs, nr, 0, net, lvl, 0.0, 1)
        cur[net] = lvl
        hk, hv, hn = _propagate(net, 0, n_nets, cur, pend_t, pend_v, hk, hv, hn,
                                kind, karg, gin, gout, nout, gdelay,
                                fan_ptr, fan_gate, out_buf)
    t_q = 0
    while hn > 0:
        key, net, hn = _hpop(hk, hv, hn)
        t = key // n_nets
        if pend_t[net] != t:
            continue
        lvl = pend_v[net]
        pend_t[net] = -1
        events += 1
        if events > max_events:
            return (ERR_EVENT_CAP, 0, nr, nr, rt, rn, rl, re, rs, cur)
        vf = _volt(net_volt, net, cur[net])
        vt = _volt(net_volt, net, lvl)
        e = 0.5 * net_cap[net] * (vt - vf) * (vt - vf)
        rt, rn, rl, re, rs, nr = _rec(rt, rn, rl, re, rs, nr, t, net, lvl, e, 0)
        cur[net] = lvl
        t_q = t
        hk, hv, hn = _propagate(net, t, n_nets, cur, pend_t, pend_v, hk, hv, hn,
                                kind, karg, gin, gout, nout, gdelay,
                                fan_ptr, fan_gate, out_buf)
    origin = t_q + gap_ticks
    n_settle = nr
    for i in range(out_nets.shape[0]):
        if cur[out_nets[i]] < 0:
            return (ERR_UNSETTLED, origin, n_settle, nr, rt, rn, rl, re, rs, cur)

    # Measurement phase: merge stimulus events with the heap.
    t_end = origin + duration_ticks
    si = 0
    n_stim = stim_net.shape[0]
    big = np.int64(2 ** 62)
    while True:
        sk = (stim_time[si] + origin) * n_nets + stim_net[si] if si < n_stim else big
        hk0 = hk[0] if hn > 0 else big
        if sk == big and hk0 == big:
            break
        if sk <= hk0:
            t = stim_time[si] + origin
            net = stim_net[si]
            lvl = stim_lvl[si]
            si += 1
            if lvl == cur[net]:
                continue
            rt, rn, rl, re, rs, nr = _rec(rt, rn, rl, re, rs, nr, t, net, lvl, 0.0, 1)
            cur[net] = lvl
            hk, hv, hn = _propagate(net, t, n_nets, cur, pend_t, pend_v, hk, hv, hn,
                                    kind, karg, gin, gout, nout, gdelay,
                                    fan_ptr, fan_gate, out_buf)
        else:
            key, net, hn = _hpop(hk, hv, hn)
            t = key // n_nets
            if pend_t[net] != t:
                continue
            if t > t_end:
                return (ERR_TIMEOUT, origin, n_settle, nr, rt, rn, rl, re, rs, cur)
            lvl = pend_v[net]
            pend_t[net] = -1
            events += 1
            if events > max_events:
                return (ERR_EVENT_CAP, origin, n_settle, nr, rt, rn, rl, re, rs, cur)
            vf = _volt(net_volt, net, cur[net])
            vt = _volt(net_volt, net, lvl)
            e = 0.5 * net_cap[net] * (vt - vf) * (vt - vf)
            rt, rn, rl, re, rs, nr = _rec(rt, rn, rl, re, rs, nr, t, net, lvl, e, 0)
            cur[net] = lvl
            hk, hv, hn = _propagate(net, t, n_nets, cur, pend_t, pend_v, hk, hv, hn,
                                    kind, karg, gin, gout, nout, gdelay,
                                    fan_ptr, fan_gate, out_buf)
    for i in range(n_nets):
        if pend_t[i] >= 0:
            return (ERR_TIMEOUT, origin, n_settle, nr, rt, rn, rl, re, rs, cur)
    return (status, origin, n_settle, nr, rt, rn, rl, re, rs, cur)


@njit(cache=True)
def _run_batch(kind, karg, gin, gout, nout, gdelay, fan_ptr, fan_gate,
               net_cap, net_volt, net_init, in_nets, out_nets, vectors,
               max_events):
    """Settle one input assignment per row of ``vectors`` and read the
    outputs. Per-row unsettled outputs come back as -1."""
    n_nets = net_cap.shape[0]
    n_vec = vectors.shape[0]
    n_out = out_nets.shape[0]
    out_lvls = np.full((n_vec, n_out), -1, np.int64)
    pend_t = np.empty(n_nets, np.int64)
    pend_v = np.zeros(n_nets, np.int64)
    hk = np.empty(256, np.int64)
    hv = np.empty(256, np.int64)
    out_buf = np.zeros(2, np.int64)
    cur = np.empty(n_nets, np.int64)
    for v in range(n_vec):
        cur[:] = net_init
        pend_t[:] = -1
        hn = 0
        events = 0
        for i in range(in_nets.shape[0]):
            net = in_nets[i]
            lvl = vectors[v, i]
            if lvl == cur[net]:
                continue
            cur[net] = lvl
            hk, hv, hn = _propagate(net, 0, n_nets, cur, pend_t, pend_v, hk, hv, hn,
                                    kind, karg, gin, gout, nout, gdelay,
                                    fan_ptr, fan_gate, out_buf)
        while hn > 0:
            key, net, hn = _hpop(hk, hv, hn)
            t = key // n_nets
            if pend_t[net] != t:
                continue
            pend_t[net] = -1
            events += 1
            if events > max_events:
                return ERR_EVENT_CAP, out_lvls
            cur[net] = pend_v[net]
            hk, hv, hn = _propagate(net, t, n_nets, cur, pend_t, pend_v, hk, hv, hn,
                                    kind, karg, gin, gout, nout, gdelay,
                                    fan_ptr, fan_gate, out_buf)
        for i in range(n_out):
            out_lvls[v, i] = cur[out_nets[i]]
    return OK, out_lvls


def warm_up() -> None:
    """Force JIT compilation of the kernels on a toy problem."""
    kind = np.array([K_INV], np.int64)
    karg = np.zeros(1, np.int64)
    gin = np.full((1, 5), -1, np.int64)
    gin[0, 0] = 0
    gout = np.full((1, 2), -1, np.int64)
    gout[0, 0] = 1
    nout = np.ones(1, np.int64)
    gdelay = np.ones((1, 2), np.int64)
    fan_ptr = np.array([0, 1, 1], np.int64)
    fan_gate = np.array([0], np.int64)
    net_cap = np.array([0.0, 1e-15], np.float64)
    net_volt = np.zeros((2, 4), np.float64)
    net_volt[:, 1] = 0.9
    net_init = np.full(2, -1, np.int64)
    out_nets = np.array([1], np.int64)
    ins = np.array([0], np.int64)
    lvls = np.array([0], np.int64)
    _run_single(kind, karg, gin, gout, nout, gdelay, fan_ptr, fan_gate,
                net_cap, net_volt, net_init, out_nets,
                ins, lvls, np.array([0], np.int64), np.array([10], np.int64),
                np.array([1], np.int64), np.int64(100), np.int64(10),
                np.int64(10_000))
    _run_batch(kind, karg, gin, gout, nout, gdelay, fan_ptr, fan_gate,
               net_cap, net_volt, net_init, ins, out_nets,
               np.array([[0], [1]], np.int64), np.int64(10_000))
