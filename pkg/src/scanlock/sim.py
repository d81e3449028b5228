"""Two-valued simulation of sequential netlists.

Evaluation is bit-parallel: every signal is a Python int whose bit j
carries the value under pattern j, so one pass over the levelized node
list simulates `width` patterns at once.  :class:`SimState` drives a
design cycle by cycle (functional clocking, scan shifting, global
reset); :class:`Oracle` wraps a state with the correct key hidden
inside and exposes only the pin-level interface an attacker on an
activated part would have.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

from .netlist import (
    CTRL_EN,
    CTRL_RST,
    CTRL_STATE,
    GateKind,
    Netlist,
    ScanConfig,
    split_ref,
)

_OP_AND, _OP_NAND, _OP_OR, _OP_NOR, _OP_XOR, _OP_XNOR, _OP_NOT, _OP_BUF, _OP_MUX = range(9)

_OPCODE = {
    GateKind.AND: _OP_AND,
    GateKind.NAND: _OP_NAND,
    GateKind.OR: _OP_OR,
    GateKind.NOR: _OP_NOR,
    GateKind.XOR: _OP_XOR,
    GateKind.XNOR: _OP_XNOR,
    GateKind.NOT: _OP_NOT,
    GateKind.BUF: _OP_BUF,
    GateKind.MUX2: _OP_MUX,
}


class CompiledNetlist:
    """Levelized form of a netlist: slot-indexed signals plus a flat
    instruction list in topological order.

    Slot layout: primary inputs, key inputs, DFF Q, DFF QBAR, then the
    combinational nodes.  Instructions are ``(opcode, out_slot,
    in_slots)`` tuples.
    """

    def __init__(self, n: Netlist):
        self.netlist = n
        slot: dict[str, int] = {}
        for s in n.primary_inputs:
            slot[s] = len(slot)
        for s in n.key_inputs:
            slot[s] = len(slot)
        self.q_slots = []
        for d in n.dffs:
            slot[d] = len(slot)
            self.q_slots.append(slot[d])
        # QBAR slots sit in a contiguous block after the Q block
        qbar_base = len(slot)
        self.qbar_slots = [qbar_base + i for i in range(len(n.dffs))]
        comb_base = qbar_base + len(n.dffs)

        comb = [name for name, (k, _) in n.nodes.items() if k is not GateKind.DFF]
        order = self._levelize(n, comb)
        for i, name in enumerate(order):
            slot[name] = comb_base + i
        self.n_slots = comb_base + len(order)

        def ref_slot(ref: str) -> int:
            base, inv = split_ref(ref)
            if inv:
                return qbar_base + n.dffs.index(base)
            return slot[base]

        self.instrs = []
        for name in order:
            kind, fins = n.nodes[name]
            self.instrs.append((_OPCODE[kind], slot[name], tuple(ref_slot(r) for r in fins)))

        self.slot = slot
        self.qbar_base = qbar_base
        self.pi_slots = [slot[s] for s in n.primary_inputs]
        self.key_slots = [slot[s] for s in n.key_inputs]
        self.po_slots = [ref_slot(s) for s in n.primary_outputs]
        self.d_slots = [ref_slot(n.fanins(d)[0]) for d in n.dffs]

    @staticmethod
    def _levelize(n: Netlist, comb: list[str]) -> list[str]:
        comb_set = set(comb)
        indeg = {c: 0 for c in comb}
        consumers: dict[str, list[str]] = {}
        for c in comb:
            for ref in n.fanins(c):
                base, _ = split_ref(ref)
                if base in comb_set and n.kind(base) is not GateKind.DFF:
                    indeg[c] += 1
                    consumers.setdefault(base, []).append(c)
        ready = [c for c in comb if indeg[c] == 0]
        order = []
        while ready:
            cur = ready.pop()
            order.append(cur)
            for nxt in consumers.get(cur, ()):
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    ready.append(nxt)
        if len(order) != len(comb):
            raise ValueError("combinational cycle; validate() the netlist first")
        return order

    def eval_into(self, values: list[int], mask: int) -> None:
        """Evaluate all combinational slots in place."""
        for op, out, ins in self.instrs:
            if op == _OP_AND:
                v = values[ins[0]]
                for i in ins[1:]:
                    v &= values[i]
            elif op == _OP_NAND:
                v = values[ins[0]]
                for i in ins[1:]:
                    v &= values[i]
                v ^= mask
            elif op == _OP_OR:
                v = values[ins[0]]
                for i in ins[1:]:
                    v |= values[i]
            elif op == _OP_NOR:
                v = values[ins[0]]
                for i in ins[1:]:
                    v |= values[i]
                v ^= mask
            elif op == _OP_XOR:
                v = values[ins[0]]
                for i in ins[1:]:
                    v ^= values[i]
            elif op == _OP_XNOR:
                v = values[ins[0]]
                for i in ins[1:]:
                    v ^= values[i]
                v ^= mask
            elif op == _OP_NOT:
                v = mask ^ values[ins[0]]
            elif op == _OP_BUF:
                v = values[ins[0]]
            else:  # MUX2: (select, in0, in1)
                s = values[ins[0]]
                v = (s & values[ins[2]]) | ((mask ^ s) & values[ins[1]])
            values[out] = v


def _as_bits(vec, length, what) -> list[int]:
    if vec is None:
        vec = []
    if isinstance(vec, str):
        vec = [int(c) for c in vec]
    vec = list(vec)
    if len(vec) != length:
        raise ValueError(f"{what}: expected {length} values, got {len(vec)}")
    return [int(v) for v in vec]


def eval_comb(n: Netlist, pi, ff, key=()) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """One combinational evaluation.

    Parameters
    ----------
    n : Netlist
    pi, ff, key
        Bit sequences (or bitstrings) aligned with ``primary_inputs``,
        ``dffs`` and ``key_inputs``.

    Returns
    -------
    (po_bits, next_state_bits)
        Primary-output values and the D values each flip-flop would
        capture on the next clock edge.
    """
    c = CompiledNetlist(n)
    values = [0] * c.n_slots
    for s, v in zip(c.pi_slots, _as_bits(pi, len(n.primary_inputs), "pi")):
        values[s] = v & 1
    for s, v in zip(c.key_slots, _as_bits(key, len(n.key_inputs), "key")):
        values[s] = v & 1
    for i, v in enumerate(_as_bits(ff, len(n.dffs), "ff")):
        values[c.q_slots[i]] = v & 1
        values[c.qbar_slots[i]] = (v & 1) ^ 1
    c.eval_into(values, 1)
    po = tuple(values[s] for s in c.po_slots)
    nxt = tuple(values[s] for s in c.d_slots)
    return po, nxt


class SimState:
    """Cycle-accurate state of one design instance.

    Parameters
    ----------
    n : Netlist
        Design to simulate (already scan-inserted if scan ops are used).
    key
        Bit values for ``n.key_inputs``, fixed for the life of the state.
    scan : ScanConfig, optional
        Enables ``scan_shift``/``scan_load``/``scan_unload`` and the
        controller reset semantics.
    width : int
        Number of patterns simulated in parallel; bit j of every value
        belongs to pattern j.
    power_up_seed : int, optional
        When given, flip-flops start at seeded pseudo-random values
        (unknown power-up state); otherwise they start at 0 as after a
        completed reset.
    """

    def __init__(self, n: Netlist, key=(), scan: ScanConfig | None = None,
                 width: int = 1, power_up_seed: int | None = None):
        self.c = CompiledNetlist(n)
        self.n = n
        self.scan = scan
        self.width = width
        self.mask = (1 << width) - 1
        kb = _as_bits(key, len(n.key_inputs), "key")
        self._key = [self.mask if b else 0 for b in kb]
        self.key_bits = tuple(kb)
        if power_up_seed is None:
            self.ff = [0] * len(n.dffs)
        else:
            rng = random.Random(power_up_seed)
            self.ff = [rng.getrandbits(width) for _ in n.dffs]
        self.pi = [0] * len(n.primary_inputs)
        self.blocked_shifts = 0

        pi_pos = {s: i for i, s in enumerate(n.primary_inputs)}
        self._si = pi_pos.get(scan.si) if scan else None
        self._se = pi_pos.get(scan.se) if scan else None
        self._rst = pi_pos.get(scan.rst) if scan and scan.rst else None
        self._so_slot = self.c.slot[scan.so] if scan else None
        self._ctrl = bool(scan and scan.controller)
        if self._ctrl:
            self._ctrl_rst_slot = self.c.slot[CTRL_RST]
            self._ctrl_en_slot = self.c.slot[CTRL_EN]
            self._ctrl_dff_idx = n.dffs.index(CTRL_STATE)
        self._vals = [0] * self.c.n_slots
        # functional inputs = primary inputs minus scan control pins
        scan_pins = {p for p in (self._si, self._se, self._rst) if p is not None}
        self.functional_inputs = [s for i, s in enumerate(n.primary_inputs) if i not in scan_pins]
        self._fpi_pos = [i for i in range(len(n.primary_inputs)) if i not in scan_pins]

    # ------------------------------------------------------------------
    def _eval(self) -> list[int]:
        v = self._vals
        c = self.c
        for s, val in zip(c.pi_slots, self.pi):
            v[s] = val
        for s, val in zip(c.key_slots, self._key):
            v[s] = val
        m = self.mask
        for i, q in enumerate(self.ff):
            v[c.q_slots[i]] = q
            v[c.qbar_slots[i]] = m ^ q
        c.eval_into(v, m)
        return v

    def _clock(self, values: list[int]) -> None:
        nxt = [values[s] for s in self.c.d_slots]
        if self._ctrl:
            r = values[self._ctrl_rst_slot]
            if r:
                ctrl = self._ctrl_dff_idx
                nxt = [v & ~r if i != ctrl else v for i, v in enumerate(nxt)]
        self.ff = nxt

    def set_input(self, name: str, bits: int) -> None:
        self.pi[self.n.primary_inputs.index(name)] = bits & self.mask

    def read_outputs(self) -> tuple[int, ...]:
        v = self._eval()
        return tuple(v[s] for s in self.c.po_slots)

    def step_functional(self, pi=None) -> tuple[int, ...]:
        """Apply functional inputs, observe outputs, clock once.

        `pi` is aligned with :attr:`functional_inputs`; scan pins are
        forced to functional mode (SE=0, SI=0, RST=0).  Returns the
        output values observed before the clock edge.
        """
        if pi is not None:
            vals = pi if not isinstance(pi, (str, bytes)) else [int(c) for c in pi]
            vals = list(vals)
            if len(vals) != len(self._fpi_pos):
                raise ValueError(f"expected {len(self._fpi_pos)} functional inputs")
            for pos, val in zip(self._fpi_pos, vals):
                self.pi[pos] = int(val) & self.mask
        for pos in (self._si, self._se, self._rst):
            if pos is not None:
                self.pi[pos] = 0
        v = self._eval()
        po = tuple(v[s] for s in self.c.po_slots)
        self._clock(v)
        return po

    def global_reset(self) -> None:
        """Reset pulse.  Without a scan controller this zeroes every
        flip-flop directly.  With one, a functional settle cycle first
        clears the lockout flop (its reset gate is blind while the flop
        holds 1, e.g. straight after power-up), then RST is driven for
        one cycle: the reset gate zeroes the functional flip-flops and
        the lockout arms until scan-enable goes low again."""
        if self._ctrl:
            self.pi[self._se] = 0
            self.pi[self._rst] = 0
            self._clock(self._eval())
            self.pi[self._rst] = self.mask
            self._clock(self._eval())
            self.pi[self._rst] = 0
        else:
            self.ff = [0] * len(self.ff)

    # ------------------------------------------------------------------
    def _need_scan(self):
        if self.scan is None:
            raise ValueError("netlist has no scan chain")

    def scan_shift(self, bit_in: int) -> int:
        """One shift cycle: SE high, `bit_in` on SI.  Returns the value
        on SO just before the clock edge.  A shift the controller
        suppressed is counted in :attr:`blocked_shifts`."""
        self._need_scan()
        self.pi[self._se] = self.mask
        self.pi[self._si] = int(bit_in) & self.mask
        v = self._eval()
        out = v[self._so_slot]
        if self._ctrl and (self.mask ^ v[self._ctrl_en_slot]):
            self.blocked_shifts += 1
        self._clock(v)
        return out

    def scan_load(self, vector) -> None:
        """Shift `vector` in MSB first: vector[0] ends up deepest in the
        chain (the scan-out side)."""
        self._need_scan()
        for ch in vector:
            self.scan_shift(int(ch))

    def scan_unload(self) -> str:
        """Shift the whole chain out (SI held 0); width-1 states only."""
        self._need_scan()
        if self.width != 1:
            raise ValueError("scan_unload is defined for width-1 states")
        return "".join(str(self.scan_shift(0)) for _ in self.scan.chain)

    def cells(self) -> str:
        """Raw flip-flop contents in chain order, scan-in side first
        (width-1 states only)."""
        self._need_scan()
        if self.width != 1:
            raise ValueError("cells() is defined for width-1 states")
        idx = {d: i for i, d in enumerate(self.n.dffs)}
        return "".join(str(self.ff[idx[d]]) for d in self.scan.chain)

    def peek_ff(self, name: str) -> int:
        return self.ff[self.n.dffs.index(name)]


# ----------------------------------------------------------------------
# batch runs

def random_pi_trace(n_inputs: int, patterns: int, cycles: int, seed: int) -> list[list[int]]:
    """Per-cycle input ints, bit j = pattern j.  Shape: cycles x inputs."""
    rng = random.Random(seed)
    return [[rng.getrandbits(patterns) for _ in range(n_inputs)] for _ in range(cycles)]


def run_patterns(n: Netlist, key, patterns: int, cycles: int, seed: int,
                 scan: ScanConfig | None = None, pi_trace=None):
    """Simulate `patterns` random functional traces from the reset state.

    Each trace applies a fresh random vector to the functional inputs
    every cycle.  Returns ``(po_names, trace)`` where ``trace[c][o]``
    is an int holding output o's value at cycle c for every pattern in
    parallel.  Identical arguments give an identical trace.
    """
    st = SimState(n, key=key, scan=scan, width=patterns)
    if pi_trace is None:
        pi_trace = random_pi_trace(len(st.functional_inputs), patterns, cycles, seed)
    trace = [st.step_functional(row) for row in pi_trace]
    return list(n.primary_outputs), trace


def trace_distance(t1, t2, po_idx=None) -> int:
    """Popcount of the XOR of two equally shaped traces, optionally
    restricted to one output index or a collection of them."""
    if isinstance(po_idx, int):
        po_idx = (po_idx,)
    total = 0
    for r1, r2 in zip(t1, t2):
        cols = range(len(r1)) if po_idx is None else po_idx
        for i in cols:
            total += (r1[i] ^ r2[i]).bit_count()
    return total


# ----------------------------------------------------------------------
# activated-part oracle

class Oracle:
    """Pin-level access to an activated (correct-key) instance.

    The key is bound at construction and never exposed; only pin
    operations are available, and each one bumps `query_counter`.
    Flip-flops power up to seeded pseudo-random values until the first
    reset.
    """

    def __init__(self, n: Netlist, correct_key, scan: ScanConfig | None = None,
                 power_up_seed: int = 0xC0FFEE):
        self.__n = n
        self.__key = tuple(_as_bits(correct_key, len(n.key_inputs), "key"))
        self.__scan = scan
        self.__state = SimState(n, key=self.__key, scan=scan, width=1,
                                power_up_seed=power_up_seed)
        self.query_counter = 0
        self.query_counts = Counter()

    def _count(self, what, k=1):
        self.query_counter += k
        self.query_counts[what] += k

    @property
    def chain_length(self) -> int:
        sc = self.__scan
        return len(sc.chain) if sc else 0

    def set_inputs(self, assignment) -> None:
        """Drive functional input pins; `assignment` is a name->bit
        mapping (partial updates allowed) or a full vector."""
        self._count("set_inputs")
        st = self.__state
        if isinstance(assignment, dict):
            for name, bit in assignment.items():
                if name not in st.functional_inputs:
                    raise KeyError(f"not a functional input pin: {name}")
                st.set_input(name, int(bit))
        else:
            vals = _as_bits(assignment, len(st.functional_inputs), "pi")
            for name, bit in zip(st.functional_inputs, vals):
                st.set_input(name, bit)

    def read_outputs(self) -> dict[str, int]:
        self._count("read_outputs")
        vals = self.__state.read_outputs()
        return dict(zip(self.__n.primary_outputs, vals))

    def pulse_reset(self) -> None:
        self._count("reset")
        self.__state.global_reset()

    def step(self) -> None:
        """One functional clock (SE low), inputs as last driven."""
        self._count("step")
        st = self.__state
        cur = [st.pi[i] for i in st._fpi_pos]
        st.step_functional(cur)

    def scan_shift(self, bit_in: int) -> int:
        self._count("scan_shift")
        return self.__state.scan_shift(bit_in)

    def scan_load(self, vector) -> None:
        for ch in vector:
            self.scan_shift(int(ch))

    def scan_unload(self) -> str:
        return "".join(str(self.scan_shift(0)) for _ in range(self.chain_length))

    def collect_trace(self, patterns: int, cycles: int, seed: int):
        """Reference PO trace over seeded random functional traces, each
        clocked from a fresh reset.  Query cost is accounted as the
        equivalent pin-op sequence."""
        self._count("reset", patterns)
        self._count("set_inputs", patterns * cycles)
        self._count("read_outputs", patterns * cycles)
        self._count("step", patterns * cycles)
        return run_patterns(self.__n, self.__key, patterns, cycles, seed,
                            scan=self.__scan)[1]
