"""Independent reference models shared by the tests.

Everything in this module is written directly against the netlist data
structure, without calling the package's simulator or analysis code, so
test expectations come from a second implementation instead of from the
code under test.
"""

import sys

from scanlock import GateKind, Netlist, qbar, split_ref

sys.setrecursionlimit(50_000)


def ref_eval(n: Netlist, env: dict) -> dict:
    """Evaluate every combinational signal by recursive descent.

    `env` maps primary inputs, key inputs and flip-flop names to bits;
    flip-flop entries are the current Q values.  Returns a map from
    every reachable signal name to its bit.
    """
    memo = dict(env)

    def val(ref: str) -> int:
        base, inv = split_ref(ref)
        v = sig(base)
        return v ^ 1 if inv else v

    def sig(name: str) -> int:
        if name in memo:
            return memo[name]
        kind, fins = n.nodes[name]
        if kind is GateKind.DFF:
            raise KeyError(f"no state bit supplied for {name!r}")
        vals = [val(r) for r in fins]
        if kind is GateKind.AND:
            v = int(all(vals))
        elif kind is GateKind.NAND:
            v = int(not all(vals))
        elif kind is GateKind.OR:
            v = int(any(vals))
        elif kind is GateKind.NOR:
            v = int(not any(vals))
        elif kind is GateKind.XOR:
            v = sum(vals) & 1
        elif kind is GateKind.XNOR:
            v = (sum(vals) & 1) ^ 1
        elif kind is GateKind.NOT:
            v = vals[0] ^ 1
        elif kind is GateKind.BUF:
            v = vals[0]
        elif kind is GateKind.MUX2:
            v = vals[2] if vals[0] else vals[1]
        else:
            raise ValueError(f"unexpected kind {kind}")
        memo[name] = v
        return v

    for po in n.primary_outputs:
        sig(po)
    for ff in n.dffs:
        val(n.fanins(ff)[0])
    return memo


def ref_step(n: Netlist, state: dict, pi: dict, key: dict):
    """One reference clock cycle.

    Returns ``(po_bits, next_state)`` where `po_bits` follows the
    declaration order of ``n.primary_outputs``.
    """
    env = {}
    env.update(pi)
    env.update(key)
    env.update(state)
    values = ref_eval(n, env)

    def val(ref):
        base, inv = split_ref(ref)
        return values[base] ^ 1 if inv else values[base]

    pos = tuple(values[o] for o in n.primary_outputs)
    nxt = {ff: val(n.fanins(ff)[0]) for ff in n.dffs}
    return pos, nxt


def ref_trace(n: Netlist, key_bits, pi_rows) -> list[tuple[int, ...]]:
    """Reference output trace from the all-zero reset state.

    `pi_rows` is one bit vector per cycle, aligned with
    ``n.primary_inputs``.
    """
    key = dict(zip(n.key_inputs, key_bits))
    state = {ff: 0 for ff in n.dffs}
    out = []
    for row in pi_rows:
        pi = dict(zip(n.primary_inputs, row))
        pos, state = ref_step(n, state, pi, key)
        out.append(pos)
    return out


def reachable_outputs(n: Netlist, ff: str) -> frozenset:
    """Primary outputs a flip-flop can influence, crossing registers.

    Plain forward reachability over the signal graph: a gate is reached
    when any fanin (either polarity) is reached, a flip-flop passes the
    reach across the clock edge, and a primary output counts as soon as
    its defining signal is reached.
    """
    consumers: dict[str, list[str]] = {}
    for node, (_, fins) in n.nodes.items():
        for r in fins:
            consumers.setdefault(split_ref(r)[0], []).append(node)
    reached = set()
    stack = [ff]
    while stack:
        sig = stack.pop()
        if sig in reached:
            continue
        reached.add(sig)
        stack.extend(consumers.get(sig, ()))
    return frozenset(o for o in n.primary_outputs if o in reached)


def comb_cone(n: Netlist, root_ref: str):
    """PIs, key inputs and flip-flops feeding `root_ref` through
    combinational logic only (no key-mux special casing)."""
    pis, keys, ffs = set(), set(), set()
    pi_set, key_set = set(n.primary_inputs), set(n.key_inputs)
    stack, seen = [root_ref], set()
    while stack:
        base, _ = split_ref(stack.pop())
        if base in seen:
            continue
        seen.add(base)
        if base in pi_set:
            pis.add(base)
        elif base in key_set:
            keys.add(base)
        elif n.is_dff(base):
            ffs.add(base)
        else:
            stack.extend(n.fanins(base))
    return pis, keys, ffs


def merge_netlists(parts, name: str = "merged") -> Netlist:
    """Combine independent designs into one netlist.

    `parts` is a sequence of ``(tag, netlist)`` pairs; every signal of
    each part is prefixed with its tag, keeping the blocks disjoint.
    """
    out = Netlist(name=name)
    for tag, p in parts:
        def rn(ref, _tag=tag):
            base, inv = split_ref(ref)
            renamed = f"{_tag}_{base}"
            return qbar(renamed) if inv else renamed

        for s in p.primary_inputs:
            out.add_input(f"{tag}_{s}")
        for s in p.key_inputs:
            out.add_key_input(f"{tag}_{s}")
        for node, (kind, fins) in p.nodes.items():
            if kind is GateKind.DFF:
                out.add_dff(f"{tag}_{node}", rn(fins[0]))
            else:
                out.add_gate(f"{tag}_{node}", kind, tuple(rn(r) for r in fins))
        for s in p.primary_outputs:
            out.add_output(f"{tag}_{s}")
    return out
