"""Deterministic random-circuit generation for tests and experiments.

Circuits come out acyclic by construction: gates only read primary
inputs, flip-flop outputs, or earlier gates.  Every flip-flop output is
observable (unused ones are folded into a parity output) so encryption
and attack experiments never target dead state.
"""

from __future__ import annotations

import random

from .netlist import GateKind, Netlist, qbar, validate

_KINDS = (
    (GateKind.AND, 2), (GateKind.AND, 3), (GateKind.NAND, 2), (GateKind.NAND, 3),
    (GateKind.OR, 2), (GateKind.OR, 3), (GateKind.NOR, 2),
    (GateKind.XOR, 2), (GateKind.XNOR, 2), (GateKind.NOT, 1), (GateKind.BUF, 1),
)


def random_netlist(n_pi: int, n_dff: int, n_gates: int, n_po: int, seed: int,
                   name: str | None = None, qbar_frac: float = 0.25) -> Netlist:
    """Build a random but well-formed sequential netlist.

    Parameters
    ----------
    n_pi, n_dff, n_gates, n_po : int
        Port and node budgets.  `n_gates` counts combinational nodes.
    seed : int
        Drives every random choice; equal arguments give an equal
        netlist, node order included.
    qbar_frac : float
        Fraction of flip-flops whose consumers read the complement
        output instead of Q.  Each flip-flop is read through exactly
        one of its outputs.

    Returns
    -------
    Netlist
    """
    if n_pi < 1 or n_gates < 2 or n_po < 1:
        raise ValueError("need at least one input, two gates and one output")
    rng = random.Random(seed)
    n = Netlist(name=name or f"rnd_{n_pi}_{n_dff}_{n_gates}_{seed}")
    pis = [n.add_input(f"pi{i}") for i in range(n_pi)]
    # declare flip-flops first with a placeholder D, fixed up below
    ffs = [n.add_dff(f"ff{i}", pis[0]) for i in range(n_dff)]
    form = {f: qbar(f) if rng.random() < qbar_frac else f for f in ffs}

    sources = pis + ffs
    gates = []
    for i in range(n_gates):
        kind, arity = _KINDS[rng.randrange(len(_KINDS))]
        pool = sources + gates
        fins = [pool[rng.randrange(len(pool))] for _ in range(arity)]
        if arity >= 2 and len(set(fins)) == 1:
            fins[-1] = pool[rng.randrange(len(pool))]
        gates.append(n.add_gate(f"g{i}", kind, [form.get(f, f) for f in fins]))

    # D inputs drawn from the later half of the gate list where possible
    half = gates[len(gates) // 2:] or gates
    for ff in ffs:
        n.set_fanins(ff, (half[rng.randrange(len(half))],))

    po_pool = list(dict.fromkeys(reversed(gates)))  # late gates first
    n_po = min(n_po, len(po_pool))
    for sig in sorted(rng.sample(po_pool, n_po)):
        n.add_output(sig)

    _fold_in_unused(n, form)
    diags = validate(n)
    if diags:
        raise AssertionError(f"generator produced a bad netlist: {diags[0]}")
    return n


def _fold_in_unused(n: Netlist, form: dict[str, str]) -> None:
    """XOR any unobservable flip-flop outputs into one extra output."""
    used = set(n.fanout_map())
    dangling = [d for d in n.dffs if d not in used and d not in n.primary_outputs]
    if not dangling:
        return
    acc = n.add_gate(n.fresh("mix0"), GateKind.BUF, (form[dangling[0]],))
    for i, d in enumerate(dangling[1:]):
        acc = n.add_gate(n.fresh(f"mix{i + 1}"), GateKind.XOR, (acc, form[d]))
    n.add_output(acc)


def chain_core(n_dff: int, n_pi: int, seed: int, name: str | None = None,
               qbar_frac: float = 0.25, per_ff_outputs: bool = False) -> Netlist:
    """A light netlist for scan-chain experiments: every flip-flop gets
    a small random function of the inputs and earlier flip-flops as D,
    and one parity output observes all state.  A seeded subset of the
    flip-flops is consumed through the complement output.  With
    `per_ff_outputs` each flip-flop also drives its own buffered
    output, so no two state bits are confounded at the outputs."""
    if n_dff < 1 or n_pi < 1:
        raise ValueError("need at least one flip-flop and one input")
    rng = random.Random(seed)
    n = Netlist(name=name or f"chain_{n_dff}_{seed}")
    pis = [n.add_input(f"pi{i}") for i in range(n_pi)]
    ffs = [n.add_dff(f"ff{i}", pis[0]) for i in range(n_dff)]
    form = {f: qbar(f) if rng.random() < qbar_frac else f for f in ffs}
    for i, ff in enumerate(ffs):
        pool = pis + ffs[:i]
        a = pool[rng.randrange(len(pool))]
        b = pool[rng.randrange(len(pool))]
        kind = (GateKind.AND, GateKind.OR, GateKind.XOR, GateKind.NAND)[rng.randrange(4)]
        n.set_fanins(ff, (n.add_gate(f"d{i}", kind,
                                     (form.get(a, a), form.get(b, b))),))
    acc = n.add_gate("par0", GateKind.BUF, (form[ffs[0]],))
    for i, ff in enumerate(ffs[1:]):
        acc = n.add_gate(f"par{i + 1}", GateKind.XOR, (acc, form[ff]))
    n.add_output(acc)
    if per_ff_outputs:
        for i, ff in enumerate(ffs):
            n.add_output(n.add_gate(f"obs{i}", GateKind.BUF, (form[ff],)))
    return n


REFERENCE_LOCKED = ("DFF1", "DFF3", "DFF5", "DFF8", "DFF9")
REFERENCE_QBAR_LINKS = frozenset({5})


def reference_chain() -> Netlist:
    """A fixed ten-cell design for demos and golden tests.

    The state register is a shift loop stirred by one input.  DFF3 and
    DFF8 are consumed through their complement outputs, every other
    cell through Q.  Locking `REFERENCE_LOCKED` with unrandomized leg
    order therefore yields the correct key 01010, and stitching the
    chain in declaration order with `REFERENCE_QBAR_LINKS` puts one
    structural complement link between the sixth and seventh cells.
    """
    n = Netlist(name="refchain")
    pi = n.add_input("pi0")
    for i in range(1, 11):
        n.add_dff(f"DFF{i}", pi)
    n.set_fanins("DFF1", (n.add_gate("g_in", GateKind.XOR, (pi, "DFF10")),))
    n.set_fanins("DFF2", ("DFF1",))
    n.set_fanins("DFF3", ("DFF2",))
    n.set_fanins("DFF4", (qbar("DFF3"),))
    n.set_fanins("DFF5", ("DFF4",))
    n.set_fanins("DFF6", ("DFF5",))
    n.set_fanins("DFF7", ("DFF6",))
    n.set_fanins("DFF8", ("DFF7",))
    n.set_fanins("DFF9", (qbar("DFF8"),))
    n.set_fanins("DFF10", ("DFF9",))
    n.add_output(n.add_gate("g_out", GateKind.XOR, ("DFF4", "DFF10")))
    return n
