"""Input-cone analysis and key flip-flop selection.

The input cone of dependency (ICOD) of a signal is its transitive
fanin, cut at primary inputs, key inputs and flip-flop outputs.  A key
mux that sits directly on a flip-flop's Q/QBAR pair is treated as part
of the flip-flop's output: cones stop there without recording the key,
which is exactly what makes flip-flop-level encryption invisible to
cone-by-cone key recovery.

Selection follows a two-stage rule: find the set of outputs whose
(transitive) state cones overlap the most, take the common flip-flops,
then drop every flip-flop that also influences an output outside that
set.  Encrypting any subset of the survivors corrupts all of the chosen
outputs and nothing else.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .netlist import GateKind, Netlist, split_ref


class NoCandidates(ValueError):
    """Selection found no flip-flop whose influence stays inside the
    chosen output set."""


class KeyTooLarge(ValueError):
    def __init__(self, wanted: int, available: int):
        super().__init__(f"requested {wanted} key bits but only {available} candidate flip-flops")
        self.wanted = wanted
        self.available = available


@dataclass(frozen=True)
class Cone:
    root: str
    primary_inputs: frozenset[str]
    flip_flops: frozenset[str]
    key_inputs: frozenset[str]
    gate_count: int


def eff_keymux_map(n: Netlist) -> dict[str, str]:
    """Map each flip-flop-output key mux to its flip-flop.

    A node qualifies when it is a MUX2 whose select is a key input and
    whose data legs are the Q and QBAR outputs of one flip-flop.
    """
    out = {}
    keys = set(n.key_inputs)
    for node, (kind, fins) in n.nodes.items():
        if kind is not GateKind.MUX2:
            continue
        sel, a, b = fins
        if sel not in keys:
            continue
        (ba, ia), (bb, ib) = split_ref(a), split_ref(b)
        if ba == bb and ia != ib and n.is_dff(ba):
            out[node] = ba
    return out


def icod(n: Netlist, root: str, cut_keymux: bool = True) -> Cone:
    """Input cone of dependency of `root`.

    For a flip-flop, the cone of its D input; for a gate, the cone of
    its own value; for a primary or key input, just that pin.
    `gate_count` counts the combinational nodes inside the cone (key
    muxes on flip-flop outputs excluded when `cut_keymux`).
    """
    pis, ffs, keys = set(), set(), set()
    gates = set()
    keymux = eff_keymux_map(n) if cut_keymux else {}
    pi_set, key_set = set(n.primary_inputs), set(n.key_inputs)

    if root in pi_set:
        return Cone(root, frozenset((root,)), frozenset(), frozenset(), 0)
    if root in key_set:
        return Cone(root, frozenset(), frozenset(), frozenset((root,)), 0)
    if root not in n.nodes:
        raise KeyError(f"unknown signal {root!r}")

    if n.is_dff(root):
        stack = [n.fanins(root)[0]]
    else:
        stack = [root]
    seen = set()
    while stack:
        ref = stack.pop()
        base, _ = split_ref(ref)
        if base in seen:
            continue
        seen.add(base)
        if base in pi_set:
            pis.add(base)
        elif base in key_set:
            keys.add(base)
        elif n.is_dff(base):
            ffs.add(base)
        elif base in keymux:
            ffs.add(keymux[base])
        else:
            gates.add(base)
            stack.extend(n.fanins(base))
    return Cone(root, frozenset(pis), frozenset(ffs), frozenset(keys), len(gates))


@dataclass(frozen=True)
class FanoutResult:
    comb: frozenset[str]
    transitive: frozenset[str]


def _forward_step(n: Netlist, consumers: dict, po_set: set, start: str):
    """Outputs and flip-flops reached from `start`'s output through
    combinational logic only (one sequential level)."""
    pos, ffs = set(), set()
    if start in po_set:
        pos.add(start)
    stack = [node for node, _ in consumers.get(start, ())]
    seen = set()
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if n.is_dff(node):
            ffs.add(node)
            continue
        if node in po_set:
            pos.add(node)
        stack.extend(nd for nd, _ in consumers.get(node, ()))
    return pos, ffs


def fanout_outputs(n: Netlist, ff: str) -> FanoutResult:
    """Primary outputs influenced by flip-flop `ff`.

    `comb` holds outputs reached through combinational paths alone;
    `transitive` additionally follows paths through other flip-flops
    over any number of cycles.
    """
    consumers = n.fanout_map()
    po_set = set(n.primary_outputs)
    pos, ffs = _forward_step(n, consumers, po_set, ff)
    comb = frozenset(pos)
    seen_ff = {ff} | ffs
    frontier = list(ffs)
    while frontier:
        cur = frontier.pop()
        p2, f2 = _forward_step(n, consumers, po_set, cur)
        pos |= p2
        for f in f2:
            if f not in seen_ff:
                seen_ff.add(f)
                frontier.append(f)
    return FanoutResult(comb=comb, transitive=frozenset(pos))


def influence_map(n: Netlist, transitive: bool = True) -> dict[str, frozenset[str]]:
    """For every flip-flop, the set of primary outputs it influences."""
    consumers = n.fanout_map()
    po_set = set(n.primary_outputs)
    step = {ff: _forward_step(n, consumers, po_set, ff) for ff in n.dffs}
    if not transitive:
        return {ff: frozenset(p) for ff, (p, _) in step.items()}
    # transitive closure over the ff -> ff next-state edges, as bitsets
    ffs = list(n.dffs)
    idx = {f: i for i, f in enumerate(ffs)}
    reach = [0] * len(ffs)
    pos = [set(step[f][0]) for f in ffs]
    for f in ffs:
        m = 0
        for g in step[f][1]:
            m |= 1 << idx[g]
        reach[idx[f]] = m
    changed = True
    while changed:
        changed = False
        for i in range(len(ffs)):
            m = reach[i]
            nm = m
            mm = m
            while mm:
                j = (mm & -mm).bit_length() - 1
                mm &= mm - 1
                nm |= reach[j]
            if nm != m:
                reach[i] = nm
                changed = True
    out = {}
    for i, f in enumerate(ffs):
        acc = set(pos[i])
        mm = reach[i]
        while mm:
            j = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            acc |= pos[j]
        out[f] = frozenset(acc)
    return out


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of the output-overlap selection.

    `affected_outputs` is the chosen output set; every flip-flop in
    `l_strong` influences all of them and nothing else.  `l_weak` holds
    the members of the overlap that leak to outside outputs.
    """

    affected_outputs: tuple[str, ...]
    l_overlap: tuple[str, ...]
    l_weak: tuple[str, ...]
    l_strong: tuple[str, ...]
    coverage_pct: float


def select_from_relation(output_ffs: dict[str, frozenset[str]], total_outputs: int | None = None,
                         floor: int = 1) -> SelectionResult:
    """Core selection over an explicit output -> flip-flop relation.

    Greedy search: each output seeds a growing set; at every step the
    output that keeps the running intersection largest is added (ties
    by id), stopping once no candidate keeps the intersection at
    `floor` or above.  The step whose strong set is largest wins, over
    all seeds.

    Raises :class:`NoCandidates` when every choice leaves the strong
    set empty.
    """
    outputs = sorted(output_ffs)
    total = total_outputs if total_outputs is not None else len(outputs)
    ff_outputs: dict[str, set[str]] = {}
    for o, ffs in output_ffs.items():
        for f in ffs:
            ff_outputs.setdefault(f, set()).add(o)

    def strong_weak(chosen: set[str], overlap: frozenset[str]):
        weak = {f for f in overlap if ff_outputs[f] - chosen}
        return overlap - weak, weak

    best = None  # (|strong|, -|chosen|, seed, chosen, overlap, strong, weak)
    for seed in outputs:
        chosen = {seed}
        overlap = frozenset(output_ffs[seed])
        strong, weak = strong_weak(chosen, overlap)
        cand = (len(strong), -len(chosen), seed, set(chosen), overlap, strong, weak)
        if best is None or cand[:2] > best[:2]:
            best = cand
        while True:
            pick, pick_inter = None, None
            for o in outputs:
                if o in chosen:
                    continue
                inter = overlap & output_ffs[o]
                if len(inter) < floor:
                    continue
                if pick is None or len(inter) > len(pick_inter) or (
                        len(inter) == len(pick_inter) and o < pick):
                    pick, pick_inter = o, inter
            if pick is None:
                break
            chosen.add(pick)
            overlap = frozenset(pick_inter)
            strong, weak = strong_weak(chosen, overlap)
            cand = (len(strong), -len(chosen), seed, set(chosen), overlap, strong, weak)
            if cand[:2] > best[:2]:
                best = cand
    if best is None or best[0] == 0:
        raise NoCandidates("no flip-flop influences only the overlapping outputs")
    _, _, _, chosen, overlap, strong, weak = best
    return SelectionResult(
        affected_outputs=tuple(sorted(chosen)),
        l_overlap=tuple(sorted(overlap)),
        l_weak=tuple(sorted(weak)),
        l_strong=tuple(sorted(strong)),
        coverage_pct=100.0 * len(chosen) / total if total else 0.0,
    )


def select_flip_flops(n: Netlist, transitive: bool = True, floor: int = 1) -> SelectionResult:
    """Pick the flip-flops worth encrypting in `n`.

    Influence is evaluated transitively through other flip-flops by
    default (an encrypted flip-flop corrupts state that reaches an
    output cycles later); `transitive=False` restricts the relation to
    one combinational level.
    """
    inf = influence_map(n, transitive=transitive)
    output_ffs: dict[str, set[str]] = {o: set() for o in n.primary_outputs}
    for ff, pos in inf.items():
        for o in pos:
            output_ffs[o].add(ff)
    rel = {o: frozenset(s) for o, s in output_ffs.items() if s}
    if not rel:
        raise NoCandidates("no output depends on any flip-flop")
    return select_from_relation(rel, total_outputs=len(n.primary_outputs), floor=floor)


def pick_key_ffs(selection: SelectionResult, k: int, seed: int, exclude=()) -> list[str]:
    """Draw `k` flip-flops from the strong candidates, reproducibly.

    Requesting every candidate returns them in canonical (sorted)
    order; otherwise a seeded sample is taken.  Raises
    :class:`KeyTooLarge` when fewer than `k` remain after `exclude`.
    """
    pool = sorted(set(selection.l_strong) - set(exclude))
    if k > len(pool):
        raise KeyTooLarge(k, len(pool))
    if k == len(pool):
        return pool
    return sorted(random.Random(seed).sample(pool, k))
