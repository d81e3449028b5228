"""Cone analysis and key flip-flop selection."""

import pytest

from helpers import reachable_outputs
from scanlock import (
    GateKind,
    KeyTooLarge,
    Netlist,
    NoCandidates,
    eff_keymux_map,
    encrypt_flip_flop,
    fanout_outputs,
    icod,
    influence_map,
    pick_key_ffs,
    qbar,
    random_netlist,
    reference_chain,
    select_flip_flops,
    select_from_relation,
    split_ref,
)


def wide_cone_design() -> Netlist:
    """One flip-flop whose D cone spans six inputs and two key bits."""
    n = Netlist(name="wide")
    pis = [n.add_input(f"p{i}") for i in range(6)]
    n.add_key_input("k0")
    n.add_key_input("k1")
    n.add_dff("r0", "top")
    x1 = n.add_gate("x1", GateKind.XOR, (pis[0], "k0"))
    x2 = n.add_gate("x2", GateKind.XOR, (pis[1], "k1"))
    a1 = n.add_gate("a1", GateKind.AND, (x1, pis[2], pis[3]))
    a2 = n.add_gate("a2", GateKind.OR, (x2, pis[4], pis[5]))
    n.add_gate("top", GateKind.NAND, (a1, a2))
    n.add_output("top")
    return n


def test_icod_counts_inputs_keys_and_gates():
    n = wide_cone_design()
    c = icod(n, "r0")
    assert len(c.primary_inputs) == 6
    assert len(c.key_inputs) == 2
    assert c.flip_flops == frozenset()
    assert c.gate_count == 5


def test_icod_of_pins_and_unknowns():
    n = wide_cone_design()
    assert icod(n, "p0").primary_inputs == frozenset({"p0"})
    assert icod(n, "k0").key_inputs == frozenset({"k0"})
    with pytest.raises(KeyError):
        icod(n, "nonexistent")


def test_icod_stops_at_flip_flop_outputs():
    n = Netlist()
    a = n.add_input("a")
    n.add_dff("r1", "g1")
    n.add_dff("r2", "r1")
    n.add_gate("g1", GateKind.XOR, (a, "r2"))
    n.add_output("g1")
    c = icod(n, "g1")
    assert c.flip_flops == frozenset({"r2"})
    assert c.primary_inputs == frozenset({"a"})


def test_keymux_cut_hides_state_keys_from_cones():
    """A key mux on a flip-flop's output pair reads as the flip-flop
    itself: downstream cones list the state bit, not the key."""
    n = reference_chain()
    enc = encrypt_flip_flop(n, ["DFF1"], seed=1)
    m = eff_keymux_map(enc.netlist)
    assert list(m.values()) == ["DFF1"]
    mux = next(iter(m))
    consumer_cone = icod(enc.netlist, "DFF2")
    assert "DFF1" in consumer_cone.flip_flops
    assert consumer_cone.key_inputs == frozenset()
    assert mux not in consumer_cone.flip_flops
    # without the cut the same cone exposes the key input
    raw = icod(enc.netlist, "DFF2", cut_keymux=False)
    assert raw.key_inputs == {"k0"}


def test_eff_keymux_map_ignores_ordinary_data_muxes():
    n = Netlist()
    a = n.add_input("a")
    b = n.add_input("b")
    n.add_key_input("k0")
    n.add_dff("r1", "a")
    n.add_gate("m1", GateKind.MUX2, ("k0", a, b))       # not on a DFF pair
    n.add_gate("m2", GateKind.MUX2, (a, "r1", qbar("r1")))  # select not a key
    n.add_output("m1")
    n.add_output("m2")
    assert eff_keymux_map(n) == {}


def test_fanout_outputs_comb_vs_transitive():
    n = Netlist()
    a = n.add_input("a")
    n.add_dff("r1", "a")
    n.add_dff("r2", "g1")
    n.add_gate("g1", GateKind.XOR, (a, "r1"))
    n.add_gate("g2", GateKind.AND, (a, "r2"))
    n.add_output("g1")
    n.add_output("g2")
    fo = fanout_outputs(n, "r1")
    assert fo.comb == frozenset({"g1"})
    assert fo.transitive == frozenset({"g1", "g2"})


def test_influence_map_matches_independent_reachability():
    for seed in range(6):
        n = random_netlist(n_pi=5, n_dff=8, n_gates=30, n_po=4, seed=seed)
        inf = influence_map(n, transitive=True)
        for ff in n.dffs:
            assert inf[ff] == reachable_outputs(n, ff), (seed, ff)


def test_influence_map_comb_only_stops_at_registers():
    for seed in range(4):
        n = random_netlist(n_pi=5, n_dff=8, n_gates=30, n_po=4, seed=seed)
        inf = influence_map(n, transitive=False)
        # independent one-level reachability: do not cross flip-flops
        consumers = {}
        for node, (_, fins) in n.nodes.items():
            for r in fins:
                consumers.setdefault(split_ref(r)[0], []).append(node)
        for ff in n.dffs:
            reached, stack = set(), list(consumers.get(ff, ()))
            while stack:
                s = stack.pop()
                if s in reached or n.is_dff(s):
                    continue
                reached.add(s)
                stack.extend(consumers.get(s, ()))
            expect = frozenset(o for o in n.primary_outputs
                               if o in reached or o == ff)
            assert inf[ff] == expect, (seed, ff)


def test_selection_on_explicit_relation():
    rel = {
        "A": frozenset({"f1", "f2", "f3", "f6"}),
        "B": frozenset({"f1", "f2", "f3", "f7"}),
        "C": frozenset({"f6", "f9"}),
    }
    sel = select_from_relation(rel)
    assert sel.affected_outputs == ("A", "B")
    assert sel.l_strong == ("f1", "f2", "f3")
    assert sel.l_weak == ()
    assert sel.l_overlap == ("f1", "f2", "f3")
    assert sel.coverage_pct == pytest.approx(100.0 * 2 / 3)


def test_selection_reports_weak_members():
    rel = {
        "A": frozenset({"f1", "f2"}),
        "B": frozenset({"f1", "f2"}),
        "C": frozenset({"f2"}),
    }
    sel = select_from_relation(rel)
    assert sel.affected_outputs == ("A", "B")
    assert sel.l_strong == ("f1",)
    assert sel.l_weak == ("f2",)


def test_selection_floor_can_exhaust_candidates():
    ring = {
        "A": frozenset({"f1", "f4"}),
        "B": frozenset({"f1", "f2"}),
        "C": frozenset({"f2", "f3"}),
        "D": frozenset({"f3", "f4"}),
    }
    with pytest.raises(NoCandidates):
        select_from_relation(ring, floor=2)


def test_select_flip_flops_invariant_on_random_designs():
    """Every strong candidate influences all chosen outputs and nothing
    else; every weak member leaks outside.  Checked against the
    independent reachability model."""
    checked = 0
    for seed in range(8):
        n = random_netlist(n_pi=5, n_dff=9, n_gates=36, n_po=5, seed=100 + seed)
        try:
            sel = select_flip_flops(n)
        except NoCandidates:
            continue
        affected = set(sel.affected_outputs)
        for ff in sel.l_strong:
            assert set(reachable_outputs(n, ff)) == affected, (seed, ff)
        for ff in sel.l_weak:
            reach = set(reachable_outputs(n, ff))
            assert affected <= reach and reach - affected, (seed, ff)
        checked += 1
    assert checked >= 5


def test_pick_key_ffs_is_reproducible_and_bounded():
    n = random_netlist(n_pi=5, n_dff=10, n_gates=40, n_po=4, seed=3)
    sel = select_flip_flops(n)
    assert len(sel.l_strong) >= 3
    a = pick_key_ffs(sel, 3, seed=11)
    b = pick_key_ffs(sel, 3, seed=11)
    assert a == b == sorted(a)
    assert set(a) <= set(sel.l_strong)
    assert pick_key_ffs(sel, len(sel.l_strong), seed=0) == sorted(sel.l_strong)
    with pytest.raises(KeyTooLarge):
        pick_key_ffs(sel, len(sel.l_strong) + 1, seed=0)
    with pytest.raises(KeyTooLarge):
        pick_key_ffs(sel, len(sel.l_strong), seed=0, exclude=(sel.l_strong[0],))
