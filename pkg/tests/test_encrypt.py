"""Key-gate insertion schemes and scan-chain construction."""

import random

import pytest

from helpers import reachable_outputs, ref_trace
from scanlock import (
    EncryptError,
    GateKind,
    KeyTooLarge,
    Netlist,
    discover_scan,
    eff_keymux_map,
    encrypt_flip_flop,
    encrypt_mux_random,
    encrypt_oc,
    encrypt_xor_random,
    insert_scan,
    insert_scan_controller,
    qbar,
    random_netlist,
    reference_chain,
    scan_order_guarded_first,
    split_ref,
    strip_scan,
    validate,
    write_bench,
    REFERENCE_LOCKED,
    REFERENCE_QBAR_LINKS,
)
from scanlock.sim import SimState


def equivalent_under_key(orig: Netlist, enc) -> bool:
    """Compare short reference traces of the original design and the
    encrypted one under its correct key."""
    rng = random.Random(0xE0)
    rows = [[rng.getrandbits(1) for _ in orig.primary_inputs] for _ in range(24)]
    return ref_trace(orig, (), rows) == ref_trace(enc.netlist, enc.correct_key, rows)


# ----------------------------------------------------------------------
# flip-flop locking


def test_eff_adds_one_mux_and_key_per_flip_flop():
    n = reference_chain()
    enc = encrypt_flip_flop(n, list(REFERENCE_LOCKED), seed=7)
    assert len(enc.netlist.key_inputs) == 5
    assert len(enc.netlist.nodes) == len(n.nodes) + 5
    assert len(enc.correct_key) == 5
    assert [p.site for p in enc.placements] == list(REFERENCE_LOCKED)
    assert enc.scheme == "eff"
    assert validate(enc.netlist) == []


def test_eff_correct_bit_tracks_consumed_output():
    """With leg randomization off, the correct bit is exactly the
    complement-consumption flag of the locked flip-flop."""
    n = reference_chain()
    enc = encrypt_flip_flop(n, list(REFERENCE_LOCKED), seed=99,
                            randomize_polarity=False)
    assert enc.key_string() == "01010"
    polarities = [p.polarity for p in enc.placements]
    assert polarities == ["q-direct", "qbar-direct", "q-direct",
                          "qbar-direct", "q-direct"]


def test_eff_leg_swap_flips_the_correct_bit():
    n = reference_chain()
    for seed in range(12):
        enc = encrypt_flip_flop(n, list(REFERENCE_LOCKED), seed=seed)
        for bit, p in zip(enc.correct_key, enc.placements):
            used_qbar = p.polarity.startswith("qbar")
            swapped = p.polarity.endswith("swapped")
            assert bit == (used_qbar ^ swapped)
        assert equivalent_under_key(n, enc)


def test_eff_rewires_every_consumer_to_the_mux():
    n = reference_chain()
    enc = encrypt_flip_flop(n, ["DFF3"], seed=0)
    m = enc.netlist
    mux = next(iter(eff_keymux_map(m)))
    # DFF3's complement was the consumed form; only the mux reads it now
    readers = [node for node, (_, fins) in m.nodes.items()
               if qbar("DFF3") in fins]
    assert readers == [mux]
    assert m.fanins("DFF4") == (mux,)


def test_eff_rejects_double_sided_fanout_and_bad_names():
    n = reference_chain()
    n.add_gate("spy", GateKind.NOT, (qbar("DFF2"),))  # DFF2 now fans out both forms
    n.add_output("spy")
    with pytest.raises(EncryptError, match="fans out both"):
        encrypt_flip_flop(n, ["DFF2"])
    with pytest.raises(EncryptError, match="not a flip-flop"):
        encrypt_flip_flop(reference_chain(), ["g_out"])
    with pytest.raises(EncryptError, match="duplicate"):
        encrypt_flip_flop(reference_chain(), ["DFF1", "DFF1"])


def test_eff_wrong_key_corrupts_outputs():
    n = reference_chain()
    enc = encrypt_flip_flop(n, list(REFERENCE_LOCKED), seed=7)
    wrong = tuple(b ^ 1 for b in enc.correct_key)
    rng = random.Random(5)
    rows = [[rng.getrandbits(1) for _ in n.primary_inputs] for _ in range(24)]
    assert ref_trace(enc.netlist, wrong, rows) != ref_trace(n, (), rows)


# ----------------------------------------------------------------------
# net-splice schemes


@pytest.mark.parametrize("scheme,fn,nodes_per_key", [
    ("xor", encrypt_xor_random, 1),
    ("mux", encrypt_mux_random, 1),
    ("oc", encrypt_oc, 2),
])
def test_splice_schemes_structure_and_equivalence(scheme, fn, nodes_per_key):
    for seed in range(5):
        n = random_netlist(n_pi=5, n_dff=6, n_gates=30, n_po=4, seed=40 + seed)
        enc = fn(n, 4, seed=seed)
        assert enc.scheme == scheme
        assert len(enc.correct_key) == 4
        assert len(enc.netlist.key_inputs) == 4
        assert len(enc.netlist.nodes) == len(n.nodes) + 4 * nodes_per_key
        assert validate(enc.netlist) == []
        assert equivalent_under_key(n, enc)


def test_xor_gate_kind_encodes_the_correct_bit():
    n = random_netlist(n_pi=5, n_dff=6, n_gates=30, n_po=4, seed=9)
    enc = encrypt_xor_random(n, 6, seed=3)
    m = enc.netlist
    for bit, p in zip(enc.correct_key, enc.placements):
        gate = next(node for node, (_, fins) in m.nodes.items() if p.key in fins)
        want = GateKind.XNOR if bit else GateKind.XOR
        assert m.kind(gate) is want


def test_splice_sites_are_observable_and_distinct():
    for seed in range(5):
        n = random_netlist(n_pi=5, n_dff=6, n_gates=30, n_po=4, seed=60 + seed)
        enc = encrypt_xor_random(n, 5, seed=seed)
        sites = [p.site for p in enc.placements]
        assert len(set(sites)) == len(sites)
        for p in enc.placements:
            gate = next(node for node, (_, fins) in enc.netlist.nodes.items()
                        if p.key in fins)
            assert reachable_outputs(enc.netlist, gate), p


def test_splice_scheme_key_capacity_is_bounded():
    n = Netlist()
    a = n.add_input("a")
    b = n.add_input("b")
    n.add_gate("g1", GateKind.AND, (a, b))
    n.add_gate("g2", GateKind.OR, ("g1", a))
    n.add_output("g2")
    with pytest.raises(KeyTooLarge):
        encrypt_xor_random(n, 2)  # only g1 is spliceable


def test_mux_decoys_never_create_cycles():
    checked = 0
    for seed in range(40):
        n = random_netlist(n_pi=5, n_dff=5, n_gates=28, n_po=3, seed=seed)
        try:
            enc = encrypt_mux_random(n, 5, seed=seed * 13 + 1)
        except KeyTooLarge:
            continue  # this draw has fewer than 5 observable nets
        assert validate(enc.netlist) == []
        checked += 1
    assert checked >= 30


def test_oc_cell_is_mux_plus_inverter():
    n = random_netlist(n_pi=5, n_dff=6, n_gates=30, n_po=4, seed=77)
    enc = encrypt_oc(n, 3, seed=2)
    m = enc.netlist

    def is_inverter(ref):
        base, inv_tap = split_ref(ref)
        return not inv_tap and base in m.nodes and m.kind(base) is GateKind.NOT

    for p in enc.placements:
        gate = next(node for node, (_, fins) in m.nodes.items() if p.key in fins)
        sel, leg0, leg1 = m.fanins(gate)
        inv = leg0 if is_inverter(leg0) else leg1
        other = leg1 if inv == leg0 else leg0
        assert is_inverter(inv)
        assert m.fanins(inv) == (other,)  # the inverter complements the true net


# ----------------------------------------------------------------------
# scan construction


def test_insert_scan_builds_one_chain_over_all_flip_flops():
    n = reference_chain()
    scanned, sc = insert_scan(n, qbar_links=set())
    assert sc.chain == tuple(n.dffs)
    assert set(sc.link_polarity) == {"Q"}
    assert sc.si in scanned.primary_inputs
    assert sc.se in scanned.primary_inputs
    assert sc.so in scanned.primary_outputs
    for ff in sc.chain:
        mux = scanned.fanins(ff)[0]
        assert scanned.kind(mux) is GateKind.MUX2
        assert scanned.fanins(mux)[0] == sc.se
    assert validate(scanned) == []


def test_insert_scan_checks_order_and_link_indices():
    n = reference_chain()
    with pytest.raises(EncryptError, match="permutation"):
        insert_scan(n, order=list(n.dffs)[:-1])
    with pytest.raises(EncryptError, match="out of range"):
        insert_scan(n, qbar_links={42})


def test_qbar_link_is_refused_on_a_key_muxed_cell():
    enc = encrypt_flip_flop(reference_chain(), ["DFF2"], seed=0)
    pos = list(enc.netlist.dffs).index("DFF2")
    with pytest.raises(EncryptError, match="QBAR link"):
        insert_scan(enc.netlist, qbar_links={pos})


def test_raw_q_tap_keeps_shifting_key_independent():
    enc = encrypt_flip_flop(reference_chain(), list(REFERENCE_LOCKED), seed=3)
    kmux = eff_keymux_map(enc.netlist)

    routed, sc = insert_scan(enc.netlist, qbar_links=set())
    raw, sc_raw = insert_scan(enc.netlist, qbar_links=set(), tap="q")
    # default mode puts a key mux on the first locked cell's link,
    # raw mode wires the flip-flop straight through
    nxt = sc.chain[sc.chain.index("DFF1") + 1]
    assert routed.fanins(routed.fanins(nxt)[0])[2] in kmux
    assert raw.fanins(raw.fanins(nxt)[0])[2] == "DFF1"

    # an all-ones pattern shifted across differing keys: raw taps give
    # the same stream, key-routed taps do not
    streams = []
    for netl, cfg in ((routed, sc), (raw, sc_raw)):
        per_key = []
        for key in ("00000", "11111"):
            st = SimState(netl, key=key, scan=cfg)
            st.scan_load("1" * 10)
            per_key.append(st.scan_unload())
        streams.append(per_key)
    assert streams[0][0] != streams[0][1]
    assert streams[1][0] == streams[1][1]

    # raw mode frees the complement link on locked cells and keeps
    # functional behavior intact
    pos = list(enc.netlist.dffs).index("DFF1")
    withq, _ = insert_scan(enc.netlist, qbar_links={pos}, tap="q")
    assert validate(withq) == []
    assert equivalent_under_key(reference_chain(), enc)
    with pytest.raises(EncryptError, match="tap mode"):
        insert_scan(enc.netlist, tap="raw")


def test_scan_is_transparent_in_functional_mode():
    n = reference_chain()
    scanned, sc = insert_scan(n, seed=4)
    rng = random.Random(1)
    rows = [[rng.getrandbits(1) for _ in n.primary_inputs] for _ in range(20)]
    ref = ref_trace(n, (), rows)
    st = SimState(scanned, scan=sc)
    got = [st.step_functional(row)[: len(n.primary_outputs)] for row in rows]
    assert [tuple(r) for r in ref] == [tuple(g) for g in got]


def test_strip_scan_recovers_the_original_text():
    for seed in range(4):
        n = random_netlist(n_pi=4, n_dff=7, n_gates=25, n_po=3, seed=seed)
        scanned, sc = insert_scan(n, seed=seed)
        assert write_bench(strip_scan(scanned, sc)) == write_bench(n)


def test_strip_scan_removes_the_controller_too():
    n = reference_chain()
    scanned, sc = insert_scan(n, seed=1)
    guarded, sc2 = insert_scan_controller(scanned, sc)
    restored = strip_scan(guarded, sc2)
    assert write_bench(restored) == write_bench(n)


def test_controller_cannot_be_inserted_twice():
    scanned, sc = insert_scan(reference_chain())
    guarded, sc2 = insert_scan_controller(scanned, sc)
    with pytest.raises(EncryptError, match="already present"):
        insert_scan_controller(guarded, sc2)


def test_controller_blocks_scan_after_reset_until_functional_cycle():
    scanned, sc = insert_scan(reference_chain(), qbar_links=set())
    guarded, sc2 = insert_scan_controller(scanned, sc)
    st = SimState(guarded, scan=sc2, power_up_seed=11)
    st.step_functional([0])  # settle the power-up lockout state
    st.scan_load("1" * 10)
    assert st.cells() == "1" * 10  # scan works before any reset
    st.global_reset()
    before = st.cells()
    st.scan_load("1" * 10)
    assert st.blocked_shifts == 10
    assert st.cells() == before  # lockout held the state still
    st.step_functional([0])  # scan-enable low releases the lockout
    st.scan_load("1" * 10)
    assert st.cells() == "1" * 10
    assert st.blocked_shifts == 10


def test_discover_scan_reconstructs_the_inserted_config():
    for seed in range(6):
        n = random_netlist(n_pi=4, n_dff=8, n_gates=30, n_po=3, seed=seed)
        ffs = sorted(n.dffs)
        enc = encrypt_flip_flop(n, ffs[:3], seed=seed)
        order = list(enc.netlist.dffs)
        random.Random(seed).shuffle(order)
        scanned, sc = insert_scan(enc.netlist, order=order, seed=seed + 1)
        assert discover_scan(scanned) == sc
        guarded, sc2 = insert_scan_controller(scanned, sc)
        assert discover_scan(guarded) == sc2


def test_discover_scan_returns_none_without_a_chain():
    assert discover_scan(reference_chain()) is None


def test_guarded_first_order_moves_an_unlocked_cell_forward():
    n = reference_chain()
    enc = encrypt_flip_flop(n, ["DFF1", "DFF3"], seed=0)
    order = scan_order_guarded_first(enc.netlist)
    assert order[0] == "DFF2"
    assert order.index("DFF1") == 1
    assert sorted(order) == sorted(n.dffs)
    # unlocked head stays put
    enc2 = encrypt_flip_flop(n, ["DFF3"], seed=0)
    assert scan_order_guarded_first(enc2.netlist)[0] == "DFF1"
