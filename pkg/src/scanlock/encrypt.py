"""Key-gate insertion and scan-chain construction.

Four locking transforms share one result shape: the modified netlist,
the correct key, and one placement record per key bit.  All of them are
equivalence-preserving under the correct key and seeded for
reproducibility.

* :func:`encrypt_flip_flop` puts a key mux on the Q/QBAR pair of chosen
  flip-flops; a wrong bit feeds the complemented state onward.
* :func:`encrypt_xor_random` splices XOR/XNOR gates on random nets.
* :func:`encrypt_mux_random` splices muxes choosing between the true
  net and a random decoy.
* :func:`encrypt_oc` splices mux+inverter cells that complement the
  net under a wrong bit.

Scan construction (:func:`insert_scan`) muxes every flip-flop's D
between its functional driver and the previous chain cell; flip-flops
behind a key mux scan through the mux, so shifted data picks up the
key-controlled inversions.  :func:`insert_scan_controller` adds the
reset-triggered lockout that blocks scan access right after a reset
until scan-enable has gone low again.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from .cone import KeyTooLarge, eff_keymux_map
from .netlist import (
    CTRL_AND,
    CTRL_EN,
    CTRL_OR,
    CTRL_RST,
    CTRL_STATE,
    GateKind,
    Netlist,
    ScanConfig,
    qbar,
    split_ref,
    validate,
)


class EncryptError(ValueError):
    pass


@dataclass(frozen=True)
class Placement:
    key: str
    scheme: str
    site: str
    polarity: str  # "direct" or "swapped" data legs


@dataclass
class EncryptionResult:
    netlist: Netlist
    correct_key: tuple[int, ...]
    placements: list[Placement] = field(default_factory=list)
    scheme: str = ""

    def key_string(self) -> str:
        return "".join(str(b) for b in self.correct_key)

    def key_sites(self) -> list[tuple[str, str]]:
        return [(p.key, p.site) for p in self.placements]


def _fresh_key(n: Netlist) -> str:
    i = len(n.key_inputs)
    while n.is_defined(f"k{i}"):
        i += 1
    return n.add_key_input(f"k{i}")


def _rewire(n: Netlist, old_sig: str, new_sig: str, skip=()):
    """Point every plain reference to `old_sig` (and any output
    declaration) at `new_sig`, except inside `skip` nodes."""
    for node, (kind, fins) in list(n.nodes.items()):
        if node in skip:
            continue
        if old_sig in fins:
            n.nodes[node] = (kind, tuple(new_sig if f == old_sig else f for f in fins))
    n.primary_outputs = [new_sig if o == old_sig else o for o in n.primary_outputs]


def _used_output(n: Netlist, ff: str) -> bool:
    """True when the design consumes the flip-flop's complement output.

    Raises when both outputs fan out: the lock replaces exactly one
    used signal with the mux output and keeps the other leg private to
    the mux.
    """
    q_used = ff in n.primary_outputs
    qb_used = False
    qb = qbar(ff)
    for _, fins in n.nodes.values():
        if ff in fins:
            q_used = True
        if qb in fins:
            qb_used = True
    if q_used and qb_used:
        raise EncryptError(f"{ff!r} fans out both Q and its complement; cannot lock")
    return qb_used


def encrypt_flip_flop(n: Netlist, ffs, seed: int = 0,
                      randomize_polarity: bool = True) -> EncryptionResult:
    """Lock flip-flops behind key muxes.

    Each chosen flip-flop gets a MUX2 whose select is a fresh key
    input and whose data legs are its Q and complement outputs; every
    former consumer of the flip-flop's used output is rewired to the
    mux.  The correct bit is the one that selects that used output, so
    a wrong bit replays the complemented state into all downstream
    logic.  After rewiring, nothing in the structure says which leg
    the original design consumed; scan access is what leaks it.

    Parameters
    ----------
    n : Netlist
        Source design; not modified.
    ffs : sequence of str
        Flip-flops to encrypt, in key order (bit i locks ffs[i]).
    seed : int
        Drives the per-mux leg-order coin when `randomize_polarity`.
    randomize_polarity : bool
        When False the legs stay in (Q, complement) order; the correct
        bit then equals 1 exactly on complement-consuming sites.

    Returns
    -------
    EncryptionResult
        ``netlist`` gains one MUX2 and one key input per flip-flop and
        is functionally identical to `n` under the correct key.
    """
    ffs = list(ffs)
    if len(set(ffs)) != len(ffs):
        raise EncryptError("duplicate flip-flop in encryption list")
    out = n.copy()
    rng = random.Random(seed)
    bits, placements = [], []
    for ff in ffs:
        if not out.is_dff(ff):
            raise EncryptError(f"{ff!r} is not a flip-flop")
        used_qbar = _used_output(out, ff)
        key = _fresh_key(out)
        swap = rng.getrandbits(1) if randomize_polarity else 0
        legs = (qbar(ff), ff) if swap else (ff, qbar(ff))
        bit = used_qbar ^ swap
        mux = out.fresh(f"kg{len(out.key_inputs) - 1}")
        out.add_gate(mux, GateKind.MUX2, (key, *legs))
        _rewire(out, qbar(ff) if used_qbar else ff, mux, skip={mux})
        bits.append(bit)
        placements.append(Placement(
            key, "eff", ff,
            ("qbar" if used_qbar else "q") + ("-swapped" if swap else "-direct")))
    return EncryptionResult(out, tuple(bits), placements, "eff")


def _observable_nodes(n: Netlist) -> set[str]:
    """Nodes with a path to a primary output, crossing flip-flops.

    Registers are traversed only once they are reached from an output,
    so logic that merely feeds a dead flip-flop stays out of the set; a
    key spliced there could never corrupt anything.
    """
    live: set[str] = set()
    stack = [split_ref(ref)[0] for ref in n.primary_outputs]
    while stack:
        sig = stack.pop()
        if sig in live:
            continue
        live.add(sig)
        entry = n.nodes.get(sig)
        if entry is not None:
            stack.extend(split_ref(ref)[0] for ref in entry[1])
    return live


def _splice_sites(n: Netlist, k: int, rng: random.Random) -> list[str]:
    """Pick `k` distinct splice points, each returned in the form the
    design reads (`sig` or `!sig`), restricted to observable nets."""
    live = _observable_nodes(n) - set(n.primary_outputs)
    eligible = sorted(s for s in n.nodes if s in live)
    if k > len(eligible):
        raise KeyTooLarge(k, len(eligible))
    plain_read = {split_ref(ref)[0] for ref in n.primary_outputs
                  if not split_ref(ref)[1]}
    for _, fanins in n.nodes.values():
        plain_read.update(base for base, inv in map(split_ref, fanins)
                          if not inv)
    return [s if s in plain_read else qbar(s)
            for s in rng.sample(eligible, k)]


def encrypt_xor_random(n: Netlist, k: int, seed: int = 0) -> EncryptionResult:
    """Splice `k` XOR/XNOR key gates on distinct random internal nets.

    A gate is XOR when its correct bit is 0 and XNOR when it is 1, so
    the correct key always reduces every gate to a buffer.
    """
    out = n.copy()
    rng = random.Random(seed)
    bits, placements = [], []
    for site in _splice_sites(out, k, rng):
        key = _fresh_key(out)
        bit = rng.getrandbits(1)
        kind = GateKind.XNOR if bit else GateKind.XOR
        gate = out.fresh(f"kg{len(out.key_inputs) - 1}")
        out.add_gate(gate, kind, (site, key))
        _rewire(out, site, gate, skip={gate})
        bits.append(bit)
        placements.append(Placement(key, "xor", site, "direct"))
    return EncryptionResult(out, tuple(bits), placements, "xor")


def _comb_downstream(n: Netlist, start: str) -> set[str]:
    """Nodes combinationally reachable from `start`'s output (cut at
    flip-flop D pins)."""
    consumers = n.fanout_map()
    seen, stack = set(), [nd for nd, _ in consumers.get(start, ())]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if n.is_dff(node):
            continue
        stack.extend(nd for nd, _ in consumers.get(node, ()))
    return seen


def encrypt_mux_random(n: Netlist, k: int, seed: int = 0) -> EncryptionResult:
    """Splice `k` key muxes, each choosing between the true net and a
    random decoy net that cannot close a combinational cycle."""
    out = n.copy()
    rng = random.Random(seed)
    bits, placements = [], []
    for site in _splice_sites(out, k, rng):
        base = split_ref(site)[0]
        banned = _comb_downstream(out, base) | {base}
        decoys = sorted(
            s for s in list(out.nodes) + out.primary_inputs
            if s not in banned and s not in set(out.key_inputs))
        if not decoys:
            raise EncryptError(f"no acyclic decoy available for {site!r}")
        decoy = decoys[rng.randrange(len(decoys))]
        key = _fresh_key(out)
        bit = rng.getrandbits(1)
        legs = (decoy, site) if bit else (site, decoy)
        gate = out.fresh(f"kg{len(out.key_inputs) - 1}")
        out.add_gate(gate, GateKind.MUX2, (key, *legs))
        _rewire(out, site, gate, skip={gate})
        bits.append(bit)
        placements.append(Placement(key, "mux", site, "swapped" if bit else "direct"))
    diags = validate(out)
    if diags:
        raise EncryptError(f"mux insertion broke the netlist: {diags[0]}")
    return EncryptionResult(out, tuple(bits), placements, "mux")


def encrypt_oc(n: Netlist, k: int, seed: int = 0) -> EncryptionResult:
    """Splice `k` obfuscation cells (mux plus inverter).  A wrong bit
    complements the net; the cell costs two nodes per key."""
    out = n.copy()
    rng = random.Random(seed)
    bits, placements = [], []
    for site in _splice_sites(out, k, rng):
        key = _fresh_key(out)
        idx = len(out.key_inputs) - 1
        inv = out.add_gate(out.fresh(f"kg{idx}inv"), GateKind.NOT, (site,))
        bit = rng.getrandbits(1)
        legs = (inv, site) if bit else (site, inv)
        gate = out.fresh(f"kg{idx}")
        out.add_gate(gate, GateKind.MUX2, (key, *legs))
        _rewire(out, site, gate, skip={gate, inv})
        bits.append(bit)
        placements.append(Placement(key, "oc", site, "swapped" if bit else "direct"))
    return EncryptionResult(out, tuple(bits), placements, "oc")


# ----------------------------------------------------------------------
# scan construction

def _effective_out(n: Netlist, ff: str, polarity: str, keymux_of: dict[str, str]) -> str:
    mux = keymux_of.get(ff)
    if mux is not None:
        if polarity == "QBAR":
            raise EncryptError(f"{ff!r} scans through its key mux; QBAR link is not available")
        return mux
    return qbar(ff) if polarity == "QBAR" else ff


def insert_scan(n: Netlist, order=None, qbar_links=None, seed: int = 0,
                tap: str = "keymux") -> tuple[Netlist, ScanConfig]:
    """Stitch every flip-flop into one scan chain.

    Parameters
    ----------
    n : Netlist
        Design to modify (a copy is returned).
    order : sequence of str, optional
        Chain order, scan-in side first.  Must be a permutation of
        ``n.dffs``; defaults to declaration order.
    qbar_links : iterable of int, optional
        Chain positions whose outgoing link taps the complement output
        (position len-1 is the scan-out tap).  In "keymux" tap mode
        only legal on flip-flops that do not sit behind a key mux.
        When None, a seeded random subset of the legal positions is
        complemented.
    seed : int
        Used only when `qbar_links` is None.
    tap : str
        "keymux" routes the chain link of a locked flip-flop through
        its key mux, so the applied key shapes shifted data; "q" taps
        the raw flip-flop output everywhere, keeping shifting
        key-independent.

    Returns
    -------
    (Netlist, ScanConfig)
        The scanned design and its chain description.  With scan-enable
        low the design behaves exactly like `n`.
    """
    if tap not in ("keymux", "q"):
        raise EncryptError(f"unknown tap mode {tap!r}; pick 'keymux' or 'q'")
    out = n.copy()
    order = list(order) if order is not None else list(n.dffs)
    if sorted(order) != sorted(n.dffs) or len(order) != len(n.dffs):
        raise EncryptError("scan order must be a permutation of the flip-flop list")
    keymux_of = {} if tap == "q" else {ff: mux for mux, ff in eff_keymux_map(out).items()}

    if qbar_links is None:
        rng = random.Random(seed)
        qbar_links = {i for i, ff in enumerate(order)
                      if ff not in keymux_of and rng.random() < 0.2}
    qbar_links = set(qbar_links)
    for i in qbar_links:
        if not 0 <= i < len(order):
            raise EncryptError(f"qbar link index {i} out of range")
    polarity = tuple("QBAR" if i in qbar_links else "Q" for i in range(len(order)))

    si = out.fresh("scan_in")
    out.add_input(si)
    se = out.fresh("scan_en")
    out.add_input(se)
    for i, ff in enumerate(order):
        source = si if i == 0 else _effective_out(out, order[i - 1], polarity[i - 1], keymux_of)
        mux = out.fresh(f"sm_{ff}")
        out.add_gate(mux, GateKind.MUX2, (se, out.fanins(ff)[0], source))
        out.set_fanins(ff, (mux,))
    so = out.fresh("scan_out")
    out.add_gate(so, GateKind.BUF,
                 (_effective_out(out, order[-1], polarity[-1], keymux_of),))
    out.add_output(so)
    sc = ScanConfig(chain=tuple(order), link_polarity=polarity,
                    controller=False, si=si, so=so, se=se, rst=None)
    return out, sc


def insert_scan_controller(n: Netlist, sc: ScanConfig) -> tuple[Netlist, ScanConfig]:
    """Add the post-reset scan lockout.

    Four gates and one flip-flop: the state flop latches RST through an
    OR and holds via an AND with scan-enable; their XOR gates the scan
    muxes, so scan is dead from a reset until scan-enable drops; a
    final AND of RST with the state flop's complement produces the
    one-cycle pulse that actually clears the functional flip-flops.
    Raises :class:`EncryptError` if a controller is already present.
    """
    if sc.controller or CTRL_STATE in n.nodes:
        raise EncryptError("scan controller already present")
    out = n.copy()
    rst = out.fresh("scan_rst")
    out.add_input(rst)
    out.add_dff(CTRL_STATE, CTRL_OR)
    out.add_gate(CTRL_AND, GateKind.AND, (CTRL_STATE, sc.se))
    out.add_gate(CTRL_OR, GateKind.OR, (rst, CTRL_AND))
    out.add_gate(CTRL_EN, GateKind.XOR, (CTRL_AND, sc.se))
    out.add_gate(CTRL_RST, GateKind.AND, (rst, qbar(CTRL_STATE)))
    for ff in sc.chain:
        mux = out.fanins(ff)[0]
        kind, fins = out.nodes[mux]
        if kind is not GateKind.MUX2 or fins[0] != sc.se:
            raise EncryptError(f"{ff!r} has no scan mux driven by {sc.se!r}")
        out.nodes[mux] = (kind, (CTRL_EN, fins[1], fins[2]))
    return out, replace(sc, controller=True, rst=rst)


def strip_scan(n: Netlist, sc: ScanConfig) -> Netlist:
    """Undo scan insertion (and the controller if present), recovering
    the functional design for analysis."""
    out = n.copy()
    for ff in sc.chain:
        mux = out.fanins(ff)[0]
        kind, fins = out.nodes[mux]
        if kind is not GateKind.MUX2:
            raise EncryptError(f"{ff!r} is not scan-muxed")
        out.set_fanins(ff, (fins[1],))
        del out.nodes[mux]
    out.primary_outputs = [o for o in out.primary_outputs if o != sc.so]
    out.nodes.pop(sc.so, None)
    drop_inputs = {sc.si, sc.se}
    if sc.controller:
        for node in (CTRL_STATE, CTRL_OR, CTRL_AND, CTRL_EN, CTRL_RST):
            out.nodes.pop(node, None)
        out.dffs = [d for d in out.dffs if d != CTRL_STATE]
        if sc.rst:
            drop_inputs.add(sc.rst)
    out.primary_inputs = [p for p in out.primary_inputs if p not in drop_inputs]
    diags = validate(out)
    if diags:
        raise EncryptError(f"strip_scan left a bad netlist: {diags[0]}")
    return out


def discover_scan(n: Netlist) -> ScanConfig | None:
    """Reconstruct the scan-chain description from structure alone.

    An attacker holding only the netlist can see the chain: every state
    flip-flop's D input goes through a mux sharing one select signal,
    and the selected legs link the cells in order.  Returns None when
    the netlist has no such chain, and raises :class:`EncryptError` on
    a half-formed one.

    Returns
    -------
    ScanConfig or None
        Equal to the config produced at insertion time, including
        controller detection.
    """
    state_ffs = [d for d in n.dffs if d != CTRL_STATE]
    if not state_ffs:
        return None
    groups: dict[str, dict[str, str]] = {}
    for d in state_ffs:
        m = n.fanins(d)[0]
        if m in n.nodes and n.kind(m) is GateKind.MUX2:
            groups.setdefault(n.fanins(m)[0], {})[d] = m
    shared = [sel for sel, members in groups.items() if len(members) == len(state_ffs)]
    if not shared:
        return None
    if len(shared) > 1:
        raise EncryptError("ambiguous scan select candidates")
    sel = shared[0]
    members = groups[sel]

    controller = sel not in n.primary_inputs
    se, rst = sel, None
    if controller:
        if sel not in n.nodes or n.kind(sel) is not GateKind.XOR:
            raise EncryptError("scan select is neither a pin nor a lockout gate")
        se_cands = [r for r in n.fanins(sel) if r in n.primary_inputs]
        if len(se_cands) != 1 or CTRL_STATE not in n.dffs:
            raise EncryptError("cannot identify scan-enable behind the lockout")
        se = se_cands[0]
        or_node = n.fanins(CTRL_STATE)[0]
        rst_cands = [r for r in n.fanins(or_node) if r in n.primary_inputs]
        if len(rst_cands) != 1:
            raise EncryptError("cannot identify the lockout reset pin")
        rst = rst_cands[0]

    keymux_of = {ff: mux for mux, ff in eff_keymux_map(n).items()}
    tap_owner = {mux: ff for ff, mux in keymux_of.items()}
    si = None
    next_of: dict[str, tuple[str, str]] = {}
    for ff, m in members.items():
        link = n.fanins(m)[2]
        base, inv = split_ref(link)
        if base in n.primary_inputs:
            if si is not None:
                raise EncryptError("two chain heads found")
            si = base
            head = ff
        else:
            src = tap_owner.get(base, base)
            if src not in members:
                raise EncryptError(f"chain link of {ff!r} reads a non-cell signal")
            next_of[src] = (ff, "QBAR" if inv else "Q")
    if si is None:
        return None

    chain, polarity = [head], []
    while chain[-1] in next_of:
        ff, pol = next_of[chain[-1]]
        if ff in chain:
            raise EncryptError("scan chain loops")
        chain.append(ff)
        polarity.append(pol)
    if len(chain) != len(state_ffs):
        raise EncryptError("scan chain does not cover every flip-flop")

    tail_taps = {chain[-1], keymux_of.get(chain[-1])}
    so = None
    for po in n.primary_outputs:
        if po in n.nodes and n.kind(po) is GateKind.BUF:
            base, inv = split_ref(n.fanins(po)[0])
            if base in tail_taps:
                so = po
                polarity.append("QBAR" if inv else "Q")
                break
    if so is None:
        raise EncryptError("no scan-out tap found")
    return ScanConfig(chain=tuple(chain), link_polarity=tuple(polarity),
                      controller=controller, si=si, so=so, se=se, rst=rst)


def scan_order_guarded_first(n: Netlist, base_order=None) -> list[str]:
    """Chain ordering policy that keeps the first position unlocked.

    The first chain cell is the one an attacker sets directly from
    scan-in with no intervening links, so a locked flip-flop there
    exposes its key bit to sensitization.  The first unlocked flip-flop
    in the base order is moved to the front; everything else keeps its
    relative order.  When every flip-flop is locked the order is
    returned unchanged and the vulnerability classifier will flag the
    head of the chain.
    """
    order = list(base_order) if base_order is not None else list(n.dffs)
    locked = set(eff_keymux_map(n).values())
    if not locked or order[0] not in locked:
        return order
    for i, ff in enumerate(order):
        if ff not in locked:
            return [ff] + order[:i] + order[i + 1:]
    return order
