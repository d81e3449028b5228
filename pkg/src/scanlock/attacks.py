"""Key-recovery procedures against an activated part with scan access.

Every attack here talks to an :class:`~scanlock.sim.Oracle` through pin
operations only and reports what it recovered, how sure it is, and what
it cost in queries.  The attacker is assumed to hold the encrypted
netlist (standard netlist-plus-activated-part threat model), so chain
geometry, key-gate sites and mux leg wiring are all readable; the
secrets are the key bits themselves.

* :func:`scan_partition_attack` splits the sequential search at
  flip-flop boundaries: load chosen cell values, clock once, read the
  captured next states, and brute-force each small cone independently.
* :func:`reset_and_scan_attack` resets every cell to zero and reads the
  chain once; inversion boundaries in the outgoing stream betray which
  chain taps complement, and with the mux leg wiring from the netlist
  that resolves every in-chain key bit.
* :func:`parity_probe` shifts one vector through the chain and back
  out, learning the parity of the in-chain key bits (one bit of key
  entropy, nothing more).
* :func:`hill_climbing_attack` greedily flips key bits to shrink the
  output Hamming distance to the oracle.
* :func:`sensitization_vulnerable_ffs` classifies locked cells whose
  key bit is exposed to direct sensitization.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .cone import Cone, eff_keymux_map, icod
from .encrypt import discover_scan, strip_scan
from .metrics import attack_complexity, pearson
from .netlist import Netlist, ScanConfig, split_ref
from .sim import CompiledNetlist, Oracle, run_patterns, trace_distance

BIT_RECOVERED = "recovered"
BIT_ELIMINATED = "eliminated-class"
BIT_UNKNOWN = "unknown"


class AttackError(Exception):
    """Base class for attack failures; carries a partial report."""

    def __init__(self, message: str, report: "AttackReport | None" = None):
        super().__init__(message)
        self.report = report


class Blocked(AttackError):
    """The scan path carried no usable signature (lockout active)."""


class KeylessCones(AttackError):
    """No key gate lies in any flip-flop's input cone of dependency."""


class Infeasible(AttackError):
    """Some cone exceeded the configured search budget."""

    def __init__(self, message: str, report: "AttackReport | None" = None,
                 cones: tuple[Cone, ...] = ()):
        super().__init__(message, report)
        self.cones = tuple(cones)


@dataclass
class AttackReport:
    """Outcome of one attack run.

    `bits` maps every key input to a ``(status, value)`` pair where
    status is one of ``recovered``, ``eliminated-class`` or
    ``unknown``.  A bit is only marked recovered after the assembled
    key reproduced the oracle's output behavior on a fresh validation
    trace.
    """

    attack: str
    bits: dict[str, tuple[str, int | None]] = field(default_factory=dict)
    success: bool = False
    oracle_queries: int = 0
    query_counts: dict[str, int] = field(default_factory=dict)
    scan_exponent: int | None = None
    brute_force_exponent: int | None = None
    wall_time: float = 0.0
    notes: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def key_string(self, order=None) -> str:
        """Recovered key as text, '?' where a bit stayed unknown."""
        names = list(order) if order is not None else list(self.bits)
        out = []
        for name in names:
            status, value = self.bits.get(name, (BIT_UNKNOWN, None))
            out.append(str(value) if status == BIT_RECOVERED else "?")
        return "".join(out)

    def recovered_count(self) -> int:
        return sum(1 for s, _ in self.bits.values() if s == BIT_RECOVERED)

    def as_dict(self, timing: bool = False) -> dict:
        d = {
            "attack": self.attack,
            "bits": {k: list(v) for k, v in self.bits.items()},
            "key_string": self.key_string(),
            "success": self.success,
            "oracle_queries": self.oracle_queries,
            "query_counts": dict(self.query_counts),
            "scan_exponent": self.scan_exponent,
            "brute_force_exponent": self.brute_force_exponent,
            "notes": list(self.notes),
            "extra": self.extra,
        }
        if timing:
            d["wall_time"] = self.wall_time
        return d


# ----------------------------------------------------------------------
# chain stream translation

class ChainCodec:
    """Translate between raw cell values and the scan-port bit streams.

    Each chain position applies a fixed inversion to the value leaving
    its cell: zero for a plain Q tap, one for a complement tap, and an
    unknown key-dependent inversion where the tap runs through a key
    mux.  Encoding (choosing the shift-in sequence that lands wanted
    values in the cells) and decoding (recovering cell values from the
    shift-out stream) both need every inversion known, so chains with
    unresolved key muxes refuse until `inversions` supplies them.
    """

    def __init__(self, n: Netlist, sc: ScanConfig, inversions=None):
        locked = set(eff_keymux_map(n).values())
        self.sc = sc
        inv: list[int | None] = []
        for j, ff in enumerate(sc.chain):
            if ff in locked:
                inv.append(None)
            else:
                inv.append(1 if sc.link_polarity[j] == "QBAR" else 0)
        if inversions is not None:
            for j, v in (inversions.items() if isinstance(inversions, dict)
                         else enumerate(inversions)):
                if v is not None:
                    inv[j] = int(v)
        self.inversions = inv

    @property
    def unknown_positions(self) -> list[int]:
        return [j for j, v in enumerate(self.inversions) if v is None]

    def _require_known(self):
        unk = self.unknown_positions
        if unk:
            raise AttackError(f"chain inversions unresolved at positions {unk}")

    def _prefix(self) -> list[int]:
        """up[j] = parity of inversions strictly before cell j."""
        up, acc = [], 0
        for v in self.inversions:
            up.append(acc)
            acc ^= v
        return up

    def _suffix(self) -> list[int]:
        """down[j] = parity of inversions from cell j to scan-out."""
        down, acc = [0] * len(self.inversions), 0
        for j in range(len(self.inversions) - 1, -1, -1):
            acc ^= self.inversions[j]
            down[j] = acc
        return down

    def encode(self, cells) -> list[int]:
        """Shift-in sequence that leaves `cells` (chain order) in the
        chain after len(cells) shifts."""
        self._require_known()
        cells = [int(c) for c in cells]
        n = len(self.inversions)
        if len(cells) != n:
            raise ValueError(f"expected {n} cell values")
        up = self._prefix()
        return [cells[n - 1 - t] ^ up[n - 1 - t] for t in range(n)]

    def decode(self, stream) -> list[int]:
        """Raw cell values (chain order) from a full shift-out stream."""
        self._require_known()
        stream = [int(c) for c in stream]
        n = len(self.inversions)
        if len(stream) != n:
            raise ValueError(f"expected {n} stream bits")
        down = self._suffix()
        return [stream[n - 1 - j] ^ down[j] for j in range(n)]

    def total_parity(self) -> int:
        self._require_known()
        acc = 0
        for v in self.inversions:
            acc ^= v
        return acc


# ----------------------------------------------------------------------
# shared helpers

def validate_key(enc: Netlist, key_bits, oracle: Oracle,
                 sc: ScanConfig | None = None, patterns: int = 100,
                 cycles: int = 10, seed: int = 0x7E57) -> bool:
    """True when `key_bits` reproduces the oracle's outputs over fresh
    seeded functional traces (patterns x cycles pattern-cycles)."""
    ref = oracle.collect_trace(patterns, cycles, seed)
    _, got = run_patterns(enc, key_bits, patterns, cycles, seed, scan=sc)
    return trace_distance(ref, got) == 0


def _report_skeleton(attack: str, key_names) -> AttackReport:
    return AttackReport(attack=attack,
                        bits={k: (BIT_UNKNOWN, None) for k in key_names})


def _finish(report: AttackReport, oracle: Oracle, q0: int, counts0, t0: float):
    report.oracle_queries = oracle.query_counter - q0
    report.query_counts = {k: v - counts0.get(k, 0)
                           for k, v in oracle.query_counts.items()
                           if v - counts0.get(k, 0)}
    report.wall_time = time.perf_counter() - t0
    return report


# ----------------------------------------------------------------------
# reset-and-scan

def reset_and_scan_attack(enc: Netlist, sc: ScanConfig, oracle: Oracle,
                          validate: bool = True) -> AttackReport:
    """Recover in-chain key bits from one post-reset chain read.

    After a reset every cell holds zero, so the shift-out stream is a
    pure image of the chain's tap inversions: bit t of the stream is
    the inversion parity from cell ``n-1-t`` to scan-out, and adjacent
    stream bits differ exactly at inverting taps.  Structural
    complement taps are known from the netlist; an inversion at a key
    mux reveals which flip-flop output the original design consumed,
    and together with the mux's visible leg order that fixes the key
    bit.

    Parameters
    ----------
    enc : Netlist
        Encrypted, scan-inserted netlist (attacker's copy).
    sc : ScanConfig
        Chain description, as visible in the netlist.
    oracle : Oracle
        Activated part.
    validate : bool
        Check the assembled key against fresh functional traces.

    Returns
    -------
    AttackReport
        One recovered bit per locked chain position; scan query count
        equals the chain length.

    Raises
    ------
    Blocked
        When the stream contradicts the known structural taps or the
        assembled key fails validation, which is what a scan lockout
        controller produces.  The attached report has zero recovered
        bits.
    """
    t0 = time.perf_counter()
    q0, counts0 = oracle.query_counter, dict(oracle.query_counts)
    report = _report_skeleton("reset-and-scan", enc.key_inputs)

    keymuxes = eff_keymux_map(enc)
    mux_of = {ff: mux for mux, ff in keymuxes.items()}
    n = len(sc.chain)

    oracle.pulse_reset()
    u = [oracle.scan_shift(0) for _ in range(n)]
    inv = [(u[n - 1 - j] ^ (u[n - 2 - j] if n - 2 - j >= 0 else 0))
           for j in range(n)]

    positions = [n - j for j in range(n) if inv[j]]  # 1-based from scan-out
    report.notes.append(
        "inversions at positions (from scan-out): "
        + (", ".join(str(p) for p in sorted(positions)) or "none"))

    recovered = {}
    for j, ff in enumerate(sc.chain):
        if ff in mux_of:
            mux = mux_of[ff]
            swap = 1 if split_ref(enc.fanins(mux)[1])[1] else 0
            key = enc.fanins(mux)[0]
            recovered[key] = inv[j] ^ swap
        else:
            expect = 1 if sc.link_polarity[j] == "QBAR" else 0
            if inv[j] != expect:
                report.notes.append(
                    f"position {n - j} contradicts the structural tap; "
                    "scan stream carries no inversion signature")
                raise Blocked("scan suppressed or garbled", _finish(report, oracle, q0, counts0, t0))

    for key, bit in recovered.items():
        report.bits[key] = (BIT_RECOVERED, bit)
    unknown = [k for k, (s, _) in report.bits.items() if s != BIT_RECOVERED]

    if validate and not unknown:
        vec = [report.bits[k][1] for k in enc.key_inputs]
        if not validate_key(enc, vec, oracle, sc):
            report.bits = {k: (BIT_UNKNOWN, None) for k in enc.key_inputs}
            report.notes.append("assembled key failed validation")
            raise Blocked("recovered key failed validation",
                          _finish(report, oracle, q0, counts0, t0))
    report.success = not unknown
    if unknown:
        report.notes.append(f"{len(unknown)} key bits sit outside the chain")
    report.extra["scan_queries"] = n
    return _finish(report, oracle, q0, counts0, t0)


# ----------------------------------------------------------------------
# parity probe

@dataclass(frozen=True)
class ParityResult:
    """What one load/unload round reveals about the in-chain key."""

    key_parity: str          # "even" or "odd" count of 1 key bits
    total_parity: str        # raw stream parity before subtraction
    structural_parity: int   # parity of known complement taps
    swap_parity: int         # parity of swapped key-mux legs
    scan_queries: int
    note: str


def parity_probe(oracle: Oracle, sc: ScanConfig,
                 enc: Netlist | None = None) -> ParityResult:
    """Learn whether an even or odd number of in-chain key bits is 1.

    Shifting any vector fully through the chain returns every bit
    complemented by the total tap-inversion parity.  Subtracting the
    netlist-known parts (structural complement taps, swapped mux legs)
    leaves the parity of the key bits themselves.  This halves the key
    space: the brute-force exponent drops by exactly 1.

    The probe never resets, so a post-reset scan lockout does not
    trigger; one functional settle cycle clears a powered-up lockout.
    """
    n = len(sc.chain)
    if sc.controller:
        oracle.step()
    load = [(t + 1) % 2 for t in range(n)]  # 1010... exercises both values
    oracle.scan_load(load)
    unload = [int(c) for c in oracle.scan_unload()]
    flips = {a ^ b for a, b in zip(load, unload)}
    if len(flips) != 1:
        raise Blocked("unload is not a uniform complement of the load; "
                      "chain is not shifting cleanly")
    total = flips.pop()

    structural = swap_par = 0
    locked = {}
    if enc is not None:
        locked = {ff: mux for mux, ff in eff_keymux_map(enc).items()}
    for j, ff in enumerate(sc.chain):
        if ff in locked:
            swap_par ^= 1 if split_ref(enc.fanins(locked[ff])[1])[1] else 0
        elif sc.link_polarity[j] == "QBAR":
            structural ^= 1
    key_par = total ^ structural ^ swap_par
    return ParityResult(
        key_parity="odd" if key_par else "even",
        total_parity="odd" if total else "even",
        structural_parity=structural,
        swap_parity=swap_par,
        scan_queries=2 * n,
        note="eliminates the half of the key space with the opposite "
             "parity; brute-force exponent drops by exactly 1",
    )


# ----------------------------------------------------------------------
# scan partition attack

def scan_partition_attack(enc: Netlist, oracle: Oracle,
                          sc: ScanConfig | None = None,
                          budget_exp: int = 24, experiments: int = 64,
                          seed: int = 0x5CA1E, validate: bool = True) -> AttackReport:
    """Divide-and-conquer key recovery through the scan chain.

    Scan access turns one big sequential problem into one small
    combinational problem per flip-flop: cells are loadable (pseudo
    primary inputs) and captured next states are unloadable (pseudo
    outputs).  The attack runs a batch of shared experiments, each one
    a random cell/input assignment followed by a single functional
    clock, then brute-forces each cone's key bits offline against the
    observed captures, cheapest cone first, reusing every bit already
    pinned down.  Keys outside all flip-flop cones are attacked the
    same way through the primary-output cones.

    Parameters
    ----------
    enc : Netlist
        Encrypted, scan-inserted netlist (attacker's copy).
    oracle : Oracle
        Activated part with scan access.
    sc : ScanConfig, optional
        Chain description; reconstructed from the netlist when omitted.
    budget_exp : int
        A cone is skipped when its pseudo-input-plus-key count exceeds
        this exponent.
    experiments : int
        Shared random load/capture experiments (also the brute-force
        pattern count per cone).
    seed : int
        Drives experiment generation.
    validate : bool
        Check the assembled key on fresh functional traces before
        marking bits recovered.

    Returns
    -------
    AttackReport
        With `scan_exponent` (worst keyed cone) and
        `brute_force_exponent` (whole-design search) filled in.

    Raises
    ------
    KeylessCones
        No key gate inside any flip-flop cone: flip-flop-output locking
        leaves this attack nothing to partition.
    Infeasible
        Budget-skipped cones left key bits unresolved.
    Blocked
        The chain would not shift cleanly.
    """
    t0 = time.perf_counter()
    q0, counts0 = oracle.query_counter, dict(oracle.query_counts)
    report = _report_skeleton("scan-partition", enc.key_inputs)

    if sc is None:
        sc = discover_scan(enc)
    if sc is None:
        raise AttackError("netlist has no scan chain", report)
    stripped = strip_scan(enc, sc)
    scan_exp, brute_exp = attack_complexity(stripped)
    report.scan_exponent = scan_exp
    report.brute_force_exponent = brute_exp

    keys = list(stripped.key_inputs)
    if not keys:
        report.success = True
        report.notes.append("netlist has no key inputs")
        return _finish(report, oracle, q0, counts0, t0)

    ff_cones = [icod(stripped, ff) for ff in stripped.dffs]
    keyed = [c for c in ff_cones if c.key_inputs]
    if not keyed:
        report.notes.append("no key gate in any flip-flop cone; "
                            "nothing to partition")
        raise KeylessCones("key gates sit on flip-flop outputs only",
                           _finish(report, oracle, q0, counts0, t0))

    codec = ChainCodec(enc, sc)
    if codec.unknown_positions:
        raise AttackError("chain passes through unresolved key muxes; "
                          "cells cannot be loaded reliably", report)

    # ---- shared experiments ------------------------------------------
    rng = random.Random(seed)
    E = experiments
    maskE = (1 << E) - 1
    pis = list(stripped.primary_inputs)
    ffs = list(stripped.dffs)
    pi_packed = {p: 0 for p in pis}
    ff_packed = {f: 0 for f in ffs}
    cap_packed = {f: 0 for f in ffs}
    po_packed = {o: 0 for o in stripped.primary_outputs}
    if sc.controller:
        oracle.step()  # clears a powered-up lockout; never resets
    for e in range(E):
        cells = [rng.getrandbits(1) for _ in ffs]
        pivec = {p: rng.getrandbits(1) for p in pis}
        oracle.scan_load(codec.encode([cells[ffs.index(f)] for f in sc.chain]))
        oracle.set_inputs(pivec)
        obs = oracle.read_outputs()
        oracle.step()
        captured = codec.decode(oracle.scan_unload())
        for f, v in zip(ffs, cells):
            ff_packed[f] |= v << e
        for p in pis:
            pi_packed[p] |= pivec[p] << e
        for j, f in enumerate(sc.chain):
            cap_packed[f] |= captured[j] << e
        for o in po_packed:
            po_packed[o] |= (obs[o] & 1) << e

    # ---- offline per-cone brute force --------------------------------
    comp = CompiledNetlist(stripped)
    values = [0] * comp.n_slots
    for p, s in zip(pis, comp.pi_slots):
        values[s] = pi_packed[p]
    for i, f in enumerate(ffs):
        values[comp.q_slots[i]] = ff_packed[f]
        values[comp.qbar_slots[i]] = maskE ^ ff_packed[f]
    key_slot = dict(zip(keys, comp.key_slots))

    resolved: dict[str, int] = {}
    fallback: dict[str, int] = {}
    skipped: list[Cone] = []
    constraints: list[tuple[tuple[str, ...], list[int]]] = []

    def solve(cone: Cone, target_slot: int, observed: int) -> None:
        """Record which assignments of the cone's open keys reproduce
        the observations, as a constraint for later propagation."""
        unknown = sorted(k for k in cone.key_inputs if k not in resolved)
        if not unknown:
            return
        if len(cone.primary_inputs) + len(cone.key_inputs) > budget_exp:
            skipped.append(cone)
            report.notes.append(
                f"cone {cone.root}: 2^{len(cone.primary_inputs) + len(cone.key_inputs)}"
                f" exceeds budget 2^{budget_exp}; skipped")
            return
        matches = []
        for cand in range(1 << len(unknown)):
            for k in keys:
                if k in resolved:
                    bit = resolved[k]
                elif k in unknown:
                    bit = (cand >> unknown.index(k)) & 1
                else:
                    bit = 0  # outside this cone; cannot affect the target
                values[key_slot[k]] = maskE if bit else 0
            comp.eval_into(values, maskE)
            if values[target_slot] == observed:
                matches.append(cand)
        if not matches:
            report.notes.append(f"cone {cone.root}: no key candidate matches; "
                                "observations inconsistent")
            return
        if len(matches) > 1:
            report.notes.append(
                f"cone {cone.root}: {len(matches)} aliased candidates")
        constraints.append((tuple(unknown), matches))

    def propagate() -> None:
        """Fix every key bit that all surviving assignments agree on,
        narrowing the constraint store to a fixpoint."""
        changed = True
        while changed:
            changed = False
            for idx, (ks, matches) in enumerate(constraints):
                kept = [m for m in matches
                        if all(((m >> i) & 1) == resolved[k]
                               for i, k in enumerate(ks) if k in resolved)]
                if len(kept) != len(matches):
                    constraints[idx] = (ks, kept)
                    changed = True
                if not kept:
                    report.notes.append(
                        "constraint over " + ",".join(ks) + " emptied; "
                        "observations inconsistent")
                    continue
                for i, k in enumerate(ks):
                    if k in resolved:
                        continue
                    bits = {(m >> i) & 1 for m in kept}
                    if len(bits) == 1:
                        resolved[k] = bits.pop()
                        changed = True

    def joint_resolve(cap: int = 4096) -> None:
        """Pick one assignment satisfying every remaining constraint
        (alias classes count as success once validated)."""
        live = [(ks, ms) for ks, ms in constraints
                if ms and any(k not in resolved for k in ks)]
        if not live:
            return
        partials: list[dict[str, int]] = [{}]
        for ks, ms in live:
            nxt = []
            for p in partials:
                for m in ms:
                    q = dict(p)
                    ok = True
                    for i, k in enumerate(ks):
                        b = (m >> i) & 1
                        if resolved.get(k, q.get(k, b)) != b:
                            ok = False
                            break
                        q[k] = b
                    if ok:
                        nxt.append(q)
            if len(nxt) > cap:
                report.notes.append("alias join exceeded its cap; "
                                    "leaving the group unresolved")
                return
            partials = nxt
        if not partials:
            report.notes.append("alias join empty; observations inconsistent")
            return
        best = min(partials, key=lambda p: tuple(p.get(k, 0) for k in keys))
        for k, v in best.items():
            if k not in resolved:
                fallback[k] = v

    cone_order = sorted(keyed, key=lambda c: (len(c.key_inputs),
                                              len(c.primary_inputs), c.root))
    d_slot = dict(zip(ffs, comp.d_slots))
    for cone in cone_order:
        solve(cone, d_slot[cone.root], cap_packed[cone.root])
    propagate()

    residual = [k for k in keys if k not in resolved]
    if residual:
        po_slot = dict(zip(stripped.primary_outputs, comp.po_slots))
        po_cones = [icod(stripped, po) for po in stripped.primary_outputs]
        po_cones = [c for c in po_cones
                    if any(k in residual for k in c.key_inputs)]
        for cone in sorted(po_cones, key=lambda c: (len(c.key_inputs),
                                                    len(c.primary_inputs), c.root)):
            solve(cone, po_slot[cone.root], po_packed[cone.root])
        propagate()
    joint_resolve()

    # ---- assemble, validate, classify --------------------------------
    vec = [resolved.get(k, fallback.get(k, 0)) for k in keys]
    claimed = [k for k in keys if k in resolved or k in fallback]
    valid = validate_key(enc, vec, oracle, sc) if validate else True
    if valid:
        for k in claimed:
            report.bits[k] = (BIT_RECOVERED, resolved.get(k, fallback.get(k)))
        report.success = len(claimed) == len(keys)
    else:
        report.notes.append("assembled key failed validation")
        report.extra["best_key"] = "".join(str(b) for b in vec)
    unresolved_by_budget = [k for c in skipped for k in c.key_inputs
                            if k not in resolved and k not in fallback]
    if unresolved_by_budget:
        raise Infeasible(
            f"{len(set(unresolved_by_budget))} key bits unresolved after "
            "budget skips", _finish(report, oracle, q0, counts0, t0),
            cones=tuple(skipped))
    return _finish(report, oracle, q0, counts0, t0)


# ----------------------------------------------------------------------
# hill climbing

def hill_climbing_attack(enc: Netlist, oracle: Oracle, max_iters: int = 1000,
                         seed: int = 0, batch: int = 256, cycles: int = 8,
                         sc: ScanConfig | None = None, start_key=None,
                         true_key=None, validate: bool = True) -> AttackReport:
    """Greedy functional-mode key search by single-bit descent.

    Collects one reference trace from the oracle, then repeatedly flips
    whichever key bit most reduces the Hamming distance between the
    candidate's outputs and the reference, accepting improvements only.
    Stops at distance zero, a local minimum, or the iteration budget.

    Parameters
    ----------
    enc, oracle
        Attacker netlist and activated part.
    max_iters : int
        Accepted-flip budget.
    seed : int
        Start key and trace seed.
    batch, cycles : int
        Reference trace shape (patterns x cycles).
    sc : ScanConfig, optional
        Needed only so functional simulation pins the scan inputs;
        reconstructed from the netlist when omitted.
    start_key : optional
        Fixed starting point instead of a seeded random one.
    true_key : optional
        Analysis aid: when given, the report's extra carries the
        wrong-bit count alongside the distance at every accepted step
        and their correlation.  Never used for search decisions.
    validate : bool
        Confirm a distance-zero key on a fresh trace before marking
        bits recovered.

    Returns
    -------
    AttackReport
        ``extra["hd_trace"]`` holds (iteration, distance) pairs.
    """
    t0 = time.perf_counter()
    q0, counts0 = oracle.query_counter, dict(oracle.query_counts)
    report = _report_skeleton("hill-climbing", enc.key_inputs)
    if sc is None:
        sc = discover_scan(enc)
    keys = list(enc.key_inputs)
    ref = oracle.collect_trace(batch, cycles, seed)

    def distance(vec) -> int:
        _, got = run_patterns(enc, vec, batch, cycles, seed, scan=sc)
        return trace_distance(ref, got)

    rng = random.Random(seed)
    key = ([int(b) for b in start_key] if start_key is not None
           else [rng.getrandbits(1) for _ in keys])
    if len(key) != len(keys):
        raise ValueError(f"start key needs {len(keys)} bits")
    cur = distance(key)
    hd_trace = [(0, cur)]
    wrongs = None
    if true_key is not None:
        tk = [int(b) for b in true_key]
        wrongs = [(sum(a ^ b for a, b in zip(key, tk)), cur)]

    iters = 0
    while cur > 0 and iters < max_iters:
        best_i, best_hd = None, cur
        for i in range(len(keys)):
            key[i] ^= 1
            h = distance(key)
            key[i] ^= 1
            if h < best_hd:
                best_i, best_hd = i, h
        if best_i is None:
            report.notes.append(f"local minimum at distance {cur}")
            break
        key[best_i] ^= 1
        cur = best_hd
        iters += 1
        hd_trace.append((iters, cur))
        if wrongs is not None:
            wrongs.append((sum(a ^ b for a, b in zip(key, tk)), cur))

    report.extra["hd_trace"] = hd_trace
    report.extra["final_distance"] = cur
    report.extra["iterations"] = iters
    if wrongs is not None:
        report.extra["wrong_vs_hd"] = wrongs
        report.extra["wrong_hd_pearson"] = pearson(
            [w for w, _ in wrongs], [h for _, h in wrongs])
    if cur == 0 and (not validate
                     or validate_key(enc, key, oracle, sc, seed=0xF1E1D)):
        for k, b in zip(keys, key):
            report.bits[k] = (BIT_RECOVERED, b)
        report.success = True
    else:
        report.extra["best_key"] = "".join(str(b) for b in key)
        if cur == 0:
            report.notes.append("distance-zero key failed fresh validation")
    return _finish(report, oracle, q0, counts0, t0)


# ----------------------------------------------------------------------
# sensitization vulnerability classifier

def sensitization_vulnerable_ffs(enc: Netlist, sc: ScanConfig) -> list[str]:
    """Locked flip-flops whose key bit is exposed to sensitization.

    Two exposure classes: a cell whose functional D cone contains only
    primary inputs can be driven to a chosen value without the scan
    path, and the first chain cell receives scan-in directly with no
    intervening taps.  Either way the attacker plants a known value and
    watches which flip-flop output the downstream logic sees.  An empty
    result certifies that neither shortcut exists.
    """
    locked = set(eff_keymux_map(enc).values())
    if not locked:
        return []
    stripped = strip_scan(enc, sc)
    out = []
    for ff in sc.chain:
        if ff not in locked:
            continue
        if ff == sc.chain[0]:
            out.append(ff)
            continue
        cone = icod(stripped, ff)
        if not cone.flip_flops and not cone.key_inputs:
            out.append(ff)
    return out
