"""Security and cost measurement.

Three families of numbers quantify a locked design:

* output corruption: how much wrong keys disturb the outputs, measured
  as per-pattern Hamming-distance percentages, optionally restricted to
  the outputs the locked sites actually reach;
* attack complexity: the brute-force exponent M+K for the whole design
  against the scan-partition exponent M1+K1 of its worst flip-flop
  cone;
* area: standard-cell unit costs for each locking scheme, including
  the point-function baselines, with wide gates priced as trees of
  two-input cells.

Everything is seeded and wall-clock free: identical arguments give
identical numbers.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .cone import fanout_outputs, icod
from .encrypt import (
    encrypt_flip_flop,
    encrypt_mux_random,
    encrypt_oc,
    encrypt_xor_random,
    strip_scan,
)
from .netlist import Netlist, ScanConfig
from .sim import run_patterns


class EmptyAffected(ValueError):
    """No primary output depends on any key gate."""


class MissingCell(KeyError):
    """The area table has no entry for a required cell."""


# ----------------------------------------------------------------------
# cell areas

_REQUIRED = ("XOR2", "XNOR2", "MUX2", "AND2", "NAND2")
_DEFAULT_CELLS = {
    "XOR2": 10.0,
    "XNOR2": 10.0,
    "MUX2": 9.0,
    "AND2": 5.0,
    "NAND2": 4.0,
    # no published entries; OR2 priced at AND2 cost, NOT at NAND2 cost
    # (tied inputs), storage cells at 0 and reported separately
    "OR2": 5.0,
    "NOT": 4.0,
    "DFF": 0.0,
}


@dataclass(frozen=True)
class CellAreaTable:
    """Per-cell area units, extensible by passing a minimal map."""

    cells: dict[str, float] = field(default_factory=lambda: dict(_DEFAULT_CELLS))

    def __post_init__(self):
        for name in _REQUIRED:
            if self.cells.get(name, 0) <= 0:
                raise ValueError(f"area table needs {name} > 0")

    def get(self, cell: str) -> float:
        if cell not in self.cells:
            raise MissingCell(cell)
        return self.cells[cell]


@dataclass(frozen=True)
class AreaEstimate:
    scheme: str
    k: int
    n: int | None
    extra_area: float
    base_area: float
    overhead_pct: float | None
    breakdown: dict[str, float]
    footnotes: tuple[str, ...]


def area_estimate(scheme: str, k: int, n: int | None = None,
                  base_area: float = 0.0,
                  table: CellAreaTable | None = None) -> AreaEstimate:
    """Extra cell area a locking scheme adds, in table units.

    Parameters
    ----------
    scheme : str
        One of eff, xor, mux, oc, sarlock, antisat.
    k : int
        Key length.
    n : int, optional
        Anti-SAT block width (that scheme only).
    base_area : float
        Unlocked design area; 0 leaves the overhead percentage unset.
    table : CellAreaTable, optional

    Returns
    -------
    AreaEstimate
        With a per-structure breakdown and footnotes for every
        approximation used.
    """
    t = table or CellAreaTable()
    breakdown: dict[str, float] = {}
    notes: list[str] = []
    if k < 0:
        raise ValueError("negative key length")

    if scheme == "eff":
        breakdown["key_mux"] = k * t.get("MUX2")
        breakdown["controller"] = (t.get("XOR2") + 2 * t.get("AND2")
                                   + t.get("OR2") + t.get("DFF"))
        notes.append("controller OR priced at AND2 cost, its flip-flop at "
                     f"{t.get('DFF'):g} units (configurable)")
    elif scheme == "xor":
        if k:
            breakdown["key_xor"] = k * t.get("XOR2")
    elif scheme == "mux":
        if k:
            breakdown["key_mux"] = k * t.get("MUX2")
    elif scheme == "oc":
        if k:
            breakdown["cell_mux"] = k * t.get("MUX2")
            breakdown["cell_inv"] = k * t.get("NOT")
            notes.append("inverter priced at NAND2 cost (tied inputs)")
    elif scheme == "sarlock":
        if k:
            breakdown["xor"] = (k + 1) * t.get("XOR2")
            breakdown["and"] = (2 * k + 1) * t.get("AND2")
    elif scheme == "antisat":
        if k:
            if n is None or n < 2:
                raise ValueError("antisat needs a block width n >= 2")
            breakdown["xor"] = (3 * n + 1) * t.get("XOR2")
            breakdown["mux"] = n * t.get("MUX2")
            breakdown["nand_tree"] = (n - 2) * t.get("AND2") + t.get("NAND2")
            breakdown["and_tree"] = (n - 1) * t.get("AND2")
            breakdown["and_final"] = t.get("AND2")
            notes.append("wide gates priced as trees of two-input cells "
                         "(an m-input gate costs m-1 cells)")
    else:
        raise ValueError(f"unknown scheme {scheme!r}")

    extra = sum(breakdown.values())
    over = 100.0 * extra / base_area if base_area > 0 else None
    return AreaEstimate(scheme, k, n, extra, base_area, over,
                        breakdown, tuple(notes))


def netlist_area(n: Netlist, table: CellAreaTable | None = None,
                 gate_cells: dict | None = None) -> float:
    """Rough area of a netlist: every 2-input-equivalent node priced by
    kind; wide gates as trees; flip-flops at the table's DFF cost."""
    t = table or CellAreaTable()
    kind_cell = {
        "AND": "AND2", "NAND": "NAND2", "OR": "OR2", "NOR": "OR2",
        "XOR": "XOR2", "XNOR": "XNOR2", "MUX2": "MUX2", "NOT": "NOT",
        "BUF": "NOT", "DFF": "DFF",
    }
    if gate_cells:
        kind_cell.update(gate_cells)
    total = 0.0
    for node, (kind, fins) in n.nodes.items():
        cell = kind_cell[kind.value]
        units = max(1, len(fins) - 1) if kind.value not in ("MUX2", "DFF") else 1
        total += units * t.get(cell)
    return total


# ----------------------------------------------------------------------
# attack complexity

def attack_complexity(enc: Netlist, sc: ScanConfig | None = None
                      ) -> tuple[int | None, int]:
    """Exponents of the scan-partition and whole-design key searches.

    Returns ``(scan_exponent, brute_force_exponent)`` where the brute
    exponent is M+K over the functional design and the scan exponent is
    M1+K1 of the flip-flop cone holding the most key gates (ties broken
    by input count).  With no key gate in any flip-flop cone the scan
    exponent is None (not applicable).
    """
    if sc is not None:
        enc = strip_scan(enc, sc)
    brute = len(enc.primary_inputs) + len(enc.key_inputs)
    best: tuple[int, int] | None = None
    for ff in enc.dffs:
        c = icod(enc, ff)
        if not c.key_inputs:
            continue
        rank = (len(c.key_inputs), len(c.primary_inputs))
        if best is None or rank > best:
            best = rank
    scan = best[0] + best[1] if best else None
    return scan, brute


def affected_outputs(enc: Netlist) -> tuple[str, ...]:
    """Primary outputs transitively influenced by any key gate."""
    fo = enc.fanout_map()
    sites = []
    for key in enc.key_inputs:
        for node, _ in fo.get(key, ()):
            if node not in sites:
                sites.append(node)
    pos: set[str] = set()
    for s in sites:
        pos |= fanout_outputs(enc, s).transitive
    return tuple(o for o in enc.primary_outputs if o in pos)


# ----------------------------------------------------------------------
# output corruption

@dataclass(frozen=True)
class CorruptionCurve:
    """Per-pattern output corruption at each wrong-key fraction.

    ``samples[i][j]`` is the Hamming-distance percentage of pattern j
    at grid point i, over the measured outputs and all cycles.
    """

    wrong_key_pct: tuple[int, ...]
    samples: tuple[tuple[float, ...], ...]
    restricted: bool
    outputs: tuple[str, ...]

    def means(self) -> tuple[float, ...]:
        return tuple(sum(s) / len(s) if s else 0.0 for s in self.samples)

    def rows(self):
        """Flat (wrong_key_pct, pattern, hd_pct) rows for CSV export."""
        for pct, samp in zip(self.wrong_key_pct, self.samples):
            for j, hd in enumerate(samp):
                yield pct, j, hd


def output_corruption(enc: Netlist, correct_key, wrong_pct=None,
                      n_patterns: int = 1000, seed: int = 0,
                      cycles: int = 4, restrict_affected: bool = True
                      ) -> CorruptionCurve:
    """Measure how wrong keys disturb the outputs.

    For each grid fraction, flips that share of randomly chosen key
    bits and compares the resulting output trace with the correct-key
    trace over the same seeded input patterns.

    Parameters
    ----------
    enc : Netlist
        Encrypted functional netlist (no scan needed).
    correct_key
        Activation key.
    wrong_pct : sequence of int, optional
        Grid of wrong-bit percentages; defaults to 5..100 step 5.
    n_patterns, cycles : int
        Trace shape; every pattern contributes one sample per point.
    seed : int
        Drives both the input patterns and the wrong-bit draws.
    restrict_affected : bool
        Measure only outputs reachable from key gates and raise
        :class:`EmptyAffected` when there are none.

    Returns
    -------
    CorruptionCurve
    """
    grid = tuple(wrong_pct) if wrong_pct is not None else tuple(range(5, 101, 5))
    k = len(enc.key_inputs)
    outs = affected_outputs(enc) if restrict_affected else tuple(enc.primary_outputs)
    if restrict_affected and not outs:
        raise EmptyAffected("no output depends on any key gate")
    idx = [enc.primary_outputs.index(o) for o in outs]
    correct = [int(b) for b in correct_key]

    _, ref = run_patterns(enc, correct, n_patterns, cycles, seed)
    rng = random.Random(seed)
    denom = len(outs) * cycles
    samples = []
    for pct in grid:
        flips = math.ceil(pct * k / 100)
        wrong = list(correct)
        for i in sorted(rng.sample(range(k), flips)):
            wrong[i] ^= 1
        _, got = run_patterns(enc, wrong, n_patterns, cycles, seed)
        per_pattern = [0] * n_patterns
        for rrow, grow in zip(ref, got):
            for i in idx:
                x = rrow[i] ^ grow[i]
                while x:
                    low = x & -x
                    per_pattern[low.bit_length() - 1] += 1
                    x ^= low
        samples.append(tuple(100.0 * c / denom for c in per_pattern))
    return CorruptionCurve(grid, tuple(samples), restrict_affected, outs)


def avg_corruption_compare(n: Netlist, schemes=("eff", "xor", "mux", "oc"),
                           k: int = 8, seed: int = 0, n_patterns: int = 256,
                           cycles: int = 4) -> dict[str, dict]:
    """Mean output corruption of each scheme on one base design.

    Every scheme locks a fresh copy of `n` with `k` bits (the
    flip-flop scheme clamps to the available flip-flops), then the
    fully wrong key (all bits flipped) is measured over the same
    seeded patterns across all outputs.  Averaging is over patterns at
    the 100 percent wrong-bit point.
    """
    out: dict[str, dict] = {}
    for scheme in schemes:
        note = ""
        if scheme == "eff":
            pool = list(n.dffs)
            k_here = min(k, len(pool))
            if k_here < k:
                note = f"key clamped to {k_here} (flip-flop count)"
            sites = sorted(random.Random(seed).sample(pool, k_here))
            enc = encrypt_flip_flop(n, sites, seed=seed)
        elif scheme == "xor":
            enc = encrypt_xor_random(n, k, seed=seed)
            k_here = k
        elif scheme == "mux":
            enc = encrypt_mux_random(n, k, seed=seed)
            k_here = k
        elif scheme == "oc":
            enc = encrypt_oc(n, k, seed=seed)
            k_here = k
        else:
            raise ValueError(f"unknown scheme {scheme!r}")
        curve = output_corruption(enc.netlist, enc.correct_key,
                                  wrong_pct=(100,), n_patterns=n_patterns,
                                  seed=seed, cycles=cycles,
                                  restrict_affected=False)
        entry = {"mean_hd_pct": curve.means()[0], "k": k_here}
        if note:
            entry["note"] = note
        out[scheme] = entry
    return out


# ----------------------------------------------------------------------
# small statistics helper

def pearson(xs, ys) -> float | None:
    """Sample correlation coefficient; None when undefined."""
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys) or len(xs) < 2:
        return None
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        return None
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / math.sqrt(sxx * syy)
