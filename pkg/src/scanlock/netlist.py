"""Gate-level sequential netlists in the ISCAS'89 ``.bench`` dialect.

The in-memory model is a name-keyed gate graph plus ordered port lists.
A flip-flop drives two signals: the node id itself (Q) and its
complement, written with a ``!`` prefix in fanin references and in
``.bench`` text.  Two extensions are accepted on top of plain
``.bench``: ``KEYINPUT(name)`` declares a key input, and a structured
``# SCANCHAIN``/``# SCANPOLARITY``/``# SCANPORTS``/``# SCANCONTROLLER``
comment block carries the scan-chain description emitted by the
transform passes (see :class:`ScanConfig`).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace

QBAR_PREFIX = "!"

# reserved node names used by the scan controller transform; the
# simulator relies on these to model the post-reset scan lockout
CTRL_STATE = "scan_ctrl_state"
CTRL_OR = "scan_ctrl_or"
CTRL_AND = "scan_ctrl_and"
CTRL_EN = "scan_ctrl_en"
CTRL_RST = "scan_ctrl_rst"


class GateKind(str, enum.Enum):
    """Cell types.  MUX2 fanins are ``(select, in0, in1)``; select=0
    passes in0.  DFF has a single D fanin and two outputs, Q (the node
    id) and its complement (``!`` prefix)."""

    AND = "AND"
    NAND = "NAND"
    OR = "OR"
    NOR = "NOR"
    XOR = "XOR"
    XNOR = "XNOR"
    NOT = "NOT"
    BUF = "BUF"
    MUX2 = "MUX2"
    DFF = "DFF"


# kind -> (min fanins, max fanins or None)
ARITY = {
    GateKind.AND: (2, None),
    GateKind.NAND: (2, None),
    GateKind.OR: (2, None),
    GateKind.NOR: (2, None),
    GateKind.XOR: (2, None),
    GateKind.XNOR: (2, None),
    GateKind.NOT: (1, 1),
    GateKind.BUF: (1, 1),
    GateKind.MUX2: (3, 3),
    GateKind.DFF: (1, 1),
}

# .bench uses MUX for the 2:1 mux cell
_TOKEN_TO_KIND = {k.value: k for k in GateKind}
_TOKEN_TO_KIND["MUX"] = GateKind.MUX2
_KIND_TO_TOKEN = {k: k.value for k in GateKind}
_KIND_TO_TOKEN[GateKind.MUX2] = "MUX"


def qbar(sig: str) -> str:
    """Complement-output reference for flip-flop `sig`."""
    return QBAR_PREFIX + sig


def split_ref(ref: str) -> tuple[str, bool]:
    """Split a fanin reference into ``(base signal, is_complement)``."""
    if ref.startswith(QBAR_PREFIX):
        return ref[1:], True
    return ref, False


class BenchError(ValueError):
    """Raised on malformed ``.bench`` text or an invalid netlist.

    `line` is the 1-based source line when known, `diagnostics` the
    validator findings when the structure parsed but is inconsistent.
    """

    def __init__(self, message, line=None, diagnostics=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
        self.diagnostics = diagnostics or []


@dataclass
class Netlist:
    """A named gate graph with ordered ports.

    `nodes` maps a signal id to ``(kind, fanin refs)``; insertion order
    is preserved and reproduced by :func:`write_bench`.  `dffs` lists
    the DFF node ids in declaration order.
    """

    name: str = "top"
    nodes: dict[str, tuple[GateKind, tuple[str, ...]]] = field(default_factory=dict)
    primary_inputs: list[str] = field(default_factory=list)
    primary_outputs: list[str] = field(default_factory=list)
    dffs: list[str] = field(default_factory=list)
    key_inputs: list[str] = field(default_factory=list)

    # ------------------------------------------------------------------
    # construction
    def _check_new(self, name: str) -> None:
        if self.is_defined(name):
            raise BenchError(f"duplicate definition of '{name}'")

    def add_input(self, name: str) -> str:
        self._check_new(name)
        self.primary_inputs.append(name)
        return name

    def add_key_input(self, name: str) -> str:
        self._check_new(name)
        self.key_inputs.append(name)
        return name

    def add_output(self, name: str) -> str:
        if name in self.primary_outputs:
            raise BenchError(f"duplicate output declaration '{name}'")
        self.primary_outputs.append(name)
        return name

    def add_gate(self, name: str, kind: GateKind, fanins) -> str:
        self._check_new(name)
        kind = GateKind(kind)
        if kind is GateKind.DFF:
            return self.add_dff(name, fanins[0] if fanins else "")
        self.nodes[name] = (kind, tuple(fanins))
        return name

    def add_dff(self, name: str, d: str) -> str:
        self._check_new(name)
        self.nodes[name] = (GateKind.DFF, (d,))
        self.dffs.append(name)
        return name

    def set_fanins(self, name: str, fanins) -> None:
        kind, _ = self.nodes[name]
        self.nodes[name] = (kind, tuple(fanins))

    def fresh(self, base: str) -> str:
        """First unused signal name derived from `base`."""
        if not self.is_defined(base):
            return base
        i = 1
        while self.is_defined(f"{base}_{i}"):
            i += 1
        return f"{base}_{i}"

    def copy(self) -> "Netlist":
        return Netlist(
            name=self.name,
            nodes=dict(self.nodes),
            primary_inputs=list(self.primary_inputs),
            primary_outputs=list(self.primary_outputs),
            dffs=list(self.dffs),
            key_inputs=list(self.key_inputs),
        )

    # ------------------------------------------------------------------
    # queries
    def is_defined(self, sig: str) -> bool:
        return (
            sig in self.nodes
            or sig in self._pi_set()
            or sig in self._key_set()
        )

    def _pi_set(self):
        return set(self.primary_inputs)

    def _key_set(self):
        return set(self.key_inputs)

    def kind(self, name: str) -> GateKind:
        return self.nodes[name][0]

    def fanins(self, name: str) -> tuple[str, ...]:
        return self.nodes[name][1]

    def is_dff(self, sig: str) -> bool:
        entry = self.nodes.get(sig)
        return entry is not None and entry[0] is GateKind.DFF

    def gate_ids(self) -> list[str]:
        """Non-DFF node ids in declaration order."""
        return [n for n, (k, _) in self.nodes.items() if k is not GateKind.DFF]

    def fanout_map(self) -> dict[str, list[tuple[str, int]]]:
        """Map each base signal to the ``(node, fanin position)`` pairs
        that read it (complement taps included under the base id)."""
        fo: dict[str, list[tuple[str, int]]] = {}
        for node, (_, fins) in self.nodes.items():
            for pos, ref in enumerate(fins):
                base, _ = split_ref(ref)
                fo.setdefault(base, []).append((node, pos))
        return fo

    def stats(self) -> dict:
        return {
            "name": self.name,
            "inputs": len(self.primary_inputs),
            "outputs": len(self.primary_outputs),
            "key_inputs": len(self.key_inputs),
            "gates": len(self.nodes) - len(self.dffs),
            "dffs": len(self.dffs),
        }


# ----------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class Diagnostic:
    code: str
    signal: str
    message: str

    def __str__(self):
        return f"[{self.code}] {self.signal}: {self.message}"


def validate(n: Netlist) -> list[Diagnostic]:
    """Structural checks.  Returns one diagnostic per violation; an
    empty list means the netlist is well formed.

    Checks: port/node id uniqueness, fanin arity per kind, reference
    resolution (complement taps must target DFFs), DFF bookkeeping, and
    combinational acyclicity (DFF outputs cut the graph).
    """
    diags = []
    seen: dict[str, str] = {}
    for name in n.primary_inputs:
        if name in seen:
            diags.append(Diagnostic("DuplicateId", name, "declared more than once"))
        seen[name] = "input"
    for name in n.key_inputs:
        if name in seen:
            diags.append(Diagnostic("DuplicateId", name, f"already a {seen[name]}"))
        seen[name] = "key input"
    for name in n.nodes:
        if name in seen:
            diags.append(Diagnostic("DuplicateId", name, f"already a {seen[name]}"))
        seen[name] = "node"

    dff_set = set(n.dffs)
    for name in n.dffs:
        if not n.is_dff(name):
            diags.append(Diagnostic("InconsistentDff", name, "listed in dffs but not a DFF node"))
    for name, (kind, _) in n.nodes.items():
        if kind is GateKind.DFF and name not in dff_set:
            diags.append(Diagnostic("InconsistentDff", name, "DFF node missing from dffs list"))

    for name, (kind, fins) in n.nodes.items():
        lo, hi = ARITY[kind]
        if len(fins) < lo or (hi is not None and len(fins) > hi):
            diags.append(Diagnostic(
                "BadArity", name,
                f"{kind.value} takes {lo}{'' if hi == lo else '+' if hi is None else f'..{hi}'} fanins, got {len(fins)}"))
        for ref in fins:
            base, inv = split_ref(ref)
            if not n.is_defined(base):
                diags.append(Diagnostic("UndefinedSignal", base, f"referenced by '{name}'"))
            elif inv and not n.is_dff(base):
                diags.append(Diagnostic("BadComplementTap", ref, f"'{base}' is not a flip-flop"))

    for name in n.primary_outputs:
        if not n.is_defined(name):
            diags.append(Diagnostic("UndefinedSignal", name, "declared as output but never defined"))

    cyc = _find_comb_cycle(n)
    if cyc:
        diags.append(Diagnostic(
            "CombinationalCycle", cyc[0],
            "combinational loop through " + " -> ".join(cyc)))
    return diags


def _find_comb_cycle(n: Netlist):
    # iterative colored DFS over non-DFF nodes; DFF outputs are sources
    WHITE, GREY, BLACK = 0, 1, 2
    color = {}
    parent = {}

    def comb_deps(node):
        for ref in n.fanins(node):
            base, _ = split_ref(ref)
            entry = n.nodes.get(base)
            if entry is not None and entry[0] is not GateKind.DFF:
                yield base

    for start, (kind, _) in n.nodes.items():
        if kind is GateKind.DFF or color.get(start, WHITE) != WHITE:
            continue
        stack = [(start, iter(list(comb_deps(start))))]
        color[start] = GREY
        while stack:
            node, it = stack[-1]
            adv = False
            for dep in it:
                c = color.get(dep, WHITE)
                if c == GREY:
                    # unwind the loop for the report
                    cycle = [dep]
                    cur = node
                    while cur != dep:
                        cycle.append(cur)
                        cur = parent[cur]
                    cycle.reverse()
                    return cycle
                if c == WHITE:
                    color[dep] = GREY
                    parent[dep] = node
                    stack.append((dep, iter(list(comb_deps(dep)))))
                    adv = True
                    break
            if not adv:
                color[node] = BLACK
                stack.pop()
    return None


# ----------------------------------------------------------------------
# .bench reader / writer

_RE_DECL = re.compile(r"^(INPUT|OUTPUT|KEYINPUT)\s*\(\s*([^()\s,]+)\s*\)$", re.IGNORECASE)
_RE_ASSIGN = re.compile(r"^([^=\s]+)\s*=\s*([A-Za-z][A-Za-z0-9_]*)\s*\((.*)\)$")


def parse_bench(text: str, name: str = "top") -> Netlist:
    """Parse ``.bench`` text into a :class:`Netlist`.

    Parameters
    ----------
    text : str
        File contents.  ``#`` starts a comment; blank lines are ignored.
    name : str
        Circuit name recorded on the result.

    Returns
    -------
    Netlist
        A validated netlist.

    Raises
    ------
    BenchError
        On syntax errors (with the offending line number), undefined or
        duplicated signals, bad arity, or combinational cycles.
    """
    n = Netlist(name=name)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _RE_DECL.match(line)
        if m:
            what, sig = m.group(1).upper(), m.group(2)
            try:
                if what == "INPUT":
                    n.add_input(sig)
                elif what == "KEYINPUT":
                    n.add_key_input(sig)
                else:
                    n.add_output(sig)
            except BenchError as e:
                raise BenchError(str(e), line=lineno) from None
            continue
        m = _RE_ASSIGN.match(line)
        if m:
            out, tok, args = m.group(1), m.group(2).upper(), m.group(3)
            kind = _TOKEN_TO_KIND.get(tok)
            if kind is None:
                raise BenchError(f"unknown cell type '{m.group(2)}'", line=lineno)
            fins = tuple(a.strip() for a in args.split(",")) if args.strip() else ()
            if any(not f for f in fins):
                raise BenchError("empty fanin in argument list", line=lineno)
            try:
                n.add_gate(out, kind, fins)
            except BenchError as e:
                raise BenchError(str(e), line=lineno) from None
            continue
        raise BenchError(f"unrecognized statement: {line!r}", line=lineno)

    diags = validate(n)
    if diags:
        raise BenchError("; ".join(str(d) for d in diags), diagnostics=diags)
    return n


def write_bench(n: Netlist, scan: "ScanConfig | None" = None, header=()) -> str:
    """Serialize to ``.bench`` text.

    Declaration order is preserved, so a parse/write round trip is
    textually stable.  `header` lines are emitted first as comments;
    `scan`, when given, is appended as a structured comment block that
    :func:`parse_scan_comments` reads back.
    """
    out = [f"# {h}" for h in header]
    out.append(f"# {n.name}")
    out.extend(f"INPUT({s})" for s in n.primary_inputs)
    out.extend(f"KEYINPUT({s})" for s in n.key_inputs)
    out.extend(f"OUTPUT({s})" for s in n.primary_outputs)
    for node, (kind, fins) in n.nodes.items():
        out.append(f"{node} = {_KIND_TO_TOKEN[kind]}({', '.join(fins)})")
    if scan is not None:
        out.extend(write_scan_comments(scan))
    return "\n".join(out) + "\n"


# ----------------------------------------------------------------------
# scan-chain sidecar

@dataclass(frozen=True)
class ScanConfig:
    """Description of an inserted scan chain.

    `chain` lists flip-flops from the scan-in side to the scan-out
    side.  `link_polarity` has one entry per chain position: entry i
    for i < len-1 says which output of ``chain[i]`` feeds the next scan
    cell ("Q" or "QBAR"); the final entry gives the scan-out tap.  A
    flip-flop whose output passes through a key mux always scans
    through the mux and carries polarity "Q" here.
    """

    chain: tuple[str, ...]
    link_polarity: tuple[str, ...]
    controller: bool = False
    si: str = "scan_in"
    so: str = "scan_out"
    se: str = "scan_en"
    rst: str | None = None

    def __post_init__(self):
        if len(self.link_polarity) != len(self.chain):
            raise ValueError("link_polarity must have one entry per chain position")
        for p in self.link_polarity:
            if p not in ("Q", "QBAR"):
                raise ValueError(f"bad polarity {p!r}")


def write_scan_comments(sc: ScanConfig) -> list[str]:
    return [
        f"# SCANCHAIN({','.join(sc.chain)})",
        f"# SCANPOLARITY({','.join(sc.link_polarity)})",
        f"# SCANPORTS(SI={sc.si},SO={sc.so},SE={sc.se},RST={sc.rst or '-'})",
        f"# SCANCONTROLLER({'yes' if sc.controller else 'no'})",
    ]


_RE_SCAN = re.compile(r"^#\s*(SCANCHAIN|SCANPOLARITY|SCANPORTS|SCANCONTROLLER)\s*\((.*)\)\s*$")


def parse_scan_comments(text: str) -> ScanConfig | None:
    """Recover a :class:`ScanConfig` from ``.bench`` comments, or None
    when no scan block is present."""
    fields: dict[str, str] = {}
    for raw in text.splitlines():
        m = _RE_SCAN.match(raw.strip())
        if m:
            fields[m.group(1)] = m.group(2)
    if "SCANCHAIN" not in fields:
        return None
    chain = tuple(s.strip() for s in fields["SCANCHAIN"].split(",") if s.strip())
    pol = tuple(s.strip().upper() for s in fields.get("SCANPOLARITY", "").split(",") if s.strip())
    ports = {}
    for item in fields.get("SCANPORTS", "").split(","):
        if "=" in item:
            k, v = item.split("=", 1)
            ports[k.strip().upper()] = v.strip()
    rst = ports.get("RST", "-")
    return ScanConfig(
        chain=chain,
        link_polarity=pol or ("Q",) * len(chain),
        controller=fields.get("SCANCONTROLLER", "no").strip().lower() in ("yes", "true", "1"),
        si=ports.get("SI", "scan_in"),
        so=ports.get("SO", "scan_out"),
        se=ports.get("SE", "scan_en"),
        rst=None if rst in ("-", "", "none") else rst,
    )


def load_design(text: str, name: str = "top") -> tuple[Netlist, ScanConfig | None]:
    """Parse a ``.bench`` file together with its scan comment block."""
    return parse_bench(text, name=name), parse_scan_comments(text)


# ----------------------------------------------------------------------
# key files

def write_key_file(bits, sites, header=()) -> str:
    """Serialize a key.

    Format: one ``key = <bitstring>`` line, then one ``k<i> @ <site>``
    line per key input naming the net or flip-flop it locks.  `sites`
    is a sequence of ``(key input, site)`` pairs aligned with `bits`.
    """
    lines = [f"# {h}" for h in header]
    lines.append("key = " + "".join(str(int(b)) for b in bits))
    for kname, site in sites:
        lines.append(f"{kname} @ {site}")
    return "\n".join(lines) + "\n"


def parse_key_file(text: str) -> tuple[tuple[int, ...], list[tuple[str, str]]]:
    """Inverse of :func:`write_key_file`.

    Returns ``(bits, [(key input, site), ...])``.  Raises
    :class:`BenchError` on malformed lines or a bits/sites mismatch.
    """
    bits: tuple[int, ...] | None = None
    sites: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("key"):
            _, _, val = line.partition("=")
            val = val.strip()
            if not val or set(val) - {"0", "1"}:
                raise BenchError(f"bad key bitstring {val!r}", line=lineno)
            if bits is not None:
                raise BenchError("duplicate key line", line=lineno)
            bits = tuple(int(c) for c in val)
        elif "@" in line:
            kname, _, site = line.partition("@")
            kname, site = kname.strip(), site.strip()
            if not kname or not site:
                raise BenchError("malformed site line", line=lineno)
            sites.append((kname, site))
        else:
            raise BenchError(f"unrecognized key-file line: {line!r}", line=lineno)
    if bits is None:
        raise BenchError("missing 'key =' line")
    if sites and len(sites) != len(bits):
        raise BenchError(f"{len(bits)} key bits but {len(sites)} site lines")
    return bits, sites
