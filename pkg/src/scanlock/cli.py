"""Command-line front end.

Subcommands compose the library into a reproducible pipeline:

* ``stats``    - size figures for a design, checked against the bundled
  expectation manifest when the circuit is listed there.
* ``analyze``  - flip-flop selection: candidate cells, affected outputs
  and coverage, plus search-complexity exponents.
* ``encrypt``  - lock a design and emit the locked netlist, the key
  file and a JSON report.
* ``simulate`` - run seeded functional patterns and emit the output
  trace as CSV.
* ``attack``   - run one key-recovery attack (or the whole suite)
  against a simulated activated part and report what leaked.
* ``report``   - corruption curve and cost summary for a locked design.

Every emitted file embeds the configuration hash and all seeds, and no
emitted file contains wall-clock data, so a rerun with the same
arguments is byte-identical.  Timings go to stderr.  Distinct error
classes map to distinct exit codes (see EXIT_* constants).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import importlib.resources
import io
import json
import os
import sys
import time

from .attacks import (
    AttackError,
    Blocked,
    Infeasible,
    KeylessCones,
    hill_climbing_attack,
    parity_probe,
    reset_and_scan_attack,
    scan_partition_attack,
    sensitization_vulnerable_ffs,
)
from .cone import KeyTooLarge, NoCandidates, pick_key_ffs, select_flip_flops
from .encrypt import (
    EncryptError,
    discover_scan,
    encrypt_flip_flop,
    encrypt_mux_random,
    encrypt_oc,
    encrypt_xor_random,
    insert_scan,
    insert_scan_controller,
    scan_order_guarded_first,
)
from .metrics import (
    EmptyAffected,
    affected_outputs,
    area_estimate,
    attack_complexity,
    netlist_area,
    output_corruption,
)
from .netlist import (
    BenchError,
    Netlist,
    ScanConfig,
    load_design,
    parse_key_file,
    validate,
    write_bench,
    write_key_file,
)
from .sim import Oracle, run_patterns

EXIT_OK = 0
EXIT_USAGE = 2          # argparse errors
EXIT_NOT_FOUND = 3      # design/key file missing
EXIT_BAD_INPUT = 4      # parse or validation failure
EXIT_ENCRYPT = 5        # selection/encryption failure
EXIT_BLOCKED = 6        # attack stopped by the scan lockout
EXIT_ATTACK = 7         # attack ran but did not recover a working key

ENV_BENCH_DIR = "SCANLOCK_BENCH_DIR"

_SCHEMES = ("eff", "xor", "mux", "oc")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# ----------------------------------------------------------------------
# plumbing

def _config_hash(command: str, args: argparse.Namespace,
                 **overrides) -> tuple[dict, str]:
    """Resolved arguments and their digest.

    Output destinations are excluded and input files are recorded by
    content digest (callers pass those as overrides), so the same run
    on the same inputs is byte-identical wherever the files live.
    """
    from . import __version__
    cfg = {"command": command, "tool_version": __version__}
    for k, v in sorted(vars(args).items()):
        if k in ("func", "out", "report"):
            continue
        cfg[k] = v
    cfg.update(overrides)
    digest = hashlib.sha256(
        json.dumps(cfg, sort_keys=True, default=str).encode()).hexdigest()
    return cfg, digest


def _sha256_text(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode()).hexdigest()


def _key_arg_id(spec: str) -> str:
    """Stable identity for a --key style argument: literal bitstrings
    stay as-is, file paths become content digests."""
    text = spec[1:] if spec.startswith("@") else spec
    if set(text) <= {"0", "1"} and text:
        return text
    if os.path.isfile(text):
        return _sha256_text(open(text, encoding="utf-8").read())
    return spec


def _resolve_design(path: str) -> str:
    """Find a design file: as given, with .bench appended, under
    $SCANLOCK_BENCH_DIR, or among the bundled circuits."""
    candidates = [path, path + ".bench"]
    env = os.environ.get(ENV_BENCH_DIR)
    if env:
        candidates += [os.path.join(env, path), os.path.join(env, path + ".bench")]
    data_dir = importlib.resources.files("scanlock") / "data"
    candidates += [str(data_dir / path), str(data_dir / (path + ".bench"))]
    for c in candidates:
        if os.path.isfile(c):
            return c
    raise CliError(f"design not found: {path!r} (searched cwd, "
                   f"${ENV_BENCH_DIR}, bundled data)", EXIT_NOT_FOUND)


def _load(path: str) -> tuple[Netlist, ScanConfig | None, str]:
    resolved = _resolve_design(path)
    text = open(resolved, encoding="utf-8").read()
    name = os.path.basename(resolved)
    for suffix in (".locked.bench", ".bench"):
        if name.endswith(suffix):
            name = name[: -len(suffix)]
            break
    try:
        n, sc = load_design(text, name=name)
    except BenchError as e:
        raise CliError(f"{resolved}: {e}", EXIT_BAD_INPUT)
    return n, sc, resolved


def _load_key(spec: str, n: Netlist) -> tuple[int, ...]:
    """A key given as a literal bitstring or as @file / file path."""
    text = spec[1:] if spec.startswith("@") else spec
    if set(text) <= {"0", "1"} and text:
        bits = tuple(int(b) for b in text)
    else:
        if not os.path.isfile(text):
            raise CliError(f"key file not found: {text!r}", EXIT_NOT_FOUND)
        try:
            bits, _ = parse_key_file(open(text, encoding="utf-8").read())
        except BenchError as e:
            raise CliError(f"{text}: {e}", EXIT_BAD_INPUT)
    if len(bits) != len(n.key_inputs):
        raise CliError(f"key has {len(bits)} bits, design declares "
                       f"{len(n.key_inputs)} key inputs", EXIT_BAD_INPUT)
    return bits


def _manifest() -> dict:
    res = importlib.resources.files("scanlock") / "data" / "manifest.json"
    return json.loads(res.read_text(encoding="utf-8"))


def _emit_json(payload: dict, out: str | None):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _stderr_time(label: str, t0: float):
    print(f"[time] {label}: {time.perf_counter() - t0:.3f}s", file=sys.stderr)


# ----------------------------------------------------------------------
# stats / analyze

def cmd_stats(args) -> int:
    t0 = time.perf_counter()
    n, sc, resolved = _load(args.design)
    cfg, digest = _config_hash(
        "stats", args,
        design=_sha256_text(open(resolved, encoding="utf-8").read()))
    row = dict(n.stats())
    row["scan_chain"] = len(sc.chain) if sc else 0
    try:
        sel = select_flip_flops(n)
        row["candidate_dffs"] = len(sel.l_strong)
        row["affected_outputs"] = len(sel.affected_outputs)
        row["coverage_pct"] = round(sel.coverage_pct, 2)
    except NoCandidates:
        row["candidate_dffs"] = 0
        row["affected_outputs"] = 0
        row["coverage_pct"] = 0.0
    expected = _manifest()["circuits"].get(n.name)
    if expected is not None:
        row["expected"] = {k: v for k, v in expected.items()
                           if k in ("inputs", "outputs", "gates", "dffs",
                                    "candidate_dffs", "affected_outputs",
                                    "coverage_pct")}
        row["matches_expected"] = all(
            row.get(k) == v for k, v in row["expected"].items())
    row["config_sha256"] = digest
    if args.timing:
        row["encryption_time"] = time.perf_counter() - t0
    _stderr_time("stats", t0)
    if args.json or args.out:
        _emit_json({"config": cfg, **row}, args.out)
    else:
        for k in sorted(row):
            print(f"{k}: {row[k]}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    t0 = time.perf_counter()
    n, sc, resolved = _load(args.design)
    cfg, digest = _config_hash(
        "analyze", args,
        design=_sha256_text(open(resolved, encoding="utf-8").read()))
    try:
        sel = select_flip_flops(n, transitive=not args.comb_only,
                                floor=args.floor)
    except NoCandidates as e:
        raise CliError(str(e), EXIT_ENCRYPT)
    scan_exp, brute_exp = attack_complexity(n, sc)
    payload = {
        "config": cfg,
        "config_sha256": digest,
        "design": n.name,
        "affected_outputs": list(sel.affected_outputs),
        "l_strong": list(sel.l_strong),
        "l_weak": list(sel.l_weak),
        "l_overlap": list(sel.l_overlap),
        "coverage_pct": round(sel.coverage_pct, 2),
        "scan_exponent": scan_exp,
        "brute_force_exponent": brute_exp,
    }
    expected = _manifest()["circuits"].get(n.name)
    if expected is not None:
        payload["expected"] = {k: expected[k] for k in
                               ("candidate_dffs", "affected_outputs", "coverage_pct")
                               if k in expected}
    if sc is not None:
        payload["sensitization_exposed"] = list(sensitization_vulnerable_ffs(n, sc))
    _stderr_time("analyze", t0)
    if args.json or args.out:
        _emit_json(payload, args.out)
    else:
        print(f"design: {payload['design']}")
        print(f"candidates ({len(sel.l_strong)}): {', '.join(sel.l_strong) or '-'}")
        print(f"weak ({len(sel.l_weak)}): {', '.join(sel.l_weak) or '-'}")
        print(f"affected outputs ({len(sel.affected_outputs)}): "
              f"{', '.join(sel.affected_outputs)}")
        print(f"coverage: {payload['coverage_pct']}%")
        print(f"search exponents: scan={scan_exp} brute={brute_exp}")
        if "sensitization_exposed" in payload:
            print(f"sensitization-exposed: "
                  f"{', '.join(payload['sensitization_exposed']) or '-'}")
    return EXIT_OK


# ----------------------------------------------------------------------
# encrypt

def cmd_encrypt(args) -> int:
    t0 = time.perf_counter()
    n, sc, resolved = _load(args.design)
    cfg, digest = _config_hash(
        "encrypt", args,
        design=_sha256_text(open(resolved, encoding="utf-8").read()))
    if sc is not None:
        raise CliError("design already carries a scan chain; encrypt the "
                       "functional design first", EXIT_BAD_INPUT)
    if n.key_inputs:
        raise CliError("design already declares key inputs", EXIT_BAD_INPUT)
    try:
        if args.scheme == "eff":
            sel = select_flip_flops(n)
            ffs = pick_key_ffs(sel, args.key_bits, seed=args.select_seed)
            enc = encrypt_flip_flop(n, ffs, seed=args.seed)
        elif args.scheme == "xor":
            enc = encrypt_xor_random(n, args.key_bits, seed=args.seed)
        elif args.scheme == "mux":
            enc = encrypt_mux_random(n, args.key_bits, seed=args.seed)
        else:
            enc = encrypt_oc(n, args.key_bits, seed=args.seed)
    except (NoCandidates, KeyTooLarge, EncryptError) as e:
        raise CliError(f"{type(e).__name__}: {e}", EXIT_ENCRYPT)

    locked = enc.netlist
    sc_out: ScanConfig | None = None
    if not args.no_scan:
        order = (scan_order_guarded_first(locked) if args.guard_first
                 else list(locked.dffs))
        locked, sc_out = insert_scan(locked, order=order, seed=args.scan_seed,
                                     tap=args.scan_tap)
        if args.controller:
            locked, sc_out = insert_scan_controller(locked, sc_out)
    diags = validate(locked)
    if diags:
        raise CliError(f"internal: locked netlist invalid: {diags[0]}",
                       EXIT_ENCRYPT)

    os.makedirs(args.out, exist_ok=True)
    base = os.path.join(args.out, n.name)
    header = (f"config_sha256={digest}",
              f"scheme={args.scheme} key_bits={len(enc.correct_key)}",
              f"seed={args.seed} select_seed={args.select_seed} "
              f"scan_seed={args.scan_seed}")
    bench_path = base + ".locked.bench"
    with open(bench_path, "w", encoding="utf-8") as fh:
        fh.write(write_bench(locked, scan=sc_out, header=header))
    key_path = base + ".key"
    with open(key_path, "w", encoding="utf-8") as fh:
        fh.write(write_key_file(enc.correct_key, enc.key_sites(), header=header))

    scan_exp, brute_exp = attack_complexity(locked, sc_out)
    table_base = netlist_area(n)
    est = area_estimate(args.scheme, len(enc.correct_key), n=len(n.primary_inputs),
                        base_area=table_base)
    report = {
        "config": cfg,
        "config_sha256": digest,
        "design": n.name,
        "scheme": args.scheme,
        "key": enc.key_string(),
        "placements": [{"key": p.key, "site": p.site, "polarity": p.polarity}
                       for p in enc.placements],
        "stats": locked.stats(),
        "scan": ({"chain_length": len(sc_out.chain),
                  "controller": sc_out.controller} if sc_out else None),
        "affected_outputs": list(affected_outputs(enc.netlist)),
        "scan_exponent": scan_exp,
        "brute_force_exponent": brute_exp,
        "area": {"base": table_base, "extra": est.extra_area,
                 "overhead_pct": est.overhead_pct},
        "files": {"bench": os.path.basename(bench_path),
                  "key": os.path.basename(key_path)},
    }
    _emit_json(report, base + ".encrypt.json")
    _stderr_time("encrypt", t0)
    print(f"wrote {bench_path}, {key_path}, {base}.encrypt.json")
    return EXIT_OK


# ----------------------------------------------------------------------
# simulate

def cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    n, sc, resolved = _load(args.design)
    cfg, digest = _config_hash(
        "simulate", args,
        design=_sha256_text(open(resolved, encoding="utf-8").read()),
        key=_key_arg_id(args.key) if args.key else None)
    key = _load_key(args.key, n) if args.key else ()
    if n.key_inputs and not args.key:
        raise CliError("design declares key inputs; pass --key", EXIT_BAD_INPUT)
    pos, trace = run_patterns(n, key, args.patterns, args.cycles, args.seed,
                              scan=sc)
    buf = io.StringIO()
    buf.write(f"# config_sha256={digest}\n")
    buf.write(f"# seed={args.seed} patterns={args.patterns} cycles={args.cycles}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pattern", "cycle"] + list(pos))
    for c, row in enumerate(trace):
        for p in range(args.patterns):
            w.writerow([p, c] + [(row[i] >> p) & 1 for i in range(len(pos))])
    _stderr_time("simulate", t0)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# ----------------------------------------------------------------------
# attack

def _run_one_attack(method: str, enc: Netlist, sc: ScanConfig | None,
                    oracle: Oracle, args) -> tuple[dict, bool]:
    """Returns (entry, broken).  `entry` is JSON-ready; exceptions that
    represent a defended outcome are folded in, others propagate."""
    try:
        if method == "reset-scan":
            if sc is None:
                return {"outcome": "not-applicable",
                        "note": "no scan chain"}, False
            rep = reset_and_scan_attack(enc, sc, oracle)
            return {"outcome": "broken" if rep.success else "partial",
                    "report": rep.as_dict()}, rep.success
        if method == "scan":
            rep = scan_partition_attack(enc, oracle, sc=sc,
                                        budget_exp=args.budget_exp,
                                        seed=args.seed)
            return {"outcome": "broken" if rep.success else "partial",
                    "report": rep.as_dict()}, rep.success
        if method == "parity":
            if sc is None:
                return {"outcome": "not-applicable",
                        "note": "no scan chain"}, False
            res = parity_probe(oracle, sc, enc=enc)
            return {"outcome": "leaks-parity-bit",
                    "report": {"key_parity": res.key_parity,
                               "total_parity": res.total_parity,
                               "scan_queries": res.scan_queries}}, False
        rep = hill_climbing_attack(enc, oracle, max_iters=args.max_iters,
                                   seed=args.seed, sc=sc)
        return {"outcome": "broken" if rep.success else "stuck",
                "report": rep.as_dict()}, rep.success
    except Blocked as e:
        return {"outcome": "blocked", "note": str(e)}, False
    except KeylessCones as e:
        return {"outcome": "no-keyed-cones", "note": str(e)}, False
    except Infeasible as e:
        return {"outcome": "infeasible", "note": str(e)}, False
    except AttackError as e:
        return {"outcome": "failed", "note": str(e)}, False


_ALL_METHODS = ("scan", "reset-scan", "parity", "hill")


def cmd_attack(args) -> int:
    t0 = time.perf_counter()
    enc, sc, resolved = _load(args.design)
    cfg, digest = _config_hash(
        "attack", args,
        design=_sha256_text(open(resolved, encoding="utf-8").read()),
        oracle_key=_key_arg_id(args.oracle_key))
    if not enc.key_inputs:
        payload = {"config": cfg, "config_sha256": digest,
                   "design": enc.name, "note": "no key inputs; nothing to attack"}
        _emit_json(payload, args.report)
        return EXIT_OK
    oracle_key = _load_key(args.oracle_key, enc)
    if sc is None:
        sc = discover_scan(enc)

    methods = _ALL_METHODS if args.method == "all" else (args.method,)
    results: dict[str, dict] = {}
    broken_any = False
    for m in methods:
        oracle = Oracle(enc, oracle_key, sc)
        entry, broken = _run_one_attack(m, enc, sc, oracle, args)
        results[m] = entry
        broken_any = broken_any or broken
    if args.method == "all" and sc is not None:
        exposed = sensitization_vulnerable_ffs(enc, sc)
        results["sensitization"] = {
            "outcome": "exposed-cells" if exposed else "resisted",
            "report": {"cells": list(exposed)}}

    payload = {
        "config": cfg,
        "config_sha256": digest,
        "design": enc.name,
        "results": results,
        "resilience": {m: ("no" if r["outcome"] == "broken" else "yes")
                       for m, r in results.items()},
    }
    _emit_json(payload, args.report)
    _stderr_time("attack", t0)
    if args.report:
        print(f"wrote {args.report}")
    if args.method == "all":
        return EXIT_OK
    outcome = results[methods[0]]["outcome"]
    if outcome == "broken":
        return EXIT_OK
    if outcome == "leaks-parity-bit":
        return EXIT_OK
    if outcome == "blocked":
        return EXIT_BLOCKED
    return EXIT_ATTACK


# ----------------------------------------------------------------------
# report

def cmd_report(args) -> int:
    t0 = time.perf_counter()
    n, sc, resolved = _load(args.design)
    cfg, digest = _config_hash(
        "report", args,
        design=_sha256_text(open(resolved, encoding="utf-8").read()),
        key=_key_arg_id(args.key))
    if not n.key_inputs:
        raise CliError("design has no key inputs to report on", EXIT_BAD_INPUT)
    key = _load_key(args.key, n)
    from .encrypt import strip_scan
    bare = strip_scan(n, sc) if sc is not None else n
    try:
        curve = output_corruption(bare, key, n_patterns=args.patterns,
                                  seed=args.seed, cycles=args.cycles,
                                  restrict_affected=not args.all_outputs)
    except EmptyAffected as e:
        raise CliError(str(e), EXIT_ATTACK)

    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, n.name + ".corruption.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(f"# config_sha256={digest}\n")
        fh.write(f"# seed={args.seed} patterns={args.patterns} "
                 f"cycles={args.cycles}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["wrong_key_pct", "pattern", "hd_pct"])
        for pct, pat, hd in curve.rows():
            w.writerow([pct, pat, f"{hd:.4f}"])

    k = len(key)
    scan_exp, brute_exp = attack_complexity(n, sc)
    base = netlist_area(bare)
    areas = {}
    for scheme in ("eff", "xor", "mux", "oc", "sarlock", "antisat"):
        est = area_estimate(scheme, k, n=max(2, len(bare.primary_inputs)),
                            base_area=base)
        areas[scheme] = {"extra": est.extra_area,
                         "overhead_pct": round(est.overhead_pct, 4)}
    payload = {
        "config": cfg,
        "config_sha256": digest,
        "design": n.name,
        "key_bits": k,
        "affected_outputs": list(curve.outputs),
        "corruption_mean_hd_pct": [
            {"wrong_key_pct": pct, "mean_hd_pct": round(m, 4)}
            for pct, m in zip(curve.wrong_key_pct, curve.means())],
        "scan_exponent": scan_exp,
        "brute_force_exponent": brute_exp,
        "base_area": base,
        "area_extra_by_scheme": areas,
        "files": {"corruption_csv": os.path.basename(csv_path)},
    }
    _emit_json(payload, os.path.join(args.out, n.name + ".report.json"))
    _stderr_time("report", t0)
    print(f"wrote {csv_path}, "
          f"{os.path.join(args.out, n.name + '.report.json')}")
    return EXIT_OK


# ----------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="scanlock",
        description="Logic locking toolkit for sequential bench netlists")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="size figures and manifest check")
    p.add_argument("design")
    p.add_argument("--json", action="store_true")
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock timing in the JSON "
                        "(breaks rerun byte-identity)")
    p.add_argument("--out", default=None, help="write JSON here")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("analyze", help="flip-flop selection and exponents")
    p.add_argument("design")
    p.add_argument("--floor", type=int, default=1)
    p.add_argument("--comb-only", action="store_true",
                   help="one combinational level instead of transitive reach")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("encrypt", help="lock a design and emit artifacts")
    p.add_argument("design")
    p.add_argument("--scheme", choices=_SCHEMES, required=True)
    p.add_argument("-k", "--key-bits", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--select-seed", type=int, default=0)
    p.add_argument("--scan-seed", type=int, default=0)
    p.add_argument("--no-scan", action="store_true")
    p.add_argument("--scan-tap", choices=("keymux", "q"), default="keymux",
                   help="chain links of locked cells come off the key mux "
                        "(default) or the raw flip-flop output")
    p.add_argument("--controller", action="store_true",
                   help="add the post-reset scan lockout")
    p.add_argument("--guard-first", action="store_true",
                   help="keep the first chain cell unlocked")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("simulate", help="seeded functional trace as CSV")
    p.add_argument("design")
    p.add_argument("--key", default=None, help="bitstring or key file path")
    p.add_argument("--patterns", type=int, default=8)
    p.add_argument("--cycles", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("attack", help="run key-recovery attacks")
    p.add_argument("design", help="locked bench file")
    p.add_argument("--oracle-key", required=True,
                   help="activation key for the simulated part "
                        "(attacks still see pins only)")
    p.add_argument("--method", choices=_ALL_METHODS + ("all",), default="all")
    p.add_argument("--budget-exp", type=int, default=24)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--report", default=None, help="write JSON report here")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("report", help="corruption curve and cost summary")
    p.add_argument("design")
    p.add_argument("--key", required=True)
    p.add_argument("--patterns", type=int, default=200)
    p.add_argument("--cycles", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--all-outputs", action="store_true",
                   help="measure every output, not just the affected set")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"scanlock: {e}", file=sys.stderr)
        return e.code
    except BenchError as e:
        print(f"scanlock: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
