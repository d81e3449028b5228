"""Logic locking for sequential gate-level netlists.

The package covers the full netlist-plus-activated-part workflow: parse
a ``.bench`` design, pick flip-flops whose corruption stays inside a
chosen output set, lock them (or random nets) with key gates, stitch a
scan chain with an optional post-reset lockout controller, simulate
both functional and scan operation, run key-recovery attacks against a
pin-level oracle, and score the result (corruption, attack complexity,
area cost).
"""

from .netlist import (
    BenchError,
    Diagnostic,
    GateKind,
    Netlist,
    ScanConfig,
    load_design,
    parse_bench,
    parse_key_file,
    parse_scan_comments,
    qbar,
    split_ref,
    validate,
    write_bench,
    write_key_file,
    write_scan_comments,
)
from .cone import (
    Cone,
    KeyTooLarge,
    NoCandidates,
    SelectionResult,
    eff_keymux_map,
    fanout_outputs,
    icod,
    influence_map,
    pick_key_ffs,
    select_flip_flops,
    select_from_relation,
)
from .encrypt import (
    EncryptError,
    EncryptionResult,
    Placement,
    discover_scan,
    encrypt_flip_flop,
    encrypt_mux_random,
    encrypt_oc,
    encrypt_xor_random,
    insert_scan,
    insert_scan_controller,
    scan_order_guarded_first,
    strip_scan,
)
from .sim import (
    CompiledNetlist,
    Oracle,
    SimState,
    eval_comb,
    random_pi_trace,
    run_patterns,
    trace_distance,
)
from .attacks import (
    BIT_ELIMINATED,
    BIT_RECOVERED,
    BIT_UNKNOWN,
    AttackError,
    AttackReport,
    Blocked,
    ChainCodec,
    Infeasible,
    KeylessCones,
    ParityResult,
    hill_climbing_attack,
    parity_probe,
    reset_and_scan_attack,
    scan_partition_attack,
    sensitization_vulnerable_ffs,
    validate_key,
)
from .metrics import (
    AreaEstimate,
    CellAreaTable,
    CorruptionCurve,
    EmptyAffected,
    MissingCell,
    affected_outputs,
    area_estimate,
    attack_complexity,
    avg_corruption_compare,
    netlist_area,
    output_corruption,
    pearson,
)
from .gen import (
    REFERENCE_LOCKED,
    REFERENCE_QBAR_LINKS,
    chain_core,
    random_netlist,
    reference_chain,
)

__version__ = "0.1.0"

__all__ = [
    "BenchError", "Diagnostic", "GateKind", "Netlist", "ScanConfig",
    "load_design", "parse_bench", "parse_key_file", "parse_scan_comments",
    "qbar", "split_ref", "validate", "write_bench", "write_key_file",
    "write_scan_comments",
    "Cone", "KeyTooLarge", "NoCandidates", "SelectionResult",
    "eff_keymux_map", "fanout_outputs", "icod", "influence_map",
    "pick_key_ffs", "select_flip_flops", "select_from_relation",
    "EncryptError", "EncryptionResult", "Placement", "discover_scan",
    "encrypt_flip_flop", "encrypt_mux_random", "encrypt_oc",
    "encrypt_xor_random", "insert_scan", "insert_scan_controller",
    "scan_order_guarded_first", "strip_scan",
    "CompiledNetlist", "Oracle", "SimState", "eval_comb",
    "random_pi_trace", "run_patterns", "trace_distance",
    "BIT_ELIMINATED", "BIT_RECOVERED", "BIT_UNKNOWN", "AttackError",
    "AttackReport", "Blocked", "ChainCodec", "Infeasible", "KeylessCones",
    "ParityResult", "hill_climbing_attack", "parity_probe",
    "reset_and_scan_attack", "scan_partition_attack",
    "sensitization_vulnerable_ffs", "validate_key",
    "AreaEstimate", "CellAreaTable", "CorruptionCurve", "EmptyAffected",
    "MissingCell", "affected_outputs", "area_estimate", "attack_complexity",
    "avg_corruption_compare", "netlist_area", "output_corruption", "pearson",
    "REFERENCE_LOCKED", "REFERENCE_QBAR_LINKS", "chain_core",
    "random_netlist", "reference_chain",
    "__version__",
]
