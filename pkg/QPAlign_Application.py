#!/usr/bin/env python3
"""
QPAlign Command-Line Application
================================
Pairwise DNA alignment on a simulated quantum pipeline: align two sequences
(quantum search, dynamic programming or brute force), verify the pipeline
against its classical oracles, estimate circuit resources and export the
profit circuit.

Usage:
    python QPAlign_Application.py align --seq-a ATGGTCAGC --seq-b ACGGTC
    python QPAlign_Application.py align --seq-a A --seq-b A --mode quantum --seed 7
    python QPAlign_Application.py resources --m 9 --n 6
    python QPAlign_Application.py verify --max-len 2 --trials 50 --seed 1
    python QPAlign_Application.py export --seq-a A --seq-b C --format portable-qasm --out c.qasm

Exit codes:
    0 success, 1 internal error, 2 invalid input, 3 instance too large,
    4 verification failure
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Tuple

from qpalign.Alignment_Core import DEFAULT_PROFIT, ProfitParams
from qpalign.Circuit_Builder import ProfitPlan, build_full_profit_circuit
from qpalign.Circuit_Export import ExportFormat, export_circuit
from qpalign.Grover_Search import build_phase_oracle
from qpalign.Pipeline_Reports import AlignMode, RunReport, run_alignment, search_config_from
from qpalign.Resource_Estimator import ResourceEstimate, estimate_resources
from qpalign.Verification_Suite import VerificationReport, run_verification
from qpalign.utils import (
    ConfigManager,
    QPAlignError,
    SequenceValidationError,
    format_alignment,
    read_fasta_pair,
)


logger = logging.getLogger("qpalign")

TAMPERED_PROFIT = ProfitParams(1, 1, 3)


# ============================================================================
# Helpers
# ============================================================================

def setup_logging(verbose: bool = False, quiet: bool = False):
    level = logging.DEBUG if verbose else (logging.WARNING if quiet else logging.INFO)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('[%(levelname)s] %(message)s'))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(level)


def banner(title: str, stream=None):
    stream = stream or sys.stdout
    print("\n" + "=" * 60, file=stream)
    print(title, file=stream)
    print("=" * 60, file=stream)


def console(json_target: Optional[str]):
    """Human-readable output goes to stderr while stdout carries the JSON report"""
    return sys.stderr if json_target == '-' else sys.stdout


def resolve_sequences(args) -> Tuple[str, str]:
    """Sequences from --seq-a/--seq-b or a two-record FASTA file"""
    if args.fasta:
        if args.seq_a is not None or args.seq_b is not None:
            raise SequenceValidationError("give either --fasta or --seq-a/--seq-b, not both")
        return read_fasta_pair(args.fasta)
    if args.seq_a is None or args.seq_b is None:
        raise SequenceValidationError("two sequences required: --seq-a and --seq-b, or --fasta FILE")
    return args.seq_a, args.seq_b


def write_json(text: str, target: Optional[str]):
    """'-' prints to stdout, anything else is a file path"""
    if target is None:
        return
    if target == '-':
        sys.stdout.write(text)
        return
    Path(target).write_text(text)
    print(f"[OK] JSON written to {target}")


def add_sequence_args(parser: argparse.ArgumentParser):
    parser.add_argument('--seq-a', type=str, default=None,
                        help='Horizontal sequence (A/C/G/T)')
    parser.add_argument('--seq-b', type=str, default=None,
                        help='Vertical sequence (A/C/G/T)')
    parser.add_argument('--fasta', type=str, default=None, metavar='FILE',
                        help='FASTA file holding exactly two records')


def add_circuit_args(parser: argparse.ArgumentParser):
    parser.add_argument('--char-mode', type=str, default=None, choices=['reuse', 'per-step'],
                        help='Character registers: one reused pair or one pair per step')
    parser.add_argument('--adder', type=str, default=None, choices=['draper', 'ripple'],
                        help='Counter/profit adder network (default: draper)')


def add_json_arg(parser: argparse.ArgumentParser):
    parser.add_argument('--json', type=str, nargs='?', const='-', default=None, metavar='FILE',
                        help='Write the JSON report to FILE (stdout when FILE is omitted)')


# ============================================================================
# Commands
# ============================================================================

def cmd_align(args, settings: dict) -> int:
    seq_a, seq_b = resolve_sequences(args)
    config = search_config_from(settings, seed=args.seed, budget_c=args.budget_c,
                                char_mode=args.char_mode, adder=args.adder, backend=args.backend)
    mode = AlignMode(args.mode or settings.get("mode", "dp"))
    report: RunReport = run_alignment(seq_a, seq_b, mode, config, check=args.check)
    out = console(args.json)

    banner(f"QPAlign - {mode.value} alignment", out)
    print(format_alignment(report.alignment.top, report.alignment.bottom), file=out)
    print(file=out)
    print(f"  Profit:        {report.profit}", file=out)
    print(f"  Path:          {report.path}", file=out)
    print(f"  Edit distance: {report.edit_distance}", file=out)
    if mode is AlignMode.QUANTUM:
        print(f"  Rounds:        {report.rounds}", file=out)
        print(f"  Iterations:    {report.budget_used} / {report.budget_limit:g}", file=out)
        print(f"  Qubits:        {report.resources.total_qubits}", file=out)
    if report.oracle_check is not None:
        mark = "[OK]" if report.oracle_check.agrees else "[X]"
        print(f"  {mark} {report.oracle_check.referee} referee profit {report.oracle_check.referee_profit}", file=out)
    print(f"  Time:          {report.wall_time_ms:.1f} ms", file=out)
    write_json(report.to_json(), args.json)
    if report.oracle_check is not None and not report.oracle_check.agrees:
        logger.error("Reported profit disagrees with the %s referee", report.oracle_check.referee)
        return 4
    return 0


def cmd_resources(args, settings: dict) -> int:
    if args.seq_a is not None or args.seq_b is not None or args.fasta:
        seq_a, seq_b = resolve_sequences(args)
        m, n = len(seq_a), len(seq_b)
    else:
        if args.m is None or args.n is None:
            raise SequenceValidationError("resources needs --m and --n, or two sequences")
        seq_a = seq_b = None
        m, n = args.m, args.n
    estimate: ResourceEstimate = estimate_resources(
        m, n, DEFAULT_PROFIT,
        args.char_mode or settings.get("char_mode", "reuse"),
        args.adder or settings.get("adder", "draper"),
        count_gates=not args.no_gates, s1=seq_a, s2=seq_b)
    out = console(args.json)

    banner(f"QPAlign - resources for m={m}, n={n}", out)
    for key, value in estimate.model_dump().items():
        if value is not None:
            print(f"  {key:24s} {value}", file=out)
    write_json(estimate.model_dump_json(indent=2) + '\n', args.json)
    return 0


def cmd_verify(args, settings: dict) -> int:
    config = search_config_from(settings, budget_c=args.budget_c, char_mode=args.char_mode,
                                adder=args.adder)
    tamper = TAMPERED_PROFIT if args.tamper_profit else None
    report: VerificationReport = run_verification(args.max_len, args.trials, args.seed, config, tamper)
    out = console(args.json)

    banner(f"QPAlign - verification (max-len {args.max_len}, trials {args.trials}, seed {args.seed})", out)
    for check in report.checks:
        mark = "[OK]" if check.passed else "[X] "
        line = f"  {mark} {check.name:22s} {check.cases:6d} cases  {check.failures:4d} failures"
        print(line + (f"  {check.detail}" if check.detail else ""), file=out)
    write_json(report.to_json(), args.json)
    if not report.passed:
        logger.error("Verification failed")
        return 4
    print("\n[OK] All checks passed", file=out)
    return 0


def cmd_export(args, settings: dict) -> int:
    seq_a, seq_b = resolve_sequences(args)
    char_mode = args.char_mode or settings.get("char_mode", "reuse")
    adder = args.adder or settings.get("adder", "draper")
    fmt = ExportFormat(args.format)
    if args.oracle_threshold is not None:
        plan = ProfitPlan.create(seq_a, seq_b, char_mode=char_mode, adder=adder)
        spec = build_phase_oracle(plan, args.oracle_threshold)
        kind = f"oracle(v={args.oracle_threshold})"
    else:
        spec = build_full_profit_circuit(seq_a, seq_b, mode=char_mode, adder=adder)
        kind = "profit"
    extra = {"circuit": kind, "seq_a": seq_a.upper(), "seq_b": seq_b.upper(),
             "char_mode": char_mode, "adder": adder}
    text = export_circuit(spec, fmt, extra)
    Path(args.out).write_text(text)
    print(f"[OK] {kind} circuit: {spec.layout.total_qubits} qubits, {spec.gate_count} gates -> {args.out}")
    return 0


# ============================================================================
# Entry Point
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='qpalign',
        description='Pairwise DNA alignment on a simulated quantum pipeline',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog='''
Examples:
  qpalign align --seq-a ATGGTCAGC --seq-b ACGGTC --mode dp
  qpalign align --seq-a A --seq-b A --mode quantum --seed 7 --json report.json
  qpalign resources --m 9 --n 6
  qpalign verify --max-len 2 --trials 50 --seed 1
  qpalign export --seq-a A --seq-b A --format json --out c.json
        '''
    )
    parser.add_argument('--config', type=str, default=None, metavar='FILE',
                        help='JSON config file (default: $QPALIGN_CONFIG or ~/.qpalign_config.json)')
    parser.add_argument('-v', '--verbose', action='store_true', help='Debug logging')
    parser.add_argument('-q', '--quiet', action='store_true', help='Warnings and errors only')
    sub = parser.add_subparsers(dest='command', required=True)

    align = sub.add_parser('align', help='Align two sequences')
    add_sequence_args(align)
    align.add_argument('--mode', type=str, default=None, choices=[m.value for m in AlignMode],
                       help='Solver (default: dp)')
    align.add_argument('--seed', type=int, default=None, help='Seed of the single random generator')
    align.add_argument('--budget-c', type=float, default=None,
                       help='Grover budget multiplier c in c*sqrt(4^t) (default: 3.0)')
    align.add_argument('--backend', type=str, default=None, choices=['sparse', 'dense'],
                       help='Simulator backend for quantum mode (default: sparse)')
    align.add_argument('--check', action='store_true',
                       help='Cross-check the profit against a classical referee')
    add_circuit_args(align)
    add_json_arg(align)

    resources = sub.add_parser('resources', help='Estimate qubits and gates')
    resources.add_argument('--m', type=int, default=None, help='Horizontal sequence length')
    resources.add_argument('--n', type=int, default=None, help='Vertical sequence length')
    add_sequence_args(resources)
    resources.add_argument('--no-gates', action='store_true',
                           help='Skip building the circuit (widths only)')
    add_circuit_args(resources)
    add_json_arg(resources)

    verify = sub.add_parser('verify', help='Run the verification suite')
    verify.add_argument('--max-len', type=int, default=2, help='Longest random sequence (default: 2)')
    verify.add_argument('--trials', type=int, default=50, help='Random instances and search runs (default: 50)')
    verify.add_argument('--seed', type=int, default=1, help='Suite seed (default: 1)')
    verify.add_argument('--budget-c', type=float, default=None, help='Grover budget multiplier')
    verify.add_argument('--tamper-profit', action='store_true', help=argparse.SUPPRESS)
    add_circuit_args(verify)
    add_json_arg(verify)

    export = sub.add_parser('export', help='Export the profit circuit')
    add_sequence_args(export)
    export.add_argument('--format', type=str, default='json', choices=[f.value for f in ExportFormat],
                        help='Output format (default: json)')
    export.add_argument('--out', type=str, required=True, help='Output file')
    export.add_argument('--oracle-threshold', type=int, default=None, metavar='V',
                        help='Export the phase oracle at threshold V instead')
    add_circuit_args(export)

    return parser


COMMANDS = {
    'align': cmd_align,
    'resources': cmd_resources,
    'verify': cmd_verify,
    'export': cmd_export,
}


def main(argv=None) -> int:
    """Main entry point for the application."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose, args.quiet)
    settings = ConfigManager(args.config).config

    try:
        return COMMANDS[args.command](args, settings)
    except QPAlignError as e:
        logger.error("%s", e)
        logger.debug("Traceback:", exc_info=True)
        return e.exit_code
    except ValueError as e:
        logger.error("%s", e)
        logger.debug("Traceback:", exc_info=True)
        return 2
    except OSError as e:
        logger.error("I/O failure: %s", e)
        return 1
    except Exception as e:
        logger.error("Internal error: %s", e, exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
