"""Command-line driver: compile, run, bench and compare.

Exit codes: 0 success, 1 compile error, 2 usage error, 3 no parameter set
fits, 4 noise budget exceeded at decryption, 5 equivalence failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .backend.circuit import format_circuit
from .bench import format_table, run_benchmark
from .compare import compare_compiled
from .config import load_config
from .corpus import CORPUS, lookup
from .errors import BatchFheError, DslError, NoiseBudgetExceeded, ParameterError, PipelineError
from .frontend import check_types, parse, print_program, tokenize
from .ir.text import export_json, print_ir
from .pipeline import PipelineConfig, compile_source, front_end
from .sim.reference import InputError, exec_reference, normalise_inputs
from .sim.simulator import exec_circuit

EXIT_COMPILE, EXIT_USAGE, EXIT_PARAMS, EXIT_NOISE, EXIT_DIVERGED = 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _define(text: str) -> tuple[str, int]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=INT, got {text!r}")
    try:
        return name.strip(), int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer value in {text!r}") from None


def _sizes(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from None


def _pipeline_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--skip-pass", action="append", default=[], metavar="PASS",
                   help="leave out an optimization pass (repeatable)")
    p.add_argument("--params", metavar="NAME", help="force a parameter set instead of choosing one")
    p.add_argument("--relin", choices=("always", "none"), default="always", help="relinearization policy")
    p.add_argument("--t", type=int, metavar="INT", help="plaintext modulus (default from the config)")
    p.add_argument("--n", type=int, metavar="INT", help="shorthand for --define N=INT")
    p.add_argument("--define", type=_define, action="append", default=[], metavar="NAME=INT",
                   help="override a top-level const (repeatable)")
    p.add_argument("--config", metavar="FILE", help="weight/parameter/noise config (default: $HECO_CONFIG)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="batchfhe", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="compile a program and print one stage")
    c.add_argument("file", help=".heco file or corpus benchmark name")
    c.add_argument("--emit", choices=("ast", "ir", "batched", "circuit", "stats"), default="stats")
    c.add_argument("--json", action="store_true", help="machine-readable output")
    c.add_argument("--verify-each", action="store_true", help="run the IR verifier after every pass")
    c.add_argument("--no-timing", action="store_true", help="omit wall-clock fields from JSON")
    _pipeline_args(c)

    r = sub.add_parser("run", help="run a program on inputs from a JSON file")
    r.add_argument("file")
    r.add_argument("--input", required=True, metavar="FILE", help="JSON object {name: value}; '-' for stdin")
    r.add_argument("--mode", choices=("naive", "batched"), default="batched",
                   help="naive: reference interpreter; batched: compiled circuit in the simulator")
    r.add_argument("--trace", action="store_true", help="print one line per circuit op to stderr")
    r.add_argument("--full-trace", action="store_true", help="like --trace without eliding wide slot vectors")
    _pipeline_args(r)

    b = sub.add_parser("bench", help="naive vs batched counts, ratios and correctness")
    b.add_argument("name", help="benchmark name or 'all'")
    b.add_argument("--n", type=_sizes, metavar="LIST", help="comma-separated sizes (default: per benchmark)")
    b.add_argument("--repeat", type=int, default=100, help="random inputs for the correctness check")
    b.add_argument("--compile-runs", type=int, default=3,
                   help="compilations per row; the time is the mean without the extremes")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--json", action="store_true")
    b.add_argument("--no-timing", action="store_true", help="omit wall-clock fields from JSON")
    b.add_argument("--config", metavar="FILE")

    q = sub.add_parser("compare", help="differential test of the batched circuit against the reference")
    q.add_argument("file")
    q.add_argument("--trials", type=int, default=100)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--json", action="store_true")
    _pipeline_args(q)
    return ap


def _resolve(file: str) -> tuple[str, str, dict[str, int]]:
    """(display name, source text, default defines) for a path or a corpus name."""
    path = Path(file)
    if path.is_file():
        return str(path), path.read_text(), {}
    try:
        entry = lookup(file)
    except KeyError:
        raise UsageError(f"no such file or benchmark: {file}") from None
    return entry.file, entry.source(), entry.defines(entry.sizes[0])


def _config(args, defaults: dict[str, int]) -> PipelineConfig:
    defines = dict(defaults)
    defines.update(dict(args.define))
    if args.n is not None:
        defines["N"] = args.n
    try:
        cfg = load_config(args.config) if args.config else None
        pc = PipelineConfig(skip=frozenset(args.skip_pass), relin=args.relin, params=args.params,
                            modulus=args.t, defines=defines, config=cfg)
        if args.params:
            pc.cfg.row(args.params)
        return pc
    except (PipelineError, KeyError, ValueError, OSError) as e:
        raise UsageError(str(e.args[0] if isinstance(e, KeyError) else e)) from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _no_params_message(rep) -> str:
    return f"error: depth exceeds largest parameter set (peak noise {rep.peak_noise}, depth {rep.depth:g})"


def cmd_compile(args) -> int:
    name, src, defaults = _resolve(args.file)
    pc = _config(args, defaults)
    if args.emit in ("ast", "ir"):
        if args.emit == "ast":
            prog = check_types(parse(tokenize(src)), pc.defines or None, pc.t)
            print(_dump({"source": print_program(prog.ast)}) if args.json else print_program(prog.ast), end="")
            return 0
        _, f, _ = front_end(src, pc)
        print(_dump(export_json(f)) if args.json else print_ir(f))
        return 0
    comp = compile_source(src, pc, verify_each=args.verify_each)
    if args.emit == "batched":
        print(_dump(export_json(comp.batched)) if args.json else print_ir(comp.batched))
    elif args.emit == "circuit":
        print(_dump(comp.circuit.to_json()) if args.json else format_circuit(comp.circuit))
    else:
        rep = comp.report
        if args.json:
            d = rep.to_json()
            if args.no_timing:
                d.pop("compile_ms")
            print(_dump(d))
        else:
            print(f"{name}: {comp.ir.name}, n={comp.circuit.slots}")
            for k, v in rep.counts.items():
                if v:
                    print(f"  {k:<12} {v}")
            print(f"  total ops    {rep.total_ops}")
            print(f"  depth        {rep.depth:g}")
            print(f"  peak noise   {rep.peak_noise}")
            print(f"  weighted     {rep.weighted_cost}")
            print(f"  params       {rep.params.name if rep.params else 'none'}")
            print(f"  compile ms   {sum(rep.compile_ms.values()):.1f}")
    if comp.report.params is None:
        print(_no_params_message(comp.report), file=sys.stderr)
        return EXIT_PARAMS
    return 0


def _read_inputs(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        doc = json.loads(text)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read inputs: {e}") from None
    if not isinstance(doc, dict):
        raise UsageError("inputs must be a JSON object {name: value}")
    return doc


def cmd_run(args) -> int:
    _, src, defaults = _resolve(args.file)
    pc = _config(args, defaults)
    inputs = _read_inputs(args.input)
    if args.mode == "naive":
        prog = check_types(parse(tokenize(src)), pc.defines or None, pc.t)
        tf = prog.function()
        normalise_inputs(tf, inputs)
        print(_dump({tf.node.name: exec_reference(prog, inputs)}))
        return 0
    comp = compile_source(src, pc)
    normalise_inputs(comp.program.function(comp.ir.name), inputs)
    params = comp.report.params
    if params is None:
        print(_no_params_message(comp.report), file=sys.stderr)
        return EXIT_PARAMS
    tr = exec_circuit(comp.circuit, inputs, params, trace=args.trace or args.full_trace, cfg=pc.cfg)
    if args.trace or args.full_trace:
        print(tr.dump(full=args.full_trace), file=sys.stderr)
    print(_dump({comp.ir.name: tr.result()}))
    return 0


def cmd_bench(args) -> int:
    names = list(CORPUS) if args.name == "all" else [args.name]
    try:
        entries = [lookup(n) for n in names]
        pc = PipelineConfig(config=load_config(args.config) if args.config else None)
    except (KeyError, ValueError, OSError) as e:
        raise UsageError(str(e.args[0] if isinstance(e, KeyError) else e)) from None
    rows = []
    status = 0
    for e in entries:
        for n in (args.n or e.sizes):
            try:
                rows.append(run_benchmark(e, n, pc, args.repeat, args.seed, args.compile_runs))
            except BatchFheError as err:
                print(f"error: {e.name} at n={n}: {err}", file=sys.stderr)
                status = status or EXIT_COMPILE
    if any(not r.correct for r in rows):
        status = EXIT_DIVERGED
    if args.json:
        print(_dump([r.to_json(timings=not args.no_timing) for r in rows]))
    else:
        print(format_table(rows))
    return status


def cmd_compare(args) -> int:
    _, src, defaults = _resolve(args.file)
    pc = _config(args, defaults)
    comp = compile_source(src, pc)
    res = compare_compiled(comp, pc, args.trials, args.seed)
    for w in res.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.json:
        print(_dump(res.to_json()))
    elif res.passed:
        print(f"PASS {res.name}: {res.trials} trials")
    else:
        d = res.divergence
        where = "" if d.position is None else f" at output element {d.position}"
        print(f"DIVERGED {res.name}: trial {d.trial}{where}; first bad stage: {d.stage}")
        print(f"  input    {json.dumps(d.inputs)}")
        print(f"  expected {json.dumps(d.expected)}")
        print(f"  actual   {json.dumps(d.actual)}")
    return 0 if res.passed else EXIT_DIVERGED


COMMANDS = {"compile": cmd_compile, "run": cmd_run, "bench": cmd_bench, "compare": cmd_compare}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DslError as e:
        print(f"{getattr(args, 'file', '')}:{e}", file=sys.stderr)
        return EXIT_COMPILE
    except ParameterError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARAMS
    except NoiseBudgetExceeded as e:
        print(f"error: decryption failed: {e}", file=sys.stderr)
        return EXIT_NOISE
    except BatchFheError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_COMPILE


if __name__ == "__main__":
    sys.exit(main())
