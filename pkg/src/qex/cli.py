"""``qex`` command-line entry point.

Every command prints one JSON document on stdout (or a flat table with
``--format table``) and writes diagnostics to stderr.  Exit status is 0 on
success, 1 on a usage error and 2 when the analysis itself fails (validation
violations, support cap, synthesis budget).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from . import __version__
from .amplify import AmplifyError, search
from .circuit import depth, gate_count, to_qasm
from .classical import (CapExceeded, InputDomain, InterpError, SplitError, enumerate_program,
                        interval_analyze)
from .classical.interp import DEFAULT_CAP
from .corpus import CORPUS_DIR, CorpusError, CorpusProgram, load_corpus, load_program
from .hybrid import BACKENDS as PREFIX_BACKENDS
from .hybrid import HybridError, HybridPlan, bound_N, plan, run_hybrid
from .lang import ParseError, unroll, validate
from .lang.ast import RETURN
from .report import ReportError, compare, estimate, measure
from .sim import KERNEL, sample
from .synth import SynthError, SynthOptions, synthesize

EXIT_OK, EXIT_USAGE, EXIT_ANALYSIS = 0, 1, 2
ANALYSIS_ERRORS = (CapExceeded, InterpError, SplitError, SynthError, AmplifyError, HybridError,
                   ReportError, ParseError)


class UsageError(Exception):
    pass


class AnalysisFailed(Exception):
    """Analysis ran but produced a failing verdict; ``payload`` is still printed."""

    def __init__(self, payload: dict):
        super().__init__("analysis failed")
        self.payload = payload


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- configuration -----------------------------------------------------------

def _cap(args) -> int:
    if args.cap is not None:
        return args.cap
    env = os.environ.get("QEX_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"QEX_CAP must be an integer, got {env!r}") from None
    return DEFAULT_CAP


def _opt_flags(text: Optional[str]) -> List[str]:
    if not text or text == "none":
        return []
    if text == "all":
        return ["uncompute", "share", "parallel"]
    return [f for f in text.split(",") if f.strip()]


def resolve(path: str) -> Path:
    """An existing path, or else a bundled corpus program with the same stem."""
    p = Path(path)
    if p.exists():
        return p
    hits = sorted(CORPUS_DIR.rglob(f"{p.stem}.wl"))
    if hits:
        return hits[0]
    raise UsageError(f"no such program: {path}")


class Job:
    """One program with the command-line settings layered over its manifest."""

    def __init__(self, cp: CorpusProgram, args):
        self.cp = cp
        self.args = args
        self.program = cp.program
        self.width = args.width if args.width is not None else cp.width
        self.unroll = args.unroll if args.unroll is not None else cp.unroll
        self.domain = InputDomain.load(args.domain) if args.domain else cp.domain
        self.cap = _cap(args)
        try:
            self.opts = SynthOptions.from_flags(_opt_flags(getattr(args, "opt", None)),
                                                width=self.width, unroll=self.unroll)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def vars(self) -> List[str]:
        if getattr(self.args, "var", None):
            return list(self.args.var)
        if self.cp.targets:
            return list(self.cp.targets)
        if self.program.ret is not None:
            return [RETURN]
        raise UsageError("program has no return value; pick variables with --var")

    def synth(self):
        return synthesize(self.program, self.domain, self.opts)

    def oracle(self, targets: Sequence[str], bounded: bool = False, joint: bool = False):
        p = unroll(self.program, self.unroll) if bounded else self.program
        return enumerate_program(p, self.domain, self.width, targets, joint=joint, cap=self.cap)


# -- commands ----------------------------------------------------------------

def cmd_check(job: Job) -> dict:
    backend = job.args.backend
    bad = validate(job.program, backend, job.width)
    out = {"program": job.cp.name, "backend": backend, "width": job.width,
           "violations": [{"kind": v.kind, "line": v.line, "col": v.col, "message": v.message}
                          for v in bad]}
    if bad:
        for v in bad:
            print(f"{job.cp.name}:{v}", file=sys.stderr)
        raise AnalysisFailed(out)
    return out


def cmd_synth(job: Job) -> dict:
    res = job.synth()
    c = res.circuit
    if job.args.qasm:
        Path(job.args.qasm).write_text(to_qasm(c), encoding="utf-8")
    if job.args.out:
        Path(job.args.out).write_text(json.dumps(c.to_json()), encoding="utf-8")
    for d in res.diagnostics:
        print(f"{job.cp.name}: {d}", file=sys.stderr)
    return {"program": job.cp.name, "width": job.width, "unroll": job.unroll,
            "optimizations": list(job.opts.flags), "qubits": c.n_qubits,
            "gates": gate_count(c), "depth": depth(c), **res.sidecar()}


def _quantum(job: Job, targets: Sequence[str]) -> Dict[str, dict]:
    res = job.synth()
    state = res.simulate()
    return {t: res.distribution(state, t) for t in targets}, res, state


def cmd_run(job: Job) -> dict:
    targets = job.vars()
    dists, res, state = _quantum(job, targets)
    out = {"program": job.cp.name, "width": job.width, "qubits": res.n_qubits,
           "support": len(state), "distributions": {t: d.to_json() for t, d in dists.items()}}
    if len(targets) > 1:
        out["joint"] = {"vars": targets, "distribution": res.joint_distribution(state, targets).to_json()}
    if job.args.shots:
        regs = [res.register(t) for t in targets]
        counts = sample(state, regs, job.args.shots, job.args.seed)
        out["samples"] = {"shots": job.args.shots, "seed": job.args.seed,
                          "counts": {",".join(map(str, k)): v for k, v in sorted(counts.items())}}
    return out


def _interval_values(job: Job, t: str) -> set:
    env = interval_analyze(job.program, job.domain, job.width)
    if not env.reachable or env.get(t) is None:
        return set()
    lo, hi = env[t]
    return set(range(lo, hi + 1))


def cmd_analyze(job: Job) -> dict:
    targets = job.vars()
    gt = job.oracle(targets)
    out = {"program": job.cp.name, "width": job.width, "unroll": job.unroll,
           "method": job.args.method, "vars": {}}
    if job.args.method == "qex":
        dists, res, _ = _quantum(job, targets)
        out["qubits"] = res.n_qubits
        for t in targets:
            out["vars"][t] = {"distribution": dists[t].to_json(),
                              "report": compare(dists[t], gt[t]).to_json()}
    else:
        for t in targets:
            vals = _interval_values(job, t)
            out["vars"][t] = {"interval": [min(vals), max(vals)] if vals else None,
                              "report": compare(vals, gt[t]).to_json()}
    return out


def cmd_oracle(job: Job) -> dict:
    targets = job.vars()
    bounded = job.args.unroll is not None
    en = job.oracle(targets, bounded=bounded, joint=len(targets) > 1)

    def dist(vd):
        return {str(v) if not isinstance(v, tuple) else ",".join(map(str, v)):
                {"num": c, "den": vd.total} for v, c in vd.counts.items()}
    out = {"program": job.cp.name, "width": job.width, "inputs": en.total,
           "unroll": job.unroll if bounded else None,
           "distributions": {t: dist(en[t]) for t in targets}}
    if en.joint is not None:
        out["joint"] = {"vars": targets, "distribution": dist(en.joint)}
    return out


def cmd_search(job: Job) -> dict:
    if not job.args.target:
        raise UsageError("search needs --target, e.g. --target 'z == 8'")
    p0 = job.args.p0_bound
    if p0 not in (None, "exact"):
        try:
            p0 = float(p0)
        except ValueError:
            raise UsageError(f"--p0-bound must be a number or 'exact', got {p0!r}") from None
    stats = search(job.program, job.domain, job.opts, job.args.target, job.args.delta,
                   job.args.shots, job.args.seed, p0_bound=p0)
    return {"program": job.cp.name, "target": job.args.target, **stats.to_json()}


def cmd_estimate(job: Job) -> dict:
    n = job.args.n
    # the op tally does not depend on the width, so compile once at the program's width
    res = synthesize(job.program, job.domain, SynthOptions.from_flags(
        job.opts.flags, width=job.cp.width, unroll=job.unroll))
    est = estimate(res.tally, n)
    out = {"program": job.cp.name, **est.to_json(),
           "measured": {"width": job.cp.width, **measure(res.circuit)}}
    return out


def cmd_hybrid(job: Job) -> dict:
    a = job.args
    if a.plan:
        hp = HybridPlan.load(a.plan)
    else:
        split_line = job.cp.split_line if a.split is None else None
        hp = plan(job.program, job.domain, job.width, split_at=a.split, split_line=split_line,
                  backend=a.prefix_backend, cap=job.cap, delta=a.delta, target=a.target)
    var = a.var[0] if a.var else None
    res = run_hybrid(job.program, job.domain, hp, job.opts, var=var, cap=job.cap,
                     shots=a.shots, seed=a.seed)
    out = {"program": job.cp.name, **res.to_json()}
    out["bound_N"] = bound_N(job.program, job.domain, job.width, hp.split).to_json()
    return out


COMMANDS: Dict[str, Callable[[Job], dict]] = {
    "check": cmd_check, "synth": cmd_synth, "run": cmd_run, "analyze": cmd_analyze,
    "search": cmd_search, "estimate": cmd_estimate, "hybrid": cmd_hybrid, "oracle": cmd_oracle,
}


# -- output ------------------------------------------------------------------

def _flatten(obj, prefix: str = ""):
    if isinstance(obj, dict):
        if set(obj) == {"num", "den"}:
            yield prefix, f"{obj['num']}/{obj['den']}"
            return
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, json.dumps(obj) if isinstance(obj, list) else obj


def render(obj, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj, indent=2)
    rows = list(_flatten(obj))
    w = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k:<{w}}  {v}" for k, v in rows)


# -- argument parsing --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qex", description="Quantum state-space exploration of WHILE programs.")
    ap.add_argument("--version", action="version", version=f"qex {__version__} ({KERNEL} kernel)")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("program", help=".wl file, directory of programs, or bundled program name")
    common.add_argument("-n", "--width", type=int, help="value bits per variable (default: manifest or 3)")
    common.add_argument("-k", "--unroll", type=int, help="loop unroll bound (default: manifest or 8)")
    common.add_argument("--domain", metavar="FILE", help="JSON input domains (overrides the sidecar)")
    common.add_argument("--cap", type=int, help="support cap for enumeration (env QEX_CAP)")
    common.add_argument("--format", choices=("json", "table"), default="json")

    synth_opts = _Parser(add_help=False)
    synth_opts.add_argument("--opt", metavar="FLAGS",
                            help="comma list of uncompute,share,parallel (or all, none)")

    sampling = _Parser(add_help=False)
    sampling.add_argument("--seed", type=int, help="RNG seed for sampling")
    variables = _Parser(add_help=False)
    variables.add_argument("--var", action="append", metavar="NAME",
                           help="variable to observe (repeatable; default: manifest targets or return)")

    p = sub.add_parser("check", parents=[common], help="validate a program for a backend")
    p.add_argument("--backend", choices=("quantum", "classical"), default="quantum")

    p = sub.add_parser("synth", parents=[common, synth_opts], help="compile to a circuit")
    p.add_argument("--qasm", metavar="FILE", help="also write OpenQASM 2 to FILE")
    p.add_argument("--out", metavar="FILE", help="also write the circuit JSON to FILE")

    p = sub.add_parser("run", parents=[common, synth_opts, sampling, variables],
                       help="simulate the circuit and decode distributions")
    p.add_argument("--shots", type=int, default=0, help="also draw this many seeded samples")

    p = sub.add_parser("analyze", parents=[common, synth_opts, variables],
                       help="distribution plus over/under-approximation rates against the oracle")
    p.add_argument("--method", choices=("qex", "interval"), default="qex")

    sub.add_parser("oracle", parents=[common, variables],
                   help="exact classical enumeration (bounded when -k is given)")

    p = sub.add_parser("search", parents=[common, synth_opts, sampling],
                       help="fixed-point amplitude amplification for a target condition")
    p.add_argument("--target", metavar="EXPR", help="e.g. 'z == 8' or 'z >= 6 and x <= 2'")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--p0-bound", default=None, metavar="P",
                   help="lower bound on the initial success probability, or 'exact' (default 1/N)")

    p = sub.add_parser("estimate", parents=[common, synth_opts], help="cost-model resource estimate")
    p.set_defaults(n=None)

    p = sub.add_parser("hybrid", parents=[common, synth_opts, sampling, variables],
                       help="classical prefix feeding a quantum suffix")
    p.add_argument("--split", type=int, help="top-level statement index of the split")
    p.add_argument("--prefix-backend", choices=PREFIX_BACKENDS)
    p.add_argument("--plan", metavar="FILE", help="JSON plan file")
    p.add_argument("--target", metavar="EXPR", help="also run a search on the suffix")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--shots", type=int, default=0)
    return ap


def _jobs(args) -> List[CorpusProgram]:
    path = Path(args.program)
    if path.is_dir():
        return load_corpus(path)
    return [load_program(resolve(args.program))]


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if not args.command:
            raise UsageError("missing command")
        if args.command == "estimate":
            # for estimate, -n is the width the model is evaluated at
            args.n = args.width if args.width is not None else 3
            args.width = None
        for name in ("width", "unroll", "cap"):
            v = getattr(args, name, None)
            if v is not None and v < (1 if name != "unroll" else 0):
                raise UsageError(f"--{name} out of range: {v}")
        programs = _jobs(args)
    except UsageError as exc:
        print(f"qex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"qex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusError, ParseError) as exc:
        print(f"qex: error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS

    fn = COMMANDS[args.command]
    results = {}
    status = EXIT_OK
    for cp in programs:
        try:
            results[cp.name] = fn(Job(cp, args))
        except AnalysisFailed as exc:
            results[cp.name] = exc.payload
            status = EXIT_ANALYSIS
        except UsageError as exc:
            print(f"qex: error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except (OSError, json.JSONDecodeError) as exc:
            print(f"qex: error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except ANALYSIS_ERRORS + (ValueError,) as exc:
            print(f"qex: {cp.name}: {exc}", file=sys.stderr)
            results[cp.name] = {"program": cp.name, "error": str(exc)}
            status = EXIT_ANALYSIS
    if len(programs) == 1 and not Path(args.program).is_dir():
        out = next(iter(results.values()))
    else:
        out = {"programs": results}
    print(render(out, args.format))
    return status


if __name__ == "__main__":
    sys.exit(main())
