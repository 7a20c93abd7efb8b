"""Command-line front end.

    urm verify-mub --d 7 --json
    urm verify-mes --d 5
    urm run --d 3 --family a --seed 42
    urm sweep --d 5 --family b
    urm cross-validate --d 5

Exit codes: 0 all checks pass, 1 checks ran and failed, 2 invalid invocation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import collective, mub, oracle, protocol
from .collective import MesFamily, MesLabel
from .qstate import make_rng, partial_trace
from .zmod import InvalidModulusError, PrimeModulus

DEFAULT_TOLERANCE = 1e-9
TOLERANCE_ENV = "URM_TOLERANCE"

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    d: int
    command: str
    family: str | None = None
    b: str | None = None
    m: int | None = None
    seed: int | None = None
    trials: int | None = None
    prepared: str | None = None
    tolerance: float = DEFAULT_TOLERANCE
    output: str = "text"
    out: str | None = None


@dataclass
class Report:
    command: str
    d: int
    params: dict
    counts: dict
    max_residual: float
    elapsed_ms: float
    passed: bool
    details: dict = field(default_factory=dict)
    lines: list[str] = field(default_factory=list)

    def as_json(self) -> dict:
        return {
            "command": self.command,
            "d": self.d,
            "params": self.params,
            "counts": self.counts,
            "max_residual": self.max_residual,
            "elapsed_ms": self.elapsed_ms,
            "pass": self.passed,
            "details": self.details,
        }


def _params(cfg: RunConfig) -> dict:
    keys = ("family", "b", "m", "seed", "trials", "prepared", "tolerance")
    return {k: getattr(cfg, k) for k in keys if getattr(cfg, k) is not None}


# ---------------------------------------------------------------------------
# commands


def cmd_verify_mub(cfg: RunConfig) -> Report:
    t0 = time.perf_counter()
    rep = mub.unbiasedness_report(cfg.d)
    elapsed = (time.perf_counter() - t0) * 1e3
    passed = rep.max_residual < cfg.tolerance
    details = {
        "max_deviation": rep.max_deviation,
        "max_orthonormality_residual": rep.max_orthonormality_residual,
        "max_spectral_residual": rep.max_spectral_residual,
    }
    lines = [
        f"mutually unbiased bases, d={cfg.d} ({cfg.d + 1} bases)",
        f"  basis pairs examined      {rep.basis_pairs}",
        f"  vector pairs examined     {rep.vector_pairs}",
        f"  max | |<u|v>|^2 - 1/d |   {rep.max_deviation:.3e}",
        f"  max orthonormality defect {rep.max_orthonormality_residual:.3e}",
        f"  max K_b eigen residual    {rep.max_spectral_residual:.3e}",
    ]
    return Report("verify-mub", cfg.d, _params(cfg),
                  {"basis_pairs": rep.basis_pairs, "vector_pairs": rep.vector_pairs},
                  rep.max_residual, elapsed, passed, details, lines)


def mes_checks(d: int) -> dict:
    """Orthonormality, maximal entanglement, eigen-operator and cross-family checks."""
    ops = collective.collective_ops(d)
    eye = np.eye(d) / d
    out: dict = {}
    mats = {}
    for family in MesFamily:
        labels, B = collective.gamma_matrix(d, family)
        mats[family] = B
        ortho = float(np.abs(B.conj() @ B.T - np.eye(d * d)).max())
        ptrace = 0.0
        eig = 0.0
        # A: eigenvector of Zc (omega^mdd) and Xr (omega^2m0); B: Zr and Xc
        diag_op, shift_op = (ops.zc, ops.xr) if family is MesFamily.A else (ops.zr, ops.xc)
        for lab, s in zip(labels, B):
            for side in (1, 2):
                ptrace = max(ptrace, float(np.abs(partial_trace(s, side) - eye).max()))
            w1 = np.exp(2j * np.pi * lab.mdd.value / d)
            w2 = np.exp(2j * np.pi * (2 * lab.m0.value % d) / d)
            eig = max(eig, float(np.abs(diag_op @ s - w1 * s).max()),
                      float(np.abs(shift_op @ s - w2 * s).max()))
        out[family.value] = {
            "states": len(labels),
            "orthonormality_residual": ortho,
            "partial_trace_residual": ptrace,
            "eigen_residual": eig,
        }
    cross = np.abs(mats[MesFamily.A].conj() @ mats[MesFamily.B].T) ** 2
    out["cross"] = {
        "pairs": int(cross.size),
        "mean_squared_overlap": float(cross.mean()),
        "expected": 1.0 / d ** 2,
        "max_deviation": float(np.abs(cross - 1.0 / d ** 2).max()),
    }
    return out


def cmd_verify_mes(cfg: RunConfig) -> Report:
    t0 = time.perf_counter()
    checks = mes_checks(cfg.d)
    elapsed = (time.perf_counter() - t0) * 1e3
    resid = max(
        checks["cross"]["max_deviation"],
        *(checks[f][k] for f in ("a", "b")
          for k in ("orthonormality_residual", "partial_trace_residual", "eigen_residual")),
    )
    lines = [f"maximally entangled bases, d={cfg.d}"]
    for f in ("a", "b"):
        c = checks[f]
        lines.append(f"  family {f.upper()}: {c['states']} states  orthonormality {c['orthonormality_residual']:.3e}"
                     f"  partial trace {c['partial_trace_residual']:.3e}  eigen {c['eigen_residual']:.3e}")
    x = checks["cross"]
    lines.append(f"  cross overlaps: {x['pairs']} pairs  mean |<u|v>|^2 {x['mean_squared_overlap']:.6f}"
                 f"  (1/d^2 = {x['expected']:.6f})  max deviation {x['max_deviation']:.3e}")
    counts = {"states_a": checks["a"]["states"], "states_b": checks["b"]["states"],
              "cross_pairs": x["pairs"]}
    return Report("verify-mes", cfg.d, _params(cfg), counts, resid, elapsed,
                  resid < cfg.tolerance, checks, lines)


def _parse_prepared(d: int, text: str | None, rng: np.random.Generator) -> tuple[int, int]:
    if text is None:
        return int(rng.integers(d)), int(rng.integers(d))
    try:
        mdd, m0 = (int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"--prepared expects 'mdd,m0', got {text!r}")
    return mdd, m0


def cmd_run(cfg: RunConfig) -> Report:
    if cfg.seed is None:
        raise UsageError("run needs --seed")
    trials = 1 if cfg.trials is None else cfg.trials
    if trials < 1:
        raise UsageError("--trials must be >= 1")
    if cfg.m is not None and cfg.b is None:
        raise UsageError("--m needs --b")
    p = PrimeModulus(cfg.d)
    family = MesFamily.parse(cfg.family or "a")
    basis = None if cfg.b is None else _parse_basis(p, cfg.b)
    rng = make_rng(cfg.seed)
    t0 = time.perf_counter()
    counts = {"trials": 0, "correct": 0, "undetermined": 0, "wrong": 0, "not_applicable": 0}
    lines = [f"urm run d={p.d} family={family.value} seed={cfg.seed} trials={trials}"]
    episodes = []
    for k in range(trials):
        mdd, m0 = _parse_prepared(p.d, cfg.prepared, rng)
        # protocol A controls in the prepared family; protocol B in the conjugate one
        prepared = MesLabel.of(p, MesFamily.A, mdd, m0)
        if cfg.m is not None:
            hidden = protocol.UrmRecord(basis, p(cfg.m))
            state, record = protocol.run_urm(p, prepared, hidden)
        else:
            state, record = protocol.run_urm(p, prepared, rng, basis=basis)
        outcome = protocol.control_measure(state, family, rng)
        if family is MesFamily.A:
            verdict = protocol.infer_basis(prepared, outcome)
            inference = str(verdict)
            if isinstance(verdict, protocol.Undetermined):
                status = "undetermined"
            else:
                status = "correct" if protocol.is_correct(verdict, record.basis) else "wrong"
        elif isinstance(record.basis, mub.Computational):
            inference, status = "no outcome rule for the computational basis", "not_applicable"
        else:
            m = protocol.infer_outcome(prepared, outcome, record.basis)
            inference = f"m={m.value} given b={record.basis}"
            status = "correct" if m == record.m else "wrong"
        counts["trials"] += 1
        counts[status] += 1
        lines.append(f"episode {k + 1}: prepared {prepared} | hidden {record} | control {outcome}"
                     f" | inference: {inference} | {status}")
        episodes.append({"prepared": [mdd, m0], "hidden_b": str(record.basis),
                         "hidden_m": record.m.value, "control": list(outcome.key),
                         "inference": inference, "status": status})
    elapsed = (time.perf_counter() - t0) * 1e3
    lines.append("summary: " + " ".join(f"{k}={v}" for k, v in counts.items()))
    details = {"episodes": episodes} if trials <= 1000 else {}
    return Report("run", p.d, _params(cfg), counts, 0.0, elapsed, counts["wrong"] == 0,
                  details, lines)


def _sweep_lines(rep: protocol.SweepReport) -> list[str]:
    lines = [f"protocol {rep.protocol.upper()} sweep, d={rep.d}"]
    lines += [f"  {k:<36}{v}" for k, v in rep.counts().items()]
    for k, v in rep.extras.items():
        if isinstance(v, list):
            v = "[" + ", ".join(f"{x:.4f}" for x in v) + "]"
        lines.append(f"  {k:<36}{v}")
    lines.append(f"  {'max_residual':<36}{rep.max_residual:.3e}")
    return lines


def cmd_sweep(cfg: RunConfig) -> Report:
    families = [MesFamily.parse(cfg.family)] if cfg.family else list(MesFamily)
    t0 = time.perf_counter()
    reps = [protocol.sweep(cfg.d, f) for f in families]
    elapsed = (time.perf_counter() - t0) * 1e3
    counts: dict = {}
    for rep in reps:
        for k, v in rep.counts().items():
            counts[k] = counts.get(k, 0) + v
    resid = max(r.max_residual for r in reps)
    passed = all(r.passed for r in reps) and resid < cfg.tolerance
    details = {r.protocol: {"counts": r.counts(), **r.extras} for r in reps}
    lines = [line for r in reps for line in _sweep_lines(r)]
    return Report("sweep", cfg.d, _params(cfg), counts, resid, elapsed, passed, details, lines)


def cmd_cross_validate(cfg: RunConfig) -> Report:
    rep = oracle.cross_validate(cfg.d)
    passed = rep.passed and rep.max_residual < cfg.tolerance
    lines = [f"oracle cross-validation, d={cfg.d}"]
    lines += [f"  {k:<24}{v}" for k, v in rep.counts().items()]
    lines.append(f"  max residual            {rep.max_residual:.3e}")
    for mm in rep.mismatches[:10]:
        lines.append(f"  mismatch: {mm}")
    return Report("cross-validate", cfg.d, _params(cfg), rep.counts(), rep.max_residual,
                  rep.elapsed_ms, passed, {"mismatches": rep.mismatches}, lines)


COMMANDS = {
    "verify-mub": cmd_verify_mub,
    "verify-mes": cmd_verify_mes,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "cross-validate": cmd_cross_validate,
}


# ---------------------------------------------------------------------------
# plumbing


def _parse_basis(p: PrimeModulus, text: str) -> mub.BasisLabel:
    try:
        label = mub.parse_basis_label(p, text)
    except ValueError:
        raise UsageError(f"--b expects an integer in [0, {p.d - 1}] or 'comp', got {text!r}")
    if isinstance(label, mub.Shifted) and not 0 <= int(text) < p.d:
        raise UsageError(f"--b must lie in [0, {p.d - 1}]")
    return label


def _default_tolerance() -> float:
    raw = os.environ.get(TOLERANCE_ENV)
    if raw is None:
        return DEFAULT_TOLERANCE
    try:
        return float(raw)
    except ValueError:
        return DEFAULT_TOLERANCE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="urm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--d", type=int, required=True, help="odd prime dimension")
        sp.add_argument("--tolerance", type=float, default=None)
        fmt = sp.add_mutually_exclusive_group()
        fmt.add_argument("--json", dest="output", action="store_const", const="json")
        fmt.add_argument("--csv", dest="output", action="store_const", const="csv")
        sp.add_argument("--out", help="also write the report to this path")
        if name in ("run", "sweep"):
            sp.add_argument("--family", choices=["a", "b"], type=str.lower)
        if name == "run":
            sp.add_argument("--b", help="Bob's basis: integer or 'comp' (default: random)")
            sp.add_argument("--m", type=int, help="Bob's outcome (enumeration mode; needs --b)")
            sp.add_argument("--seed", type=int)
            sp.add_argument("--trials", type=int)
            sp.add_argument("--prepared", help="prepared label 'mdd,m0' (default: random)")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    try:
        PrimeModulus(args.d)
    except InvalidModulusError:
        raise UsageError(f"d must be an odd prime (got {args.d})")
    tol = args.tolerance if args.tolerance is not None else _default_tolerance()
    if not tol > 0:
        raise UsageError("--tolerance must be positive")
    return RunConfig(
        d=args.d,
        command=args.command,
        family=getattr(args, "family", None),
        b=getattr(args, "b", None),
        m=getattr(args, "m", None),
        seed=getattr(args, "seed", None),
        trials=getattr(args, "trials", None),
        prepared=getattr(args, "prepared", None),
        tolerance=tol,
        output=args.output or "text",
        out=args.out,
    )


def render(report: Report, output: str) -> str:
    if output == "json":
        return json.dumps(report.as_json(), indent=2, sort_keys=False) + "\n"
    if output == "csv":
        buf = io.StringIO()
        row = {"command": report.command, "d": report.d, "pass": report.passed,
               "max_residual": report.max_residual, "elapsed_ms": report.elapsed_ms,
               **report.counts}
        writer = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
        writer.writeheader()
        writer.writerow(row)
        return buf.getvalue()
    return "\n".join(report.lines + [f"result: {'PASS' if report.passed else 'FAIL'}"]) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        cfg = config_from_args(args)
        report = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"urm {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(report, cfg.output)
    sys.stdout.write(text)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
