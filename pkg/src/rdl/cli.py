"""Command-line front end: ``rdl <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import adversarial
from .errors import ParseError, RdlError
from .io import (
    certificate_from_json,
    certificate_to_json,
    dump_json,
    instance_from_json,
    load_json,
    profile_from_json,
    profile_to_json,
    report_to_json,
)
from .market import MarketInstance, opt_benchmark, revenue
from .partition import (
    QualityProfile,
    QuantileProfile,
    full_info_decomposition,
    no_info_decomposition,
    preset,
    quality_decomposition,
    quantile_decomposition,
)
from .robust import optimal_profile, robust_ratio
from .sandwich import sandwich_optimize, sandwich_ratio
from .verify import DEFAULT_SEED, SUITES, run_suites

FORMATS = ("json", "csv", "text")
ENV_FORMAT = "RDL_DEFAULT_FORMAT"


class UsageError(Exception):
    pass


# -- argument helpers ------------------------------------------------------


def _k_values(spec: str) -> list[int]:
    """``5``, ``1-5`` or ``1,3,5``."""
    out: list[int] = []
    try:
        for part in spec.split(","):
            if "-" in part:
                lo, hi = (int(x) for x in part.split("-", 1))
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise UsageError(f"--k: cannot parse {spec!r}") from None
    if not out or min(out) < 1:
        raise UsageError("--k values must be positive integers")
    return out


def _profile_arg(text: str) -> QuantileProfile | QualityProfile:
    """Comma list, inline JSON, or a path to a JSON profile file."""
    text = text.strip()
    if text.startswith(("{", "[")):
        try:
            return profile_from_json(json.loads(text), "--thresholds")
        except json.JSONDecodeError as exc:
            raise ParseError("--thresholds", f"malformed JSON: {exc.msg}") from None
    if Path(text).is_file():
        return profile_from_json(load_json(text), text)
    try:
        values = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise ParseError("--thresholds", f"cannot parse {text!r}") from None
    return QuantileProfile(values)


def _chosen_profile(args) -> QuantileProfile | QualityProfile | None:
    if getattr(args, "thresholds", None):
        return _profile_arg(args.thresholds)
    if getattr(args, "preset", None):
        return preset(args.preset)
    return None


class _Fmt:
    def __init__(self, precision: str | None, default: int):
        if precision in (None, ""):
            self.digits: int | None = default
        elif precision == "full":
            self.digits = None
        else:
            try:
                self.digits = int(precision)
            except ValueError:
                raise UsageError("--precision must be an integer or 'full'") from None
            if self.digits < 0:
                raise UsageError("--precision must be non-negative")

    def __call__(self, x: float) -> str:
        return repr(float(x)) if self.digits is None else f"{x:.{self.digits}f}"


def _csv(header: list[str], rows: list[list[str]]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _profile_rows(entries, fmt: _Fmt) -> str:
    """Table-style CSV: K, Q_1..Q_K, gamma, inverse_gamma."""
    width = max(p.k for p, _ in entries)
    header = ["K", *(f"Q_{i}" for i in range(1, width + 1)), "gamma", "inverse_gamma"]
    rows = []
    for prof, gamma in entries:
        qs = [fmt(q) for q in prof.thresholds[1:]]
        qs += [""] * (width - len(qs))
        rows.append([str(prof.k), *qs, fmt(gamma), fmt(1.0 / gamma)])
    return _csv(header, rows)


def _report_text(prof: QuantileProfile, fmt: _Fmt, gamma_label: str = "ratio") -> str:
    rep = robust_ratio(prof)
    lines = [
        f"K = {prof.k}",
        "thresholds = " + ", ".join(fmt(q) for q in prof.thresholds),
    ]
    lines += [f"  bin {b.r}: term = {fmt(b.term)}" for b in rep.per_bin]
    lines += [f"{gamma_label} = {fmt(rep.ratio)}", f"argmax_bin = {rep.argmax_bin}"]
    return "\n".join(lines) + "\n"


# -- commands --------------------------------------------------------------


def cmd_optimal(args) -> str:
    sols = [optimal_profile(k, args.tol) for k in _k_values(args.k)]
    fmt = _Fmt(args.precision, 4)
    if args.format == "csv":
        return _profile_rows([(s.profile, s.gamma_star) for s in sols], fmt)
    if args.format == "json":
        docs = [report_to_json(robust_ratio(s.profile), s.profile, s.gamma_star) for s in sols]
        return dump_json(docs[0] if len(docs) == 1 else docs)
    parts = []
    for s in sols:
        parts.append(_report_text(s.profile, fmt, "per-bin max"))
        parts.append(f"gamma_star = {fmt(s.gamma_star)}\ninverse_gamma = {fmt(1 / s.gamma_star)}\n")
    return "".join(parts)


def cmd_evaluate(args) -> str:
    prof = _chosen_profile(args)
    if prof is None:
        raise UsageError("evaluate needs --thresholds or --preset")
    if isinstance(prof, QualityProfile):
        raise UsageError("evaluate takes a quantile profile")
    rep = robust_ratio(prof)
    fmt = _Fmt(args.precision, 4)
    if args.format == "csv":
        return _profile_rows([(prof, rep.ratio)], fmt)
    if args.format == "json":
        return dump_json({**report_to_json(rep, prof), "ratio": rep.ratio})
    return _report_text(prof, fmt)


def _certificate(args) -> adversarial.AdversarialCertificate:
    prof = _chosen_profile(args)
    kind = args.construction
    if kind is None:
        if prof is None:
            kind = "single-crossing"
        elif isinstance(prof, QualityProfile):
            kind = "quality"
        elif args.bin is not None:
            kind = "case1"
        elif args.eps is not None:
            kind = "case2"
        else:
            raise UsageError("adversarial needs --bin or --eps with a profile")
    if kind == "single-crossing":
        return adversarial.single_crossing_instance()
    if prof is None:
        raise UsageError(f"construction {kind} needs --thresholds or --preset")
    if kind == "quality":
        if not isinstance(prof, QualityProfile):
            raise UsageError("the quality construction needs a quality profile")
        if args.eps is None:
            raise UsageError("the quality construction needs --eps")
        return adversarial.quality_hard_instance(prof, args.eps)
    if isinstance(prof, QualityProfile):
        raise UsageError(f"construction {kind} needs a quantile profile")
    if kind == "case1":
        if args.bin is None:
            raise UsageError("case1 needs --bin")
        return adversarial.lemma44_case1(prof, args.bin)
    if args.eps is None:
        raise UsageError("case2 needs --eps")
    return adversarial.lemma44_case2(prof, args.eps, args.t)


def cmd_adversarial(args) -> str:
    cert = _certificate(args)
    fmt = _Fmt(args.precision, 6)
    if args.format == "json":
        return dump_json(certificate_to_json(cert))
    if args.format == "csv":
        return _csv(
            ["construction", "target_ratio", "achieved_ratio"],
            [[cert.construction, fmt(cert.target_ratio), fmt(cert.achieved_ratio)]],
        )
    return (
        f"construction = {cert.construction}\n"
        f"target_ratio = {fmt(cert.target_ratio)}\n"
        f"achieved_ratio = {fmt(cert.achieved_ratio)}\n"
    )


def _load_market(path: str) -> tuple[MarketInstance, Any]:
    """An instance file, or a certificate file whose embedded profile is used by default."""
    doc = load_json(path)
    if isinstance(doc, dict) and "construction" in doc:
        cert = certificate_from_json(doc, path)
        return cert.instance, cert.profile
    return instance_from_json(doc, path), None


def cmd_simulate(args) -> str:
    inst, embedded = _load_market(args.instance)
    prof = _chosen_profile(args)
    policy = args.policy
    if prof is None and policy is None:
        if embedded is None:
            raise UsageError("simulate needs --thresholds, --preset or --policy")
        prof = embedded
    if policy == "none":
        label, dec = "no_info", no_info_decomposition(inst.prior)
    elif policy == "full":
        label, dec = "full_info", full_info_decomposition(inst.prior)
    elif isinstance(prof, QualityProfile):
        label, dec = "quality", quality_decomposition(inst.prior, prof)
    else:
        label, dec = "quantile", quantile_decomposition(inst.prior, prof)
    rev = revenue(inst, dec)
    opt = opt_benchmark(inst)
    ratio = opt / rev if rev > 0.0 else (1.0 if opt == 0.0 else float("inf"))
    rev_key = f"rev_{label}"
    if args.format == "json":
        return dump_json({rev_key: rev, "opt": opt, "ratio": ratio})
    fmt_rev = _Fmt(args.precision, 6)
    fmt_ratio = _Fmt(args.precision, 4)
    if args.format == "csv":
        return _csv([rev_key, "opt", "ratio"], [[fmt_rev(rev), fmt_rev(opt), fmt_ratio(ratio)]])
    return f"{rev_key} = {fmt_rev(rev)}\nopt = {fmt_rev(opt)}\nratio = {fmt_ratio(ratio)}\n"


def cmd_sandwich(args) -> str:
    prof = _chosen_profile(args)
    fmt = _Fmt(args.precision, 4)
    if prof is not None:
        if isinstance(prof, QualityProfile):
            raise UsageError("sandwich takes a quantile profile")
        entries = [(prof, sandwich_ratio(prof, args.grid_c))]
    else:
        if args.k is None:
            raise UsageError("sandwich needs --k or a profile")
        entries = [
            tuple(sandwich_optimize(k, args.grid_thresholds, args.grid_c))
            for k in _k_values(args.k)
        ]
    if args.format == "csv":
        return _profile_rows(entries, fmt)
    if args.format == "json":
        docs = [{**profile_to_json(p), "ratio": g} for p, g in entries]
        return dump_json(docs[0] if len(docs) == 1 else docs)
    return "".join(
        f"K = {p.k}\nthresholds = {', '.join(fmt(q) for q in p.thresholds)}\nratio = {fmt(g)}\n"
        for p, g in entries
    )


def cmd_verify(args) -> tuple[str, int]:
    checks = run_suites(args.suites, args.seed)
    status = 0 if all(c.passed for c in checks) else 1
    if args.format == "json":
        return dump_json([c._asdict() for c in checks]), status
    if args.format == "csv":
        rows = [[str(c.criterion), c.name, "pass" if c.passed else "FAIL", c.expected, c.actual, c.tolerance] for c in checks]
        return _csv(["criterion", "name", "result", "expected", "actual", "tolerance"], rows), status
    lines = [
        f"[{'pass' if c.passed else 'FAIL'}] {c.criterion:>2} {c.name}: "
        f"expected {c.expected}; actual {c.actual}; tol {c.tolerance}"
        for c in checks
    ]
    passed = sum(c.passed for c in checks)
    lines.append(f"{passed}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n", status


# -- parser ----------------------------------------------------------------


def build_parser(default_format: str = "text") -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdl", description="Robust quantile-partition disclosure toolkit.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=default_format)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--precision", help="decimal places for csv/text, or 'full'")

    def profile_flags(p, policy: bool = False):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--thresholds", help="comma list, JSON profile, or JSON file")
        group.add_argument("--preset", help="upwork, airbnb or uniform:K")
        if policy:
            group.add_argument("--policy", choices=("none", "full"))

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimal", parents=[common], help="optimal thresholds for K bins")
    p.add_argument("--k", required=True, help="K, a range like 1-5, or a list")
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(run=cmd_optimal)

    p = sub.add_parser("evaluate", parents=[common], help="robust ratio of a profile")
    profile_flags(p)
    p.set_defaults(run=cmd_evaluate)

    p = sub.add_parser("adversarial", parents=[common], help="build a worst-case certificate")
    profile_flags(p)
    p.add_argument("--construction", choices=("case1", "case2", "quality", "single-crossing"))
    p.add_argument("--bin", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--t", type=float, default=0.5)
    p.set_defaults(run=cmd_adversarial)

    p = sub.add_parser("simulate", parents=[common], help="revenue of a policy on an instance")
    p.add_argument("--instance", required=True, help="instance or certificate JSON file")
    profile_flags(p, policy=True)
    p.set_defaults(run=cmd_simulate)

    p = sub.add_parser("sandwich", parents=[common], help="sandwich-class ratio and grid search")
    p.add_argument("--k", help="K, a range like 1-5, or a list")
    profile_flags(p)
    p.add_argument("--grid-thresholds", type=float, default=0.005)
    p.add_argument("--grid-c", type=float, default=0.001)
    p.set_defaults(run=cmd_sandwich)

    p = sub.add_parser("verify", parents=[common], help="run acceptance suites")
    p.add_argument("suites", nargs="*", help=f"any of: {', '.join(SUITES)} (default all)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(run=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    default_format = os.environ.get(ENV_FORMAT, "text")
    if default_format not in FORMATS:
        print(f"error: {ENV_FORMAT} must be one of {', '.join(FORMATS)}", file=sys.stderr)
        return 2
    parser = build_parser(default_format)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.run(args)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except RdlError as exc:
        print(f"error: {exc.name}: {exc}", file=sys.stderr)
        return 1
    text, status = result if isinstance(result, tuple) else (result, 0)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
