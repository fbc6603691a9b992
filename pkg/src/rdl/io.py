"""JSON (de)serialization for distributions, profiles, instances and certificates."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from .adversarial import CONSTRUCTIONS, AdversarialCertificate
from .dist import MASS_TOL, AtomicDistribution, discretize, make_distribution
from .errors import ParseError
from .market import (
    NAMED_KINDS,
    AffineValuation,
    MarketInstance,
    NamedValuation,
    TabularValuation,
    Valuation,
)
from .partition import QualityProfile, QuantileProfile, preset
from .robust import RatioReport

CONTINUOUS_ATOMS = 10_000


def load_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(str(path), f"cannot read file: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(str(path), f"malformed JSON: {exc.msg} at line {exc.lineno}") from None


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _get(obj: Any, key: str, path: str) -> Any:
    if not isinstance(obj, dict):
        raise ParseError(path, "expected an object")
    if key not in obj:
        raise ParseError(f"{path}.{key}", "missing field")
    return obj[key]


def _number(x: Any, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(path, f"expected a number, got {type(x).__name__}")
    return float(x)


def _numbers(xs: Any, path: str) -> list[float]:
    if not isinstance(xs, list):
        raise ParseError(path, "expected a list of numbers")
    return [_number(x, f"{path}[{i}]") for i, x in enumerate(xs)]


# -- distributions ---------------------------------------------------------


def dist_to_json(d: AtomicDistribution) -> dict:
    return {"atoms": [{"value": v, "mass": m} for v, m in d]}


def dist_from_json(obj: Any, path: str = "distribution") -> AtomicDistribution:
    if isinstance(obj, dict) and "family" in obj:
        return _continuous(obj, path)
    atoms = _get(obj, "atoms", path)
    if not isinstance(atoms, list):
        raise ParseError(f"{path}.atoms", "expected a list")
    pairs = [
        (
            _number(_get(a, "value", f"{path}.atoms[{i}]"), f"{path}.atoms[{i}].value"),
            _number(_get(a, "mass", f"{path}.atoms[{i}]"), f"{path}.atoms[{i}].mass"),
        )
        for i, a in enumerate(atoms)
    ]
    values = [v for v, _ in pairs]
    masses = [m for _, m in pairs]
    canonical = (
        all(x < y for x, y in zip(values, values[1:]))
        and all(0.0 <= v <= 1.0 for v in values)
        and all(m > 0.0 for m in masses)
        and abs(math.fsum(masses) - 1.0) <= MASS_TOL
    )
    if canonical:  # keep emitted masses bit-for-bit
        return AtomicDistribution(tuple(values), tuple(masses))
    return make_distribution(pairs)


def _continuous(obj: dict, path: str) -> AtomicDistribution:
    family = obj["family"]
    n = int(_number(obj.get("n", CONTINUOUS_ATOMS), f"{path}.n"))
    if family == "uniform":
        return discretize(lambda u: u, n)
    if family == "beta":
        from scipy.stats import beta

        a = _number(_get(obj, "a", path), f"{path}.a")
        b = _number(_get(obj, "b", path), f"{path}.b")
        if a <= 0.0 or b <= 0.0:
            raise ParseError(path, "beta parameters must be positive")
        return discretize(lambda u: float(beta.ppf(u, a, b)), n)
    raise ParseError(f"{path}.family", f"unknown family {family!r}")


# -- profiles --------------------------------------------------------------


def profile_to_json(p: QuantileProfile | QualityProfile) -> dict:
    if isinstance(p, QualityProfile):
        return {"qualities": list(p.thresholds), "splits": list(p.splits)}
    return {"quantiles": list(p.thresholds)}


def profile_from_json(obj: Any, path: str = "profile") -> QuantileProfile | QualityProfile:
    if isinstance(obj, str):
        return preset(obj)
    if isinstance(obj, list):
        return QuantileProfile(tuple(_numbers(obj, path)))
    if isinstance(obj, dict) and "quantiles" in obj:
        return QuantileProfile(tuple(_numbers(obj["quantiles"], f"{path}.quantiles")))
    if isinstance(obj, dict) and "qualities" in obj:
        qs = _numbers(obj["qualities"], f"{path}.qualities")
        xi = _numbers(_get(obj, "splits", path), f"{path}.splits")
        return QualityProfile(tuple(qs), tuple(xi))
    raise ParseError(path, "expected 'quantiles', 'qualities' or a preset name")


# -- valuations and instances ----------------------------------------------


def valuation_to_json(v: Valuation) -> Any:
    if isinstance(v, NamedValuation):
        return v.kind
    if isinstance(v, AffineValuation):
        return {"affine": {"types": list(v.types), "a": list(v.a), "b": list(v.b)}}
    return {
        "tabular": {
            "types": list(v.types),
            "qualities": list(v.qualities),
            "values": [list(row) for row in v.values],
        }
    }


def valuation_from_json(obj: Any, path: str = "valuation") -> Valuation:
    if isinstance(obj, dict) and "kind" in obj:
        obj, path = obj["kind"], f"{path}.kind"
    if isinstance(obj, str):
        if obj not in NAMED_KINDS:
            raise ParseError(path, f"unknown valuation kind {obj!r}")
        return NamedValuation(obj)
    if isinstance(obj, dict) and "affine" in obj:
        body, p = obj["affine"], f"{path}.affine"
        return AffineValuation(
            tuple(_numbers(_get(body, "types", p), f"{p}.types")),
            tuple(_numbers(_get(body, "a", p), f"{p}.a")),
            tuple(_numbers(_get(body, "b", p), f"{p}.b")),
        )
    if isinstance(obj, dict) and "tabular" in obj:
        body, p = obj["tabular"], f"{path}.tabular"
        rows = _get(body, "values", p)
        if not isinstance(rows, list):
            raise ParseError(f"{p}.values", "expected a list of rows")
        return TabularValuation(
            tuple(_numbers(_get(body, "types", p), f"{p}.types")),
            tuple(_numbers(_get(body, "qualities", p), f"{p}.qualities")),
            tuple(tuple(_numbers(r, f"{p}.values[{i}]")) for i, r in enumerate(rows)),
        )
    raise ParseError(path, "expected a kind name, 'affine' or 'tabular'")


def instance_to_json(inst: MarketInstance) -> dict:
    return {
        "valuation": {"kind": valuation_to_json(inst.valuation)},
        "types": dist_to_json(inst.types),
        "prior": dist_to_json(inst.prior),
    }


def instance_from_json(obj: Any, path: str = "instance") -> MarketInstance:
    return MarketInstance(
        valuation_from_json(_get(obj, "valuation", path), f"{path}.valuation"),
        dist_from_json(_get(obj, "types", path), f"{path}.types"),
        dist_from_json(_get(obj, "prior", path), f"{path}.prior"),
    )


def parse_instance(path: str | Path) -> MarketInstance:
    return instance_from_json(load_json(path), str(path))


# -- certificates and reports ----------------------------------------------


def certificate_to_json(cert: AdversarialCertificate) -> dict:
    return {
        "construction": cert.construction,
        "instance": instance_to_json(cert.instance),
        "target_ratio": cert.target_ratio,
        "achieved_ratio": cert.achieved_ratio,
        "profile": profile_to_json(cert.profile),
        "params": dict(cert.params),
    }


def certificate_from_json(obj: Any, path: str = "certificate") -> AdversarialCertificate:
    tag = _get(obj, "construction", path)
    if tag not in CONSTRUCTIONS:
        raise ParseError(f"{path}.construction", f"unknown construction {tag!r}")
    params = obj.get("params", {})
    if not isinstance(params, dict):
        raise ParseError(f"{path}.params", "expected an object")
    return AdversarialCertificate(
        tag,
        instance_from_json(_get(obj, "instance", path), f"{path}.instance"),
        profile_from_json(_get(obj, "profile", path), f"{path}.profile"),
        _number(_get(obj, "target_ratio", path), f"{path}.target_ratio"),
        _number(_get(obj, "achieved_ratio", path), f"{path}.achieved_ratio"),
        params,
    )


def report_to_json(
    report: RatioReport, profile: QuantileProfile, gamma_star: float | None = None
) -> dict:
    return {
        "gamma_star": report.ratio if gamma_star is None else gamma_star,
        "thresholds": list(profile.thresholds),
        "per_bin": [{"r": b.r, "term": b.term} for b in report.per_bin],
        "argmax_bin": report.argmax_bin,
    }
