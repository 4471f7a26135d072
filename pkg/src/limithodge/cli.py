"""Batch front door: JSON data in, deterministic reports out.

Every subcommand reads monodromy data or an experiment config, dispatches
to the corresponding library module, and prints a report on standard
output — JSON by default, a flat key/value table with ``--format table``.
Reports are byte-identical for identical inputs.  Exact quantities are
serialized as string rationals; floating-point numbers appear only in the
``dbar-*`` reports and are rounded to 15 significant digits.

Exit codes: 0 success, 2 invalid input, 3 precondition violated (e.g.
non-commuting logarithms), 4 excluded exponent, 5 internal invariant
failure.  Errors are emitted as one JSON object on standard error.

Input files with monodromy data follow one schema::

    {"dimension": 2, "weight": 1,
     "N1": [[...]], "N2": [[...]],          # string rationals or {"re","im"}
     "F": {...},                             # optional Hodge filtration
     "S": [[...]],                           # optional polarization
     "model": {"kind": "S", "m": 1, "n": 0}, # optional bigraded model spec
     "vectors": [[...], ...],                # optional section list
     "hodge_numbers": [...], "labels": [...]}

A bare name is looked up in the directory named by LIMITHODGE_CORPUS and
then among the built-in corpus labels (``trivial``, ``jordan2-t1``, ...).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from . import dbar as dbarmod
from .exactla import ExactMatrix, Filtration
from .growth import D_EPS, D_EPS_PRIME, hodge_norm_class, section_from_datum, theta_apply_class
from .hodgestruct import (
    MixedHodge,
    NotAHodgeFiltration,
    NotPolarized,
    mhs_check,
    polarized_mhs_check,
    r_split_check,
)
from .l2complex import (
    HODGE_BUNDLE,
    LOCAL_SYSTEM,
    AnticommutationFailure,
    IllFormedComplex,
    MonodromyDatum,
    build_stalk_complex,
    classify_l2,
    hypercohomology,
    standard_corpus,
    theta_image_check,
    truncated_global_model,
)
from .serialize import filtration_from_json, matrix_from_json, vector_from_json, vector_to_json
from .sl2rep import (
    DecompositionError,
    Model,
    NoSolution,
    NotHorizontal,
    NotIsometric,
    WrongKind,
    alpha_basis,
    build_model,
    direct_sum_models,
    isotypic_decomposition,
    transport_model,
)
from .weightfilt import (
    AxiomFailure,
    NonCommuting,
    NonPositiveCoefficient,
    NotNilpotent,
    commuting_check,
    cone_independence_report,
    monodromy_weight_filtration,
)

EXIT_INVALID_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_EXCLUDED_EXPONENT = 4
EXIT_INTERNAL = 5

_REGION_FLAGS = ("d-eps", "d-eps-prime", "global")
_REGION_OF_FLAG = {"d-eps": D_EPS, "d-eps-prime": D_EPS_PRIME}


class CliError(Exception):
    """An error with a fixed exit code and a structured message."""

    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code = code
        self.kind = kind


# ----------------------------------------------------------------------
# input resolution


@dataclass
class LoadedDatum:
    """A datum file (or built-in corpus entry) after validation."""

    name: str
    digest: str
    dimension: int
    weight: int
    n1: ExactMatrix
    n2: ExactMatrix
    hodge: Filtration | None = None
    polarization: ExactMatrix | None = None
    model: Model | None = None
    vectors: list[tuple] | None = None
    labels: list[str] | None = None

    def as_monodromy(self) -> MonodromyDatum:
        return MonodromyDatum(
            weight=self.weight,
            n1=self.n1,
            n2=self.n2,
            hodge=self.hodge,
            polarization=self.polarization,
            model=self.model,
            label=self.name,
        )


def _corpus_entry(name: str) -> MonodromyDatum | None:
    for datum in standard_corpus():
        if datum.label == name:
            return datum
    return None


def _read_payload(arg: str) -> tuple[dict | None, str, MonodromyDatum | None]:
    """Resolve a positional datum argument to (payload, digest, builtin)."""
    path = arg
    if not os.path.exists(path) and os.sep not in arg:
        base = os.environ.get("LIMITHODGE_CORPUS")
        if base:
            for cand in (os.path.join(base, arg), os.path.join(base, arg + ".json")):
                if os.path.exists(cand):
                    path = cand
                    break
    if os.path.exists(path):
        with open(path, "rb") as fh:
            raw = fh.read()
        digest = hashlib.sha256(raw).hexdigest()[:16]
        try:
            payload = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CliError(EXIT_INVALID_INPUT, "invalid-input", f"{arg}: {exc}") from exc
        if not isinstance(payload, dict):
            raise CliError(EXIT_INVALID_INPUT, "invalid-input",
                           f"{arg}: top-level JSON value must be an object")
        return payload, digest, None
    builtin = _corpus_entry(arg)
    if builtin is not None:
        digest = hashlib.sha256(f"corpus:{arg}".encode()).hexdigest()[:16]
        return None, digest, builtin
    raise CliError(EXIT_INVALID_INPUT, "invalid-input",
                   f"no such file or corpus entry: {arg}")


def _model_from_spec(spec: Any) -> Model:
    """Assemble a model from its JSON description.

    {"kind": "S"|"H"|"E", "m":, "n":, "l":, "p":, "q":} for one factor,
    {"sum": [spec, ...]} for a direct sum; an optional "transport" matrix
    conjugates the result out of the split basis.
    """
    if not isinstance(spec, dict):
        raise CliError(EXIT_INVALID_INPUT, "invalid-input", "model spec must be an object")
    try:
        if "sum" in spec:
            model = direct_sum_models([_model_from_spec(s) for s in spec["sum"]])
        else:
            model = build_model(
                spec.get("kind", "S"),
                m=int(spec.get("m", 0)),
                n=int(spec.get("n", 0)),
                l=int(spec.get("l", 0)),
                p=int(spec.get("p", 0)),
                q=int(spec.get("q", 0)),
            )
        if "transport" in spec:
            model = transport_model(model, matrix_from_json(spec["transport"]))
    except CliError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(EXIT_INVALID_INPUT, "invalid-input", f"bad model spec: {exc}") from exc
    return model


def _load_datum(arg: str) -> LoadedDatum:
    payload, digest, builtin = _read_payload(arg)
    if builtin is not None:
        return LoadedDatum(
            name=builtin.label,
            digest=digest,
            dimension=builtin.dimension,
            weight=builtin.weight,
            n1=builtin.n1,
            n2=builtin.n2,
            hodge=builtin.hodge,
            polarization=builtin.polarization,
            model=builtin.model,
            labels=list(builtin.model.labels) if builtin.model else None,
        )
    assert payload is not None
    model = _model_from_spec(payload["model"]) if "model" in payload else None
    try:
        if model is not None and ("N1" not in payload or "N2" not in payload):
            n1, n2 = model.action.nminus
            dim = model.dim
            weight = int(payload.get("weight", model.weight))
        else:
            dim = int(payload["dimension"])
            weight = int(payload.get("weight", 0))
            n1 = matrix_from_json(payload["N1"])
            n2 = matrix_from_json(payload["N2"])
        hodge = filtration_from_json(payload["F"]) if "F" in payload else None
        pol = matrix_from_json(payload["S"]) if "S" in payload else None
        vectors = ([vector_from_json(v) for v in payload["vectors"]]
                   if "vectors" in payload else None)
        labels = list(payload["labels"]) if "labels" in payload else None
    except CliError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(EXIT_INVALID_INPUT, "invalid-input", f"{arg}: {exc}") from exc
    for label, mat in (("N1", n1), ("N2", n2)):
        if mat.rows != dim or mat.cols != dim:
            raise CliError(EXIT_INVALID_INPUT, "invalid-input",
                           f"{arg}: {label} is not square of dimension {dim}")
    commuting_check([n1, n2])
    return LoadedDatum(
        name=arg,
        digest=digest,
        dimension=dim,
        weight=weight,
        n1=n1,
        n2=n2,
        hodge=hodge,
        polarization=pol,
        model=model,
        vectors=vectors,
        labels=labels,
    )


def _param_digest(**params: Any) -> str:
    blob = json.dumps(params, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


# ----------------------------------------------------------------------
# report assembly and rendering


def _report(command: str, digest: str, results: dict, warns: list[str] | None = None) -> dict:
    return {
        "command": command,
        "inputs": {"digest": digest},
        "results": results,
        "warnings": warns or [],
    }


def _round_floats(value: Any) -> Any:
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return None
        return float(f"{value:.15g}")
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_floats(v) for v in value]
    return value


def _scalar_str(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def _flatten_for_table(prefix: str, value: Any, rows: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        if set(value) == {"re", "im"}:
            re, im = str(value["re"]), str(value["im"])
            joined = re if im in ("0", "0/1") else f"{re}{'+' if not im.startswith('-') else ''}{im}i"
            rows.append((prefix, joined))
            return
        for key in sorted(value, key=str):
            sub = f"{prefix}.{key}" if prefix else str(key)
            _flatten_for_table(sub, value[key], rows)
        return
    if isinstance(value, list):
        if value and all(isinstance(v, (dict, list)) for v in value):
            for i, v in enumerate(value):
                _flatten_for_table(f"{prefix}[{i}]", v, rows)
            return
        rows.append((prefix, " ".join(_scalar_str(v) for v in value)))
        return
    rows.append((prefix, _scalar_str(value)))


def _render_table(report: dict) -> str:
    rows: list[tuple[str, str]] = [("command", str(report["command"])),
                                   ("inputs.digest", report["inputs"]["digest"])]
    _flatten_for_table("", report["results"], rows)
    for i, msg in enumerate(report.get("warnings", [])):
        rows.append((f"warnings[{i}]", msg))
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def _emit(report: dict, fmt: str) -> None:
    report = _round_floats(report)
    if fmt == "table":
        sys.stdout.write(_render_table(report) + "\n")
    else:
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n")


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": {"code": code, "kind": kind, "message": message}},
                                sort_keys=True) + "\n")
    return code


# ----------------------------------------------------------------------
# sections shared by norm-class and theta-bound


def _sections_for(datum: LoadedDatum) -> list[tuple[str, tuple]]:
    """Labeled flat vectors: the alpha frame of a model, or explicit vectors."""
    if datum.model is not None:
        factors = isotypic_decomposition(datum.model.bigrading, datum.model.action,
                                         datum.model.polarization)
        out: list[tuple[str, tuple]] = []
        for idx, factor in enumerate(factors):
            if factor.kind != "S":
                continue
            alphas = alpha_basis(factor, datum.model.action)
            prefix = f"{idx}:" if len(factors) > 1 else ""
            for (k, l) in sorted(alphas):
                out.append((f"{prefix}alpha[{k},{l}]", alphas[(k, l)]))
        if not out:
            raise CliError(EXIT_PRECONDITION, "precondition-violated",
                           "model has no symmetric factors to sample sections from")
        return out
    if datum.vectors:
        return [(f"v{i}", v) for i, v in enumerate(datum.vectors)]
    raise CliError(EXIT_INVALID_INPUT, "invalid-input",
                   "need a 'model' spec or a 'vectors' list to pick sections")


def _regions(flag: str) -> list[str]:
    if flag == "global":
        return [D_EPS, D_EPS_PRIME]
    return [_REGION_OF_FLAG[flag]]


def _region_key(region: str) -> str:
    return "d_eps" if region == D_EPS else "d_eps_prime"


# ----------------------------------------------------------------------
# command handlers


def _cmd_weight_filtration(args: argparse.Namespace) -> dict:
    datum = _load_datum(args.datum)
    if args.operator == "n1":
        op = datum.n1
    elif args.operator == "n2":
        op = datum.n2
    else:
        op = datum.n1 + datum.n2
    W = monodromy_weight_filtration(op, center=args.center)
    results = {
        "operator": args.operator,
        "center": args.center,
        "graded_dims": {str(l): d for l, d in sorted(W.graded_dims().items())},
        "steps": [
            {"l": l, "dim": sub.dim, "basis": [vector_to_json(c) for c in sub.basis_columns()]}
            for l, sub in W.filtration.steps
        ],
    }
    return _report("weight-filtration", datum.digest, results)


def _cmd_cone_check(args: argparse.Namespace) -> dict:
    datum = _load_datum(args.datum)
    rep = cone_independence_report([datum.n1, datum.n2], samples=args.samples, seed=args.seed)
    return _report("cone-check", datum.digest, rep)


def _cmd_decompose(args: argparse.Namespace) -> dict:
    datum = _load_datum(args.datum)
    if datum.model is None:
        raise CliError(EXIT_INVALID_INPUT, "invalid-input",
                       "decompose needs a 'model' spec or a built-in corpus entry")
    model = datum.model
    factors = isotypic_decomposition(model.bigrading, model.action, model.polarization)
    results = {
        "ambient_dim": model.dim,
        "weight": model.weight,
        "factors": [f.to_json() for f in factors],
        "multiset": sorted(_factor_tag(f) for f in factors),
        "dims_sum_ok": sum(f.dim for f in factors) == model.dim,
    }
    return _report("decompose", datum.digest, results)


def _factor_tag(factor: Any) -> str:
    if factor.kind == "E":
        return f"E({factor.p},{factor.q})xS({factor.m})xS({factor.n})"
    if factor.kind == "H":
        return f"H({factor.l})xS({factor.m})xS({factor.n})"
    return f"S({factor.m})xS({factor.n})"


def _cmd_alpha_basis(args: argparse.Namespace) -> dict:
    datum = _load_datum(args.datum)
    if datum.model is None:
        raise CliError(EXIT_INVALID_INPUT, "invalid-input",
                       "alpha-basis needs a 'model' spec or a built-in corpus entry")
    model = datum.model
    factors = isotypic_decomposition(model.bigrading, model.action, model.polarization)
    warns: list[str] = []
    reported = []
    for idx, factor in enumerate(factors):
        if factor.kind != "S":
            warns.append(f"factor {idx} ({_factor_tag(factor)}) has no alpha frame")
            continue
        alphas = alpha_basis(factor, model.action)
        reported.append({
            "factor": idx,
            "m": factor.m,
            "n": factor.n,
            "alphas": {f"{k},{l}": vector_to_json(v) for (k, l), v in sorted(alphas.items())},
        })
    if not reported:
        raise CliError(EXIT_PRECONDITION, "precondition-violated",
                       "no symmetric factors: nothing carries an alpha frame")
    return _report("alpha-basis", datum.digest, {"factors": reported}, warns)


def _cmd_mhs_check(args: argparse.Namespace) -> dict:
    datum = _load_datum(args.datum)
    if datum.model is not None:
        F = datum.model.limit_filtration()
    elif datum.hodge is not None:
        F = datum.hodge
    else:
        raise CliError(EXIT_INVALID_INPUT, "invalid-input",
                       "mhs-check needs a Hodge filtration ('F' or a model)")
    center = datum.weight if args.center is None else args.center
    total = datum.n1 + datum.n2
    W = monodromy_weight_filtration(total, center=center).filtration
    mixed = MixedHodge(W, F)
    rep = mhs_check(mixed)
    results = {
        "center": center,
        "is_mhs": rep["is_mhs"],
        "weight_real": rep["weight_real"],
        "levels": rep["levels"],
        "r_split": r_split_check(mixed),
    }
    if datum.polarization is not None:
        results["polarized"] = polarized_mhs_check(mixed, total, datum.polarization, center)
    return _report("mhs-check", datum.digest, results)


def _cmd_norm_class(args: argparse.Namespace) -> dict:
    datum = _load_datum(args.datum)
    sections = _sections_for(datum)
    entries = []
    for label, vec in sections:
        entry: dict = {"label": label}
        for region in _regions(args.region):
            first, second = ((datum.n1, datum.n2) if region == D_EPS
                             else (datum.n2, datum.n1))
            s = section_from_datum(vec, first, second)
            cls = hodge_norm_class(s, region)
            entry[_region_key(region)] = {"weights": list(s.weights), "class": cls.to_json()}
        entries.append(entry)
    return _report("norm-class", datum.digest,
                   {"region": args.region, "sections": entries})


def _cmd_theta_bound(args: argparse.Namespace) -> dict:
    datum = _load_datum(args.datum)
    sections = _sections_for(datum)
    entries = []
    all_bounded = True
    for label, vec in sections:
        base = section_from_datum(vec, datum.n1, datum.n2)
        for region in _regions(args.region):
            for direction in (1, 2):
                tc = theta_apply_class(base, direction, datum.n1, datum.n2, region)
                if not tc.zero:
                    all_bounded = all_bounded and bool(tc.bounded)
                entries.append({
                    "label": label,
                    "direction": direction,
                    "region": _region_key(region),
                    "zero": tc.zero,
                    "bounded": tc.bounded,
                    "form_class": tc.form_class.to_json(),
                    "source_class": tc.source_class.to_json(),
                })
    return _report("theta-bound", datum.digest,
                   {"region": args.region, "all_bounded": all_bounded, "entries": entries})


def _parse_component(text: str) -> frozenset[int]:
    cleaned = text.replace(",", "").strip()
    if cleaned in ("", "none", "0"):
        return frozenset()
    try:
        parts = frozenset(int(c) for c in cleaned)
    except ValueError as exc:
        raise CliError(EXIT_INVALID_INPUT, "invalid-input",
                       f"bad component {text!r}") from exc
    if not parts <= {1, 2}:
        raise CliError(EXIT_INVALID_INPUT, "invalid-input",
                       f"component must be drawn from {{1,2}}, got {text!r}")
    return parts


def _cmd_l2_classify(args: argparse.Namespace) -> dict:
    component = _parse_component(args.component)
    verdict = classify_l2(component, args.n1, args.n2, args.l1, args.l2)
    results = verdict.to_json()
    if args.region == "d-eps":
        results["verdict"] = verdict.is_l2_d_eps
    elif args.region == "d-eps-prime":
        results["verdict"] = verdict.is_l2_d_eps_prime
    else:
        results["verdict"] = verdict.is_l2
    results["region"] = args.region
    digest = _param_digest(component=sorted(component), n=[args.n1, args.n2],
                           l=[args.l1, args.l2])
    return _report("l2-classify", digest, results)


def _cmd_stalk_cohomology(args: argparse.Namespace) -> dict:
    datum = _load_datum(args.datum)
    mode = HODGE_BUNDLE if args.mode == "hodge-bundle" else LOCAL_SYSTEM
    complex_ = build_stalk_complex(datum.as_monodromy(), mode)
    h = hypercohomology(complex_)
    results: dict = {
        "mode": args.mode,
        "dims": list(complex_.dims),
        "h": list(h),
        "euler": complex_.euler_characteristic(),
    }
    if args.truncation_degree is not None:
        truncated = truncated_global_model(datum.as_monodromy(), args.truncation_degree)
        results["truncation_degree"] = args.truncation_degree
        results["truncated_h"] = list(truncated)
        results["agrees"] = list(truncated) == list(h)
    return _report("stalk-cohomology", datum.digest, results)


def _cmd_oracle_compare(args: argparse.Namespace) -> dict:
    if args.l_min > args.l_max:
        raise CliError(EXIT_INVALID_INPUT, "invalid-input", "empty weight range")
    components = (frozenset(), frozenset({1}), frozenset({2}), frozenset({1, 2}))
    cells = [
        (J, n1, n2, l1, l2)
        for J in components
        for n1 in range(args.n_max + 1)
        for n2 in range(args.n_max + 1)
        for l1 in range(args.l_min, args.l_max + 1)
        for l2 in range(args.l_min, args.l_max + 1)
    ]

    def compare(cell: tuple) -> tuple[tuple, tuple] | None:
        J, n1, n2, l1, l2 = cell
        verdict = classify_l2(J, n1, n2, l1, l2)
        symbolic = (verdict.is_l2_d_eps, verdict.is_l2_d_eps_prime, verdict.is_l2)
        oracle = dbarmod.integrability_oracle(J, n1, n2, l1, l2,
                                              epsilon=args.epsilon).as_tuple()
        return None if symbolic == oracle else (symbolic, oracle)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(compare, cells))
    else:
        outcomes = [compare(cell) for cell in cells]
    disagreements = []
    for cell, outcome in zip(cells, outcomes):
        if outcome is None:
            continue
        J, n1, n2, l1, l2 = cell
        symbolic, oracle = outcome
        disagreements.append({
            "component": sorted(J),
            "t_orders": [n1, n2],
            "weights": [l1, l2],
            "classifier": list(symbolic),
            "oracle": list(oracle),
        })
    digest = _param_digest(epsilon=args.epsilon, l=[args.l_min, args.l_max], n_max=args.n_max)
    results = {
        "epsilon": args.epsilon,
        "cells": len(cells),
        "agreements": len(cells) - len(disagreements),
        "all_agree": not disagreements,
        "disagreements": disagreements,
    }
    return _report("oracle-compare", digest, results)


def _cmd_end_check(args: argparse.Namespace) -> dict:
    datum = _load_datum(args.datum)
    rep = theta_image_check(datum.as_monodromy())
    entries = {}
    for index, entry in rep["entries"].items():
        clean = dict(entry)
        for key in ("weights_d_eps", "weights_d_eps_prime"):
            if key in clean:
                clean[key] = list(clean[key])
        if "ad_graded_dims" in clean:
            clean["ad_graded_dims"] = {str(l): d
                                       for l, d in sorted(clean["ad_graded_dims"].items())}
        entries[str(index)] = clean
    results = {
        "end_dimension": datum.dimension ** 2,
        "commutes": rep["commutes"],
        "passes": rep["passes"],
        "entries": entries,
    }
    return _report("end-check", datum.digest, results)


def _cmd_dbar_solve(args: argparse.Namespace) -> dict:
    payload, digest, builtin = _read_payload(args.config)
    if builtin is not None or payload is None:
        raise CliError(EXIT_INVALID_INPUT, "invalid-input",
                       "dbar-solve takes an experiment JSON file")
    try:
        bundle, phi = dbarmod.case_from_json(payload)
    except dbarmod.ExcludedExponent:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(EXIT_INVALID_INPUT, "invalid-input", f"{args.config}: {exc}") from exc
    if phi.degree not in (1, 2):
        raise CliError(EXIT_INVALID_INPUT, "invalid-input",
                       f"no solver for degree {phi.degree} data")
    warns: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if phi.degree == 1:
            u = dbarmod.solve_dbar_01(phi, bundle, tolerance=args.tolerance)
        else:
            u = dbarmod.solve_dbar_02(phi, bundle)
        residual = dbarmod.dbar_residual(u, phi)
        norm_phi = dbarmod.weighted_norm(phi, bundle)
        norm_u = dbarmod.weighted_norm(u, bundle)
        ratio = dbarmod.verify_bound(phi, u, bundle)
    warns.extend(str(w.message) for w in caught)
    corners = []
    for slot, modes in enumerate(u.components):
        for (m, n) in sorted(modes):
            c1, c2 = dbarmod.path_corner(m, n, bundle.k, bundle.l, phi.grid.a)
            corners.append({"component": slot + 1, "mode": [m, n], "corner": [c1, c2]})
    results = {
        "k": bundle.k,
        "l": bundle.l,
        "degree": phi.degree,
        "grid": {"points": phi.grid.n, "a": phi.grid.a, "span": phi.grid.span},
        "phi_modes": [{"component": slot + 1, "modes": [list(key) for key in sorted(modes)]}
                      for slot, modes in enumerate(phi.components)],
        "residual": residual,
        "tolerance": args.tolerance,
        "residual_ok": residual < args.tolerance,
        "norms": {"phi": norm_phi, "u": norm_u},
        "c": None if math.isnan(ratio) else ratio,
        "hormander_covered": dbarmod.hormander_region(0, phi.degree, bundle.k, bundle.l),
        "corners": corners,
    }
    return _report("dbar-solve", digest, results, warns)


def _cmd_dbar_region(args: argparse.Namespace) -> dict:
    covered = dbarmod.hormander_region(args.p, args.q, args.k, args.l)
    digest = _param_digest(p=args.p, q=args.q, k=args.k, l=args.l)
    return _report("dbar-region", digest,
                   {"p": args.p, "q": args.q, "k": args.k, "l": args.l, "covered": covered})


# ----------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="limithodge",
        description="Weight filtrations, growth classes, L2 stalk cohomology, "
                    "and the weighted corner dbar solver, behind one JSON front door.",
    )
    parser.add_argument("--format", choices=("json", "table"), default="json",
                        help="report rendering (default json)")
    sub = parser.add_subparsers(dest="command", required=True)

    def datum_command(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("datum", help="datum file, corpus-directory name, or built-in label")
        return p

    p = datum_command("weight-filtration", "monodromy weight filtration of a datum")
    p.add_argument("--operator", choices=("n1", "n2", "cone"), default="cone")
    p.add_argument("--center", type=int, default=0)
    p.set_defaults(func=_cmd_weight_filtration)

    p = datum_command("cone-check", "sampled lambda-independence of the cone filtration")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_cone_check)

    p = datum_command("decompose", "isotypic decomposition of a bigraded model")
    p.set_defaults(func=_cmd_decompose)

    p = datum_command("alpha-basis", "lowered monomial frames of the symmetric factors")
    p.set_defaults(func=_cmd_alpha_basis)

    p = datum_command("mhs-check", "mixed-structure and polarization report")
    p.add_argument("--center", type=int, default=None,
                   help="central weight (default: the datum weight)")
    p.set_defaults(func=_cmd_mhs_check)

    p = datum_command("norm-class", "Hodge-norm growth classes of the section frame")
    p.add_argument("--region", choices=_REGION_FLAGS, default="global")
    p.set_defaults(func=_cmd_norm_class)

    p = datum_command("theta-bound", "Higgs-field boundedness verdicts on the frame")
    p.add_argument("--region", choices=_REGION_FLAGS, default="global")
    p.set_defaults(func=_cmd_theta_bound)

    p = sub.add_parser("l2-classify", help="square-integrability of one generator")
    p.add_argument("--component", default="none",
                   help="form component: none, 1, 2, or 12")
    p.add_argument("--n1", type=int, default=0)
    p.add_argument("--n2", type=int, default=0)
    p.add_argument("--l1", type=int, required=True)
    p.add_argument("--l2", type=int, required=True)
    p.add_argument("--region", choices=_REGION_FLAGS, default="global")
    p.set_defaults(func=_cmd_l2_classify)

    p = datum_command("stalk-cohomology", "cohomology of the L2 stalk complex")
    p.add_argument("--mode", choices=("local-system", "hodge-bundle"), default="local-system")
    p.add_argument("--truncation-degree", type=int, default=None,
                   help="also compare against the truncated polynomial model")
    p.set_defaults(func=_cmd_stalk_cohomology)

    p = sub.add_parser("oracle-compare",
                       help="symbolic classifier vs quadrature oracle over a grid")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--l-min", type=int, default=-4)
    p.add_argument("--l-max", type=int, default=4)
    p.add_argument("--n-max", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_oracle_compare)

    p = datum_command("end-check", "L2 verdicts of the Higgs field inside End(H)")
    p.set_defaults(func=_cmd_end_check)

    p = sub.add_parser("dbar-solve", help="solve the weighted corner dbar problem")
    p.add_argument("config", help="experiment JSON file")
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.set_defaults(func=_cmd_dbar_solve)

    p = sub.add_parser("dbar-region", help="Hormander-coverage test for a bidegree")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=float, default=0.0)
    p.add_argument("--l", type=float, default=0.0)
    p.set_defaults(func=_cmd_dbar_region)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except CliError as exc:
        return _fail(exc.code, exc.kind, str(exc))
    except dbarmod.ExcludedExponent as exc:
        return _fail(EXIT_EXCLUDED_EXPONENT, "excluded-exponent", str(exc))
    except (NonCommuting, NotNilpotent, NonPositiveCoefficient, NotHorizontal,
            NotIsometric, NoSolution, WrongKind, NotAHodgeFiltration, NotPolarized,
            dbarmod.IncompatibleInput, dbarmod.DivergentNorm) as exc:
        return _fail(EXIT_PRECONDITION, "precondition-violated", str(exc))
    except (AxiomFailure, DecompositionError, AnticommutationFailure,
            IllFormedComplex, AssertionError) as exc:
        return _fail(EXIT_INTERNAL, "internal-invariant-failure", str(exc))
    except OSError as exc:
        return _fail(EXIT_INVALID_INPUT, "invalid-input", str(exc))
    except (ValueError, KeyError, TypeError) as exc:
        return _fail(EXIT_INVALID_INPUT, "invalid-input", str(exc))
    except Exception as exc:  # noqa: BLE001 - contract: never a bare traceback
        return _fail(EXIT_INTERNAL, "internal-invariant-failure", f"{type(exc).__name__}: {exc}")
    _emit(report, args.format)
    return 0


if __name__ == "__main__":
    sys.exit(main())
