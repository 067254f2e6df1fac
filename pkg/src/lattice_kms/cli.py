"""Batch experiment runner with strict, reproducible configs.

One experiment per invocation: `lattice-kms run config.json` writes one
result file (CSV with `#` metadata headers, or JSON with a top-level
{manifest, results} object) plus a run-manifest sidecar carrying the wall
time.  Identical config and seed produce byte-identical result files.
Exit codes: 0 success, 2 config validation failure, 3 numerical failure;
failures emit a machine-readable error record on stdout.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .clusters import decay_bound, expectation_series, log_z_series
from .commutators import decompose
from .errors import ConfigError, LatticeKmsError
from .graphs import chain, custom, grid, ring
from .interaction import build_xyz, uniqueness_certificate
from .kms_fixed_point import FixedPointProblem, solve_fixed_point
from .mermin_wagner import mw_sweep, mw_verify
from .operators import embed, hs_norm, spin_matrices
from .spin_inequalities import (
    check_duhamel_derivative,
    check_multi_point,
    check_two_point,
    make_sweep,
)

EXPERIMENTS = (
    "decompose", "uniqueness", "logz-series", "expectation-series",
    "decay-bound", "inequality-sweep", "duhamel-check", "kms-fixed-point",
    "mw-bound", "mw-verify",
)

ENV_THREADS = "LATTICE_KMS_THREADS"


def fmt17(x) -> str:
    """Decimal rendering with 17 significant digits (round-trip exact)."""
    return "%.17g" % float(x)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


# -- validation ---------------------------------------------------------------

def _check_keys(d, path, required, optional=()):
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: must be an object")
    unknown = sorted(set(d) - set(required) - set(optional))
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown}")
    for k in required:
        if k not in d:
            raise ConfigError(f"{path}.{k}: required key is missing")


def _number(d, key, path, positive=False, integer=False, minimum=None):
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key}: must be a number")
    if integer and int(v) != v:
        raise ConfigError(f"{path}.{key}: must be an integer")
    if positive and v <= 0:
        raise ConfigError(f"{path}.{key}: must be > 0")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{path}.{key}: must be >= {minimum}")
    return int(v) if integer else float(v)


def _parse_spin(value, path):
    try:
        s = Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{path}: cannot parse spin {value!r}") from None
    if s <= 0 or (2 * s).denominator != 1:
        raise ConfigError(f"{path}: spin must be a positive half-integer")
    return float(s)


def _build_graph(cfg, path):
    _check_keys(cfg, path, ("type",), ("size", "rows", "cols", "edges", "origin"))
    gtype = cfg["type"]
    origin = int(cfg.get("origin", 0))
    if gtype == "chain":
        return chain(_number(cfg, "size", path, integer=True, minimum=2), origin)
    if gtype == "ring":
        return ring(_number(cfg, "size", path, integer=True, minimum=3), origin)
    if gtype == "grid":
        return grid(_number(cfg, "rows", path, integer=True, minimum=1),
                    _number(cfg, "cols", path, integer=True, minimum=1), origin)
    if gtype == "custom":
        edges = cfg.get("edges")
        if not isinstance(edges, list) or not edges:
            raise ConfigError(f"{path}.edges: custom graphs need an edge list")
        return custom([tuple(e) for e in edges], origin)
    raise ConfigError(f"{path}.type: unknown graph type {gtype!r}")


PRESETS = {"ising": (0.0, 0.0, 1.0), "xy": (1.0, 1.0, 0.0),
           "heisenberg": (1.0, 1.0, 1.0)}


def _build_couplings(cfg, graph, path):
    _check_keys(cfg, path, (), ("preset", "strength", "per_edge"))
    if "preset" in cfg:
        if cfg["preset"] not in PRESETS:
            raise ConfigError(f"{path}.preset: unknown preset {cfg['preset']!r}")
        strength = float(cfg.get("strength", 1.0))
        w1, w2, w3 = PRESETS[cfg["preset"]]
        return ({e: w1 * strength for e in graph.edges},
                {e: w2 * strength for e in graph.edges},
                {e: w3 * strength for e in graph.edges})
    if "per_edge" in cfg:
        rows = cfg["per_edge"]
        if not isinstance(rows, list) or len(rows) != len(graph.edges):
            raise ConfigError(
                f"{path}.per_edge: need one [J1,J2,J3] triple per edge "
                f"({len(graph.edges)} edges in canonical sorted order)")
        triples = [tuple(float(v) for v in r) for r in rows]
        return tuple({e: t[i] for e, t in zip(graph.edges, triples)}
                     for i in range(3))
    raise ConfigError(f"{path}: needs 'preset' or 'per_edge'")


class ModelSpec:
    def __init__(self, cfg, path, need_couplings=True):
        _check_keys(cfg, path, ("spin", "graph"), ("couplings",))
        self.spin = _parse_spin(cfg["spin"], f"{path}.spin")
        self.graph = _build_graph(cfg["graph"], f"{path}.graph")
        self.j1 = self.j2 = self.j3 = None
        if need_couplings:
            if "couplings" not in cfg:
                raise ConfigError(f"{path}.couplings: required key is missing")
            self.j1, self.j2, self.j3 = _build_couplings(
                cfg["couplings"], self.graph, f"{path}.couplings")

    def interaction(self):
        return build_xyz(self.graph, self.spin, self.j1, self.j2, self.j3)

    def require_symmetric(self, path):
        if self.j1 != self.j2:
            raise ConfigError(f"{path}: this experiment needs J1 = J2 on every edge")


def _observable(cfg, spin, path):
    _check_keys(cfg, path, ("sites", "components"), ("prefactor",))
    sites = cfg["sites"]
    comps = cfg["components"]
    if (not isinstance(sites, list) or not isinstance(comps, list)
            or len(sites) != len(comps) or not sites):
        raise ConfigError(f"{path}: sites and components must be matching lists")
    if not all(c in (1, 2, 3) for c in comps):
        raise ConfigError(f"{path}.components: entries must be 1, 2 or 3")
    mats = spin_matrices(spin)
    n = mats[0].shape[0]
    support = tuple(sorted(set(int(x) for x in sites)))
    dim = n ** len(support)
    op = np.eye(dim, dtype=complex)
    for x, c in zip(sites, comps):
        op = op @ embed(mats[c - 1], (int(x),), support, n)
    return float(cfg.get("prefactor", 1.0)) * op, support


def validate_config(config: dict) -> dict:
    """Strict schema validation; returns the config unchanged on success."""
    top_optional = {
        "decompose": ("dim", "samples", "seed", "output"),
        "uniqueness": ("model", "beta", "output"),
        "logz-series": ("model", "beta", "truncation", "order_sweep", "output"),
        "expectation-series": ("model", "beta", "truncation", "observable", "output"),
        "decay-bound": ("model", "beta", "decay", "observable", "observable_b", "output"),
        "inequality-sweep": ("model", "beta", "samples", "seed", "check", "output"),
        "duhamel-check": ("model", "beta", "samples", "seed", "edge", "pair", "output"),
        "kms-fixed-point": ("model", "beta", "tolerances", "output"),
        "mw-bound": ("model", "beta", "output"),
        "mw-verify": ("model", "beta", "site", "component", "output"),
    }
    if not isinstance(config, dict):
        raise ConfigError("config: must be a JSON object")
    exp = config.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"config.experiment: must be one of {list(EXPERIMENTS)}")
    required = {
        "decompose": ("experiment", "dim", "samples", "seed", "output"),
        "uniqueness": ("experiment", "model", "beta", "output"),
        "logz-series": ("experiment", "model", "beta", "truncation", "output"),
        "expectation-series": ("experiment", "model", "beta", "truncation",
                               "observable", "output"),
        "decay-bound": ("experiment", "model", "beta", "decay", "observable",
                        "observable_b", "output"),
        "inequality-sweep": ("experiment", "model", "beta", "samples", "seed",
                             "check", "output"),
        "duhamel-check": ("experiment", "model", "beta", "samples", "seed",
                          "edge", "pair", "output"),
        "kms-fixed-point": ("experiment", "model", "beta", "output"),
        "mw-bound": ("experiment", "model", "beta", "output"),
        "mw-verify": ("experiment", "model", "beta", "site", "component", "output"),
    }[exp]
    optional = tuple(set(top_optional[exp] + ("experiment",)) - set(required))
    _check_keys(config, "config", required, optional)
    _check_keys(config["output"], "config.output", ("path",), ("format",))
    out_fmt = config["output"].get("format", "json")
    if out_fmt not in ("csv", "json"):
        raise ConfigError("config.output.format: must be 'csv' or 'json'")
    if "beta" in config:
        _number(config, "beta", "config", positive=True)
    if "seed" in config:
        _number(config, "seed", "config", integer=True, minimum=0)
    if "samples" in config:
        _number(config, "samples", "config", integer=True, minimum=1)
    # experiment-specific deep validation happens in the handlers, which
    # re-parse the model; do the cheap structural parts here
    if "model" in config:
        ModelSpec(config["model"], "config.model",
                  need_couplings=exp not in ("inequality-sweep", "duhamel-check"))
    if exp == "decompose":
        _number(config, "dim", "config", integer=True, minimum=2)
    if exp == "logz-series" and "order_sweep" in config:
        if not isinstance(config["order_sweep"], bool):
            raise ConfigError("config.order_sweep: must be a boolean")
    if "truncation" in config:
        _check_keys(config["truncation"], "config.truncation",
                    ("max_n", "max_k"), ("max_support",))
        _number(config["truncation"], "max_n", "config.truncation",
                integer=True, minimum=1)
        _number(config["truncation"], "max_k", "config.truncation",
                integer=True, minimum=1)
    return config


# -- handlers -----------------------------------------------------------------

def _handle_decompose(config, rng_seed):
    dim = int(config["dim"])
    n_samples = int(config["samples"])
    rng = np.random.default_rng(rng_seed)
    rows = []
    worst_resid = 0.0
    worst_excess = -math.inf
    for i in range(n_samples):
        raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        h = (raw + raw.conj().T) / 2
        h -= np.trace(h) / dim * np.eye(dim)
        d = decompose(h)
        norm = hs_norm(h)
        resid = hs_norm(d.reconstruct(dim) - h) / max(norm, 1e-300)
        cap = math.sqrt(dim) * norm
        rows.append({"sample": i, "hs_norm": norm, "residual": resid,
                     "budget": d.hs_budget, "budget_cap": cap})
        worst_resid = max(worst_resid, resid)
        worst_excess = max(worst_excess, d.hs_budget - cap)
    results = {"max_relative_residual": worst_resid,
               "max_budget_excess": worst_excess,
               "all_ok": worst_resid <= 1e-10 and worst_excess <= 1e-12}
    cols = ("sample", "hs_norm", "residual", "budget", "budget_cap")
    return results, rows, cols


def _handle_uniqueness(config, _seed):
    model = ModelSpec(config["model"], "config.model")
    cert = uniqueness_certificate(model.interaction(), float(config["beta"]))
    return ({"valid": cert.valid, "s_witness": cert.s_witness,
             "norm_at_witness": cert.norm_at_witness,
             "contraction_bound": cert.contraction_bound,
             "simple_condition_holds": cert.simple_condition_holds},
            None, None)


def _handle_logz(config, _seed):
    model = ModelSpec(config["model"], "config.model")
    phi = model.interaction()
    beta = float(config["beta"])
    tr = config["truncation"]
    max_n, max_k = int(tr["max_n"]), int(tr["max_k"])
    max_support = int(tr["max_support"]) if "max_support" in tr else None
    res = log_z_series(phi, beta, max_k, max_n, max_support)
    results = {"series": res.value, "exact": res.exact, "abs_error": res.abs_error,
               "per_order": res.per_order, "clusters_kept": res.n_kept}
    rows = None
    cols = None
    if config.get("order_sweep", False):
        rows = []
        for n in range(1, max_n + 1):
            r = log_z_series(phi, beta, max_k, n, max_support)
            rows.append({"max_n": n, "series": r.value, "error": r.abs_error})
        cols = ("max_n", "series", "error")
    return results, rows, cols


def _handle_expectation(config, _seed):
    model = ModelSpec(config["model"], "config.model")
    op, support = _observable(config["observable"], model.spin, "config.observable")
    tr = config["truncation"]
    res = expectation_series(
        op, support, model.interaction(), float(config["beta"]),
        int(tr["max_k"]), int(tr["max_n"]),
        int(tr["max_support"]) if "max_support" in tr else None)
    return ({"series": res.value, "exact": res.exact,
             "abs_error": res.abs_error}, None, None)


def _handle_decay(config, _seed):
    model = ModelSpec(config["model"], "config.model")
    _check_keys(config["decay"], "config.decay", ("a", "b"))
    a = _number(config["decay"], "a", "config.decay", positive=True)
    b = _number(config["decay"], "b", "config.decay", minimum=0.0)
    op_a, supp_a = _observable(config["observable"], model.spin, "config.observable")
    op_b, supp_b = _observable(config["observable_b"], model.spin,
                               "config.observable_b")
    rep = decay_bound(op_a, supp_a, op_b, supp_b, model.interaction(),
                      float(config["beta"]), a, b)
    return ({"bound": rep.bound, "measured": rep.measured, "holds": rep.holds,
             "mu": rep.mu, "k_ab": rep.k_ab,
             "certificate_holds": rep.certificate.holds}, None, None)


def _coupling_columns(graph):
    if len(graph.edges) == 1:
        return ["J1", "J2", "J3"]
    return [f"J{i}_{k}" for k in range(len(graph.edges)) for i in (1, 2, 3)]


def _coupling_values(graph, sample):
    out = []
    for e in graph.edges:
        out.extend(sample[e])
    return out


def _handle_inequality(config, rng_seed):
    model = ModelSpec(config["model"], "config.model", need_couplings=False)
    _check_keys(config["check"], "config.check", ("kind",),
                ("x", "sites", "components"))
    kind = config["check"]["kind"]
    sweep = make_sweep(model.graph, model.spin, float(config["beta"]),
                       int(config["samples"]), rng_seed)
    if kind == "two_point":
        if "x" not in config["check"]:
            raise ConfigError("config.check.x: required for two_point")
        report = check_two_point(sweep, int(config["check"]["x"]))
    elif kind == "multi_point":
        sites = config["check"].get("sites")
        comps = config["check"].get("components")
        if not sites or not comps:
            raise ConfigError(
                "config.check: multi_point needs sites and components")
        report = check_multi_point(sweep, [int(s) for s in sites],
                                   [int(c) for c in comps])
    else:
        raise ConfigError(f"config.check.kind: unknown kind {kind!r}")
    cols = ["sample"] + _coupling_columns(model.graph) + ["lhs", "rhs", "margin"]
    rows = []
    for r in report.rows:
        vals = [r.index] + _coupling_values(model.graph, r.couplings)
        vals += [r.lhs, r.rhs, r.margin]
        rows.append(dict(zip(cols, vals)))
    return ({"min_margin": report.min_margin, "all_hold": report.all_hold},
            rows, tuple(cols))


def _handle_duhamel(config, rng_seed):
    model = ModelSpec(config["model"], "config.model", need_couplings=False)
    edge = tuple(int(v) for v in config["edge"])
    pair = tuple(int(v) for v in config["pair"])
    if len(edge) != 2 or len(pair) != 2:
        raise ConfigError("config.edge and config.pair: need two sites each")
    sweep = make_sweep(model.graph, model.spin, float(config["beta"]),
                       int(config["samples"]), rng_seed, symmetric=True)
    report = check_duhamel_derivative(sweep, edge, pair)
    cols = (["sample"] + _coupling_columns(model.graph)
            + ["d1_duhamel", "d1_fd", "rel_err_1", "d2_duhamel", "d2_fd",
               "rel_err_2", "margin_derivative", "margin_duhamel"])
    rows = []
    for r in report.rows:
        e1, e2 = r.fd_rel_errors
        vals = ([r.index] + _coupling_values(model.graph, r.couplings)
                + [r.derivative_duhamel[0], r.derivative_fd[0], e1,
                   r.derivative_duhamel[1], r.derivative_fd[1], e2,
                   r.derivative_margin, r.duhamel_margin])
        rows.append(dict(zip(cols, vals)))
    return ({"max_fd_rel_error": report.max_fd_rel_error,
             "min_derivative_margin": report.min_derivative_margin,
             "min_duhamel_margin": report.min_duhamel_margin},
            rows, tuple(cols))


def _handle_kms(config, _seed):
    model = ModelSpec(config["model"], "config.model")
    beta = float(config["beta"])
    tols = config.get("tolerances", {})
    _check_keys(tols, "config.tolerances", (), ("tol", "max_iter"))
    tol = float(tols.get("tol", 1e-12))
    max_iter = int(tols.get("max_iter", 200))
    phi = model.interaction()
    cert = uniqueness_certificate(phi, beta)
    problem = FixedPointProblem(phi, beta)
    res = solve_fixed_point(phi, beta, tol=tol, max_iter=max_iter,
                            check_certificate=False, problem=problem)
    sup_diff = float(np.max(np.abs(
        res.epsilon.flat() - problem.gibbs_epsilon().flat())))
    results = {"certificate_valid": cert.valid, "converged": res.converged,
               "iterations": res.iterations, "sup_diff_vs_gibbs": sup_diff,
               "derivation_residual": problem.derivation_residual()}
    if not res.converged:
        raise LatticeKmsError(
            f"fixed-point iteration did not converge in {max_iter} steps "
            f"(last update {res.final_update:.3g})")
    return results, None, None


def _handle_mw_bound(config, _seed):
    model = ModelSpec(config["model"], "config.model")
    model.require_symmetric("config.model.couplings")
    rows_raw = mw_sweep(model.graph, model.j1, model.j3,
                        float(config["beta"]), model.spin)
    cols = ("d", "xi", "lemma_bound", "correlation", "theorem_rhs")
    rows = [{k: r[k] for k in cols} for r in rows_raw]
    margins = [r["theorem_rhs"] - r["correlation"] for r in rows_raw]
    return ({"min_margin": min(margins) if margins else None}, rows, cols)


def _handle_mw_verify(config, _seed):
    model = ModelSpec(config["model"], "config.model")
    model.require_symmetric("config.model.couplings")
    rep = mw_verify(model.graph, model.j1, model.j3, float(config["beta"]),
                    model.spin, int(config["site"]), int(config["component"]))
    return ({"correlation": rep.correlation, "xi": rep.xi, "rhs": rep.rhs,
             "margin": rep.margin, "holds": rep.holds,
             "disconnected": rep.disconnected}, None, None)


HANDLERS = {
    "decompose": _handle_decompose,
    "uniqueness": _handle_uniqueness,
    "logz-series": _handle_logz,
    "expectation-series": _handle_expectation,
    "decay-bound": _handle_decay,
    "inequality-sweep": _handle_inequality,
    "duhamel-check": _handle_duhamel,
    "kms-fixed-point": _handle_kms,
    "mw-bound": _handle_mw_bound,
    "mw-verify": _handle_mw_verify,
}


# -- output -------------------------------------------------------------------

def emit_curve(path, columns, rows, metadata) -> None:
    """Write plot-ready CSV: `#` metadata header lines, then fixed-order rows.

    Values are rendered with 17 significant digits; an empty row set still
    produces the header.
    """
    lines = [f"# {k}: {v}" for k, v in metadata.items()]
    lines.append(",".join(columns))
    for row in rows:
        rendered = []
        for c in columns:
            v = row[c]
            rendered.append(fmt17(v) if isinstance(v, (int, float)) else str(v))
        lines.append(",".join(rendered))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and (math.isinf(obj) or math.isnan(obj)):
        return str(obj)
    raise TypeError(f"not serializable: {type(obj)}")


def _sanitize(obj):
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def write_result(path, out_format, manifest, results, rows, columns) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    if out_format == "csv":
        meta = {"experiment": manifest["config"]["experiment"],
                "config_hash": manifest["config_hash"],
                "version": manifest["version"],
                "seed": manifest["seed"],
                "threads": manifest["threads"]}
        for k, v in sorted(_sanitize(results).items()):
            meta[f"result_{k}"] = v
        emit_curve(path, columns or tuple(results), rows or [], meta)
    else:
        payload = {"manifest": _sanitize(manifest), "results": _sanitize(results)}
        if rows is not None:
            payload["results"]["rows"] = _sanitize(rows)
        with open(path, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")


def _resolve_threads(arg_threads):
    if arg_threads is not None:
        return int(arg_threads)
    env = os.environ.get(ENV_THREADS)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{ENV_THREADS}: not an integer: {env!r}") from None
    return 1


def run(config_path, output_dir=None, threads=None, seed_override=None) -> int:
    """Execute one experiment config; returns the process exit code."""
    started = time.time()
    try:
        with open(config_path) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _emit_error(2, "validation", f"cannot read config: {exc}")
        return 2
    try:
        validate_config(config)
        threads_n = _resolve_threads(threads)
        seed = int(seed_override) if seed_override is not None else config.get("seed")
        handler = HANDLERS[config["experiment"]]
        results, rows, columns = handler(config, seed)
    except ConfigError as exc:
        _emit_error(2, "validation", str(exc))
        return 2
    except LatticeKmsError as exc:
        _emit_error(3, "numerical", str(exc))
        return 3
    out_cfg = config["output"]
    out_path = out_cfg["path"]
    if output_dir is not None:
        out_path = os.path.join(output_dir, out_path)
    manifest = {"config": config, "config_hash": config_hash(config),
                "version": __version__, "seed": seed, "threads": threads_n}
    write_result(out_path, out_cfg.get("format", "json"), manifest,
                 results, rows, columns)
    run_manifest = dict(manifest)
    run_manifest["wall_time_s"] = time.time() - started
    with open(out_path + ".manifest.json", "w") as fh:
        json.dump(_sanitize(run_manifest), fh, sort_keys=True, indent=2)
        fh.write("\n")
    return 0


def _emit_error(code, kind, message):
    record = {"error": {"exit_code": code, "kind": kind, "message": message}}
    print(json.dumps(record, sort_keys=True))


def validate(config_path) -> int:
    try:
        with open(config_path) as fh:
            config = json.load(fh)
        validate_config(config)
    except (OSError, json.JSONDecodeError) as exc:
        _emit_error(2, "validation", f"cannot read config: {exc}")
        return 2
    except ConfigError as exc:
        _emit_error(2, "validation", str(exc))
        return 2
    print(canonical_json(config))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lattice-kms",
        description="Finite-volume quantum lattice equilibrium experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--output", default=None, metavar="DIR")
    p_run.add_argument("--threads", type=int, default=None, metavar="N")
    p_run.add_argument("--seed", type=int, default=None, metavar="S")
    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("config")
    args = parser.parse_args(argv)
    if args.command == "run":
        return run(args.config, args.output, args.threads, args.seed)
    return validate(args.config)


if __name__ == "__main__":
    sys.exit(main())
