"""Command-line front end: single estimates, benchmark tables, file synthesis.

Exit codes: 0 success, 2 refusal (enumeration over cap, usage errors),
1 any other error. The JSON records printed here validate against
docs/estimate-schema.json; the CSV table uses the columns
suite,width_or_depth,seed,method,value,bound_kind,wall_time_s.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
import sys

import click

from .baselines import SamplingConfig, brute_force_fgl, mp_bound, sampling_lower_bound
from .cutnorm import SolverConfig
from .errors import CapError, HiqlipError
from .estimate import Estimate
from .hierarchy import hiq_lip_two_layer
from .multilayer import block_product, hiq_lip_multilayer, layerwise_recursion
from .netio import generate_synthetic, load_network, save_network

METHODS = ("hiq", "hiq-mp-a", "hiq-mp-b", "block", "mp", "sample", "bf", "recursion")
SUITES = ("two-layer", "multi-layer")
CSV_COLUMNS = ("suite", "width_or_depth", "seed", "method", "value", "bound_kind", "wall_time_s")
ENDPOINT_ENV = "HIQLIP_REMOTE_ENDPOINT"


def _parse_int_list(text: str, flag: str) -> list:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise click.UsageError(f"{flag} expects a comma-separated integer list, got {text!r}")
    if not values:
        raise click.UsageError(f"{flag} must not be empty")
    return values


def _solver_options(fn):
    opts = [
        click.option("--solver", type=click.Choice(["exhaustive", "annealing", "remote"]),
                     default="annealing", show_default=True, help="Spin-solver backend."),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--num-reads", type=int, default=16, show_default=True),
        click.option("--sweeps", type=int, default=1000, show_default=True),
        click.option("--beta-min", type=float, default=0.1, show_default=True),
        click.option("--beta-max", type=float, default=10.0, show_default=True),
        click.option("--max-vars-exhaustive", type=int, default=24, show_default=True),
        click.option("--remote-endpoint", type=str, default=None,
                     help=f"Remote solver base URL (env {ENDPOINT_ENV} overrides)."),
        click.option("--timeout-ms", type=int, default=30000, show_default=True),
        click.option("--qubit-budget", type=int, default=100, show_default=True,
                     help="Free-variable budget for one solver call."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _build_solver_config(solver, seed, num_reads, sweeps, beta_min, beta_max,
                         max_vars_exhaustive, remote_endpoint, timeout_ms) -> SolverConfig:
    endpoint = os.environ.get(ENDPOINT_ENV) or remote_endpoint
    return SolverConfig(
        backend=solver,
        seed=seed,
        num_reads=num_reads,
        sweeps=sweeps,
        beta_schedule=(beta_min, beta_max),
        max_vars_exhaustive=max_vars_exhaustive,
        remote_endpoint=endpoint,
        timeout_ms=timeout_ms,
    )


def run_estimate(net, class_index: int, method: str, cfg: SolverConfig, *,
                 qubit_budget: int = 100, samples: int = 200_000, cap: int = 22,
                 block_size: int = 2, problem: str = "fgl", selection: str = "abs",
                 top_mode: str = "cut") -> Estimate:
    """Dispatch one estimator run. Depth-2 networks route the pairwise
    product methods to the two-layer estimator (their damping is degenerate
    there)."""
    if method == "hiq":
        return hiq_lip_two_layer(net, class_index, cfg, qubit_budget=qubit_budget,
                                 problem=problem, selection=selection)
    if method in ("hiq-mp-a", "hiq-mp-b"):
        if net.depth == 2:
            est = hiq_lip_two_layer(net, class_index, cfg, qubit_budget=qubit_budget,
                                    problem=problem, selection=selection)
            est.method = method
            est.solver_stats["routed"] = "two-layer"
            return est
        return hiq_lip_multilayer(net, class_index, method[-1], cfg,
                                  qubit_budget=qubit_budget)
    if method == "block":
        return block_product(net, class_index, block_size, cfg, qubit_budget=qubit_budget)
    if method == "mp":
        return mp_bound(net, class_index)
    if method == "sample":
        return sampling_lower_bound(net, class_index,
                                    SamplingConfig(num_samples=samples, seed=cfg.seed))
    if method == "bf":
        return brute_force_fgl(net, class_index, cap=cap)
    if method == "recursion":
        return layerwise_recursion(net, class_index, cfg, qubit_budget=qubit_budget,
                                   top_mode=top_mode)
    raise ValueError(f"unknown method {method!r}")


def _suite_dims(suite: str, size: int) -> list:
    if suite == "two-layer":
        return [size, size, 10]
    return [10] + [7] * (size - 1) + [10]


def run_bench(suite: str, sizes, seeds, methods, cfg: SolverConfig, *,
              qubit_budget: int = 100, samples: int = 200_000, cap: int = 22,
              block_size: int = 2, class_index: int = 8, scale: float = 1.0,
              warn=None):
    """Run the benchmark grid; returns (csv_rows, estimate_records, trace_rows).

    Rows are sorted by (size, seed, method) so re-runs with identical flags
    emit identical tables (wall times aside). Methods that refuse a
    configuration (brute force over its cap, two-layer-only methods on deep
    networks) are skipped with a warning.
    """
    warn = warn or (lambda msg: None)
    if not methods:
        raise ValueError("bench needs at least one method")
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}")
    rows, records, trace_rows = [], [], []
    for size in sizes:
        dims = _suite_dims(suite, size)
        for seed in seeds:
            net = generate_synthetic(seed, dims, scale=scale)
            for method in methods:
                if method == "hiq" and net.depth != 2:
                    warn(f"skip {method} on depth-{net.depth} network (size {size})")
                    continue
                run_cfg = dataclasses.replace(cfg, seed=seed)
                try:
                    est = run_estimate(net, class_index, method, run_cfg,
                                       qubit_budget=qubit_budget, samples=samples,
                                       cap=cap, block_size=block_size)
                except CapError as exc:
                    warn(f"skip {method} at size {size} seed {seed}: {exc}")
                    continue
                rows.append({
                    "suite": suite,
                    "width_or_depth": size,
                    "seed": seed,
                    "method": method,
                    "value": est.value,
                    "bound_kind": est.bound_kind,
                    "wall_time_s": est.wall_time_s,
                })
                records.append(est.to_record(suite=suite, width_or_depth=size, seed=seed))
                for entry in est.trace:
                    trace_rows.append({**entry, "suite": suite, "width_or_depth": size,
                                       "seed": seed, "method": method})
    rows.sort(key=lambda r: (r["width_or_depth"], r["seed"], r["method"]))
    return rows, records, trace_rows


def _aggregate(rows) -> list:
    groups = {}
    for r in rows:
        groups.setdefault((r["width_or_depth"], r["method"]), []).append(r["value"])
    lines = []
    for (size, method), vals in sorted(groups.items()):
        mean = sum(vals) / len(vals)
        lines.append(f"size={size} method={method} n={len(vals)} "
                     f"mean={mean:.6g} min={min(vals):.6g} max={max(vals):.6g}")
    return lines


def _rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r)
    return buf.getvalue()


def _write_trace(path, trace_rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in trace_rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


@click.group()
def main():
    """Estimate global Lipschitz constants of dense ReLU networks."""


@main.command("estimate")
@click.option("--network", "network_path", required=True, type=click.Path(), help="hiqlip-net-v1 file.")
@click.option("--class", "class_index", type=int, default=8, show_default=True,
              help="Output class whose gradient norm is bounded.")
@click.option("--method", type=click.Choice(METHODS), default="hiq", show_default=True)
@_solver_options
@click.option("--samples", type=int, default=200_000, show_default=True,
              help="Sample budget for --method sample.")
@click.option("--cap", type=int, default=22, show_default=True,
              help="Hidden-unit cap for --method bf.")
@click.option("--block-size", type=int, default=2, show_default=True,
              help="Block length b for --method block.")
@click.option("--problem", type=click.Choice(["fgl", "cut"]), default="fgl", show_default=True,
              help="Two-layer encoding: exact {0,1} activations or plain sign relaxation.")
@click.option("--selection", type=click.Choice(["abs", "signed"]), default="abs", show_default=True,
              help="Refinement vertex selection rule.")
@click.option("--top-mode", type=click.Choice(["cut", "fgl"]), default="cut", show_default=True,
              help="Top-activation handling for --method recursion.")
@click.option("--json", "as_json", flag_value=True, default=True, help="Emit a JSON record (default).")
@click.option("--csv", "as_json", flag_value=False, help="Emit a CSV record instead.")
@click.option("--trace", "trace_path", type=click.Path(), default=None,
              help="Write per-level refinement trace as JSON lines.")
def cmd_estimate(network_path, class_index, method, solver, seed, num_reads, sweeps,
                 beta_min, beta_max, max_vars_exhaustive, remote_endpoint, timeout_ms,
                 qubit_budget, samples, cap, block_size, problem, selection, top_mode,
                 as_json, trace_path):
    """Estimate one network/class/method combination and print the record."""
    try:
        cfg = _build_solver_config(solver, seed, num_reads, sweeps, beta_min, beta_max,
                                   max_vars_exhaustive, remote_endpoint, timeout_ms)
        net = load_network(network_path)
        est = run_estimate(net, class_index, method, cfg, qubit_budget=qubit_budget,
                           samples=samples, cap=cap, block_size=block_size,
                           problem=problem, selection=selection, top_mode=top_mode)
        if trace_path and est.trace:
            _write_trace(trace_path, [{**t, "method": method} for t in est.trace])
        if as_json:
            click.echo(json.dumps(est.to_record(network=str(network_path), **{"class": class_index}),
                                  sort_keys=True))
        else:
            writer = csv.writer(sys.stdout, lineterminator="\n")
            writer.writerow(["method", "value", "bound_kind", "wall_time_s", "config_digest"])
            writer.writerow([est.method, est.value, est.bound_kind, est.wall_time_s,
                             est.config_digest])
    except CapError as exc:
        click.echo(f"refused: {exc}", err=True)
        sys.exit(2)
    except (HiqlipError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.command("bench")
@click.option("--suite", type=click.Choice(SUITES), default="two-layer", show_default=True)
@click.option("--widths", default="8,16", show_default=True,
              help="Two-layer suite: comma list of hidden widths.")
@click.option("--depths", default="3,4", show_default=True,
              help="Multi-layer suite: comma list of depths.")
@click.option("--seeds", default="1,2", show_default=True, help="Comma list of network seeds.")
@click.option("--methods", default=None,
              help="Comma list of methods (default per suite).")
@_solver_options
@click.option("--samples", type=int, default=200_000, show_default=True)
@click.option("--cap", type=int, default=22, show_default=True)
@click.option("--block-size", type=int, default=2, show_default=True)
@click.option("--class", "class_index", type=int, default=8, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="CSV output path (default stdout).")
@click.option("--json", "as_json", is_flag=True, default=False,
              help="Emit JSON-lines estimate records instead of CSV.")
@click.option("--trace", "trace_path", type=click.Path(), default=None,
              help="Write all per-level refinement traces as JSON lines.")
def cmd_bench(suite, widths, depths, seeds, methods, solver, seed, num_reads, sweeps,
              beta_min, beta_max, max_vars_exhaustive, remote_endpoint, timeout_ms,
              qubit_budget, samples, cap, block_size, class_index, out_path, as_json,
              trace_path):
    """Run a benchmark grid and emit the results table."""
    try:
        cfg = _build_solver_config(solver, seed, num_reads, sweeps, beta_min, beta_max,
                                   max_vars_exhaustive, remote_endpoint, timeout_ms)
        sizes = _parse_int_list(widths if suite == "two-layer" else depths,
                                "--widths" if suite == "two-layer" else "--depths")
        seed_list = _parse_int_list(seeds, "--seeds")
        if methods is None:
            method_list = (["hiq", "mp", "sample", "bf"] if suite == "two-layer"
                           else ["hiq-mp-a", "hiq-mp-b", "block", "mp", "sample", "bf"])
        else:
            method_list = [m.strip() for m in methods.split(",") if m.strip()]
        rows, records, trace_rows = run_bench(
            suite, sizes, seed_list, method_list, cfg, qubit_budget=qubit_budget,
            samples=samples, cap=cap, block_size=block_size, class_index=class_index,
            warn=lambda msg: click.echo(f"warning: {msg}", err=True))
        if trace_path:
            _write_trace(trace_path, trace_rows)
        if as_json:
            text = "\n".join(json.dumps(r, sort_keys=True) for r in records) + "\n"
        else:
            text = _rows_to_csv(rows)
        if out_path:
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            click.echo(text, nl=False)
        for line in _aggregate(rows):
            click.echo(f"# {line}", err=True)
    except CapError as exc:
        click.echo(f"refused: {exc}", err=True)
        sys.exit(2)
    except (HiqlipError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.command("gen")
@click.option("--dims", required=True, help="Comma list of layer sizes, e.g. 4,3,1.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--scale", type=float, default=1.0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def cmd_gen(dims, seed, scale, out_path):
    """Write a synthetic hiqlip-net-v1 weight file."""
    dim_list = _parse_int_list(dims, "--dims")
    if len(dim_list) < 2:
        raise click.UsageError("--dims needs at least an input and an output size")
    try:
        net = generate_synthetic(seed, dim_list, scale=scale)
        save_network(net, out_path)
        click.echo(f"wrote {out_path} (dims {'x'.join(map(str, dim_list))}, seed {seed})", err=True)
    except (HiqlipError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
