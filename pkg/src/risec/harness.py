"""Seeded Monte-Carlo sweep runner with flat CSV outputs.

One result row per (sweep value x method x realization); realization seeds
are base_seed + realization index and are reused across sweep values so the
curves are paired.  Individual run failures are recorded in the status
column and never abort the sweep.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import csv
import os
import time

import numpy as np

from risec import driver
from risec.channel import generate_channels
from risec.system import amplification_power

RESULT_HEADER = [
    "sweep_var",
    "sweep_value",
    "method",
    "realization",
    "seed",
    "sr_nats",
    "sr_bits",
    "outer_iters",
    "status",
    "wall_ms",
]
TRACE_HEADER = ["iter", "sr_nats", "subproblem", "inner_iter", "value", "rank_gap"]
FULL_REALIZATIONS = 100


@dataclass
class ResultRow:
    sweep_value: float
    method: str
    realization: int
    seed: int
    sr_nats: float  # clamped operational rate
    outer_iters: int
    status: str
    wall_ms: float
    trace_rows: list = None
    amp_power: float = None


def _fmt(x):
    return f"{x:.12g}"


def _ao_trace_rows(result):
    rows = []
    for k, sr in enumerate(result.sr_trace, start=1):
        rows.append((k, max(sr, 0.0), "outer", 0, sr, 0.0))
    for k, trace in enumerate(result.w_traces, start=1):
        for row in trace:
            rows.append((k, "", "beam", row.iteration, row.objective, row.rank_gap))
    for k, trace in enumerate(result.q_traces, start=1):
        for row in trace:
            rows.append((k, "", "ris", row.iteration, row.objective, row.rank_gap))
    return rows


def run_one(config, sweep_value, method, realization):
    """Execute a single (sweep value, method, realization) cell."""
    params = config.params_for(sweep_value)
    seed = config.base_seed + realization
    ch = generate_channels(params, config.geometry, seed)
    t0 = time.perf_counter()
    status = "ok"
    trace_rows = []
    amp = None
    try:
        if method == "active":
            res = driver.alternating_optimize(ch, params)
            sr, outer = res.sr, max(res.outer_iters, 1)
            amp = amplification_power(ch, res.w, res.q, params)
            trace_rows = _ao_trace_rows(res)
        elif method == "passive":
            res = driver.passive_baseline(ch, params)
            sr, outer = res.sr, max(res.outer_iters, 1)
            trace_rows = _ao_trace_rows(res)
        elif method == "no_ris":
            _, sr = driver.no_ris_baseline(ch, params)
            outer = 1
        else:
            raise ValueError(f"unknown method {method!r}")
    except Exception as exc:  # recorded, not raised: sweeps must not abort
        sr, outer = np.nan, 0
        status = f"error:{type(exc).__name__}"
    wall_ms = (time.perf_counter() - t0) * 1e3
    if amp is not None:
        trace_rows.append((len(trace_rows), "", "amp_power", 0, amp, 0.0))
    return ResultRow(
        sweep_value=sweep_value,
        method=method,
        realization=realization,
        seed=seed,
        sr_nats=max(sr, 0.0) if np.isfinite(sr) else np.nan,
        outer_iters=outer,
        status=status,
        wall_ms=wall_ms,
        trace_rows=trace_rows,
        amp_power=amp,
    )


def _task(args):
    return run_one(*args)


def run_sweep(config, out_dir=None, workers=1, full=False):
    """Run the whole sweep; returns rows sorted by (value, method,
    realization) and, when out_dir is given, writes results.csv, summary.csv
    and optional per-run trace files."""
    realizations = FULL_REALIZATIONS if full else config.realizations
    tasks = [
        (config, value, method, r)
        for value in config.sweep.values
        for method in config.methods
        for r in range(realizations)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_task, tasks))
    else:
        rows = [run_one(*t) for t in tasks]
    rows.sort(key=lambda r: (r.sweep_value, r.method, r.realization))

    if out_dir is not None:
        write_outputs(config, rows, out_dir)
    return rows


def write_outputs(config, rows, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "results.csv"), "w", newline="", encoding="utf-8") as f:
        wr = csv.writer(f)
        wr.writerow(RESULT_HEADER)
        for r in rows:
            wr.writerow(
                [
                    config.sweep.variable,
                    _fmt(r.sweep_value),
                    r.method,
                    r.realization,
                    r.seed,
                    _fmt(r.sr_nats),
                    _fmt(r.sr_nats / np.log(2.0)),
                    r.outer_iters,
                    r.status,
                    f"{r.wall_ms:.3f}",
                ]
            )
    with open(os.path.join(out_dir, "summary.csv"), "w", newline="", encoding="utf-8") as f:
        wr = csv.writer(f)
        wr.writerow(["sweep_var", "sweep_value", "method", "realizations", "mean_sr_nats", "mean_sr_bits"])
        for value in config.sweep.values:
            for method in config.methods:
                srs = [
                    r.sr_nats
                    for r in rows
                    if r.sweep_value == value and r.method == method and r.status == "ok"
                ]
                if not srs:
                    continue
                mean = float(np.mean(srs))
                wr.writerow(
                    [config.sweep.variable, _fmt(value), method, len(srs), _fmt(mean), _fmt(mean / np.log(2.0))]
                )
    if config.traces:
        tdir = os.path.join(out_dir, "traces")
        os.makedirs(tdir, exist_ok=True)
        for r in rows:
            if not r.trace_rows:
                continue
            name = f"trace_{_fmt(r.sweep_value)}_{r.method}_{r.realization}.csv"
            with open(os.path.join(tdir, name), "w", newline="", encoding="utf-8") as f:
                wr = csv.writer(f)
                wr.writerow(TRACE_HEADER)
                for it, sr, sub, inner, value, gap in r.trace_rows:
                    wr.writerow(
                        [
                            it,
                            _fmt(sr) if sr != "" else "",
                            sub,
                            inner,
                            _fmt(value),
                            _fmt(gap),
                        ]
                    )


def mean_sr(rows, sweep_value=None, method=None):
    """Arithmetic mean of the clamped secrecy rate over matching ok rows."""
    sel = [
        r.sr_nats
        for r in rows
        if r.status == "ok"
        and (sweep_value is None or r.sweep_value == sweep_value)
        and (method is None or r.method == method)
    ]
    return float(np.mean(sel)) if sel else np.nan
