"""Command-line front end: run sweeps, validate configs, and query the
brute-force grid oracle."""

import argparse
import sys

import numpy as np

from risec import harness, oracle
from risec.channel import ScenarioGeometry, generate_channels
from risec.config import ConfigError, dbm_to_watts, db_to_linear, load_config
from risec.system import SystemParams

PAPER_GEOMETRY = ScenarioGeometry(
    alice_pos=(0.0, 0.0),
    bob_pos=(90.0, 20.0),
    eve_pos=(70.0, 20.0),
    ris_pos=(40.0, 40.0),
)


def _cmd_run(args):
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    out_dir = args.out or config.out_dir
    if out_dir is None:
        print("config error: no output directory (--out or out_dir)", file=sys.stderr)
        return 1
    rows = harness.run_sweep(config, out_dir=out_dir, workers=args.workers, full=args.full)
    failures = sum(1 for r in rows if r.status != "ok")
    print(f"wrote {len(rows)} rows to {out_dir} ({failures} failures)")
    return 2 if failures else 0


def _cmd_validate(args):
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    p = config.params
    print(
        f"ok: sweep {config.sweep.variable} over {config.sweep.values}, "
        f"{config.realizations} realizations, methods {','.join(config.methods)}; "
        f"m={p.m} n={p.n} P_T={p.p_t:.6g} W P_I={p.p_i:.6g} W"
    )
    return 0


def _cmd_oracle(args):
    if args.m > 2 or args.n > 2:
        print("oracle error: brute force supports m <= 2 and n <= 2", file=sys.stderr)
        return 1
    sigma2 = dbm_to_watts(args.noise_dbm)
    n_eff = max(args.n, 1)
    params = SystemParams(
        m=args.m,
        n=n_eff,
        p_t=dbm_to_watts(args.pt_dbm),
        p_i=dbm_to_watts(args.pi_dbm),
        eta=np.full(n_eff, np.sqrt(db_to_linear(args.eta2_db))),
        sigma2_B=sigma2,
        sigma2_E=sigma2,
        sigma2_I=sigma2,
    )
    ch = generate_channels(params, PAPER_GEOMETRY, args.seed)
    res = oracle.grid_search(
        ch,
        params,
        n_dir=12 * args.grid,
        n_phase=8 * args.grid,
        n_pow=4 * args.grid,
        n_amp=6 * args.grid,
        n_qphase=8 * args.grid,
        use_ris=args.n > 0,
    )
    print(f"best SR: {res.sr:.9g} nats ({res.points} grid points)")
    print(f"w = {np.array2string(res.w, precision=6)}")
    print(f"q = {np.array2string(res.q, precision=6)}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="risec",
        description="Active-RIS secrecy-rate optimization experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a Monte-Carlo sweep from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--full", action="store_true", help="use 100 realizations")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("--config", required=True)
    p_val.set_defaults(func=_cmd_validate)

    p_or = sub.add_parser("oracle", help="brute-force grid search on a small instance")
    p_or.add_argument("--m", type=int, required=True)
    p_or.add_argument("--n", type=int, required=True)
    p_or.add_argument("--seed", type=int, required=True)
    p_or.add_argument("--grid", type=int, default=1, help="resolution multiplier")
    p_or.add_argument("--pt-dbm", type=float, default=30.0)
    p_or.add_argument("--pi-dbm", type=float, default=30.0)
    p_or.add_argument("--eta2-db", type=float, default=20.0)
    p_or.add_argument("--noise-dbm", type=float, default=-95.0)
    p_or.set_defaults(func=_cmd_oracle)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
