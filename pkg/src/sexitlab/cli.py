"""Command-line workbench: each subcommand wraps one core operation.

Identical flags and seed produce byte-identical outputs; every command that
draws randomness takes --seed.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from . import analytic, ber, channels, graphs, profiles, sexit


class CliError(Exception):
    pass


def _load_profile(arg: str) -> profiles.DegreeProfile:
    """Profile from a JSON file path, or a shipped fixture name."""
    if os.path.exists(arg):
        return profiles.load_profile(arg)
    try:
        return profiles.fixture_profile(arg)
    except profiles.ProfileError:
        raise CliError(f"no profile file or fixture named {arg!r} "
                       f"(fixtures: {', '.join(profiles.fixture_names())})")


def _channel(args, rate: float | None) -> channels.ChannelSpec:
    try:
        return channels.parse_channel(args.channel, rate=rate)
    except (channels.ChannelError, ValueError) as exc:
        raise CliError(str(exc))


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_rate(args) -> int:
    prof = _load_profile(args.profile)
    rate = profiles.design_rate(prof)
    avg_dv = 1.0 / sum(w / d for d, w in prof.lam)
    avg_dc = 1.0 / sum(w / d for d, w in prof.rho)
    print(f"design_rate {rate:.6f}")
    print(f"avg_vn_degree {avg_dv:.4f}")
    print(f"avg_cn_degree {avg_dc:.4f}")
    return 0


def cmd_construct(args) -> int:
    prof = _load_profile(args.profile)
    spec = profiles.quantize(prof, args.n)
    print(f"n {spec.n}")
    print(f"m_cn {spec.m_cn}")
    print(f"edges {spec.e}")
    print(f"design_rate {spec.design_rate:.6f}")
    print(f"realized_rate {spec.realized_rate:.6f}")
    print("vn_counts " + " ".join(f"{d}:{c}" for d, c in spec.vn_counts))
    print("cn_counts " + " ".join(f"{d}:{c}" for d, c in spec.cn_counts))
    if args.strict_girth:
        graph = graphs.sample_graph(spec, args.seed)
        residual = 0
    else:
        graph, residual = graphs.sample_graph_best_effort(spec, args.seed)
    print(f"four_cycles {residual}")
    if args.out:
        _write(args.out, graphs.to_alist(graph))
        print(f"alist {args.out}")
    return 0


def cmd_exit_curves(args) -> int:
    prof = _load_profile(args.profile)
    rate = args.rate if args.rate is not None else profiles.design_rate(prof)
    channel = _channel(args, rate)
    _write(args.out, analytic.curves_csv(prof, channel, args.points))
    return 0


def cmd_threshold(args) -> int:
    prof = _load_profile(args.profile)
    kind = channels.BEC if args.channel == "bec" else channels.BIAWGN
    value = analytic.threshold_search(prof, kind, rate=args.rate)
    if kind == channels.BEC:
        print(f"threshold_epsilon {value:.4f}")
    else:
        print(f"threshold_ebn0_db {value:.3f}")
    return 0


def cmd_sexit(args) -> int:
    prof = _load_profile(args.profile)
    rate = args.rate if args.rate is not None else profiles.design_rate(prof)
    config = sexit.SExitConfig(
        channel=_channel(args, rate), n=args.n, profile=prof, m=args.m,
        max_iter=args.max_iter, n_grid=args.grid, h_mode=args.mode,
        seed=args.seed, workers=args.workers)
    result = sexit.run_sexit(config)
    paths = sexit.write_result(result, args.out)
    metrics = sexit.optimization_metrics(result)
    print(f"trajectories {args.m}")
    print(f"vnd_vertices {result.hist.vnd_total}")
    print(f"cnd_vertices {result.hist.cnd_total}")
    print(f"stuck_fraction {metrics.stuck_fraction:.4f}")
    print(f"bundle {paths['bundle']}")
    return 0


def cmd_sexit_indep(args) -> int:
    prof = _load_profile(args.profile)
    rate = args.rate if args.rate is not None else profiles.design_rate(prof)
    config = sexit.SExitConfig(
        channel=_channel(args, rate), n=args.n, profile=prof, m=1,
        max_iter=args.max_iter, n_grid=args.grid, seed=args.seed,
        workers=args.workers)
    grid = np.linspace(0.0, 1.0, args.ia_points)
    result = sexit.run_independent(config, ia_grid=grid,
                                   samples_per_point=args.samples)
    paths = sexit.write_result(result, args.out)
    print(f"points {args.ia_points}")
    print(f"samples_per_point {args.samples}")
    print(f"bundle {paths['bundle']}")
    return 0


def cmd_ber(args) -> int:
    prof = _load_profile(args.profile)
    kind = channels.BEC if args.channel == "bec" else channels.BIAWGN
    points = [float(p) for p in args.points.split(",") if p.strip()]
    if not points:
        raise CliError("no channel points given (use --points 0.2,0.25,0.3)")
    table = ber.run_ber(prof, args.n, kind, points,
                        min_bit_errors=args.min_errors, max_frames=args.max_frames,
                        h_refresh=args.h_refresh, max_iter=args.max_iter,
                        seed=args.seed, workers=args.workers, rate=args.rate)
    _write(args.out, ber.to_csv(table))
    if args.out and args.out != "-":
        for row in table.rows:
            flag = " undersampled" if row.undersampled else ""
            print(f"{row.channel_param:g} ber {row.ber:.3e} fer {row.fer:.3e}{flag}")
    return 0


def cmd_compare(args) -> int:
    kind = channels.BEC if args.channel == "bec" else channels.BIAWGN
    with open(args.a, encoding="utf-8") as fh:
        table_a = ber.from_csv(fh.read(), kind=kind)
    with open(args.b, encoding="utf-8") as fh:
        table_b = ber.from_csv(fh.read(), kind=kind)
    gain = ber.gain_at_ber(table_a, table_b, args.target)
    unit = "dB" if kind == channels.BIAWGN else "delta_epsilon"
    print(f"gain_of_b_over_a {gain:+.4f} {unit} at ber {args.target:g}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app
    from .service.workspace import Workspace

    workspace = Workspace(args.workspace)
    app = create_app(workspace, pool_size=args.pool_size)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sexitlab",
        description="Finite-length LDPC degree-profile workbench")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(fn=fn)
        return p

    p = add("rate", cmd_rate, "design rate of a degree profile")
    p.add_argument("--profile", required=True)

    p = add("construct", cmd_construct, "quantize a profile and sample a Tanner graph")
    p.add_argument("--profile", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strict-girth", action="store_true",
                   help="fail instead of keeping residual 4-cycles")
    p.add_argument("--out", help="write the H-matrix in alist format")

    p = add("exit-curves", cmd_exit_curves, "sample analytic VND/CND EXIT curves to CSV")
    p.add_argument("--profile", required=True)
    p.add_argument("--channel", required=True, help="bec:EPS or awgn:EBN0_DB")
    p.add_argument("--rate", type=float, help="override the design rate for awgn")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--out", default="-")

    p = add("threshold", cmd_threshold, "decoding threshold by tunnel bisection")
    p.add_argument("--profile", required=True)
    p.add_argument("--channel", choices=["bec", "awgn"], required=True)
    p.add_argument("--rate", type=float)

    p = add("sexit", cmd_sexit, "scattered chart from M free-running decodes")
    p.add_argument("--profile", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--rate", type=float)
    p.add_argument("--m", type=int, default=1000)
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--mode", choices=[sexit.RESAMPLE, sexit.FIXED],
                   default=sexit.RESAMPLE)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)

    p = add("sexit-indep", cmd_sexit_indep,
            "scattered chart with independently driven component decoders")
    p.add_argument("--profile", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--rate", type=float)
    p.add_argument("--ia-points", type=int, default=21)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)

    p = add("ber", cmd_ber, "ensemble-averaged BER/FER sweep")
    p.add_argument("--profile", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--channel", choices=["bec", "awgn"], required=True)
    p.add_argument("--points", required=True, help="comma-separated channel params")
    p.add_argument("--rate", type=float)
    p.add_argument("--min-errors", type=int, default=200)
    p.add_argument("--max-frames", type=int, default=2_000_000)
    p.add_argument("--h-refresh", type=int, default=1)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-")

    p = add("compare", cmd_compare, "coding gain between two BER CSV files")
    p.add_argument("--a", required=True, help="baseline table")
    p.add_argument("--b", required=True, help="candidate table")
    p.add_argument("--target", type=float, default=1e-4)
    p.add_argument("--channel", choices=["bec", "awgn"], default="awgn")

    p = add("serve", cmd_serve, "run the HTTP job service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8356)
    p.add_argument("--workspace", default=os.environ.get("SEXIT_WORKSPACE", "./workspace"))
    p.add_argument("--pool-size", type=int, default=0,
                   help="job worker threads (0 = cpu count)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, profiles.ProfileError, channels.ChannelError,
            graphs.GraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
