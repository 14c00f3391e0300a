"""Command-line front end: evolve / sweep / verify.

Exit codes: 0 ok, 2 usage, 3 numerical or validity error, 4 acceptance
failure.  Errors print a machine-readable JSON record to stderr.  All
outputs are deterministic for a fixed configuration; the QDSPIN_WORKERS
environment variable changes wall time only, never results.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .channel import QuadratureResolutionError, build_quadrature, compute_channel
from .config import RunConfig, header_lines, parse_b_values, parse_state_spec
from .constants import (
    InvalidParameterError,
    NumericalDomainError,
    QdspinError,
    ValidityWindowError,
)
from .evolution import build_time_grid, evolve, find_g_crossings
from .magnetometry import (
    MonotonicityError,
    NormalizationError,
    SweepRequest,
    calibration_curve,
    run_sweep,
    trajectory_for_field,
)
from .states import make_state

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_ACCEPTANCE = 4

_USAGE_ERRORS = (InvalidParameterError,)
_NUMERICAL_ERRORS = (
    ValidityWindowError,
    QuadratureResolutionError,
    NumericalDomainError,
    NormalizationError,
    MonotonicityError,
)


def _error_record(exc: Exception) -> str:
    return json.dumps({"error": type(exc).__name__, "message": str(exc)})


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdspin",
        description="Hyperfine decoherence of two quantum-dot spin qubits: "
        "discord trajectories and field-sensing sweeps.",
    )
    parser.add_argument("--version", action="version", version=f"qdspin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--state", help="state spec, e.g. bell:psi-, werner:p=0.33, belldiag:a=0.4,b=0.4")
    common.add_argument("--a-total", type=float, dest="a_total", help="total hyperfine energy A, ueV")
    common.add_argument("--n-nuclei", type=float, dest="n_nuclei", help="nuclei per dot")
    common.add_argument("--i-nuclear", type=float, dest="i_nuclear", help="nuclear spin quantum number")
    common.add_argument("--g-factor", type=float, dest="g_factor", help="|g| of the electron")
    common.add_argument("--m-nodes", type=int, dest="m_nodes", help="polarization quadrature nodes")
    common.add_argument("--q-nodes", type=int, dest="q_nodes", help="transverse-invariant quadrature nodes")
    common.add_argument("--tmax", type=float, dest="t_max", help="evolution time, ns")
    common.add_argument("--dt", type=float, help="grid step, ns")
    common.add_argument("--normalize", choices=("none", "initial", "half"))
    common.add_argument("--upper-pairing", choices=("printed", "swapped"), dest="upper_pairing")
    common.add_argument("--workers", type=int, help="parallel workers (wall time only)")
    common.add_argument("--out", help="output CSV path")

    p_evolve = sub.add_parser("evolve", parents=[common], help="one trajectory at one field")
    p_evolve.add_argument("--b", help="field in Tesla (single value)")
    p_evolve.add_argument("--channel-out", dest="channel_out", help="also write the channel CSV here")

    p_sweep = sub.add_parser("sweep", parents=[common], help="field sweep with sensing metrics")
    p_sweep.add_argument("--b", help="fields in Tesla: start:stop:step, comma list, or value")
    p_sweep.add_argument(
        "--metric",
        choices=("M", "g-extrema", "esd", "longtime", "all"),
        help="which sensing metrics to extract",
    )
    p_sweep.add_argument("--calibration-out", dest="calibration_out", help="two-column calibration CSV")
    p_sweep.add_argument(
        "--calibration-quantity",
        dest="calibration_quantity",
        choices=("M", "g_max_value", "g_min_value", "d_longtime"),
        default="M",
    )

    p_verify = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    p_verify.add_argument("--only", help="comma-separated criterion indices, e.g. 1,3,6")

    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {
        key: getattr(args, key, None)
        for key in (
            "state",
            "a_total",
            "n_nuclei",
            "i_nuclear",
            "g_factor",
            "m_nodes",
            "q_nodes",
            "t_max",
            "dt",
            "normalize",
            "upper_pairing",
            "workers",
            "out",
        )
    }
    if getattr(args, "b", None) is not None:
        overrides["b_fields"] = parse_b_values(args.b)
    if getattr(args, "metric", None) is not None:
        overrides["metric"] = args.metric
    return config.with_overrides(**overrides)


def _cmd_evolve(args: argparse.Namespace) -> int:
    config = _load_config(args)
    if len(config.b_fields) != 1:
        raise InvalidParameterError("evolve expects exactly one field value (--b)")
    b = config.b_fields[0]
    dot = config.dot(b)
    times = build_time_grid(config.t_max, dt=config.dt, dt_long=config.dt_long,
                            dense_prefix=config.dense_prefix)
    quad = build_quadrature(dot, float(times.max()), m_count=config.m_nodes, q_count=config.q_nodes)
    chan = compute_channel(dot, times, quad)
    state0 = make_state(parse_state_spec(config.state))
    traj = evolve(state0, chan, drop_zeeman_phase=config.drop_zeeman_phase, pairing=config.pairing)

    def g_exact(t: float) -> float:
        single = compute_channel(dot, np.array([t]), quad)
        return float(
            evolve(state0, single, drop_zeeman_phase=config.drop_zeeman_phase,
                   pairing=config.pairing).g[0]
        )

    kinks = find_g_crossings(traj.times, traj.g, refine=g_exact, slope_series=traj.d_lower)
    extra = {
        "quadrature_m_nodes": chan.m_count,
        "quadrature_q_nodes": chan.q_count,
        "kink_times_ns": ";".join(f"{e.t_cross_ns:.9g}" for e in kinks) or "none",
    }
    headers = header_lines(config, extra)
    out = config.out or "trajectory.csv"
    traj.to_csv(out, header_lines=headers, normalize=config.normalize)
    if getattr(args, "channel_out", None):
        chan.to_csv(args.channel_out, header_lines=headers)
    print(f"wrote {out} ({traj.times.size} rows); kinks: {extra['kink_times_ns']}")
    return EXIT_OK


_METRIC_SETS = {
    "M": ("M",),
    "g-extrema": ("g-extrema",),
    "esd": ("esd",),
    "longtime": ("longtime",),
    "all": ("M", "g-extrema", "esd", "kinks", "longtime"),
}


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _load_config(args)
    if not config.b_fields:
        raise InvalidParameterError("sweep needs a nonempty field list (--b)")
    request = SweepRequest(
        state_spec=parse_state_spec(config.state),
        b_fields=tuple(config.b_fields),
        dot_template=config.dot(0.0),
        t_max=config.t_max,
        dt=config.dt,
        dt_long=config.dt_long,
        metrics=_METRIC_SETS[config.metric],
        m_window=tuple(config.m_window),
        longtime_window=tuple(config.longtime_window),
        m_nodes=config.m_nodes,
        q_nodes=config.q_nodes,
        drop_zeeman_phase=config.drop_zeeman_phase,
        pairing=config.pairing,
    )
    table = run_sweep(request, workers=config.workers)
    headers = header_lines(config, {"metric": config.metric})
    out = config.out or "sweep.csv"
    table.to_csv(out, header_lines=headers)
    if getattr(args, "calibration_out", None):
        curve = calibration_curve(table, args.calibration_quantity)
        curve.to_csv(args.calibration_out, header_lines=headers)
    print(f"wrote {out} ({len(table.rows)} rows)")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    from .acceptance import run_checks

    only = None
    if getattr(args, "only", None):
        only = [int(x) for x in args.only.split(",") if x.strip()]
    results = run_checks(only=only)
    return EXIT_OK if all(r.passed for r in results) else EXIT_ACCEPTANCE


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"evolve": _cmd_evolve, "sweep": _cmd_sweep, "verify": _cmd_verify}
    try:
        return handlers[args.command](args)
    except _USAGE_ERRORS as exc:
        print(_error_record(exc), file=sys.stderr)
        return EXIT_USAGE
    except _NUMERICAL_ERRORS as exc:
        print(_error_record(exc), file=sys.stderr)
        return EXIT_NUMERICAL
    except QdspinError as exc:
        print(_error_record(exc), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
