"""Command-line front end.

Subcommands: simulate, filter, estimate, asymptotics, riccati, mc.  Every run
writes the resolved configuration (with the package version) into the output
directory; numeric text output keeps 17 significant digits so files round-trip
without precision loss.  Exit codes: 0 success, 2 configuration error,
3 numeric or assumption failure, 4 nonconvergence.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import evaluate_info
from .config import RunConfig, parse_config
from .errors import ConfigurationError, HiddenOUError
from .estimate import estimate_path
from .filtering import run_discrete_filter
from .mc import McConfig, run_mc
from .model import SamplingScheme, ThetaPoint
from .riccati import check_controllability, solve_are
from .simulate import ObservationPath, simulate_path

FLOAT_FMT = "%.17g"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hidden-ou",
        description="Simulation, filtering and quasi-likelihood estimation for the "
                    "hidden Ornstein-Uhlenbeck state-space model.")
    parser.add_argument("--version", action="version", version=f"hidden-ou {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
            ("simulate", "simulate an observation path and write it as CSV"),
            ("filter", "run the stationary-gain filter along a path"),
            ("estimate", "two-stage estimation on a path"),
            ("asymptotics", "information matrices and theoretical standard errors"),
            ("riccati", "stationary Riccati solution and diagnostics"),
            ("mc", "replicated simulate-and-estimate study")]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--workers", type=int, default=None, help="worker processes")
        p.add_argument("--paper-scale", action="store_true",
                       help="full-size study: n=1e6, h=1e-4, 10000 replications")
        if name in ("filter", "estimate"):
            p.add_argument("--path", default=None,
                           help="CSV path file from the simulate subcommand "
                                "(default: simulate internally)")
        if name == "mc":
            p.add_argument("--scenario", default=None, choices=["i", "ii", "iii"],
                           help="override config scenario")
    return parser


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    resolved = dict(cfg.resolved, version=__version__)
    (out / "resolved_config.json").write_text(json.dumps(resolved, indent=2, sort_keys=True) + "\n")
    return out


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    data = np.column_stack(columns)
    np.savetxt(path, data, fmt=FLOAT_FMT, delimiter=",", header=",".join(header), comments="")


def _read_path_csv(csv_path: str, cfg: RunConfig) -> ObservationPath:
    p = Path(csv_path)
    if not p.exists():
        raise ConfigurationError(f"path file not found: {p}")
    with open(p) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(p, delimiter=",", skiprows=1, ndmin=2)
    y_cols = [i for i, name in enumerate(header) if name.startswith("y")]
    x_cols = [i for i, name in enumerate(header) if name.startswith("x")]
    if header[0] != "t" or not y_cols:
        raise ConfigurationError("path CSV must have a 't' column and y columns")
    t = data[:, 0]
    n = len(t) - 1
    if n < 1:
        raise ConfigurationError("path CSV needs at least two rows")
    h = float(t[1] - t[0])
    scheme = SamplingScheme(n=n, h=h)
    if abs(scheme.t_n - t[-1]) > 1e-8 * max(1.0, abs(t[-1])):
        raise ConfigurationError("path CSV time grid is not equidistant")
    if (n, h) != (cfg.scheme.n, cfg.scheme.h) and not (
            n == cfg.scheme.n and abs(h - cfg.scheme.h) <= 1e-12 * cfg.scheme.h):
        raise ConfigurationError(
            f"path CSV grid (n={n}, h={h:g}) does not match the config scheme "
            f"(n={cfg.scheme.n}, h={cfg.scheme.h:g})")
    x = data[:, x_cols] if x_cols else None
    return ObservationPath(scheme=scheme, y=data[:, y_cols], x_truth=x,
                           seed=cfg.seed, theta_true=cfg.theta_true)


def _matrix(m) -> list:
    return np.asarray(m, dtype=float).tolist()


def _cmd_simulate(cfg: RunConfig, args) -> int:
    out = _outdir(cfg)
    path = simulate_path(cfg.spec, cfg.theta_true, cfg.scheme, init=cfg.init,
                         seed=cfg.seed, keep_x=True)
    header = ["t"] + [f"y{i + 1}" for i in range(cfg.spec.d2)] \
        + [f"x{i + 1}" for i in range(cfg.spec.d1)]
    cols = [path.times()] + [path.y[:, i] for i in range(cfg.spec.d2)] \
        + [path.x_truth[:, i] for i in range(cfg.spec.d1)]
    _write_csv(out / "path.csv", header, cols)
    print(f"wrote {out / 'path.csv'}")
    return 0


def _get_path(cfg: RunConfig, args) -> ObservationPath:
    if getattr(args, "path", None):
        return _read_path_csv(args.path, cfg)
    return simulate_path(cfg.spec, cfg.theta_true, cfg.scheme, init=cfg.init,
                         seed=cfg.seed, keep_x=True)


def _cmd_filter(cfg: RunConfig, args) -> int:
    out = _outdir(cfg)
    path = _get_path(cfg, args)
    fp = run_discrete_filter(path, cfg.spec, cfg.theta_true, m0=cfg.m0,
                             burn_in=cfg.burn_in)
    header = ["t"] + [f"m{i + 1}" for i in range(cfg.spec.d1)]
    cols = [path.times()] + [fp.m_hat[:, i] for i in range(cfg.spec.d1)]
    if path.x_truth is not None:
        header += [f"x{i + 1}" for i in range(cfg.spec.d1)]
        cols += [path.x_truth[:, i] for i in range(cfg.spec.d1)]
    _write_csv(out / "filter.csv", header, cols)
    print(f"wrote {out / 'filter.csv'}")
    return 0


def _cmd_estimate(cfg: RunConfig, args) -> int:
    out = _outdir(cfg)
    path = _get_path(cfg, args)
    res = estimate_path(path, cfg.spec, m0=cfg.m0, burn_in=cfg.burn_in,
                        max_iterations=cfg.max_iterations)
    se1 = se2 = None
    try:
        info = evaluate_info(cfg.spec, ThetaPoint(res.theta1_hat, res.theta2_hat),
                             cfg.scheme)
        se1 = [float(v) for v in info.se1] if info.pd_flag1 else None
        se2 = [float(v) for v in info.se2] if info.pd_flag2 else None
    except HiddenOUError:
        pass
    payload = {
        "theta1_hat": [float(v) for v in res.theta1_hat],
        "theta2_hat": [float(v) for v in res.theta2_hat],
        "h1": res.h1_value,
        "h2": res.h2_value,
        "converged": res.converged,
        "burn_in": res.burn_in,
        "se1": se1,
        "se2": se2,
    }
    (out / "estimate.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(json.dumps(payload, indent=2, sort_keys=True))
    if not res.converged:
        print(json.dumps({"error": "ConvergenceError",
                          "message": "no optimizer start converged"}), file=sys.stderr)
        return 4
    return 0


def _cmd_riccati(cfg: RunConfig, args) -> int:
    out = _outdir(cfg)
    sol = solve_are(cfg.spec, cfg.theta_true)
    ctrl = check_controllability(cfg.spec, cfg.theta_true)
    eigs = np.linalg.eigvals(sol.hamiltonian)
    payload = {
        "gamma_plus": _matrix(sol.gamma_plus),
        "gamma_minus": _matrix(sol.gamma_minus) if sol.gamma_minus is not None else None,
        "alpha": _matrix(sol.alpha),
        "hamiltonian_eigenvalues": [[float(v.real), float(v.imag)] for v in eigs],
        "min_spectral_gap": float(sol.min_spectral_gap),
        "controllability": {"rank": ctrl.rank, "required": ctrl.d1,
                            "full_rank": ctrl.full_rank},
    }
    (out / "riccati.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_asymptotics(cfg: RunConfig, args) -> int:
    out = _outdir(cfg)
    info = evaluate_info(cfg.spec, cfg.theta_true, cfg.scheme)
    payload = {
        "gamma1": _matrix(info.gamma1),
        "gamma2": _matrix(info.gamma2),
        "se1": [float(v) for v in info.se1] if info.pd_flag1 else None,
        "se2": [float(v) for v in info.se2] if info.pd_flag2 else None,
        "gamma1_positive_definite": info.pd_flag1,
        "gamma2_positive_definite": info.pd_flag2,
        "scheme": {"n": cfg.scheme.n, "h": cfg.scheme.h, "t_n": cfg.scheme.t_n},
    }
    (out / "asymptotics.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_mc(cfg: RunConfig, args) -> int:
    out = _outdir(cfg)
    scenario = args.scenario or cfg.scenario
    mc_cfg = McConfig(spec=cfg.spec, theta_true=cfg.theta_true, scheme=cfg.scheme,
                      replications=cfg.replications, base_seed=cfg.base_seed,
                      scenario=scenario, gamma0=cfg.gamma0, worker_count=cfg.workers,
                      init=cfg.init, max_iterations=cfg.max_iterations)
    summary, rows = run_mc(mc_cfg)
    (out / "summary.json").write_text(json.dumps(summary.to_dict(), indent=2,
                                                 sort_keys=True) + "\n")
    m1 = cfg.spec.m1
    header = (["replication", "seed"]
              + [f"theta1_hat_{i + 1}" for i in range(m1)]
              + [f"theta2_hat_{i + 1}" for i in range(cfg.spec.m2)]
              + ["h1", "h2", "converged"])
    lines = [",".join(header)]
    for row in rows:
        vals = [str(row.index), str(row.seed)]
        vals += [FLOAT_FMT % v for v in row.theta1_hat]
        vals += [FLOAT_FMT % v for v in row.theta2_hat]
        vals += [FLOAT_FMT % row.h1_value, FLOAT_FMT % row.h2_value,
                 "1" if row.converged else "0"]
        lines.append(",".join(vals))
    (out / "estimates.csv").write_text("\n".join(lines) + "\n")
    for name, (edges, counts) in summary.histograms.items():
        _write_csv(out / f"hist_{name}.csv", ["bin_left", "bin_right", "count"],
                   [edges[:-1], edges[1:], counts.astype(float)])
    print(json.dumps(summary.to_dict(), indent=2, sort_keys=True))
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "filter": _cmd_filter,
    "estimate": _cmd_estimate,
    "asymptotics": _cmd_asymptotics,
    "riccati": _cmd_riccati,
    "mc": _cmd_mc,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {"seed": args.seed, "out": args.out, "workers": args.workers,
                 "paper_scale": args.paper_scale}
    overrides = {k: v for k, v in overrides.items() if v not in (None, False)}
    if args.paper_scale:
        warnings.warn("paper-scale study requested: n=1e6, h=1e-4, 10000 replications; "
                      "this takes hours", stacklevel=1)
    try:
        cfg = parse_config(args.config, overrides=overrides)
        return _COMMANDS[args.command](cfg, args)
    except HiddenOUError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
