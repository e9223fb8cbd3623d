"""Command-line front end.

Exit codes: 0 on success (including a rejected efficiency test), 1 when a
computation fails or ``verify`` finds a violation, 2 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .data_io import (
    DAYS_PER_YEAR,
    PanelFormatError,
    read_panel,
    to_per_period,
    write_panel,
    write_report,
)
from .econometrics import DEFAULT_LAGS, run_efficiency_tests, summary_stats
from .equilibrium import verify_propositions
from .kernel_mc import MIN_PATHS
from .peg_markov import PegModel, PegState, peg_premium, risk_adjust
from .synthetic import GeneratorConfig, generate_equilibrium, generate_frictional

TEST_NAMES = ("staking_spread", "lending_spread")
TEST_REGRESSORS = ("gamma_eth - gamma_steth", "psi_eth - gamma_steth")
SUMMARY_LABELS = {
    "psi_eth": "psi_eth (ETH lending yield)",
    "psi_steth": "psi_steth (stETH lending yield)",
    "gamma_eth": "gamma_eth (ETH staking yield)",
    "gamma_steth": "gamma_steth (Lido staking yield)",
    "steth_eth_ratio": "stETH/ETH ratio",
}

# Per-period (daily) defaults for `verify`: sample-average yields divided by 365.
VERIFY_PSI_ETH = 0.0192
VERIFY_GAMMA_STETH = 0.0296


class UsageError(Exception):
    pass


def _probability(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not a probability in [0, 1]")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"{text} must be positive")
    return v


def _nonneg_float(text: str) -> float:
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"{text} must be non-negative")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"{text} must be a non-negative integer")
    return v


def _pct(x: float) -> str:
    return f"{100 * x:.2f}%"


def _add_peg_flags(p: argparse.ArgumentParser, eta: float, p00: float, pee: float) -> None:
    p.add_argument("--eta", type=_positive_float, default=eta, help=f"de-peg depth in log units (default {eta})")
    p.add_argument("--p00", type=_probability, default=p00, help=f"P(parity -> parity) (default {p00})")
    p.add_argument("--pee", type=_probability, default=pee, help=f"P(de-peg -> de-peg) (default {pee})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stakeyield",
        description="Equilibrium restrictions and efficiency tests for ETH staking, lending and liquid staking.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    defaults = GeneratorConfig()
    g = sub.add_parser("gen", help="write a synthetic yield panel CSV")
    g.add_argument("--mode", choices=("equilibrium", "frictional"), required=True)
    g.add_argument("--horizon", type=int, required=True, help="number of daily rows")
    g.add_argument("--seed", type=_nonneg_int, required=True)
    g.add_argument("--out", required=True, help="output CSV path")
    g.add_argument("--noise-sd", type=_nonneg_float, default=defaults.noise_sd,
                   help=f"annualized measurement noise on psi_steth (default {defaults.noise_sd})")
    g.add_argument("--fee", type=float, default=defaults.fee,
                   help=f"share of staking yield passed to stETH holders (default {defaults.fee})")
    g.add_argument("--kappa", type=_nonneg_float, default=defaults.kappa,
                   help="annualized staking cost (default 0, uncalibrated)")
    g.add_argument("--lambda-chi", type=float, default=defaults.lambda_chi,
                   help="market price of peg risk (default 0)")
    g.add_argument("--start", default=defaults.start.isoformat(), help="first date (ISO, default %(default)s)")
    _add_peg_flags(g, defaults.peg.eta, defaults.peg.p_stay_parity, defaults.peg.p_stay_depeg)

    t = sub.add_parser("test", help="run both market-efficiency regressions on a panel")
    t.add_argument("--data", required=True, help="panel CSV")
    t.add_argument("--lags", type=_nonneg_int, default=DEFAULT_LAGS, help="Newey-West lags (default 10)")
    t.add_argument("--out", help="write the JSON report here")

    s = sub.add_parser("summary", help="summary statistics of a panel (annualized %%)")
    s.add_argument("--data", required=True, help="panel CSV")

    v = sub.add_parser("verify", help="Monte Carlo check of the Euler equation at implied yields")
    v.add_argument("--paths", type=int, default=1_000_000, help="paths per check (default 1000000)")
    v.add_argument("--seed", type=_nonneg_int, default=0)
    v.add_argument("--lambda-eth", type=float, default=0.05, help="price of ETH risk per day (default 0.05)")
    v.add_argument("--lambda-chi", type=float, nargs="+", default=[-1.0, 0.0, 1.0],
                   help="one or more prices of peg risk (default -1 0 1)")
    v.add_argument("--risk-free", type=float, default=0.04 / DAYS_PER_YEAR,
                   help="daily log risk-free rate (default 0.04/365)")
    v.add_argument("--vol", type=_positive_float, default=0.03, help="daily ETH log-return volatility (default 0.03)")
    v.add_argument("--kappa", type=_nonneg_float, default=0.0, help="daily staking cost (default 0, uncalibrated)")
    v.add_argument("--mispricing-bp", type=float, default=0.0,
                   help="add this many basis points to the per-period stETH lending yield")
    v.add_argument("--workers", type=int, default=1, help="threads for the path loop (result is unaffected)")
    v.add_argument("--no-antithetic", action="store_true", help="disable antithetic ETH shocks")
    v.add_argument("--out", help="write the JSON verification report here")
    _add_peg_flags(v, 0.01, 0.99, 0.80)

    pr = sub.add_parser("premium", help="risk-adjusted peg probabilities and premia")
    pr.add_argument("--lambda-chi", type=float, required=True)
    _add_peg_flags(pr, 0.01, 0.99, 0.80)
    return parser


def cmd_gen(args) -> int:
    if args.horizon < 1:
        raise UsageError("--horizon must be >= 1")
    try:
        start = dt.date.fromisoformat(args.start)
        config = GeneratorConfig(
            horizon=args.horizon,
            fee=args.fee,
            kappa=args.kappa,
            lambda_chi=args.lambda_chi,
            peg=PegModel(args.eta, args.p00, args.pee),
            noise_sd=args.noise_sd,
            start=start,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    gen = generate_equilibrium if args.mode == "equilibrium" else generate_frictional
    panel = gen(config, args.seed)
    write_panel(panel, args.out)
    print(json.dumps({"mode": args.mode, "seed": args.seed, "config": config.as_dict()}, indent=2, sort_keys=True))
    return 0


def _load(path: str):
    if not Path(path).is_file():
        raise FileNotFoundError(f"no such data file: {path}")
    return read_panel(path)


def build_test_report(panel, lags: int, data_name: str) -> dict:
    stats = summary_stats(panel)
    results = run_efficiency_tests(panel, lags)
    tests = []
    for name, regressor, res in zip(TEST_NAMES, TEST_REGRESSORS, results):
        tests.append({
            "name": name,
            "regressor": regressor,
            "alpha_hat": res.alpha_hat,
            "beta_hat": res.beta_hat,
            "hac_se_alpha": res.hac_se_alpha,
            "hac_se_beta": res.hac_se_beta,
            "t_beta_eq_1": res.t_stat_beta_eq_1,
            "p_value": res.p_value,
            "r_squared": res.r_squared,
            "n_obs": res.n_obs,
            "lags": res.lags,
        })
    return {
        "summary": stats["columns"],
        "sample": {"n_obs": stats["n_obs"], "start": stats["start"], "end": stats["end"]},
        "tests": tests,
        "config": {"data": data_name, "lags": lags, "p_value_reference": "standard normal"},
        "version": __version__,
    }


def render_summary(stats: dict) -> str:
    lines = [f"{'':34s}{'Mean':>9s}{'Std. Dev.':>11s}{'Min':>9s}{'Max':>9s}"]
    for col, st in stats["columns"].items():
        if col == "steth_eth_ratio":
            cells = [f"{st[k]:.3f}" for k in ("mean", "sd", "min", "max")]
        else:
            cells = [_pct(st[k]) for k in ("mean", "sd", "min", "max")]
        lines.append(f"{SUMMARY_LABELS[col]:34s}{cells[0]:>9s}{cells[1]:>11s}{cells[2]:>9s}{cells[3]:>9s}")
    lines.append(f"{'Observations':34s}{stats['n_obs']:>9d}")
    lines.append(f"{'Sample period':34s}{stats['start']} to {stats['end']}")
    return "\n".join(lines)


def render_tests(report: dict) -> str:
    a, b = report["tests"]

    def p_fmt(p):
        return "<0.001" if p < 0.001 else f"{p:.3f}"

    rows = [
        ("", a["regressor"], b["regressor"]),
        ("beta_hat", f"{a['beta_hat']:.3f}", f"{b['beta_hat']:.3f}"),
        ("", f"({a['hac_se_beta']:.3f})", f"({b['hac_se_beta']:.3f})"),
        ("alpha_hat (annualized)", _pct(a["alpha_hat"]), _pct(b["alpha_hat"])),
        ("", f"({_pct(a['hac_se_alpha'])})", f"({_pct(b['hac_se_alpha'])})"),
        ("t-statistic (H0: beta = 1)", f"{a['t_beta_eq_1']:.2f}", f"{b['t_beta_eq_1']:.2f}"),
        ("p-value", p_fmt(a["p_value"]), p_fmt(b["p_value"])),
        ("R^2", f"{a['r_squared']:.3f}", f"{b['r_squared']:.3f}"),
        ("Observations", str(a["n_obs"]), str(b["n_obs"])),
    ]
    out = [f"Tests of market efficiency (Newey-West HAC, {a['lags']} lags)"]
    out += [f"{r[0]:28s}{r[1]:>24s}{r[2]:>24s}" for r in rows]
    return "\n".join(out)


def cmd_test(args) -> int:
    panel = _load(args.data)
    report = build_test_report(panel, args.lags, Path(args.data).name)
    print(render_tests(report))
    if args.out:
        write_report(report, args.out)
    return 0


def cmd_summary(args) -> int:
    print(render_summary(summary_stats(_load(args.data))))
    return 0


def cmd_verify(args) -> int:
    if args.paths < MIN_PATHS:
        raise UsageError(f"--paths must be at least {MIN_PATHS}")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    antithetic = not args.no_antithetic
    if antithetic and args.paths % 2:
        raise UsageError("--paths must be even with antithetic sampling")
    peg = PegModel(args.eta, args.p00, args.pee)
    psi_eth = to_per_period(VERIFY_PSI_ETH)
    gamma_steth = to_per_period(VERIFY_GAMMA_STETH)
    rows = verify_propositions(
        risk_free=args.risk_free,
        lambda_eth=args.lambda_eth,
        lambda_chis=args.lambda_chi,
        v_eth=args.vol**2,
        peg=peg,
        psi_eth=psi_eth,
        gamma_steth=gamma_steth,
        kappa=args.kappa,
        n_paths=args.paths,
        seed=args.seed,
        mispricing=args.mispricing_bp / 10_000,
        antithetic=antithetic,
        workers=args.workers,
    )
    all_pass = all(r["pass"] for r in rows)
    print(f"{'strategy':14s}{'state':>8s}{'lambda_chi':>12s}{'E[kernel*R]':>14s}{'SE':>12s}{'|z|':>8s}  result")
    for r in rows:
        print(f"{r['strategy']:14s}{r['state']:>8s}{r['lambda_chi']:>12.3f}{r['mean']:>14.8f}"
              f"{r['std_error']:>12.2e}{r['z']:>8.2f}  {'PASS' if r['pass'] else 'FAIL'}")
    print("ALL PASS" if all_pass else "FAIL")
    if args.out:
        config = {k: v for k, v in vars(args).items() if k not in ("func", "command", "out", "workers")}
        config.update(psi_eth=psi_eth, gamma_steth=gamma_steth)
        write_report({"config": config, "rows": rows, "all_pass": all_pass, "version": __version__}, args.out)
    return 0 if all_pass else 1


def cmd_premium(args) -> int:
    peg = PegModel(args.eta, args.p00, args.pee)
    adj = risk_adjust(peg, args.lambda_chi)
    print(f"eta={peg.eta:g} p00={peg.p_stay_parity:g} pee={peg.p_stay_depeg:g} lambda_chi={args.lambda_chi:g}")
    print(f"p00_tilde = {adj.p_stay_parity_tilde:.12g}")
    print(f"pee_tilde = {adj.p_stay_depeg_tilde:.12g}")
    for state in PegState:
        prem = peg_premium(state, peg, adj)
        print(f"eta_tilde[{state.value}] = {prem:.12g} per period ({_pct(prem * DAYS_PER_YEAR)} annualized)")
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "test": cmd_test,
    "summary": cmd_summary,
    "verify": cmd_verify,
    "premium": cmd_premium,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"stakeyield {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, PanelFormatError) as exc:
        print(f"stakeyield {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"stakeyield {args.command}: computation failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
