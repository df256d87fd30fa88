"""The commands of the command line interface

Each command takes a resolved :class:`~.RunConfig`, prints a short summary
and writes its machine readable output as CSV. It returns the exit code.
"""
from logging import getLogger
from pathlib import Path

from zins.chain import write_regime_csv
from zins.errors import TruncationError
from zins.model import khasminskii_check, validate_assumptions
from zins.montecarlo import (
    barrier_option_price,
    bond_price,
    scheme_comparison,
    strong_error,
)
from zins.scheme import PathStream, simulate_tem_path
from zins.time import Clock
from zins.truncation import audit, make_policy
from zins._cli.config import RunConfig
from zins._cli.export import config_header, path_rows, stair_rows, write_table

log = getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 3
EXIT_VALIDATION = 4
EXIT_NUMERICAL = 5


def make_run_policy(config: RunConfig):
    "the truncation policy of a configuration"
    section = config.truncation
    return make_policy(
        config.spec,
        psi_exponent=float(section["psi_exponent"]),
        mu=section["mu"],
        delta_star=section.get("delta_star"),
    )


def _preflight(config: RunConfig):
    "validate the model, warn about failures and build the policy"
    report = validate_assumptions(config.spec, int(config.experiment["grid_size"]))
    if not report.passed:
        names = ", ".join(c.name for c in report.failures)
        log.warning(f"Proceeding although assumptions failed: {names}")
    return make_run_policy(config)


def _options(config: RunConfig) -> dict:
    sim = config.simulation
    return {"batch_size": int(sim["batch_size"]), "threads": sim.get("threads")}


def cmd_validate(config: RunConfig, out: Path = None) -> int:
    """check the assumptions and audit the truncation

    prints one line per check and returns :data:`EXIT_VALIDATION` if any
    check failed
    """
    spec = config.spec
    report = validate_assumptions(spec, int(config.experiment["grid_size"]))
    print(report)
    passed = report.passed
    p = float(config.experiment["p"])
    holds, K4 = khasminskii_check(spec, p=max(p, 2.0))
    print(f"{'PASS' if holds else 'FAIL'} khasminskii: K₄ = {K4:.6g} for p = {max(p, 2.0):g}")
    passed &= holds
    try:
        policy = make_run_policy(config)
    except TruncationError as e:
        print(f"FAIL truncation: {e}")
        return EXIT_VALIDATION
    deltas = sorted(
        {d for d in [policy.delta_star, 1e-2, 1e-3, 1e-4, 1e-5, config.simulation["delta"]]
         if d <= policy.delta_star},
        reverse=True,
    )
    result = audit(spec, policy, deltas)
    print(result)
    for row in result.warnings:
        print(f"WARN growth: Δ^(1/4)·ψ(Δ) = {row.growth:.4g} > 1 at Δ = {row.delta:g}")
    passed &= result.passed
    if out is not None:
        rows = [(c.name, c.passed, c.detail) for c in report.checks]
        rows.append(("khasminskii", holds, f"K4 = {K4!r}"))
        rows.extend(
            (f"bound at delta {r.delta!r}", r.bound_ok, f"max {r.sampled_max!r} psi {r.psi!r}")
            for r in result.rows
        )
        write_table(out, ["check", "passed", "detail"], rows, config_header("validate", config.dumps()))
    return EXIT_OK if passed else EXIT_VALIDATION


def cmd_simulate(
    config: RunConfig, out: Path = None, plot_data: Path = None, regimes: Path = None
) -> int:
    "simulate a single path and write it as CSV"
    policy = _preflight(config)
    sim = config.simulation
    stream = PathStream(int(sim["seed"]), 0)
    state = simulate_tem_path(config.spec, policy, float(sim["delta"]), float(sim["horizon"]), stream)
    grid = state.grid
    extra = [
        f"effective delta = {grid.delta!r}, M = {grid.M}",
        f"effective horizon = {grid.horizon!r}, K = {grid.K}",
    ]
    header = config_header("simulate", config.dumps(), extra)
    write_table(out, ["k", "t", "X", "regime", "dB", "dN"], path_rows(state), header)
    if plot_data is not None:
        write_table(plot_data, ["t", "x"], stair_rows(state), header)
    if regimes is not None:
        write_regime_csv(regimes, state.regimes[0], grid.delta, "\n".join(header))
    path = state.path[0]
    print(
        f"Simulated {grid.K} steps of Δ = {grid.delta:.6g}: x(T) = {path[-1]:.6g}, "
        f"min {path.min():.6g}, max {path.max():.6g}"
    )
    return EXIT_OK


def cmd_converge(config: RunConfig, out: Path = None) -> int:
    "estimate strong errors and the empirical order"
    policy = _preflight(config)
    sim, exp = config.simulation, config.experiment
    tau = config.spec.tau
    clock = Clock()
    report = strong_error(
        config.spec,
        policy,
        [float(d) * tau for d in exp["deltas"]],
        float(exp["reference_delta"]) * tau,
        float(sim["horizon"]),
        p=float(exp["p"]),
        num_paths=int(sim["num_paths"]),
        seed=int(sim["seed"]),
        **_options(config),
    )
    header = config_header(
        "converge", config.dumps(), [f"reference delta = {report.reference_delta!r}"]
    )
    footer = [f"fitted_order = {report.fitted_order!r}"]
    write_table(out, ["delta", "error", "std_error"], report.rows(), header, footer)
    for delta, error, se in report.rows():
        print(f"Δ = {delta:<12.6g} error = {error:.6g} ± {se:.3g}")
    print(f"Fitted strong order {report.fitted_order:.4f} in {clock.now():.1f}s")
    return EXIT_OK


def cmd_compare_schemes(config: RunConfig, out: Path = None) -> int:
    "compare the truncated and the backward scheme pathwise"
    policy = _preflight(config)
    sim = config.simulation
    report = scheme_comparison(
        config.spec,
        policy,
        float(sim["delta"]),
        float(sim["horizon"]),
        int(sim["num_paths"]),
        int(sim["seed"]),
        **_options(config),
    )
    low, high = report.confidence_95
    rows = [
        ("delta", report.delta),
        ("num_paths", report.num_paths),
        ("mean", report.mean),
        ("std_error", report.std_error),
        ("ci_low", low),
        ("ci_high", high),
        ("max", report.max),
    ]
    rows.extend((f"q{q:g}", v) for q, v in report.quantiles.items())
    write_table(out, ["statistic", "value"], rows, config_header("compare-schemes", config.dumps()))
    print(
        f"Mean sup distance {report.mean:.6g} ± {report.std_error:.3g}, "
        f"max {report.max:.6g} over {report.num_paths} paths"
    )
    return EXIT_OK


def cmd_price(config: RunConfig, instrument: str, out: Path = None) -> int:
    """price a bond or a barrier option

    args
    ----
    config: RunConfig
        the configuration
    instrument: str
        ``bond`` or ``barrier``
    out: Path
        where to write the CSV, stdout if None
    """
    policy = _preflight(config)
    sim, exp = config.simulation, config.experiment
    args = (config.spec, policy, float(sim["delta"]), float(sim["horizon"]))
    if instrument == "bond":
        result = bond_price(
            *args, int(sim["num_paths"]), int(sim["seed"]), **_options(config)
        )
    elif instrument == "barrier":
        result = barrier_option_price(
            *args,
            float(exp["strike"]),
            float(exp["barrier"]),
            int(sim["num_paths"]),
            int(sim["seed"]),
            **_options(config),
        )
    else:
        raise ValueError(f"{instrument} can't be priced, choose bond or barrier")
    row = result.to_dict()
    columns = ["estimate", "std_error", "ci_low", "ci_high", "num_paths"]
    write_table(
        out, columns, [[row[c] for c in columns]], config_header(f"price-{instrument}", config.dumps())
    )
    low, high = result.confidence_95
    print(
        f"{instrument} price {result.estimate:.6g} ± {result.std_error:.3g} "
        f"[{low:.6g}, {high:.6g}] from {result.num_paths} paths"
    )
    return EXIT_OK
