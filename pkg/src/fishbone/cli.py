"""Command-line front end: reproducible CSV reports with figures alongside.

Subcommands: simulate | threshold | analyze | tables | signchange |
scaling | trigerror.  Every flag can also be supplied through a flat
``key = value`` config file (``--config``); explicit flags win.  Outputs
are byte-deterministic: CSV floats use shortest round-trip decimals and
figures are rendered with a fixed hash salt and no timestamp metadata.

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from fractions import Fraction
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from . import hill, negligibility
from .experiments import (
    BracketError,
    GrowthCriterion,
    amplitude_scan,
    scaling_experiment,
    sign_change_census,
    threshold_bisection,
    trig_error_report,
)
from .galerkin import build_system
from .integrator import IntegrationError, IntegratorConfig, TrajectoryStatus, integrate
from .model import ModalState, ModelSpec, TorsionVariant

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

_SVG_SALT = "fishbone"

DEFAULT_TABLE_ENERGIES = (1.0, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05)
DEFAULT_TABLE_OMEGAS = (0.1, 0.2)
DEFAULT_ENERGY_TABLE_OMEGAS = (0.2, 0.1, 0.05, 0.01)


# ---------------------------------------------------------------------------
# Serialization helpers
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    """Shortest round-trip decimal for floats; plain str otherwise."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def save_figure(fig, path: Path) -> None:
    with matplotlib.rc_context({"svg.hashsalt": _SVG_SALT}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _wants(fmt: str, kind: str) -> bool:
    return fmt == "both" or fmt == kind


# ---------------------------------------------------------------------------
# Config file / argument plumbing
# ---------------------------------------------------------------------------


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config_defaults(parser: argparse.ArgumentParser, values: dict[str, str]) -> None:
    known = {}
    for action in parser._actions:
        if action.dest in values:
            raw = values[action.dest]
            known[action.dest] = action.type(raw) if action.type else raw
    unknown = set(values) - set(known) - {"config"}
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    parser.set_defaults(**known)


def _comma_floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _add_common(parser, *, modes=True, gamma=True, variant=True, integrator=True):
    parser.add_argument("--config", help="flat key = value config file; flags override it")
    parser.add_argument("--out-dir", type=str, default=".", help="output directory")
    parser.add_argument(
        "--format",
        type=str,
        default="both",
        choices=("csv", "svg", "both"),
        help="which outputs to write",
    )
    if modes:
        parser.add_argument("--modes", type=int, default=1, help="truncation m")
    if gamma:
        parser.add_argument("--gamma", type=float, default=1.0, help="nonlinearity strength")
    if variant:
        parser.add_argument(
            "--variant",
            type=str,
            default="standard",
            choices=("standard", "stiff"),
            help="torsional stiffness scaling",
        )
    if integrator:
        parser.add_argument("--rel-tol", type=float, default=1e-10)
        parser.add_argument("--abs-tol", type=float, default=1e-12)
        parser.add_argument("--sample-interval", type=float, default=0.01)
        parser.add_argument("--drift-budget", type=float, default=1e-7)


def _spec_from(args) -> ModelSpec:
    variant = TorsionVariant.STIFF if args.variant == "stiff" else TorsionVariant.STANDARD
    return ModelSpec(gamma=args.gamma, modes=args.modes, torsion_variant=variant)


def _integrator_config(args) -> IntegratorConfig:
    return IntegratorConfig(
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
        sample_interval=args.sample_interval,
        energy_drift_budget=args.drift_budget,
    )


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _cmd_simulate(args) -> int:
    spec = _spec_from(args)
    config = _integrator_config(args)
    m = spec.modes
    if args.ic is not None:
        packed = np.asarray(args.ic, dtype=float)
        if packed.size != 4 * m:
            raise ValueError(f"--ic needs {4 * m} values [Y, Ydot, Z, Zdot], got {packed.size}")
        initial = ModalState(0.0, packed[:m], packed[m : 2 * m], packed[2 * m : 3 * m], packed[3 * m :])
    else:
        y0 = np.zeros(m)
        y0[args.mode_index - 1] = args.amplitude
        z0 = np.full(m, args.amplitude * args.seed_scale)
        initial = ModalState(0.0, y0, np.zeros(m), z0, np.zeros(m))
    traj = integrate(build_system(spec), initial, args.horizon, config)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if _wants(args.format, "csv"):
        header = (
            ["t"]
            + [f"y_{j}" for j in range(1, m + 1)]
            + [f"ydot_{j}" for j in range(1, m + 1)]
            + [f"z_{j}" for j in range(1, m + 1)]
            + [f"zdot_{j}" for j in range(1, m + 1)]
            + ["E_total", "E_drift"]
        )
        total = traj.energy_total
        drift = traj.energy_drift
        rows = (
            [traj.times[i], *traj.y[i], *traj.ydot[i], *traj.z[i], *traj.zdot[i], total[i], drift[i]]
            for i in range(len(traj))
        )
        write_csv(out / "trajectory.csv", header, rows)
    if _wants(args.format, "svg"):
        fig, ax = plt.subplots(figsize=(9, 3.2))
        for j in range(1, m + 1):
            ax.plot(traj.times, traj.y[:, j - 1], lw=0.7, label=f"y_{j}")
        for j in range(1, m + 1):
            ax.plot(traj.times, traj.z[:, j - 1], lw=0.7, label=f"z_{j}")
        ax.set_xlabel("t")
        ax.set_ylabel("modal coefficient")
        ax.legend(loc="upper right", fontsize="small", ncol=2)
        fig.tight_layout()
        save_figure(fig, out / "trajectory.svg")
    if traj.status is not TrajectoryStatus.COMPLETED:
        print(f"integration stopped early: {traj.status.value}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"wrote trajectory with {len(traj)} samples to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# threshold
# ---------------------------------------------------------------------------


def _cmd_threshold(args) -> int:
    spec = _spec_from(args)
    config = _integrator_config(args)
    criterion = GrowthCriterion(ratio=args.criterion_ratio, horizon=args.horizon)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    prescan_rows = []
    if args.prescan > 0:
        grid = np.linspace(args.bracket_lo, args.bracket_hi, args.prescan)
        prescan_rows = amplitude_scan(spec, args.mode_index, grid, criterion, args.seed_scale, config)

    result = threshold_bisection(
        spec,
        args.mode_index,
        (args.bracket_lo, args.bracket_hi),
        criterion,
        tol=args.tol,
        seed_scale=args.seed_scale,
        config=config,
    )

    if _wants(args.format, "csv"):
        write_csv(
            out / "threshold_runs.csv",
            ["amplitude", "unstable"],
            sorted(result.runs),
        )
        if prescan_rows:
            write_csv(out / "threshold_prescan.csv", ["amplitude", "unstable", "onset_time"], prescan_rows)
    summary = (
        f"mode k={result.k}, truncation m={result.m}\n"
        f"amplitude bracket: [{result.amplitude_lo!r}, {result.amplitude_hi!r}]\n"
        f"threshold amplitude: {result.amplitude!r}\n"
        f"critical energy: {result.critical_energy!r}\n"
        f"onset time at upper bracket: {result.onset_time!r}\n"
        f"runs: {len(result.runs)}\n"
    )
    (out / "threshold_summary.txt").write_text(summary, encoding="utf-8")
    if _wants(args.format, "svg"):
        fig, ax = plt.subplots(figsize=(6, 3.2))
        amps = [a for a, _ in result.runs]
        flags = [1 if u else 0 for _, u in result.runs]
        ax.scatter(amps, flags, s=18)
        ax.set_xlabel("initial vertical amplitude")
        ax.set_yticks([0, 1], ["stable", "unstable"])
        ax.axvline(result.amplitude, color="k", lw=0.8, ls="--")
        fig.tight_layout()
        save_figure(fig, out / "threshold.svg")
    print(summary, end="")
    return EXIT_OK


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _rational_label(value: float) -> str:
    frac = Fraction(value).limit_denominator(10**6)
    return f"{frac.numerator}/{frac.denominator} ≈ {float(frac):.3f}"


def _cmd_analyze(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    energies = np.linspace(args.e_min, args.e_max, args.e_count)

    rows = []
    for k, m in sorted(hill.SUPPORTED_THRESHOLDS):
        e_bound, amp_bound = hill.theoretical_threshold(k, m)
        e_exact, amp_exact = hill.theoretical_threshold(k, m, exact_period=True)
        rows.append([k, m, _rational_label(e_bound), e_bound, amp_bound, e_exact, amp_exact])
    if _wants(args.format, "csv"):
        write_csv(
            out / "thresholds.csv",
            ["k", "m", "bound_energy", "bound_energy_value", "bound_amplitude",
             "exact_period_energy", "exact_period_amplitude"],
            rows,
        )

    verdict_rows = []
    trace_series: dict[tuple[int, int], list[tuple[float, float]]] = {}
    for k, m in sorted(hill.SUPPORTED_THRESHOLDS):
        for e in energies:
            if e <= 0.0:  # verdicts need a nontrivial vertical mode
                continue
            for i in range(1, m + 1):
                problem = hill.hill_problem(i, k, float(e))
                band = hill.zhukovskii_verdict(problem)
                floq = hill.floquet_verdict(problem)
                verdict_rows.append(
                    [k, m, i, float(e), band.kind.value, band.band, floq.trace,
                     floq.determinant, floq.kind.value]
                )
                if i == k:
                    trace_series.setdefault((k, m), []).append((float(e), floq.trace))
    if _wants(args.format, "csv"):
        write_csv(
            out / "verdicts.csv",
            ["k", "m", "i", "E", "band_verdict", "band", "floquet_trace",
             "floquet_determinant", "floquet_verdict"],
            verdict_rows,
        )

    period_rows = []
    for e in energies:
        for j in (1, 2):
            lo, up = hill.period_bounds(float(e), j)
            period_rows.append([j, float(e), hill.period(float(e), j), lo, up])
    if _wants(args.format, "csv"):
        write_csv(out / "period_curve.csv", ["j", "E", "T", "lower_bound", "upper_bound"], period_rows)

    if _wants(args.format, "svg"):
        fig, ax = plt.subplots(figsize=(6, 3.2))
        for j, style in ((1, "-"), (2, "--")):
            ax.plot(energies, [hill.period(float(e), j) for e in energies], style, label=f"T_{j}(E)")
        ax.set_xlabel("E")
        ax.set_ylabel("period")
        ax.legend()
        fig.tight_layout()
        save_figure(fig, out / "period_curve.svg")

        fig, ax = plt.subplots(figsize=(6, 3.2))
        for (k, m), series in sorted(trace_series.items()):
            es, trs = zip(*series)
            ax.plot(es, trs, label=f"k={k}, m={m}")
        ax.axhline(2.0, color="k", lw=0.8, ls="--")
        ax.axhline(-2.0, color="k", lw=0.8, ls="--")
        ax.set_xlabel("E")
        ax.set_ylabel("monodromy trace")
        ax.legend(fontsize="small")
        fig.tight_layout()
        save_figure(fig, out / "floquet_trace.svg")

    print(f"wrote analysis tables for E in [{args.e_min}, {args.e_max}] to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


def _cmd_tables(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    mode_rows = []
    for omega in args.omegas:
        for e in args.energies:
            m = negligibility.min_negligible_mode(Fraction(str(e)), Fraction(str(omega)))
            mode_rows.append([omega, e, m, 6.0 * e / omega**2 - 2.0])
    energy_rows = [
        [omega, negligibility.max_negligible_energy(omega)] for omega in args.energy_omegas
    ]
    if _wants(args.format, "csv"):
        write_csv(out / "mode_bounds.csv", ["omega", "E", "min_mode", "linear_approximation"], mode_rows)
        write_csv(out / "energy_bounds.csv", ["omega", "max_energy"], energy_rows)
    if _wants(args.format, "svg"):
        fig, ax = plt.subplots(figsize=(6, 3.2))
        for omega in args.omegas:
            es = [row[1] for row in mode_rows if row[0] == omega]
            ms = [row[2] for row in mode_rows if row[0] == omega]
            ax.plot(es, ms, "o-", label=f"omega={omega}")
        ax.set_xlabel("E")
        ax.set_ylabel("smallest negligible-tail mode")
        ax.legend()
        fig.tight_layout()
        save_figure(fig, out / "mode_bounds.svg")
    print(f"wrote negligibility tables to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# signchange
# ---------------------------------------------------------------------------


def _cmd_signchange(args) -> int:
    spec = ModelSpec(gamma=args.gamma, modes=1, torsion_variant=TorsionVariant.STIFF)
    config = _integrator_config(args)
    rng = np.random.default_rng(args.seed)
    states = []
    while len(states) < args.runs:
        raw = rng.uniform(-args.scale, args.scale, 4)
        if abs(raw[2]) + abs(raw[3]) < 1e-6:
            continue
        states.append(ModalState(0.0, raw[:1], raw[1:2], raw[2:3], raw[3:4]))
    report = sign_change_census(spec, states, horizon=args.horizon, config=config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [
        [i, len(counts), min(counts) if counts else 0, sum(counts)]
        for i, counts in enumerate(report.interval_counts)
    ]
    if _wants(args.format, "csv"):
        write_csv(out / "signchange.csv", ["run", "intervals", "min_zeros", "total_zeros"], rows)
    print(
        f"runs={args.runs} intervals={report.total_intervals} "
        f"min zeros per interval={report.min_count}"
    )
    return EXIT_OK if report.min_count >= 1 else EXIT_NUMERICAL


# ---------------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------------


def _cmd_scaling(args) -> int:
    m = args.modes
    y0 = np.zeros(m)
    y0[0] = args.amplitude
    z0 = np.full(m, args.amplitude * args.seed_scale)
    initial = ModalState(0.0, y0, np.zeros(m), z0, np.zeros(m))
    report = scaling_experiment(
        args.gamma, initial, horizon=args.horizon, config=_integrator_config(args)
    )
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if _wants(args.format, "csv"):
        write_csv(
            out / "scaling.csv",
            ["gamma", "energy_gamma", "energy_unit", "energy_identity_error",
             "amplitude_gamma", "amplitude_unit", "amplitude_identity_error"],
            [[report.gamma, report.energy_gamma, report.energy_unit,
              report.energy_identity_error, report.amplitude_gamma,
              report.amplitude_unit, report.amplitude_identity_error]],
        )
    print(
        f"gamma={report.gamma}: gamma*E_gamma={report.gamma * report.energy_gamma!r} "
        f"E_1={report.energy_unit!r} amplitude error={report.amplitude_identity_error:.3e}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# trigerror
# ---------------------------------------------------------------------------


def _cmd_trigerror(args) -> int:
    rows = [
        [row.function, row.epsilon, row.order, row.relative_error]
        for row in trig_error_report()
    ]
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if _wants(args.format, "csv"):
        write_csv(out / "trig_errors.csv", ["function", "epsilon", "order", "relative_error"], rows)
    for row in rows:
        print(f"{row[0]}(eps={row[1]:.6f}, order {row[2]}): {row[3]:.3g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fishbone",
        description="Modal dynamics and torsional stability of a fish-bone bridge deck",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one configuration and dump the trajectory")
    _add_common(p)
    p.add_argument("--mode-index", type=int, default=1, help="excited vertical mode k")
    p.add_argument("--amplitude", type=float, default=1.0, help="initial vertical amplitude")
    p.add_argument("--seed-scale", type=float, default=1e-4, help="torsional seed / amplitude")
    p.add_argument("--horizon", type=float, default=200.0)
    p.add_argument("--ic", type=_comma_floats, default=None,
                   help="raw initial state, 4m comma-separated values [Y,Ydot,Z,Zdot]")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("threshold", help="bisect the instability-onset amplitude")
    _add_common(p)
    p.add_argument("--mode-index", type=int, default=1)
    p.add_argument("--bracket-lo", type=float, default=1.4)
    p.add_argument("--bracket-hi", type=float, default=1.6)
    p.add_argument("--tol", type=float, default=0.005, help="bisection width")
    p.add_argument("--criterion-ratio", type=float, default=100.0)
    p.add_argument("--horizon", type=float, default=200.0)
    p.add_argument("--seed-scale", type=float, default=1e-4)
    p.add_argument("--prescan", type=int, default=0,
                   help="optional verdict grid size across the bracket")
    p.set_defaults(func=_cmd_threshold)

    p = sub.add_parser("analyze", help="stability thresholds, verdict grids, period curve")
    _add_common(p, modes=False, gamma=False, variant=False, integrator=False)
    p.add_argument("--e-min", type=float, default=0.1)
    p.add_argument("--e-max", type=float, default=8.0)
    p.add_argument("--e-count", type=int, default=25)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("tables", help="high-mode negligibility tables")
    _add_common(p, modes=False, gamma=False, variant=False, integrator=False)
    p.add_argument("--omegas", type=_comma_floats, default=DEFAULT_TABLE_OMEGAS)
    p.add_argument("--energies", type=_comma_floats, default=DEFAULT_TABLE_ENERGIES)
    p.add_argument("--energy-omegas", type=_comma_floats, default=DEFAULT_ENERGY_TABLE_OMEGAS)
    p.set_defaults(func=_cmd_tables)

    p = sub.add_parser("signchange", help="torsional sign-change census (stiff variant)")
    _add_common(p, modes=False, variant=False)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--horizon", type=float, default=100.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0, help="uniform range of random data")
    p.set_defaults(func=_cmd_signchange)

    p = sub.add_parser("scaling", help="nonlinearity-strength scaling check")
    _add_common(p, variant=False)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--seed-scale", type=float, default=1e-4)
    p.add_argument("--horizon", type=float, default=100.0)
    p.set_defaults(func=_cmd_scaling)

    p = sub.add_parser("trigerror", help="small-angle approximation error table")
    _add_common(p, modes=False, gamma=False, variant=False, integrator=False)
    p.set_defaults(func=_cmd_trigerror)

    return parser


def _parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    # first pass only to locate --config for the chosen subcommand
    probe, _ = parser.parse_known_args(argv)
    if getattr(probe, "config", None):
        values = _load_config_file(probe.config)
        for action in parser._subparsers._group_actions:
            sub = action.choices.get(probe.command)
            if sub is not None:
                _apply_config_defaults(sub, values)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _parse_args(argv)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return args.func(args)
    except (BracketError, IntegrationError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
