"""Command-line interface: run simulations and estimators from flags and CSV
files, emitting machine-readable results.

Exit codes: 0 success, 2 validation or malformed input, 3 estimator domain
errors, 1 I/O failures. All randomness flows from --seed (required; never the
wall clock), so any command rerun with the same seed writes identical bytes.

File formats (all headered CSV unless noted):
  trajectory  t,S,I,R
  summary     replicate,final_size,took_off,extinction_time
  incidence   time,cases
  final-size  n,s,r_tilde_s[,pi_hat]   (single record)
  durations   one duration per line, no header
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import estimators, simulate, theory
from .core import EpidemicParams, EstimateWithSE, FinalSizeData, ValidationError
from .distributions import (ConstantPeriod, ExponentialPeriod, GammaPeriod,
                            GenerationTimeFromPeriod)
from .estimators import EstimationError, IncidenceSeries, TemporalData


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _period_from_args(args) -> object:
    given = [name for name, flag in
             (("gamma", args.gamma), ("iota", args.iota), ("shape", args.shape))
             if flag is not None]
    if args.gamma is not None and args.shape is None and args.iota is None:
        return ExponentialPeriod(args.gamma)
    if args.iota is not None and args.gamma is None and args.shape is None:
        return ConstantPeriod(args.iota)
    if args.shape is not None and args.rate is not None and args.gamma is None and args.iota is None:
        return GammaPeriod(args.shape, args.rate)
    raise CliError(2, f"specify exactly one infectious-period law: --gamma RATE, "
                      f"--iota LENGTH, or --shape K --rate B (got {given or 'none'})")


def _add_period_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma", type=float, help="exponential infectious-period rate")
    p.add_argument("--iota", type=float, help="constant infectious-period length")
    p.add_argument("--shape", type=float, help="gamma infectious-period shape")
    p.add_argument("--rate", type=float, help="gamma infectious-period rate")


def _print_estimate(est, as_json: bool, label: str | None = None) -> None:
    if as_json:
        print(json.dumps(est.to_dict()))
        return
    prefix = f"{label}: " if label else ""
    if est.se is None:
        print(f"{prefix}{_fmt(est.estimate)} se=n/a ci95=n/a method={est.method}")
    else:
        lo, hi = est.ci95
        print(f"{prefix}{_fmt(est.estimate)} se={_fmt(est.se)} "
              f"ci95=({_fmt(lo)}, {_fmt(hi)}) method={est.method}")


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("EPIKIT_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------- simulate

def _write_trajectory(path: str, traj) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "S", "I", "R"])
        for t, s, i, r in zip(traj.t, traj.s, traj.i, traj.r):
            w.writerow([repr(float(t)), int(s), int(i), int(r)])


def _traj_path(out_dir: str, k: int) -> str:
    return os.path.join(out_dir, f"replicate_{k:04d}.csv")


def cmd_simulate(args) -> int:
    if args.model in ("markov", "general", "endemic"):
        if args.n is None or args.beta is None:
            raise CliError(2, "--n and --beta are required")
        if args.model == "general":
            period = _period_from_args(args)
        else:
            if args.gamma is None:
                raise CliError(2, f"--gamma is required for the {args.model} model")
            period = ExponentialPeriod(args.gamma)
        params = EpidemicParams(
            n=args.n, beta=args.beta, infectious_period=period,
            initial_infectives=args.i0, immune_fraction=args.immune,
            death_rate=args.mu, seed=args.seed,
        )
    os.makedirs(args.out_dir, exist_ok=True)
    workers = _workers()

    if args.model == "reed-frost":
        if args.n is None or args.p is None:
            raise CliError(2, "--n and --p are required for reed-frost")
        s0 = args.n - args.i0
        if s0 < 0:
            raise CliError(2, "initial infectives exceed n")
        rows = []
        for k in range(args.replicates):
            chain = simulate.simulate_reed_frost(s0, args.i0, args.p, args.seed, replicate=k)
            if not args.summary_only:
                with open(_traj_path(args.out_dir, k), "w", newline="") as fh:
                    w = csv.writer(fh)
                    w.writerow(["t", "S", "I", "R"])
                    for st in chain:
                        w.writerow([st.generation, st.susceptible, st.infected,
                                    args.n - st.susceptible - st.infected])
            final = s0 - chain[-1].susceptible
            rows.append((k, final, final > simulate.take_off_threshold(args.n),
                         float(chain[-1].generation)))
        _write_summary(args.out_dir, rows)
        return 0

    if args.model == "endemic":
        if args.horizon is None:
            raise CliError(2, "--horizon is required for the endemic model")
        if args.summary_only:
            raise CliError(2, "endemic runs emit trajectories only")

        def run_endemic(k: int) -> None:
            traj = simulate.simulate_endemic(params, args.horizon, grid_dt=args.grid_dt,
                                             start=args.start, replicate=k)
            _write_trajectory(_traj_path(args.out_dir, k), traj)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(run_endemic, range(args.replicates)))
        else:
            for k in range(args.replicates):
                run_endemic(k)
        return 0

    # closed-population models: markov (rate-based) / general (event-driven)
    engine = simulate.simulate_sir_gillespie if args.model == "markov" else simulate.simulate_sir
    record = "none" if args.summary_only else args.record

    def run_closed(k: int):
        res = engine(params, record=record, grid_dt=args.grid_dt,
                     horizon=args.horizon, replicate=k)
        if res.trajectory is not None and not args.summary_only:
            _write_trajectory(_traj_path(args.out_dir, k), res.trajectory)
        return (k, res.final_size, res.took_off, res.extinction_time)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_closed, range(args.replicates)))
    else:
        rows = [run_closed(k) for k in range(args.replicates)]
    _write_summary(args.out_dir, rows)
    return 0


def _write_summary(out_dir: str, rows) -> None:
    with open(os.path.join(out_dir, "summary.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["replicate", "final_size", "took_off", "extinction_time"])
        for k, final, took, ext in rows:
            w.writerow([k, final, "true" if took else "false", repr(float(ext))])


# ------------------------------------------------------------------ theory

def cmd_theory(args) -> int:
    if args.query == "final-size":
        value = theory.solve_final_size(args.r0, args.s)
        print(json.dumps({"value": value}) if args.json else _fmt(value))
    elif args.query == "vc":
        value = theory.critical_vaccination(args.r0)
        print(json.dumps({"value": value}) if args.json else _fmt(value))
    elif args.query == "extinction":
        # population size does not enter the branching computation
        params = EpidemicParams(n=args.i0 + 10, beta=args.beta,
                                infectious_period=_period_from_args(args),
                                initial_infectives=args.i0, seed=0)
        value = theory.extinction_probability(params)
        print(json.dumps({"value": value}) if args.json else _fmt(value))
    elif args.query == "growth-rate":
        params = EpidemicParams(n=10, beta=args.beta, infectious_period=_period_from_args(args),
                                seed=0)
        value = theory.malthusian_rate(params)
        print(json.dumps({"value": value}) if args.json else _fmt(value))
    elif args.query == "endemic-level":
        s, i, r = theory.endemic_level(args.beta, args.gamma, args.mu)
        if args.json:
            print(json.dumps({"s": s, "i": i, "r": r}))
        else:
            print(f"{_fmt(s)} {_fmt(i)} {_fmt(r)}")
    elif args.query == "lotka":
        g = GenerationTimeFromPeriod(_period_from_args(args))
        value = theory.lotka_r0(args.rho, g)
        print(json.dumps({"value": value}) if args.json else _fmt(value))
    else:  # pragma: no cover - argparse restricts choices
        raise CliError(2, f"unknown theory query {args.query!r}")
    return 0


# ---------------------------------------------------------------- estimate

def _read_csv_rows(path: str, expected: list[str], optional: list[str] | None = None):
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise CliError(2, f"{path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        rows = []
        header = None
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if header is None:
                header = [c.strip() for c in row]
                want = expected
                if optional and header == expected + optional:
                    want = header
                if header != want:
                    raise CliError(2, f"{path}:{lineno}: expected header "
                                      f"{','.join(expected)} (got {','.join(header)})")
                continue
            if len(row) != len(header):
                raise CliError(2, f"{path}:{lineno}: expected {len(header)} fields, "
                                  f"got {len(row)}")
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise CliError(2, f"{path}:{lineno}: {exc}") from exc
    if header is None:
        raise CliError(2, f"{path}: empty file")
    return rows


def _read_final_size(path: str) -> FinalSizeData:
    rows = _read_csv_rows(path, ["n", "s", "r_tilde_s"], optional=["pi_hat"])
    if len(rows) != 1:
        raise CliError(2, f"{path}: final-size file must hold exactly one record")
    row = rows[0]
    pi_hat = row[3] if len(row) == 4 else None
    try:
        return FinalSizeData(n=int(row[0]), s=row[1], r_tilde_s=row[2],
                             reporting_fraction=pi_hat)
    except ValueError as exc:
        raise CliError(2, f"{path}: {exc}") from exc


def _read_incidence(path: str) -> IncidenceSeries:
    rows = _read_csv_rows(path, ["time", "cases"])
    arr = np.asarray(rows)
    try:
        return IncidenceSeries(arr[:, 0], arr[:, 1])
    except ValueError as exc:
        raise CliError(2, f"{path}: {exc}") from exc


def _read_temporal(traj_path: str, durations_path: str) -> TemporalData:
    rows = _read_csv_rows(traj_path, ["t", "S", "I", "R"])
    arr = np.asarray(rows)
    n = int(round(arr[0, 1] + arr[0, 2] + arr[0, 3]))
    periods = []
    try:
        with open(durations_path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    periods.append(float(line))
                except ValueError as exc:
                    raise CliError(2, f"{durations_path}:{lineno}: {exc}") from exc
    except OSError as exc:
        raise CliError(2, f"{durations_path}: {exc}") from exc
    try:
        return TemporalData(arr[:, 0], arr[:, 1] / n, arr[:, 2] / n,
                            np.asarray(periods), n)
    except ValueError as exc:
        raise CliError(2, f"{traj_path}: {exc}") from exc


def cmd_estimate(args) -> int:
    window = None
    if getattr(args, "t_min", None) is not None or getattr(args, "t_max", None) is not None:
        window = (args.t_min if args.t_min is not None else -math.inf,
                  args.t_max if args.t_max is not None else math.inf)
    if args.what == "final-size":
        est = estimators.estimate_r0_final_size(_read_final_size(args.file), cv=args.cv)
        _print_estimate(est, args.json)
    elif args.what == "vc":
        est = estimators.estimate_vc_final_size(_read_final_size(args.file), cv=args.cv)
        _print_estimate(est, args.json)
    elif args.what == "growth-rate":
        est = estimators.estimate_growth_rate(_read_incidence(args.file), window)
        _print_estimate(est, args.json)
    elif args.what == "emerging":
        g = GenerationTimeFromPeriod(_period_from_args(args))
        est = estimators.estimate_r0_emerging(_read_incidence(args.file), g, window)
        _print_estimate(est, args.json)
    elif args.what == "endemic":
        est = estimators.estimate_r0_endemic(args.age, args.lifespan)
        _print_estimate(est, args.json)
    elif args.what == "vc-endemic":
        est = estimators.estimate_vc_endemic(args.age, args.lifespan)
        _print_estimate(est, args.json)
    elif args.what == "temporal":
        data = _read_temporal(args.trajectory, args.durations)
        beta = estimators.estimate_beta(data)
        period = estimators.estimate_infectious_period(data)
        r0_est = beta.estimate * period.estimate
        # product se by the delta method, treating the two as independent
        r0_se = math.sqrt((period.estimate * beta.se) ** 2 + (beta.estimate * period.se) ** 2)
        r0 = EstimateWithSE(r0_est, r0_se, method="rate times mean period (delta-method se)")
        if args.json:
            print(json.dumps({"beta": beta.to_dict(),
                              "infectious_period": period.to_dict(),
                              "r0": r0.to_dict()}))
        else:
            _print_estimate(beta, False, "beta")
            _print_estimate(period, False, "infectious_period")
            _print_estimate(r0, False, "r0")
    else:  # pragma: no cover
        raise CliError(2, f"unknown estimate target {args.what!r}")
    return 0


# -------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="epikit",
                                  description="stochastic epidemic simulation and inference")
    sub = top.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run stochastic replicates")
    sim.add_argument("--model", required=True,
                     choices=["markov", "general", "reed-frost", "endemic"])
    sim.add_argument("--n", type=int)
    sim.add_argument("--beta", type=float)
    _add_period_flags(sim)
    sim.add_argument("--i0", type=int, default=1)
    sim.add_argument("--immune", type=float, default=0.0)
    sim.add_argument("--mu", type=float, default=0.0)
    sim.add_argument("--p", type=float, help="reed-frost per-pair transmission probability")
    sim.add_argument("--horizon", type=float)
    sim.add_argument("--replicates", type=int, default=1)
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--out-dir", default=".")
    sim.add_argument("--summary-only", action="store_true")
    sim.add_argument("--record", default="auto", choices=["auto", "events", "grid"])
    sim.add_argument("--grid-dt", type=float, default=0.1)
    sim.add_argument("--start", default="auto", choices=["auto", "endemic", "index"],
                     help="endemic initial condition")
    sim.set_defaults(func=cmd_simulate)

    th = sub.add_parser("theory", help="asymptotic quantities")
    th.add_argument("query", choices=["final-size", "extinction", "growth-rate",
                                      "endemic-level", "vc", "lotka"])
    th.add_argument("--r0", type=float)
    th.add_argument("--s", type=float, default=1.0)
    th.add_argument("--beta", type=float)
    th.add_argument("--mu", type=float)
    th.add_argument("--rho", type=float)
    th.add_argument("--i0", type=int, default=1)
    _add_period_flags(th)
    th.add_argument("--json", action="store_true")
    th.set_defaults(func=cmd_theory)

    est = sub.add_parser("estimate", help="estimators on observed data")
    est_sub = est.add_subparsers(dest="what", required=True)

    fs = est_sub.add_parser("final-size")
    fs.add_argument("file")
    fs.add_argument("--cv", type=float, default=1.0)
    vc = est_sub.add_parser("vc")
    vc.add_argument("file")
    vc.add_argument("--cv", type=float, default=1.0)
    gr = est_sub.add_parser("growth-rate")
    gr.add_argument("file")
    gr.add_argument("--t-min", type=float)
    gr.add_argument("--t-max", type=float)
    em = est_sub.add_parser("emerging")
    em.add_argument("file")
    em.add_argument("--t-min", type=float)
    em.add_argument("--t-max", type=float)
    _add_period_flags(em)
    en = est_sub.add_parser("endemic")
    en.add_argument("--age", type=float, required=True)
    en.add_argument("--lifespan", type=float, required=True)
    vce = est_sub.add_parser("vc-endemic")
    vce.add_argument("--age", type=float, required=True)
    vce.add_argument("--lifespan", type=float, required=True)
    tp = est_sub.add_parser("temporal")
    tp.add_argument("trajectory")
    tp.add_argument("durations")
    for p in (fs, vc, gr, em, en, vce, tp):
        p.add_argument("--json", action="store_true")
    est.set_defaults(func=cmd_estimate)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValidationError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return 2
    except EstimationError as exc:
        print(f"estimation error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
