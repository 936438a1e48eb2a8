"""Command-line entry point: ``ignis <subcommand> [flags]``.

Exit codes: 0 success (including infeasible moment fits, which are data
outcomes), 2 usage or data errors, 3 internal pipeline failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import fields
from pathlib import Path

import numpy as np

from ignis.bootstrap import BootstrapConfig, bootstrap_se
from ignis.copula import sample_n, sample_uv
from ignis.errors import DegenerateDerivative, IgnisError
from ignis.families import CopulaFamily, random_source
from ignis.features import feature_vector, kendall_tau
from ignis.ingest import TRANSFORMS, apply_transform, load_bivariate_csv, monthly_aggregate, to_pseudo
from ignis.network import TrainConfig, load_model, predict_features, save_model
from ignis.pipeline import GenConfig, build_training_set, run_simulation_study, train_model
from ignis.report import write_report
from ignis.tau import a1_boxed_forms, mom_estimate, mom_se, tau_quadrature, theoretical_tau

log = logging.getLogger("ignis")

EXIT_DATA = 2
EXIT_PIPELINE = 3


class DataError(Exception):
    """Bad user input detected after argument parsing (exit 2)."""


class StageError(Exception):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {type(cause).__name__}: {cause}")
        self.stage = stage


def _family(text: str) -> CopulaFamily:
    try:
        return CopulaFamily.parse(text)
    except IgnisError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _cols(text: str) -> list[str]:
    cols = [c.strip() for c in text.split(",") if c.strip()]
    if not 1 <= len(cols) <= 2:
        raise argparse.ArgumentTypeError("--cols takes one or two comma-separated column names")
    return cols


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.10g}"


def _print_features(f) -> None:
    print("tau,rho,tail,pearson")
    print(",".join(f"{v:.10g}" for v in f.as_array()))


def _load_config(cls, path: str | None, **overrides):
    data = {}
    if path:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read config {path}: {exc}") from None
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise DataError(f"unknown keys in {path}: {sorted(unknown)}")
    data.update({k: v for k, v in overrides.items() if v is not None})
    if cls is GenConfig and "families" in data:
        data["families"] = tuple(data["families"])
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise DataError(f"invalid {cls.__name__}: {exc}") from None


def _read_pairs(args) -> tuple[np.ndarray, np.ndarray]:
    """Load, transform and rank-transform the data named by --data/--cols."""
    cols = args.cols
    if args.monthly:
        if not args.time:
            raise DataError("--monthly requires --time")
        series = load_bivariate_csv(args.data, cols[0], cols[0], args.time)
        series = monthly_aggregate(series.timestamps, series.x).as_series()
    else:
        if len(cols) != 2:
            raise DataError("--cols needs two column names unless --monthly is given")
        series = load_bivariate_csv(args.data, cols[0], cols[1], args.time)
    if series.dropped_count:
        log.warning("dropped %d unparseable rows", series.dropped_count)
    series = apply_transform(series, args.transform)
    return to_pseudo(series)


def cmd_simulate(args) -> int:
    s = sample_n(args.family, args.theta, args.n, args.seed)
    if args.out:
        s.to_csv(args.out)
    _print_features(feature_vector(s.u, s.v))
    return 0


def cmd_features(args) -> int:
    u, v = _read_pairs(args)
    _print_features(feature_vector(u, v))
    return 0


def cmd_train(args) -> int:
    gen = _load_config(GenConfig, args.gen_config, seed=args.seed)
    tcfg = _load_config(TrainConfig, args.train_config, seed=args.seed)
    try:
        t0 = time.time()
        ts = build_training_set(gen)
        log.info("generated %d rows in %.1fs", len(ts), time.time() - t0)
    except Exception as exc:  # noqa: BLE001 - reported with stage name
        raise StageError("generate", exc) from exc
    if args.training_set_out:
        ts.to_csv(args.training_set_out)
    try:
        model, history = train_model(ts, tcfg)
    except Exception as exc:  # noqa: BLE001
        raise StageError("train", exc) from exc
    try:
        save_model(model, args.model_out)
        hist_path = args.history_out or str(Path(args.model_out).with_suffix(".history.csv"))
        history.to_csv(hist_path)
    except Exception as exc:  # noqa: BLE001
        raise StageError("write", exc) from exc
    print(f"final_val_loss,{model.final_val_loss:.10g}")
    print(f"epochs_trained,{model.epochs_trained}")
    return 0


def cmd_estimate(args) -> int:
    try:
        model = load_model(args.model)
    except OSError as exc:
        raise DataError(f"cannot read model {args.model}: {exc.strerror or exc}") from None
    u, v = _read_pairs(args)
    if args.bootstrap and args.bootstrap > 0:
        theta_hat, se = bootstrap_se(u, v, args.family, model, BootstrapConfig(args.bootstrap, args.seed))
    else:
        theta_hat, se = float(predict_features(model, feature_vector(u, v).as_array(), args.family)[0]), None
    if args.family is CopulaFamily.FRANK and abs(theta_hat) < 0.1:
        print(f"warning: frank estimate |theta_hat| = {abs(theta_hat):.4g} < 0.1 (near the excluded point 0)",
              file=sys.stderr)
    print("family,theta_hat,se,n,method")
    print(f"{args.family.value},{_fmt(theta_hat)},{_fmt(se)},{u.size},ignis")
    return 0


def cmd_mom(args) -> int:
    if args.data:
        if args.cols is None:
            raise DataError("--data requires --cols")
        u, v = _read_pairs(args)
    else:
        if args.theta is None:
            raise DataError("mom needs either --data or --theta (with --n and --seed)")
        u, v = sample_uv(args.family, args.theta, args.n, random_source(args.seed))
    res = mom_estimate(args.family, kendall_tau(u, v))
    print("family,theta_hat,se,feasible")
    if not res.feasible:
        print(f"{args.family.value},,,false")
        return 0
    for root in res.roots:
        try:
            se = mom_se(args.family, u, v, root)
        except DegenerateDerivative:
            se = None
        print(f"{args.family.value},{_fmt(root)},{_fmt(se)},true")
    return 0


def _parse_curve(text: str) -> np.ndarray:
    try:
        a, b, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise DataError("--curve expects start:stop:step") from None
    if step <= 0 or b < a:
        raise DataError("--curve needs start <= stop and step > 0")
    k = int(math.floor((b - a) / step + 1e-9))
    return a + step * np.arange(k + 1)


def cmd_tau(args) -> int:
    fam = args.family
    if args.curve:
        print("theta,tau_closed,tau_quadrature")
        for th in _parse_curve(args.curve):
            print(f"{th:.10g},{theoretical_tau(fam, th):.12g},{tau_quadrature(fam, th):.12g}")
        return 0
    if args.theta is None:
        raise DataError("tau needs --theta or --curve")
    closed = theoretical_tau(fam, args.theta)
    quad = tau_quadrature(fam, args.theta)
    print("tau_closed,tau_quadrature,diff")
    print(f"{closed:.12g},{quad:.12g},{abs(closed - quad):.3g}")
    if fam is CopulaFamily.A1:
        f1, f2 = a1_boxed_forms(args.theta)
        print(f"# alternative printed forms: {f1:.12g}, {f2:.12g}", file=sys.stderr)
    return 0


SCALES = {
    "desk": dict(gen=dict(thetas_per_family=200, obs_per_theta=2000), test_n=10_000, mom_n=20_000, boot=200),
    "paper": dict(gen=dict(thetas_per_family=500, obs_per_theta=10_000), test_n=10_000, mom_n=100_000, boot=200),
}


def cmd_reproduce(args) -> int:
    scale = SCALES[args.scale]
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    boot = args.bootstrap if args.bootstrap is not None else scale["boot"]
    stage = "generate"
    try:
        t0 = time.time()
        ts = build_training_set(GenConfig(seed=args.seed, **scale["gen"]))
        stage = "train"
        model, history = train_model(ts, TrainConfig(seed=args.seed))
        save_model(model, out / "model.ignis")
        history.to_csv(out / "history.csv")
        stage = "study"
        table = run_simulation_study(
            model, n=scale["test_n"], seed=args.seed, mom_n=scale["mom_n"],
            bootstrap=BootstrapConfig(boot, args.seed) if boot >= 2 else None,
        )
        stage = "report"
        table.to_csv(out / "table2.csv", method="mom")
        table.to_csv(out / "table3.csv", method="ignis")
        write_report(table, out / "report.md", scale=args.scale, seed=args.seed, elapsed=time.time() - t0,
                     final_val_loss=model.final_val_loss)
    except IgnisError as exc:
        raise StageError(stage, exc) from exc
    except Exception as exc:  # noqa: BLE001
        raise StageError(stage, exc) from exc
    print(f"wrote {out / 'table2.csv'}, {out / 'table3.csv'}, {out / 'report.md'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ignis", description="Neural and moment estimation of Archimedean copula parameters.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def data_flags(sp, required: bool):
        sp.add_argument("--data", required=required, help="CSV file with a header row")
        sp.add_argument("--cols", type=_cols, required=required, help="x,y column names")
        sp.add_argument("--time", help="optional ISO-8601 time column; rows are sorted by it")
        sp.add_argument("--transform", choices=TRANSFORMS, default="none")
        sp.add_argument("--monthly", action="store_true",
                        help="aggregate the first column by month into (mean, 99th percentile)")

    sp = sub.add_parser("simulate", help="draw pairs from a copula and print their features")
    sp.add_argument("--family", type=_family, required=True)
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--n", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("features", help="features of real data after PIT")
    data_flags(sp, True)
    sp.set_defaults(func=cmd_features)

    sp = sub.add_parser("train", help="generate a training set and fit the network")
    sp.add_argument("--gen-config")
    sp.add_argument("--train-config")
    sp.add_argument("--model-out", required=True)
    sp.add_argument("--history-out")
    sp.add_argument("--training-set-out")
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("estimate", help="estimate theta for real data with a trained model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--family", type=_family, required=True)
    sp.add_argument("--bootstrap", type=int, default=0, metavar="B")
    sp.add_argument("--seed", type=int, default=0)
    data_flags(sp, True)
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("mom", help="method-of-moments estimate from Kendall's tau")
    sp.add_argument("--family", type=_family, required=True)
    sp.add_argument("--theta", type=float, help="simulate instead of reading --data")
    sp.add_argument("--n", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    data_flags(sp, False)
    sp.set_defaults(func=cmd_mom)

    sp = sub.add_parser("tau", help="closed-form and quadrature Kendall's tau")
    sp.add_argument("--family", type=_family, required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--theta", type=float)
    g.add_argument("--curve", metavar="START:STOP:STEP")
    sp.set_defaults(func=cmd_tau)

    sp = sub.add_parser("reproduce", help="train, run the simulation study, write tables and a report")
    sp.add_argument("--scale", choices=sorted(SCALES), default="desk")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--outdir", required=True)
    sp.add_argument("--bootstrap", type=int, metavar="B", help="override the bootstrap replicate count")
    sp.set_defaults(func=cmd_reproduce)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except (IgnisError, DataError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

