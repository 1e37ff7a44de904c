"""Command-line entry points.

Subcommands: train, envelope, cgl, verify, count-ce, benchmark. Every command
is driven by a JSON config document (sections "data", "grid", "solver",
"cgl", "seed") plus a handful of flags; all randomness flows from the config
seed, and time columns are written as 0.0 unless --timing is passed, so rerun
outputs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .benchmark import (
    cgl_config,
    load_reflected,
    load_run_config,
    prepare_data,
    raw_mse,
    run_benchmark,
    solver_config_from_json,
    train_fold_models,
    write_grid_report,
)
from .cgl import CglIteration, cgl_train, select_best, write_cgl_history
from .data import make_folds
from .envelope import LOWER, UPPER, count_counterexamples, predict
from .errors import InvalidInputError
from .network import (
    INCREASING,
    REGRESSION,
    MonotoneFeature,
    MonotoneSpec,
    forward,
    load_network,
    save_network,
)
from .solver import MODE_MAXIMAL, find_pair_counterexample
from .training import (
    METRIC_ACCURACY,
    dataset_loss,
    evaluate,
    write_training_log,
)


def _read_config_doc(path) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise InvalidInputError("config document must be a JSON object")
    return doc


def _data_from_doc(doc: dict, config_path):
    """Load the config's data section into model space, or return None."""
    data = doc.get("data")
    if data is None:
        return None
    base = Path(config_path).parent
    paths = []
    for key in ("csv", "schema"):
        if key not in data:
            raise InvalidInputError(f"config data section is missing {key!r}")
        p = Path(data[key])
        paths.append(p if p.is_absolute() else base / p)
    return load_reflected(paths[0], paths[1], data.get("output_kind", REGRESSION))


def _resolve_spec(args, doc: dict, net) -> MonotoneSpec:
    if args.feature:
        spec = MonotoneSpec(
            tuple(MonotoneFeature(int(i), INCREASING) for i in sorted(set(args.feature)))
        )
    elif doc.get("data") is not None:
        spec = _data_from_doc(doc, args.config)[3]
    else:
        raise InvalidInputError("no monotone features: pass --feature or a config with a data section")
    if not spec.features:
        raise InvalidInputError("the schema declares no monotone features; pass --feature")
    spec.validate_for_dim(net.input_dim)
    return spec


def _read_points_csv(path, dim: int) -> np.ndarray:
    """Numeric CSV of points in model input space; a header row is skipped."""
    rows = []
    with open(path, newline="") as fh:
        for cells in csv.reader(fh):
            if not cells:
                continue
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                if rows:
                    raise InvalidInputError(f"{path}: non-numeric cell past the header")
    points = np.asarray(rows, dtype=float)
    if points.ndim != 2 or points.shape[0] == 0 or points.shape[1] != dim:
        raise InvalidInputError(f"{path}: expected rows of {dim} numeric columns")
    return points


def _resolve_points(args, doc: dict, net) -> np.ndarray:
    if args.points:
        return _read_points_csv(args.points, net.input_dim)
    bundle = _data_from_doc(doc, args.config) if args.config else None
    if bundle is None:
        raise InvalidInputError("no points: pass --points or a config with a data section")
    return bundle[1].inputs


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_train(args) -> int:
    run = load_run_config(args.config)
    out = _out_dir(args)
    timing = run.timing or args.timing
    prep = prepare_data(run)
    models, histories, best_cfg, rows = train_fold_models(run, prep)
    write_grid_report(out / "grid_report.csv", rows)
    regression = run.output_kind == REGRESSION
    metric_rows = []
    for k, ((train_idx, test_idx), net, hist) in enumerate(zip(prep.folds, models, histories)):
        save_network(net, out / f"nn_b_fold{k}.json")
        write_training_log(out / f"train_log_fold{k}.csv", hist, include_times=timing)
        train_set = prep.dataset.subset(train_idx)
        test_set = prep.dataset.subset(test_idx)
        if regression:
            metric_rows.append(
                [k, repr(raw_mse(net, train_set, prep)), repr(raw_mse(net, test_set, prep))]
            )
        else:
            metric_rows.append(
                [k, repr(evaluate(net, train_set, METRIC_ACCURACY)),
                 repr(evaluate(net, test_set, METRIC_ACCURACY))]
            )
    header = ["fold", "train_mse", "test_mse"] if regression else ["fold", "train_accuracy", "test_accuracy"]
    with open(out / "metrics.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(metric_rows)
    arch = "x".join(str(w) for w in models[0].hidden_sizes)
    print(
        f"trained {len(models)} fold models ({arch}, batch {best_cfg.batch_size}, "
        f"{best_cfg.epochs} epochs, lr {best_cfg.learning_rate}) -> {out}"
    )
    for row in metric_rows:
        print(f"  fold {row[0]}: train {float(row[1]):.6g}  test {float(row[2]):.6g}")
    return 0


def cmd_envelope(args) -> int:
    net = load_network(args.model)
    doc = _read_config_doc(args.config) if args.config else {}
    solver_cfg = solver_config_from_json(doc.get("solver", {}))
    spec = _resolve_spec(args, doc, net)
    points = _resolve_points(args, doc, net)
    mode = UPPER if args.mode == "upper" else LOWER
    timing = bool(doc.get("timing", False)) or args.timing
    out = _out_dir(args)
    rows, trace_rows = [], []
    for i, x in enumerate(points):
        p = predict(net, spec, x, mode, solver_cfg)
        fx = forward(net, x)
        witness_json = "" if p.witness is None else json.dumps([float(v) for v in p.witness])
        t = repr(p.query_time) if timing else "0.0"
        rows.append([i, repr(fx), repr(p.value), p.source, witness_json, repr(p.solver_gap), t])
        trace_rows.append([i, mode.kind, p.nodes_explored, t, repr(p.solver_gap), int(p.incomplete)])
    with open(out / "predictions.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["point_id", "f_x", "envelope_value", "source", "witness_json", "gap", "time_s"])
        writer.writerows(rows)
    if args.trace:
        with open(out / "trace.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["point_id", "mode", "nodes", "time_s", "gap", "incomplete"])
            writer.writerows(trace_rows)
    corrected = sum(1 for r in rows if r[3] != "original")
    print(f"{len(rows)} {mode.kind}-envelope predictions ({corrected} corrected) -> {out / 'predictions.csv'}")
    return 0


def cmd_cgl(args) -> int:
    run = load_run_config(args.config)
    net = load_network(args.model)
    out = _out_dir(args)
    timing = run.timing or args.timing
    _, dataset, _, spec = load_reflected(run.csv_path, run.schema_path, run.output_kind)
    if not spec.features:
        raise InvalidInputError("the schema declares no monotone features")
    train_idx, test_idx = make_folds(len(dataset), 1, run.train_fraction, run.seed)[0]
    train_set = dataset.subset(train_idx)
    test_set = dataset.subset(test_idx)
    ccfg = cgl_config(run, seed_offset=1000)
    if ccfg.T == 0:
        # the loop is a no-op; the history still gets its baseline row
        selected = net
        history = [
            CglIteration(
                iteration=0,
                train_error=dataset_loss(net, train_set, ccfg.retrain.loss),
                train_ce_count=count_counterexamples(net, spec, train_set.inputs, run.solver)[0],
                test_ce_count=count_counterexamples(net, spec, test_set.inputs, run.solver)[0],
                wall_time=0.0,
            )
        ]
    else:
        selected, history = cgl_train(net, spec, train_set, ccfg, eval_data=test_set)
    save_network(selected, out / "cgl_model.json")
    write_cgl_history(out / "cgl_history.csv", history, include_times=timing)
    best = select_best(history, ccfg.selection)
    print(
        f"cgl: {len(history) - 1} iterations, train ce {history[0].train_ce_count} -> "
        f"{history[-1].train_ce_count}, selected iteration {best.iteration} -> {out}"
    )
    return 0


def cmd_verify(args) -> int:
    net = load_network(args.model)
    doc = _read_config_doc(args.config) if args.config else {}
    solver_cfg = solver_config_from_json(doc.get("solver", {}))
    if not args.feature or len(args.feature) != 1:
        raise InvalidInputError("verify checks one feature at a time; pass exactly one --feature")
    feature = int(args.feature[0])
    res = find_pair_counterexample(net, feature, solver_cfg, mode=MODE_MAXIMAL)
    print(f"feature {feature}: {res.status}")
    if res.pair is not None:
        x = ", ".join(f"{v:.6g}" for v in res.pair.x)
        xp = ", ".join(f"{v:.6g}" for v in res.pair.x_prime)
        print(f"  x  = [{x}]")
        print(f"  x' = [{xp}]")
        print(f"  violation f(x) - f(x') = {res.pair.violation:.6g}")
    if args.out:
        out = _out_dir(args)
        with open(out / "verify.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["feature", "status", "violation", "certified_bound", "x_json", "x_prime_json"])
            if res.pair is None:
                writer.writerow([feature, res.status, "", repr(res.certified_bound), "", ""])
            else:
                writer.writerow(
                    [feature, res.status, repr(res.pair.violation), repr(res.certified_bound),
                     json.dumps([float(v) for v in res.pair.x]),
                     json.dumps([float(v) for v in res.pair.x_prime])]
                )
    return 0


def cmd_count_ce(args) -> int:
    net = load_network(args.model)
    doc = _read_config_doc(args.config) if args.config else {}
    solver_cfg = solver_config_from_json(doc.get("solver", {}))
    spec = _resolve_spec(args, doc, net)
    points = _resolve_points(args, doc, net)
    count, fraction, flags = count_counterexamples(net, spec, points, solver_cfg)
    print(f"points: {len(points)}  counterexamples: {count}  fraction: {fraction:.6f}")
    if args.out:
        out = _out_dir(args)
        with open(out / "count_ce.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n_points", "count", "fraction"])
            writer.writerow([len(points), count, repr(fraction)])
        with open(out / "count_ce_flags.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["point_id", "flagged"])
            for i, flag in enumerate(flags):
                writer.writerow([i, int(flag)])
    return 0


def cmd_benchmark(args) -> int:
    run = load_run_config(args.config)
    out = _out_dir(args)
    summary = run_benchmark(run, out)
    folds = len(summary["nn_b_test_mse"])
    print(f"benchmark '{run.name}': {folds} folds -> {out}")
    for label, key in (
        ("nn_b test mse", "nn_b_test_mse"),
        ("envelope test mse", "envelope_test_mse"),
        ("cgl test mse", "cgl_test_mse"),
        ("comet test mse", "comet_test_mse"),
    ):
        vals = np.asarray(summary[key])
        print(f"  {label}: {vals.mean():.4g} ± {vals.std():.4g}")
    print(
        f"  test ce: nn_b {summary['nn_b_test_ce']} -> cgl {summary['cgl_test_ce']}"
    )
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monomlp",
        description="Train ReLU MLPs and make their predictions provably monotone.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, *, config_required=False, model=False, out_required=False,
            mode=False, feature=False, points=False, trace=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=config_required, help="JSON run config")
        if model:
            p.add_argument("--model", required=True, help="network JSON file")
        if out_required:
            p.add_argument("--out", required=True, help="output directory")
        else:
            p.add_argument("--out", help="output directory")
        if mode:
            p.add_argument("--mode", choices=["upper", "lower"], default="upper")
        if feature:
            p.add_argument("--feature", action="append", type=int,
                           help="monotone (increasing) feature index; repeatable")
        if points:
            p.add_argument("--points", help="CSV of query points in model input space")
        if trace:
            p.add_argument("--trace", action="store_true", help="write per-query solver diagnostics")
        p.add_argument("--timing", action="store_true", help="write real wall times instead of 0.0")
        p.set_defaults(func=func)
        return p

    add("train", cmd_train, "grid-search and train per-fold baseline models",
        config_required=True, out_required=True)
    add("envelope", cmd_envelope, "envelope-corrected predictions for a point set",
        model=True, out_required=True, mode=True, feature=True, points=True, trace=True)
    add("cgl", cmd_cgl, "counterexample-guided fine-tuning of a trained model",
        config_required=True, model=True, out_required=True)
    add("verify", cmd_verify, "search one feature for a maximal counterexample pair",
        model=True, feature=True)
    add("count-ce", cmd_count_ce, "count points with an envelope counterexample",
        model=True, feature=True, points=True)
    add("benchmark", cmd_benchmark, "full protocol: folds, envelope, cgl, tables, timing",
        config_required=True, out_required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # CLI boundary: report and signal failure
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
