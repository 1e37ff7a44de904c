"""Benchmark harness: seeded run configs, a synthetic car-efficiency dataset,
and the fold pipeline that produces quality tables, counterexample tables, and
timing data.

Every run is driven by one JSON config document; per-fold seeds are derived as
seed + fold index so mean and std rows are reproducible.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .cgl import CglConfig, cgl_train, write_cgl_history
from .data import (
    ColumnSchema,
    LoadedData,
    denormalize_prediction,
    load_csv,
    make_folds,
    read_schema,
    schema_to_json,
)
from .envelope import UPPER, count_counterexamples, predict_batch
from .errors import InvalidInputError, SchemaError
from .network import (
    DECREASING,
    INCREASING,
    REGRESSION,
    InputBox,
    MonotoneFeature,
    MonotoneSpec,
    Network,
    forward_batch,
    save_network,
)
from .solver import SolverConfig
from .training import (
    GridSpec,
    LabeledDataset,
    TrainConfig,
    grid_search,
    init_network,
    train_with_history,
)

# ---------------------------------------------------------------------------
# synthetic dataset: a 398-row car-efficiency table with the usual six numeric
# columns, six missing horsepower cells, and fuel economy monotonically
# decreasing in weight (the dominant signal), horsepower, and displacement


def make_autompg_like(seed: int = 0, n: int = 398) -> str:
    """Return CSV text. Deterministic per seed; six rows get '?' horsepower."""
    rng = np.random.default_rng(seed)
    z = rng.uniform(0.0, 1.0, n)
    u_w = np.clip(0.55 * z + 0.45 * rng.uniform(0.0, 1.0, n), 0.0, 1.0)
    u_h = np.clip(0.55 * z + 0.45 * rng.uniform(0.0, 1.0, n), 0.0, 1.0)
    u_d = np.clip(0.60 * z + 0.40 * rng.uniform(0.0, 1.0, n), 0.0, 1.0)
    cyl = np.where(z < 0.45, 4, np.where(z < 0.78, 6, 8))
    disp = 85.0 + 370.0 * u_d + rng.normal(0.0, 8.0, n)
    hp = 45.0 + 180.0 * u_h + rng.normal(0.0, 6.0, n)
    wt = 1613.0 + 3120.0 * u_w + rng.normal(0.0, 90.0, n)
    acc = 22.5 - 8.5 * z + rng.normal(0.0, 1.6, n)
    yr = rng.integers(70, 83, n)
    mpg = (
        46.0
        - 16.0 * u_w
        - 5.0 * u_h
        - 3.0 * u_d
        - 0.3 * cyl
        + 0.5 * (yr - 70)
        + rng.normal(0.0, 2.3, n)
    )
    mpg = np.clip(mpg, 8.0, None)
    missing = set(np.random.default_rng(seed + 123).choice(n, size=6, replace=False).tolist())
    lines = ["cylinders,displacement,horsepower,weight,acceleration,model_year,mpg"]
    for i in range(n):
        hp_cell = "?" if i in missing else f"{hp[i]:.1f}"
        lines.append(
            f"{cyl[i]},{disp[i]:.1f},{hp_cell},{wt[i]:.1f},{acc[i]:.1f},{yr[i]},{mpg[i]:.1f}"
        )
    return "\n".join(lines) + "\n"


def autompg_schema() -> tuple[ColumnSchema, ...]:
    return (
        ColumnSchema("cylinders", "numeric"),
        ColumnSchema("displacement", "numeric"),
        ColumnSchema("horsepower", "numeric"),
        ColumnSchema("weight", "numeric", DECREASING),
        ColumnSchema("acceleration", "numeric"),
        ColumnSchema("model_year", "numeric"),
        ColumnSchema("mpg", "target"),
    )


def write_autompg_like(csv_path, schema_path, seed: int = 0) -> None:
    Path(csv_path).write_text(make_autompg_like(seed))
    Path(schema_path).write_text(json.dumps(schema_to_json(autompg_schema()), indent=2) + "\n")


# ---------------------------------------------------------------------------
# run configuration


@dataclass(frozen=True)
class RunConfig:
    name: str
    csv_path: str
    schema_path: str
    output_kind: str
    n_folds: int
    train_fraction: float
    grid: GridSpec | None
    solver: SolverConfig
    cgl_T: int
    cgl_labeling: str
    cgl_selection: str
    cgl_retrain: dict
    seed: int
    timing: bool


def _grid_from_json(doc: dict, seed: int) -> GridSpec:
    for key in ("architectures", "batch_sizes", "epochs", "learning_rates"):
        if key not in doc:
            raise SchemaError(f"grid.{key}", "missing")
    loss = doc.get("loss", "mse")
    configs = tuple(
        TrainConfig(batch_size=int(b), epochs=int(e), learning_rate=float(lr), seed=seed, loss=loss)
        for b in doc["batch_sizes"]
        for e in doc["epochs"]
        for lr in doc["learning_rates"]
    )
    return GridSpec(
        architectures=tuple(tuple(int(w) for w in arch) for arch in doc["architectures"]),
        configs=configs,
    )


def solver_config_from_json(doc: dict) -> SolverConfig:
    kwargs = {}
    for key, field in (
        ("epsilon", "epsilon"),
        ("delta", "delta"),
        ("max_nodes", "max_nodes"),
        ("stability_slack", "neuron_stability_slack"),
    ):
        if key in doc:
            kwargs[field] = doc[key]
    return SolverConfig(**kwargs)


def load_run_config(path) -> RunConfig:
    path = Path(path)
    with open(path) as fh:
        doc = json.load(fh)
    if "seed" not in doc:
        raise SchemaError("seed", "missing: every run must be explicitly seeded")
    data = doc.get("data", {})
    for key in ("csv", "schema"):
        if key not in data:
            raise SchemaError(f"data.{key}", "missing")
    base = path.parent
    csv_path = str((base / data["csv"]).resolve()) if not Path(data["csv"]).is_absolute() else data["csv"]
    schema_path = (
        str((base / data["schema"]).resolve()) if not Path(data["schema"]).is_absolute() else data["schema"]
    )
    for p, label in ((csv_path, "data.csv"), (schema_path, "data.schema")):
        if not Path(p).exists():
            raise SchemaError(label, f"path does not exist: {p}")
    seed = int(doc["seed"])
    cgl = doc.get("cgl", {})
    return RunConfig(
        name=doc.get("name", Path(csv_path).stem),
        csv_path=csv_path,
        schema_path=schema_path,
        output_kind=data.get("output_kind", REGRESSION),
        n_folds=int(data.get("n_folds", 3)),
        train_fraction=float(data.get("train_fraction", 0.8)),
        grid=_grid_from_json(doc["grid"], seed) if "grid" in doc else None,
        solver=solver_config_from_json(doc.get("solver", {})),
        cgl_T=int(cgl.get("T", 2)),
        cgl_labeling=cgl.get("labeling", "regression-average"),
        cgl_selection=cgl.get("selection", "min-counterexamples"),
        cgl_retrain=cgl.get("retrain", {"batch_size": 32, "epochs": 40, "learning_rate": 0.001}),
        seed=seed,
        timing=bool(doc.get("timing", False)),
    )


def cgl_config(run: RunConfig, seed_offset: int = 0) -> CglConfig:
    retrain = dict(run.cgl_retrain)
    retrain.setdefault("seed", run.seed + seed_offset)
    if run.grid is not None:
        retrain.setdefault("loss", run.grid.configs[0].loss)
    else:
        retrain.setdefault("loss", "mse" if run.output_kind == REGRESSION else "binary-cross-entropy")
    return CglConfig(
        T=run.cgl_T,
        labeling=run.cgl_labeling,
        selection=run.cgl_selection,
        solver=run.solver,
        retrain=TrainConfig(**retrain),
    )


# ---------------------------------------------------------------------------
# data preparation: load, then reflect decreasing features so every monotone
# direction is increasing (training and queries all happen in this space)


@dataclass(frozen=True)
class PreparedData:
    loaded: LoadedData
    dataset: LabeledDataset
    input_box: InputBox
    spec: MonotoneSpec
    folds: list


def reflect_decreasing(
    dataset: LabeledDataset, box: InputBox, spec: MonotoneSpec
) -> tuple[LabeledDataset, InputBox, MonotoneSpec]:
    decreasing = spec.decreasing_indices
    if not decreasing:
        return dataset, box, spec
    X = dataset.inputs.copy()
    lo, hi = box.lower.copy(), box.upper.copy()
    for i in decreasing:
        X[:, i] = -X[:, i]
        lo[i], hi[i] = -box.upper[i], -box.lower[i]
    flipped = MonotoneSpec(tuple(MonotoneFeature(f.index, INCREASING) for f in spec.features))
    return LabeledDataset(X, dataset.targets, dataset.weights), InputBox(lo, hi), flipped


def load_reflected(csv_path, schema_path, output_kind: str = REGRESSION):
    """Load a CSV and flip decreasing features so the model space is
    all-increasing. Returns (loaded, dataset, input_box, spec)."""
    loaded = load_csv(csv_path, read_schema(schema_path), output_kind)
    dataset, box, spec = reflect_decreasing(
        loaded.dataset, loaded.input_box, loaded.monotone_spec
    )
    return loaded, dataset, box, spec


def prepare_data(run: RunConfig, n_folds: int | None = None) -> PreparedData:
    loaded, dataset, box, spec = load_reflected(run.csv_path, run.schema_path, run.output_kind)
    folds = make_folds(
        len(dataset), run.n_folds if n_folds is None else n_folds, run.train_fraction, run.seed
    )
    return PreparedData(loaded, dataset, box, spec, folds)


# ---------------------------------------------------------------------------
# pipeline stages


def train_fold_models(run: RunConfig, prep: PreparedData):
    """Grid-search once over all folds, then train one model per fold."""
    if run.grid is None:
        raise InvalidInputError("config has no grid section")
    best_net, best_cfg, rows = grid_search(
        run.grid, prep.dataset, prep.folds, input_box=prep.input_box, output_kind=run.output_kind
    )
    models, histories = [], []
    for k, (train_idx, _) in enumerate(prep.folds):
        cfg_k = replace(best_cfg, seed=run.seed + k)
        net0 = init_network(
            prep.dataset.input_dim,
            best_net.hidden_sizes,
            prep.input_box,
            run.output_kind,
            seed=run.seed + k,
        )
        net_k, hist_k = train_with_history(net0, prep.dataset.subset(train_idx), cfg_k)
        models.append(net_k)
        histories.append(hist_k)
    return models, histories, best_cfg, rows


def raw_mse(net: Network, data: LabeledDataset, prep: PreparedData) -> float:
    preds = denormalize_prediction(forward_batch(net, data.inputs, check=False), prep.loaded.normalization)
    truth = denormalize_prediction(data.targets, prep.loaded.normalization)
    return float(np.mean((preds - truth) ** 2))


def envelope_raw_mse(net: Network, data: LabeledDataset, prep: PreparedData, cfg: SolverConfig) -> float:
    preds = predict_batch(net, prep.spec, data.inputs, UPPER, cfg)
    values = denormalize_prediction(np.array([p.value for p in preds]), prep.loaded.normalization)
    truth = denormalize_prediction(data.targets, prep.loaded.normalization)
    return float(np.mean((values - truth) ** 2))


def write_grid_report(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["architecture", "batch_size", "epochs", "learning_rate", "loss", "mean_train_error"])
        for r in rows:
            writer.writerow(
                [
                    "x".join(str(w) for w in r.hidden_sizes),
                    r.config.batch_size,
                    r.config.epochs,
                    repr(r.config.learning_rate),
                    r.config.loss,
                    repr(r.mean_train_error),
                ]
            )


def _mean_std_cell(values) -> str:
    arr = np.asarray(values, dtype=float)
    return f"{arr.mean():.2f} ± {arr.std():.2f}"


def run_benchmark(run: RunConfig, out_dir) -> dict:
    """Full protocol: grid search, per-fold baseline, envelope, CGL, combined
    predictor, counterexample counts, and timing. Returns the summary dict and
    writes every report under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    prep = prepare_data(run)
    models, _, best_cfg, grid_rows = train_fold_models(run, prep)
    write_grid_report(out / "grid_report.csv", grid_rows)

    per_fold = {
        "nn_b_train": [], "nn_b": [], "envelope": [], "cgl": [], "comet": [],
        "nn_b_train_ce": [], "nn_b_test_ce": [], "cgl_train_ce": [], "cgl_test_ce": [],
    }
    timing_rows = []
    for k, ((train_idx, test_idx), net) in enumerate(zip(prep.folds, models)):
        train_set = prep.dataset.subset(train_idx)
        test_set = prep.dataset.subset(test_idx)
        save_network(net, out / f"nn_b_fold{k}.json")
        per_fold["nn_b_train"].append(raw_mse(net, train_set, prep))
        per_fold["nn_b"].append(raw_mse(net, test_set, prep))
        per_fold["envelope"].append(envelope_raw_mse(net, test_set, prep, run.solver))

        ccfg = cgl_config(run, seed_offset=1000 + k)
        selected, history = cgl_train(net, prep.spec, train_set, ccfg, eval_data=test_set)
        save_network(selected, out / f"cgl_fold{k}.json")
        write_cgl_history(out / f"cgl_history_fold{k}.csv", history, include_times=run.timing)
        per_fold["cgl"].append(raw_mse(selected, test_set, prep))
        per_fold["comet"].append(envelope_raw_mse(selected, test_set, prep, run.solver))

        count_b_tr, _, _ = count_counterexamples(net, prep.spec, train_set.inputs, run.solver)
        count_b_te, _, _ = count_counterexamples(net, prep.spec, test_set.inputs, run.solver)
        count_c_tr, _, _ = count_counterexamples(selected, prep.spec, train_set.inputs, run.solver)
        count_c_te, _, _ = count_counterexamples(selected, prep.spec, test_set.inputs, run.solver)
        per_fold["nn_b_train_ce"].append(count_b_tr)
        per_fold["nn_b_test_ce"].append(count_b_te)
        per_fold["cgl_train_ce"].append(count_c_tr)
        per_fold["cgl_test_ce"].append(count_c_te)

        # timing: plain forward pass vs one envelope query, averaged
        sample = test_set.inputs[: min(20, len(test_set))]
        t0 = time.perf_counter()
        for _ in range(5):
            forward_batch(net, sample, check=False)
        baseline_time = (time.perf_counter() - t0) / (5 * len(sample))
        t0 = time.perf_counter()
        predict_batch(net, prep.spec, sample, UPPER, run.solver)
        envelope_time = (time.perf_counter() - t0) / len(sample)
        timing_rows.append(
            [sum(net.hidden_sizes), len(prep.spec.features),
             repr(baseline_time), repr(envelope_time)]
        )

    with open(out / "metrics.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["fold", "nn_b_train_mse", "nn_b_test_mse", "envelope_test_mse", "cgl_test_mse",
             "comet_test_mse", "nn_b_train_ce", "nn_b_test_ce", "cgl_train_ce", "cgl_test_ce"]
        )
        for k in range(len(models)):
            writer.writerow(
                [k, repr(per_fold["nn_b_train"][k]), repr(per_fold["nn_b"][k]),
                 repr(per_fold["envelope"][k]), repr(per_fold["cgl"][k]), repr(per_fold["comet"][k]),
                 per_fold["nn_b_train_ce"][k], per_fold["nn_b_test_ce"][k],
                 per_fold["cgl_train_ce"][k], per_fold["cgl_test_ce"][k]]
            )

    feature_names = [prep.loaded.feature_names[f.index] for f in prep.spec.features]
    with open(out / "table_quality.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "features", "nn_b", "envelope", "cgl", "comet"])
        writer.writerow(
            [run.name, "+".join(feature_names), _mean_std_cell(per_fold["nn_b"]),
             _mean_std_cell(per_fold["envelope"]), _mean_std_cell(per_fold["cgl"]),
             _mean_std_cell(per_fold["comet"])]
        )

    with open(out / "table_ce.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "features", "split", "nn_b_ce", "cgl_ce"])
        writer.writerow(
            [run.name, "+".join(feature_names), "train",
             _mean_std_cell(per_fold["nn_b_train_ce"]), _mean_std_cell(per_fold["cgl_train_ce"])]
        )
        writer.writerow(
            [run.name, "+".join(feature_names), "test",
             _mean_std_cell(per_fold["nn_b_test_ce"]), _mean_std_cell(per_fold["cgl_test_ce"])]
        )

    with open(out / "timing.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model_size", "n_monotone_features", "baseline_time_s", "envelope_time_s"])
        writer.writerows(timing_rows)

    # one x,y series per timing figure
    for fname, xcol in (
        ("plot_query_time_vs_model_size.csv", 0),
        ("plot_query_time_vs_features.csv", 1),
    ):
        with open(out / fname, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y"])
            for row in timing_rows:
                writer.writerow([row[xcol], row[3]])

    return {
        "best_config": best_cfg,
        "nn_b_test_mse": per_fold["nn_b"],
        "envelope_test_mse": per_fold["envelope"],
        "cgl_test_mse": per_fold["cgl"],
        "comet_test_mse": per_fold["comet"],
        "nn_b_test_ce": per_fold["nn_b_test_ce"],
        "cgl_test_ce": per_fold["cgl_test_ce"],
        "nn_b_train_ce": per_fold["nn_b_train_ce"],
        "cgl_train_ce": per_fold["cgl_train_ce"],
    }
