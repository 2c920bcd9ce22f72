"""Benchmark study runner: incumbent curves, EF/AF metrics, CSV artifacts.

A study runs a set of methods (the engine plus a random-search baseline, and
any registered external) over several seeds on one mixed synthetic objective,
then writes per-run CSVs, an aggregate mean/std curve CSV, categorical
decision-path CSVs, and a metrics summary.

The enhancement factor compares mean final incumbents against the
random-search baseline; the acceleration factor compares mean
iterations-to-threshold. Both are local definitions (flagged as such in the
metrics metadata):

    EF(m)    = (final_m - final_rs) / |final_rs|
    AF(m)    = T_rs / T_m,  T = mean 1-based iterations to first reach theta
               (budget + 1 when never reached)
    theta    = frac * best_known   when best_known > 0
               best_known / frac   when best_known < 0
               0                   when best_known == 0

so theta is always reachable regardless of the sign of the incumbent scale.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from .acquisition import AcqSpec
from .benchmarks import MixedObjective, NoiseSpec, SyntheticFn, add_noise, mixed_wrap
from .engine import Campaign, KernelConfig, SuggestConfig
from .space import MixedPoint, SearchSpace

RUN_CSV_COLUMNS = ["iteration", "point_json", "raw_y", "observed_y", "incumbent_y"]


class StudyError(ValueError):
    pass


@dataclass(frozen=True)
class RunRow:
    iteration: int
    point: MixedPoint
    raw_y: float
    observed_y: float
    incumbent_y: float


@dataclass
class RunRecord:
    method: str
    seed: int
    rows: list[RunRow] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def final_incumbent(self) -> float:
        return self.rows[-1].incumbent_y

    def true_value_incumbents(self) -> list[float]:
        """Noise-free value of the running incumbent (chosen by observed value)."""
        out = []
        best_obs = -math.inf
        best_raw = math.nan
        for row in self.rows:
            if row.observed_y > best_obs:
                best_obs = row.observed_y
                best_raw = row.raw_y
            out.append(best_raw)
        return out


def random_search(
    space: SearchSpace,
    objective: Callable[[MixedPoint], float],
    budget: int,
    seed: int,
    noise: NoiseSpec = NoiseSpec(),
) -> RunRecord:
    """Uniform sampling baseline with the engine's incumbent convention (best observed)."""
    if budget < 1:
        raise StudyError("budget must be >= 1")
    rng = np.random.default_rng([seed, 101])
    record = RunRecord(method="random", seed=seed)
    start = time.perf_counter()
    incumbent = -math.inf
    for i in range(budget):
        point = space.sample(rng)
        raw = float(objective(point))
        observed = add_noise(raw, noise, i)
        incumbent = max(incumbent, observed)
        record.rows.append(RunRow(iteration=i, point=point, raw_y=raw, observed_y=observed, incumbent_y=incumbent))
    record.wall_time = time.perf_counter() - start
    return record


def run_engine(
    space: SearchSpace,
    objective: Callable[[MixedPoint], float],
    config: SuggestConfig,
    acq: AcqSpec = AcqSpec(),
    kernel: KernelConfig = KernelConfig(),
    noise: NoiseSpec = NoiseSpec(),
    method: str = "catbox",
) -> tuple[RunRecord, Campaign]:
    """Full engine run with noise applied to the value the campaign is told."""
    campaign = Campaign.new(space, config=config, acq=acq, kernel=kernel)
    record = RunRecord(method=method, seed=config.seed)
    start = time.perf_counter()
    counter = 0
    incumbent = -math.inf
    for point in campaign.initial_points:
        raw = float(objective(point))
        observed = add_noise(raw, noise, counter)
        campaign.tell(point, observed, tag="init")
        incumbent = max(incumbent, observed)
        record.rows.append(RunRow(iteration=counter, point=point, raw_y=raw, observed_y=observed, incumbent_y=incumbent))
        counter += 1
    for _ in range(config.iters):
        point = campaign.suggest()
        raw = float(objective(point))
        observed = add_noise(raw, noise, counter)
        campaign.tell(point, observed)
        incumbent = max(incumbent, observed)
        record.rows.append(RunRow(iteration=counter, point=point, raw_y=raw, observed_y=observed, incumbent_y=incumbent))
        counter += 1
    record.wall_time = time.perf_counter() - start
    return record, campaign


@dataclass(frozen=True)
class MethodMetrics:
    method: str
    mean_final: float
    std_final: float
    ef: float
    af: float
    mean_iters_to_threshold: float


@dataclass
class MetricsTable:
    per_method: dict[str, MethodMetrics]
    curves: dict[str, tuple[np.ndarray, np.ndarray]]  # method -> (mean, std) over iterations
    theta: float
    metadata: dict[str, Any]


def _iters_to_threshold(record: RunRecord, theta: float) -> int:
    """1-based first iteration whose incumbent reaches theta; budget+1 if never."""
    for i, row in enumerate(record.rows):
        if row.incumbent_y >= theta:
            return i + 1
    return len(record.rows) + 1


def compute_metrics(
    records: Sequence[RunRecord],
    optimum: float | None = None,
    threshold_frac: float = 0.95,
    baseline: str = "random",
) -> MetricsTable:
    """EF/AF and incumbent curves per method against the random-search baseline."""
    by_method: dict[str, list[RunRecord]] = {}
    for r in sorted(records, key=lambda r: (r.method, r.seed)):
        by_method.setdefault(r.method, []).append(r)
    if baseline not in by_method:
        raise StudyError(f"no {baseline!r} baseline records present")

    lengths = {len(r.rows) for r in records}
    if len(lengths) != 1:
        raise StudyError("all records must have the same number of rows")
    budget = lengths.pop()

    best_known = max(r.final_incumbent for r in records)
    if best_known > 0:
        theta = threshold_frac * best_known
    elif best_known < 0:
        theta = best_known / threshold_frac
    else:
        theta = 0.0

    finals = {m: np.array([r.final_incumbent for r in rs]) for m, rs in by_method.items()}
    t_mean = {m: float(np.mean([_iters_to_threshold(r, theta) for r in rs])) for m, rs in by_method.items()}
    rs_final = float(np.mean(finals[baseline]))

    per_method: dict[str, MethodMetrics] = {}
    curves: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for m, rs in by_method.items():
        inc = np.array([[row.incumbent_y for row in r.rows] for r in rs])
        curves[m] = (inc.mean(axis=0), inc.std(axis=0))
        mean_final = float(np.mean(finals[m]))
        if rs_final != 0.0:
            ef = (mean_final - rs_final) / abs(rs_final)
        else:
            ef = 0.0 if mean_final == 0.0 else math.copysign(math.inf, mean_final)
        per_method[m] = MethodMetrics(
            method=m,
            mean_final=mean_final,
            std_final=float(np.std(finals[m])),
            ef=ef,
            af=t_mean[baseline] / t_mean[m],
            mean_iters_to_threshold=t_mean[m],
        )
    metadata = {
        "ef_af_definition": "nonstandard - local definition",
        "threshold_frac": threshold_frac,
        "theta": theta,
        "best_known_incumbent": best_known,
        "baseline": baseline,
        "budget": budget,
        "optimum": optimum,
    }
    return MetricsTable(per_method=per_method, curves=curves, theta=theta, metadata=metadata)


# ---------------------------------------------------------------------------
# study configuration and runner

ExternalMethod = Callable[[SearchSpace, Callable[[MixedPoint], float], int, int, NoiseSpec], RunRecord]

EXTERNAL_METHODS: dict[str, ExternalMethod] = {}


def register_method(name: str, fn: ExternalMethod) -> None:
    """Register an external baseline callable usable as a study method."""
    EXTERNAL_METHODS[name] = fn


@dataclass(frozen=True)
class StudyConfig:
    function: str = "ackley"
    n_cat: int = 2
    levels_per_cat: int = 5
    n_con: int = 2
    methods: tuple[str, ...] = ("catbox", "random")
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    n_init: int = 20
    iters: int = 80
    noise: NoiseSpec = NoiseSpec()
    acq: AcqSpec = AcqSpec()
    kernel: KernelConfig = KernelConfig()
    suggest_overrides: dict[str, Any] = field(default_factory=dict)
    threshold_frac: float = 0.95

    @staticmethod
    def from_json(doc: dict[str, Any]) -> "StudyConfig":
        noise_doc = doc.get("noise", {})
        acq_doc = doc.get("acq", {})
        kernel_doc = doc.get("kernel", {})
        base_kernel = KernelConfig().to_json()
        base_kernel.update(kernel_doc)
        return StudyConfig(
            function=doc.get("function", "ackley"),
            n_cat=int(doc.get("n_cat", 2)),
            levels_per_cat=int(doc.get("levels_per_cat", 5)),
            n_con=int(doc.get("n_con", 2)),
            methods=tuple(doc.get("methods", ["catbox", "random"])),
            seeds=tuple(int(s) for s in doc.get("seeds", [0, 1, 2, 3, 4])),
            n_init=int(doc.get("n_init", 20)),
            iters=int(doc.get("iters", 80)),
            noise=NoiseSpec(
                kind=noise_doc.get("kind", "none"),
                sigma=float(noise_doc.get("sigma", 0.0)),
                seed=int(noise_doc.get("seed", 0)),
            ),
            acq=AcqSpec(
                kind=acq_doc.get("kind", "ei"),
                xi=float(acq_doc.get("xi", 0.01)),
                beta=float(acq_doc.get("beta", 2.0)),
            ),
            kernel=KernelConfig.from_json(base_kernel),
            suggest_overrides=dict(doc.get("suggest", {})),
            threshold_frac=float(doc.get("threshold_frac", 0.95)),
        )

    def build_objective(self) -> MixedObjective:
        fn = SyntheticFn(kind=self.function, dim=self.n_cat + self.n_con)
        return mixed_wrap(fn, self.n_cat, self.levels_per_cat, self.n_con)


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue())


def write_run_csv(path: Path, record: RunRecord) -> None:
    rows = [
        [
            str(row.iteration),
            json.dumps(row.point.to_json(), separators=(",", ":")),
            _fmt(row.raw_y),
            _fmt(row.observed_y),
            _fmt(row.incumbent_y),
        ]
        for row in record.rows
    ]
    _write_csv(path, RUN_CSV_COLUMNS, rows)


def write_aggregate_csv(path: Path, methods: Sequence[str], metrics: MetricsTable) -> None:
    header = ["iteration"]
    for m in methods:
        header += [f"{m}_mean", f"{m}_std"]
    budget = len(next(iter(metrics.curves.values()))[0])
    rows = []
    for i in range(budget):
        row = [str(i)]
        for m in methods:
            mean, std = metrics.curves[m]
            row += [_fmt(mean[i]), _fmt(std[i])]
        rows.append(row)
    _write_csv(path, header, rows)


def write_decision_path_csv(path: Path, space: SearchSpace, record: RunRecord) -> None:
    """Per-iteration categorical selections (level labels) plus the incumbent."""
    names = [v.name for v in space.categoricals]
    header = ["iteration"] + names + ["incumbent_y"]
    rows = []
    for row in record.rows:
        labels = [space.categoricals[i].levels[idx] for i, idx in enumerate(row.point.cat)]
        rows.append([str(row.iteration)] + labels + [_fmt(row.incumbent_y)])
    _write_csv(path, header, rows)


def read_run_csv(path: Path, method: str = "", seed: int = 0) -> RunRecord:
    """Reconstruct a RunRecord from a run CSV (inverse of write_run_csv)."""
    record = RunRecord(method=method, seed=seed)
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        for row in reader:
            record.rows.append(
                RunRow(
                    iteration=int(row["iteration"]),
                    point=MixedPoint.from_json(json.loads(row["point_json"])),
                    raw_y=float(row["raw_y"]),
                    observed_y=float(row["observed_y"]),
                    incumbent_y=float(row["incumbent_y"]),
                )
            )
    return record


def campaign_history_csv(campaign: Campaign) -> str:
    """Campaign history in the run-file column layout.

    Ask/tell campaigns only know the told value, so raw_y and observed_y
    coincide; incumbent_y is the running best under the campaign's direction.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RUN_CSV_COLUMNS)
    best = math.inf if campaign.direction == "minimize" else -math.inf
    pick = min if campaign.direction == "minimize" else max
    for obs in campaign.history:
        best = pick(best, obs.y)
        writer.writerow(
            [
                str(obs.iteration),
                json.dumps(obs.point.to_json(), separators=(",", ":")),
                _fmt(obs.y),
                _fmt(obs.y),
                _fmt(best),
            ]
        )
    return buf.getvalue()


def run_study(study: StudyConfig, out_dir: str | Path) -> MetricsTable:
    """Run every (method, seed) pair and write the full CSV artifact set."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    objective = study.build_objective()
    space = objective.space
    budget = study.n_init + study.iters

    records: list[RunRecord] = []
    for method in study.methods:
        for seed in study.seeds:
            noise = study.noise if study.noise.kind == "none" else replace(study.noise, seed=study.noise.seed + 1000 * seed)
            if method == "catbox":
                config = SuggestConfig(
                    n_init=study.n_init, iters=study.iters, seed=seed, **study.suggest_overrides
                )
                record, _ = run_engine(
                    space, objective, config, acq=study.acq, kernel=study.kernel, noise=noise, method=method
                )
            elif method == "random":
                record = random_search(space, objective, budget, seed, noise=noise)
            elif method in EXTERNAL_METHODS:
                record = EXTERNAL_METHODS[method](space, objective, budget, seed, noise)
                record.method = method
                record.seed = seed
            else:
                raise StudyError(f"unknown method {method!r}")
            records.append(record)
            write_run_csv(out / f"{method}_seed{seed}.csv", record)
            if method == "catbox" and space.n_cat > 0:
                write_decision_path_csv(out / f"decision_path_{method}_seed{seed}.csv", space, record)

    metrics = compute_metrics(records, optimum=0.0, threshold_frac=study.threshold_frac)
    write_aggregate_csv(out / "aggregate.csv", study.methods, metrics)
    summary = {
        "metadata": metrics.metadata,
        "methods": {
            m: {
                "mean_final": mm.mean_final,
                "std_final": mm.std_final,
                "ef": mm.ef,
                "af": mm.af,
                "mean_iters_to_threshold": mm.mean_iters_to_threshold,
            }
            for m, mm in sorted(metrics.per_method.items())
        },
    }
    (out / "metrics.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return metrics
