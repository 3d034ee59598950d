"""Seeded experiment grid: train networks, score the probe words, aggregate.

Every repetition of every (encoding, depth) cell draws its training set,
probe battery, codebook and initial weights from a seed derived from the
master seed, so a run is reproducible byte for byte.
"""
from __future__ import annotations

import csv
import functools
import io
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np
from scipy import stats

from .datasets import BATTERY_CATEGORIES, identity_training_set, test_battery
from .invariance import paired_ci
from .lbfgs import LbfgsConfig
from .learners import MLPLearner
from .mlp import NetConfig, NumericError
from .seeds import derive, parallel_map

log = logging.getLogger(__name__)

SCHEMA = "symlab.experiment/1"
ENCODING_KEYS = {"localist": 0, "distributed": 1}
TRAIN_CATEGORIES = ("train-pos", "train-neg")
CATEGORIES = TRAIN_CATEGORIES + BATTERY_CATEGORIES
CONTRASTS = (("YY", "YZ"), ("ZZ", "ZY"), ("YY", "ZZ"))
MAX_FAILURE_FRACTION = 0.2

ROW_HEADER = ["encoding", "layers", "repetition", "category", "word", "score"]
AGG_HEADER = ["encoding", "layers", "category", "mean", "std", "ci95", "n"]


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    master_seed: int = 0
    repetitions: int = 40
    hidden_layers_list: tuple[int, ...] = (1, 2, 3)
    hidden_width: int = 256
    encodings: tuple[str, ...] = ("localist", "distributed")
    lbfgs: LbfgsConfig = field(default_factory=LbfgsConfig)
    output_dir: str = "runs/experiment"
    code_length: int = 26

    def __post_init__(self):
        object.__setattr__(self, "hidden_layers_list", tuple(int(x) for x in self.hidden_layers_list))
        object.__setattr__(self, "encodings", tuple(self.encodings))
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        for enc in self.encodings:
            if enc not in ENCODING_KEYS:
                raise ValueError(f"unknown encoding {enc!r}")
        for layers in self.hidden_layers_list:
            self.net_config(self.encodings[0] if self.encodings else "localist", layers)

    def net_config(self, encoding: str, layers: int) -> NetConfig:
        return NetConfig(
            input_dim=2 * self.code_length,
            hidden_layers=layers,
            hidden_width=self.hidden_width,
            encoder=encoding,
            max_iterations=self.lbfgs.max_iterations,
        )

    @property
    def cells(self) -> list[tuple[str, int]]:
        return [(e, n) for e in self.encodings for n in self.hidden_layers_list]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden_layers_list"] = list(self.hidden_layers_list)
        d["encodings"] = list(self.encodings)
        return {"schema": SCHEMA, **d}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        schema = d.pop("schema", SCHEMA)
        if schema != SCHEMA:
            raise ValueError(f"unsupported config schema {schema!r}")
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        if "lbfgs" in d and isinstance(d["lbfgs"], dict):
            d["lbfgs"] = LbfgsConfig(**d["lbfgs"])
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class RepetitionResult:
    encoding: str
    layers: int
    repetition: int
    scores: dict  # category -> (word, score)
    training_set: list
    codebook: list | None
    termination: str = ""
    iterations: int = 0
    final_loss: float = float("nan")
    error: str | None = None


def run_repetition(config: ExperimentConfig, cell_rep) -> RepetitionResult:
    encoding, layers, rep = cell_rep
    seed = derive(config.master_seed, ENCODING_KEYS[encoding], layers, rep)
    data_seed, battery_seed, learner_seed = seed.spawn(3)
    data = identity_training_set(data_seed)
    battery = test_battery(battery_seed)
    learner = MLPLearner(config.net_config(encoding, layers), config.lbfgs, code_length=config.code_length)
    try:
        model = learner.train(data, learner_seed)
    except (NumericError, FloatingPointError) as exc:
        log.warning("repetition %s/%d/%d failed: %s", encoding, layers, rep, exc)
        return RepetitionResult(encoding, layers, rep, {}, list(data), None, error=str(exc))

    train_scores = np.array(learner.score_many(model, data.words))
    ratings = data.ratings
    scores = {
        "train-pos": ("*", math.fsum(train_scores[ratings == 1.0]) / int(np.sum(ratings == 1.0))),
        "train-neg": ("*", math.fsum(train_scores[ratings == 0.0]) / int(np.sum(ratings == 0.0))),
    }
    for cat, word, s in zip(BATTERY_CATEGORIES, battery, learner.score_many(model, battery)):
        scores[cat] = (word, s)
    codebook = None
    if encoding == "distributed":
        codebook = [(c, "".join(str(int(b)) for b in row)) for c, row in zip(model.encoder.alphabet, model.encoder.codebook)]
    res = model.result
    return RepetitionResult(
        encoding, layers, rep, scores, list(data), codebook,
        termination=res.termination if res else "untrained",
        iterations=res.iterations_used if res else 0,
        final_loss=res.final_value if res else float("nan"),
    )


@dataclass(frozen=True)
class ScoreRow:
    encoding: str
    layers: int
    repetition: int
    category: str
    word: str
    score: float


@dataclass(frozen=True)
class AggregateRow:
    encoding: str
    layers: int
    category: str
    mean: float
    std: float
    ci95: float
    n: int


def summarize(values) -> tuple[float, float, float, int]:
    """Mean, sample standard deviation and 95% t half-width."""
    v = np.asarray(values, dtype=np.float64)
    n = len(v)
    if n == 0:
        return float("nan"), float("nan"), float("nan"), 0
    mean = math.fsum(v) / n
    if n < 2:
        return mean, 0.0, 0.0, n
    std = float(np.std(v, ddof=1))
    return mean, std, float(stats.t.ppf(0.975, n - 1)) * std / math.sqrt(n), n


@dataclass
class ScoreReport:
    rows: list[ScoreRow]
    failures: list[tuple[str, int, int, str]] = field(default_factory=list)

    def cells(self) -> list[tuple[str, int]]:
        seen = []
        for r in self.rows:
            key = (r.encoding, r.layers)
            if key not in seen:
                seen.append(key)
        return seen

    def values(self, encoding: str, layers: int, category: str) -> np.ndarray:
        rows = sorted(
            (r for r in self.rows if (r.encoding, r.layers, r.category) == (encoding, layers, category)),
            key=lambda r: r.repetition,
        )
        return np.array([r.score for r in rows])

    def paired(self, encoding: str, layers: int, a: str, b: str) -> tuple[float, float, int]:
        """Mean of per-repetition ``a - b`` with its 95% paired-t half-width."""
        va = {r.repetition: r.score for r in self.rows if (r.encoding, r.layers, r.category) == (encoding, layers, a)}
        vb = {r.repetition: r.score for r in self.rows if (r.encoding, r.layers, r.category) == (encoding, layers, b)}
        reps = sorted(set(va) & set(vb))
        mean, half = paired_ci([va[i] for i in reps], [vb[i] for i in reps])
        return mean, half, len(reps)

    def aggregate(self) -> list[AggregateRow]:
        out = []
        for enc, layers in self.cells():
            for cat in CATEGORIES:
                vals = self.values(enc, layers, cat)
                if len(vals):
                    out.append(AggregateRow(enc, layers, cat, *summarize(vals)))
        return out

    def stats(self, encoding: str, layers: int) -> dict[str, AggregateRow]:
        return {a.category: a for a in self.aggregate() if (a.encoding, a.layers) == (encoding, layers)}

    def rows_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(ROW_HEADER)
        for r in self.rows:
            w.writerow([r.encoding, r.layers, r.repetition, r.category, r.word, repr(r.score)])
        return buf.getvalue()

    def aggregate_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(AGG_HEADER)
        for a in self.aggregate():
            w.writerow([a.encoding, a.layers, a.category, repr(a.mean), repr(a.std), repr(a.ci95), a.n])
        return buf.getvalue()

    def contrasts_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["encoding", "layers", "contrast", "mean_diff", "ci95", "n", "contains_zero"])
        for enc, layers in self.cells():
            for a, b in CONTRASTS:
                try:
                    mean, half, n = self.paired(enc, layers, a, b)
                except ValueError:
                    continue
                w.writerow([enc, layers, f"{a}-{b}", repr(mean), repr(half), n, abs(mean) <= half])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ScoreReport":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames != ROW_HEADER:
            raise ValueError(f"expected header {','.join(ROW_HEADER)}")
        rows = [
            ScoreRow(r["encoding"], int(r["layers"]), int(r["repetition"]), r["category"], r["word"], float(r["score"]))
            for r in reader
        ]
        return cls(rows)

    @classmethod
    def load(cls, run_dir) -> "ScoreReport":
        run_dir = Path(run_dir)
        report = cls.from_csv((run_dir / "repetitions.csv").read_text())
        fpath = run_dir / "failures.csv"
        if fpath.exists():
            for r in csv.DictReader(io.StringIO(fpath.read_text())):
                report.failures.append((r["encoding"], int(r["layers"]), int(r["repetition"]), r["error"]))
        return report


def _write(path: Path, text: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(text)


def write_run(config: ExperimentConfig, results: list[RepetitionResult], report: ScoreReport, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    _write(out / "config.json", config.to_json())
    _write(out / "repetitions.csv", report.rows_csv())
    _write(out / "aggregate.csv", report.aggregate_csv())
    _write(out / "contrasts.csv", report.contrasts_csv())

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["encoding", "layers", "repetition", "word", "rating"])
    for res in results:
        for word, rating in res.training_set:
            w.writerow([res.encoding, res.layers, res.repetition, word, repr(rating)])
    _write(out / "training_sets.csv", buf.getvalue())

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["encoding", "layers", "repetition", "letter", "bits"])
    for res in results:
        for letter, bits in res.codebook or ():
            w.writerow([res.encoding, res.layers, res.repetition, letter, bits])
    _write(out / "codebooks.csv", buf.getvalue())

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["encoding", "layers", "repetition", "termination", "iterations", "final_loss"])
    for res in results:
        if res.error is None:
            w.writerow([res.encoding, res.layers, res.repetition, res.termination, res.iterations, repr(res.final_loss)])
    _write(out / "optimizer.csv", buf.getvalue())

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["encoding", "layers", "repetition", "error"])
    for f in report.failures:
        w.writerow(list(f))
    _write(out / "failures.csv", buf.getvalue())


def run_experiment(config: ExperimentConfig, jobs: int = 1, write: bool = True) -> ScoreReport:
    """Run every cell and repetition of the grid and write the run directory.

    Failed repetitions (numeric blow-ups) are excluded from the report and
    listed in ``failures.csv``; more than 20% failures in any cell raises
    :class:`ExperimentError` after the outputs are written.
    """
    tasks = [(e, n, r) for e, n in config.cells for r in range(config.repetitions)]
    results = parallel_map(functools.partial(run_repetition, config), tasks, jobs)
    rows, failures = [], []
    for res in results:
        if res.error is not None:
            failures.append((res.encoding, res.layers, res.repetition, res.error))
            continue
        for cat in CATEGORIES:
            word, score = res.scores[cat]
            rows.append(ScoreRow(res.encoding, res.layers, res.repetition, cat, word, float(score)))
    report = ScoreReport(rows, failures)
    if write:
        write_run(config, results, report, Path(config.output_dir))
    for enc, layers in config.cells:
        n_failed = sum(1 for f in failures if (f[0], f[1]) == (enc, layers))
        if n_failed > MAX_FAILURE_FRACTION * config.repetitions:
            raise ExperimentError(f"{n_failed}/{config.repetitions} repetitions failed for {enc}/{layers}")
    return report


def resolve_config(path=None, overrides: dict | None = None, env=os.environ) -> ExperimentConfig:
    """Config file, then ``SYMLAB_SEED``, then explicit overrides, later winning."""
    config = ExperimentConfig.load(path) if path else ExperimentConfig()
    if env.get("SYMLAB_SEED"):
        config = replace(config, master_seed=int(env["SYMLAB_SEED"]))
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    if "max_iterations" in overrides:
        config = replace(config, lbfgs=replace(config.lbfgs, max_iterations=overrides.pop("max_iterations")))
    return replace(config, **overrides)
