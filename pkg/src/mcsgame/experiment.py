"""Replicated parameter sweeps over random scenarios.

Every (sweep value, replication) pair gets its own scenario seed derived from
the master seed, so any row can be regenerated in isolation and the results
file is byte-identical across runs.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .adts import AdtsConfig, run_adts
from .baselines import greedy_distributed
from .central import EXACT_NODE_LIMIT, exact_cta, greedy_centralized
from .metrics import RunReport, evaluate
from .model import Scenario
from .scenarios import GenConfig, generate

SCHEMES = ("adts", "gc", "gd", "cta")
SWEEP_VARS = {"I": "I", "c_move": "c_move", "speed": "speed", "K": "K"}
COLUMNS = (
    "sweep_var",
    "sweep_value",
    "replication",
    "seed",
    "scheme",
    "avg_payoff",
    "jain",
    "coverage",
    "reward_per_measurement",
    "surplus",
    "iterations_to_converge",
)
METRICS = ("avg_payoff", "jain", "coverage", "reward_per_measurement", "surplus")


class ExperimentError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    sweep_var: str
    values: list
    base: GenConfig = field(default_factory=GenConfig)
    replications: int = 100
    schemes: tuple[str, ...] = ("adts", "gc", "gd")
    output: str = "results.csv"
    master_seed: int = 0
    adts_order: str = "round_robin"
    tau_max: int = 50
    workers: int = 1
    plots: bool = True

    def __post_init__(self):
        if self.sweep_var not in SWEEP_VARS:
            raise ExperimentError(f"sweep variable must be one of {sorted(SWEEP_VARS)}")
        if self.replications < 1:
            raise ExperimentError("replications must be >= 1")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown:
            raise ExperimentError(f"unknown schemes {sorted(unknown)}")
        if not self.values:
            raise ExperimentError("sweep needs at least one value")
        self.schemes = tuple(self.schemes)

    @classmethod
    def from_dict(cls, doc: dict) -> ExperimentSpec:
        doc = dict(doc)
        base = doc.pop("base", {}) or {}
        if "reward_levels" in base:
            base["reward_levels"] = tuple(base["reward_levels"])
        return cls(base=GenConfig(**base), **doc)

    @classmethod
    def load(cls, path: str | Path) -> ExperimentSpec:
        return cls.from_dict(json.loads(Path(path).read_text()))

    def config_for(self, value, seed: int) -> GenConfig:
        return self.base.with_(**{SWEEP_VARS[self.sweep_var]: _cast(self.sweep_var, value), "seed": seed})

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["base"] = {k: v for k, v in asdict(self.base).items() if k not in ("seed", "extra")}
        return doc


def _cast(var: str, value):
    return int(value) if var in ("I", "K") else float(value)


def derive_seed(master_seed: int, sweep_index: int, replication: int) -> int:
    """Scenario seed for one cell of the sweep."""
    return int(np.random.SeedSequence([master_seed, sweep_index, replication]).generate_state(1)[0])


def check_exact_feasible(spec: ExperimentSpec) -> None:
    if "cta" not in spec.schemes:
        return
    for v in spec.values:
        cfg = spec.config_for(v, 0)
        size = (cfg.I + 1) ** cfg.K
        if size > EXACT_NODE_LIMIT:
            raise ExperimentError(
                f"cta requested but {spec.sweep_var}={v} gives {size} > {EXACT_NODE_LIMIT} assignments"
            )


def run_schemes(
    scenario: Scenario, schemes: Iterable[str], adts_config: AdtsConfig, seed: int | None = None
) -> list[RunReport]:
    reports = []
    for scheme in schemes:
        if scheme == "adts":
            trace = run_adts(scenario, adts_config)
            reports.append(evaluate(scenario, trace.profile, scheme, seed, trace.iterations_to_converge))
        elif scheme == "gc":
            reports.append(evaluate(scenario, greedy_centralized(scenario), scheme, seed))
        elif scheme == "gd":
            reports.append(evaluate(scenario, greedy_distributed(scenario), scheme, seed))
        elif scheme == "cta":
            allocation, _ = exact_cta(scenario, "pruned")
            reports.append(evaluate(scenario, allocation, scheme, seed))
        else:
            raise ExperimentError(f"unknown scheme {scheme!r}")
    return reports


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def _cell(args) -> list[list[str]]:
    spec, index, value, rep = args
    seed = derive_seed(spec.master_seed, index, rep)
    scenario = generate(spec.config_for(value, seed))
    adts_cfg = AdtsConfig(tau_max=spec.tau_max, update_order=spec.adts_order, seed=seed)
    rows = []
    for r in run_schemes(scenario, spec.schemes, adts_cfg, seed):
        rows.append(
            [
                spec.sweep_var,
                _fmt(_cast(spec.sweep_var, value)),
                str(rep),
                str(seed),
                r.scheme,
                _fmt(r.avg_payoff),
                _fmt(r.jain),
                _fmt(r.coverage),
                _fmt(r.reward_per_measurement),
                _fmt(r.surplus),
                _fmt(r.iterations) if r.scheme == "adts" else "",
            ]
        )
    return rows


def run_experiment(spec: ExperimentSpec) -> Path:
    """Run the sweep and write rows, per-value means and figures.

    Returns the path of the row-level results file.  The summary goes to
    ``<stem>_summary.csv`` and figures to ``<stem>_<metric>.png``.
    """
    check_exact_feasible(spec)
    cells = [(spec, j, v, rep) for j, v in enumerate(spec.values) for rep in range(spec.replications)]
    if spec.workers > 1:
        with ProcessPoolExecutor(spec.workers) as pool:
            chunks = list(pool.map(_cell, cells, chunksize=4))
    else:
        chunks = [_cell(c) for c in cells]
    rows = [row for chunk in chunks for row in chunk]

    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        w.writerows(rows)
    summary = summarize(read_results(out))
    write_summary(summary, out.with_name(out.stem + "_summary.csv"))
    if spec.plots:
        from .plotting import plot_summary

        plot_summary(summary, spec.sweep_var, out.with_name(out.stem))
    return out


def read_results(path: str | Path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


@dataclass
class SummaryRow:
    sweep_var: str
    sweep_value: float
    scheme: str
    n: int
    means: dict[str, float]
    stderrs: dict[str, float]


def _mean_se(xs: Sequence[float]) -> tuple[float, float]:
    n = len(xs)
    if n == 0:
        return math.nan, math.nan
    m = sum(xs) / n
    if n < 2:
        return m, 0.0
    var = sum((x - m) ** 2 for x in xs) / (n - 1)
    return m, math.sqrt(var / n)


def summarize(rows: Sequence[dict]) -> list[SummaryRow]:
    groups: dict[tuple[str, float, str], list[dict]] = {}
    for r in rows:
        groups.setdefault((r["sweep_var"], float(r["sweep_value"]), r["scheme"]), []).append(r)
    out = []
    for (var, value, scheme), grp in groups.items():
        means, ses = {}, {}
        for metric in METRICS:
            xs = [float(r[metric]) for r in grp if r[metric] != ""]
            means[metric], ses[metric] = _mean_se(xs)
        out.append(SummaryRow(var, value, scheme, len(grp), means, ses))
    return out


def write_summary(summary: Sequence[SummaryRow], path: Path) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(
            ["sweep_var", "sweep_value", "scheme", "n"]
            + [f"{m}_mean" for m in METRICS]
            + [f"{m}_se" for m in METRICS]
        )
        for s in summary:
            w.writerow(
                [s.sweep_var, _fmt(s.sweep_value), s.scheme, s.n]
                + [_fmt(s.means[m]) for m in METRICS]
                + [_fmt(s.stderrs[m]) for m in METRICS]
            )


def metric_samples(rows: Sequence[dict], scheme: str, metric: str, value: float) -> np.ndarray:
    """Per-replication values of one metric, ordered by replication."""
    picked = sorted(
        (int(r["replication"]), float(r[metric]))
        for r in rows
        if r["scheme"] == scheme and math.isclose(float(r["sweep_value"]), value) and r[metric] != ""
    )
    return np.array([v for _, v in picked])
