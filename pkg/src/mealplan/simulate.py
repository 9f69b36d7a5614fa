"""Synthetic-user simulation: population presets, the experiment grid, reports.

A run sweeps (population config x horizon x algorithm) cells. Every source of
randomness is seeded from the experiment's base seed hashed with the cell
coordinates, so cells are independent, reorderable, and parallelizable while
the emitted report stays byte-identical across runs.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bandits import BanditParams, BanditState, FeatureSchema, bandit_train
from .domain import DayConfig, GoodnessWeights, UserProfile
from .metrics import combo_scores, score_plan
from .recipes import RecipeDataset, check_roles_available, round_half_up
from .recommend import RecommenderKind, SequentialState, recommend

DEFAULT_BASE_SEED = 2233


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from arbitrary coordinate parts."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") >> 1


@dataclass(frozen=True)
class PopulationConfig:
    """How many of the n_users get a -1 / +1 preference on each flag."""

    name: str
    n_neg: int
    n_pos: int
    n_users: int = 24
    seed: int = 0

    def __post_init__(self):
        if self.n_neg < 0 or self.n_pos < 0 or self.n_neg + self.n_pos > self.n_users:
            raise ValueError(f"{self.name}: need n_neg + n_pos <= n_users")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "n_neg": self.n_neg,
            "n_pos": self.n_pos,
            "n_users": self.n_users,
            "seed": self.seed,
        }


def preset_populations() -> tuple[PopulationConfig, ...]:
    """The c1/c2/c3 presets: 12/12, 8/8, 2/2 negative/positive over 24 users."""
    return (
        PopulationConfig(name="c1", n_neg=12, n_pos=12),
        PopulationConfig(name="c2", n_neg=8, n_pos=8),
        PopulationConfig(name="c3", n_neg=2, n_pos=2),
    )


def generate_population(
    pc: PopulationConfig, flag_names: Sequence[str], rng: np.random.Generator
) -> list[UserProfile]:
    """Draw the preference matrix: per flag, exactly n_neg users at -1 and
    n_pos at +1, assigned uniformly without replacement; everyone else 0."""
    prefs = np.zeros((pc.n_users, len(flag_names)), dtype=np.int64)
    for j in range(len(flag_names)):
        order = rng.permutation(pc.n_users)
        prefs[order[: pc.n_neg], j] = -1
        prefs[order[pc.n_neg : pc.n_neg + pc.n_pos], j] = 1
    return [
        UserProfile(
            user_id=f"{pc.name}-u{i:02d}",
            prefs={flag: int(prefs[i, j]) for j, flag in enumerate(flag_names)},
            goodness_weights=GoodnessWeights(),
            penalize_missing_positive=False,
        )
        for i in range(pc.n_users)
    ]


@dataclass(frozen=True)
class ExperimentSpec:
    populations: tuple[PopulationConfig, ...] = field(default_factory=preset_populations)
    horizons: tuple[int, ...] = (1, 3, 5)
    algorithms: tuple[RecommenderKind, ...] = (
        RecommenderKind.RANDOM,
        RecommenderKind.SEQUENTIAL,
        RecommenderKind.BANDIT,
    )
    replications: int = 10
    episodes: int = 200
    base_seed: int = DEFAULT_BASE_SEED
    bandit: BanditParams = field(default_factory=BanditParams)

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if any(h < 1 or h > 5 for h in self.horizons):
            raise ValueError("horizons must lie within [1, 5]")

    def to_json(self) -> dict:
        return {
            "populations": [p.to_json() for p in self.populations],
            "horizons": list(self.horizons),
            "algorithms": [a.value for a in self.algorithms],
            "replications": self.replications,
            "episodes": self.episodes,
            "base_seed": self.base_seed,
            "bandit": self.bandit.to_json(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ExperimentSpec":
        kwargs = {}
        if "populations" in doc:
            kwargs["populations"] = tuple(
                PopulationConfig(
                    name=p["name"],
                    n_neg=p["n_neg"],
                    n_pos=p["n_pos"],
                    n_users=p.get("n_users", 24),
                    seed=p.get("seed", 0),
                )
                for p in doc["populations"]
            )
        if "horizons" in doc:
            kwargs["horizons"] = tuple(int(h) for h in doc["horizons"])
        if "algorithms" in doc:
            kwargs["algorithms"] = tuple(RecommenderKind(a) for a in doc["algorithms"])
        for key in ("replications", "episodes", "base_seed"):
            if key in doc:
                kwargs[key] = int(doc[key])
        if "bandit" in doc:
            kwargs["bandit"] = BanditParams.from_json(doc["bandit"])
        return cls(**kwargs)


REPORT_COLUMNS = ("uc", "dm", "mc", "uc_dm_mc", "uc_dm", "uc_mc", "dm_mc")


@dataclass(frozen=True)
class ResultRow:
    config: str
    horizon: int
    algorithm: str
    uc: float
    dm: float
    mc: float
    uc_dm_mc: float
    uc_dm: float
    uc_mc: float
    dm_mc: float

    def metric(self, name: str) -> float:
        return getattr(self, name)

    def to_json(self) -> dict:
        doc = {"config": self.config, "horizon": self.horizon, "algorithm": self.algorithm}
        doc.update({c: getattr(self, c) for c in REPORT_COLUMNS})
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "ResultRow":
        return cls(**doc)


def _row_from_means(config: str, horizon: int, algorithm: str, uc: float, dm: float, mc: float) -> ResultRow:
    combos = combo_scores(uc, dm, mc)
    return ResultRow(
        config=config,
        horizon=horizon,
        algorithm=algorithm,
        uc=uc,
        dm=dm,
        mc=mc,
        uc_dm_mc=combos["uc_dm_mc"],
        uc_dm=combos["uc_dm"],
        uc_mc=combos["uc_mc"],
        dm_mc=combos["dm_mc"],
    )


def population_for_replication(
    spec: ExperimentSpec, pc: PopulationConfig, flag_names, replication: int
) -> list[UserProfile]:
    """The user population a replication runs against.

    Stateless algorithms get an independent population per replication, so
    replication averaging integrates over the population draw as well as the
    plan draw. The bandit trains once per user per cell and therefore always
    evaluates replication 0's population.
    """
    rng = np.random.default_rng(
        derive_seed(spec.base_seed, "population", pc.name, pc.seed, replication)
    )
    return generate_population(pc, flag_names, rng)


def run_cell(
    spec: ExperimentSpec,
    ds: RecipeDataset,
    cfg: DayConfig,
    pc: PopulationConfig,
    horizon: int,
    algorithm: RecommenderKind,
) -> ResultRow:
    """Evaluate one (population, horizon, algorithm) cell of the grid."""
    uc_values: list[float] = []
    dm_values: list[float] = []
    mc_values: list[float] = []

    def evaluate(user: UserProfile, rep: int, state) -> None:
        rng = np.random.default_rng(
            derive_seed(
                spec.base_seed, "plan", pc.name, horizon, algorithm.value, user.user_id, rep
            )
        )
        plan = recommend(algorithm, ds, cfg, user, horizon, state=state, rng=rng)
        report = score_plan(plan, ds, cfg, user)
        uc_values.append(report.uc)
        dm_values.append(report.dm)
        mc_values.append(report.mc)

    if algorithm is RecommenderKind.BANDIT:
        users = population_for_replication(spec, pc, ds.flag_names, 0)
        schema = FeatureSchema.for_dataset(ds)
        for user in users:
            train_seed = derive_seed(spec.base_seed, "train", pc.name, horizon, user.user_id)
            state = BanditState(schema, spec.bandit, seed=train_seed)
            bandit_train(state, ds, cfg, [user], episodes=spec.episodes, horizon=horizon)
            for rep in range(spec.replications):
                evaluate(user, rep, state)
    elif algorithm is RecommenderKind.SEQUENTIAL:
        rotation = SequentialState()  # one rotation continues through the cell
        for rep in range(spec.replications):
            for user in population_for_replication(spec, pc, ds.flag_names, rep):
                evaluate(user, rep, rotation)
    else:
        for rep in range(spec.replications):
            for user in population_for_replication(spec, pc, ds.flag_names, rep):
                evaluate(user, rep, None)

    return _row_from_means(
        pc.name,
        horizon,
        algorithm.value,
        float(np.mean(uc_values)),
        float(np.mean(dm_values)),
        float(np.mean(mc_values)),
    )


def _run_cell_args(args) -> ResultRow:
    return run_cell(*args)


def run_experiment(
    spec: ExperimentSpec,
    ds: RecipeDataset,
    cfg: DayConfig,
    max_workers: int | None = None,
) -> list[ResultRow]:
    """Run the full grid; rows come back sorted by (config, horizon, algorithm).

    ``max_workers`` > 1 runs cells in parallel processes; per-cell derived
    seeds make the result independent of scheduling order.
    """
    check_roles_available(ds, {role for role in cfg.slot_roles()})
    cells = [
        (spec, ds, cfg, pc, horizon, algorithm)
        for pc in spec.populations
        for horizon in spec.horizons
        for algorithm in spec.algorithms
    ]
    if max_workers and max_workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(_run_cell_args, cells))
    else:
        rows = [run_cell(*cell) for cell in cells]
    rows.sort(key=lambda r: (r.config, r.horizon, r.algorithm))
    return rows


def emit_report(rows: Sequence[ResultRow], format: str = "csv") -> str:
    """Render rows as csv, an aligned text table, or full-precision json.

    Values in the text formats are formatted to 3 decimals, ties rounding
    away from zero; json keeps full precision so it round-trips.
    """
    if not rows:
        raise ValueError("no rows to report")
    ordered = sorted(rows, key=lambda r: (r.config, r.horizon, r.algorithm))
    if format == "json":
        return json.dumps({"rows": [r.to_json() for r in ordered]}, indent=1) + "\n"

    header = ("config", "horizon", "algorithm", *REPORT_COLUMNS)
    table = [
        (
            r.config,
            str(r.horizon),
            r.algorithm,
            *(f"{round_half_up(r.metric(c), 3):.3f}" for c in REPORT_COLUMNS),
        )
        for r in ordered
    ]
    if format == "csv":
        lines = [",".join(header)] + [",".join(row) for row in table]
        return "\n".join(lines) + "\n"
    if format in ("aligned-table", "table"):
        widths = [max(len(header[i]), *(len(row[i]) for row in table)) for i in range(len(header))]
        def fmt(row):
            return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
        return "\n".join([fmt(header)] + [fmt(row) for row in table]) + "\n"
    raise ValueError(f"unknown report format {format!r}")


def parse_report_json(text: str) -> list[ResultRow]:
    doc = json.loads(text)
    return [ResultRow.from_json(row) for row in doc["rows"]]


def run_manifest(spec: ExperimentSpec, dataset_path: str, dataset_sha256: str) -> dict:
    """Reproducibility record emitted next to the report files."""
    return {
        "spec": spec.to_json(),
        "dataset": {"path": str(dataset_path), "sha256": dataset_sha256},
        "outputs": {"csv": "results.csv", "json": "results.json"},
    }
