"""Contextual bandit machinery: features, replay buffer, reward, training.

Each slot of a plan is a bandit decision: the context describes the user's
preferences and the slot (role, meal, day position), the arms are the
role-eligible recipes, and the reward for a pull splits evenly between role
fit and single-item constraint satisfaction. A boosted-stump reward model is
refit incrementally from a bounded replay buffer after every episode.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .boosting import CodedStumpFitter, RewardModel, Stump
from .domain import MEALS, DayConfig, Meal, UserProfile
from .metrics import meal_constraint_score
from .recipes import ROLES, Recipe, RecipeDataset, Role

FORMAT_VERSION = 1


@dataclass(frozen=True)
class BanditParams:
    epsilon0: float = 0.3
    epsilon_decay: float = 0.995
    epsilon_min: float = 0.02
    learning_rate: float = 0.1
    max_stumps: int = 400
    stumps_per_round: int = 5
    buffer_capacity: int = 10_000

    def to_json(self) -> dict:
        return {
            "epsilon0": self.epsilon0,
            "epsilon_decay": self.epsilon_decay,
            "epsilon_min": self.epsilon_min,
            "learning_rate": self.learning_rate,
            "max_stumps": self.max_stumps,
            "stumps_per_round": self.stumps_per_round,
            "buffer_capacity": self.buffer_capacity,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "BanditParams":
        return cls(**{k: doc[k] for k in cls().to_json() if k in doc})


@dataclass
class EpsilonSchedule:
    """Exploration rate, decayed per training episode, floored at a minimum."""

    epsilon0: float = 0.3
    decay: float = 0.995
    minimum: float = 0.02
    current: float | None = None

    def __post_init__(self):
        if self.current is None:
            self.current = self.epsilon0

    def step(self) -> float:
        self.current = max(self.minimum, self.current * self.decay)
        return self.current

    def to_doc(self) -> dict:
        return {
            "epsilon0": self.epsilon0,
            "decay": self.decay,
            "epsilon_min": self.minimum,
            "epsilon": self.current,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "EpsilonSchedule":
        return cls(
            epsilon0=doc["epsilon0"],
            decay=doc["decay"],
            minimum=doc["epsilon_min"],
            current=doc["epsilon"],
        )


class FeatureSchema:
    """Layout of the concatenated (slot context, arm) feature vector.

    Context block: one preference value per dataset flag, a one-of-4 slot
    role indicator, a one-of-3 meal indicator, and the day index normalized
    by the plan horizon. Arm block: the recipe's flag bits, role bits, and a
    one-hot over the dataset's categories.
    """

    def __init__(self, flag_names: Sequence[str], categories: Sequence[str]):
        self.flag_names = tuple(flag_names)
        self.categories = tuple(categories)
        self.context_dim = len(self.flag_names) + len(ROLES) + len(MEALS) + 1
        self.arm_dim = len(self.flag_names) + len(ROLES) + len(self.categories)
        self.dim = self.context_dim + self.arm_dim

    @classmethod
    def for_dataset(cls, ds: RecipeDataset) -> "FeatureSchema":
        return cls(ds.flag_names, ds.categories())

    def feature_names(self) -> list[str]:
        names = [f"pref:{f}" for f in self.flag_names]
        names += [f"slot_role:{r.value}" for r in ROLES]
        names += [f"meal:{m.value}" for m in MEALS]
        names += ["day_position"]
        names += [f"arm_flag:{f}" for f in self.flag_names]
        names += [f"arm_role:{r.value}" for r in ROLES]
        names += [f"arm_category:{c}" for c in self.categories]
        return names

    def context_vector(
        self, profile: UserProfile, role: Role, meal: Meal, day_index: int, horizon: int
    ) -> np.ndarray:
        vec = np.zeros(self.context_dim)
        for i, flag in enumerate(self.flag_names):
            vec[i] = profile.prefs.get(flag, 0)
        base = len(self.flag_names)
        vec[base + ROLES.index(role)] = 1.0
        base += len(ROLES)
        vec[base + MEALS.index(meal)] = 1.0
        vec[-1] = day_index / horizon
        return vec

    def arm_vector(self, recipe: Recipe) -> np.ndarray:
        vec = np.zeros(self.arm_dim)
        for i, flag in enumerate(self.flag_names):
            vec[i] = 1.0 if recipe.flags.get(flag, False) else 0.0
        base = len(self.flag_names)
        for j, role in enumerate(ROLES):
            if role in recipe.roles:
                vec[base + j] = 1.0
        base += len(ROLES)
        if recipe.category in self.categories:
            vec[base + self.categories.index(recipe.category)] = 1.0
        return vec


def slot_reward(recipe: Recipe, slot_role: Role, profile: UserProfile) -> float:
    """Per-pull reward: half for role fit, half for item-level constraint fit."""
    role_match = 1.0 if slot_role in recipe.roles else 0.0
    constraint_term = meal_constraint_score([recipe], profile)
    return 0.5 * role_match + 0.5 * constraint_term


class ReplayBuffer:
    """Bounded ring of (feature row, reward) with cached model predictions.

    Rows carry the raw prediction of the current ensemble so residuals are a
    subtraction away; integer feature codes are kept alongside for the coded
    stump fitter.
    """

    def __init__(self, capacity: int, n_features: int):
        self.capacity = capacity
        self.n_features = n_features
        self.X = np.zeros((capacity, n_features))
        self.y = np.zeros(capacity)
        self.pred = np.zeros(capacity)
        self.codes_t = np.zeros((n_features, capacity), dtype=np.int32)
        self.fitter = CodedStumpFitter(n_features)
        self.size = 0
        self.head = 0

    def __len__(self) -> int:
        return self.size

    def append(
        self,
        rows: np.ndarray,
        rewards: np.ndarray,
        preds: np.ndarray,
        codes_t: np.ndarray | None = None,
    ) -> None:
        """Add rows with their rewards and current raw predictions.

        ``codes_t`` may carry pre-encoded feature codes (features x rows) from
        a registered source; they must match the fitter's current levels.
        """
        rows = np.atleast_2d(rows)
        k = len(rows)
        if k == 0:
            return
        if k > self.capacity:
            rows, rewards, preds = rows[-self.capacity :], rewards[-self.capacity :], preds[-self.capacity :]
            codes_t = None
            k = self.capacity
        if codes_t is None:
            if self.fitter.ensure_levels(rows) and self.size:
                self.codes_t[:, : self.size] = self.fitter.encode(self.X[: self.size])
            codes_t = self.fitter.encode(rows)
        idx = (self.head + np.arange(k)) % self.capacity
        self.X[idx] = rows
        self.y[idx] = rewards
        self.pred[idx] = preds
        self.codes_t[:, idx] = codes_t
        self.head = int((self.head + k) % self.capacity)
        self.size = min(self.size + k, self.capacity)

    def register_source(self, X: np.ndarray) -> np.ndarray:
        """Pre-encode a static row matrix whose rows will be appended later."""
        if self.fitter.ensure_levels(X) and self.size:
            self.codes_t[:, : self.size] = self.fitter.encode(self.X[: self.size])
        return self.fitter.encode(X)

    @property
    def levels_version(self) -> int:
        return self.fitter.levels_version

    def residuals(self) -> np.ndarray:
        return self.y[: self.size] - self.pred[: self.size]

    def fit_next_stump(self) -> Stump | None:
        if self.size < 2:
            return None
        stump, _mask = self.fitter.fit(self.codes_t[:, : self.size], self.residuals())
        return stump

    def apply_stump(self, stump: Stump, learning_rate: float) -> None:
        x = self.X[: self.size, stump.feature]
        self.pred[: self.size] += learning_rate * np.where(
            x <= stump.threshold, stump.left, stump.right
        )

    def triples(self) -> list[tuple[np.ndarray, float]]:
        """Live (feature row, reward) pairs, oldest-first ordering not guaranteed."""
        return [(self.X[i].copy(), float(self.y[i])) for i in range(self.size)]


class SlotArmTable:
    """Precomputed (slot context x eligible arm) rows for one profile/horizon.

    Row features, rewards, and cached raw predictions for every decision the
    bandit can face in a plan of the given shape. Prediction sync against a
    growing ensemble is incremental in the number of new stumps.
    """

    def __init__(
        self,
        schema: FeatureSchema,
        ds: RecipeDataset,
        cfg: DayConfig,
        profile: UserProfile,
        horizon: int,
    ):
        self.horizon = horizon
        arms = sorted(ds.recipes, key=lambda r: r.id)
        self.arm_ids = [r.id for r in arms]
        arm_vecs = {r.id: schema.arm_vector(r) for r in arms}
        eligible_by_role = {
            role: [r for r in arms if role in r.roles] for role in ROLES
        }

        self.slots: list[tuple[int, int, int, Role, Meal]] = []  # day, meal_i, slot_i, role, meal
        rows: list[np.ndarray] = []
        rewards: list[float] = []
        self.slot_offsets: list[tuple[int, int]] = []  # row range per slot
        self.slot_arm_ids: list[list[str]] = []
        reward_cache: dict[tuple[str, Role], float] = {}
        for day in range(horizon):
            for mi, spec in enumerate(cfg.meals):
                for si, role in enumerate(spec.slots):
                    self.slots.append((day, mi, si, role, spec.meal))
                    ctx = schema.context_vector(profile, role, spec.meal, day, horizon)
                    start = len(rows)
                    ids = []
                    for recipe in eligible_by_role[role]:
                        rows.append(np.concatenate([ctx, arm_vecs[recipe.id]]))
                        key = (recipe.id, role)
                        if key not in reward_cache:
                            reward_cache[key] = slot_reward(recipe, role, profile)
                        rewards.append(reward_cache[key])
                        ids.append(recipe.id)
                    self.slot_offsets.append((start, len(rows)))
                    self.slot_arm_ids.append(ids)

        self.rows = np.array(rows) if rows else np.zeros((0, schema.dim))
        self.rewards = np.array(rewards)
        self.preds = np.zeros(len(rows))
        self.synced_stumps = 0
        self._winners: np.ndarray | None = None  # greedy row per slot, cached per sync
        self._codes_t: np.ndarray | None = None
        self._codes_version = -1

    def sync(self, model: RewardModel) -> None:
        if self.synced_stumps > len(model):
            # model was replaced/reloaded; rebuild from scratch
            self.preds = model.raw_prediction(self.rows)
            self.synced_stumps = len(model)
            self._winners = None
        elif self.synced_stumps < len(model):
            self.synced_stumps = model.apply_increment(self.rows, self.preds, self.synced_stumps)
            self._winners = None
        if self._winners is None:
            clipped = np.clip(self.preds, 0.0, 1.0)
            self._winners = np.array(
                [start + int(np.argmax(clipped[start:end])) for start, end in self.slot_offsets],
                dtype=np.int64,
            )

    def greedy_row(self, slot_index: int) -> int:
        """Arm row the model prefers for the slot under the synced ensemble.

        Arms are ordered by recipe id and argmax takes the first maximum, so
        exact prediction ties resolve to the lowest recipe id.
        """
        if self._winners is None:
            raise RuntimeError("table not synced against a model")
        return int(self._winners[slot_index])

    def codes_for(self, buffer: ReplayBuffer) -> np.ndarray:
        """Feature codes of this table's rows against the buffer's level sets."""
        if self._codes_t is None or self._codes_version != buffer.levels_version:
            self._codes_t = buffer.register_source(self.rows)
            self._codes_version = buffer.levels_version
        return self._codes_t


class BanditState:
    """Everything the bandit learns for one owner: model, schedule, buffer."""

    def __init__(
        self,
        schema: FeatureSchema,
        params: BanditParams | None = None,
        seed: int = 0,
    ):
        self.schema = schema
        self.params = params or BanditParams()
        self.model = RewardModel(
            n_features=schema.dim,
            learning_rate=self.params.learning_rate,
            max_stumps=self.params.max_stumps,
        )
        self.schedule = EpsilonSchedule(
            epsilon0=self.params.epsilon0,
            decay=self.params.epsilon_decay,
            minimum=self.params.epsilon_min,
        )
        self.buffer = ReplayBuffer(self.params.buffer_capacity, schema.dim)
        self.seed = seed
        self.version = 0
        self._tables: dict = {}

    @property
    def epsilon(self) -> float:
        return self.schedule.current

    def table_for(
        self, ds: RecipeDataset, cfg: DayConfig, profile: UserProfile, horizon: int
    ) -> SlotArmTable:
        key = (
            id(ds),
            tuple((m.meal, m.slots) for m in cfg.meals),
            profile.user_id,
            tuple(sorted(profile.prefs.items())),
            horizon,
        )
        cached = self._tables.get(key)
        if cached is None:
            if len(self._tables) > 16:
                self._tables.clear()
            # the dataset is kept alive alongside the table so its id (part
            # of the key) cannot be recycled while the entry exists
            cached = (ds, SlotArmTable(self.schema, ds, cfg, profile, horizon))
            self._tables[key] = cached
        return cached[1]

    def boost_round(self) -> list[Stump]:
        """Fit up to stumps_per_round stumps against the buffer residuals."""
        room = self.model.capacity_left
        k = min(self.params.stumps_per_round, room)
        added: list[Stump] = []
        if k <= 0 or len(self.buffer) < 2:
            return added
        for _ in range(k):
            stump = self.buffer.fit_next_stump()
            if stump is None or (stump.left == 0.0 and stump.right == 0.0):
                break
            self.model.add(stump)
            self.buffer.apply_stump(stump, self.model.learning_rate)
            added.append(stump)
        return added

    def add_feedback(self, rows: np.ndarray, rewards: np.ndarray) -> int:
        """Append observed (context+arm, reward) rows and boost once."""
        rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        rewards = np.asarray(rewards, dtype=np.float64)
        preds = self.model.raw_prediction(rows)
        self.buffer.append(rows, rewards, preds)
        self.boost_round()
        self.version += 1
        return self.version

    def to_doc(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "version": self.version,
            "seed": self.seed,
            "params": self.params.to_json(),
            "schedule": self.schedule.to_doc(),
            "model": self.model.to_doc(),
            "feature_names": self.schema.feature_names(),
        }

    @classmethod
    def from_doc(cls, doc: dict, schema: FeatureSchema) -> "BanditState":
        if doc.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported bandit model format: {doc.get('format_version')}")
        if doc["feature_names"] != schema.feature_names():
            raise ValueError("persisted model feature layout does not match the dataset")
        state = cls(schema, BanditParams.from_json(doc["params"]), seed=int(doc["seed"]))
        state.model = RewardModel.from_doc(doc["model"])
        state.schedule = EpsilonSchedule.from_doc(doc["schedule"])
        state.version = int(doc["version"])
        return state


def play_episode(
    state: BanditState,
    table: SlotArmTable,
    rng: np.random.Generator,
    epsilon: float | None = None,
) -> tuple[list[str], np.ndarray]:
    """Run the policy over every slot of one plan; returns ids and row indices.

    Per slot: with probability epsilon a uniform role-eligible arm, otherwise
    the model's greedy pick. Two uniform draws per slot are consumed in slot
    order, which pins the random stream for reproducibility.
    """
    eps = state.epsilon if epsilon is None else epsilon
    n = len(table.slots)
    coins = rng.random(n)
    rolls = rng.random(n)
    chosen_rows = np.empty(n, dtype=np.int64)
    ids: list[str] = []
    for i in range(n):
        start, end = table.slot_offsets[i]
        if end == start:
            raise ValueError("slot has no eligible arm")
        if coins[i] < eps:
            row = start + min(int(rolls[i] * (end - start)), end - start - 1)
        else:
            row = table.greedy_row(i)
        chosen_rows[i] = row
        ids.append(table.slot_arm_ids[i][row - start])
    return ids, chosen_rows


def bandit_train(
    state: BanditState,
    ds: RecipeDataset,
    cfg: DayConfig,
    profiles: Sequence[UserProfile],
    episodes: int,
    horizon: int,
    rng: np.random.Generator | None = None,
) -> BanditState:
    """Train the reward model by self-play over the given profiles.

    Per episode and profile: play an epsilon-greedy plan, record the slot
    rewards into the replay buffer, then fit one boosting round against the
    buffered residuals. Epsilon decays once per episode.
    """
    if not profiles:
        raise ValueError("bandit_train requires at least one profile")
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    if rng is None:
        rng = np.random.default_rng(state.seed)
    tables = [state.table_for(ds, cfg, p, horizon) for p in profiles]
    for table in tables:
        table.codes_for(state.buffer)
    for _ in range(episodes):
        for table in tables:
            table.sync(state.model)
            _ids, rows = play_episode(state, table, rng)
            codes_t = table.codes_for(state.buffer)
            state.buffer.append(
                table.rows[rows], table.rewards[rows], table.preds[rows], codes_t[:, rows]
            )
            state.boost_round()
        state.schedule.step()
    for table in tables:
        table.sync(state.model)
    state.version += 1
    return state
