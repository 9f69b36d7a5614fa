"""The three plan generators: random baseline, rotation, and learned bandit."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bandits import BanditState, play_episode
from .domain import (
    HORIZON_MAX,
    HORIZON_MIN,
    DayConfig,
    MealPlan,
    UserProfile,
    make_plan,
)
from .recipes import RecipeDataset, Role, check_roles_available


class RecommenderKind(str, Enum):
    RANDOM = "random"
    SEQUENTIAL = "sequential"
    BANDIT = "bandit"


class HorizonError(ValueError):
    """Requested plan length outside the supported 1..5 day range."""


@dataclass
class SequentialState:
    """Rotation pointer over the dataset's fixed recipe ordering."""

    cursor: int = 0


def _check_inputs(ds: RecipeDataset, cfg: DayConfig, horizon: int) -> None:
    if not (HORIZON_MIN <= horizon <= HORIZON_MAX):
        raise HorizonError(f"horizon must be within [{HORIZON_MIN}, {HORIZON_MAX}], got {horizon}")
    check_roles_available(ds, set(cfg.slot_roles()))


def _random_plan(
    ds: RecipeDataset, cfg: DayConfig, profile: UserProfile, horizon: int, rng: np.random.Generator
) -> MealPlan:
    by_role = {role: ds.with_role(role) for role in set(cfg.slot_roles())}
    days = []
    for _ in range(horizon):
        day = []
        for spec in cfg.meals:
            day.append([by_role[role][int(rng.integers(len(by_role[role])))].id for role in spec.slots])
        days.append(day)
    return make_plan(profile.user_id, days)


def _sequential_plan(
    ds: RecipeDataset, cfg: DayConfig, profile: UserProfile, horizon: int, state: SequentialState
) -> MealPlan:
    order = ds.recipes  # dataset file order is the rotation order
    n = len(order)
    days = []
    for _ in range(horizon):
        day = []
        for spec in cfg.meals:
            ids = []
            for role in spec.slots:
                for step in range(n):
                    candidate = order[(state.cursor + step) % n]
                    if role in candidate.roles:
                        ids.append(candidate.id)
                        state.cursor = (state.cursor + step + 1) % n
                        break
                else:  # pragma: no cover - guarded by _check_inputs
                    raise ValueError(f"no recipe available for role {role.value}")
            day.append(ids)
        days.append(day)
    return make_plan(profile.user_id, days)


def _bandit_plan(
    ds: RecipeDataset,
    cfg: DayConfig,
    profile: UserProfile,
    horizon: int,
    state: BanditState,
    rng: np.random.Generator,
    greedy: bool,
) -> MealPlan:
    table = state.table_for(ds, cfg, profile, horizon)
    table.sync(state.model)
    ids, _rows = play_episode(state, table, rng, epsilon=0.0 if greedy else None)
    days = []
    pos = 0
    for _ in range(horizon):
        day = []
        for spec in cfg.meals:
            day.append(ids[pos : pos + len(spec.slots)])
            pos += len(spec.slots)
        days.append(day)
    return make_plan(profile.user_id, days)


def recommend(
    kind: RecommenderKind,
    ds: RecipeDataset,
    cfg: DayConfig,
    profile: UserProfile,
    horizon: int,
    state: SequentialState | BanditState | None = None,
    rng: np.random.Generator | None = None,
    greedy: bool = False,
) -> MealPlan:
    """Generate a shape-valid plan with the chosen method.

    ``state`` carries per-method memory: the rotation cursor for sequential,
    the learned model for the bandit. ``greedy=True`` disables the bandit's
    exploration for the call (used when evaluating what the model learned).
    """
    kind = RecommenderKind(kind)
    _check_inputs(ds, cfg, horizon)
    if rng is None:
        rng = np.random.default_rng()
    if kind is RecommenderKind.RANDOM:
        return _random_plan(ds, cfg, profile, horizon, rng)
    if kind is RecommenderKind.SEQUENTIAL:
        if state is None:
            state = SequentialState()
        if not isinstance(state, SequentialState):
            raise TypeError("sequential recommendation needs a SequentialState")
        return _sequential_plan(ds, cfg, profile, horizon, state)
    if not isinstance(state, BanditState):
        raise TypeError("bandit recommendation needs a BanditState")
    return _bandit_plan(ds, cfg, profile, horizon, state, rng, greedy)
