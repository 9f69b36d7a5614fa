"""Shared meal-planning vocabulary: day configurations, user profiles, plans.

All types here are immutable values; they are safe to share across threads
and are the currency between the metrics, the recommenders, and the service.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from .recipes import ROLES, RecipeDataset, Role

HORIZON_MIN = 1
HORIZON_MAX = 5

PREFERENCE_VALUES = (-1, 0, 1)


class Meal(str, Enum):
    BREAKFAST = "breakfast"
    LUNCH = "lunch"
    DINNER = "dinner"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


MEALS: tuple[Meal, ...] = (Meal.BREAKFAST, Meal.LUNCH, Meal.DINNER)


class Condition(str, Enum):
    HEALTHY = "healthy"
    DIABETIC = "diabetic"


@dataclass(frozen=True)
class MealSlotSpec:
    """One meal's ordered role slots. A role appears at most once per meal."""

    meal: Meal
    slots: tuple[Role, ...]

    def __post_init__(self):
        if not self.slots:
            raise ValueError(f"{self.meal.value}: slots must be non-empty")
        if len(set(self.slots)) != len(self.slots):
            raise ValueError(f"{self.meal.value}: a role may appear at most once per meal")


@dataclass(frozen=True)
class DayConfig:
    meals: tuple[MealSlotSpec, ...]

    def __post_init__(self):
        if tuple(m.meal for m in self.meals) != MEALS:
            raise ValueError("day config must cover breakfast, lunch, dinner exactly once, in order")

    @property
    def slots_per_day(self) -> int:
        return sum(len(m.slots) for m in self.meals)

    def slot_roles(self) -> tuple[Role, ...]:
        return tuple(role for meal in self.meals for role in meal.slots)


def default_day_config() -> DayConfig:
    """The standard 3-meal, 9-slot day."""
    return DayConfig(
        meals=(
            MealSlotSpec(Meal.BREAKFAST, (Role.MAIN, Role.BEVERAGE)),
            MealSlotSpec(Meal.LUNCH, (Role.MAIN, Role.SIDE, Role.BEVERAGE)),
            MealSlotSpec(Meal.DINNER, (Role.MAIN, Role.SIDE, Role.DESSERT, Role.BEVERAGE)),
        )
    )


def horizon_bounds() -> tuple[int, int]:
    """Supported plan length in days, inclusive."""
    return (HORIZON_MIN, HORIZON_MAX)


@dataclass(frozen=True)
class GoodnessWeights:
    """Weights of the duplicate, coverage, and constraint scores in G."""

    dm: float = 1.0 / 3.0
    mc: float = 1.0 / 3.0
    uc: float = 1.0 / 3.0

    def __post_init__(self):
        for name, w in (("dm", self.dm), ("mc", self.mc), ("uc", self.uc)):
            if w < 0:
                raise ValueError(f"goodness weight {name} must be non-negative")
        if abs(self.dm + self.mc + self.uc - 1.0) > 1e-9:
            raise ValueError("goodness_weights must sum to 1")


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    prefs: Mapping[str, int]
    role_weights: Mapping[Role, float] = field(default_factory=lambda: {r: 1.0 for r in ROLES})
    goodness_weights: GoodnessWeights = field(default_factory=GoodnessWeights)
    penalize_missing_positive: bool = False
    condition: Condition = Condition.HEALTHY

    def __post_init__(self):
        for flag, value in self.prefs.items():
            if value not in PREFERENCE_VALUES:
                raise ValueError(f"preference for {flag} must be -1, 0, or +1")
        for role in ROLES:
            if self.role_weights.get(role, 0.0) < 0:
                raise ValueError(f"role weight for {role.value} must be non-negative")

    def negative_flags(self) -> tuple[str, ...]:
        return tuple(f for f, v in self.prefs.items() if v == -1)


def validate_profile_against_dataset(profile: UserProfile, ds: RecipeDataset) -> list[str]:
    """Check the profile covers exactly the dataset's flag set."""
    out = []
    missing = [f for f in ds.flag_names if f not in profile.prefs]
    extra = [f for f in profile.prefs if f not in ds.flag_names]
    if missing:
        out.append(f"prefs missing flags: {', '.join(missing)}")
    if extra:
        out.append(f"prefs has unknown flags: {', '.join(extra)}")
    return out


@dataclass(frozen=True)
class MealPlan:
    """Recipe ids assigned to every slot of every meal over the horizon.

    ``days[d][m]`` is the ordered id list for meal ``m`` of day ``d``, aligned
    with the slots of the day config's ``m``-th MealSlotSpec.
    """

    user_id: str
    days: tuple[tuple[tuple[str, ...], ...], ...]

    @property
    def horizon(self) -> int:
        return len(self.days)

    def all_ids(self):
        for day in self.days:
            for meal in day:
                yield from meal

    def meals_with_spec(self, cfg: DayConfig):
        """Yield (day_index, MealSlotSpec, assigned ids) over the whole plan."""
        for d, day in enumerate(self.days):
            for spec, ids in zip(cfg.meals, day):
                yield d, spec, ids


def validate_plan(plan: MealPlan, ds: RecipeDataset, cfg: DayConfig) -> list[str]:
    """Referential and shape validation of a plan; returns violations."""
    out: list[str] = []
    if not (HORIZON_MIN <= plan.horizon <= HORIZON_MAX):
        out.append(f"horizon {plan.horizon} outside [{HORIZON_MIN}, {HORIZON_MAX}]")
    for d, day in enumerate(plan.days):
        if len(day) != len(cfg.meals):
            out.append(f"day {d}: expected {len(cfg.meals)} meals, got {len(day)}")
            continue
        for spec, ids in zip(cfg.meals, day):
            if len(ids) != len(spec.slots):
                out.append(
                    f"day {d} {spec.meal.value}: expected {len(spec.slots)} ids, got {len(ids)}"
                )
            for rid in ids:
                if rid not in ds:
                    out.append(f"day {d} {spec.meal.value}: unknown recipe id {rid!r}")
    return out


# --- JSON wire shapes (shared by the CLI and the HTTP service) ---


def profile_to_json(profile: UserProfile) -> dict:
    return {
        "user_id": profile.user_id,
        "prefs": dict(profile.prefs),
        "role_weights": {role.value: profile.role_weights.get(role, 1.0) for role in ROLES},
        "goodness_weights": {
            "dm": profile.goodness_weights.dm,
            "mc": profile.goodness_weights.mc,
            "uc": profile.goodness_weights.uc,
        },
        "penalize_missing_positive": profile.penalize_missing_positive,
        "condition": profile.condition.value,
    }


def profile_from_json(doc: Mapping, *, user_id: str | None = None) -> UserProfile:
    """Parse a profile document; raises ValueError with a reason on bad input."""
    if not isinstance(doc, Mapping):
        raise ValueError("profile must be an object")
    uid = user_id or doc.get("user_id")
    if not uid or not isinstance(uid, str):
        raise ValueError("user_id must be a non-empty string")
    prefs = doc.get("prefs")
    if not isinstance(prefs, Mapping) or not prefs:
        raise ValueError("prefs must be a non-empty object of flag -> -1|0|+1")
    clean_prefs = {}
    for flag, value in prefs.items():
        if not isinstance(value, int) or isinstance(value, bool) or value not in PREFERENCE_VALUES:
            raise ValueError(f"preference for {flag} must be -1, 0, or +1")
        clean_prefs[flag] = value

    role_weights = {r: 1.0 for r in ROLES}
    for token, weight in (doc.get("role_weights") or {}).items():
        try:
            role = Role(token)
        except ValueError:
            raise ValueError(f"unknown role {token!r} in role_weights") from None
        if not isinstance(weight, (int, float)) or isinstance(weight, bool) or weight < 0:
            raise ValueError(f"role weight for {token} must be a non-negative number")
        role_weights[role] = float(weight)

    gw = doc.get("goodness_weights")
    if gw is None:
        weights = GoodnessWeights()
    else:
        if not isinstance(gw, Mapping) or set(gw) != {"dm", "mc", "uc"}:
            raise ValueError("goodness_weights must be an object with keys dm, mc, uc")
        try:
            weights = GoodnessWeights(dm=float(gw["dm"]), mc=float(gw["mc"]), uc=float(gw["uc"]))
        except ValueError as err:
            raise ValueError(str(err)) from None

    condition_token = doc.get("condition", Condition.HEALTHY.value)
    try:
        condition = Condition(condition_token)
    except ValueError:
        raise ValueError(f"condition must be one of: {[c.value for c in Condition]}") from None

    pmp = doc.get("penalize_missing_positive", False)
    if not isinstance(pmp, bool):
        raise ValueError("penalize_missing_positive must be a boolean")

    try:
        return UserProfile(
            user_id=uid,
            prefs=clean_prefs,
            role_weights=role_weights,
            goodness_weights=weights,
            penalize_missing_positive=pmp,
            condition=condition,
        )
    except ValueError as err:
        raise ValueError(str(err)) from None


def plan_to_json(plan: MealPlan, cfg: DayConfig) -> dict:
    return {
        "user_id": plan.user_id,
        "horizon": plan.horizon,
        "days": [
            [
                {"meal": spec.meal.value, "recipe_ids": list(ids)}
                for spec, ids in zip(cfg.meals, day)
            ]
            for day in plan.days
        ],
    }


def plan_from_json(doc: Mapping) -> MealPlan:
    days = tuple(
        tuple(tuple(meal["recipe_ids"]) for meal in day) for day in doc["days"]
    )
    return MealPlan(user_id=doc["user_id"], days=days)


def make_plan(user_id: str, day_assignments: Sequence[Sequence[Sequence[str]]]) -> MealPlan:
    return MealPlan(
        user_id=user_id,
        days=tuple(tuple(tuple(meal) for meal in day) for day in day_assignments),
    )
