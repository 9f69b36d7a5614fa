"""Plan quality scoring: duplicate, coverage, and constraint metrics plus G.

Score conventions, applied uniformly:

* every score lies in [0, 1];
* plan-level dm / mc / uc are arithmetic means of the per-meal scores across
  all meals of all days;
* the combination columns are plain averages of their named components;
* G is the profile-weighted sum of dm, mc, uc.

Day-level item repetition across meals (the same beverage at breakfast and
dinner, say) does not enter dm; it is reported separately as a diagnostic
ratio so it stays observable without affecting G.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .domain import DayConfig, MealPlan, MealSlotSpec, UserProfile, validate_plan
from .recipes import Recipe, RecipeDataset


@dataclass(frozen=True)
class MealScores:
    meal_id: str  # e.g. "day0.lunch"
    duplicate: float
    coverage: float
    constraint: float


@dataclass(frozen=True)
class ScoreReport:
    per_meal: tuple[MealScores, ...]
    dm: float
    mc: float
    uc: float
    combos: Mapping[str, float]
    G: float
    role_dup_diag: float

    def to_json(self) -> dict:
        return {
            "per_meal": [
                {
                    "meal": m.meal_id,
                    "duplicate": m.duplicate,
                    "coverage": m.coverage,
                    "constraint": m.constraint,
                }
                for m in self.per_meal
            ],
            "dm": self.dm,
            "mc": self.mc,
            "uc": self.uc,
            "combos": dict(self.combos),
            "G": self.G,
            "role_dup_diag": self.role_dup_diag,
        }


class InvalidPlanError(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


def meal_duplicate_score(meal_items: Sequence[str]) -> float:
    """Unique items over total items within one meal."""
    if not meal_items:
        raise ValueError("meal must contain at least one item")
    return len(set(meal_items)) / len(meal_items)


def _day_unique_ratio(day: Sequence[Sequence[str]]) -> float:
    ids = [rid for meal in day for rid in meal]
    return len(set(ids)) / len(ids)


def duplicate_metric(plan: MealPlan, ds: RecipeDataset, cfg: DayConfig) -> tuple[float, float]:
    """Plan dm plus the day-level repetition diagnostic."""
    _require_valid(plan, ds, cfg)
    meal_scores = [meal_duplicate_score(ids) for day in plan.days for ids in day]
    day_ratios = [_day_unique_ratio(day) for day in plan.days]
    return _mean(meal_scores), _mean(day_ratios)


def _violates_negative_pref(recipe: Recipe, profile: UserProfile) -> bool:
    return any(recipe.flags.get(f, False) for f in profile.negative_flags())


def meal_coverage_score(
    meal_spec: MealSlotSpec, assigned: Sequence[Recipe], profile: UserProfile
) -> float:
    """Fraction of requested roles fulfilled, with penalties for bad items.

    A slot is requested when its role has positive weight in the profile.
    A requested slot contributes +1 when its item carries the slot's role and
    breaks no negative preference; a misaligned or preference-violating item
    contributes -1. The clamped sum is normalized by the requested-slot count.
    """
    if len(assigned) != len(meal_spec.slots):
        raise ValueError(
            f"{meal_spec.meal.value}: expected {len(meal_spec.slots)} items, got {len(assigned)}"
        )
    requested = 0
    total = 0
    for role, recipe in zip(meal_spec.slots, assigned):
        if profile.role_weights.get(role, 1.0) <= 0:
            continue
        requested += 1
        if recipe.has_role(role) and not _violates_negative_pref(recipe, profile):
            total += 1
        else:
            total -= 1
    if requested == 0:
        return 1.0
    return max(0, total) / requested


def coverage_metric(
    plan: MealPlan, ds: RecipeDataset, cfg: DayConfig, profile: UserProfile
) -> float:
    _require_valid(plan, ds, cfg)
    scores = [
        meal_coverage_score(spec, [ds.get(rid) for rid in ids], profile)
        for _, spec, ids in plan.meals_with_spec(cfg)
    ]
    return _mean(scores)


def meal_constraint_score(assigned: Sequence[Recipe], profile: UserProfile) -> float:
    """Fraction of the user's active ingredient checks the meal satisfies.

    A negative preference is always an active check, satisfied when the meal
    lacks the flagged ingredient. A positive preference counts only when the
    meal contains the ingredient (satisfied), or, if the user opted into
    penalize_missing_positive, also when it doesn't (unsatisfied). With no
    active checks the meal scores 1.0.
    """
    if not assigned:
        raise ValueError("meal must contain at least one item")
    active = 0
    satisfied = 0
    for flag, pref in profile.prefs.items():
        if pref == 0:
            continue
        contains = any(r.flags.get(flag, False) for r in assigned)
        if pref == -1:
            active += 1
            satisfied += 0 if contains else 1
        else:  # pref == +1
            if contains:
                active += 1
                satisfied += 1
            elif profile.penalize_missing_positive:
                active += 1
    if active == 0:
        return 1.0
    return satisfied / active


def constraint_metric(plan: MealPlan, ds: RecipeDataset, profile: UserProfile, cfg: DayConfig) -> float:
    _require_valid(plan, ds, cfg)
    scores = [
        meal_constraint_score([ds.get(rid) for rid in ids], profile)
        for day in plan.days
        for ids in day
    ]
    return _mean(scores)


COMBO_NAMES = ("uc_dm", "uc_mc", "dm_mc", "uc_dm_mc")


def combo_scores(uc: float, dm: float, mc: float) -> dict[str, float]:
    """The averaged combination columns derived from the three base metrics."""
    return {
        "uc_dm": (uc + dm) / 2.0,
        "uc_mc": (uc + mc) / 2.0,
        "dm_mc": (dm + mc) / 2.0,
        "uc_dm_mc": (uc + dm + mc) / 3.0,
    }


def score_plan(
    plan: MealPlan, ds: RecipeDataset, cfg: DayConfig, profile: UserProfile
) -> ScoreReport:
    """Full per-meal and aggregate score report for one plan."""
    _require_valid(plan, ds, cfg)
    per_meal = []
    day_ratios = []
    for d, day in enumerate(plan.days):
        day_ratios.append(_day_unique_ratio(day))
        for spec, ids in zip(cfg.meals, day):
            recipes = [ds.get(rid) for rid in ids]
            per_meal.append(
                MealScores(
                    meal_id=f"day{d}.{spec.meal.value}",
                    duplicate=meal_duplicate_score(ids),
                    coverage=meal_coverage_score(spec, recipes, profile),
                    constraint=meal_constraint_score(recipes, profile),
                )
            )
    dm = _mean([m.duplicate for m in per_meal])
    mc = _mean([m.coverage for m in per_meal])
    uc = _mean([m.constraint for m in per_meal])
    w = profile.goodness_weights
    return ScoreReport(
        per_meal=tuple(per_meal),
        dm=dm,
        mc=mc,
        uc=uc,
        combos=combo_scores(uc, dm, mc),
        G=w.dm * dm + w.mc * mc + w.uc * uc,
        role_dup_diag=_mean(day_ratios),
    )


def _require_valid(plan: MealPlan, ds: RecipeDataset, cfg: DayConfig) -> None:
    violations = validate_plan(plan, ds, cfg)
    if violations:
        raise InvalidPlanError(violations)


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)
