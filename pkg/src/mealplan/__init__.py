"""Long-horizon meal plan recommendation over structured recipe data.

Loads role- and flag-annotated recipe datasets, scores multi-day meal plans
with a three-part goodness metric, and generates plans with a random
baseline, a rotation scheme, or a learned contextual boosted bandit. Ships a
simulation harness, a CLI, and an HTTP service.
"""

from .bandits import BanditParams, BanditState, FeatureSchema, bandit_train, slot_reward
from .boosting import RewardModel, Stump, fit_stump
from .domain import (
    Condition,
    DayConfig,
    GoodnessWeights,
    Meal,
    MealPlan,
    MealSlotSpec,
    UserProfile,
    default_day_config,
    horizon_bounds,
    validate_plan,
)
from .metrics import (
    ScoreReport,
    constraint_metric,
    coverage_metric,
    duplicate_metric,
    meal_constraint_score,
    meal_coverage_score,
    meal_duplicate_score,
    score_plan,
)
from .recipes import (
    Ingredient,
    InstructionStep,
    Recipe,
    RecipeDataset,
    Role,
    dataset_stats,
    load_dataset,
    load_fixture,
    validate_recipe,
)
from .recommend import RecommenderKind, SequentialState, recommend
from .simulate import (
    ExperimentSpec,
    PopulationConfig,
    ResultRow,
    emit_report,
    generate_population,
    preset_populations,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "BanditParams",
    "BanditState",
    "Condition",
    "DayConfig",
    "ExperimentSpec",
    "FeatureSchema",
    "GoodnessWeights",
    "Ingredient",
    "InstructionStep",
    "Meal",
    "MealPlan",
    "MealSlotSpec",
    "PopulationConfig",
    "Recipe",
    "RecipeDataset",
    "RecommenderKind",
    "ResultRow",
    "RewardModel",
    "Role",
    "ScoreReport",
    "SequentialState",
    "Stump",
    "UserProfile",
    "bandit_train",
    "constraint_metric",
    "coverage_metric",
    "dataset_stats",
    "default_day_config",
    "duplicate_metric",
    "emit_report",
    "fit_stump",
    "generate_population",
    "horizon_bounds",
    "load_dataset",
    "load_fixture",
    "meal_constraint_score",
    "meal_coverage_score",
    "meal_duplicate_score",
    "preset_populations",
    "recommend",
    "run_experiment",
    "score_plan",
    "slot_reward",
    "validate_plan",
    "validate_recipe",
]
