import pytest

from mealplan.domain import (
    GoodnessWeights,
    Meal,
    MealSlotSpec,
    UserProfile,
    default_day_config,
    horizon_bounds,
    make_plan,
    plan_from_json,
    plan_to_json,
    profile_from_json,
    profile_to_json,
    validate_plan,
    validate_profile_against_dataset,
)
from mealplan.recipes import Role

from .conftest import make_profile


class TestDayConfig:
    def test_default_slot_counts(self, day_cfg):
        assert [len(m.slots) for m in day_cfg.meals] == [2, 3, 4]
        assert day_cfg.slots_per_day == 9

    def test_dinner_slots(self, day_cfg):
        dinner = day_cfg.meals[2]
        assert dinner.meal is Meal.DINNER
        assert dinner.slots == (Role.MAIN, Role.SIDE, Role.DESSERT, Role.BEVERAGE)

    def test_role_repeats_within_meal_rejected(self):
        with pytest.raises(ValueError, match="at most once"):
            MealSlotSpec(Meal.LUNCH, (Role.MAIN, Role.MAIN, Role.BEVERAGE))


def test_horizon_bounds():
    assert horizon_bounds() == (1, 5)


def seq_plan(ds, cfg, horizon, user_id="u"):
    """A trivially valid plan: per slot, first recipe with the right role."""
    days = []
    for _ in range(horizon):
        day = []
        for spec in cfg.meals:
            day.append([ds.with_role(role)[0].id for role in spec.slots])
        days.append(day)
    return make_plan(user_id, days)


class TestValidatePlan:
    def test_unknown_id_named(self, fixture_ds, day_cfg):
        plan = seq_plan(fixture_ds, day_cfg, 1)
        days = [list(map(list, plan.days[0]))]
        days[0][0][0] = "ghost"
        broken = make_plan("u", days)
        violations = validate_plan(broken, fixture_ds, day_cfg)
        assert len(violations) == 1 and "ghost" in violations[0]

    def test_shape_mismatch(self, fixture_ds, day_cfg):
        plan = seq_plan(fixture_ds, day_cfg, 1)
        days = [list(map(list, plan.days[0]))]
        days[0][2] = days[0][2][:3]  # dinner drops to 3 ids on a 4-slot meal
        broken = make_plan("u", days)
        assert any("expected 4 ids" in v for v in validate_plan(broken, fixture_ds, day_cfg))

    def test_valid_five_day_plan(self, fixture_ds, day_cfg):
        plan = seq_plan(fixture_ds, day_cfg, 5)
        assert validate_plan(plan, fixture_ds, day_cfg) == []

    def test_ids_per_day_equals_slot_total(self, fixture_ds, day_cfg):
        plan = seq_plan(fixture_ds, day_cfg, 3)
        for day in plan.days:
            assert sum(len(meal) for meal in day) == day_cfg.slots_per_day


class TestUserProfile:
    def test_pref_domain_enforced(self):
        with pytest.raises(ValueError, match="-1, 0, or \\+1"):
            UserProfile(user_id="u", prefs={"hasNuts": 2})

    def test_goodness_weights_must_sum_to_one(self):
        with pytest.raises(ValueError, match="sum to 1"):
            GoodnessWeights(0.5, 0.5, 0.5)

    def test_negative_role_weight_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            make_profile(role_weights={Role.MAIN: -1.0})

    def test_all_zero_prefs_is_valid(self):
        profile = make_profile()
        assert profile.negative_flags() == ()

    def test_dataset_coverage_check(self, fixture_ds):
        profile = UserProfile(user_id="u", prefs={"hasNuts": -1})
        violations = validate_profile_against_dataset(profile, fixture_ds)
        assert any("missing" in v for v in violations)
        assert validate_profile_against_dataset(make_profile(), fixture_ds) == []


class TestWireShapes:
    def test_profile_round_trip(self):
        profile = make_profile(nuts=-1, meat=1, penalize=True)
        doc = profile_to_json(profile)
        again = profile_from_json(doc)
        assert again == profile

    def test_profile_parse_errors(self):
        with pytest.raises(ValueError, match="-1, 0, or \\+1"):
            profile_from_json({"user_id": "u", "prefs": {"hasNuts": 2}})
        with pytest.raises(ValueError, match="sum to 1"):
            profile_from_json(
                {
                    "user_id": "u",
                    "prefs": {"hasNuts": 0},
                    "goodness_weights": {"dm": 0.5, "mc": 0.5, "uc": 0.5},
                }
            )
        with pytest.raises(ValueError, match="condition"):
            profile_from_json({"user_id": "u", "prefs": {"hasNuts": 0}, "condition": "vegan"})

    def test_plan_round_trip(self, fixture_ds, day_cfg):
        plan = seq_plan(fixture_ds, day_cfg, 2)
        doc = plan_to_json(plan, day_cfg)
        assert doc["horizon"] == 2
        assert plan_from_json(doc) == plan
