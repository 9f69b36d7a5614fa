import pytest

from mealplan.domain import GoodnessWeights, UserProfile, default_day_config
from mealplan.recipes import load_fixture

FLAGS = ("hasNuts", "hasMeat", "hasDairy")


@pytest.fixture(scope="session")
def fixture_ds():
    return load_fixture()


@pytest.fixture(scope="session")
def day_cfg():
    return default_day_config()


def make_profile(user_id="u", nuts=0, meat=0, dairy=0, penalize=False, weights=None, role_weights=None):
    kwargs = {}
    if weights is not None:
        kwargs["goodness_weights"] = GoodnessWeights(*weights)
    if role_weights is not None:
        kwargs["role_weights"] = role_weights
    return UserProfile(
        user_id=user_id,
        prefs={"hasNuts": nuts, "hasMeat": meat, "hasDairy": dairy},
        penalize_missing_positive=penalize,
        **kwargs,
    )
