import copy
import json

import pytest

from mealplan.recipes import (
    MissingRoleWarning,
    Role,
    SchemaViolationError,
    dataset_from_document,
    dataset_stats,
    fixture_path,
    load_dataset,
    round_half_up,
    serialize_dataset,
    validate_document,
    validate_recipe,
)


@pytest.fixture(scope="module")
def fixture_doc():
    return json.loads(fixture_path().read_text(encoding="utf-8"))


def sample_recipe(**overrides):
    doc = {
        "id": "r1",
        "name": "Test Dish",
        "category": "TREAT",
        "ingredients": [{"name": "egg", "amount": 2, "unit": "piece"}],
        "steps": [
            {"index": 1, "action": "whisk", "inputs": ["egg"], "outputs": ["whisked egg"]},
            {"index": 2, "action": "cook", "inputs": ["whisked egg"], "outputs": ["dish"]},
        ],
        "roles": ["main"],
        "flags": {"hasNuts": False, "hasMeat": False, "hasDairy": False},
    }
    doc.update(overrides)
    return doc


class TestLoadDataset:
    def test_fixture_loads_clean(self, recwarn, fixture_ds):
        assert len(fixture_ds) == 50
        assert not [w for w in recwarn if issubclass(w.category, MissingRoleWarning)]

    def test_duplicate_id_rejected(self, fixture_doc):
        doc = copy.deepcopy(fixture_doc)
        clone = copy.deepcopy(doc["recipes"][6])
        assert clone["id"] == "mc_fries"
        doc["recipes"].append(clone)
        with pytest.raises(SchemaViolationError, match="mc_fries"):
            dataset_from_document(doc)

    def test_empty_roles_rejected(self, fixture_doc):
        doc = copy.deepcopy(fixture_doc)
        doc["recipes"][0]["roles"] = []
        with pytest.raises(SchemaViolationError, match="non-empty"):
            dataset_from_document(doc)

    def test_parse_error_carries_location(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"flag_names": ["a"], "recipes": [\n  {bad}', encoding="utf-8")
        from mealplan.recipes import DatasetFormatError

        with pytest.raises(DatasetFormatError, match="line 2"):
            load_dataset(path)

    def test_missing_role_warns(self, fixture_doc):
        doc = copy.deepcopy(fixture_doc)
        doc["recipes"] = [r for r in doc["recipes"] if "beverage" not in r["roles"]]
        with pytest.warns(MissingRoleWarning, match="beverage"):
            dataset_from_document(doc)

    def test_metadata_only_mode_permits_empty_steps(self, fixture_doc):
        doc = copy.deepcopy(fixture_doc)
        doc["recipes"][0]["steps"] = []
        with pytest.raises(SchemaViolationError, match="steps"):
            dataset_from_document(doc, mode="full")
        ds = dataset_from_document(doc, mode="metadata-only")
        assert len(ds) == 50

    def test_flag_set_must_match_dataset(self, fixture_doc):
        doc = copy.deepcopy(fixture_doc)
        doc["recipes"][3]["flags"] = {"hasNuts": True}
        with pytest.raises(SchemaViolationError, match="flag set"):
            dataset_from_document(doc)


class TestSchemaDocument:
    def test_unknown_field_rejected(self, fixture_doc):
        doc = copy.deepcopy(fixture_doc)
        doc["recipes"][0]["calories"] = 100
        violations = validate_document(doc)
        assert any("calories" in v for v in violations)

    def test_field_names_case_sensitive(self, fixture_doc):
        doc = copy.deepcopy(fixture_doc)
        rec = doc["recipes"][0]
        rec["Roles"] = rec.pop("roles")
        violations = validate_document(doc)
        assert violations

    def test_role_tokens_are_lowercase_enum(self):
        raw = sample_recipe(roles=["Main"])
        assert any("unknown role" in v for v in validate_recipe(raw))


class TestValidateRecipe:
    def test_non_consecutive_steps(self):
        raw = sample_recipe()
        raw["steps"][1]["index"] = 3
        violations = validate_recipe(raw)
        assert len(violations) == 1
        assert "not consecutive" in violations[0]

    def test_negative_amount(self):
        raw = sample_recipe(ingredients=[{"name": "salt", "amount": -2, "unit": "g"}])
        violations = validate_recipe(raw)
        assert len(violations) == 1
        assert ">= 0" in violations[0]

    def test_valid_recipe_has_no_violations(self):
        assert validate_recipe(sample_recipe()) == []

    def test_violations_name_the_recipe(self):
        raw = sample_recipe(id="weird_one", roles=[])
        assert all(v.startswith("recipe weird_one:") for v in validate_recipe(raw))

    def test_pure_function(self):
        raw = sample_recipe(roles=[], ingredients=[{"name": "", "amount": 1, "unit": "g"}])
        assert validate_recipe(raw) == validate_recipe(raw)


class TestRoundTrip:
    def test_serialize_then_load_is_identity(self, fixture_ds, tmp_path):
        text = serialize_dataset(fixture_ds)
        path = tmp_path / "roundtrip.json"
        path.write_text(text, encoding="utf-8")
        again = load_dataset(path)
        assert again == fixture_ds


class TestDatasetStats:
    def test_table_rows_match_category_marginals(self, fixture_ds):
        rows = {r.category: r for r in dataset_stats(fixture_ds)}
        mc = rows["McDonalds"]
        assert (mc.pct["hasNuts"], mc.pct["hasMeat"], mc.pct["hasDairy"], mc.count) == (
            9.09, 63.64, 90.91, 11,
        )
        tb = rows["TacoBell"]
        assert (tb.pct["hasNuts"], tb.pct["hasMeat"], tb.pct["hasDairy"], tb.count) == (
            0.0, 60.0, 100.0, 10,
        )
        tr = rows["TREAT"]
        assert (tr.pct["hasNuts"], tr.pct["hasMeat"], tr.pct["hasDairy"], tr.count) == (
            17.24, 34.48, 48.28, 29,
        )

    def test_counts_sum_to_dataset_size(self, fixture_ds):
        rows = dataset_stats(fixture_ds)
        assert sum(r.count for r in rows) == len(fixture_ds)
        for row in rows:
            for pct in row.pct.values():
                assert 0.0 <= pct <= 100.0

    def test_single_recipe_category_all_false(self):
        doc = {
            "flag_names": ["hasNuts", "hasMeat", "hasDairy"],
            "recipes": [
                sample_recipe(id="solo", category="Solo", roles=["main", "side", "dessert", "beverage"])
            ],
        }
        ds = dataset_from_document(doc)
        (row,) = dataset_stats(ds)
        assert (row.pct["hasNuts"], row.pct["hasMeat"], row.pct["hasDairy"], row.count) == (
            0.0, 0.0, 0.0, 1,
        )


class TestFixtureShape:
    def test_every_role_covered_at_least_three_times(self, fixture_ds):
        for role in Role:
            assert len(fixture_ds.with_role(role)) >= 3

    def test_every_role_has_flag_free_option(self, fixture_ds):
        for role in Role:
            assert any(
                not any(r.flags.values()) for r in fixture_ds.with_role(role)
            ), f"no flag-free recipe for {role.value}"


def test_round_half_up():
    assert round_half_up(0.8895, 3) == 0.890
    assert round_half_up(0.8894, 3) == 0.889
    assert round_half_up(63.635, 2) == 63.64
    assert round_half_up(3.125, 2) == 3.13
