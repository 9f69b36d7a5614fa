"""Recipe data model: structured recipe records, dataset loading, validation, stats.

A dataset is a single JSON document ``{"flag_names": [...], "recipes": [...]}``.
Every recipe carries ingredients, atomic instruction steps, role annotations
(main/side/dessert/beverage), and binary ingredient-content flags. The flag set
is dataset-wide: each recipe's ``flags`` object must have exactly the keys
listed in ``flag_names``.
"""

from __future__ import annotations

import importlib.resources
import json
import warnings
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

import jsonschema


class Role(str, Enum):
    """The function an item can play inside a meal."""

    MAIN = "main"
    SIDE = "side"
    DESSERT = "dessert"
    BEVERAGE = "beverage"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


ROLES: tuple[Role, ...] = (Role.MAIN, Role.SIDE, Role.DESSERT, Role.BEVERAGE)

DEFAULT_FLAG_NAMES: tuple[str, ...] = ("hasNuts", "hasMeat", "hasDairy")


class DatasetError(Exception):
    """Base class for dataset problems (non-I/O)."""


class DatasetFormatError(DatasetError):
    """The document is not parseable or grossly malformed."""


class SchemaViolationError(DatasetError):
    """The document parsed but violates the recipe schema or an invariant."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class MissingRoleWarning(UserWarning):
    """Some role has no recipe; full-config plan generation will fail."""


@dataclass(frozen=True)
class Ingredient:
    name: str
    amount: float
    unit: str


@dataclass(frozen=True)
class InstructionStep:
    index: int
    action: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    duration_seconds: int | None = None
    tools: tuple[str, ...] = ()
    media_refs: tuple[str, ...] = ()


@dataclass(frozen=True)
class Recipe:
    id: str
    name: str
    category: str
    ingredients: tuple[Ingredient, ...]
    steps: tuple[InstructionStep, ...]
    roles: frozenset[Role]
    flags: Mapping[str, bool]

    def has_role(self, role: Role) -> bool:
        return role in self.roles


@dataclass(frozen=True)
class RecipeDataset:
    recipes: tuple[Recipe, ...]
    flag_names: tuple[str, ...]
    _by_id: Mapping[str, Recipe] = field(repr=False, compare=False, default=None)  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {r.id: r for r in self.recipes})

    def __len__(self) -> int:
        return len(self.recipes)

    def get(self, recipe_id: str) -> Recipe | None:
        return self._by_id.get(recipe_id)

    def __contains__(self, recipe_id: str) -> bool:
        return recipe_id in self._by_id

    def categories(self) -> tuple[str, ...]:
        return tuple(sorted({r.category for r in self.recipes}))

    def with_role(self, role: Role) -> tuple[Recipe, ...]:
        return tuple(r for r in self.recipes if role in r.roles)

    def missing_roles(self) -> tuple[Role, ...]:
        return tuple(role for role in ROLES if not any(role in r.roles for r in self.recipes))


def _schema() -> dict:
    text = importlib.resources.files("mealplan.data").joinpath("recipe_dataset.schema.json").read_text()
    return json.loads(text)


_SCHEMA_CACHE: dict | None = None


def document_schema() -> dict:
    """The JSON-Schema document the loader enforces, as shipped in the package."""
    global _SCHEMA_CACHE
    if _SCHEMA_CACHE is None:
        _SCHEMA_CACHE = _schema()
    return _SCHEMA_CACHE


def _is_blank(text) -> bool:
    return not isinstance(text, str) or not text.strip()


def validate_recipe(raw: Mapping, *, metadata_only: bool = False) -> list[str]:
    """Check one structurally-parsed recipe document against the recipe invariants.

    Returns a list of violation descriptions (empty when the recipe is valid);
    nothing is raised. Each violation names the offending field and the rule.
    """
    rid = raw.get("id") if isinstance(raw, Mapping) else None
    label = rid if isinstance(rid, str) and rid else "<no id>"
    out: list[str] = []

    def bad(fieldname: str, rule: str):
        out.append(f"recipe {label}: {fieldname}: {rule}")

    if _is_blank(raw.get("id")):
        bad("id", "must be a non-empty string")
    if _is_blank(raw.get("name")):
        bad("name", "must be a non-empty string")
    if _is_blank(raw.get("category")):
        bad("category", "must be a non-empty string")

    roles = raw.get("roles")
    if not isinstance(roles, list) or not roles:
        bad("roles", "roles must be non-empty")
    else:
        valid = {r.value for r in ROLES}
        for tok in roles:
            if tok not in valid:
                bad("roles", f"unknown role {tok!r}")
        if len(set(roles)) != len(roles):
            bad("roles", "duplicate role annotation")

    ingredients = raw.get("ingredients")
    if not isinstance(ingredients, list):
        bad("ingredients", "must be a list")
    else:
        for i, ing in enumerate(ingredients):
            if not isinstance(ing, Mapping):
                bad(f"ingredients[{i}]", "must be an object")
                continue
            if _is_blank(ing.get("name")):
                bad(f"ingredients[{i}].name", "must be non-empty")
            if _is_blank(ing.get("unit")):
                bad(f"ingredients[{i}].unit", "must be non-empty")
            amount = ing.get("amount")
            if not isinstance(amount, (int, float)) or isinstance(amount, bool) or amount < 0:
                bad(f"ingredients[{i}].amount", "amount must be >= 0")

    steps = raw.get("steps")
    if not isinstance(steps, list):
        bad("steps", "must be a list")
    else:
        if not steps and not metadata_only:
            bad("steps", "steps required outside metadata-only mode")
        for i, step in enumerate(steps):
            if not isinstance(step, Mapping):
                bad(f"steps[{i}]", "must be an object")
                continue
            if step.get("index") != i + 1:
                bad(f"steps[{i}].index", "steps not consecutive from 1")
            if _is_blank(step.get("action")):
                bad(f"steps[{i}].action", "action must be non-empty")
            for key in ("inputs", "outputs"):
                val = step.get(key)
                if not isinstance(val, list):
                    bad(f"steps[{i}].{key}", "must be a list")
                elif any(_is_blank(x) for x in val):
                    bad(f"steps[{i}].{key}", "entries must be non-empty names")
            dur = step.get("duration_seconds")
            if dur is not None and (not isinstance(dur, int) or isinstance(dur, bool) or dur < 0):
                bad(f"steps[{i}].duration_seconds", "must be a non-negative integer")

    flags = raw.get("flags")
    if not isinstance(flags, Mapping):
        bad("flags", "must be an object of booleans")
    else:
        for key, value in flags.items():
            if not isinstance(value, bool):
                bad(f"flags.{key}", "flag values must be boolean")

    return out


def validate_document(doc, *, mode: str = "full") -> list[str]:
    """Validate a whole parsed dataset document; returns all violations found."""
    validator = jsonschema.Draft202012Validator(document_schema())
    violations = [
        f"schema: {'/'.join(str(p) for p in err.absolute_path) or '<root>'}: {err.message}"
        for err in sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    ]
    if violations:
        return violations

    metadata_only = mode == "metadata-only"
    flag_names = list(doc["flag_names"])
    seen: set[str] = set()
    for raw in doc["recipes"]:
        violations.extend(validate_recipe(raw, metadata_only=metadata_only))
        rid = raw.get("id")
        if isinstance(rid, str) and rid:
            if rid in seen:
                violations.append(f"recipe {rid}: id: duplicate id {rid!r}")
            seen.add(rid)
        flags = raw.get("flags")
        if isinstance(flags, Mapping) and set(flags) != set(flag_names):
            violations.append(
                f"recipe {rid}: flags: must carry exactly the dataset flag set {sorted(flag_names)}"
            )
    return violations


def _build_recipe(raw: Mapping) -> Recipe:
    return Recipe(
        id=raw["id"],
        name=raw["name"],
        category=raw["category"],
        ingredients=tuple(
            Ingredient(name=i["name"], amount=float(i["amount"]), unit=i["unit"])
            for i in raw["ingredients"]
        ),
        steps=tuple(
            InstructionStep(
                index=s["index"],
                action=s["action"],
                inputs=tuple(s["inputs"]),
                outputs=tuple(s["outputs"]),
                duration_seconds=s.get("duration_seconds"),
                tools=tuple(s.get("tools", ())),
                media_refs=tuple(s.get("media_refs", ())),
            )
            for s in raw["steps"]
        ),
        roles=frozenset(Role(tok) for tok in raw["roles"]),
        flags=dict(raw["flags"]),
    )


def dataset_from_document(doc, *, mode: str = "full") -> RecipeDataset:
    """Build a validated RecipeDataset from an already-parsed JSON document."""
    if mode not in ("full", "metadata-only"):
        raise ValueError(f"unknown load mode {mode!r}")
    violations = validate_document(doc, mode=mode)
    if violations:
        raise SchemaViolationError(violations)
    ds = RecipeDataset(
        recipes=tuple(_build_recipe(raw) for raw in doc["recipes"]),
        flag_names=tuple(doc["flag_names"]),
    )
    missing = ds.missing_roles()
    if missing:
        warnings.warn(
            f"dataset has no recipe for roles: {', '.join(r.value for r in missing)}",
            MissingRoleWarning,
            stacklevel=2,
        )
    return ds


def load_dataset(path: str | Path, *, mode: str = "full") -> RecipeDataset:
    """Load and validate a recipe dataset file.

    ``mode="metadata-only"`` permits empty step lists, for scoring and
    recommendation experiments that never read instructions.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise DatasetFormatError(f"{path}: line {err.lineno}, column {err.colno}: {err.msg}") from err
    return dataset_from_document(doc, mode=mode)


def fixture_path() -> Path:
    """Filesystem path of the bundled 50-recipe fixture dataset."""
    return Path(str(importlib.resources.files("mealplan.data").joinpath("fixture_recipes.json")))


def load_fixture() -> RecipeDataset:
    return load_dataset(fixture_path())


def serialize_dataset(ds: RecipeDataset) -> str:
    """Render a dataset back to its canonical JSON document text."""
    doc = {
        "flag_names": list(ds.flag_names),
        "recipes": [
            {
                "id": r.id,
                "name": r.name,
                "category": r.category,
                "ingredients": [
                    {"name": i.name, "amount": i.amount, "unit": i.unit} for i in r.ingredients
                ],
                "steps": [_step_doc(s) for s in r.steps],
                "roles": [role.value for role in ROLES if role in r.roles],
                "flags": {k: r.flags[k] for k in ds.flag_names},
            }
            for r in ds.recipes
        ],
    }
    return json.dumps(doc, indent=1) + "\n"


def _step_doc(s: InstructionStep) -> dict:
    doc = {
        "index": s.index,
        "action": s.action,
        "inputs": list(s.inputs),
        "outputs": list(s.outputs),
    }
    if s.duration_seconds is not None:
        doc["duration_seconds"] = s.duration_seconds
    if s.tools:
        doc["tools"] = list(s.tools)
    if s.media_refs:
        doc["media_refs"] = list(s.media_refs)
    return doc


def round_half_up(value: float, places: int) -> float:
    """Round with ties away from zero, the convention used in all reports."""
    q = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class CategoryStats:
    category: str
    count: int
    pct: Mapping[str, float]  # flag name -> % of category recipes with the flag


def dataset_stats(ds: RecipeDataset) -> list[CategoryStats]:
    """Per-category flag percentages (2 decimals) and exact recipe counts."""
    if not ds.recipes:
        raise DatasetError("dataset is empty")
    rows = []
    for cat in ds.categories():
        members = [r for r in ds.recipes if r.category == cat]
        pct = {
            flag: round_half_up(100.0 * sum(1 for r in members if r.flags[flag]) / len(members), 2)
            for flag in ds.flag_names
        }
        rows.append(CategoryStats(category=cat, count=len(members), pct=pct))
    return rows


def check_roles_available(ds: RecipeDataset, roles: Iterable[Role]) -> None:
    """Raise if any requested role has no eligible recipe in the dataset."""
    missing = [role.value for role in roles if not ds.with_role(role)]
    if missing:
        raise DatasetError(f"no recipe available for roles: {', '.join(sorted(set(missing)))}")
