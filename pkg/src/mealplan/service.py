"""HTTP service: recipes, profiles, plan generation, scoring, and feedback.

State on disk is a directory of JSON documents (one per profile, one per
trained bandit model); issued plans are kept in memory and referenced by id
for feedback. Per-user locks serialize profile writes and model updates.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Mapping

import numpy as np
from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .bandits import BanditParams, BanditState, FeatureSchema, bandit_train
from .domain import (
    DayConfig,
    Meal,
    MealPlan,
    UserProfile,
    default_day_config,
    horizon_bounds,
    plan_to_json,
    profile_from_json,
    profile_to_json,
    validate_profile_against_dataset,
)
from .metrics import score_plan
from .recipes import DatasetError, Recipe, RecipeDataset, Role, load_dataset
from .recommend import HorizonError, RecommenderKind, SequentialState, recommend
from .simulate import derive_seed


@dataclass
class ServiceConfig:
    dataset_path: str
    store_dir: str = "./mealplan_store"
    host: str = "127.0.0.1"
    port: int = 8000
    episodes: int = 200
    train_horizon: int = 3
    train_seed: int = 0
    bandit: BanditParams = field(default_factory=BanditParams)
    static_dir: str | None = None

    @classmethod
    def load(cls, path: str | None = None, env: Mapping[str, str] | None = None) -> "ServiceConfig":
        """Build config from an optional JSON file plus environment overrides."""
        env = os.environ if env is None else env
        doc: dict = {}
        if path is not None:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        from .recipes import fixture_path

        kwargs = {
            "dataset_path": doc.get("dataset_path", str(fixture_path())),
            "store_dir": doc.get("store_dir", "./mealplan_store"),
            "host": doc.get("host", "127.0.0.1"),
            "port": int(doc.get("port", 8000)),
            "episodes": int(doc.get("episodes", 200)),
            "train_horizon": int(doc.get("train_horizon", 3)),
            "train_seed": int(doc.get("train_seed", 0)),
            "bandit": BanditParams.from_json(doc.get("bandit", {})),
            "static_dir": doc.get("static_dir"),
        }
        if env.get("MEALPLAN_DATASET"):
            kwargs["dataset_path"] = env["MEALPLAN_DATASET"]
        if env.get("MEALPLAN_STORE_DIR"):
            kwargs["store_dir"] = env["MEALPLAN_STORE_DIR"]
        if env.get("MEALPLAN_PORT"):
            kwargs["port"] = int(env["MEALPLAN_PORT"])
        if env.get("MEALPLAN_HOST"):
            kwargs["host"] = env["MEALPLAN_HOST"]
        if env.get("MEALPLAN_EPISODES"):
            kwargs["episodes"] = int(env["MEALPLAN_EPISODES"])
        return cls(**kwargs)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details: list | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.details = details or []
        super().__init__(message)


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


class ProfileStore:
    """Directory of versioned profile documents with read-after-write
    consistency inside one process."""

    def __init__(self, root: Path):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, user_id: str) -> Path:
        return self.root / f"{user_id}.json"

    def get(self, user_id: str) -> tuple[UserProfile, int] | None:
        path = self._path(user_id)
        if not path.exists():
            return None
        doc = json.loads(path.read_text(encoding="utf-8"))
        return profile_from_json(doc["profile"], user_id=user_id), int(doc["version"])

    def put(self, profile: UserProfile) -> int:
        with self._lock:
            existing = self.get(profile.user_id)
            version = (existing[1] + 1) if existing else 1
            doc = {"version": version, "profile": profile_to_json(profile)}
            _atomic_write(self._path(profile.user_id), json.dumps(doc, indent=1))
            return version


class ModelStore:
    """Directory of serialized bandit models, one per user."""

    def __init__(self, root: Path):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, user_id: str) -> Path:
        return self.root / f"{user_id}.json"

    def get(self, user_id: str) -> dict | None:
        path = self._path(user_id)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def put(self, user_id: str, doc: dict) -> None:
        _atomic_write(self._path(user_id), json.dumps(doc))


@dataclass
class IssuedPlan:
    plan_id: str
    user_id: str
    algorithm: RecommenderKind
    horizon: int
    seed: int
    plan: MealPlan


class PlanRequestBody(BaseModel):
    user_id: str
    horizon: int
    algorithm: Literal["random", "sequential", "bandit"]
    seed: int | None = None


class SlotRef(BaseModel):
    day: int = Field(ge=0)
    meal: str
    slot: int = Field(ge=0)
    accept: bool


class FeedbackBody(BaseModel):
    plan_id: str
    slots: list[SlotRef]


def _recipe_json(r: Recipe) -> dict:
    return {
        "id": r.id,
        "name": r.name,
        "category": r.category,
        "roles": [role.value for role in Role if role in r.roles],
        "flags": dict(r.flags),
        "ingredients": [{"name": i.name, "amount": i.amount, "unit": i.unit} for i in r.ingredients],
        "steps": len(r.steps),
    }


def create_app(config: ServiceConfig) -> FastAPI:
    ds = load_dataset(config.dataset_path)
    cfg = default_day_config()
    schema = FeatureSchema.for_dataset(ds)
    store_root = Path(config.store_dir)
    profiles = ProfileStore(store_root / "profiles")
    models = ModelStore(store_root / "models")

    app = FastAPI(title="mealplan service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.dataset = ds
    app.state.config = config
    app.state.profiles = profiles
    app.state.models = models
    app.state.issued_plans: dict[str, IssuedPlan] = {}
    app.state.live_bandits: dict[str, BanditState] = {}
    app.state.user_locks = defaultdict(threading.Lock)

    @app.exception_handler(ApiError)
    async def api_error_handler(_req: Request, err: ApiError):
        body = {"code": err.code, "message": err.message}
        if err.details:
            body["details"] = err.details
        return JSONResponse(status_code=err.status, content=body)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_req: Request, err: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "code": "validation_error",
                "message": "request body failed validation",
                "details": [
                    {"loc": [str(p) for p in e["loc"]], "msg": e["msg"]} for e in err.errors()
                ],
            },
        )

    def _bandit_state_for(user_id: str, profile: UserProfile) -> BanditState:
        """Load the user's persisted model, or train one now and persist it."""
        live = app.state.live_bandits.get(user_id)
        if live is not None:
            return live
        doc = models.get(user_id)
        if doc is not None:
            state = BanditState.from_doc(doc, schema)
        else:
            state = BanditState(
                schema,
                config.bandit,
                seed=derive_seed(config.train_seed, "service-train", user_id),
            )
            bandit_train(
                state, ds, cfg, [profile],
                episodes=config.episodes, horizon=config.train_horizon,
            )
            models.put(user_id, state.to_doc())
        app.state.live_bandits[user_id] = state
        return state

    @app.get("/health")
    def health():
        return {"status": "ok", "recipes": len(ds), "flags": list(ds.flag_names)}

    @app.get("/config/defaults")
    def config_defaults():
        low, high = horizon_bounds()
        return {
            "horizon_min": low,
            "horizon_max": high,
            "flags": list(ds.flag_names),
            "roles": [r.value for r in Role],
            "algorithms": [k.value for k in RecommenderKind],
        }

    @app.get("/recipes")
    def list_recipes(
        role: str | None = Query(default=None),
        category: str | None = Query(default=None),
        flag: str | None = Query(default=None),
    ):
        out = list(ds.recipes)
        if role is not None:
            try:
                wanted = Role(role)
            except ValueError:
                raise ApiError(400, "bad_filter", f"unknown role {role!r}")
            out = [r for r in out if wanted in r.roles]
        if category is not None:
            out = [r for r in out if r.category == category]
        if flag is not None:
            if flag not in ds.flag_names:
                raise ApiError(400, "bad_filter", f"unknown flag {flag!r}")
            out = [r for r in out if r.flags.get(flag, False)]
        return {"recipes": [_recipe_json(r) for r in out]}

    @app.get("/recipes/{recipe_id}")
    def get_recipe(recipe_id: str):
        recipe = ds.get(recipe_id)
        if recipe is None:
            raise ApiError(404, "unknown_recipe", f"no recipe with id {recipe_id!r}")
        return _recipe_json(recipe)

    @app.put("/profiles/{user_id}")
    def put_profile(user_id: str, body: dict):
        if body.get("user_id") not in (None, user_id):
            raise ApiError(400, "invalid_profile", "body user_id does not match the path")
        try:
            profile = profile_from_json(body, user_id=user_id)
        except ValueError as err:
            raise ApiError(400, "invalid_profile", str(err))
        violations = validate_profile_against_dataset(profile, ds)
        if violations:
            raise ApiError(400, "invalid_profile", "; ".join(violations), details=violations)
        with app.state.user_locks[user_id]:
            version = profiles.put(profile)
        return {"user_id": user_id, "version": version, "profile": profile_to_json(profile)}

    @app.get("/profiles/{user_id}")
    def get_profile(user_id: str):
        found = profiles.get(user_id)
        if found is None:
            raise ApiError(404, "unknown_user", f"no profile for {user_id!r}")
        profile, version = found
        return {"user_id": user_id, "version": version, "profile": profile_to_json(profile)}

    @app.post("/plans")
    def post_plan(body: PlanRequestBody):
        low, high = horizon_bounds()
        if not (low <= body.horizon <= high):
            raise ApiError(422, "bad_horizon", f"horizon must be within [{low}, {high}]")
        found = profiles.get(body.user_id)
        if found is None:
            raise ApiError(404, "unknown_user", f"no profile for {body.user_id!r}")
        profile, _version = found
        algorithm = RecommenderKind(body.algorithm)
        seed = body.seed if body.seed is not None else int.from_bytes(os.urandom(4), "little")
        rng = np.random.default_rng(seed)

        model_version = None
        with app.state.user_locks[body.user_id]:
            try:
                if algorithm is RecommenderKind.BANDIT:
                    state = _bandit_state_for(body.user_id, profile)
                    model_version = state.version
                    plan = recommend(algorithm, ds, cfg, profile, body.horizon, state=state, rng=rng)
                elif algorithm is RecommenderKind.SEQUENTIAL:
                    cursor = SequentialState(cursor=int(rng.integers(len(ds))))
                    plan = recommend(algorithm, ds, cfg, profile, body.horizon, state=cursor)
                else:
                    plan = recommend(algorithm, ds, cfg, profile, body.horizon, rng=rng)
            except HorizonError as err:
                raise ApiError(422, "bad_horizon", str(err))
            except DatasetError as err:
                raise ApiError(503, "dataset_incomplete", str(err))

        report = score_plan(plan, ds, cfg, profile)
        issued = IssuedPlan(
            plan_id=uuid.uuid4().hex,
            user_id=body.user_id,
            algorithm=algorithm,
            horizon=body.horizon,
            seed=seed,
            plan=plan,
        )
        app.state.issued_plans[issued.plan_id] = issued
        response = {
            "plan_id": issued.plan_id,
            "algorithm": algorithm.value,
            "horizon": body.horizon,
            "seed": seed,
            "plan": plan_to_json(plan, cfg),
            "scores": report.to_json(),
        }
        if model_version is not None:
            response["model_version"] = model_version
        return response

    @app.post("/feedback")
    def post_feedback(body: FeedbackBody):
        issued = app.state.issued_plans.get(body.plan_id)
        if issued is None:
            raise ApiError(404, "unknown_plan", f"no issued plan {body.plan_id!r}")
        if issued.algorithm is not RecommenderKind.BANDIT:
            raise ApiError(409, "algorithm_mismatch", "feedback requires bandit plans")
        if not body.slots:
            raise ApiError(400, "empty_feedback", "no slot feedback given")

        found = profiles.get(issued.user_id)
        if found is None:
            raise ApiError(404, "unknown_user", f"no profile for {issued.user_id!r}")
        profile, _version = found

        rows = []
        rewards = []
        seen = set()
        for ref in body.slots:
            if ref.day >= issued.plan.horizon:
                raise ApiError(400, "bad_slot_ref", f"day {ref.day} outside the plan")
            try:
                meal = Meal(ref.meal)
            except ValueError:
                raise ApiError(400, "bad_slot_ref", f"unknown meal {ref.meal!r}")
            meal_index = [m.meal for m in cfg.meals].index(meal)
            spec = cfg.meals[meal_index]
            if ref.slot >= len(spec.slots):
                raise ApiError(400, "bad_slot_ref", f"{ref.meal} has no slot {ref.slot}")
            key = (ref.day, meal_index, ref.slot)
            if key in seen:
                raise ApiError(400, "bad_slot_ref", f"duplicate reference {key}")
            seen.add(key)
            recipe = ds.get(issued.plan.days[ref.day][meal_index][ref.slot])
            ctx = schema.context_vector(profile, spec.slots[ref.slot], meal, ref.day, issued.horizon)
            rows.append(np.concatenate([ctx, schema.arm_vector(recipe)]))
            rewards.append(1.0 if ref.accept else 0.0)

        with app.state.user_locks[issued.user_id]:
            state = _bandit_state_for(issued.user_id, profile)
            version = state.add_feedback(np.array(rows), np.array(rewards))
            models.put(issued.user_id, state.to_doc())
        return {"model_version": version, "samples_added": len(rows)}

    if config.static_dir and Path(config.static_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app
