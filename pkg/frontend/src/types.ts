// Wire types mirroring the service's JSON contract. The UI never recomputes
// scores; everything numeric displayed comes from these payloads verbatim.

export type Preference = -1 | 0 | 1;

export type Algorithm = "random" | "sequential" | "bandit";

export interface GoodnessWeights {
  dm: number;
  mc: number;
  uc: number;
}

export interface ProfileBody {
  user_id?: string;
  prefs: Record<string, Preference>;
  role_weights?: Record<string, number>;
  goodness_weights?: GoodnessWeights;
  penalize_missing_positive?: boolean;
  condition?: "healthy" | "diabetic";
}

export interface ProfileResponse {
  user_id: string;
  version: number;
  profile: Required<ProfileBody>;
}

export interface RecipeSummary {
  id: string;
  name: string;
  category: string;
  roles: string[];
  flags: Record<string, boolean>;
}

export interface ServiceDefaults {
  horizon_min: number;
  horizon_max: number;
  flags: string[];
  roles: string[];
  algorithms: Algorithm[];
}

export interface MealAssignment {
  meal: string;
  recipe_ids: string[];
}

export interface PlanBody {
  user_id: string;
  horizon: number;
  days: MealAssignment[][];
}

export interface MealScoreRow {
  meal: string;
  duplicate: number;
  coverage: number;
  constraint: number;
}

export interface ScoreReportBody {
  per_meal: MealScoreRow[];
  dm: number;
  mc: number;
  uc: number;
  combos: Record<string, number>;
  G: number;
  role_dup_diag: number;
}

export interface PlanResponse {
  plan_id: string;
  algorithm: Algorithm;
  horizon: number;
  seed: number;
  plan: PlanBody;
  scores: ScoreReportBody;
  model_version?: number;
}

export interface SlotRef {
  day: number;
  meal: string;
  slot: number;
  accept: boolean;
}

export interface FeedbackResponse {
  model_version: number;
  samples_added: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details?: unknown[];
}
