"""Gradient-boosted regression stumps used as the bandit's reward model.

The model is an additive ensemble of one-split stumps fit to squared-loss
residuals. Predictions are the learning-rate-scaled sum of stump outputs,
clamped into [0, 1] only at the point of use so residual fitting sees the
raw additive value.

Two fitting paths share the same selection rule (best squared-error split,
ties broken by lowest feature index then lowest threshold):

* :func:`fit_stump`: the reference implementation over raw feature rows;
* :class:`CodedStumpFitter`: an incremental path over integer-coded
  discrete features, used by the training loop where the same rows are
  refit hundreds of times.

Leaf values are group means, except that a group whose residuals are all
bit-identical gets that exact value. This keeps equally-rewarded arms at
exactly equal predictions, so argmax tie-breaking stays meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Stump:
    """One-split regression tree: left value when x[feature] <= threshold."""

    feature: int
    threshold: float
    left: float
    right: float

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        return np.where(X[:, self.feature] <= self.threshold, self.left, self.right)

    def to_doc(self) -> list:
        return [self.feature, self.threshold, self.left, self.right]

    @classmethod
    def from_doc(cls, doc) -> "Stump":
        f, t, l, r = doc
        return cls(feature=int(f), threshold=float(t), left=float(l), right=float(r))


def _exact_mean(values: np.ndarray) -> float:
    """Mean, but bit-exact when every entry is identical."""
    first = values[0]
    if values.min() == values.max():
        return float(first)
    return float(values.mean())


def fit_stump(features, residuals) -> Stump:
    """Fit the squared-error-optimal stump over the given samples.

    Candidate thresholds are midpoints of consecutive distinct values of each
    feature. Ties are broken by lowest feature index, then lowest threshold.
    With no usable split anywhere (every feature constant) the result is a
    degenerate stump predicting the residual mean on both sides.
    """
    X = np.asarray(features, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(residuals, dtype=np.float64)
    n, d = X.shape
    if n < 2:
        raise ValueError("fit_stump needs at least 2 samples")
    if y.shape != (n,):
        raise ValueError("residuals must align with feature rows")

    best_gain = -np.inf
    best: tuple[int, float] | None = None
    for f in range(d):
        vals = np.unique(X[:, f])
        if len(vals) < 2:
            continue
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        ys = y[order]
        # position of the last sample at or below each candidate threshold
        cuts = np.searchsorted(xs, vals[:-1], side="right")
        csum = np.cumsum(ys)
        total = csum[-1]
        left_sum = csum[cuts - 1]
        left_n = cuts.astype(np.float64)
        right_n = n - left_n
        gains = left_sum**2 / left_n + (total - left_sum) ** 2 / right_n
        j = int(np.argmax(gains))  # first max -> lowest threshold
        if gains[j] > best_gain:
            best_gain = float(gains[j])
            best = (f, float((vals[j] + vals[j + 1]) / 2.0))

    if best is None:
        m = _exact_mean(y)
        return Stump(feature=0, threshold=0.0, left=m, right=m)

    f, t = best
    mask = X[:, f] <= t
    return Stump(
        feature=f,
        threshold=t,
        left=_exact_mean(y[mask]),
        right=_exact_mean(y[~mask]),
    )


def stump_sse(stump: Stump, features, residuals) -> float:
    """Squared error of a stump on a sample set (used by tests and tuning)."""
    X = np.asarray(features, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(residuals, dtype=np.float64)
    pred = stump.evaluate(X)
    return float(((y - pred) ** 2).sum())


class CodedStumpFitter:
    """Stump fitting over integer-coded columns of discrete-valued features.

    Feature levels are discovered dynamically; appending a row with an unseen
    value bumps ``levels_version`` so callers can re-encode cached codes.
    Fitting cost per call is O(rows x features): one bincount plus fully
    vectorized candidate scoring across all features at once. Candidates are
    scanned in (feature index, threshold) order, so taking the first maximal
    gain implements the tie-breaking rule.
    """

    def __init__(self, n_features: int):
        self.n_features = n_features
        self.levels: list[np.ndarray] = [np.empty(0, dtype=np.float64) for _ in range(n_features)]
        self.levels_version = 0
        self._tables: tuple | None = None

    def encode(self, X: np.ndarray) -> np.ndarray:
        """Column-major codes (features x rows) for rows with known values."""
        codes = np.empty((self.n_features, len(X)), dtype=np.int32)
        for f in range(self.n_features):
            codes[f] = np.searchsorted(self.levels[f], X[:, f])
        return codes

    def ensure_levels(self, X: np.ndarray) -> bool:
        """Register any new feature values; True when codes must be rebuilt."""
        changed = False
        for f in range(self.n_features):
            vals = np.unique(X[:, f])
            known = self.levels[f]
            if len(known) == 0:
                missing = vals
            else:
                pos = np.searchsorted(known, vals)
                inside = pos < len(known)
                hit = np.zeros(len(vals), dtype=bool)
                hit[inside] = known[pos[inside]] == vals[inside]
                missing = vals[~hit]
            if len(missing):
                self.levels[f] = np.unique(np.concatenate([known, missing]))
                changed = True
        if changed:
            self.levels_version += 1
            self._tables = None
        return changed

    def _bin_tables(self):
        if self._tables is None:
            widths = np.array([len(lv) for lv in self.levels], dtype=np.int64)
            offsets = np.concatenate([[0], np.cumsum(widths)[:-1]])
            values = (
                np.concatenate(self.levels)
                if int(widths.sum())
                else np.empty(0, dtype=np.float64)
            )
            self._tables = (widths, offsets, values)
        return self._tables

    def fit(self, codes_t: np.ndarray, residuals: np.ndarray) -> tuple[Stump, np.ndarray]:
        """Best stump over coded columns; returns it plus its left-side mask.

        ``codes_t`` has shape (features, rows), matching :meth:`encode`.
        """
        d, n = codes_t.shape
        if n < 2:
            raise ValueError("fit needs at least 2 samples")
        widths, offsets, level_values = self._bin_tables()
        total_bins = int(widths.sum())
        flat = (codes_t + offsets[:, None]).ravel()
        counts = np.bincount(flat, minlength=total_bins)
        sums = np.bincount(flat, weights=np.tile(residuals, d), minlength=total_bins)

        csum_c = np.cumsum(counts)
        csum_s = np.cumsum(sums)
        base_c = np.concatenate([[0], csum_c[offsets[1:] - 1]]) if d > 1 else np.zeros(1)
        base_s = np.concatenate([[0.0], csum_s[offsets[1:] - 1]]) if d > 1 else np.zeros(1)

        obs = np.nonzero(counts)[0]
        feat_of = np.searchsorted(offsets, obs, side="right") - 1
        same = feat_of[:-1] == feat_of[1:] if len(obs) > 1 else np.zeros(0, dtype=bool)
        cand = obs[:-1][same]  # bin of the level left of each candidate cut
        if len(cand) == 0:
            m = _exact_mean(residuals)
            return Stump(feature=0, threshold=0.0, left=m, right=m), np.ones(n, dtype=bool)

        cand_feat = feat_of[:-1][same]
        cand_next = obs[1:][same]
        left_n = csum_c[cand] - base_c[cand_feat]
        left_sum = csum_s[cand] - base_s[cand_feat]
        total = float(residuals.sum())
        gains = left_sum**2 / left_n + (total - left_sum) ** 2 / (n - left_n)
        j = int(np.argmax(gains))  # first max -> lowest feature, lowest threshold

        f = int(cand_feat[j])
        cut_code = int(cand[j] - offsets[f])
        threshold = float((level_values[cand[j]] + level_values[cand_next[j]]) / 2.0)
        mask = codes_t[f] <= cut_code
        stump = Stump(
            feature=f,
            threshold=threshold,
            left=_exact_mean(residuals[mask]),
            right=_exact_mean(residuals[~mask]),
        )
        return stump, mask


@dataclass
class RewardModel:
    """Additive stump ensemble with scaled outputs, clamped to [0,1] at use."""

    n_features: int
    learning_rate: float = 0.1
    max_stumps: int = 400
    stumps: list[Stump] = field(default_factory=list)
    _stack: tuple | None = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.stumps)

    @property
    def capacity_left(self) -> int:
        return self.max_stumps - len(self.stumps)

    def add(self, stump: Stump) -> None:
        if self.capacity_left <= 0:
            raise ValueError("ensemble is at max_stumps capacity")
        self.stumps.append(stump)
        self._stack = None

    def _stacked(self):
        if self._stack is None:
            self._stack = (
                np.array([s.feature for s in self.stumps], dtype=np.int64),
                np.array([s.threshold for s in self.stumps]),
                np.array([s.left for s in self.stumps]),
                np.array([s.right for s in self.stumps]),
            )
        return self._stack

    def raw_prediction(self, X: np.ndarray) -> np.ndarray:
        """Unclamped additive prediction (used for residual fitting)."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        out = np.zeros(len(X))
        if not self.stumps:
            return out
        F, T, L, R = self._stacked()
        hits = X[:, F] <= T[None, :]
        out = (np.where(hits, L[None, :], R[None, :])).sum(axis=1) * self.learning_rate
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Prediction clamped into [0, 1], the value selection sees."""
        return np.clip(self.raw_prediction(X), 0.0, 1.0)

    def apply_increment(self, X: np.ndarray, preds: np.ndarray, start: int) -> int:
        """Add stumps[start:] contributions onto cached raw predictions."""
        for stump in self.stumps[start:]:
            preds += self.learning_rate * np.where(
                X[:, stump.feature] <= stump.threshold, stump.left, stump.right
            )
        return len(self.stumps)

    def to_doc(self) -> dict:
        return {
            "n_features": self.n_features,
            "learning_rate": self.learning_rate,
            "max_stumps": self.max_stumps,
            "stumps": [s.to_doc() for s in self.stumps],
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "RewardModel":
        model = cls(
            n_features=int(doc["n_features"]),
            learning_rate=float(doc["learning_rate"]),
            max_stumps=int(doc["max_stumps"]),
        )
        model.stumps = [Stump.from_doc(s) for s in doc["stumps"]]
        return model
