"""Fixed-intercept ranking models: the 3x3 grid, best-k averaging, Scholar scores."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, Optional, Sequence, Union

from .measures import ProgramMeasures
from .stats import CollinearityError, FitDiagnostics, diagnose, fit_fixed_intercept

INTERCEPT = 1.0
MIN_TRAINING_ROWS = 10
DEFAULT_UNIVERSITY_SCORE = 20.0


class Feature(str, enum.Enum):
    SQRT_M10 = "sqrt_m10"
    SQRT_G10 = "sqrt_g10"
    P10 = "p10"
    SQRT_C40 = "sqrt_c40"
    SQRT_C60 = "sqrt_c60"
    SQRT_C80 = "sqrt_c80"

    def value_of(self, m: ProgramMeasures) -> Optional[float]:
        if self is Feature.SQRT_M10:
            return math.sqrt(m.m10)
        if self is Feature.SQRT_G10:
            return math.sqrt(m.g10)
        if self is Feature.P10:
            return m.p10
        count = m.c.get(int(self.value[len("sqrt_c"):]))
        return None if count is None else math.sqrt(count)


AVERAGED = (Feature.SQRT_M10, Feature.SQRT_G10, Feature.P10)
CUMULATIVE = (Feature.SQRT_C40, Feature.SQRT_C60, Feature.SQRT_C80)
JOINT_FEATURES = (Feature.SQRT_M10, Feature.SQRT_G10, Feature.SQRT_C40, Feature.SQRT_C60)


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    averaged: Feature
    cumulative: Feature
    use_reputation: bool = False

    def __post_init__(self):
        if self.averaged not in AVERAGED:
            raise ValueError(f"{self.averaged} is not an averaged measure")
        if self.cumulative not in CUMULATIVE:
            raise ValueError(f"{self.cumulative} is not a cumulative measure")

    @property
    def order(self) -> tuple[int, int]:
        return AVERAGED.index(self.averaged), CUMULATIVE.index(self.cumulative)

    @property
    def name(self) -> str:
        base = f"{self.averaged.value}+{self.cumulative.value}"
        return base + "+us" if self.use_reputation else base


@dataclass(frozen=True)
class FittedModel:
    spec: ModelSpec
    beta1: float
    beta2: float
    beta3: Optional[float] = None
    diagnostics: Optional[FitDiagnostics] = None

    def __post_init__(self):
        if (self.beta3 is not None) != self.spec.use_reputation:
            raise ValueError("beta3 must be present exactly when the spec uses reputation")

    @property
    def intercept(self) -> float:
        return INTERCEPT

    @property
    def coefficients(self) -> dict[str, float]:
        return {self.spec.averaged.value: self.beta1, self.spec.cumulative.value: self.beta2}


@dataclass(frozen=True)
class FeatureUnavailable:
    """Grid cell that could not be trained because a measure is missing."""

    spec: ModelSpec
    missing: tuple[str, ...]


GridCell = Union[FittedModel, FeatureUnavailable]


def predict(model: FittedModel, a: float, c: float, us: Optional[float] = None) -> float:
    """Model output for feature values ``a`` and ``c`` (already transformed)."""
    if (us is not None) != (model.beta3 is not None):
        raise ValueError("university score must be given exactly when the model has beta3")
    out = INTERCEPT + model.beta1 * a + model.beta2 * c
    if us is not None:
        out += model.beta3 * us
    return out


def _training_rows(
    measures: Sequence[ProgramMeasures], usn: Mapping[str, Optional[float]], min_usn: float
) -> list[tuple[ProgramMeasures, float]]:
    rows = []
    for m in measures:
        score = usn.get(m.university_id)
        if score is not None and score >= min_usn:
            rows.append((m, score))
    if len(rows) < MIN_TRAINING_ROWS:
        raise InsufficientData(
            f"only {len(rows)} programs with usn >= {min_usn}; need {MIN_TRAINING_ROWS}"
        )
    return rows


def _fit(spec: ModelSpec, rows, extra: Optional[Sequence[float]] = None) -> GridCell:
    a = [spec.averaged.value_of(m) for m, _ in rows]
    c = [spec.cumulative.value_of(m) for m, _ in rows]
    missing = tuple(
        f.value for f, col in ((spec.averaged, a), (spec.cumulative, c)) if None in col
    )
    if missing:
        return FeatureUnavailable(spec, missing)
    y = [s for _, s in rows]
    cols = [a, c] if extra is None else [a, c, list(extra)]
    beta = fit_fixed_intercept(cols, y, INTERCEPT)
    preds = [
        INTERCEPT + math.fsum(b * col[i] for b, col in zip(beta, cols)) for i in range(len(y))
    ]
    return FittedModel(spec, beta[0], beta[1], beta[2] if extra is not None else None,
                       diagnose(preds, y))


def train_grid(
    measures: Sequence[ProgramMeasures],
    usn: Mapping[str, Optional[float]],
    min_usn: float = 2.0,
) -> dict[ModelSpec, GridCell]:
    rows = _training_rows(measures, usn, min_usn)
    return {ModelSpec(a, c): _fit(ModelSpec(a, c), rows) for a in AVERAGED for c in CUMULATIVE}


def select_best(grid: Mapping[ModelSpec, GridCell], k: int) -> list[FittedModel]:
    """Top ``k`` trained cells by R², then Pearson, then feature order."""
    fitted = [m for m in grid.values() if isinstance(m, FittedModel)]
    if not fitted:
        raise ValueError("grid has no trained models")
    if not 1 <= k <= len(fitted):
        raise ValueError(f"k={k} outside 1..{len(fitted)}")
    fitted.sort(key=lambda m: (-m.diagnostics.r_squared, -m.diagnostics.pearson, m.spec.order))
    return fitted[:k]


@dataclass(frozen=True)
class JointModel:
    coefficients: Mapping[str, float]
    provenance: tuple[str, ...] = ()
    trained_on: Optional[Mapping] = None
    diagnostics: Optional[Mapping] = None

    def __post_init__(self):
        unknown = set(self.coefficients) - {f.value for f in JOINT_FEATURES}
        if unknown:
            raise ValueError(f"unsupported joint features: {sorted(unknown)}")
        full = {f.value: float(self.coefficients.get(f.value, 0.0)) for f in JOINT_FEATURES}
        object.__setattr__(self, "coefficients", full)

    @property
    def intercept(self) -> float:
        return INTERCEPT

    def raw_score(self, m: ProgramMeasures) -> float:
        total = INTERCEPT
        for f in JOINT_FEATURES:
            value = f.value_of(m)
            if value is None:
                raise ValueError(f"{m.university_id}: missing {f.value}")
            total += self.coefficients[f.value] * value
        return total

    def to_json(self) -> str:
        doc = {
            "intercept": INTERCEPT,
            "coefficients": dict(self.coefficients),
            "trained_on": dict(self.trained_on or {}),
            "diagnostics": dict(self.diagnostics or {}),
        }
        if self.provenance:
            doc["provenance"] = list(self.provenance)
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "JointModel":
        doc = json.loads(text)
        if doc.get("intercept", INTERCEPT) != INTERCEPT:
            raise ValueError("model intercept must be 1.0")
        return cls(doc["coefficients"], tuple(doc.get("provenance", ())),
                   doc.get("trained_on") or None, doc.get("diagnostics") or None)


# Published Scholar model coefficients.
SCHOLAR_MODEL = JointModel(
    {"sqrt_m10": 0.058, "sqrt_g10": 0.059, "sqrt_c40": 0.121, "sqrt_c60": 0.127},
    provenance=("published",),
)


def average_models(models: Sequence[FittedModel]) -> JointModel:
    if not models:
        raise ValueError("nothing to average")
    sums = {f.value: 0.0 for f in JOINT_FEATURES}
    for m in models:
        if m.spec.use_reputation:
            raise ValueError(f"{m.spec.name}: reputation models cannot join a JointModel")
        for name, coef in m.coefficients.items():
            if name not in sums:
                raise ValueError(f"{m.spec.name}: {name} is not a joint feature")
            sums[name] += coef
    return JointModel({k: v / len(models) for k, v in sums.items()},
                      tuple(m.spec.name for m in models))


def round1(x: float) -> float:
    """Round to one decimal, halves away from zero, on the shortest decimal repr."""
    return float(Decimal(repr(x)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def display_score(raw: float) -> float:
    return min(5.0, max(1.0, round1(raw)))


@dataclass(frozen=True)
class ScoreResult:
    university_id: str
    raw_score: float
    display_score: float


def scholar_score(measures: ProgramMeasures, model: JointModel = SCHOLAR_MODEL) -> ScoreResult:
    raw = model.raw_score(measures)
    return ScoreResult(measures.university_id, raw, display_score(raw))


def evaluate(
    model: JointModel,
    measures: Sequence[ProgramMeasures],
    usn: Mapping[str, Optional[float]],
    min_usn: float = 2.0,
    max_usn: float = math.inf,
) -> FitDiagnostics:
    """Diagnostics of a joint model against USN scores in ``[min_usn, max_usn)``."""
    preds, obs = [], []
    for m in measures:
        s = usn.get(m.university_id)
        if s is not None and min_usn <= s < max_usn:
            preds.append(model.raw_score(m))
            obs.append(s)
    return diagnose(preds, obs)


# ---------------------------------------------------------------------------
# Reputation-augmented models


@dataclass(frozen=True)
class ReputationEnsemble:
    models: Mapping[ModelSpec, FittedModel]
    diagnostics: FitDiagnostics
    default_university_score: float = DEFAULT_UNIVERSITY_SCORE

    @property
    def best(self) -> FittedModel:
        return max(self.models.values(),
                   key=lambda m: (m.diagnostics.r_squared, m.diagnostics.pearson))

    def predict(self, m: ProgramMeasures, university_score: Optional[float]) -> float:
        us = self.default_university_score if university_score is None else university_score
        outs = [predict(fm, spec.averaged.value_of(m), spec.cumulative.value_of(m), us)
                for spec, fm in self.models.items()]
        return math.fsum(outs) / len(outs)


def train_reputation_grid(
    measures: Sequence[ProgramMeasures],
    usn_cs: Mapping[str, Optional[float]],
    usn_university: Mapping[str, Optional[float]],
    min_usn: float = 2.0,
    default_university_score: float = DEFAULT_UNIVERSITY_SCORE,
) -> ReputationEnsemble:
    rows = _training_rows(measures, usn_cs, min_usn)
    us = []
    for m, _ in rows:
        score = usn_university.get(m.university_id)
        us.append(default_university_score if score is None else float(score))
    if all(v == us[0] for v in us):
        raise CollinearityError(
            "university scores are constant over the training rows; "
            "their coefficient is confounded with the fixed intercept"
        )
    models = {}
    for a in (Feature.SQRT_M10, Feature.SQRT_G10):
        for c in (Feature.SQRT_C40, Feature.SQRT_C60):
            spec = ModelSpec(a, c, use_reputation=True)
            cell = _fit(spec, rows, us)
            if isinstance(cell, FeatureUnavailable):
                raise ValueError(f"{spec.name}: missing {', '.join(cell.missing)}")
            models[spec] = cell
    preds = []
    for i, (m, _) in enumerate(rows):
        outs = [predict(fm, s.averaged.value_of(m), s.cumulative.value_of(m), us[i])
                for s, fm in models.items()]
        preds.append(math.fsum(outs) / len(outs))
    return ReputationEnsemble(models, diagnose(preds, [s for _, s in rows]),
                              default_university_score)
