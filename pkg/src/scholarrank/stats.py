"""Transforms, correlation, R² and fixed-intercept least squares.

Everything here is pure Python over sequences of floats. The systems solved
are at most 3x3, so the normal equations are formed with ``math.fsum`` and
eliminated directly; results are bit-for-bit reproducible across runs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

PIVOT_TOL = 1e-12


class CollinearityError(ValueError):
    pass


class Transform(enum.Enum):
    IDENTITY = "Original"
    LOG1P = "Log"
    SQRT = "Sqrt"

    def label(self, name: str) -> str:
        if self is Transform.IDENTITY:
            return name
        return f"{'log' if self is Transform.LOG1P else 'sqrt'}({name})"


def transform(values: Sequence[float], kind: Transform) -> list[float]:
    out = []
    for v in values:
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"transform needs finite non-negative values, got {v!r}")
        if kind is Transform.SQRT:
            out.append(math.sqrt(v))
        elif kind is Transform.LOG1P:
            out.append(math.log1p(v))
        else:
            out.append(float(v))
    return out


@dataclass(frozen=True)
class FeatureVector:
    values: tuple[float, ...]
    label: str

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError(f"{self.label}: non-finite value")

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True)
class FitDiagnostics:
    r_squared: float
    pearson: float
    n: int

    def as_dict(self) -> dict:
        return {"r_squared": self.r_squared, "pearson": self.pearson, "n": self.n}


def _check_pair(x: Sequence[float], y: Sequence[float]) -> None:
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValueError("need at least 2 observations")


def _centered(values: Sequence[float]) -> list[float]:
    mean = math.fsum(values) / len(values)
    return [v - mean for v in values]


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    _check_pair(x, y)
    if all(v == x[0] for v in x) or all(v == y[0] for v in y):
        raise ValueError("zero variance")
    dx, dy = _centered(x), _centered(y)
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    sxx = math.fsum(a * a for a in dx)
    syy = math.fsum(b * b for b in dy)
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def r_squared(predicted: Sequence[float], observed: Sequence[float]) -> float:
    """1 - SS_res / SS_tot with SS_tot about the observed mean; can be negative."""
    _check_pair(predicted, observed)
    if all(v == observed[0] for v in observed):
        raise ValueError("zero variance in observed")
    ss_res = math.fsum((o - p) ** 2 for p, o in zip(predicted, observed))
    ss_tot = math.fsum(d * d for d in _centered(observed))
    return 1.0 - ss_res / ss_tot


def diagnose(predicted: Sequence[float], observed: Sequence[float]) -> FitDiagnostics:
    return FitDiagnostics(r_squared(predicted, observed), pearson(predicted, observed), len(observed))


def _solve(a: list[list[float]], b: list[float]) -> list[float]:
    """Gaussian elimination with partial pivoting on a small dense system."""
    n = len(b)
    m = [row[:] + [rhs] for row, rhs in zip(a, b)]
    scale = max((abs(v) for row in a for v in row), default=0.0)
    tol = PIVOT_TOL * max(scale, 1.0)
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(m[r][col]))
        if abs(m[pivot][col]) < tol:
            raise CollinearityError("normal matrix is singular; features are collinear")
        m[col], m[pivot] = m[pivot], m[col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            if f:
                for c in range(col, n + 1):
                    m[r][c] -= f * m[col][c]
    x = [0.0] * n
    for r in reversed(range(n)):
        acc = m[r][n] - math.fsum(m[r][c] * x[c] for c in range(r + 1, n))
        x[r] = acc / m[r][r]
    return x


FeatureLike = Union[FeatureVector, Sequence[float]]


def fit_fixed_intercept(
    features: Sequence[FeatureLike], y: Sequence[float], intercept: float = 1.0
) -> list[float]:
    """Least-squares slopes for ``y ~ intercept + sum_j beta_j * x_j``.

    The intercept is pinned, so the fit is an ordinary no-intercept regression
    of ``y - intercept`` on the feature columns.
    """
    k = len(features)
    if not 1 <= k <= 3:
        raise ValueError(f"expected 1 to 3 features, got {k}")
    cols = [[float(v) for v in f] for f in features]
    n = len(y)
    if any(len(c) != n for c in cols):
        raise ValueError("every feature must have the same length as y")
    if n <= k:
        raise ValueError(f"need more than {k} observations, got {n}")
    target = [v - intercept for v in y]
    gram = [[math.fsum(a * b for a, b in zip(cols[i], cols[j])) for j in range(k)] for i in range(k)]
    rhs = [math.fsum(a * t for a, t in zip(cols[i], target)) for i in range(k)]
    return _solve(gram, rhs)


def linear_predict(
    features: Sequence[FeatureLike], beta: Sequence[float], intercept: float = 1.0
) -> list[float]:
    cols = [list(f) for f in features]
    n = len(cols[0]) if cols else 0
    return [intercept + math.fsum(b * c[i] for b, c in zip(beta, cols)) for i in range(n)]


def correlation_table(
    columns: Mapping[str, Optional[Sequence[float]]],
    y: Sequence[float],
    kinds: Sequence[Transform] = tuple(Transform),
) -> dict[str, dict[str, Optional[float]]]:
    """Pearson of each column (under each transform) against ``y``.

    Columns given as None are reported as None, so a partially observed table
    keeps its full shape.
    """
    table: dict[str, dict[str, Optional[float]]] = {}
    for kind in kinds:
        row: dict[str, Optional[float]] = {}
        for name, values in columns.items():
            row[name] = None if values is None else pearson(transform(values, kind), y)
        table[kind.value] = row
    return table
