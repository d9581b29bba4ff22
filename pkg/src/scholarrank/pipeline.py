"""End-to-end analysis: measures in, models, rankings and reports out."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .dataset import Table7Row, load_table7_fixture
from .measures import DEFAULT_NS, ProgramMeasures
from .ranking import (
    DEFAULT_USN,
    discrepancy_report,
    group_correlations,
    rank_programs,
    rankings_csv,
    scatter_csv,
    scatter_data,
)
from .scholar import (
    AVERAGED,
    CUMULATIVE,
    DEFAULT_UNIVERSITY_SCORE,
    JOINT_FEATURES,
    SCHOLAR_MODEL,
    Feature,
    FittedModel,
    JointModel,
    ModelSpec,
    average_models,
    evaluate,
    predict,
    scholar_score,
    select_best,
    train_grid,
    train_reputation_grid,
)
from .stats import CollinearityError, correlation_table, pearson


@dataclass(frozen=True)
class RunConfig:
    min_usn: float = 2.0
    split: float = 2.7
    default_usn: float = DEFAULT_USN
    default_university_score: float = DEFAULT_UNIVERSITY_SCORE
    ns: tuple[int, ...] = DEFAULT_NS
    best_k: int = 4
    seed: int = 0

    def __post_init__(self):
        # equality is allowed so a joint model can be trained on the top group alone
        if self.min_usn > self.split:
            raise ValueError(f"min_usn {self.min_usn} must not exceed split {self.split}")


def _r3(x: Optional[float]) -> Optional[float]:
    return None if x is None else round(x, 3)


def _cell_dict(cell) -> dict:
    if isinstance(cell, FittedModel):
        d = {
            "beta1": _r3(cell.beta1),
            "beta2": _r3(cell.beta2),
            "r_squared": _r3(cell.diagnostics.r_squared),
            "pearson": _r3(cell.diagnostics.pearson),
            "n": cell.diagnostics.n,
        }
        if cell.beta3 is not None:
            d["beta3"] = round(cell.beta3, 5)
        return d
    return {"unavailable": list(cell.missing)}


def _grid_tables(grid) -> dict:
    r2, r, params = {}, {}, {}
    for a in AVERAGED:
        r2[a.value], r[a.value] = {}, {}
        for c in CUMULATIVE:
            cell = next(v for k, v in grid.items() if k.averaged is a and k.cumulative is c)
            ok = isinstance(cell, FittedModel)
            r2[a.value][c.value] = _r3(cell.diagnostics.r_squared) if ok else None
            r[a.value][c.value] = _r3(cell.diagnostics.pearson) if ok else None
            params[f"{a.value}+{c.value}"] = _cell_dict(cell)
    return {"r_squared": r2, "pearson": r, "models": params}


def _best(grid, wanted: int):
    """Best cells overall, and best cells that a JointModel can average."""
    eligible = {s: c for s, c in grid.items()
                if s.averaged in JOINT_FEATURES and s.cumulative in JOINT_FEATURES}
    trained = sum(isinstance(c, FittedModel) for c in grid.values())
    trained_eligible = sum(isinstance(c, FittedModel) for c in eligible.values())
    return (select_best(grid, min(wanted, trained)),
            select_best(eligible, min(wanted, trained_eligible)))


def _joint_dict(model: JointModel) -> dict:
    return {k: _r3(v) for k, v in model.coefficients.items()}


def _columns(measures: Sequence[ProgramMeasures], ns) -> dict[str, Optional[list[float]]]:
    cols: dict[str, Optional[list[float]]] = {
        "m10": [m.m10 for m in measures],
        "g10": [m.g10 for m in measures],
        "p10": None if any(m.p10 is None for m in measures) else [m.p10 for m in measures],
    }
    for n in ns:
        vals = [m.c.get(n) for m in measures]
        cols[f"c{n}"] = None if None in vals else [float(v) for v in vals]
    return cols


@dataclass
class Analysis:
    config: RunConfig
    report: dict
    joint: JointModel
    scholar_model: JointModel
    rankings: list
    scatter: list
    extras: dict = field(default_factory=dict)

    def write(self, out_dir: Path) -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.json").write_text(
            json.dumps(self.report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        (out_dir / "rankings.csv").write_text(rankings_csv(self.rankings), encoding="utf-8")
        (out_dir / "scatter.csv").write_text(scatter_csv(self.scatter), encoding="utf-8")
        (out_dir / "model.json").write_text(self.scholar_model.to_json(), encoding="utf-8")


def analyze(
    measures: Sequence[ProgramMeasures],
    usn: Mapping[str, Optional[float]],
    config: RunConfig = RunConfig(),
    university_scores: Optional[Mapping[str, Optional[float]]] = None,
) -> Analysis:
    ranked = [m for m in measures if (usn.get(m.university_id) or 0) >= config.min_usn]
    y = [usn[m.university_id] for m in ranked]

    corr = correlation_table(_columns(ranked, config.ns), y)
    size_r = pearson([m.size for m in ranked], y)

    grid = train_grid(measures, usn, config.min_usn)
    overall, best = _best(grid, config.best_k)
    joint = average_models(best)
    joint_diag = evaluate(joint, measures, usn, config.min_usn)
    joint = JointModel(joint.coefficients, joint.provenance,
                       {"min_usn": config.min_usn, "programs": joint_diag.n},
                       joint_diag.as_dict())

    top_grid = train_grid(measures, usn, config.split)
    top_overall, top_best = _best(top_grid, config.best_k)
    scholar_model = average_models(top_best)
    scholar_all = evaluate(scholar_model, measures, usn, config.min_usn)
    scholar_top = evaluate(scholar_model, measures, usn, config.split)
    joint_top = evaluate(joint, measures, usn, config.split)
    scholar_model = JointModel(scholar_model.coefficients, scholar_model.provenance,
                               {"min_usn": config.split, "programs": scholar_top.n},
                               scholar_all.as_dict())

    scores = [scholar_score(m, scholar_model) for m in measures]
    raw = {s.university_id: s.raw_score for s in scores}
    display = {s.university_id: s.display_score for s in scores}
    rankings = rank_programs(scores, usn, by_raw=True)
    groups = group_correlations(raw, usn, config.split, config.min_usn)
    discrepancies = discrepancy_report(display, usn, config.default_usn)
    scatter = scatter_data(raw, usn, config.default_usn)

    report = {
        "config": {
            "min_usn": config.min_usn, "split": config.split,
            "default_usn": config.default_usn,
            "default_university_score": config.default_university_score,
            "ns": list(config.ns), "best_k": config.best_k,
        },
        "programs": {"total": len(measures), "ranked": len(ranked),
                     "unranked": sum(1 for m in measures if usn.get(m.university_id) is None)},
        "size_correlation": _r3(size_r),
        "correlation_table": {k: {c: _r3(v) for c, v in row.items()} for k, row in corr.items()},
        "grid": _grid_tables(grid),
        "best_models": [m.spec.name for m in best],
        "best_models_any_feature": [m.spec.name for m in overall],
        "joint_model": {
            "coefficients": _joint_dict(joint),
            "r_squared": _r3(joint_diag.r_squared), "pearson": _r3(joint_diag.pearson),
            "top_group": {"r_squared": _r3(joint_top.r_squared), "pearson": _r3(joint_top.pearson)},
        },
        "scholar_model": {
            "trained_on_min_usn": config.split,
            "training_programs": scholar_top.n,
            "grid": _grid_tables(top_grid),
            "best_models": [m.spec.name for m in top_best],
            "best_models_any_feature": [m.spec.name for m in top_overall],
            "coefficients": _joint_dict(scholar_model),
            "ranked": {"r_squared": _r3(scholar_all.r_squared), "pearson": _r3(scholar_all.pearson),
                       "n": scholar_all.n},
            "top_group": {"r_squared": _r3(scholar_top.r_squared),
                          "pearson": _r3(scholar_top.pearson), "n": scholar_top.n},
        },
        "group_report": {
            **groups.as_dict(),
            "high": {**groups.high.as_dict(), "pearson": _r3(groups.high.pearson)},
            "low": {**groups.low.as_dict(), "pearson": _r3(groups.low.pearson)},
        },
        "discrepancies": [{"university": u, "delta": _r3(d)} for u, d in discrepancies],
    }

    if university_scores is not None:
        try:
            rep = train_reputation_grid(measures, usn, university_scores, config.min_usn,
                                        config.default_university_score)
        except CollinearityError as exc:
            report["reputation"] = {"error": str(exc)}
        else:
            report["reputation"] = {
                "models": {s.name: _cell_dict(m) for s, m in rep.models.items()},
                "average": {"r_squared": _r3(rep.diagnostics.r_squared),
                            "pearson": _r3(rep.diagnostics.pearson)},
                "best": rep.best.spec.name,
            }

    return Analysis(config, report, joint, scholar_model, rankings, scatter,
                    {"grid": grid, "top_grid": top_grid, "groups": groups,
                     "joint_diag": joint_diag, "scholar_all": scholar_all})


# ---------------------------------------------------------------------------
# Fixture reproduction with golden expectations


GOLDEN_JOINT = {"sqrt_m10": 0.060, "sqrt_g10": 0.062, "sqrt_c40": 0.112, "sqrt_c60": 0.109}
GOLDEN_SCHOLAR = {"sqrt_m10": 0.058, "sqrt_g10": 0.059, "sqrt_c40": 0.121, "sqrt_c60": 0.127}
GOLDEN_SQRT_R = {"m10": 0.890, "g10": 0.887, "c40": 0.877, "c60": 0.909}
GOLDEN_LOG_R = {"m10": 0.865, "g10": 0.856, "c40": 0.840, "c60": 0.875}
MODEL2 = (0.130, 0.218)
MODEL2_R2 = 0.869
JOINT_PEARSON, JOINT_R2 = 0.935, 0.874
SCHOLAR_PEARSON, SCHOLAR_R2 = 0.935, 0.872
HIGH_PEARSON, LOW_PEARSON = 0.913, 0.360
SIZE_PEARSON = 0.676
REPUTATION_BETA3 = 0.0061
GOLDEN_MIN_USN, GOLDEN_SPLIT = 2.0, 2.7


@dataclass(frozen=True)
class Check:
    name: str
    passed: Optional[bool]
    detail: str

    @property
    def line(self) -> str:
        status = {True: "PASS", False: "FAIL", None: "SKIP"}[self.passed]
        return f"[{status}] {self.name}: {self.detail}"


def fixture_inputs(rows: Optional[Sequence[Table7Row]] = None):
    rows = load_table7_fixture() if rows is None else rows
    measures = [ProgramMeasures.from_table7(r) for r in rows]
    usn = {r.university: r.usn_score for r in rows}
    return rows, measures, usn


def _within(value: float, target: float, tol: float) -> bool:
    return abs(value - target) <= tol + 1e-12


def golden_checks(rows: Sequence[Table7Row], analysis: Analysis) -> list[Check]:
    cfg = analysis.config
    golden_min = cfg.min_usn == GOLDEN_MIN_USN
    golden_split = cfg.split == GOLDEN_SPLIT
    checks = []

    measures = [ProgramMeasures.from_table7(r) for r in rows]
    exact = off = 0
    worst = 0.0
    for r, m in zip(rows, measures):
        d = scholar_score(m, SCHOLAR_MODEL).display_score
        diff = abs(d - r.scholar)
        worst = max(worst, diff)
        exact += diff < 1e-9
        off += diff > 0.1 + 1e-9
    checks.append(Check("1 scholar recompute", exact >= 170 and off == 0,
                        f"{exact}/{len(rows)} exact, max diff {worst:.1f}"))

    m2 = FittedModel(ModelSpec(Feature.SQRT_M10, Feature.SQRT_C60), *MODEL2)
    worked = predict(m2, math.sqrt(100), math.sqrt(9))
    checks.append(Check("2 worked example", round(worked, 2) == 2.95, f"{worked:.3f}"))

    if golden_min:
        cell = next(c for s, c in analysis.extras["grid"].items()
                    if s.averaged is Feature.SQRT_M10 and s.cumulative is Feature.SQRT_C60)
        ok = (_within(cell.beta1, MODEL2[0], 0.02) and _within(cell.beta2, MODEL2[1], 0.02)
              and _within(cell.diagnostics.r_squared, MODEL2_R2, 0.01))
        checks.append(Check("3 refit sqrt(m10)+sqrt(c60)", ok,
                            f"beta=({cell.beta1:.3f}, {cell.beta2:.3f}) R2={cell.diagnostics.r_squared:.3f}"))
        table = analysis.report["correlation_table"]
        sq = {k: table["Sqrt"][k] for k in GOLDEN_SQRT_R}
        lg = {k: table["Log"][k] for k in GOLDEN_LOG_R}
        ok = all(_within(sq[k], v, 0.01) for k, v in GOLDEN_SQRT_R.items()) and all(
            _within(lg[k], v, 0.02) for k, v in GOLDEN_LOG_R.items())
        checks.append(Check("4 correlation table", ok, f"sqrt={sq} log={lg}"))
        jd = analysis.extras["joint_diag"]
        co = analysis.joint.coefficients
        ok = (_within(jd.pearson, JOINT_PEARSON, 0.005) and _within(jd.r_squared, JOINT_R2, 0.01)
              and all(_within(co[k], v, 0.01) for k, v in GOLDEN_JOINT.items()))
        checks.append(Check("5 joint model", ok,
                            f"r={jd.pearson:.3f} R2={jd.r_squared:.3f} coef={_joint_dict(analysis.joint)}"))
    else:
        for name in ("3 refit sqrt(m10)+sqrt(c60)", "4 correlation table"):
            checks.append(Check(name, None, f"min_usn={cfg.min_usn} differs from {GOLDEN_MIN_USN}"))
        if cfg.min_usn == GOLDEN_SPLIT:
            co = analysis.joint.coefficients
            ok = all(_within(co[k], v, 0.03) for k, v in GOLDEN_SCHOLAR.items())
            checks.append(Check("5 joint model vs scholar row", ok, f"coef={_joint_dict(analysis.joint)}"))
        else:
            checks.append(Check("5 joint model", None, f"min_usn={cfg.min_usn}"))

    if golden_split and golden_min:
        sa = analysis.extras["scholar_all"]
        co = analysis.scholar_model.coefficients
        ok = (all(_within(co[k], v, 0.03) for k, v in GOLDEN_SCHOLAR.items())
              and _within(sa.pearson, SCHOLAR_PEARSON, 0.005) and _within(sa.r_squared, SCHOLAR_R2, 0.01))
        checks.append(Check("6 scholar model", ok,
                            f"coef={_joint_dict(analysis.scholar_model)} r={sa.pearson:.3f} R2={sa.r_squared:.3f}"))
        g = analysis.extras["groups"]
        ok = (g.high.count == 62 and g.low.count == 57 and g.high.pearson is not None
              and g.low.pearson is not None and _within(g.high.pearson, HIGH_PEARSON, 0.02)
              and _within(g.low.pearson, LOW_PEARSON, 0.06))
        checks.append(Check("7 group split", ok,
                            f"high n={g.high.count} r={_r3(g.high.pearson)}, low n={g.low.count} r={_r3(g.low.pearson)}"))
    else:
        checks.append(Check("6 scholar model", None, "non-default min_usn/split"))
        checks.append(Check("7 group split", None, "non-default min_usn/split"))

    reranked = rank_programs([(r.university, r.scholar) for r in rows])
    published = {r.university: r.rank for r in rows}
    mismatched = sum(1 for e in reranked if published[e.university_id] != e.rank)
    checks.append(Check("8 rank reproduction", mismatched == 0,
                        f"{len(rows) - mismatched}/{len(rows)} ranks match"))

    hi, lo = REPUTATION_BETA3 * 100, REPUTATION_BETA3 * 20
    checks.append(Check("9 reputation arithmetic", round(hi, 3) == 0.61 and round(lo, 3) == 0.122,
                        f"us=100 -> {hi:.3f}, us=20 -> {lo:.3f}"))

    if golden_min:
        sr = analysis.report["size_correlation"]
        checks.append(Check("10 size correlation", _within(sr, SIZE_PEARSON, 0.05), f"r={sr:.3f}"))
    else:
        checks.append(Check("10 size correlation", None, f"min_usn={cfg.min_usn}"))
    return checks


def reproduce(config: RunConfig = RunConfig(), out_dir: Optional[Path] = None):
    rows, measures, usn = fixture_inputs()
    analysis = analyze(measures, usn, config)
    checks = golden_checks(rows, analysis)
    analysis.report["checks"] = [
        {"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks
    ]
    if out_dir is not None:
        analysis.write(out_dir)
    return analysis, checks
