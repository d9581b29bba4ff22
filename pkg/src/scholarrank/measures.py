"""Faculty citation indices and program-level aggregate measures."""

from __future__ import annotations

import bisect
import csv
import io
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .dataset import Dataset, FacultyRecord, Table7Row

DEFAULT_NS = (20, 40, 60, 80)


class MeasuresUndefined(ValueError):
    def __init__(self, university_id: str, reason: str = "no senior faculty with t10"):
        self.university_id = university_id
        super().__init__(f"{university_id}: {reason}")


def compute_t10(citation_counts: Sequence[int]) -> int:
    """Citations of the 10th most-cited paper, 0 with fewer than 10 papers."""
    if len(citation_counts) < 10:
        return 0
    return sorted(citation_counts, reverse=True)[9]


def compute_h_index(citation_counts: Sequence[int]) -> int:
    h = 0
    for i, c in enumerate(sorted(citation_counts, reverse=True), start=1):
        if c < i:
            break
        h = i
    return h


class Population:
    """Sorted senior t10 values with nearest-rank percentile lookups."""

    def __init__(self, values: Iterable[int]):
        self.values = tuple(sorted(values))
        if not self.values:
            raise ValueError("percentile population is empty")

    def __len__(self):
        return len(self.values)

    def threshold(self, percent: float) -> int:
        if not 0 < percent < 100:
            raise ValueError(f"percent must be in (0, 100), got {percent}")
        index = math.ceil(Fraction(percent) * len(self.values) / 100) - 1
        return self.values[index]

    def percentile_of(self, value: float) -> float:
        """Percent of the population strictly below ``value``."""
        return 100.0 * bisect.bisect_left(self.values, value) / len(self.values)

    def table(self, percents: Iterable[float]) -> "PercentileTable":
        return PercentileTable({p: self.threshold(p) for p in percents})


@dataclass(frozen=True)
class PercentileTable:
    thresholds: Mapping[float, int]

    def __post_init__(self):
        ordered = [self.thresholds[k] for k in sorted(self.thresholds)]
        if any(a > b for a, b in zip(ordered, ordered[1:])):
            raise ValueError("percentile thresholds must be non-decreasing")


def percentile_threshold(senior_t10: Sequence[int], percent: float) -> int:
    return Population(senior_t10).threshold(percent)


def t10_percentile_of(value: float, senior_t10: Sequence[int]) -> float:
    return Population(senior_t10).percentile_of(value)


@dataclass(frozen=True)
class ProgramMeasures:
    university_id: str
    size: int
    m10: float
    g10: float
    p10: Optional[float]
    c: Mapping[int, int] = field(default_factory=dict)

    @classmethod
    def from_table7(cls, row: Table7Row) -> "ProgramMeasures":
        # the fixture carries m10, g10, c40 and c60 only
        return cls(row.university, row.size, float(row.m10), float(row.g10), None,
                   {40: row.c40, 60: row.c60})


def _as_population(pop: Union[Population, Sequence[int]]) -> Population:
    return pop if isinstance(pop, Population) else Population(pop)


def program_measures(
    program_faculty: Sequence[FacultyRecord],
    senior_population: Union[Population, Sequence[int]],
    ns: Sequence[int] = DEFAULT_NS,
    university_id: Optional[str] = None,
) -> ProgramMeasures:
    if university_id is None:
        university_id = program_faculty[0].university_id if program_faculty else "<unknown>"
    known = [f for f in program_faculty if f.t10 is not None]
    senior = [f.t10 for f in known if f.is_senior]
    if not senior:
        raise MeasuresUndefined(university_id)
    pop = _as_population(senior_population)
    m10 = float(statistics.median(senior))
    g10 = math.exp(math.fsum(math.log1p(t) for t in senior) / len(senior))
    p10 = math.fsum(pop.percentile_of(t) for t in senior) / len(senior)
    counts = {}
    for n in ns:
        cut = pop.threshold(n)
        # t10 = 0 never counts as highly cited, even when the cut itself is 0
        counts[n] = sum(1 for f in known if f.t10 >= cut and f.t10 > 0)
    return ProgramMeasures(university_id, len(known), m10, g10, p10, counts)


@dataclass
class MeasuresReport:
    measures: list[ProgramMeasures]
    undefined: list[MeasuresUndefined]
    percentiles: Optional[PercentileTable]


def senior_population(faculty: Iterable[FacultyRecord]) -> list[int]:
    return [f.t10 for f in faculty if f.is_senior and f.t10 is not None]


def compute_all_measures(dataset: Dataset, ns: Sequence[int] = DEFAULT_NS) -> MeasuresReport:
    pooled = senior_population(dataset.faculty)
    if not pooled:
        undefined = [MeasuresUndefined(p.university_id) for p in dataset.programs]
        return MeasuresReport([], undefined, None)
    pop = Population(pooled)
    by_program: dict[str, list[FacultyRecord]] = {p.university_id: [] for p in dataset.programs}
    for f in dataset.faculty:
        by_program[f.university_id].append(f)
    measures, undefined = [], []
    for p in dataset.programs:
        try:
            measures.append(program_measures(by_program[p.university_id], pop, ns, p.university_id))
        except MeasuresUndefined as exc:
            undefined.append(exc)
    return MeasuresReport(measures, undefined, pop.table(ns))


def _median_text(value: float) -> str:
    # medians of integers are whole or halves; print them exactly
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def measures_to_csv(measures: Iterable[ProgramMeasures], ns: Sequence[int] = DEFAULT_NS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["university", "size", "m10", "g10", "p10"] + [f"c{n}" for n in ns])
    for m in measures:
        writer.writerow(
            [m.university_id, m.size, _median_text(m.m10), f"{m.g10:.3f}",
             "" if m.p10 is None else f"{m.p10:.3f}"]
            + [m.c.get(n, "") for n in ns]
        )
    return buf.getvalue()


def parse_measures_csv(text: str) -> list[ProgramMeasures]:
    reader = csv.DictReader(io.StringIO(text, newline=""))
    out = []
    for row in reader:
        counts = {}
        for key, value in row.items():
            if key.startswith("c") and key[1:].isdigit() and value != "":
                counts[int(key[1:])] = int(value)
        p10 = row.get("p10") or None
        out.append(ProgramMeasures(row["university"], int(row["size"]), float(row["m10"]),
                                   float(row["g10"]), None if p10 is None else float(p10), counts))
    return out
