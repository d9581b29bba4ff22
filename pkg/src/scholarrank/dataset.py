"""Faculty and program records, CSV ingestion, validation, and the embedded ranking fixture."""

from __future__ import annotations

import csv
import enum
import io
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Optional, Sequence

FACULTY_HEADER = ("university", "name", "rank", "t10", "has_profile", "h_index")
PROGRAMS_HEADER = ("university", "name", "usn_cs_score", "usn_university_score")
TABLE7_HEADER = ("rank", "university", "size", "m10", "g10", "c40", "c60", "usn", "scholar")


class DataError(ValueError):
    """A CSV row could not be parsed. ``row`` is the 1-based data row number."""

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class Rank(enum.Enum):
    ASSISTANT = "Assistant"
    ASSOCIATE = "Associate"
    FULL = "Full"

    @classmethod
    def parse(cls, text: str) -> "Rank":
        key = text.strip().lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"unknown rank {text!r}")

    @property
    def is_senior(self) -> bool:
        return self is not Rank.ASSISTANT


@dataclass(frozen=True)
class FacultyRecord:
    university_id: str
    name: str
    rank: Rank
    t10: Optional[int] = None
    has_profile: bool = False
    h_index: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.rank, Rank):
            raise ValueError(f"rank must be a Rank, got {self.rank!r}")
        for attr in ("t10", "h_index"):
            value = getattr(self, attr)
            if value is not None and (not isinstance(value, int) or value < 0):
                raise ValueError(f"{attr} must be a non-negative integer, got {value!r}")

    @property
    def is_senior(self) -> bool:
        return self.rank.is_senior


@dataclass(frozen=True)
class ProgramRecord:
    university_id: str
    name: str
    usn_cs_score: Optional[float] = None
    usn_university_score: Optional[float] = None

    def __post_init__(self):
        if self.usn_cs_score is not None and not 2.0 <= self.usn_cs_score <= 5.0:
            raise ValueError(f"usn_cs_score {self.usn_cs_score} outside [2.0, 5.0]")
        if self.usn_university_score is not None and not 20 <= self.usn_university_score <= 100:
            raise ValueError(
                f"usn_university_score {self.usn_university_score} outside [20, 100]"
            )


@dataclass(frozen=True)
class Dataset:
    programs: tuple[ProgramRecord, ...]
    faculty: tuple[FacultyRecord, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "programs", tuple(self.programs))
        object.__setattr__(self, "faculty", tuple(self.faculty))
        if not self.programs:
            raise ValueError("dataset needs at least one program")
        counts = Counter(p.university_id for p in self.programs)
        dupes = sorted(k for k, n in counts.items() if n > 1)
        if dupes:
            raise ValueError(f"duplicate program ids: {', '.join(dupes)}")
        orphans = sorted({f.university_id for f in self.faculty} - set(counts))
        if orphans:
            raise ValueError(f"faculty reference unknown programs: {', '.join(orphans)}")

    @classmethod
    def from_faculty(cls, faculty: Iterable[FacultyRecord]) -> "Dataset":
        """Build a dataset whose program list is implied by the faculty ids."""
        faculty = tuple(faculty)
        ids = sorted({f.university_id for f in faculty})
        return cls(tuple(ProgramRecord(u, u) for u in ids), faculty)

    def program(self, university_id: str) -> ProgramRecord:
        for p in self.programs:
            if p.university_id == university_id:
                return p
        raise KeyError(university_id)

    def faculty_of(self, university_id: str) -> list[FacultyRecord]:
        return [f for f in self.faculty if f.university_id == university_id]


@dataclass(frozen=True)
class Table7Row:
    rank: int
    university: str
    size: int
    m10: int
    g10: int
    c40: int
    c60: int
    usn: float
    scholar: float

    @property
    def usn_score(self) -> Optional[float]:
        """USN CS score, or None for programs USN left unranked (stored as 0)."""
        return self.usn if self.usn > 0 else None


# ---------------------------------------------------------------------------
# CSV helpers


def _rows(text: str, header: Sequence[str]) -> Iterable[tuple[int, list[str]]]:
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        first = next(reader)
    except StopIteration:
        raise DataError("empty document, expected header " + ",".join(header)) from None
    if [c.strip() for c in first] != list(header):
        raise DataError(f"bad header {first!r}, expected {','.join(header)}")
    for i, row in enumerate(reader, start=1):
        if not row:
            continue
        if len(row) != len(header):
            raise DataError(f"expected {len(header)} columns, got {len(row)}", i)
        yield i, row


def _opt_int(cell: str, what: str, row: int) -> Optional[int]:
    cell = cell.strip()
    if not cell:
        return None
    try:
        value = int(cell)
    except ValueError:
        raise DataError(f"{what} is not an integer: {cell!r}", row) from None
    if value < 0:
        raise DataError(f"negative {what}: {value}", row)
    return value


def _opt_float(cell: str, what: str, row: int) -> Optional[float]:
    cell = cell.strip()
    if not cell:
        return None
    try:
        return float(cell)
    except ValueError:
        raise DataError(f"{what} is not a number: {cell!r}", row) from None


def _bool(cell: str, row: int) -> bool:
    key = cell.strip().lower()
    if key == "true":
        return True
    if key == "false":
        return False
    raise DataError(f"has_profile must be true or false, got {cell!r}", row)


def parse_faculty_csv(text: str) -> list[FacultyRecord]:
    records = []
    for i, row in _rows(text, FACULTY_HEADER):
        university, name, rank, t10, has_profile, h_index = row
        if not university.strip():
            raise DataError("empty university id", i)
        try:
            parsed_rank = Rank.parse(rank)
        except ValueError as exc:
            raise DataError(str(exc), i) from None
        records.append(
            FacultyRecord(
                university_id=university.strip(),
                name=name,
                rank=parsed_rank,
                t10=_opt_int(t10, "t10", i),
                has_profile=_bool(has_profile, i),
                h_index=_opt_int(h_index, "h_index", i),
            )
        )
    return records


def serialize_faculty_csv(records: Iterable[FacultyRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FACULTY_HEADER)
    for r in records:
        writer.writerow(
            [
                r.university_id,
                r.name,
                r.rank.value,
                "" if r.t10 is None else r.t10,
                "true" if r.has_profile else "false",
                "" if r.h_index is None else r.h_index,
            ]
        )
    return buf.getvalue()


def parse_programs_csv(text: str) -> list[ProgramRecord]:
    records = []
    for i, (university, name, cs, univ) in _rows(text, PROGRAMS_HEADER):
        if not university.strip():
            raise DataError("empty university id", i)
        try:
            records.append(
                ProgramRecord(
                    university.strip(),
                    name,
                    _opt_float(cs, "usn_cs_score", i),
                    _opt_float(univ, "usn_university_score", i),
                )
            )
        except DataError:
            raise
        except ValueError as exc:
            raise DataError(str(exc), i) from None
    return records


def serialize_programs_csv(records: Iterable[ProgramRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PROGRAMS_HEADER)
    for p in records:
        writer.writerow(
            [
                p.university_id,
                p.name,
                "" if p.usn_cs_score is None else f"{p.usn_cs_score:g}",
                "" if p.usn_university_score is None else f"{p.usn_university_score:g}",
            ]
        )
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Validation


@dataclass
class ValidationReport:
    total_faculty: int = 0
    senior_faculty: int = 0
    with_t10: int = 0
    senior_with_t10: int = 0
    with_profile: int = 0
    senior_with_profile: int = 0
    senior_with_t10_by_program: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @staticmethod
    def _frac(num: int, den: int) -> float:
        return num / den if den else 0.0

    @property
    def t10_coverage(self) -> float:
        return self._frac(self.with_t10, self.total_faculty)

    @property
    def senior_t10_coverage(self) -> float:
        return self._frac(self.senior_with_t10, self.senior_faculty)

    @property
    def profile_coverage(self) -> float:
        return self._frac(self.with_profile, self.total_faculty)

    @property
    def senior_profile_coverage(self) -> float:
        return self._frac(self.senior_with_profile, self.senior_faculty)

    def as_dict(self) -> dict:
        return {
            "total_faculty": self.total_faculty,
            "senior_faculty": self.senior_faculty,
            "with_t10": self.with_t10,
            "senior_with_t10": self.senior_with_t10,
            "with_profile": self.with_profile,
            "senior_with_profile": self.senior_with_profile,
            "t10_coverage": round(self.t10_coverage, 3),
            "senior_t10_coverage": round(self.senior_t10_coverage, 3),
            "profile_coverage": round(self.profile_coverage, 3),
            "senior_profile_coverage": round(self.senior_profile_coverage, 3),
            "senior_with_t10_by_program": dict(self.senior_with_t10_by_program),
            "warnings": list(self.warnings),
        }


def validate(dataset: Dataset) -> ValidationReport:
    """Summarise coverage of a dataset. Never drops or rejects rows."""
    report = ValidationReport()
    per_program = {p.university_id: 0 for p in dataset.programs}
    for f in dataset.faculty:
        report.total_faculty += 1
        report.with_t10 += f.t10 is not None
        report.with_profile += f.has_profile
        if f.is_senior:
            report.senior_faculty += 1
            report.senior_with_profile += f.has_profile
            if f.t10 is not None:
                report.senior_with_t10 += 1
                per_program[f.university_id] += 1
    report.senior_with_t10_by_program = per_program
    if not dataset.faculty:
        report.warnings.append("no faculty records")
    for uid, n in per_program.items():
        if n == 0:
            report.warnings.append(f"{uid}: no senior faculty with t10")
    return report


def senior_subset(faculty: Iterable[FacultyRecord]) -> list[FacultyRecord]:
    return [f for f in faculty if f.is_senior]


# ---------------------------------------------------------------------------
# Embedded ranking fixture


def table7_csv_text() -> str:
    return resources.files("scholarrank.data").joinpath("table7.csv").read_text("utf-8")


def _parse_table7(text: str) -> list[Table7Row]:
    rows = []
    for i, row in _rows(text, TABLE7_HEADER):
        rank, university, size, m10, g10, c40, c60, usn, scholar = row
        try:
            rows.append(
                Table7Row(
                    int(rank), university, int(size), int(m10), int(g10),
                    int(c40), int(c60), float(usn), float(scholar),
                )
            )
        except ValueError as exc:
            raise DataError(str(exc), i) from None
    return rows


def load_table7_fixture() -> list[Table7Row]:
    return _parse_table7(table7_csv_text())


def serialize_table7(rows: Iterable[Table7Row]) -> str:
    lines = [",".join(TABLE7_HEADER)]
    for r in rows:
        lines.append(
            f"{r.rank},{r.university},{r.size},{r.m10},{r.g10},{r.c40},{r.c60},"
            f"{r.usn:g},{r.scholar:g}"
        )
    return "\n".join(lines) + "\n"
