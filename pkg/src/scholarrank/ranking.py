"""Competition rankings and the comparison reports built on top of them."""

from __future__ import annotations

import bisect
import csv
import io
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

from .dataset import FacultyRecord
from .scholar import ScoreResult
from .stats import pearson

DEFAULT_USN = 1.5


@dataclass(frozen=True)
class RankingEntry:
    rank: int
    university_id: str
    display_score: float
    raw_score: float
    usn_score: Optional[float] = None
    delta: Optional[float] = None


ScoreInput = Union[ScoreResult, tuple]


def _normalize(item: ScoreInput) -> tuple[str, float, float]:
    if isinstance(item, ScoreResult):
        return item.university_id, item.display_score, item.raw_score
    if len(item) == 2:
        return item[0], float(item[1]), float(item[1])
    return item[0], float(item[1]), float(item[2])


def _delta(a: float, b: float) -> float:
    # both sides are usually one-decimal values; strip float noise from the difference
    return round(a - b, 9)


def rank_programs(
    scores: Iterable[ScoreInput],
    usn: Optional[Mapping[str, Optional[float]]] = None,
    by_raw: bool = False,
) -> list[RankingEntry]:
    """Competition ranking, best first; ties share the smallest rank.

    ``scores`` holds ScoreResult objects or ``(university, display[, raw])``
    tuples. Ranks use the display score unless ``by_raw`` is set. Tied
    entries are listed alphabetically.
    """
    items = [_normalize(s) for s in scores]
    key_index = 2 if by_raw else 1
    items.sort(key=lambda t: (-t[key_index], t[0]))
    entries = []
    for i, (uid, display, raw) in enumerate(items):
        if i and items[i - 1][key_index] == items[i][key_index]:
            rank = entries[-1].rank
        else:
            rank = i + 1
        u = None if usn is None else usn.get(uid)
        entries.append(RankingEntry(rank, uid, display, raw, u,
                                    None if u is None else _delta(display, u)))
    return entries


def rankings_csv(entries: Iterable[RankingEntry]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["rank", "university", "scholar", "usn", "delta"])
    for e in entries:
        writer.writerow([
            e.rank, e.university_id, f"{e.display_score:.1f}",
            "" if e.usn_score is None else f"{e.usn_score:.1f}",
            "" if e.delta is None else f"{e.delta:.3f}",
        ])
    return buf.getvalue()


@dataclass(frozen=True)
class GroupStats:
    count: int
    pearson: Optional[float]

    @property
    def insufficient(self) -> bool:
        return self.pearson is None

    def as_dict(self) -> dict:
        return {"count": self.count, "pearson": self.pearson, "insufficient": self.insufficient}


@dataclass(frozen=True)
class GroupReport:
    split: float
    min_usn: float
    high: GroupStats
    low: GroupStats

    def as_dict(self) -> dict:
        return {"split": self.split, "min_usn": self.min_usn,
                "high": self.high.as_dict(), "low": self.low.as_dict()}


def _group(pairs: list[tuple[float, float]]) -> GroupStats:
    if len(pairs) < 3:
        return GroupStats(len(pairs), None)
    xs, ys = zip(*pairs)
    try:
        return GroupStats(len(pairs), pearson(xs, ys))
    except ValueError:
        return GroupStats(len(pairs), None)


def group_correlations(
    scholar: Mapping[str, float],
    usn: Mapping[str, Optional[float]],
    split: float = 2.7,
    min_usn: float = 2.0,
) -> GroupReport:
    if split < min_usn:
        raise ValueError(f"split {split} below min_usn {min_usn}")
    high, low = [], []
    for uid, s in scholar.items():
        u = usn.get(uid)
        if u is None or u < min_usn:
            continue
        (high if u >= split else low).append((s, u))
    return GroupReport(split, min_usn, _group(high), _group(low))


def discrepancy_report(
    scholar: Mapping[str, float],
    usn: Mapping[str, Optional[float]],
    default_usn: float = DEFAULT_USN,
) -> list[tuple[str, float]]:
    """Signed ``scholar - usn`` per program, largest magnitude first."""
    out = []
    for uid, s in scholar.items():
        u = usn.get(uid)
        out.append((uid, _delta(s, default_usn if u is None else u)))
    out.sort(key=lambda t: (-abs(t[1]), t[0]))
    return out


@dataclass(frozen=True)
class BiasTable:
    """``deciles[k]`` is ``(with_profile, without_profile)`` for percentile decile k."""

    deciles: tuple[tuple[int, int], ...]

    @property
    def total(self) -> int:
        return sum(a + b for a, b in self.deciles)

    def as_dict(self) -> list[dict]:
        return [{"decile": k, "with_profile": a, "without_profile": b}
                for k, (a, b) in enumerate(self.deciles)]


def bias_table(faculty: Sequence[FacultyRecord]) -> BiasTable:
    """Profile counts per t10 percentile decile.

    Each faculty member's percentile is the share of the *other* members with
    strictly lower t10, so the lowest value sits in decile 0 and a unique
    maximum in decile 9.
    """
    values = []
    for f in faculty:
        if f.t10 is None:
            raise ValueError(f"{f.name}: bias table needs t10 for every record")
        values.append(f.t10)
    ordered = sorted(values)
    others = len(ordered) - 1
    counts = [[0, 0] for _ in range(10)]
    for f in faculty:
        below = bisect.bisect_left(ordered, f.t10)
        pct = 100.0 * below / others if others else 0.0
        decile = min(9, int(pct // 10))
        counts[decile][0 if f.has_profile else 1] += 1
    return BiasTable(tuple((a, b) for a, b in counts))


def scatter_data(
    scholar: Mapping[str, float],
    usn: Mapping[str, Optional[float]],
    default_usn: float = DEFAULT_USN,
) -> list[tuple[str, float, float]]:
    rows = []
    for uid in sorted(scholar):
        u = usn.get(uid)
        rows.append((uid, scholar[uid], default_usn if u is None else u))
    return rows


def scatter_csv(rows: Iterable[tuple[str, float, float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["university", "joint_score", "usn"])
    for uid, s, u in rows:
        writer.writerow([uid, f"{s:.3f}", f"{u:.1f}"])
    return buf.getvalue()
