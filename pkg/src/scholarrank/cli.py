"""Command-line interface.

Exit codes: 0 success, 1 validation or acceptance failure, 2 I/O or usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .dataset import (
    DataError,
    Dataset,
    parse_faculty_csv,
    parse_programs_csv,
    senior_subset,
    serialize_faculty_csv,
    validate,
)
from .measures import DEFAULT_NS, compute_all_measures, measures_to_csv
from .pipeline import RunConfig, analyze, fixture_inputs, reproduce
from .ranking import bias_table, rank_programs, rankings_csv
from .scholar import SCHOLAR_MODEL, JointModel, scholar_score
from .synthgen import SynthConfig, generate

log = logging.getLogger("scholarrank")

EXIT_OK, EXIT_FAIL, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: Optional[str], what: str) -> str:
    if path is None:
        raise UsageError(f"--{what} is required")
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"file not found: {path}")
    return p.read_text(encoding="utf-8")


def _load_dataset(args) -> Dataset:
    faculty = parse_faculty_csv(_read(args.faculty, "faculty"))
    if args.programs:
        programs = parse_programs_csv(_read(args.programs, "programs"))
        return Dataset(programs, faculty)
    return Dataset.from_faculty(faculty)


def _ns(text: str) -> tuple[int, ...]:
    try:
        ns = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad percent list {text!r}") from None
    if not all(0 < n < 100 for n in ns):
        raise argparse.ArgumentTypeError("percents must be in (0, 100)")
    return ns


def _config(args) -> RunConfig:
    try:
        return RunConfig(
            min_usn=args.min_usn, split=args.split, default_usn=args.default_usn,
            default_university_score=args.default_univ_score, ns=args.ns, seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")
    log.info("wrote %s", path)


def _measures_and_usn(args, ns):
    dataset = _load_dataset(args)
    result = compute_all_measures(dataset, ns)
    for exc in result.undefined:
        log.warning("excluded %s", exc)
    usn = {p.university_id: p.usn_cs_score for p in dataset.programs}
    univ = {p.university_id: p.usn_university_score for p in dataset.programs}
    return dataset, result, usn, univ


# ---------------------------------------------------------------------------
# Commands


def cmd_validate(args) -> int:
    report = validate(_load_dataset(args))
    print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_measures(args) -> int:
    _, result, _, _ = _measures_and_usn(args, args.ns)
    out = _out(args)
    _write(out / "measures.csv", measures_to_csv(result.measures, args.ns))
    if result.percentiles is not None:
        thresholds = {str(k): v for k, v in result.percentiles.thresholds.items()}
        _write(out / "percentiles.json", json.dumps(thresholds, indent=2) + "\n")
    return EXIT_OK


def cmd_fit(args) -> int:
    config = _config(args)
    if args.table7:
        _, measures, usn = fixture_inputs()
        univ = None
    else:
        _, result, usn, univ = _measures_and_usn(args, config.ns)
        measures = result.measures
    analysis = analyze(measures, usn, config, univ if _has_scores(univ) else None)
    out = _out(args)
    _write(out / "model.json", analysis.joint.to_json())
    fit_report = {k: analysis.report[k] for k in ("grid", "best_models", "joint_model")}
    if "reputation" in analysis.report:
        fit_report["reputation"] = analysis.report["reputation"]
    _write(out / "fit.json", json.dumps(fit_report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_score(args) -> int:
    model = SCHOLAR_MODEL
    if args.model:
        model = JointModel.from_json(_read(args.model, "model"))
    if not parse_faculty_csv(_read(args.faculty, "faculty")):
        log.error("no programs scorable")
        return EXIT_FAIL
    _, result, usn, _ = _measures_and_usn(args, DEFAULT_NS)
    if not result.measures:
        log.error("no programs scorable")
        return EXIT_FAIL
    scores = [scholar_score(m, model) for m in result.measures]
    entries = rank_programs(scores, usn, by_raw=True)
    _write(_out(args) / "rankings.csv", rankings_csv(entries))
    return EXIT_OK


def cmd_rank(args) -> int:
    reader = csv.DictReader(io.StringIO(_read(args.scores, "scores"), newline=""))
    if reader.fieldnames is None or not {"university", "scholar"} <= set(reader.fieldnames):
        raise DataError("scores CSV needs university and scholar columns")
    scores, usn = [], {}
    for i, row in enumerate(reader, start=1):
        try:
            scores.append((row["university"], float(row["scholar"])))
            usn[row["university"]] = float(row["usn"]) if row.get("usn") else None
        except ValueError as exc:
            raise DataError(str(exc), i) from None
    _write(_out(args) / "rankings.csv", rankings_csv(rank_programs(scores, usn)))
    return EXIT_OK


def _has_scores(univ) -> bool:
    return bool(univ) and any(v is not None for v in univ.values())


def cmd_report(args) -> int:
    config = _config(args)
    extra = {}
    if args.table7:
        _, measures, usn = fixture_inputs()
        univ = None
    else:
        dataset, result, usn, univ = _measures_and_usn(args, config.ns)
        measures = result.measures
        seniors = [f for f in senior_subset(dataset.faculty) if f.t10 is not None]
        extra["validation"] = validate(dataset).as_dict()
        extra["excluded"] = [e.university_id for e in result.undefined]
        if result.percentiles is not None:
            extra["percentiles"] = {str(k): v for k, v in result.percentiles.thresholds.items()}
        if seniors:
            extra["profile_bias"] = bias_table(seniors).as_dict()
    analysis = analyze(measures, usn, config, univ if _has_scores(univ) else None)
    analysis.report.update(extra)
    analysis.write(_out(args))
    return EXIT_OK


def cmd_reproduce(args) -> int:
    config = _config(args)
    _, checks = reproduce(config, _out(args))
    for c in checks:
        print(c.line)
    failed = [c for c in checks if c.passed is False]
    passed = sum(c.passed is True for c in checks)
    print(f"{passed} passed, {len(failed)} failed, {len(checks) - passed - len(failed)} skipped")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_synth(args) -> int:
    try:
        config = SynthConfig(n=args.n, seed=args.seed, n_programs=args.programs_count)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(_out(args) / "faculty.csv", serialize_faculty_csv(generate(config)))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scholarrank", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def inputs(p, programs=True):
        p.add_argument("--faculty", help="faculty CSV")
        if programs:
            p.add_argument("--programs", help="programs CSV with USN scores")

    def tuning(p):
        p.add_argument("--min-usn", type=float, default=2.0)
        p.add_argument("--split", type=float, default=2.7)
        p.add_argument("--default-usn", type=float, default=1.5)
        p.add_argument("--default-univ-score", type=float, default=20.0)
        p.add_argument("--ns", type=_ns, default=DEFAULT_NS, help="percentiles, e.g. 20,40,60,80")
        p.add_argument("--seed", type=int, default=0)

    def out(p):
        p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("validate", help="parse inputs and print a coverage report")
    inputs(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("measures", help="compute per-program citation measures")
    inputs(p)
    p.add_argument("--ns", type=_ns, default=DEFAULT_NS)
    out(p)
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("fit", help="train the model grid and write the joint model")
    inputs(p)
    p.add_argument("--table7", action="store_true", help="train on the embedded fixture")
    tuning(p)
    out(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("score", help="score and rank programs with a joint model")
    inputs(p)
    p.add_argument("--model", help="model JSON (default: published Scholar model)")
    out(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("rank", help="competition-rank a university,scholar[,usn] CSV")
    p.add_argument("--scores", help="scores CSV")
    out(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("report", help="full analysis bundle")
    inputs(p)
    p.add_argument("--table7", action="store_true", help="analyse the embedded fixture")
    tuning(p)
    out(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("reproduce", help="rerun the fixture analysis against golden values")
    tuning(p)
    out(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("synth", help="write a synthetic faculty CSV")
    p.add_argument("--n", type=int, default=3330)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--programs-count", type=int, default=20)
    out(p)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
