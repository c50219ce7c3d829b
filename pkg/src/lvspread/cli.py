"""Command line: ``lvspread {predict,front-speed,simulate,verify,export} --scenario FILE``.

Exit codes: 0 success, 1 verification mismatch, 2 invalid input or cache
mismatch, 3 numerical failure, 4 hypotheses not satisfied (outputs are still
written, with a warning banner).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._kernels import set_threads
from .errors import (
    BlowUpError,
    CacheMismatchError,
    InconclusiveError,
    InsufficientDataError,
    LVSpreadError,
    PreconditionError,
    ValidationError,
)
from .fronts import FrontSpeedEstimate, check_assumptions, estimate_cuv
from .geometry.conditions import (
    ConditionReport,
    Verdict,
    check_direction_cover,
    check_path_condition,
    check_star_shaped,
    check_strict_dominance_closure,
    region_where_greater,
)
from .geometry.directions import TWO_PI
from .geometry.profiles import dominance_set, profiles_to_csv, s_u_profile, speed_profile
from .geometry.sets import SpreadingSets
from .geometry.shapes import unbounded_directions
from .measurement import compare_report
from .scenario import Scenario, parse_scenario
from .simulator import SnapshotSeries, read_snapshot, run

log = logging.getLogger("lvspread")

EXIT_OK, EXIT_MISMATCH, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_HYPOTHESIS = 0, 1, 2, 3, 4
ENV_OUT = "LVSPREAD_OUT"
PROFILE_SAMPLES = 720


def _hash_line(h: str) -> str:
    return f"# scenario_hash: {h}\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# ---------------------------------------------------------------------------
# c_uv: scenario value, cache, or fresh estimate


def _cuv_from_cache(out: Path, h: str) -> FrontSpeedEstimate | None:
    cache = out / "front_speed.json"
    if not cache.exists():
        return None
    data = json.loads(cache.read_text())
    if data.get("scenario_hash") != h:
        raise CacheMismatchError(f"{cache} was produced by scenario {data.get('scenario_hash', '?')[:12]}, "
                                 f"not {h[:12]}; use a fresh --out directory")
    est = data["estimate"]
    return FrontSpeedEstimate(**{k: est[k] for k in ("value", "ci_halfwidth", "dx", "dt", "length", "horizon",
                                                     "level", "coarse", "fine")})


def _store_cuv(out: Path, h: str, est: FrontSpeedEstimate, sc: Scenario) -> None:
    body = {k: getattr(est, k) for k in ("value", "ci_halfwidth", "dx", "dt", "length", "horizon", "level",
                                         "coarse", "fine")}
    _write(out / "front_speed.json", json.dumps({"scenario_hash": h, "estimate": body}, indent=1, sort_keys=True) + "\n")
    _write(out / "front_speed.csv", _hash_line(h) + FrontSpeedEstimate.CSV_HEADER + "\n" + est.csv_row(sc.params) + "\n")


def obtain_cuv(sc: Scenario, out: Path) -> FrontSpeedEstimate:
    if sc.c_uv is not None:
        return FrontSpeedEstimate(sc.c_uv.value, sc.c_uv.ci_halfwidth, math.nan, math.nan, math.nan, math.nan)
    cached = _cuv_from_cache(out, sc.hash)
    if cached is not None:
        return cached
    est = estimate_cuv(sc.params, sc.front_numerics)
    _store_cuv(out, sc.hash, est, sc)
    return est


# ---------------------------------------------------------------------------
# prediction


@dataclass
class Prediction:
    sets: SpreadingSets | None
    reports: list = field(default_factory=list)  # (label, ConditionReport)
    c_uv: float = math.nan

    @property
    def failed(self) -> list:
        return [(lab, r) for lab, r in self.reports if r.verdict is not Verdict.HOLDS]

    def banner(self) -> str:
        if not self.failed:
            return ""
        items = "; ".join(f"{_label(lab, r)} {r.verdict.value}" for lab, r in self.failed)
        return (f"WARNING: hypotheses not satisfied ({items}). Predicted profiles are the formula values "
                f"and carry no guarantee from the spreading theorems.")


def _label(lab: str, r: ConditionReport) -> str:
    return f"{r.condition}[{lab}]" if lab else r.condition


def _merge_path_reports(reports: list[ConditionReport], condition: str) -> ConditionReport:
    bad = [r for r in reports if r.verdict is Verdict.FAILS]
    if not bad:
        return ConditionReport(condition, Verdict.HOLDS, note=f"{len(reports)} sampled directions")
    wit = tuple(w for r in bad for w in r.witnesses)
    return ConditionReport(condition, Verdict.FAILS, wit, note=f"{len(bad)} of {len(reports)} sampled directions fail")


def predict(sc: Scenario, cuv: FrontSpeedEstimate | None) -> Prediction:
    p = sc.params
    dir_u, dir_v = unbounded_directions(sc.spec_U), unbounded_directions(sc.spec_V)
    w_u, w_v = speed_profile(dir_u, p.c_u), speed_profile(dir_v, p.c_v)
    reports = [("U", check_direction_cover(sc.spec_U, sc.rho, "BUS")),
               ("V", check_direction_cover(sc.spec_V, sc.alpha, "BUS"))]
    rng = np.random.default_rng(sc.seed)
    for cond, region, dirset, a, b in (("PATH_U", region_where_greater(w_u, w_v), dir_u, w_u, w_v),
                                       ("PATH_V", region_where_greater(w_v, w_u), dir_v, w_v, w_u)):
        es = region.sample(32)
        if not region.is_empty:
            es = np.concatenate([es, region.sample(256)[rng.integers(0, 256, 16)]])
        reports.append(("", _merge_path_reports([check_path_condition(e, dirset, a, b, condition=cond) for e in es], cond)))
    reports.append(("u", check_star_shaped(region_where_greater(w_u, w_v), dir_u)))
    reports.append(("v", check_star_shaped(region_where_greater(w_v, w_u), dir_v)))
    reports.append(("", check_strict_dominance_closure(w_u, w_v)))
    reports.append(("", check_assumptions(p, None)))
    value = math.nan
    sets = None
    if cuv is not None and p.strong_competition:
        reports.append(("", check_assumptions(p, cuv)))
        value = cuv.value
        if 0 < value < p.c_u:
            dom = dominance_set(w_u, w_v)
            sets = SpreadingSets(w_u, w_v, speed_profile(dir_u, value), s_u_profile(w_u, w_v, value, dom), dom)
    return Prediction(sets, reports, value)


def _boundary_rows(sets: SpreadingSets, thetas, clip: float) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["set", "angle", "x", "y", "clipped"])
    for name, prof in (("W_u", sets.w_u), ("W_v", sets.w_v), ("W_uv", sets.w_uv), ("S_u", sets.s_u)):
        vals = prof.values(thetas)
        for t, r in zip(thetas, vals):
            rr = min(r, clip)
            w.writerow([name, f"{t:.9f}", f"{rr * math.cos(t):.9g}", f"{rr * math.sin(t):.9g}", int(r > clip)])
    # S_v: annulus between S_u and W_v on the surviving directions
    for t in thetas:
        if sets.v_survives(t):
            inner, outer = min(sets.s_u(t), clip), min(sets.w_v(t), clip)
            for name, rr in (("S_v_inner", inner), ("S_v_outer", outer)):
                w.writerow([name, f"{t:.9f}", f"{rr * math.cos(t):.9g}", f"{rr * math.sin(t):.9g}", int(rr == clip)])
    return buf.getvalue()


def write_prediction(pred: Prediction, sc: Scenario, out: Path) -> None:
    h = sc.hash
    p = sc.params
    thetas = np.linspace(0.0, TWO_PI, PROFILE_SAMPLES, endpoint=False)
    dir_u, dir_v = unbounded_directions(sc.spec_U), unbounded_directions(sc.spec_V)
    cols = {"w_u": speed_profile(dir_u, p.c_u).values(thetas), "w_v": speed_profile(dir_v, p.c_v).values(thetas)}
    if pred.sets is not None:
        cols["w_uv"] = pred.sets.w_uv.values(thetas)
        cols["s_u"] = pred.sets.s_u.values(thetas)
    else:
        cols["w_uv"] = np.full(thetas.shape, np.nan)
        cols["s_u"] = np.full(thetas.shape, np.nan)
    _write(out / "profiles.csv", _hash_line(h) + profiles_to_csv(thetas, cols))
    lines = [_hash_line(h).rstrip("\n"), f"# c_uv: {pred.c_uv:.8g}"]
    if pred.banner():
        lines.append(pred.banner())
    for lab, r in pred.reports:
        lines.append((f"[{lab}] " if lab else "") + r.summary())
    _write(out / "conditions.txt", "\n".join(lines) + "\n")
    if pred.sets is not None:
        clip = 10.0 * max(p.c_u, p.c_v)
        _write(out / "boundaries.csv", _hash_line(h) + _boundary_rows(pred.sets, thetas, clip))


# ---------------------------------------------------------------------------
# commands


def _prepare(args) -> tuple[Scenario, Path]:
    sc = parse_scenario(args.scenario)
    if args.seed is not None:
        sc = sc.with_seed(args.seed)
    out = Path(args.out or os.environ.get(ENV_OUT) or "lvspread-out")
    out.mkdir(parents=True, exist_ok=True)
    set_threads(args.threads)
    return sc, out


def _warn(banner: str) -> None:
    if banner:
        print(banner, file=sys.stderr)


def cmd_predict(args) -> int:
    sc, out = _prepare(args)
    try:
        cuv = obtain_cuv(sc, out) if sc.params.strong_competition else None
    except InconclusiveError as exc:
        log.warning("c_uv unavailable: %s", exc)
        cuv = None
    pred = predict(sc, cuv)
    write_prediction(pred, sc, out)
    _warn(pred.banner())
    print(f"predict: wrote {out / 'profiles.csv'} and {out / 'conditions.txt'}")
    return EXIT_HYPOTHESIS if pred.failed else EXIT_OK


def cmd_front_speed(args) -> int:
    sc, out = _prepare(args)
    est = estimate_cuv(sc.params, sc.front_numerics)
    _store_cuv(out, sc.hash, est, sc)
    print(est.csv_row(sc.params))
    return EXIT_OK


def _series_dir(out: Path) -> Path:
    return out / "snapshots"


def _check_series_cache(sdir: Path, h: str) -> SnapshotSeries | None:
    idx = sdir / "series.json"
    if not idx.exists():
        return None
    series = SnapshotSeries.open(sdir)
    if series.scenario_hash != h:
        raise CacheMismatchError(f"{idx} was produced by scenario {series.scenario_hash[:12]}, not {h[:12]}; "
                                 f"use a fresh --out directory")
    return series


def cmd_simulate(args) -> int:
    sc, out = _prepare(args)
    sdir = _series_dir(out)
    _check_series_cache(sdir, sc.hash)
    series = run(sc.sim(), sdir, threads=args.threads, scenario_hash=sc.hash)
    rate = series.timing.get("cell_updates_per_second")
    print(f"simulate: {len(series)} snapshots in {sdir}" + (f" ({rate:.3g} cell-updates/s)" if rate else ""))
    return EXIT_OK


def cmd_verify(args) -> int:
    sc, out = _prepare(args)
    sdir = _series_dir(out)
    series = _check_series_cache(sdir, sc.hash)
    cuv = obtain_cuv(sc, out)
    pred = predict(sc, cuv)
    write_prediction(pred, sc, out)
    _warn(pred.banner())
    if pred.sets is None:
        print("verify: no prediction available (c_uv outside (0, c_u)); comparison skipped", file=sys.stderr)
        return EXIT_HYPOTHESIS
    if series is None or len(series) != len(sc.snapshot_times):
        series = run(sc.sim(), sdir, threads=args.threads, scenario_hash=sc.hash)
    m = sc.measurement
    labels = [(f"[{lab}] " if lab else "") + r.summary() for lab, r in pred.reports]
    report = compare_report(pred.sets, series, m.directions, m.tol, m.level, m.window, labels,
                            {"scenario_hash": sc.hash, "c_uv": f"{pred.c_uv:.8g}"})
    _write(out / "report.csv", _hash_line(sc.hash) + report.to_csv())
    summary = report.summary()
    if pred.banner():
        summary = pred.banner() + "\n" + summary
    _write(out / "report.txt", summary + "\n")
    print(summary)
    if pred.failed:
        return EXIT_HYPOTHESIS
    return EXIT_OK if report.passed else EXIT_MISMATCH


def cmd_export(args) -> int:
    sc, out = _prepare(args)
    if args.what == "profiles":
        thetas = np.linspace(0.0, TWO_PI, args.samples, endpoint=False)
        p = sc.params
        cols = {"w_u": speed_profile(unbounded_directions(sc.spec_U), p.c_u).values(thetas),
                "w_v": speed_profile(unbounded_directions(sc.spec_V), p.c_v).values(thetas)}
        text = _hash_line(sc.hash) + profiles_to_csv(thetas, cols)
        target = out / "export_profiles.csv"
    else:
        series = _check_series_cache(_series_dir(out), sc.hash)
        if series is None:
            raise ValidationError("no snapshots found; run `simulate` first", "export")
        idx = args.index if args.index >= 0 else len(series) + args.index
        if not 0 <= idx < len(series):
            raise ValidationError(f"snapshot index {args.index} out of range (0..{len(series) - 1})", "export.index")
        f, grid = read_snapshot(series.directory / series.files[idx])
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "u", "v"])
        for iy, y in enumerate(grid.ys):
            for ix, x in enumerate(grid.xs):
                w.writerow([f"{x:.9g}", f"{y:.9g}", repr(float(f.u[iy, ix])), repr(float(f.v[iy, ix]))])
        text = _hash_line(sc.hash) + f"# time: {f.time!r}\n" + buf.getvalue()
        target = out / f"export_snapshot_{idx:04d}.csv"
    _write(target, text)
    print(f"export: wrote {target}")
    return EXIT_OK


COMMANDS = {
    "predict": cmd_predict,
    "front-speed": cmd_front_speed,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "export": cmd_export,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lvspread", description="Directional spreading for two competing species.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--scenario", required=True, help="YAML scenario file")
        sp.add_argument("--out", default=None, help=f"output directory (default: ${ENV_OUT} or ./lvspread-out)")
        sp.add_argument("--threads", type=int, default=None, help="solver threads")
        sp.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        if name == "export":
            sp.add_argument("--what", choices=("profiles", "snapshot"), default="profiles")
            sp.add_argument("--index", type=int, default=-1, help="snapshot index (negative counts from the end)")
            sp.add_argument("--samples", type=int, default=PROFILE_SAMPLES)
    return parser


def _fail(kind: str, exc: Exception, code: int) -> int:
    for msg in getattr(exc, "errors", None) or [str(exc)]:
        print(f"lvspread: error[{kind}]: {msg}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ValidationError, CacheMismatchError) as exc:
        return _fail("validation", exc, EXIT_VALIDATION)
    except (InconclusiveError, BlowUpError, PreconditionError, InsufficientDataError) as exc:
        return _fail("numerical", exc, EXIT_NUMERICAL)
    except LVSpreadError as exc:
        return _fail("error", exc, EXIT_VALIDATION)


if __name__ == "__main__":
    sys.exit(main())
