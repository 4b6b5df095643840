"""Batch command-line frontend.

Subcommands:

* ``generate``      write the first N terms of one sequence, one value per line
* ``distribution``  empirical CDF tables and averaged-integral checks
* ``independence``  schedule test + rectangle tests + agreement verdict
* ``extract``       stabilizing checkpoint extraction and measurability reports

Experiment descriptions are JSON files (see ``parse_experiment_spec``); all
outputs are deterministic given the same spec, seed, and depth.  Exit codes:
0 = completed with verdict agreement, 2 = completed but the two independence
notions disagreed (a counterexample record is written), 1 = operational
error (bad spec, unreadable file, failed extraction, usage mistake).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .distribution import StepCDF, cdf_eval, continuity_grid, empirical_cdf, \
    stieltjes, PiecewiseLinear
from .errors import SpecError, StatIndepError
from .independence import FunctionBattery, NamedFunction, default_battery, \
    equivalence_harness
from .reporting import fmt_float, write_csv, write_json
from .selection import helly_extract, kappa_family_builder, detect_measurable
from .sequences import BoundedSequence, Interval, from_spec as sequence_from_spec
from .subsequence import SubsequenceIndex

BUILTIN_BATTERY = ("one", "x", "x2", "sin2pix", "cos2pix", "ramp")
FAMILY_MEMBERS = ("naturals", "evens", "odds", "squares", "pow2", "thinned")
DEFAULT_SCHEDULE = (100, 1000, 10000, 100000)
DEFAULT_TOLERANCES = {"tol": 0.01, "window": 5, "atom_tol": 0.001,
                      "epsilon_width": 0.05}
MIN_POOL = 64


@dataclass
class ExperimentSpec:
    """Normalized experiment description; compares and round-trips by value."""

    sequences: tuple
    battery: tuple
    schedule: tuple
    kappa: object
    grid: object
    tolerances: dict
    outputs: dict
    pool: tuple | None
    seed: int


def _fail(path: str, message: str):
    raise SpecError(f"{path}: {message}")


def _norm_int(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected an integer, got {value!r}")
    if isinstance(value, float):
        if not value.is_integer():
            _fail(path, f"expected an integer, got {value!r}")
        value = int(value)
    if minimum is not None and value < minimum:
        _fail(path, f"must be >= {minimum}, got {value}")
    return int(value)


def _norm_float(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    return float(value)


def _norm_increasing(values, path: str, kind) -> tuple:
    if not isinstance(values, (list, tuple)) or not values:
        _fail(path, "expected a nonempty array")
    out = [kind(v, f"{path}[{i}]") for i, v in enumerate(values)]
    if any(x >= y for x, y in zip(out, out[1:])):
        _fail(path, f"entries must be strictly increasing, got {out}")
    return tuple(out)


_SEQ_PARAM_KEYS = {
    "kronecker": ("alpha",),
    "van_der_corput": ("base",),
    "periodic": ("values",),
    "constant": ("value",),
    "block": ("low", "high", "growth"),
    "affine_image": ("c", "d", "source"),
    "file": ("path",),
}


def _norm_sequence_spec(obj, path: str) -> dict:
    sequence_from_spec(obj, where=path)  # full validation with cited paths
    kind = obj["kind"]
    raw = obj.get("interval", [0.0, 1.0])
    out = {"kind": kind, "interval": [float(raw[0]), float(raw[1])],
           "params": {}}
    params = obj.get("params", {})
    for key in params:
        if key not in _SEQ_PARAM_KEYS[kind]:
            _fail(f"{path}.params.{key}", f"unknown parameter for kind {kind!r}")
    p = out["params"]
    if kind == "kronecker":
        alpha = params["alpha"]
        p["alpha"] = alpha if isinstance(alpha, str) else float(alpha)
    elif kind == "van_der_corput":
        p["base"] = _norm_int(params.get("base", 2), f"{path}.params.base", 2)
    elif kind == "periodic":
        p["values"] = [_norm_float(v, f"{path}.params.values[{i}]")
                       for i, v in enumerate(params["values"])]
    elif kind == "constant":
        p["value"] = _norm_float(params["value"], f"{path}.params.value")
    elif kind == "block":
        p["low"] = _norm_float(params["low"], f"{path}.params.low")
        p["high"] = _norm_float(params["high"], f"{path}.params.high")
        p["growth"] = _norm_int(params["growth"], f"{path}.params.growth", 2)
    elif kind == "affine_image":
        p["c"] = _norm_float(params["c"], f"{path}.params.c")
        p["d"] = _norm_float(params["d"], f"{path}.params.d")
        p["source"] = _norm_sequence_spec(params["source"],
                                          f"{path}.params.source")
    elif kind == "file":
        p["path"] = str(params["path"])
    return out


def _norm_battery_entry(entry, path: str):
    if isinstance(entry, str):
        if entry not in BUILTIN_BATTERY:
            _fail(path, f"unknown integrand {entry!r}; built-ins: "
                        f"{', '.join(BUILTIN_BATTERY)}")
        return entry
    if isinstance(entry, dict):
        extra = set(entry) - {"name", "knots", "values"}
        if extra:
            _fail(path, f"unknown keys {sorted(extra)}")
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            _fail(f"{path}.name", "expected a nonempty string")
        knots = _norm_increasing(entry.get("knots"), f"{path}.knots",
                                 _norm_float)
        if not isinstance(entry.get("values"), (list, tuple)) \
                or len(entry["values"]) != len(knots):
            _fail(f"{path}.values", "expected an array matching knots")
        values = tuple(_norm_float(v, f"{path}.values[{i}]")
                       for i, v in enumerate(entry["values"]))
        return {"name": name, "knots": list(knots), "values": list(values)}
    _fail(path, "expected a built-in name or a piecewise-linear object")


def parse_experiment_spec(obj) -> ExperimentSpec:
    """Validate and normalize a JSON experiment description.

    Errors cite the JSON path of the offending field.  Parsing is
    idempotent: parse(serialize(spec)) == spec.
    """
    if not isinstance(obj, dict):
        raise SpecError(f"spec: expected a JSON object, got {type(obj).__name__}")
    known = {"sequences", "battery", "schedule", "kappa", "grid",
             "tolerances", "outputs", "pool", "seed"}
    for key in obj:
        if key not in known:
            _fail(key, "unknown field")

    raw_seqs = obj.get("sequences")
    if not isinstance(raw_seqs, list) or not raw_seqs:
        _fail("sequences", "expected a nonempty array of sequence specs")
    sequences = tuple(_norm_sequence_spec(s, f"sequences[{i}]")
                      for i, s in enumerate(raw_seqs))

    raw_battery = obj.get("battery", list(BUILTIN_BATTERY))
    if not isinstance(raw_battery, list) or not raw_battery:
        _fail("battery", "expected a nonempty array")
    battery = tuple(_norm_battery_entry(e, f"battery[{i}]")
                    for i, e in enumerate(raw_battery))

    schedule = _norm_increasing(obj.get("schedule", list(DEFAULT_SCHEDULE)),
                                "schedule", lambda v, p: _norm_int(v, p, 1))

    raw_kappa = obj.get("kappa", "default")
    if isinstance(raw_kappa, str):
        allowed = ("default", "extract") + FAMILY_MEMBERS
        if raw_kappa not in allowed:
            _fail("kappa", f"expected one of {', '.join(allowed)}, or an "
                           f"explicit checkpoint array; got {raw_kappa!r}")
        kappa = raw_kappa
    else:
        kappa = _norm_increasing(raw_kappa, "kappa",
                                 lambda v, p: _norm_int(v, p, 1))

    raw_grid = obj.get("grid", {"deciles": True})
    if isinstance(raw_grid, dict):
        if raw_grid != {"deciles": True}:
            _fail("grid", 'expected {"deciles": true}, a point array, or a count')
        grid = {"deciles": True}
    elif isinstance(raw_grid, list):
        grid = _norm_increasing(raw_grid, "grid", _norm_float)
    else:
        grid = _norm_int(raw_grid, "grid", 1)

    tolerances = dict(DEFAULT_TOLERANCES)
    raw_tol = obj.get("tolerances", {})
    if not isinstance(raw_tol, dict):
        _fail("tolerances", "expected an object")
    for key, value in raw_tol.items():
        if key not in DEFAULT_TOLERANCES:
            _fail(f"tolerances.{key}", "unknown tolerance")
        if key == "window":
            tolerances[key] = _norm_int(value, f"tolerances.{key}", 2)
        else:
            v = _norm_float(value, f"tolerances.{key}")
            if v <= 0:
                _fail(f"tolerances.{key}", f"must be positive, got {v}")
            tolerances[key] = v

    outputs = {"basename": "report"}
    raw_out = obj.get("outputs", {})
    if not isinstance(raw_out, dict):
        _fail("outputs", "expected an object")
    for key, value in raw_out.items():
        if key != "basename":
            _fail(f"outputs.{key}", "unknown output option")
        if not isinstance(value, str) or not value or "/" in value or "\\" in value:
            _fail("outputs.basename", f"expected a plain file stem, got {value!r}")
        outputs["basename"] = value

    pool = None
    if "pool" in obj:
        pool = _norm_increasing(obj["pool"], "pool",
                                lambda v, p: _norm_int(v, p, 1))
        if len(pool) < MIN_POOL:
            _fail("pool", f"needs at least {MIN_POOL} checkpoints, got {len(pool)}")

    seed = _norm_int(obj.get("seed", 0), "seed", 0)
    if seed >= 2 ** 64:
        _fail("seed", f"must fit in 64 bits, got {seed}")

    return ExperimentSpec(sequences=sequences, battery=battery,
                          schedule=schedule, kappa=kappa, grid=grid,
                          tolerances=tolerances, outputs=outputs, pool=pool,
                          seed=seed)


def serialize_experiment_spec(spec: ExperimentSpec) -> dict:
    """Normalized JSON form; parse_experiment_spec inverts this exactly."""
    obj = {
        "sequences": [json.loads(json.dumps(s)) for s in spec.sequences],
        "battery": [e if isinstance(e, str) else dict(e) for e in spec.battery],
        "schedule": list(spec.schedule),
        "kappa": spec.kappa if isinstance(spec.kappa, str) else list(spec.kappa),
        "grid": spec.grid if not isinstance(spec.grid, tuple) else list(spec.grid),
        "tolerances": dict(spec.tolerances),
        "outputs": dict(spec.outputs),
        "seed": spec.seed,
    }
    if spec.pool is not None:
        obj["pool"] = list(spec.pool)
    return obj


def build_sequences(spec: ExperimentSpec) -> list[BoundedSequence]:
    return [sequence_from_spec(s, where=f"sequences[{i}]")
            for i, s in enumerate(spec.sequences)]


def build_battery(spec: ExperimentSpec, interval: Interval) -> FunctionBattery:
    base = default_battery(interval)
    members = []
    for entry in spec.battery:
        if isinstance(entry, str):
            members.append(base.member(entry))
        else:
            members.append(NamedFunction(
                entry["name"],
                PiecewiseLinear(tuple(entry["knots"]), tuple(entry["values"]))))
    return FunctionBattery(tuple(members))


def _decile_grid(interval: Interval) -> np.ndarray:
    ks = np.arange(1, 10, dtype=np.float64)
    return interval.a + interval.length * ks / 10.0


def resolve_grid(spec: ExperimentSpec, interval: Interval,
                 cdfs: list[StepCDF] | None = None):
    """Returns (fixed_points | None, count).  Explicit points are validated
    against the interval; a count is materialized only when CDFs are at
    hand, otherwise it is passed through for per-index grids."""
    if isinstance(spec.grid, tuple):
        points = np.asarray(spec.grid, dtype=np.float64)
        if points[0] <= interval.a or points[-1] >= interval.b:
            raise SpecError(
                f"grid: points must lie strictly inside "
                f"({interval.a}, {interval.b})")
        return points, None
    if isinstance(spec.grid, dict):
        return _decile_grid(interval), None
    count = int(spec.grid)
    if cdfs is not None:
        return continuity_grid(cdfs, count,
                               atom_tol=spec.tolerances["atom_tol"],
                               interval=interval), None
    return None, count


def _derived_pool(depth: int) -> SubsequenceIndex:
    """Geometric checkpoint pool, eight per octave, up to depth."""
    if depth < 2:
        raise SpecError(f"--depth {depth} too shallow to derive a pool")
    js = np.arange(0, int(np.floor(8 * np.log2(depth))) + 1)
    ks = np.unique(np.round(np.exp2(js / 8.0)).astype(np.int64))
    ks = ks[(ks >= 1) & (ks <= depth)]
    return SubsequenceIndex(ks, rule="geometric, eight per octave",
                            name="geometric")


def resolve_pool(spec: ExperimentSpec, depth: int) -> SubsequenceIndex:
    if spec.pool is not None:
        return SubsequenceIndex(np.asarray(spec.pool, dtype=np.int64),
                                name="pool")
    pool = _derived_pool(depth)
    if len(pool) < MIN_POOL:
        raise SpecError(
            f"derived pool has only {len(pool)} checkpoints at depth {depth}; "
            f"raise --depth to at least 2048 or supply an explicit pool")
    return pool


def resolve_kappa_family(spec: ExperimentSpec, seqs: list[BoundedSequence],
                         depth: int, seed: int) -> list[SubsequenceIndex]:
    if isinstance(spec.kappa, tuple):
        return [SubsequenceIndex(np.asarray(spec.kappa, dtype=np.int64),
                                 name="explicit")]
    if spec.kappa == "default":
        return kappa_family_builder(depth, seed=seed)
    if spec.kappa in FAMILY_MEMBERS:
        family = kappa_family_builder(depth, seed=seed)
        return [k for k in family if k.name == spec.kappa]
    # "extract": build a pool, extract, and use the result as the family.
    pool = resolve_pool(spec, depth)
    interval = seqs[0].interval
    fixed, count = resolve_grid(spec, interval,
                                cdfs=[empirical_cdf(s, pool) for s in seqs]
                                if not isinstance(spec.grid, (tuple, dict))
                                else None)
    grid = fixed if fixed is not None else _decile_grid(interval)
    return [helly_extract(seqs, pool, grid, tol=spec.tolerances["tol"],
                          window=spec.tolerances["window"])]


def _load_spec_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec file {path} is not valid JSON: {exc}") from None


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(args) -> int:
    obj = _load_spec_file(args.spec)
    if isinstance(obj, dict) and "kind" in obj:
        norm = _norm_sequence_spec(obj, "sequence")
        basename = "sequence"
    else:
        spec = parse_experiment_spec(obj)
        if len(spec.sequences) != 1:
            raise SpecError(
                f"sequences: generate works on exactly one sequence, "
                f"got {len(spec.sequences)}")
        norm = spec.sequences[0]
        basename = spec.outputs["basename"]
    seq = sequence_from_spec(norm, where="sequence")
    n = args.depth
    values = seq.prefix(n).values
    path = _outdir(args) / f"{basename}_values.txt"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for v in values:
            fh.write(fmt_float(float(v)) + "\n")
    print(f"wrote {path} ({n} values of {seq.label})")
    return 0


def cmd_distribution(args) -> int:
    spec = parse_experiment_spec(_load_spec_file(args.spec))
    if len(spec.sequences) != 1:
        raise SpecError(
            f"sequences: distribution works on exactly one sequence, "
            f"got {len(spec.sequences)}")
    seq = build_sequences(spec)[0]
    battery = build_battery(spec, seq.interval)
    schedule = SubsequenceIndex(np.asarray(spec.schedule, dtype=np.int64),
                                name="schedule")
    deepest_cdf = empirical_cdf(seq, schedule)
    fixed, count = resolve_grid(spec, seq.interval,
                                cdfs=[deepest_cdf]
                                if not isinstance(spec.grid, (tuple, dict))
                                else None)
    grid = fixed if fixed is not None else _decile_grid(seq.interval)

    cdf_rows = []
    weyl_rows = []
    for j, n in enumerate(spec.schedule, start=1):
        cdf = empirical_cdf(seq, schedule, depth=j)
        for x in grid:
            cdf_rows.append((int(n), float(x), cdf_eval(cdf, float(x))))
        values = seq.prefix(int(n)).values
        for member in battery:
            fx = np.asarray(member(values), dtype=np.float64)
            if fx.shape != values.shape:
                fx = np.broadcast_to(fx, values.shape)
            mean = float(np.sum(fx) / int(n))
            integral = stieltjes(member, cdf)
            weyl_rows.append((int(n), member.name, mean, integral,
                              abs(mean - integral)))

    out = _outdir(args)
    base = spec.outputs["basename"]
    write_json(out / f"{base}_cdf.json", deepest_cdf.to_json_obj())
    write_csv(out / f"{base}_cdf.csv", ["N", "x", "F"], cdf_rows)
    write_csv(out / f"{base}_weyl.csv",
              ["N", "function", "mean", "stieltjes", "abs_diff"], weyl_rows)
    print(f"wrote {base}_cdf.json, {base}_cdf.csv, {base}_weyl.csv in {out}")
    return 0


def cmd_independence(args) -> int:
    spec = parse_experiment_spec(_load_spec_file(args.spec))
    if len(spec.sequences) < 2:
        raise SpecError(
            f"sequences: independence needs at least two sequences, "
            f"got {len(spec.sequences)}")
    seqs = build_sequences(spec)
    interval = seqs[0].interval
    battery = build_battery(spec, interval)
    seed = args.seed if args.seed is not None else spec.seed
    family = resolve_kappa_family(spec, seqs, args.depth, seed)
    fixed, count = resolve_grid(spec, interval)

    tol = spec.tolerances["tol"]
    report = equivalence_harness(
        seqs, battery, family, list(spec.schedule), tol,
        grid_count=count if count is not None else 9,
        atom_tol=spec.tolerances["atom_tol"],
        window=spec.tolerances["window"],
        fixed_grid=fixed)

    out = _outdir(args)
    base = spec.outputs["basename"]
    write_json(out / f"{base}_report.json", report.to_json_obj())
    write_csv(out / f"{base}_gaps.csv",
              ["N", "tuple label", "delta", "product", "gap"],
              report.statind.gap_rows())
    m = len(seqs)
    corner_cols = [f"corner_{i + 1}" for i in range(m)]
    rect_rows = []
    for outcome in report.outcomes:
        if outcome.report is not None:
            rect_rows.extend(outcome.report.rows())
    write_csv(out / f"{base}_rectangles.csv",
              ["kappa", *corner_cols, "density", "product", "residual"],
              rect_rows)

    print(f"statind verdict: {report.statind.verdict} "
          f"(max terminal |gap| = {report.statind.max_terminal_gap:.3g})")
    for outcome in report.outcomes:
        if outcome.tested:
            print(f"kappa {outcome.kappa_label}: {outcome.report.verdict} "
                  f"(max |residual| = {outcome.report.max_abs_residual:.3g})")
        else:
            print(f"kappa {outcome.kappa_label}: skipped ({outcome.skip_reason})")
    if report.agreement:
        print("verdicts agree")
        return 0
    print("verdicts disagree; counterexample recorded in the JSON report")
    return 2


def cmd_extract(args) -> int:
    spec = parse_experiment_spec(_load_spec_file(args.spec))
    if spec.kappa != "extract":
        raise SpecError('kappa: extract requires "kappa": "extract"')
    seqs = build_sequences(spec)
    interval = seqs[0].interval
    pool = resolve_pool(spec, args.depth)
    fixed, count = resolve_grid(spec, interval,
                                cdfs=[empirical_cdf(s, pool) for s in seqs]
                                if not isinstance(spec.grid, (tuple, dict))
                                else None)
    grid = fixed if fixed is not None else _decile_grid(interval)
    tol = spec.tolerances["tol"]
    window = spec.tolerances["window"]
    kappa = helly_extract(seqs, pool, grid, tol=tol, window=window)
    reports = [detect_measurable(s, kappa, grid, tol=tol, window=window)
               for s in seqs]

    out = _outdir(args)
    base = spec.outputs["basename"]
    write_json(out / f"{base}_kappa.json", kappa.to_json_obj())
    write_json(out / f"{base}_measurability.json",
               [r.to_json_obj() for r in reports])
    print(f"extracted {len(kappa)} checkpoints from a pool of {len(pool)} "
          f"(deepest {kappa.deepest})")
    for r in reports:
        print(f"sequence {r.sequence_label}: measurable={r.measurable}, "
              f"max oscillation {float(np.max(r.oscillations)):.3g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statindep",
        description="Independence diagnostics for bounded real sequences.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--spec", required=True,
                       help="path to a JSON experiment description")
        p.add_argument("--out", default=".",
                       help="output directory (created if absent)")
        p.add_argument("--seed", type=int, default=None,
                       help="overrides the spec's seed for thinned checkpoints")
        p.add_argument("--depth", type=int, default=10_000,
                       help="base depth: values for generate, deepest "
                            "checkpoint otherwise")

    p = sub.add_parser("generate", help="write sequence values to a file")
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("distribution", help="empirical CDF and averaged-"
                                            "integral tables")
    common(p)
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("independence", help="run both independence tests "
                                            "and compare verdicts")
    common(p)
    p.set_defaults(func=cmd_independence)

    p = sub.add_parser("extract", help="extract a stabilizing checkpoint "
                                       "subsequence")
    common(p)
    p.set_defaults(func=cmd_extract)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; 2 is reserved for disagreement.
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except StatIndepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
