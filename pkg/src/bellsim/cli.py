"""Command-line front end: sweeps, simulation runs, waveform demos, LHV checks.

Subcommands
-----------
``bellsim analytic``   closed-form CH sweeps over k, CSV output with
                       zero-crossing footer rows.
``bellsim simulate``   Monte Carlo run compared against the closed forms,
                       JSON report, exit code reflects the comparison.
``bellsim waveform``   ``stats`` / ``delays`` / ``windows`` demonstrations of
                       intensity-driven event timing, CSV output.
``bellsim lhv-check``  random local-model CH screening plus the 16-case
                       pointwise inequality, text summary.

Exit codes: 0 success/pass, 1 configuration error, 2 comparison failure.
All randomness is seeded; CSV output uses dot decimals, a header row, fixed
column order, and ``\\n`` line endings, so identical inputs give
byte-identical files.  Angles are radians by default; a ``deg`` or ``rad``
suffix selects the unit explicitly (e.g. ``30deg``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .analytic import SWEEP_MODES, ch_zero_crossing, table_for_mode
from .detector import WindowScheme
from .errors import BellsimError, InvalidInputError
from .inequalities import (
    DEFAULT_QUAD,
    AngleQuad,
    DiscreteLHVModel,
    ch_value,
    eval_discrete_lhv,
    pointwise_ch_inequality_check,
    random_discrete_model,
)
from .montecarlo import RunConfig, compare_to_analytic
from .waveform import (
    Waveform,
    delay_statistics,
    harmonic_expansion,
    intensity_stats,
    sample_events,
    sample_homogeneous_events,
    windowed_coincidences,
)

__all__ = ["main", "parse_angle"]

_SCHEMA_VERSION = 1
_LHV_TOLERANCE = 1e-12

_EXIT_OK = 0
_EXIT_CONFIG = 1
_EXIT_COMPARISON = 2


class _ConfigError(BellsimError):
    """Raised for malformed flags or config files; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # noqa: D401 - argparse hook
        raise _ConfigError(f"{self.prog}: {message}")


def parse_angle(text: str | float) -> float:
    """Parse an angle: bare numbers are radians, 'Xdeg'/'Xrad' are explicit."""
    if isinstance(text, (int, float)):
        value = float(text)
    else:
        s = str(text).strip().lower()
        try:
            if s.endswith("deg"):
                value = math.radians(float(s[: -len("deg")]))
            elif s.endswith("rad"):
                value = float(s[: -len("rad")])
            else:
                value = float(s)
        except ValueError:
            raise _ConfigError(
                f"cannot parse angle {text!r} (use radians, or a deg/rad suffix)"
            ) from None
    if not math.isfinite(value):
        raise _ConfigError(f"angle must be finite, got {text!r}")
    return value


def _fmt(x: object) -> str:
    if isinstance(x, float):
        # repr of a builtin float is the shortest round-trip form; the cast
        # also strips numpy scalar types so CSV cells stay plain numbers.
        return repr(float(x))
    return str(x)


def _emit_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _emit_csv(header: Sequence[str], rows: Sequence[Sequence[object]], out: str | None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(cell) for cell in row])
    _emit_text(buf.getvalue(), out)


def _json_safe(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if isinstance(obj, dict):
        return {key: _json_safe(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(value) for value in obj]
    return obj


# ---------------------------------------------------------------------------
# analytic

@dataclass(frozen=True)
class SweepSpec:
    """A k-sweep request: grid, angle quad, and the curve modes to emit."""

    grid_kind: str
    start: float
    stop: float
    points: int
    quad: AngleQuad
    modes: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.grid_kind not in ("log", "linear"):
            raise _ConfigError(f"k_grid kind must be 'log' or 'linear', got {self.grid_kind!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise _ConfigError("k_grid start/stop must be finite")
        if self.start <= 0:
            raise _ConfigError(f"k values must be positive; start = {self.start!r}")
        if not self.start < self.stop:
            raise _ConfigError(f"k_grid needs start < stop, got {self.start!r} >= {self.stop!r}")
        if self.points < 2:
            raise _ConfigError(f"k_grid needs points >= 2, got {self.points}")
        for mode in self.modes:
            if mode not in SWEEP_MODES:
                raise _ConfigError(
                    f"unknown mode {mode!r}; choose from {', '.join(SWEEP_MODES)}"
                )

    def k_values(self) -> np.ndarray:
        if self.grid_kind == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


def _quad_from_mapping(raw: dict, base: AngleQuad) -> AngleQuad:
    known = {"a", "b", "a_prime", "b_prime"}
    unknown = set(raw) - known
    if unknown:
        raise _ConfigError(f"unknown quad keys: {sorted(unknown)}; expected {sorted(known)}")
    return AngleQuad(
        a=parse_angle(raw["a"]) if "a" in raw else base.a,
        b=parse_angle(raw["b"]) if "b" in raw else base.b,
        a_prime=parse_angle(raw["a_prime"]) if "a_prime" in raw else base.a_prime,
        b_prime=parse_angle(raw["b_prime"]) if "b_prime" in raw else base.b_prime,
    )


def _load_sweep_spec(args: argparse.Namespace) -> SweepSpec:
    raw: dict = {}
    if args.spec is not None:
        try:
            raw = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        except OSError as exc:
            raise _ConfigError(f"cannot read spec file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise _ConfigError(
                f"config parse error in {args.spec} at line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from None
        if not isinstance(raw, dict):
            raise _ConfigError("sweep config must be a JSON object")
        unknown = set(raw) - {"k_grid", "quad", "modes", "mc"}
        if unknown:
            raise _ConfigError(f"unknown sweep config keys: {sorted(unknown)}")
        if "mc" in raw and not isinstance(raw["mc"], dict):
            raise _ConfigError("'mc' must be a JSON object of RunConfig overrides")

    grid = raw.get("k_grid", {})
    if not isinstance(grid, dict):
        raise _ConfigError("'k_grid' must be a JSON object")
    grid_kind = args.grid if args.grid is not None else grid.get("kind", "log")
    start = args.start if args.start is not None else float(grid.get("start", 0.01))
    stop = args.stop if args.stop is not None else float(grid.get("stop", 100.0))
    points = args.points if args.points is not None else int(grid.get("points", 121))

    quad_raw = raw.get("quad", {})
    if not isinstance(quad_raw, dict):
        raise _ConfigError("'quad' must be a JSON object")
    quad = _quad_from_mapping(quad_raw, DEFAULT_QUAD)
    quad = _quad_from_flags(args, quad)

    if args.modes is not None:
        modes = tuple(m for m in (s.strip() for s in args.modes.split(",")) if m)
    else:
        modes_raw = raw.get("modes", list(SWEEP_MODES))
        if not isinstance(modes_raw, list):
            raise _ConfigError("'modes' must be a JSON array")
        modes = tuple(str(m) for m in modes_raw)
    return SweepSpec(
        grid_kind=grid_kind, start=start, stop=stop, points=points, quad=quad, modes=modes
    )


def _quad_from_flags(args: argparse.Namespace, base: AngleQuad) -> AngleQuad:
    return AngleQuad(
        a=parse_angle(args.angle_a) if args.angle_a is not None else base.a,
        b=parse_angle(args.angle_b) if args.angle_b is not None else base.b,
        a_prime=parse_angle(args.angle_a_prime) if args.angle_a_prime is not None else base.a_prime,
        b_prime=parse_angle(args.angle_b_prime) if args.angle_b_prime is not None else base.b_prime,
    )


def cmd_analytic(args: argparse.Namespace) -> int:
    spec = _load_sweep_spec(args)
    if not spec.modes:
        print("warning: empty mode set; no rows emitted", file=sys.stderr)
        _emit_csv(("k", "mode", "p_s", "p_c", "ch"), [], args.out)
        return _EXIT_OK
    rows: list[list[object]] = []
    footers: list[list[object]] = []
    for mode in spec.modes:
        for k in spec.k_values():
            breakdown = ch_value(table_for_mode(float(k), spec.quad, mode))
            rows.append([float(k), mode, breakdown.p_s, breakdown.p_c, breakdown.ch])
        crossing = ch_zero_crossing(
            spec.quad, mode=mode, bracket=(spec.start, spec.stop)
        )
        if crossing is not None:
            footers.append([crossing, f"{mode}:zero-crossing", "", "", 0.0])
    _emit_csv(("k", "mode", "p_s", "p_c", "ch"), rows + footers, args.out)
    return _EXIT_OK


# ---------------------------------------------------------------------------
# simulate

def cmd_simulate(args: argparse.Namespace) -> int:
    if args.trials < 1:
        raise _ConfigError(f"--trials must be >= 1, got {args.trials}")
    quad = _quad_from_flags(args, DEFAULT_QUAD)
    scheme = WindowScheme.SINGLE if args.scheme == "single" else WindowScheme.HALVES
    try:
        cfg = RunConfig(
            k=args.k,
            quad=quad,
            scheme=scheme,
            n_trials=args.trials,
            seed=args.seed,
            phase_mode="sampled" if args.phases else "suppressed",
            workers=args.workers,
        )
    except InvalidInputError as exc:
        raise _ConfigError(str(exc)) from None
    started = time.perf_counter()
    report = compare_to_analytic(cfg, analytic_k=args.analytic_k)
    runtime = time.perf_counter() - started
    est = report.estimated
    payload = {
        "schema_version": _SCHEMA_VERSION,
        "config": {
            "k": cfg.k,
            "scheme": cfg.scheme.value,
            "n_trials": cfg.n_trials,
            "seed": cfg.seed,
            "phase_mode": cfg.phase_mode,
            "workers": cfg.workers,
            "quad": {
                "a": cfg.quad.a,
                "b": cfg.quad.b,
                "a_prime": cfg.quad.a_prime,
                "b_prime": cfg.quad.b_prime,
            },
        },
        "analytic_k": report.analytic_k,
        "rows": [
            {
                "name": row.name,
                "estimate": row.estimate,
                "expected": row.expected,
                "std_error": row.std_error,
                "z": row.z,
            }
            for row in report.rows
        ],
        "ch": {
            "p_s": est.ch.p_s,
            "p_c": est.ch.p_c,
            "ch": est.ch.ch,
            "std_error": est.ch_std_error,
        },
        "conditional_b_given_a": est.conditional_b_given_a,
        "max_abs_z": report.max_abs_z,
        "z_limit": report.z_limit,
        "passed": report.passed,
        "monotonicity_violations": list(report.monotonicity_violations),
        "notes": [
            "marginals reuse the pair runs; the CH standard error sums component "
            "variances, which is conservative under the induced correlations",
            "closed-form references assume suppressed phases; with --phases the "
            "z-scores measure the phase cross-term effect",
        ],
        "runtime_seconds": runtime,
    }
    _emit_text(json.dumps(_json_safe(payload), indent=2, sort_keys=True) + "\n", args.out)
    return _EXIT_OK if report.passed else _EXIT_COMPARISON


# ---------------------------------------------------------------------------
# waveform

def _parse_wave(args: argparse.Namespace) -> Waveform:
    try:
        coeffs = tuple(float(part) for part in str(args.wave).split(","))
    except ValueError:
        raise _ConfigError(
            f"cannot parse --wave {args.wave!r}; expected comma-separated numbers"
        ) from None
    if not coeffs:
        raise _ConfigError("--wave needs at least one coefficient")
    try:
        return Waveform.from_coefficients(coeffs, omega=args.omega, amplitude=args.amplitude)
    except InvalidInputError as exc:
        raise _ConfigError(str(exc)) from None


def _stream_rngs(seed: int) -> list[np.random.Generator]:
    return [
        np.random.Generator(np.random.Philox(child))
        for child in np.random.SeedSequence(seed).spawn(4)
    ]


def _paired_streams(w: Waveform, span: float, rate: float, seed: int):
    """Two shared-intensity streams and two constant-rate baselines.

    All four have the same mean event rate: the shared pair is thinned from
    the waveform intensity with rate_scale = rate / mean_intensity, the
    baseline pair is homogeneous at ``rate``.
    """
    mean_intensity = harmonic_expansion(w).a0
    if mean_intensity <= 0:
        raise _ConfigError("waveform has zero mean intensity; no events to sample")
    rng_sa, rng_sb, rng_ia, rng_ib = _stream_rngs(seed)
    shared_a = sample_events(w, span, rate / mean_intensity, rng_sa)
    shared_b = sample_events(w, span, rate / mean_intensity, rng_sb)
    indep_a = sample_homogeneous_events(rate, span, rng_ia)
    indep_b = sample_homogeneous_events(rate, span, rng_ib)
    return shared_a, shared_b, indep_a, indep_b


def cmd_waveform(args: argparse.Namespace) -> int:
    w = _parse_wave(args)
    if args.waveform_command == "stats":
        stats = intensity_stats(
            w, samples_per_period=args.samples, detection_time=args.detection_time
        )
        rows: list[list[object]] = [
            ["mean", stats.mean],
            ["maximum", stats.maximum],
            ["peak_to_mean", stats.peak_to_mean],
            ["peak_to_mean_squared", stats.peak_to_mean_squared],
        ]
        rows.extend(["argmax_time", t] for t in stats.argmax_times)
        rows.append(["samples_per_period", stats.samples_per_period])
        rows.append(["detection_time", "" if stats.detection_time is None else stats.detection_time])
        if stats.note is not None:
            rows.append(["note", stats.note])
        _emit_csv(("quantity", "value"), rows, args.out)
        return _EXIT_OK

    if args.span <= 0 or args.rate <= 0:
        raise _ConfigError("--span and --rate must be positive")
    shared_a, shared_b, indep_a, indep_b = _paired_streams(w, args.span, args.rate, args.seed)

    if args.waveform_command == "delays":
        shared = delay_statistics(shared_a, shared_b, bins=args.bins)
        limit = max(
            float(np.max(np.abs(shared.delays), initial=0.0)),
            float(np.max(np.abs(delay_statistics(indep_a, indep_b, bins=args.bins).delays), initial=0.0)),
        ) or 1.0
        histogram_range = (-limit, limit)
        shared = delay_statistics(shared_a, shared_b, bins=args.bins, histogram_range=histogram_range)
        indep = delay_statistics(indep_a, indep_b, bins=args.bins, histogram_range=histogram_range)
        rows = []
        for case, stats in (("independent", indep), ("shared", shared)):
            for left, right, count in zip(stats.bin_edges[:-1], stats.bin_edges[1:], stats.counts):
                rows.append(["bin", case, float(left), float(right), int(count)])
        for case, stats in (("independent", indep), ("shared", shared)):
            rows.append(["n_events", case, "", "", stats.n])
            rows.append(
                ["median_abs_delay", case, "", "",
                 "" if stats.median_abs_delay is None else stats.median_abs_delay]
            )
        if indep.median_abs_delay and shared.median_abs_delay is not None:
            rows.append(
                ["median_ratio", "shared/independent", "", "",
                 shared.median_abs_delay / indep.median_abs_delay]
            )
        _emit_csv(("quantity", "case", "bin_left", "bin_right", "value"), rows, args.out)
        return _EXIT_OK

    # windows
    try:
        windows = sorted(float(part) for part in str(args.windows).split(","))
    except ValueError:
        raise _ConfigError(
            f"cannot parse --windows {args.windows!r}; expected comma-separated durations"
        ) from None
    if any(width <= 0 for width in windows):
        raise _ConfigError("window widths must be positive")
    rows = [
        [width,
         windowed_coincidences(shared_a, shared_b, width),
         windowed_coincidences(indep_a, indep_b, width)]
        for width in windows
    ]
    _emit_csv(("window", "shared", "independent"), rows, args.out)
    return _EXIT_OK


# ---------------------------------------------------------------------------
# lhv-check

def cmd_lhv_check(args: argparse.Namespace) -> int:
    if args.models < 1:
        raise _ConfigError(f"--models must be >= 1, got {args.models}")
    if args.adversarial:
        # Negative control: a response outside [0, 1] must be rejected at
        # model construction, surfacing as a config error (exit 1).
        DiscreteLHVModel(
            weights=(0.5, 0.5),
            response_a=((0.2, 1.3), (0.4, 0.1)),
            response_b=((0.3, 0.6), (0.9, 0.0)),
        )
        raise AssertionError("unreachable: invalid model must not validate")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(args.seed)))
    min_ch = math.inf
    min_info = ""
    for index in range(args.models):
        model = random_discrete_model(rng, max_states=args.max_states)
        ch = ch_value(eval_discrete_lhv(model)).ch
        if ch < min_ch:
            min_ch = ch
            min_info = f"model {index}, n_states={model.n_states}"
    pointwise = pointwise_ch_inequality_check()
    passed = min_ch >= -_LHV_TOLERANCE and pointwise.all_nonnegative
    lines = [
        f"models={args.models} seed={args.seed} max_states={args.max_states}",
        f"min_ch={min_ch:.17g} ({min_info})",
        f"pointwise_cases={len(pointwise.cases)} min_slack={pointwise.min_slack:.17g} "
        f"all_nonnegative={pointwise.all_nonnegative}",
        f"tolerance={-_LHV_TOLERANCE:.1e}",
        f"result={'PASS' if passed else 'FAIL'}",
    ]
    _emit_text("\n".join(lines) + "\n", args.out)
    return _EXIT_OK if passed else _EXIT_COMPARISON


# ---------------------------------------------------------------------------
# parser

def _add_angle_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--angle-a", default=None, help="setting A (radians, or e.g. 30deg)")
    parser.add_argument("--angle-b", default=None, help="setting B")
    parser.add_argument("--angle-a-prime", default=None, help="setting A'")
    parser.add_argument("--angle-b-prime", default=None, help="setting B'")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bellsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_analytic = sub.add_parser(
        "analytic", help="closed-form CH sweep over k, CSV with zero-crossing footers"
    )
    p_analytic.add_argument("--spec", default=None, help="JSON sweep config file")
    p_analytic.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p_analytic.add_argument("--grid", choices=("log", "linear"), default=None)
    p_analytic.add_argument("--start", type=float, default=None, help="first k (> 0)")
    p_analytic.add_argument("--stop", type=float, default=None, help="last k")
    p_analytic.add_argument("--points", type=int, default=None, help="grid size (>= 2)")
    p_analytic.add_argument(
        "--modes", default=None,
        help=f"comma-separated subset of: {', '.join(SWEEP_MODES)}",
    )
    p_analytic.add_argument("--seed", type=int, default=0, help="accepted for uniformity; sweep is deterministic")
    _add_angle_flags(p_analytic)
    p_analytic.set_defaults(func=cmd_analytic)

    p_sim = sub.add_parser(
        "simulate", help="Monte Carlo run vs closed forms, JSON report"
    )
    p_sim.add_argument("--k", type=float, required=True, help="detector response parameter")
    p_sim.add_argument("--scheme", choices=("single", "halves"), default="single")
    p_sim.add_argument("--trials", type=int, default=100_000, help="trials per setting pair")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--workers", type=int, default=1)
    p_sim.add_argument(
        "--phases", action="store_true",
        help="sample interference phases instead of suppressing them "
             "(closed forms then no longer apply; comparison may fail)",
    )
    p_sim.add_argument(
        "--analytic-k", type=float, default=None,
        help="compare against closed forms at this k instead (negative control)",
    )
    p_sim.add_argument("--out", default=None, help="output JSON path (default stdout)")
    _add_angle_flags(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_wave = sub.add_parser("waveform", help="intensity/event-timing demonstrations, CSV")
    wave_sub = p_wave.add_subparsers(dest="waveform_command", required=True, parser_class=_Parser)
    for name, help_text in (
        ("stats", "period mean/max/argmax of the intensity"),
        ("delays", "nearest-neighbor delay histogram: shared vs independent streams"),
        ("windows", "coincidences vs window width: shared vs independent streams"),
    ):
        p = wave_sub.add_parser(name, help=help_text)
        p.add_argument("--wave", default="1,-2,1", help="comma-separated coefficients on harmonics 1..n")
        p.add_argument("--omega", type=float, default=1.0, help="base angular frequency")
        p.add_argument("--amplitude", type=float, default=1.0, help="overall amplitude |A|")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output CSV path (default stdout)")
        if name == "stats":
            p.add_argument("--samples", type=int, default=4096, help="samples per period (>= 1000)")
            p.add_argument(
                "--detection-time", type=float, default=None,
                help="moving-average pre-filter width (default off)",
            )
        else:
            p.add_argument("--rate", type=float, default=1.0, help="mean events per unit time, per stream")
            p.add_argument("--span", type=float, default=20000.0, help="observation span")
        if name == "delays":
            p.add_argument("--bins", type=int, default=64, help="histogram bins")
        if name == "windows":
            p.add_argument(
                "--windows", default="0.05,0.1,0.2,0.5,1.0,2.0,5.0",
                help="comma-separated window widths",
            )
        p.set_defaults(func=cmd_waveform)

    p_lhv = sub.add_parser("lhv-check", help="random LHV models obey CH >= 0; pointwise suite")
    p_lhv.add_argument("--models", type=int, default=1000, help="number of random models")
    p_lhv.add_argument("--seed", type=int, default=0)
    p_lhv.add_argument("--max-states", type=int, default=64, help="largest hidden-state count")
    p_lhv.add_argument(
        "--adversarial", action="store_true",
        help="negative control: inject a response of 1.3 and expect rejection",
    )
    p_lhv.add_argument("--out", default=None, help="output path (default stdout)")
    p_lhv.set_defaults(func=cmd_lhv_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except BellsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
