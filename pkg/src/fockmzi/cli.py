"""Command-line experiment runner.

Subcommands configure a scheme, sweep the phase or the photon number, and
emit deterministic comma-separated tables: header line first, `#`-prefixed
footer lines for fit results, LF endings, every numeric cell at 17
significant digits.  Exit codes: 0 success, 1 usage error, 2 numerical
failure.
"""

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import estimation, rosetta
from .elements import CONVENTIONS, ONE_ARM, beam_splitter
from .fock import apply, expectation, make_basis_state, variance
from .lithography import InsufficientGridError, deposition_rate, fringe_period
from .schemes import NOON_FRAMINGS, build_setup
from .states import SCHEME_NAMES, SchemeTag, TruncationError, noon

OUTDIR_ENV = "FOCKMZI_OUTDIR"

_NUMERICAL_FAILURES = (
    TruncationError,
    estimation.NoPhaseInformationError,
    estimation.ModelMismatchError,
    InsufficientGridError,
)


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(value) -> str:
    """One numeric cell: ints verbatim, floats at 17 significant digits."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def parse_grid(spec: str) -> np.ndarray:
    """Phase grid 'start:stop:count' with inclusive endpoints."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid spec {spec!r} must be start:stop:count")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"grid spec {spec!r}: {exc}") from None
    if count < 2:
        raise UsageError(f"grid spec {spec!r}: count must be >= 2")
    if not start < stop:
        raise UsageError(f"grid spec {spec!r}: start must be below stop")
    return np.linspace(start, stop, count)


def parse_n_range(spec: str) -> list[int]:
    """Inclusive integer range 'start:stop[:step]'."""
    parts = spec.split(":")
    if len(parts) not in (2, 3):
        raise UsageError(f"n-range {spec!r} must be start:stop[:step]")
    try:
        start, stop = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
    except ValueError as exc:
        raise UsageError(f"n-range {spec!r}: {exc}") from None
    if step < 1 or stop < start:
        raise UsageError(f"n-range {spec!r}: need stop >= start and step >= 1")
    return list(range(start, stop + 1, step))


def load_config_file(path: str) -> dict[str, str]:
    """key = value lines; '#' comments and blank lines ignored."""
    entries = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        entries[key.strip()] = value.strip()
    return entries


def resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Option precedence: explicit flag, then config file, then builtin default."""
    config = load_config_file(args.config) if getattr(args, "config", None) else {}
    out = {}
    for key, builtin in defaults.items():
        flag_value = getattr(args, key.replace("-", "_"), None)
        if flag_value is not None:
            out[key] = flag_value
        elif key in config:
            out[key] = _coerce(config[key], builtin)
        else:
            out[key] = builtin
    return out


def _coerce(text: str, like):
    if isinstance(like, bool):
        lowered = text.lower()
        if lowered in ("true", "1", "yes"):
            return True
        if lowered in ("false", "0", "no"):
            return False
        raise UsageError(f"expected a boolean, got {text!r}")
    if isinstance(like, int):
        return int(text)
    if isinstance(like, float):
        return float(text)
    return text


def resolve_output_path(output: str | None) -> Path | None:
    if output is None:
        return None
    path = Path(output)
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir and not path.is_absolute():
        path = Path(outdir) / path
    return path


def write_table(path: Path | None, header: list[str], rows: list[list[str]], footers: list[str]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    lines.extend(f"# {footer}" for footer in footers)
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")


def grid_map(fn, items, threads: int):
    """Map over sweep points on a worker pool; results keep grid order."""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _scheme_tag(cfg: dict) -> SchemeTag:
    try:
        return SchemeTag(cfg["scheme"], cfg["n"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _setup(cfg: dict, tag: SchemeTag):
    try:
        return build_setup(
            tag,
            convention=cfg["convention"],
            invert_second_bs=cfg["invert-second-bs"],
            noon_framing=cfg["noon-framing"],
            cutoff=cfg["cutoff"] if cfg["cutoff"] > 0 else None,
        )
    except TruncationError:
        raise
    except ValueError as exc:  # incompatible flag combination, e.g. cutoff too small
        raise UsageError(str(exc)) from None


def run_sensitivity(args) -> int:
    cfg = resolve(args, {
        "scheme": "single-port-fock", "n": 1, "phi-grid": "0:3.1415926535897931:100",
        "convention": ONE_ARM, "invert-second-bs": False, "noon-framing": "post-bs",
        "cutoff": 0, "threads": os.cpu_count() or 1, "output": None,
    })
    grid = parse_grid(cfg["phi-grid"])
    out_path = resolve_output_path(cfg["output"])
    tag = _scheme_tag(cfg)
    setup = _setup(cfg, tag)
    generator = setup.analysis.output_generator(setup.cutoff)

    def point(phi: float):
        evolved = setup.analysis.evolve(setup.input_state, phi)
        mean = expectation(setup.observable, evolved)
        var = variance(setup.observable, evolved)
        dphi = estimation.sensitivity(evolved, setup.observable, generator)
        return mean, var, dphi

    rows = [
        [tag.name, fmt(tag.n), fmt(phi), fmt(mean), fmt(var), fmt(dphi)]
        for phi, (mean, var, dphi) in zip(grid, grid_map(point, list(grid), cfg["threads"]))
    ]
    write_table(out_path, ["scheme", "n", "phi", "expectation", "variance", "sensitivity"], rows, [])
    return 0


def run_scaling(args) -> int:
    cfg = resolve(args, {
        "scheme": "noon", "n-range": "1:20", "phi-grid": "0.005:3.1365926535897931:800",
        "metric": "auto", "convention": ONE_ARM, "invert-second-bs": False,
        "noon-framing": "post-bs", "cutoff": 0, "threads": os.cpu_count() or 1, "output": None,
    })
    ns = parse_n_range(cfg["n-range"])
    if len(ns) < 3:
        raise UsageError(f"n-range {cfg['n-range']!r} must contain at least 3 sizes")
    grid = parse_grid(cfg["phi-grid"])
    out_path = resolve_output_path(cfg["output"])
    metric = cfg["metric"]
    if metric == "auto":
        metric = "fisher" if cfg["scheme"] == "dual-fock" else "min-sensitivity"
    if metric not in ("min-sensitivity", "fisher"):
        raise UsageError(f"unknown metric {metric!r}")
    try:
        tags = [SchemeTag(cfg["scheme"], n) for n in ns]
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    def point(tag: SchemeTag) -> float:
        setup = _setup(cfg, tag)
        if metric == "fisher":
            return max(estimation.classical_fisher(setup.sampling, setup.input_state, phi) for phi in grid)
        curve = estimation.sensitivity_curve(setup.analysis, setup.input_state, setup.observable, grid)
        return estimation.min_sensitivity(curve)[1]

    values = grid_map(point, tags, cfg["threads"])
    slope, intercept = estimation.scaling_fit(list(zip(ns, values)))
    column = "fisher" if metric == "fisher" else "min_sensitivity"
    rows = [[cfg["scheme"], fmt(n), fmt(v)] for n, v in zip(ns, values)]
    footers = [f"slope={fmt(slope)} intercept={fmt(intercept)} metric={column}"]
    write_table(out_path, ["scheme", "n", column], rows, footers)
    return 0


def run_hom(args) -> int:
    cfg = resolve(args, {"output": None})
    out_path = resolve_output_path(cfg["output"])
    out = apply(beam_splitter(math.pi / 2, 2), make_basis_state(1, 1, 2))
    rows = [[fmt(na), fmt(nb), fmt(p)] for (na, nb), p in out.probabilities().items()]
    write_table(out_path, ["n_a", "n_b", "probability"], rows, [])
    return 0


def run_litho(args) -> int:
    cfg = resolve(args, {"n": 2, "points": 512, "wavelength": 1.0, "output": None})
    n, points, lam = cfg["n"], cfg["points"], cfg["wavelength"]
    if n < 1:
        raise UsageError(f"--n must be >= 1, got {n}")
    if points < 192:
        raise UsageError(f"--points must be >= 192 (three periods at 64 points each), got {points}")
    out_path = resolve_output_path(cfg["output"])
    single_period = 2.0 * lam

    # shared grid for the table; periods measured on per-kind grids (three
    # periods each, offset a quarter period so maxima are interior)
    shared_x = np.linspace(0.25 * single_period, 3.25 * single_period, points)
    curves = {
        "single": deposition_rate("single", 1, shared_x, lam),
        "classical_two_photon": deposition_rate("classical-two-photon", 2, shared_x, lam),
        f"noon_{n}": deposition_rate("noon", n, shared_x, lam),
    }
    rows = [
        [fmt(shared_x[i])] + [fmt(c.rate[i]) for c in curves.values()]
        for i in range(points)
    ]

    def measured_period(kind: str, nn: int) -> float:
        period = single_period / (nn if kind == "noon" else 1)
        xs = np.linspace(0.25 * period, 3.25 * period, points)
        return fringe_period(deposition_rate(kind, nn, xs, lam))

    p_single = measured_period("single", 1)
    p_classical = measured_period("classical-two-photon", 2)
    p_noon = measured_period("noon", n)
    footers = [
        f"period_single={fmt(p_single)}",
        f"period_classical_two_photon={fmt(p_classical)}",
        f"period_noon={fmt(p_noon)}",
        f"period_ratio_single_over_noon={fmt(p_single / p_noon)}",
    ]
    write_table(out_path, ["x"] + list(curves), rows, footers)
    return 0


def run_rosetta(args) -> int:
    cfg = resolve(args, {
        "n-max": 12, "phi-grid": "0:6.2831853071795862:100",
        "threads": os.cpu_count() or 1, "output": None,
    })
    if not 1 <= cfg["n-max"] <= rosetta.MAX_QUBITS:
        raise UsageError(f"--n-max must be in [1, {rosetta.MAX_QUBITS}], got {cfg['n-max']}")
    grid = parse_grid(cfg["phi-grid"])
    out_path = resolve_output_path(cfg["output"])

    def row(task):
        n, phi = task
        qubit_value = rosetta.expect_flip_product(rosetta.collective_phase(rosetta.ghz_prepare(n), phi))
        fock_value = expectation(estimation.observable_noon_flip(n), noon(n, phi, n))
        return n, phi, qubit_value, fock_value, abs(qubit_value - fock_value)

    tasks = [(n, phi) for n in range(1, cfg["n-max"] + 1) for phi in grid]
    results = grid_map(row, tasks, cfg["threads"])
    rows = [[fmt(n), fmt(phi), fmt(q), fmt(f), fmt(d)] for n, phi, q, f, d in results]
    worst = max(d for *_, d in results)
    write_table(out_path, ["n", "phi", "qubit_value", "fock_value", "discrepancy"], rows,
                [f"max_discrepancy={fmt(worst)}"])
    return 0


def run_sample(args) -> int:
    cfg = resolve(args, {
        "scheme": "noon", "n": 2, "phi": 0.0, "shots": 1000, "seed": 0,
        "estimator": "none", "bayes-points": 2048, "convention": ONE_ARM,
        "invert-second-bs": False, "noon-framing": "post-bs", "cutoff": 0, "output": None,
    })
    if cfg["shots"] < 0:
        raise UsageError(f"--shots must be nonnegative, got {cfg['shots']}")
    if cfg["estimator"] not in ("none", "bayes"):
        raise UsageError(f"unknown estimator {cfg['estimator']!r}")
    out_path = resolve_output_path(cfg["output"])
    tag = _scheme_tag(cfg)
    setup = _setup(cfg, tag)
    hist = estimation.sample_outcomes(setup.sampling, setup.input_state, cfg["phi"], cfg["shots"], cfg["seed"])
    ordered = sorted(hist.counts.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0][1]))
    rows = [[fmt(na), fmt(nb), fmt(c)] for (na, nb), c in ordered]
    footers = []
    if cfg["estimator"] == "bayes":
        grid = np.linspace(0.0, setup.likelihood_period, cfg["bayes-points"], endpoint=False)
        posterior = estimation.bayes_posterior(hist, setup.sampling, setup.input_state, grid)
        footers.append(f"posterior_mean={fmt(estimation.posterior_mean(posterior))}")
        footers.append(f"posterior_std={fmt(estimation.posterior_std(posterior))}")
    write_table(out_path, ["n_a", "n_b", "count"], rows, footers)
    return 0


def _add_scheme_options(sub):
    sub.add_argument("--scheme", choices=SCHEME_NAMES)
    sub.add_argument("--n", type=int)
    sub.add_argument("--convention", choices=CONVENTIONS)
    sub.add_argument("--invert-second-bs", action=argparse.BooleanOptionalAction)
    sub.add_argument("--noon-framing", choices=NOON_FRAMINGS)
    sub.add_argument("--cutoff", type=int, help="Fock cutoff override (0 = per-scheme default)")


def _add_common(sub):
    sub.add_argument("--output", help=f"output file; relative paths land under ${OUTDIR_ENV} when set")
    sub.add_argument("--config", help="key = value file supplying defaults; flags win")


def build_parser() -> _Parser:
    parser = _Parser(prog="fockmzi", description="Two-mode Fock interferometry experiments.")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("sensitivity", help="phase sweep of expectation/variance/sensitivity")
    _add_scheme_options(s)
    s.add_argument("--phi-grid", help="start:stop:count, inclusive endpoints")
    s.add_argument("--threads", type=int)
    _add_common(s)
    s.set_defaults(run=run_sensitivity)

    s = subs.add_parser("scaling", help="photon-number sweep with log-log fit")
    _add_scheme_options(s)
    s.add_argument("--n-range", help="start:stop[:step], inclusive")
    s.add_argument("--phi-grid", help="phase grid searched per size")
    s.add_argument("--metric", choices=("auto", "min-sensitivity", "fisher"))
    s.add_argument("--threads", type=int)
    _add_common(s)
    s.set_defaults(run=run_scaling)

    s = subs.add_parser("hom", help="two-photon coincidence suppression at a 50/50 splitter")
    _add_common(s)
    s.set_defaults(run=run_hom)

    s = subs.add_parser("litho", help="deposition-rate curves and fringe-period ratios")
    s.add_argument("--n", type=int, help="photon number of the path-entangled exposure")
    s.add_argument("--points", type=int, help="samples per curve")
    s.add_argument("--wavelength", type=float)
    _add_common(s)
    s.set_defaults(run=run_litho)

    s = subs.add_parser("rosetta", help="qubit-circuit vs Fock cross-check table")
    s.add_argument("--n-max", type=int)
    s.add_argument("--phi-grid")
    s.add_argument("--threads", type=int)
    _add_common(s)
    s.set_defaults(run=run_rosetta)

    s = subs.add_parser("sample", help="seeded outcome histogram, optional Bayesian estimate")
    _add_scheme_options(s)
    s.add_argument("--phi", type=float, help="true phase used for sampling")
    s.add_argument("--shots", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--estimator", choices=("none", "bayes"))
    s.add_argument("--bayes-points", type=int)
    _add_common(s)
    s.set_defaults(run=run_sample)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _NUMERICAL_FAILURES as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
