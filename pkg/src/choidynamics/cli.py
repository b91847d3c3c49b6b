"""
Command-line interface for choidynamics.

Classifies rho/tau/theta maps, evolves their semigroups, locates PPT
transition times, runs parameter sweeps and builds PPT matrices. Matrices
can be written with --dump and read back with --load.

Exit codes: 0 success, 1 usage or domain error, 2 analytic/numerical
disagreement, 3 construction failure.
"""

import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence

import click
from loguru import logger

from . import __version__
from .core.choi import (
    CSV_HEADER,
    choi_matrix,
    choi_of_spec,
    choi_rank_analytic,
    classify,
    classify_map,
    classify_state,
    schmidt_number_of_choi,
    schmidt_number_structured,
)
from .core.errors import (
    ChoiDynamicsError,
    ConstructionError,
    ConvergenceError,
    PropertyViolationError,
    ValidationError,
)
from .core.foliated import Family, format_real, horodecki_map, make_spec, parse_real
from .core.matrixcore import cmat_from_json, cmat_to_json, numerical_rank
from .core.semigroup import (
    TRAJECTORY_HEADER,
    GeneratorSpec,
    ScanProperty,
    evolve as evolve_map,
    trajectory,
    trajectory_point,
    transition_time,
    trichotomy_scan,
)
from .core.tolerances import default_tolerance
from .core.uet import QStructure, construct_ppt

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DISAGREEMENT = 2
EXIT_CONSTRUCTION = 3

MAX_GRID_POINTS = 10_000_000

# Negative reals such as -1.5 are arguments, not options
REAL_ARGS = {"ignore_unknown_options": True}


def configure_logging(verbose: int, quiet: bool):
    """Configure loguru based on verbosity level."""
    logger.remove()

    if quiet:
        logger.add(sys.stderr, level="ERROR")
    elif verbose == 0:
        logger.add(sys.stderr, level="WARNING")
    elif verbose == 1:
        logger.add(sys.stderr, level="INFO")
    elif verbose == 2:
        logger.add(sys.stderr, level="DEBUG")
    else:
        logger.add(sys.stderr, level="TRACE")


class RealType(click.ParamType):
    """Decimal or rational (``p/q``) real."""

    name = "real"

    def convert(self, value, param, ctx):
        if isinstance(value, float):
            return value
        try:
            return parse_real(value)
        except ValidationError as e:
            self.fail(str(e), param, ctx)


REAL = RealType()


class ChoiDynamicsGroup(click.Group):
    """Maps click usage errors to exit code 1 instead of click's 2."""

    def main(self, *args, **kwargs):
        kwargs["standalone_mode"] = False
        try:
            rv = super().main(*args, **kwargs)
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_USAGE)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_USAGE)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


# -------------------------------------------------------------------------
# Sweep grids
# -------------------------------------------------------------------------

@dataclass(frozen=True)
class ParamRange:
    """Inclusive range ``start:stop:step``; empty when start > stop."""

    start: Fraction
    stop: Fraction
    step: Fraction

    @classmethod
    def parse(cls, text: str) -> "ParamRange":
        parts = str(text).strip().split(":")
        try:
            if len(parts) == 1:
                value = Fraction(parts[0])
                return cls(value, value, Fraction(1))
            if len(parts) != 3:
                raise ValueError("expected start:stop:step")
            start, stop, step = (Fraction(p) for p in parts)
        except (ValueError, ZeroDivisionError) as e:
            raise ValidationError(f"bad range {text!r}: {e}") from e
        if step <= 0:
            raise ValidationError(f"bad range {text!r}: step must be positive")
        return cls(start, stop, step)

    def __len__(self):
        if self.start > self.stop:
            return 0
        return int((self.stop - self.start) // self.step) + 1

    def values(self) -> List[float]:
        return [float(self.start + i * self.step) for i in range(len(self))]


_SWEEP_PARAMS = {
    Family.RHO: ("a", "b", "c", "d"),
    Family.TAU: ("a", "b", "c", "d"),
    Family.THETA: ("a", "c1", "c2", "c3"),
}
_NONNEGATIVE = {"a", "b", "c", "c1", "c2", "c3"}


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian grid over the four parameters of one family."""

    family: Family
    ranges: Dict[str, ParamRange]

    def __post_init__(self):
        names = _SWEEP_PARAMS[self.family]
        if set(self.ranges) != set(names):
            raise ValidationError(f"{self.family.value} sweeps need ranges for {', '.join(names)}")
        for name in names:
            r = self.ranges[name]
            if name in _NONNEGATIVE and len(r) and r.start < 0:
                raise ValidationError(f"{name} must be nonnegative, range starts at {float(r.start)}")
        if self.size > MAX_GRID_POINTS:
            raise ValidationError(f"grid has {self.size} points, limit is {MAX_GRID_POINTS}")

    @property
    def size(self) -> int:
        total = 1
        for r in self.ranges.values():
            total *= len(r)
        return total

    def points(self) -> List[tuple]:
        """Grid points in lexicographic parameter order."""
        axes = [self.ranges[name].values() for name in _SWEEP_PARAMS[self.family]]
        out = [()]
        for axis in axes:
            out = [p + (v,) for p in out for v in axis]
        return out


# -------------------------------------------------------------------------
# Output helpers
# -------------------------------------------------------------------------

def _csv_text(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _echo_json(obj):
    click.echo(json.dumps(obj, indent=2))


def _fmt(ctx, default: str) -> str:
    return ctx.obj.get("format") or default


@contextmanager
def _exit_codes(ctx):
    """Translate library exceptions into the documented exit codes."""
    quiet = ctx.obj.get("quiet", False)
    code = None
    try:
        yield
    except (ConstructionError, ConvergenceError) as e:
        code, err = EXIT_CONSTRUCTION, e
    except PropertyViolationError as e:
        code, err = EXIT_DISAGREEMENT, e
    except (ChoiDynamicsError, ValueError) as e:
        code, err = EXIT_USAGE, e
    if code is not None:
        if not quiet:
            click.secho(f"Error: {err}", fg="red", err=True)
        sys.exit(code)


def _dump(stream, mat):
    """Write ``mat`` as matrix JSON when --dump was given."""
    if stream is None:
        return
    json.dump(cmat_to_json(mat), stream, indent=2)
    stream.write("\n")
    logger.info(f"Matrix written to {stream.name}")


def _load(stream):
    try:
        return cmat_from_json(json.load(stream))
    except json.JSONDecodeError as e:
        raise ValidationError(f"matrix file is not valid JSON: {e}") from e


def _spec(family: str, params):
    return make_spec(family, *params)


def _spec_or_load(family, params, load):
    """Exactly one of FAMILY PARAMS and --load must be given."""
    if load is not None:
        if family is not None or params:
            raise ValidationError("give either FAMILY and four parameters or --load, not both")
        return None
    if family is None:
        raise ValidationError("FAMILY and four parameters are required without --load")
    return _spec(family, params)


def _emit_report(ctx, report):
    if _fmt(ctx, "json") == "csv":
        click.echo(_csv_text(CSV_HEADER, [report.csv_row()]), nl=False)
    else:
        _echo_json(report.to_json())
    logger.info(f"\n{report}")
    sys.exit(EXIT_OK if report.agree else EXIT_DISAGREEMENT)


def _generator(family: str, params) -> GeneratorSpec:
    if family == "theta":
        raise ValidationError("theta maps do not generate semigroups here; use rho or tau")
    return GeneratorSpec(family, *params)


FAMILY = click.Choice([f.value for f in Family], case_sensitive=False)
GENERATOR_FAMILY = click.Choice(["rho", "tau"], case_sensitive=False)


# -------------------------------------------------------------------------
# Commands
# -------------------------------------------------------------------------

@click.group(cls=ChoiDynamicsGroup)
@click.version_option(version=__version__, prog_name="choidynamics")
@click.option("-v", "--verbose", count=True, help="Increase verbosity (use -v, -vv, -vvv)")
@click.option("-q", "--quiet", is_flag=True, help="Suppress all output except errors")
@click.option("--tol", type=float, envvar="CHOI_DYNAMICS_TOL", default=None,
              help="PSD tolerance (relative to max(1, ||M||))")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None,
              help="Output format (default depends on the command)")
@click.option("--seed", default=0, show_default=True, type=int, help="Seed for random constructions")
@click.option("--jobs", default=1, show_default=True, type=click.IntRange(min=1),
              help="Worker threads for sweeps and trajectories")
@click.pass_context
def main(ctx, verbose, quiet, tol, fmt, seed, jobs):
    """
    choidynamics - classify foliated maps on M_3 and their semigroups.

    Reals may be given as decimals or as rationals such as 1/3.
    """
    ctx.ensure_object(dict)
    configure_logging(verbose, quiet)
    if tol is None:
        try:
            tol = default_tolerance()
        except ValidationError as e:
            raise click.BadParameter(str(e), param_hint="--tol") from e
    if not tol > 0:
        raise click.BadParameter("tolerance must be positive", param_hint="--tol")
    ctx.obj.update(verbose=verbose, quiet=quiet, tol=tol, format=fmt, seed=seed, jobs=jobs)


@main.command("classify", context_settings=REAL_ARGS)
@click.argument("family", type=FAMILY)
@click.argument("params", nargs=4, type=REAL)
@click.option("--state", is_flag=True, help="Report on the normalized Choi state (a+b+c = 1/3)")
@click.option("--dump", type=click.File("w"), default=None, help="Write the Choi matrix as JSON")
@click.pass_context
def classify_cmd(ctx, family, params, state, dump):
    """
    Classify FAMILY[P1, P2, P3, P4].

    Exit code 2 when an analytic and a numerical verdict disagree.
    """
    with _exit_codes(ctx):
        spec = _spec(family, params)
        report = classify_state(spec, ctx.obj["tol"]) if state else classify(spec, ctx.obj["tol"])
        _dump(dump, choi_of_spec(spec).mat)
    _emit_report(ctx, report)


@main.command(context_settings=REAL_ARGS)
@click.argument("p", type=REAL)
@click.argument("a", type=REAL)
@click.argument("b", type=REAL)
@click.option("--dump", type=click.File("w"), default=None, help="Write the Choi matrix as JSON")
@click.pass_context
def horodecki(ctx, p, a, b, dump):
    """
    Classify the M_2 map horodecki[P, A, B]; separable exactly when P = 1/2.
    """
    with _exit_codes(ctx):
        fmap = horodecki_map(p, a, b)
        report = classify_map(fmap, ctx.obj["tol"], family="horodecki", params=(p, a, b))
        _dump(dump, choi_matrix(fmap).mat)
    _emit_report(ctx, report)


@main.command(context_settings=REAL_ARGS)
@click.argument("family", type=GENERATOR_FAMILY)
@click.argument("params", nargs=4, type=REAL)
@click.option("--t", "t", type=REAL, default=0.0, show_default=True, help="Evolution time")
@click.option("--trajectory", "traj", nargs=2, type=(REAL, int), default=None,
              help="Sample T_MAX STEPS equally spaced times instead of one")
@click.option("--allow-negative", is_flag=True, help="Permit t < 0 (the inverse map)")
@click.option("--dump", type=click.File("w"), default=None,
              help="Write the Choi matrix at time T as JSON")
@click.pass_context
def evolve(ctx, family, params, t, traj, allow_negative, dump):
    """
    Evolve the semigroup generated by FAMILY[a, b, c, d].
    """
    tol = ctx.obj["tol"]
    with _exit_codes(ctx):
        gen = _generator(family, params)
        if traj is not None:
            if dump is not None:
                raise ValidationError("--dump needs a single time, not --trajectory")
            t_max, steps = traj
            if t_max < 0 and not allow_negative:
                raise ValidationError("T_MAX >= 0 required (use --allow-negative)")
            points = trajectory(gen, t_max, steps, jobs=ctx.obj["jobs"], tol=tol)
        else:
            if t < 0 and not allow_negative:
                raise ValidationError("t >= 0 required (use --allow-negative)")
            points = [trajectory_point(gen, t, tol)]
            _dump(dump, choi_matrix(evolve_map(gen, t)).mat)

    default = "csv" if traj is not None else "json"
    if _fmt(ctx, default) == "csv":
        click.echo(_csv_text(TRAJECTORY_HEADER, [p.csv_row() for p in points]), nl=False)
    elif traj is not None:
        _echo_json({"generator": gen.to_json(), "points": [p.to_json() for p in points]})
    else:
        _echo_json(points[0].to_json())
    agree = all(p.report.agree for p in points)
    sys.exit(EXIT_OK if agree else EXIT_DISAGREEMENT)


@main.command(context_settings=REAL_ARGS)
@click.argument("params", nargs=4, type=REAL)
@click.pass_context
def transition(ctx, params):
    """
    PPT transition time t0 of the rho semigroup generated by rho[a, b, c, d].
    """
    with _exit_codes(ctx):
        gen = GeneratorSpec.rho(*params)
        t0 = transition_time(gen, tol=ctx.obj["tol"])
    if _fmt(ctx, "csv") == "json":
        _echo_json({"generator": gen.to_json(), "t0": format_real(t0)})
    else:
        click.echo(format_real(t0))
    sys.exit(EXIT_OK)


@main.command(context_settings=REAL_ARGS)
@click.argument("family", type=GENERATOR_FAMILY)
@click.argument("params", nargs=4, type=REAL)
@click.option("--property", "prop", type=click.Choice([p.value for p in ScanProperty]),
              default=ScanProperty.PPT.value, show_default=True, help="Hereditary property")
@click.option("--r", "r", type=click.IntRange(min=1), default=None, help="Bound for schmidt-le")
@click.option("--t-max", type=REAL, default=10.0, show_default=True, help="End of the time grid")
@click.option("--steps", type=click.IntRange(min=2), default=200, show_default=True,
              help="Grid points")
@click.pass_context
def scan(ctx, family, params, prop, r, t_max, steps):
    """
    Classify where a property holds along the semigroup of FAMILY[a, b, c, d].

    The verdict is one of always, never or transition (with t0).
    """
    with _exit_codes(ctx):
        gen = _generator(family, params)
        result = trichotomy_scan(gen, ScanProperty(prop), t_max, steps, r=r, tol=ctx.obj["tol"])
    if _fmt(ctx, "json") == "csv":
        row = [result.property.value, "" if r is None else str(r), result.verdict.value,
               "" if result.t0 is None else format_real(result.t0)]
        click.echo(_csv_text(["property", "r", "verdict", "t0"], [row]), nl=False)
    else:
        _echo_json(result.to_json())
    sys.exit(EXIT_OK)


@main.command(context_settings=REAL_ARGS)
@click.argument("family", type=FAMILY)
@click.option("--a", "a", default="0:3:0.25", show_default=True, help="Range start:stop:step")
@click.option("--b", "b", default="0:3:0.25", show_default=True, help="Range (rho, tau)")
@click.option("--c", "c", default="0:3:0.25", show_default=True, help="Range (rho, tau)")
@click.option("--d", "d", default="-1.5:1.5:0.25", show_default=True, help="Range (rho, tau)")
@click.option("--c1", default="0:3:0.25", show_default=True, help="Range (theta)")
@click.option("--c2", default="0:3:0.25", show_default=True, help="Range (theta)")
@click.option("--c3", default="0:3:0.25", show_default=True, help="Range (theta)")
@click.pass_context
def sweep(ctx, family, a, b, c, d, c1, c2, c3):
    """
    Classify every point of a parameter grid; one CSV row per point.

    Rows are in lexicographic parameter order whatever --jobs is. Exit
    code 2 when any row disagrees.
    """
    tol = ctx.obj["tol"]
    fam = Family(family)
    given = {"a": a, "b": b, "c": c, "d": d, "c1": c1, "c2": c2, "c3": c3}
    with _exit_codes(ctx):
        ranges = {name: ParamRange.parse(given[name]) for name in _SWEEP_PARAMS[fam]}
        grid = SweepGrid(fam, ranges)
        logger.info(f"Sweeping {grid.size} {fam.value} points with {ctx.obj['jobs']} worker(s)")
        with ThreadPoolExecutor(max_workers=ctx.obj["jobs"]) as pool:
            reports = list(pool.map(lambda p: classify(make_spec(fam, *p), tol), grid.points()))

    if _fmt(ctx, "csv") == "json":
        _echo_json([rep.to_json() for rep in reports])
    else:
        click.echo(_csv_text(CSV_HEADER, [rep.csv_row() for rep in reports]), nl=False)
    bad = sum(1 for rep in reports if not rep.agree)
    if bad:
        logger.warning(f"{bad} of {len(reports)} sweep points disagree")
    else:
        logger.success(f"Sweep of {len(reports)} points complete")
    sys.exit(EXIT_DISAGREEMENT if bad else EXIT_OK)


@main.command("construct-ppt")
@click.argument("n", type=click.IntRange(min=2))
@click.option("--q-spec", type=click.File("r"), default=None,
              help="JSON Q structure (default: reversal permutation of order N)")
@click.option("--zero", is_flag=True, help="Use the all-zero CUET tuple")
@click.option("--dump", type=click.File("w"), default=None, help="Write the PPT matrix as JSON")
@click.pass_context
def construct_ppt_cmd(ctx, n, q_spec, zero, dump):
    """
    Build a PPT matrix of side N^2 from a CUET tuple and verify it.
    """
    with _exit_codes(ctx):
        if q_spec is not None:
            try:
                qs = QStructure.from_json(json.load(q_spec))
            except json.JSONDecodeError as e:
                raise ValidationError(f"Q structure is not valid JSON: {e}") from e
        else:
            qs = QStructure.reversal(n)
        result = construct_ppt(n, qs, ctx.obj["seed"], zero=zero)
        _dump(dump, result.matrix)
    if _fmt(ctx, "json") == "csv":
        rows = [[str(i), format_real(x), format_real(y)]
                for i, (x, y) in enumerate(zip(result.eigenvalues, result.pt_eigenvalues))]
        click.echo(_csv_text(["index", "eigenvalue", "pt_eigenvalue"], rows), nl=False)
    else:
        _echo_json(result.to_json())
    sys.exit(EXIT_OK)


@main.command(context_settings=REAL_ARGS)
@click.argument("family", type=FAMILY, required=False)
@click.argument("params", nargs=-1, type=REAL)
@click.option("--load", type=click.File("r"), default=None,
              help="Read the Choi matrix from a JSON file instead")
@click.pass_context
def rank(ctx, family, params, load):
    """
    Choi rank of FAMILY[P1, P2, P3, P4], from the case table and numerically.

    With --load only the numerical rank of the stored matrix is reported.
    """
    with _exit_codes(ctx):
        spec = _spec_or_load(family, params, load)
        if spec is None:
            analytic, numerical = None, numerical_rank(_load(load))
        else:
            analytic = choi_rank_analytic(spec)
            numerical = choi_of_spec(spec).rank()
    label = family or "matrix"
    shown = [] if spec is None else [format_real(p) for p in spec.params]
    agree = analytic is None or analytic == numerical
    if _fmt(ctx, "json") == "csv":
        row = [label, *shown, *[""] * (4 - len(shown)),
               "" if analytic is None else str(analytic), str(numerical), "true" if agree else "false"]
        click.echo(_csv_text(["family", "p1", "p2", "p3", "p4", "rank_a", "rank_n", "agree"], [row]),
                   nl=False)
    else:
        _echo_json({
            "family": label,
            "params": shown,
            "rank": {"analytic": analytic, "numerical": numerical},
            "agree": agree,
        })
    sys.exit(EXIT_OK if agree else EXIT_DISAGREEMENT)


@main.command(context_settings=REAL_ARGS)
@click.argument("family", type=FAMILY, required=False)
@click.argument("params", nargs=-1, type=REAL)
@click.option("--t", "t", type=REAL, default=None,
              help="Read the spec as a generator and use its semigroup at time T")
@click.option("--load", type=click.File("r"), default=None,
              help="Read the Choi matrix of a circulant foliated map from a JSON file")
@click.pass_context
def schmidt(ctx, family, params, t, load):
    """
    Schmidt number of the normalized Choi state of FAMILY[P1, P2, P3, P4].
    """
    with _exit_codes(ctx):
        spec = _spec_or_load(family, params, load)
        if spec is None:
            if t is not None:
                raise ValidationError("--t cannot be combined with --load")
            k = schmidt_number_of_choi(_load(load), ctx.obj["tol"])
        else:
            k = schmidt_number_structured(spec, t=t, tol=ctx.obj["tol"])
    if _fmt(ctx, "csv") == "json":
        _echo_json({
            "family": family or "matrix",
            "params": [] if spec is None else [format_real(p) for p in spec.params],
            "t": None if t is None else format_real(t),
            "schmidt_number": k,
        })
    else:
        click.echo(str(k))
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
