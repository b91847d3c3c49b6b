"""
Closed-form quantum dynamical semigroups generated by rho and tau maps.

For the generator rho[a,b,c,d] the semigroup is rho(t) = exp(t rho) =
rho[a(t), b(t), c(t), d(t)] with, writing u = (b+c)/2 and v = (b-c)/2,

    a(t) = 1/3 e^{t(a-u)} [e^{3tu} + 2 cos(sqrt(3) v t)]
    b(t) = 1/3 e^{t(a-u)} [e^{3tu} + 2 cos(sqrt(3) v t - 2 pi/3)]
    c(t) = 1/3 e^{t(a-u)} [e^{3tu} + 2 cos(sqrt(3) v t + 2 pi/3)]
    d(t) = e^{td}

The tau generator evolves as D(a(t),b(t),c(t)) (+) (cosh(td) Id + sinh(td) t).
"""

# Python Includes
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
import scipy.optimize
from loguru import logger

# choidynamics Includes
from .choi import (
    ChoiMatrix,
    ClassificationReport,
    SeparabilityVerdict,
    choi_matrix,
    classify_map,
    schmidt_number_structured,
)
from .errors import ConvergenceError, DomainError, PropertyViolationError
from .foliated import (
    OMEGA,
    CirculantParams,
    FoliatedMap,
    RhoSpec,
    TauSpec,
    build_map,
    circulant_matrix,
    compose,
    format_real,
    parse_real,
)
from .matrixcore import elementary, max_abs
from .tolerances import BISECTION_XTOL, PSD_TOL

SQRT3 = math.sqrt(3.0)
TWO_PI_3 = 2.0 * math.pi / 3.0
BRACKET_LIMIT = 1e6
VERIFY_REL_STEP = 1e-3


class GeneratorFamily(str, enum.Enum):
    RHO = "rho"
    TAU = "tau"


@dataclass(frozen=True)
class GeneratorSpec:
    """Generator rho[a,b,c,d] or tau[a,b,c,d] of a semigroup."""

    family: GeneratorFamily
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        object.__setattr__(self, "family", GeneratorFamily(getattr(self.family, "value", self.family)))
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, parse_real(getattr(self, name)))

    @classmethod
    def rho(cls, a, b, c, d) -> "GeneratorSpec":
        return cls(GeneratorFamily.RHO, a, b, c, d)

    @classmethod
    def tau(cls, a, b, c, d) -> "GeneratorSpec":
        return cls(GeneratorFamily.TAU, a, b, c, d)

    @classmethod
    def from_spec(cls, spec: Union[RhoSpec, TauSpec]) -> "GeneratorSpec":
        family = GeneratorFamily.TAU if isinstance(spec, TauSpec) else GeneratorFamily.RHO
        return cls(family, *spec.params)

    @property
    def params(self) -> Tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    @property
    def u(self) -> float:
        return 0.5 * (self.b + self.c)

    @property
    def v(self) -> float:
        return 0.5 * (self.b - self.c)

    @property
    def w(self) -> float:
        return self.a - self.d

    def negated(self) -> "GeneratorSpec":
        return GeneratorSpec(self.family, -self.a, -self.b, -self.c, -self.d)

    def as_map_spec(self) -> Union[RhoSpec, TauSpec]:
        cls = TauSpec if self.family is GeneratorFamily.TAU else RhoSpec
        return cls(*self.params)

    def to_json(self) -> dict:
        out = {"family": self.family.value}
        out.update({k: repr(v) for k, v in zip(("a", "b", "c", "d"), self.params)})
        return out

    def __str__(self):
        return f"{self.family.value}[{', '.join(format_real(x) for x in self.params)}]"


# -------------------------------------------------------------------------
# Closed forms
# -------------------------------------------------------------------------

def abc_of_t(gen: GeneratorSpec, t: float) -> Tuple[float, float, float, float]:
    """(a(t), b(t), c(t), d(t)) by the real cosine form."""
    if t == 0:
        return 1.0, 0.0, 0.0, 1.0
    u, v = gen.u, gen.v
    pref = math.exp(t * (gen.a - u)) / 3.0
    big = math.exp(3.0 * t * u)
    phase = SQRT3 * v * t
    at = pref * (big + 2.0 * math.cos(phase))
    bt = pref * (big + 2.0 * math.cos(phase - TWO_PI_3))
    ct = pref * (big + 2.0 * math.cos(phase + TWO_PI_3))
    return at, bt, ct, math.exp(t * gen.d)


def abc_of_t_complex(gen: GeneratorSpec, t: float) -> Tuple[complex, complex, complex, complex]:
    """Same quantities through the circulant eigenvalues; kept as a cross-check."""
    a, b, c = gen.a, gen.b, gen.c
    w, w2 = OMEGA, OMEGA * OMEGA
    e0 = np.exp(t * (a + b + c))
    e1 = np.exp(t * (a + b * w + c * w2))
    e2 = np.exp(t * (a + b * w2 + c * w))
    return (
        complex((e0 + e1 + e2) / 3.0),
        complex((e0 + w2 * e1 + w * e2) / 3.0),
        complex((e0 + w * e1 + w2 * e2) / 3.0),
        complex(np.exp(t * gen.d)),
    )


def derivative_check(gen: GeneratorSpec, step: float = 1e-5) -> np.ndarray:
    """Central-difference derivative of abc_of_t at 0 minus (a, b, c, d)."""
    plus = np.asarray(abc_of_t(gen, step))
    minus = np.asarray(abc_of_t(gen, -step))
    return (plus - minus) / (2.0 * step) - np.asarray(gen.params)


def generator_map(gen: GeneratorSpec) -> FoliatedMap:
    return build_map(gen.as_map_spec())


def evolve(gen: GeneratorSpec, t: float) -> FoliatedMap:
    """The semigroup member exp(t * generator) as a foliated map."""
    if t < 0:
        logger.debug(f"evolve({gen}) at t={t}: negative time uses the group extension")
    at, bt, ct, dt = abc_of_t(gen, t)
    lam1 = circulant_matrix(CirculantParams(at, bt, ct))
    label = f"exp({format_real(t)} {gen})"
    if gen.family is GeneratorFamily.TAU:
        return FoliatedMap(lam1, math.cosh(t * gen.d), math.sinh(t * gen.d), label)
    return FoliatedMap.scale(lam1, dt, label)


def map_deviation(f: FoliatedMap, g: FoliatedMap) -> float:
    """Max over the matrix units of ||f(E_jk) - g(E_jk)||_max."""
    n = f.n
    return max(
        max_abs(f.apply(elementary(j, k, n)) - g.apply(elementary(j, k, n)))
        for j in range(n)
        for k in range(n)
    )


def semigroup_law_check(gen: GeneratorSpec, s: float, t: float) -> float:
    """Max deviation of evolve(s) o evolve(t) from evolve(s + t)."""
    return map_deviation(compose(evolve(gen, s), evolve(gen, t)), evolve(gen, s + t))


def g_of_t(gen: GeneratorSpec, t: float) -> float:
    """g(t) with h(t) = e^{2ta} g(t) / 9; g(0) = -9 and g'(0) = 18 w."""
    u, v, w = gen.u, gen.v, gen.w
    phase = SQRT3 * v * t
    return (
        math.exp(4 * u * t)
        - math.exp(-2 * u * t)
        - 9.0 * math.exp(-2 * w * t)
        - 2.0 * math.exp(u * t) * math.cos(phase)
        + 2.0 * math.exp(-2 * u * t) * math.cos(2.0 * phase)
    )


def h_of_t(gen: GeneratorSpec, t: float, check: bool = True) -> float:
    """
    h(t) = b(t) c(t) - d(t)^2.

    Raises
    ------
    PropertyViolationError
        If ``check`` and h disagrees with e^{2ta} g(t) / 9 beyond 1e-10 relative.
    """
    _, bt, ct, dt = abc_of_t(gen, t)
    h = bt * ct - dt * dt
    if check:
        other = math.exp(2 * t * gen.a) * g_of_t(gen, t) / 9.0
        scale = max(1.0, abs(bt * ct), dt * dt)
        if abs(h - other) > 1e-10 * scale:
            logger.error(f"h(t) factorization failed for {gen} at t={t}: {h} vs {other}")
            raise PropertyViolationError(f"h(t) != e^(2ta) g(t)/9 at t={t}")
    return h


def _ppt_at(gen: GeneratorSpec, t: float, tol: float) -> bool:
    return choi_matrix(evolve(gen, t)).is_ppt(tol)


def transition_time(gen: GeneratorSpec, xtol: float = BISECTION_XTOL,
                    tol: float = PSD_TOL, verify: bool = True) -> float:
    """
    The unique t0 > 0 where rho(t) becomes PPT.

    Preconditions: (b, c) != (0, 0), b, c >= 0, w = a - d >= 0 and
    u >= sqrt(2)|v|, under which g is strictly increasing. The root of g is
    bracketed by doubling from [0, 1] and refined by bisection.

    Raises
    ------
    DomainError
        Naming the failed precondition.
    ConvergenceError
        If no bracket is found below 1e6 or the PPT flip does not verify.
    """
    if gen.family is not GeneratorFamily.RHO:
        raise DomainError("transition_time is defined for rho generators")
    if gen.b == 0 and gen.c == 0:
        raise DomainError("(b, c) != (0, 0) required")
    if gen.b < 0 or gen.c < 0:
        raise DomainError("b >= 0 and c >= 0 required")
    if gen.w < 0:
        raise DomainError(f"w = a - d >= 0 required, got w={format_real(gen.w)}")
    if gen.u < math.sqrt(2.0) * abs(gen.v):
        raise DomainError("b + c >= sqrt(2)|b - c| required (u >= sqrt(2)|v|)")

    lo, hi = 0.0, 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        while not g_of_t(gen, hi) > 0:
            lo, hi = hi, 2.0 * hi
            if hi > BRACKET_LIMIT:
                logger.error(f"No bracket for the transition of {gen} below {BRACKET_LIMIT}")
                raise ConvergenceError(f"no sign change of g below t={BRACKET_LIMIT}")
    logger.info(f"Transition of {gen} bracketed in [{lo}, {hi}]")

    if g_of_t(gen, lo) == 0.0:
        t0 = lo
    else:
        t0 = scipy.optimize.bisect(lambda t: g_of_t(gen, t), lo, hi, xtol=xtol, maxiter=200)

    if verify:
        before = t0 * (1.0 - VERIFY_REL_STEP)
        after = t0 * (1.0 + VERIFY_REL_STEP)
        if _ppt_at(gen, before, tol) or not _ppt_at(gen, after, tol):
            logger.error(f"PPT flip of {gen} did not verify around t0={t0}")
            raise ConvergenceError(f"PPT verdict does not flip across t0={format_real(t0)}")
    logger.success(f"Transition time of {gen}: t0 = {format_real(t0)}")
    return t0


# -------------------------------------------------------------------------
# tau semigroup
# -------------------------------------------------------------------------

def _require_tau(gen: GeneratorSpec, t: float):
    if gen.family is not GeneratorFamily.TAU:
        raise DomainError("a tau generator is required")
    if t < 0:
        raise DomainError(f"t >= 0 required, got t={format_real(t)}")


def tau_choi(gen: GeneratorSpec, t: float) -> ChoiMatrix:
    """Choi matrix of the tau semigroup at time t (cosh/sinh entries)."""
    _require_tau(gen, t)
    return choi_matrix(evolve(gen, t))


def tau_trace(gen: GeneratorSpec, t: float) -> float:
    """mu(t) = 3 (a(t) + b(t) + c(t))."""
    at, bt, ct, _ = abc_of_t(gen, t)
    return 3.0 * (at + bt + ct)


def tau_positivity(gen: GeneratorSpec, t: float, tol: float = PSD_TOL) -> bool:
    """a(t) >= cosh(td), b(t), c(t) >= 0 and b(t) c(t) >= sinh(td)^2."""
    _require_tau(gen, t)
    at, bt, ct, _ = abc_of_t(gen, t)
    ch, sh = math.cosh(t * gen.d), math.sinh(t * gen.d)
    slack = tol * max(1.0, abs(at), ch, abs(bt), abs(ct))
    return at >= ch - slack and bt >= -slack and ct >= -slack and bt * ct >= sh * sh - slack * slack


# -------------------------------------------------------------------------
# Trajectories
# -------------------------------------------------------------------------

TRAJECTORY_HEADER = ["t", "at", "bt", "ct", "dt", "min_eig_choi", "min_eig_pt_choi", "cp", "ppt"]


@dataclass
class TrajectoryPoint:
    t: float
    at: float
    bt: float
    ct: float
    dt: float
    min_eig_choi: float
    min_eig_pt_choi: float
    report: ClassificationReport

    @property
    def cp(self) -> bool:
        return bool(self.report.completely_positive.value)

    @property
    def ppt(self) -> bool:
        return bool(self.report.ppt.value)

    def csv_row(self) -> List[str]:
        values = [self.t, self.at, self.bt, self.ct, self.dt, self.min_eig_choi, self.min_eig_pt_choi]
        return [format_real(x) for x in values] + [
            "true" if self.cp else "false",
            "true" if self.ppt else "false",
        ]

    def to_json(self) -> dict:
        out = dict(zip(TRAJECTORY_HEADER, self.csv_row()))
        out["cp"], out["ppt"] = self.cp, self.ppt
        out["report"] = self.report.to_json()
        return out


def trajectory_point(gen: GeneratorSpec, t: float, tol: float = PSD_TOL) -> TrajectoryPoint:
    at, bt, ct, dt = abc_of_t(gen, t)
    fmap = evolve(gen, t)
    choi = choi_matrix(fmap)
    report = classify_map(fmap, tol, family=f"{gen.family.value}(t)", params=(at, bt, ct, dt))
    return TrajectoryPoint(
        t, at, bt, ct, dt,
        float(choi.eigenvalues()[0]),
        float(choi.pt_eigenvalues()[0]),
        report,
    )


def trajectory(gen: GeneratorSpec, t_max: float, steps: int, jobs: int = 1,
               tol: float = PSD_TOL) -> List[TrajectoryPoint]:
    """Points at ``steps`` equally spaced times in [0, t_max], in time order."""
    if steps < 1:
        raise DomainError(f"steps >= 1 required, got {steps}")
    times = np.linspace(0.0, t_max, steps) if steps > 1 else np.array([0.0])
    logger.info(f"Sampling {gen} at {steps} times on [0, {t_max}] with {jobs} worker(s)")
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        points = list(pool.map(lambda t: trajectory_point(gen, float(t), tol), times))
    logger.success(f"Trajectory of {gen} complete")
    return points


# -------------------------------------------------------------------------
# Trichotomy scans
# -------------------------------------------------------------------------

class ScanProperty(str, enum.Enum):
    SEPARABLE = "separable"
    PPT = "ppt"
    SCHMIDT_LE = "schmidt-le"
    CP = "cp"


class TrichotomyVerdict(str, enum.Enum):
    ALWAYS_HOLDS = "always"
    TRANSITION_AT = "transition"
    NEVER_HOLDS = "never"


@dataclass
class TrichotomyResult:
    property: ScanProperty
    verdict: TrichotomyVerdict
    t0: Optional[float] = None
    r: Optional[int] = None
    scan_grid: List[Tuple[float, bool]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "property": self.property.value,
            "r": self.r,
            "verdict": self.verdict.value,
            "t0": None if self.t0 is None else format_real(self.t0),
            "scan_grid": [[format_real(t), ok] for t, ok in self.scan_grid],
        }


def property_predicate(gen: GeneratorSpec, prop: ScanProperty, r: Optional[int] = None,
                       tol: float = PSD_TOL) -> Callable[[float], bool]:
    """The property as a function of t along the semigroup of ``gen``."""
    prop = ScanProperty(prop)
    if prop is ScanProperty.PPT:
        return lambda t: _ppt_at(gen, t, tol)
    if prop is ScanProperty.CP:
        return lambda t: choi_matrix(evolve(gen, t)).is_psd(tol)
    if prop is ScanProperty.SEPARABLE:
        # Decided-separable only; undecidable PPT points count as false.
        def separable(t):
            report = classify_map(evolve(gen, t), tol)
            return report.separable is not None and report.separable.verdict is SeparabilityVerdict.SEPARABLE
        return separable
    if r is None or r < 1:
        raise DomainError("schmidt-le needs r >= 1")

    def schmidt_le(t):
        try:
            return schmidt_number_structured(gen.as_map_spec(), t=t, tol=tol) <= r
        except DomainError:
            return False
    return schmidt_le


def trichotomy_scan(gen: GeneratorSpec, prop: ScanProperty, t_max: float, steps: int,
                    r: Optional[int] = None, tol: float = PSD_TOL) -> TrichotomyResult:
    """
    Evaluate a hereditary property on a t-grid and classify the true-set.

    The true-set must be empty, all of the grid, or a right half-line; a
    crossing is refined with transition_time when its preconditions hold
    and by bisection on the property otherwise.

    Raises
    ------
    PropertyViolationError
        If the true-set is not a right half-line on the grid.
    """
    prop = ScanProperty(prop)
    if steps < 2:
        raise DomainError(f"steps >= 2 required, got {steps}")
    if not t_max > 0:
        raise DomainError(f"t_max > 0 required, got {t_max}")
    holds = property_predicate(gen, prop, r, tol)
    times = np.linspace(0.0, t_max, steps)
    grid = [(float(t), bool(holds(float(t)))) for t in times]
    flags = [ok for _, ok in grid]

    first = flags.index(True) if True in flags else None
    if first is not None and not all(flags[first:]):
        logger.error(f"{prop.value} along {gen} is not a right half-line on the grid")
        raise PropertyViolationError(f"non-monotone {prop.value} scan for {gen}")

    if first is None:
        verdict, t0 = TrichotomyVerdict.NEVER_HOLDS, None
    elif first == 0:
        verdict, t0 = TrichotomyVerdict.ALWAYS_HOLDS, None
    else:
        verdict = TrichotomyVerdict.TRANSITION_AT
        lo, hi = grid[first - 1][0], grid[first][0]
        t0 = None
        if prop is ScanProperty.PPT and gen.family is GeneratorFamily.RHO:
            try:
                t0 = transition_time(gen, tol=tol)
            except DomainError:
                t0 = None
        if t0 is None:
            t0 = scipy.optimize.bisect(
                lambda t: 1.0 if holds(t) else -1.0, lo, hi, xtol=BISECTION_XTOL, maxiter=200
            )
    logger.info(f"Trichotomy scan of {prop.value} along {gen}: {verdict.value}")
    return TrichotomyResult(prop, verdict, t0, r, grid)


# -------------------------------------------------------------------------
# Two-level example semigroups
# -------------------------------------------------------------------------

def two_level_map(t: float) -> FoliatedMap:
    """
    Foliated semigroup on M_2: E_11 -> diag(1, 1-e^{-t}), E_22 -> diag(0, e^{-t}),
    off-diagonal entries scaled by e^{-t/2}. CP for all t, never PPT.
    """
    if t < 0:
        raise DomainError(f"t >= 0 required, got t={format_real(t)}")
    e = math.exp(-t)
    return FoliatedMap.scale([[1.0, 0.0], [1.0 - e, e]], math.exp(-t / 2.0), f"two-level({format_real(t)})")


def two_level_matrix(t: float, u: float, scaled: bool = True) -> np.ndarray:
    """
    4 x 4 semigroup T_t = (1/2)^t M_t (``scaled``) or S_t = M_t with
    M_t = [[1,0,0,sqrt(1-u^2)],[0,u^t,0,0],[0,0,0,0],[0,0,0,0]].
    """
    if t < 0:
        raise DomainError(f"t >= 0 required, got t={format_real(t)}")
    if not 0 < u <= 1:
        raise DomainError(f"0 < u <= 1 required, got u={format_real(u)}")
    m = np.zeros((4, 4), dtype=np.complex128)
    m[0, 0] = 1.0
    m[0, 3] = math.sqrt(1.0 - u * u)
    m[1, 1] = u ** t
    return (0.5 ** t) * m if scaled else m


def horodecki_u(theta: float) -> float:
    """
    u = sin(2 theta) for a = cos(theta), b = sin(theta), 0 < theta <= pi/4.

    With this u the Pauli form of horodecki_map(1/2, a, b) is the scaled
    member at t = 1.
    """
    theta = parse_real(theta)
    if not 0.0 < theta <= math.pi / 4.0:
        raise DomainError(f"0 < theta <= pi/4 required, got theta={format_real(theta)}")
    return math.sin(2.0 * theta)


def two_level_semigroup(t: float, variant: str, u: float = 1.0):
    """Dispatch on ``variant``: ``"foliated"`` (map on M_2), ``"scaled"`` or ``"unscaled"`` (4 x 4 matrices)."""
    if variant == "foliated":
        return two_level_map(t)
    if variant in ("scaled", "unscaled"):
        return two_level_matrix(t, u, scaled=(variant == "scaled"))
    raise DomainError(f"unknown variant {variant!r}")


def two_level_law_check(variant: str, s: float, t: float, u: float = 1.0) -> float:
    """Max deviation of member(s) member(t) from member(s + t)."""
    if variant == "foliated":
        return map_deviation(compose(two_level_map(s), two_level_map(t)), two_level_map(s + t))
    a = two_level_semigroup(s, variant, u)
    b = two_level_semigroup(t, variant, u)
    return max_abs(a @ b - two_level_semigroup(s + t, variant, u))
