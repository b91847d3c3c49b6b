"""
Choi matrices of foliated maps and their classification.

Each classification carries two independent opinions: the closed-form
parameter criterion ("analytic") and a spectral computation on the Choi
matrix ("numerical").
"""

# Python Includes
import enum
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
import scipy.optimize
from loguru import logger

# choidynamics Includes
from .errors import DomainError, PropertyViolationError, ValidationError
from .foliated import (
    CirculantParams,
    FoliatedMap,
    MapSpec,
    OffdiagKind,
    RhoSpec,
    TauSpec,
    ThetaSpec,
    build_map,
    circulant_matrix,
    circulant_params_of,
    compose,
    format_real,
)
from .matrixcore import (
    BipartiteDims,
    hermitian_eigenvalues,
    is_psd,
    max_abs,
    numerical_rank,
    partial_transpose,
)
from .tolerances import PSD_TOL, RANK_TOL

# Simplex lattice resolution for the block-positivity search; divisible by 3
# so the uniform vector is a lattice point.
LATTICE_STEPS = 42
NORMALIZATION = 1.0 / 3.0
# Nelder-Mead refinement only runs within this relative margin of the
# positivity boundary, or outside the positive region.
REFINE_MARGIN = 1e-2
# PPT and separability coincide on C^2 (x) C^2 and C^2 (x) C^3.
SMALL_SIDE = 6


def _scale(*values) -> float:
    return max([1.0] + [abs(v) for v in values])


def _ge(x: float, y: float, tol: float) -> bool:
    """x >= y with a slack relative to the magnitudes involved."""
    return x >= y - tol * _scale(x, y)


def _is_zero(x: float, *ref: float, tol: float = 1e-12) -> bool:
    return abs(x) <= tol * _scale(*ref)


# -------------------------------------------------------------------------
# Report types
# -------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    """An analytic and a numerical opinion on one property; either may be absent."""

    analytic: Optional[bool]
    numerical: Optional[bool] = None

    @property
    def agree(self) -> bool:
        if self.analytic is None or self.numerical is None:
            return True
        return self.analytic == self.numerical

    @property
    def value(self) -> Optional[bool]:
        return self.analytic if self.analytic is not None else self.numerical

    def to_json(self) -> dict:
        return {"analytic": self.analytic, "numerical": self.numerical, "agree": self.agree}


class SeparabilityVerdict(str, enum.Enum):
    SEPARABLE = "separable"
    ENTANGLED = "entangled"
    UNDECIDABLE = "undecidable"


@dataclass(frozen=True)
class Separability:
    verdict: SeparabilityVerdict
    reason: str = ""

    @property
    def decided(self) -> bool:
        return self.verdict is not SeparabilityVerdict.UNDECIDABLE

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "decided": self.decided, "reason": self.reason}


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """C = sum_jk E_jk (x) Lambda(E_jk) in the lexicographic product basis."""

    mat: np.ndarray
    dims: BipartiteDims
    source: str = ""

    def block(self, j: int, k: int) -> np.ndarray:
        n = self.dims.n
        return self.mat[j * n:(j + 1) * n, k * n:(k + 1) * n]

    def partial_transpose(self) -> np.ndarray:
        return partial_transpose(self.mat, self.dims)

    def trace(self) -> complex:
        return complex(np.trace(self.mat))

    def eigenvalues(self) -> np.ndarray:
        return hermitian_eigenvalues(self.mat)

    def pt_eigenvalues(self) -> np.ndarray:
        return hermitian_eigenvalues(self.partial_transpose())

    def is_psd(self, tol: Optional[float] = None) -> bool:
        return is_psd(self.mat, tol)

    def is_ppt(self, tol: Optional[float] = None) -> bool:
        return is_psd(self.mat, tol) and is_psd(self.partial_transpose(), tol)

    def rank(self, rel_tol: float = RANK_TOL) -> int:
        return numerical_rank(self.mat, rel_tol)


CSV_HEADER = [
    "family", "p1", "p2", "p3", "p4",
    "positive_a", "positive_n", "cp_a", "cp_n", "cocp_a", "cocp_n",
    "ppt", "decomposable", "atomic", "separable", "rank_a", "rank_n", "schmidt", "agree",
]


def _csv_bool(x: Optional[bool]) -> str:
    if x is None:
        return ""
    return "true" if x else "false"


@dataclass
class ClassificationReport:
    """Verdicts for one map (or one normalized Choi state)."""

    family: str
    params: Tuple[float, ...]
    completely_positive: Verdict
    completely_copositive: Verdict
    ppt: Verdict
    positive: Optional[Verdict] = None
    decomposable: Optional[Verdict] = None
    atomic: Optional[Verdict] = None
    separable: Optional[Separability] = None
    choi_rank: int = 0
    choi_rank_analytic: Optional[int] = None
    schmidt_number: Optional[int] = None
    density: Optional[bool] = None
    witness: Optional[str] = None
    notes: List[str] = field(default_factory=list)

    @property
    def verdicts(self) -> List[Verdict]:
        found = [self.completely_positive, self.completely_copositive, self.ppt]
        found += [v for v in (self.positive, self.decomposable, self.atomic) if v is not None]
        return found

    @property
    def rank_agree(self) -> bool:
        return self.choi_rank_analytic is None or self.choi_rank_analytic == self.choi_rank

    @property
    def agree(self) -> bool:
        return all(v.agree for v in self.verdicts) and self.rank_agree

    def to_json(self) -> dict:
        def opt(v):
            return v.to_json() if v is not None else None

        return {
            "family": self.family,
            "params": [format_real(p) for p in self.params],
            "positive": opt(self.positive),
            "completely_positive": self.completely_positive.to_json(),
            "completely_copositive": self.completely_copositive.to_json(),
            "ppt": self.ppt.to_json(),
            "decomposable": opt(self.decomposable),
            "atomic": opt(self.atomic),
            "separable": opt(self.separable),
            "choi_rank": {"analytic": self.choi_rank_analytic, "numerical": self.choi_rank},
            "schmidt_number": self.schmidt_number,
            "density": self.density,
            "witness": self.witness,
            "notes": list(self.notes),
            "agree": self.agree,
        }

    def csv_row(self) -> List[str]:
        def a(v):
            return _csv_bool(v.analytic) if v is not None else ""

        def n(v):
            return _csv_bool(v.numerical) if v is not None else ""

        def val(v):
            return _csv_bool(v.value) if v is not None else ""

        params = [format_real(p) for p in self.params] + [""] * (4 - len(self.params))
        return [
            self.family, *params,
            a(self.positive), n(self.positive),
            a(self.completely_positive), n(self.completely_positive),
            a(self.completely_copositive), n(self.completely_copositive),
            val(self.ppt), val(self.decomposable), val(self.atomic),
            self.separable.verdict.value if self.separable else "",
            "" if self.choi_rank_analytic is None else str(self.choi_rank_analytic),
            str(self.choi_rank),
            "" if self.schmidt_number is None else str(self.schmidt_number),
            _csv_bool(self.agree),
        ]

    def __str__(self):
        def show(v):
            if v is None:
                return "n/a"
            num = "-" if v.numerical is None else v.numerical
            return f"{v.analytic} (numerical {num})"

        content = ""
        content += f" map          : {self.family}[{', '.join(format_real(p) for p in self.params)}]\n"
        content += f" positive     : {show(self.positive)}\n"
        content += f" CP           : {show(self.completely_positive)}\n"
        content += f" co-CP        : {show(self.completely_copositive)}\n"
        content += f" PPT          : {show(self.ppt)}\n"
        content += f" decomposable : {show(self.decomposable)}\n"
        content += f" atomic       : {show(self.atomic)}\n"
        content += f" separable    : {self.separable.verdict.value if self.separable else 'n/a'}\n"
        content += f" rank         : {self.choi_rank} (analytic {self.choi_rank_analytic})\n"
        content += f" schmidt      : {self.schmidt_number}\n"
        content += f" agree        : {self.agree}\n"

        border = "=" * 40
        box = f"{border}\n"
        box += "=      Classification Report       =\n"
        box += f"{border}\n"
        box += content
        box += border
        return box


# -------------------------------------------------------------------------
# Choi matrices
# -------------------------------------------------------------------------

def choi_matrix(fmap: FoliatedMap, source: str = "") -> ChoiMatrix:
    """
    Block (j,k) of the result is Lambda(E_jk).

    Filled entry by entry from the foliation: Lambda(E_jj) = diag(lambda1[:, j])
    and Lambda(E_jk) = alpha E_jk + beta E_kj for j != k.
    """
    n = fmap.n
    blocks = np.zeros((n, n, n, n), dtype=np.complex128)
    j, k = np.nonzero(~np.eye(n, dtype=bool))
    blocks[j, j, k, k] = fmap.alpha
    blocks[j, k, k, j] = fmap.beta
    jj, pp = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    blocks[jj, pp, jj, pp] = fmap.lambda1[pp, jj]
    return ChoiMatrix(blocks.reshape(n * n, n * n), BipartiteDims(n, n), source or str(fmap))


def foliated_map_from_choi(mat, tol: float = PSD_TOL) -> FoliatedMap:
    """
    Read a foliated map back from its Choi matrix.

    Raises
    ------
    ValidationError
        If ``mat`` is not the Choi matrix of a foliated map on M_n.
    """
    mat = np.asarray(mat, dtype=np.complex128)
    side = mat.shape[0]
    n = int(round(np.sqrt(side)))
    if mat.ndim != 2 or mat.shape != (side, side) or n * n != side or n < 2:
        raise ValidationError(f"expected an n^2 x n^2 Choi matrix with n >= 2, got {mat.shape}")
    blocks = mat.reshape(n, n, n, n)
    lam1 = np.array([[blocks[j, p, j, p] for j in range(n)] for p in range(n)])
    fmap = FoliatedMap(lam1, blocks[0, 0, 1, 1], blocks[0, 1, 1, 0], label="loaded")
    if max_abs(choi_matrix(fmap).mat - mat) > tol * max(1.0, max_abs(mat)):
        raise ValidationError("matrix is not the Choi matrix of a foliated map")
    return fmap


def choi_of_spec(spec: MapSpec) -> ChoiMatrix:
    return choi_matrix(build_map(spec), str(spec))


# -------------------------------------------------------------------------
# Positivity by block-positivity search
# -------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _simplex_lattice(n: int, steps: int) -> np.ndarray:
    points = []
    for bars in itertools.combinations(range(steps + n - 1), n - 1):
        prev, comp = -1, []
        for b in bars:
            comp.append(b - prev - 1)
            prev = b
        comp.append(steps + n - 2 - prev)
        points.append(comp)
    return np.asarray(points, dtype=float) / steps


def _test_blocks(lam1: np.ndarray, coeff: float, s: np.ndarray) -> np.ndarray:
    """Lambda(s s^t) for a batch of nonnegative unit vectors s (rows)."""
    n = lam1.shape[0]
    out = coeff * (s[:, :, None] * s[:, None, :])
    idx = np.arange(n)
    out[:, idx, idx] = (s * s) @ lam1.T
    return out


def block_positivity_minimum(fmap: FoliatedMap, refine: bool = True) -> Optional[float]:
    """
    min over unit vectors x of lambda_min(Lambda(x x*)).

    The map is positive iff the result is nonnegative. For real maps of
    SCALE or TRANSPOSE_SCALE kind the phases of x act by a diagonal unitary
    congruence, so only nonnegative real x need to be searched: a simplex
    lattice first, then Nelder-Mead from the best lattice points.

    Returns ``None`` for complex or AFFINE maps.
    """
    if fmap.offdiag_kind is OffdiagKind.AFFINE or not fmap.is_real():
        logger.debug(f"Block positivity not available for {fmap}")
        return None
    lam1 = fmap.lambda1.real
    coeff = float((fmap.alpha + fmap.beta).real)
    n = fmap.n
    scale = _scale(max_abs(lam1), coeff)

    s = np.sqrt(_simplex_lattice(n, LATTICE_STEPS))
    mins = np.linalg.eigvalsh(_test_blocks(lam1, coeff, s))[:, 0]
    best = float(mins.min())
    if not refine or best < -1e-3 * scale:
        return best

    def objective(z):
        z = np.abs(z)
        norm = np.linalg.norm(z)
        if norm == 0.0:
            return scale
        return float(np.linalg.eigvalsh(_test_blocks(lam1, coeff, (z / norm)[None, :]))[0, 0])

    for start in np.argsort(mins)[:2]:
        res = scipy.optimize.minimize(
            objective, s[start], method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": 400 * n},
        )
        best = min(best, float(res.fun))
    return best


def _numerically_positive(fmap: FoliatedMap, tol: float, refine: bool = True) -> Optional[bool]:
    m = block_positivity_minimum(fmap, refine)
    if m is None:
        return None
    coeff = float(abs(fmap.alpha + fmap.beta))
    return m >= -tol * _scale(max_abs(fmap.lambda1), coeff)


@lru_cache(maxsize=16)
def _witness_positive(xi: RhoSpec, tol: float) -> bool:
    return bool(_numerically_positive(build_map(xi), tol))


# -------------------------------------------------------------------------
# Closed-form criteria
# -------------------------------------------------------------------------

def rho_abc_positive(a: float, b: float, c: float, tol: float = PSD_TOL) -> bool:
    """Positivity of rho[a,b,c] = rho[a,b,c,-1] (a, b, c >= 0)."""
    if not _ge(a + b + c, 2.0, tol):
        return False
    return a >= 1.0 or _ge(b * c, (1.0 - a) ** 2, tol)


def rho_abc_positivity_margin(a: float, b: float, c: float) -> float:
    """Signed slack of the positivity criterion of rho[a,b,c]; >= 0 iff positive."""
    return min(a + b + c - 2.0, max(a - 1.0, b * c - (1.0 - a) ** 2))


def theta_positivity_margin(a: float, c1: float, c2: float, c3: float) -> float:
    """Signed slack of the positivity criterion of theta[a,c1,c2,c3]."""
    return min(a - 1.0, c1 * c2 * c3 - (2.0 - a) ** 3)


def rho_abc_decomposable(a: float, b: float, c: float, tol: float = PSD_TOL) -> Optional[bool]:
    """Decomposability of rho[a,b,c] for 0 <= a < 2; ``None`` outside that range."""
    if not 0.0 <= a < 2.0:
        return None
    return _ge(b * c, (1.0 - a / 2.0) ** 2, tol)


def rho_abc_decomposition(a: float, b: float, c: float,
                          tol: float = PSD_TOL) -> Optional[Tuple[FoliatedMap, FoliatedMap]]:
    """
    Search rho[a,b,c] = cp + cocp with cp CP and cocp co-CP.

    Averaging a decomposition over diagonal unitaries and cyclic shifts keeps
    both parts, so they can be taken as D(x,0,0) (+) m Id and
    D(a-x,b,c) (+) (-1-m) Id with x = max(m, -2m) <= a. The scalar m is
    found with a bounded scipy search on the co-CP deficit (1+m)^2 - bc and
    both parts are then checked on their Choi matrices.

    Returns ``None`` when no verified decomposition exists.
    """
    def deficit(m):
        return (1.0 + m) ** 2 - b * c

    lo, hi = -a / 2.0, a
    candidates = [lo, hi]
    if hi - lo > 0.0:
        res = scipy.optimize.minimize_scalar(
            deficit, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12},
        )
        candidates.append(float(res.x))
    # the bounded search never evaluates the end points
    m = min(candidates, key=deficit)
    x = min(a, max(m, -2.0 * m))
    cp = FoliatedMap.scale(circulant_matrix(CirculantParams(x, 0.0, 0.0)), m, "cp part")
    cocp = FoliatedMap.scale(
        circulant_matrix(CirculantParams(a - x, b, c)), -1.0 - m, "co-cp part"
    )
    if not choi_matrix(cp).is_psd(tol):
        return None
    if not is_psd(choi_matrix(cocp).partial_transpose(), tol):
        return None
    return cp, cocp


def circulant_foliated_cp(x, y, z, alpha, beta, tol: float = PSD_TOL) -> bool:
    """
    CP criterion for D(x,y,z) (+) (alpha Id + beta transpose) on F_3, all real.

    The Choi matrix splits into the block [[x,alpha,alpha],[alpha,x,alpha],
    [alpha,alpha,x]] and three copies of [[z,beta],[beta,y]].
    """
    return (
        _ge(x, alpha, tol)
        and _ge(x, -2.0 * alpha, tol)
        and _ge(y, 0.0, tol)
        and _ge(z, 0.0, tol)
        and _ge(y * z, beta * beta, tol)
    )


def circulant_foliated_cocp(x, y, z, alpha, beta, tol: float = PSD_TOL) -> bool:
    """Partial transposition swaps the roles of alpha and beta."""
    return circulant_foliated_cp(x, y, z, beta, alpha, tol)


def central_block_eigenvalues(a: float, d: float) -> Tuple[float, float, float]:
    """
    Eigenvalues (a+2d, a-d, a-d) of [[a,d,d],[d,a,d],[d,d,a]].

    Raises
    ------
    PropertyViolationError
        If a numerical eigensolve disagrees beyond 1e-12 relative.
    """
    closed = (a + 2 * d, a - d, a - d)
    block = np.full((3, 3), d, dtype=float)
    np.fill_diagonal(block, a)
    numeric = np.linalg.eigvalsh(block)
    if np.max(np.abs(np.sort(closed) - numeric)) > 1e-12 * _scale(a, d):
        raise PropertyViolationError(f"central block spectrum mismatch at a={a}, d={d}")
    return closed


# -------------------------------------------------------------------------
# Ranks and Schmidt numbers
# -------------------------------------------------------------------------

def choi_rank_analytic(spec: MapSpec) -> Optional[int]:
    """
    Rank of the Choi matrix from the closed-form case table.

    Returns ``None`` (unlisted) outside the cases the table covers.
    """
    if isinstance(spec, RhoSpec):
        a, b, c, d = spec.params
        if _is_zero(a) or _is_zero(b) or _is_zero(c):
            return None
        if _is_zero(a - d, a, d):
            return 7
        if _is_zero(a + 2 * d, a, d):
            return 8
        return 9
    if isinstance(spec, TauSpec):
        a, b, c, d = spec.params
        if _is_zero(a):
            return None
        det = b * c - d * d
        if not _is_zero(det, b * c, d * d):
            pair_rank = 2
        elif not (_is_zero(b) and _is_zero(c) and _is_zero(d)):
            pair_rank = 1
        else:
            pair_rank = 0
        return 3 + 3 * pair_rank
    if isinstance(spec, ThetaSpec):
        a, c1, c2, c3 = spec.params
        if _is_zero(c1) or _is_zero(c2) or _is_zero(c3):
            return None
        return 5 if _is_zero(a - 2.0, a) else 6
    raise ValidationError(f"unsupported spec type {type(spec).__name__}")


def _schmidt_circulant(x, y, z, alpha, beta, tol: float) -> int:
    """Schmidt number of a normalized Choi state of D(x,y,z) (+) (alpha Id + beta t)."""
    if not circulant_foliated_cp(x, y, z, alpha, beta, tol):
        raise DomainError("not a density: the Choi matrix is not positive semidefinite")
    if _is_zero(alpha, x) and _is_zero(beta, y, z):
        return 1
    if _is_zero(alpha, x):
        return 2
    central_block_eigenvalues(x, alpha)
    return 2 if _is_zero(x + 2 * alpha, x, alpha) else 3


def _require_normalized(a, b, c):
    total = a + b + c
    if abs(total - NORMALIZATION) > 1e-12:
        raise DomainError(f"a + b + c = 1/3 required, got {format_real(total)}")


def schmidt_number_structured(spec: MapSpec, t: Optional[float] = None,
                              tol: float = PSD_TOL) -> int:
    """
    Schmidt number of the structured Choi densities.

    Without ``t`` the spec itself must be a density (a + b + c = 1/3 for rho
    and tau). With ``t`` a rho or tau spec is read as a generator and the
    normalized Choi matrix of its semigroup at time t is used.

    Raises
    ------
    DomainError
        Naming the failed density condition.
    """
    if t is not None:
        if isinstance(spec, ThetaSpec):
            raise DomainError("theta specs have no time evolution")
        from .semigroup import GeneratorSpec, evolve

        fmap = evolve(GeneratorSpec.from_spec(spec), t)
        x, y, z = (float(v.real) for v in circulant_params_of(fmap.lambda1).as_tuple())
        norm = 3.0 * (x + y + z)
        if not norm > 0:
            raise DomainError(f"trace 3(a+b+c) > 0 required, got {format_real(norm)}")
        return _schmidt_circulant(x / norm, y / norm, z / norm,
                                  fmap.alpha.real / norm, fmap.beta.real / norm, tol)

    if isinstance(spec, ThetaSpec):
        if not _ge(spec.a, 2.0, tol):
            raise DomainError(f"a >= 2 required for a theta density, got a={format_real(spec.a)}")
        central_block_eigenvalues(spec.a, -1.0)
        return 2 if _is_zero(spec.a - 2.0, spec.a) else 3

    a, b, c, d = spec.params
    spec.require_nonnegative()
    _require_normalized(a, b, c)
    if _is_zero(d):
        raise DomainError("d != 0 required")
    if isinstance(spec, TauSpec):
        if not _ge(b * c, d * d, tol):
            raise DomainError("bc >= d^2 required for a tau density")
        return 2
    if not (_ge(a, d, tol) and _ge(a, -2 * d, tol)):
        raise DomainError("a >= max(d, -2d) required for a rho density")
    central_block_eigenvalues(a, d)
    return 2 if _is_zero(a + 2 * d, a, d) else 3


def schmidt_number_of_choi(mat, tol: float = PSD_TOL) -> int:
    """
    Schmidt number of a stored Choi matrix of a real circulant foliated map.

    The matrix is normalized by its trace before the block rule is applied.

    Raises
    ------
    ValidationError
        If the matrix is not the Choi matrix of a foliated map.
    DomainError
        If the map is not a real 3 x 3 circulant one or the trace is not positive.
    """
    fmap = foliated_map_from_choi(mat, tol)
    if fmap.n != 3 or not fmap.is_real():
        raise DomainError("the block rule needs a real foliated map on M_3")
    try:
        circ = circulant_params_of(fmap.lambda1)
    except ValidationError as e:
        raise DomainError("the block rule needs a circulant diagonal part") from e
    x, y, z = (float(v.real) for v in circ.as_tuple())
    norm = 3.0 * (x + y + z)
    if not norm > 0:
        raise DomainError(f"trace > 0 required, got {format_real(norm)}")
    return _schmidt_circulant(x / norm, y / norm, z / norm,
                              fmap.alpha.real / norm, fmap.beta.real / norm, tol)


# -------------------------------------------------------------------------
# Entanglement witness
# -------------------------------------------------------------------------

def pptes_witness(spec: RhoSpec, tol: float = PSD_TOL) -> Optional[FoliatedMap]:
    """
    Positive map xi = rho[a',b',c',-1] with xi o rho[a,b,c,d] not CP.

    Only the two candidates rho[1,0,1] (when a+b < 2d) and rho[1,1,0]
    (when a+c < 2d) are tried. The composed Choi matrix then has the
    eigenvalue a+b-2d (or a+c-2d); its computed sign is a sanity check.
    Returns ``None`` when neither candidate applies or the check fails.

    Raises
    ------
    DomainError
        Unless d > 0, a >= d and bc >= d^2.
    PropertyViolationError
        If the candidate map is not numerically positive.
    """
    a, b, c, d = spec.params
    if not d > 0:
        raise DomainError(f"d > 0 required, got d={format_real(d)}")
    if not _ge(a, d, tol):
        raise DomainError(f"a >= d required, got a={format_real(a)}, d={format_real(d)}")
    if not _ge(b * c, d * d, tol):
        raise DomainError("bc >= d^2 required")

    slack = tol * _scale(a, b, c, d)
    if a + b < 2 * d - slack:
        xi = RhoSpec(1, 0, 1, -1)
    elif a + c < 2 * d - slack:
        xi = RhoSpec(1, 1, 0, -1)
    else:
        return None

    if not _witness_positive(xi, tol):
        raise PropertyViolationError(f"witness {xi} is not positive")
    xi_map = build_map(xi)
    composite = choi_matrix(compose(xi_map, build_map(spec)))
    lam = float(composite.eigenvalues()[0])
    if not lam < 0.0:
        logger.warning(f"Witness {xi} did not separate {spec}: min eigenvalue {lam}")
        return None
    logger.debug(f"Witness {xi} certifies {spec}: composed Choi min eigenvalue {lam:.6g}")
    return xi_map


# -------------------------------------------------------------------------
# Classification
# -------------------------------------------------------------------------

def _psd_pair(choi: ChoiMatrix, tol: float) -> Tuple[bool, bool]:
    return choi.is_psd(tol), is_psd(choi.partial_transpose(), tol)


def _normalized_schmidt(spec, tol: float = PSD_TOL) -> Optional[int]:
    total = 3.0 * (spec.a + spec.b + spec.c)
    if not total > 0:
        return None
    if spec.d == 0:
        # diagonal Choi matrix with nonnegative entries
        return 1
    try:
        return schmidt_number_structured(spec.scaled(1.0 / total), tol=tol)
    except DomainError:
        return None


def _circulant_separability(spec, ppt: bool, tol: float) -> Tuple[Separability, Optional[str]]:
    a, b, c, d = spec.params
    if d == 0:
        return Separability(SeparabilityVerdict.SEPARABLE, "d = 0: diagonal Choi matrix"), None
    if not ppt:
        return Separability(SeparabilityVerdict.ENTANGLED, "not PPT"), None
    if d > 0:
        xi = pptes_witness(RhoSpec(a, b, c, d), tol)
        if xi is not None:
            return Separability(SeparabilityVerdict.ENTANGLED, f"witness {xi.label}"), xi.label
    return Separability(SeparabilityVerdict.UNDECIDABLE, "PPT in 3x3"), None


def _circulant_report(spec, cp_a: bool, cocp_a: bool, tol: float) -> ClassificationReport:
    spec.require_nonnegative()
    a, b, c, d = spec.params
    fmap = build_map(spec)
    choi = choi_matrix(fmap, str(spec))
    cp_n, cocp_n = _psd_pair(choi, tol)

    positive = decomposable = None
    if d == -1.0:
        refine = rho_abc_positivity_margin(a, b, c) < REFINE_MARGIN * _scale(a, b, c)
        positive = Verdict(rho_abc_positive(a, b, c, tol), _numerically_positive(fmap, tol, refine))
        decomposable = Verdict(
            rho_abc_decomposable(a, b, c, tol),
            rho_abc_decomposition(a, b, c, tol) is not None,
        )

    ppt_a = cp_a and cocp_a
    separable, witness = _circulant_separability(spec, ppt_a, tol)
    report = ClassificationReport(
        family=spec.family.value,
        params=spec.params,
        completely_positive=Verdict(cp_a, cp_n),
        completely_copositive=Verdict(cocp_a, cocp_n),
        ppt=Verdict(ppt_a, cp_n and cocp_n),
        positive=positive,
        decomposable=decomposable,
        separable=separable,
        choi_rank=choi.rank(),
        choi_rank_analytic=choi_rank_analytic(spec),
        schmidt_number=_normalized_schmidt(spec, tol),
        witness=witness,
    )
    _log_disagreement(report)
    return report


def classify_rho(spec: RhoSpec, tol: Optional[float] = None) -> ClassificationReport:
    """
    Classify rho[a,b,c,d] (a, b, c >= 0).

    CP iff a >= d and a >= -2d; co-CP iff bc >= d^2. Positivity and
    decomposability are reported only for d = -1.
    """
    tol = PSD_TOL if tol is None else tol
    a, b, c, d = spec.params
    return _circulant_report(spec, _ge(a, d, tol) and _ge(a, -2 * d, tol), _ge(b * c, d * d, tol), tol)


def classify_tau(spec: TauSpec, tol: Optional[float] = None) -> ClassificationReport:
    """
    Classify tau[a,b,c,d] = transpose o rho[a,b,c,d].

    The CP and co-CP criteria of rho swap; positivity is the same as rho's.
    """
    tol = PSD_TOL if tol is None else tol
    a, b, c, d = spec.params
    return _circulant_report(spec, _ge(b * c, d * d, tol), _ge(a, d, tol) and _ge(a, -2 * d, tol), tol)


def classify_theta(spec: ThetaSpec, tol: Optional[float] = None) -> ClassificationReport:
    """
    Classify theta[a,c1,c2,c3].

    Positive iff a >= 1 and c1 c2 c3 >= (2-a)^3; CP iff 2-positive iff
    a >= 2; never co-CP. The atomic flag is the parameter criterion
    1 <= a <= 2 with c1 c2 c3 >= (2-a)^3.
    """
    tol = PSD_TOL if tol is None else tol
    a, c1, c2, c3 = spec.params
    fmap = build_map(spec)
    choi = choi_matrix(fmap, str(spec))
    cp_n, cocp_n = _psd_pair(choi, tol)

    prod_ok = _ge(c1 * c2 * c3, (2.0 - a) ** 3, tol)
    refine = theta_positivity_margin(a, c1, c2, c3) < REFINE_MARGIN * _scale(*spec.params)
    positive = Verdict(_ge(a, 1.0, tol) and prod_ok, _numerically_positive(fmap, tol, refine))
    cp_a = _ge(a, 2.0, tol)
    atomic = _ge(a, 1.0, tol) and _ge(2.0, a, tol) and prod_ok
    notes = []
    if atomic and cp_a:
        notes.append("a = 2: the map is CP; atomic flag follows the parameter criterion")

    schmidt = None
    if cp_a:
        schmidt = schmidt_number_structured(spec, tol=tol)

    report = ClassificationReport(
        family=spec.family.value,
        params=spec.params,
        completely_positive=Verdict(cp_a, cp_n),
        completely_copositive=Verdict(False, cocp_n),
        ppt=Verdict(False, cp_n and cocp_n),
        positive=positive,
        atomic=Verdict(atomic),
        separable=Separability(SeparabilityVerdict.ENTANGLED, "not PPT"),
        choi_rank=choi.rank(),
        choi_rank_analytic=choi_rank_analytic(spec),
        schmidt_number=schmidt,
        notes=notes,
    )
    _log_disagreement(report)
    return report


def classify(spec: MapSpec, tol: Optional[float] = None) -> ClassificationReport:
    if isinstance(spec, ThetaSpec):
        return classify_theta(spec, tol)
    if isinstance(spec, TauSpec):
        return classify_tau(spec, tol)
    if isinstance(spec, RhoSpec):
        return classify_rho(spec, tol)
    raise ValidationError(f"unsupported spec type {type(spec).__name__}")


def classify_map(fmap: FoliatedMap, tol: Optional[float] = None,
                 family: str = "map", params: Tuple[float, ...] = ()) -> ClassificationReport:
    """
    Classify an arbitrary foliated map.

    Analytic CP/co-CP verdicts exist when lambda1 is a real 3 x 3 circulant
    and the off-diagonal coefficients are real; otherwise only the
    numerical verdicts are populated. On M_2 a PPT Choi matrix is
    separable.
    """
    tol = PSD_TOL if tol is None else tol
    choi = choi_matrix(fmap)
    cp_n, cocp_n = _psd_pair(choi, tol)

    cp_a = cocp_a = None
    schmidt = None
    if fmap.n == 3 and fmap.is_real():
        try:
            circ = circulant_params_of(fmap.lambda1)
        except ValidationError:
            circ = None
        if circ is not None:
            x, y, z = (float(v.real) for v in circ.as_tuple())
            alpha, beta = float(fmap.alpha.real), float(fmap.beta.real)
            cp_a = circulant_foliated_cp(x, y, z, alpha, beta, tol)
            cocp_a = circulant_foliated_cocp(x, y, z, alpha, beta, tol)
            total = 3.0 * (x + y + z)
            if cp_a and total > 0:
                schmidt = _schmidt_circulant(x / total, y / total, z / total,
                                             alpha / total, beta / total, tol)

    ppt_a = None if cp_a is None else (cp_a and cocp_a)
    ppt = ppt_a if ppt_a is not None else (cp_n and cocp_n)
    if not ppt:
        separable = Separability(SeparabilityVerdict.ENTANGLED, "not PPT")
    elif max_abs(choi.mat - np.diag(np.diag(choi.mat))) == 0.0:
        separable = Separability(SeparabilityVerdict.SEPARABLE, "diagonal Choi matrix")
    elif choi.dims.side <= SMALL_SIDE:
        separable = Separability(
            SeparabilityVerdict.SEPARABLE, f"PPT in {choi.dims.m}x{choi.dims.n}"
        )
    else:
        separable = Separability(SeparabilityVerdict.UNDECIDABLE, "PPT")

    report = ClassificationReport(
        family=family,
        params=params,
        completely_positive=Verdict(cp_a, cp_n),
        completely_copositive=Verdict(cocp_a, cocp_n),
        ppt=Verdict(ppt_a, cp_n and cocp_n),
        separable=separable,
        choi_rank=choi.rank(),
        schmidt_number=schmidt,
    )
    _log_disagreement(report)
    return report


def classify_state(spec, tol: Optional[float] = None) -> ClassificationReport:
    """
    State-level report for the Choi matrix of a normalized rho or tau spec.

    Requires a, b, c >= 0 and a + b + c = 1/3 so that the Choi matrix has
    trace one.
    """
    if not isinstance(spec, (RhoSpec, TauSpec)):
        raise DomainError("classify_state takes rho or tau specs")
    tol = PSD_TOL if tol is None else tol
    spec.require_nonnegative()
    a, b, c, d = spec.params
    _require_normalized(a, b, c)

    report = classify(spec, tol)
    choi = choi_of_spec(spec)
    report.density = abs(choi.trace() - 1.0) <= 1e-12 and choi.is_psd(tol)

    if report.density:
        report.schmidt_number = _normalized_schmidt(spec, tol)

    if d > 0 and d < a < 2 * d and 2 * (b + c) < 2 * d - a:
        cross = "consistent" if report.schmidt_number == 3 else "not confirmed"
        report.notes.append(
            f"Schmidt number > 2 asserted for d < a < 2d, 2(b+c) < 2d-a ({cross} by the block rule)"
        )
    if report.separable and report.separable.verdict is SeparabilityVerdict.ENTANGLED and report.ppt.value:
        report.notes.append("PPT entangled state")
    elif not report.ppt.value:
        report.notes.append("non-PPT state")
    return report


def _log_disagreement(report: ClassificationReport):
    if not report.agree:
        logger.warning(
            f"Analytic/numerical disagreement for {report.family}"
            f"[{', '.join(format_real(p) for p in report.params)}]"
        )
