"""
Circulant algebra and foliated maps on n x n matrices.

A foliated map splits M_n into its diagonal part D_n and its off-diagonal
part F_n and acts on each separately:

- on D_n through ``lambda1``, the matrix whose COLUMNS are the diagonal
  images of E_11, ..., E_nn;
- on F_n as ``X_off -> alpha * X_off + beta * X_off^t``.

For n = 3 the families rho[a,b,c,d], tau[a,b,c,d] and theta[a,c1,c2,c3]
are all of this form, and lambda1 of rho/tau is the circulant D(a,b,c).
"""

# Python Includes
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Tuple, Union

import numpy as np
from loguru import logger

# choidynamics Includes
from .errors import DomainError, SizeError, ValidationError
from .matrixcore import as_square, elementary, max_abs

OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)


@dataclass(frozen=True)
class CirculantParams:
    """The triple (a, b, c) of D(a,b,c) with rows (a,b,c), (c,a,b), (b,c,a)."""

    a: complex
    b: complex
    c: complex

    def as_tuple(self) -> Tuple[complex, complex, complex]:
        return (self.a, self.b, self.c)

    def det(self) -> complex:
        a, b, c = self.a, self.b, self.c
        return a ** 3 + b ** 3 + c ** 3 - 3 * a * b * c

    def adjugate(self) -> "CirculantParams":
        """Parameters whose product with ``self`` is det * I."""
        a, b, c = self.a, self.b, self.c
        return CirculantParams(a * a - b * c, c * c - a * b, b * b - a * c)

    def is_real(self) -> bool:
        return all(complex(x).imag == 0 for x in self.as_tuple())


def circulant_matrix(p: CirculantParams) -> np.ndarray:
    a, b, c = p.as_tuple()
    return np.array([[a, b, c], [c, a, b], [b, c, a]], dtype=np.complex128)


def circulant_params_of(mat, tol: float = 1e-10) -> CirculantParams:
    """Read (a, b, c) off a 3 x 3 circulant matrix."""
    mat = as_square(mat)
    if mat.shape != (3, 3):
        raise SizeError(f"circulant matrices are 3x3, got {mat.shape}")
    p = CirculantParams(complex(mat[0, 0]), complex(mat[0, 1]), complex(mat[0, 2]))
    if max_abs(mat - circulant_matrix(p)) > tol * max(1.0, max_abs(mat)):
        raise ValidationError("matrix is not circulant")
    return p


def circulant_mul(p: CirculantParams, q: CirculantParams) -> CirculantParams:
    """Parameters of D(p) D(q)."""
    a1, b1, c1 = p.as_tuple()
    a, b, c = q.as_tuple()
    return CirculantParams(
        a1 * a + b1 * c + c1 * b,
        c1 * c + a1 * b + b1 * a,
        b1 * b + c1 * a + a1 * c,
    )


def circulant_eigentriple(p: CirculantParams) -> Tuple[complex, complex, complex]:
    """Eigenvalues (a+b+c, a+b w+c w^2, a+b w^2+c w) with w = -1/2 + i sqrt(3)/2."""
    a, b, c = p.as_tuple()
    w, w2 = OMEGA, OMEGA * OMEGA
    return (a + b + c, a + b * w + c * w2, a + b * w2 + c * w)


def dft3_unitary() -> np.ndarray:
    """W with D(a,b,c) = W diag(eigentriple) W*."""
    w, w2 = OMEGA, OMEGA * OMEGA
    return np.array([[1, 1, 1], [1, w, w2], [1, w2, w]], dtype=np.complex128) / math.sqrt(3.0)


# -------------------------------------------------------------------------
# Parameter specs
# -------------------------------------------------------------------------

class Family(str, enum.Enum):
    RHO = "rho"
    TAU = "tau"
    THETA = "theta"


def parse_real(text) -> float:
    """Parse a real from decimal or rational (``p/q``) notation."""
    if isinstance(text, (int, float)):
        value = float(text)
    else:
        s = str(text).strip()
        try:
            value = float(Fraction(s)) if "/" in s else float(s)
        except (ValueError, ZeroDivisionError) as e:
            raise ValidationError(f"not a real number: {text!r}") from e
    if not math.isfinite(value):
        raise ValidationError(f"not a finite real number: {text!r}")
    return value


def format_real(x: float) -> str:
    """15 significant digits, no locale."""
    return format(float(x), ".15g")


@dataclass(frozen=True)
class _CirculantSpec:
    """Shared fields of the rho and tau families."""

    a: float
    b: float
    c: float
    d: float
    family = None

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, parse_real(getattr(self, name)))

    @property
    def params(self) -> Tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    @property
    def circulant(self) -> CirculantParams:
        return CirculantParams(self.a, self.b, self.c)

    def require_nonnegative(self):
        for name in ("a", "b", "c"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} >= 0 required, got {name}={getattr(self, name)}")

    def scaled(self, k: float):
        return type(self)(*(k * x for x in self.params))

    def to_json(self) -> dict:
        out = {"family": self.family.value}
        out.update({k: repr(v) for k, v in zip(("a", "b", "c", "d"), self.params)})
        return out

    def __str__(self):
        return f"{self.family.value}[{', '.join(format_real(x) for x in self.params)}]"


@dataclass(frozen=True)
class RhoSpec(_CirculantSpec):
    """rho[a,b,c,d] = D(a,b,c) (+) d * Id on F_3."""

    family = Family.RHO


@dataclass(frozen=True)
class TauSpec(_CirculantSpec):
    """tau[a,b,c,d] = D(a,b,c) (+) d * transpose on F_3."""

    family = Family.TAU


@dataclass(frozen=True)
class ThetaSpec:
    """theta[a,c1,c2,c3] = T(a,c1,c2,c3) (+) (-Id on F_3), all parameters nonnegative."""

    a: float
    c1: float
    c2: float
    c3: float
    family = Family.THETA

    def __post_init__(self):
        for name in ("a", "c1", "c2", "c3"):
            value = parse_real(getattr(self, name))
            if value < 0:
                raise DomainError(f"{name} >= 0 required for theta, got {name}={value}")
            object.__setattr__(self, name, value)

    @property
    def params(self) -> Tuple[float, float, float, float]:
        return (self.a, self.c1, self.c2, self.c3)

    def lambda1(self) -> np.ndarray:
        a, c1, c2, c3 = self.params
        return np.array([[a, 0, c1], [c2, a, 0], [0, c3, a]], dtype=np.complex128)

    def to_json(self) -> dict:
        out = {"family": self.family.value}
        out.update({k: repr(v) for k, v in zip(("a", "c1", "c2", "c3"), self.params)})
        return out

    def __str__(self):
        return f"theta[{', '.join(format_real(x) for x in self.params)}]"


MapSpec = Union[RhoSpec, TauSpec, ThetaSpec]

_SPEC_TYPES = {Family.RHO: RhoSpec, Family.TAU: TauSpec, Family.THETA: ThetaSpec}
_SPEC_KEYS = {
    Family.RHO: ("a", "b", "c", "d"),
    Family.TAU: ("a", "b", "c", "d"),
    Family.THETA: ("a", "c1", "c2", "c3"),
}


def make_spec(family, *params) -> MapSpec:
    try:
        fam = Family(str(getattr(family, "value", family)).lower())
    except ValueError as e:
        raise ValidationError(f"unknown family {family!r}") from e
    if len(params) != 4:
        raise ValidationError(f"{fam.value} takes 4 parameters, got {len(params)}")
    return _SPEC_TYPES[fam](*(parse_real(p) for p in params))


def spec_from_json(obj: dict) -> MapSpec:
    try:
        fam = Family(obj["family"])
        values = [obj[k] for k in _SPEC_KEYS[fam]]
    except (KeyError, ValueError, TypeError) as e:
        raise ValidationError(f"malformed spec JSON: {e}") from e
    return make_spec(fam, *values)


# -------------------------------------------------------------------------
# Foliated maps
# -------------------------------------------------------------------------

class OffdiagKind(str, enum.Enum):
    SCALE = "scale"
    TRANSPOSE_SCALE = "transpose_scale"
    AFFINE = "affine"


@dataclass(frozen=True, eq=False)
class FoliatedMap:
    """
    Linear map Lambda_1 (+) Lambda_2 on M_n.

    Parameters
    ----------
    lambda1 : ndarray
        n x n matrix; column j is the diagonal of Lambda(E_jj).
    alpha, beta : complex
        Off-diagonal action X_off -> alpha * X_off + beta * X_off^t.
    label : str
        Human-readable origin, e.g. ``rho[1, 0.5, 2, 1]``.
    """

    lambda1: np.ndarray
    alpha: complex = 1.0
    beta: complex = 0.0
    label: str = field(default="")

    def __post_init__(self):
        lam = as_square(self.lambda1, "lambda1").copy()
        if lam.shape[0] < 2:
            raise SizeError("foliated maps need n >= 2")
        lam.setflags(write=False)
        object.__setattr__(self, "lambda1", lam)
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))

    @classmethod
    def identity(cls, n: int = 3) -> "FoliatedMap":
        return cls(np.eye(n), 1.0, 0.0, label="id")

    @classmethod
    def scale(cls, lambda1, d, label: str = "") -> "FoliatedMap":
        return cls(lambda1, d, 0.0, label)

    @classmethod
    def transpose_scale(cls, lambda1, d, label: str = "") -> "FoliatedMap":
        return cls(lambda1, 0.0, d, label)

    @property
    def n(self) -> int:
        return self.lambda1.shape[0]

    @property
    def offdiag_kind(self) -> OffdiagKind:
        if self.beta == 0:
            return OffdiagKind.SCALE
        if self.alpha == 0:
            return OffdiagKind.TRANSPOSE_SCALE
        return OffdiagKind.AFFINE

    @property
    def offdiag_coeff(self) -> complex:
        """The single coefficient d of a pure kind; undefined for AFFINE."""
        kind = self.offdiag_kind
        if kind is OffdiagKind.AFFINE:
            raise ValidationError("affine off-diagonal action has two coefficients")
        return self.alpha if kind is OffdiagKind.SCALE else self.beta

    def apply(self, x) -> np.ndarray:
        x = as_square(x, "X")
        if x.shape[0] != self.n:
            raise SizeError(f"map acts on {self.n}x{self.n} matrices, got {x.shape}")
        diag = np.diag(x)
        off = x - np.diag(diag)
        out = self.alpha * off + self.beta * off.T
        out[np.diag_indices(self.n)] = self.lambda1 @ diag
        return out

    def superoperator(self) -> np.ndarray:
        """n^2 x n^2 matrix S with vec(Lambda(X)) = S vec(X), row-major vec."""
        n = self.n
        s = np.zeros((n * n, n * n), dtype=np.complex128)
        for j in range(n):
            for k in range(n):
                s[:, j * n + k] = self.apply(elementary(j, k, n)).reshape(-1)
        return s

    def is_real(self) -> bool:
        return bool(
            np.all(self.lambda1.imag == 0) and self.alpha.imag == 0 and self.beta.imag == 0
        )

    def is_star_map(self) -> bool:
        """Lambda(X*) = Lambda(X)* for all X."""
        return self.is_real()

    def is_unital(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.lambda1.sum(axis=1) - 1) <= tol))

    def is_trace_preserving(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.lambda1.sum(axis=0) - 1) <= tol))

    def __str__(self):
        return self.label or f"FoliatedMap(n={self.n}, kind={self.offdiag_kind.value})"


def build_map(spec: MapSpec) -> FoliatedMap:
    """Instantiate the foliated map of a rho, tau or theta spec."""
    if isinstance(spec, TauSpec):
        m = FoliatedMap.transpose_scale(circulant_matrix(spec.circulant), spec.d, str(spec))
    elif isinstance(spec, RhoSpec):
        m = FoliatedMap.scale(circulant_matrix(spec.circulant), spec.d, str(spec))
    elif isinstance(spec, ThetaSpec):
        m = FoliatedMap.scale(spec.lambda1(), -1.0, str(spec))
    else:
        raise ValidationError(f"unsupported spec type {type(spec).__name__}")
    logger.trace(f"Built {m.offdiag_kind.value} map for {spec}")
    return m


def horodecki_map(p, a, b) -> FoliatedMap:
    """
    Foliated map on M_2 built on the two-spin Horodecki states.

    lambda1 = [[p a^2, (1-p) b^2], [(1-p) a^2, p b^2]] and
    X_off -> p ab X_off + (1-p) ab X_off^t, for 0 <= p <= 1 and a, b > 0.
    Separable exactly when p = 1/2.
    """
    p, a, b = parse_real(p), parse_real(a), parse_real(b)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"0 <= p <= 1 required, got p={format_real(p)}")
    if not (a > 0 and b > 0):
        raise DomainError(f"a > 0 and b > 0 required, got a={format_real(a)}, b={format_real(b)}")
    lam1 = [[p * a * a, (1.0 - p) * b * b], [(1.0 - p) * a * a, p * b * b]]
    label = f"horodecki[{', '.join(format_real(x) for x in (p, a, b))}]"
    return FoliatedMap(lam1, p * a * b, (1.0 - p) * a * b, label)


PAULI = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


def pauli_form(fmap: FoliatedMap) -> np.ndarray:
    """4 x 4 matrix M of a map on M_2 with Lambda(s_j) = sum_i M[i, j] s_i."""
    if fmap.n != 2:
        raise SizeError(f"the Pauli form needs a map on M_2, got M_{fmap.n}")
    return np.array(
        [[np.trace(si @ fmap.apply(sj)) / 2.0 for sj in PAULI] for si in PAULI]
    )


def apply(fmap: FoliatedMap, x) -> np.ndarray:
    return fmap.apply(x)


def compose(f: FoliatedMap, g: FoliatedMap) -> FoliatedMap:
    """The foliated map f o g."""
    if f.n != g.n:
        raise SizeError(f"cannot compose maps on M_{f.n} and M_{g.n}")
    return FoliatedMap(
        f.lambda1 @ g.lambda1,
        f.alpha * g.alpha + f.beta * g.beta,
        f.alpha * g.beta + f.beta * g.alpha,
        label=f"({f}) o ({g})" if (f.label or g.label) else "",
    )
