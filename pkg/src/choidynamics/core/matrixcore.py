# Python Includes
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
from loguru import logger

# choidynamics Includes
from .errors import HermiticityError, SizeError, ValidationError
from .tolerances import HERMITIAN_TOL, PSD_TOL, RANK_TOL, UNITARY_TOL

# Largest number of entries a product matrix may have
MAX_ENTRIES = 1 << 24


def as_cmat(x, name: str = "matrix") -> np.ndarray:
    """
    Convert ``x`` to a finite 2-D complex128 array.

    Raises
    ------
    SizeError
        If ``x`` is not two-dimensional or is empty.
    ValidationError
        If any entry is NaN or infinite.
    """
    m = np.asarray(x, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise SizeError(f"{name} must be a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{name} has non-finite entries")
    return m


def as_square(x, name: str = "matrix") -> np.ndarray:
    m = as_cmat(x, name)
    if m.shape[0] != m.shape[1]:
        raise SizeError(f"{name} must be square, got shape {m.shape}")
    return m


def max_abs(m: np.ndarray) -> float:
    """Entrywise max norm."""
    return float(np.max(np.abs(m))) if m.size else 0.0


def elementary(j: int, k: int, n: int) -> np.ndarray:
    """The matrix unit E_jk of size n (0-based indices)."""
    e = np.zeros((n, n), dtype=np.complex128)
    e[j, k] = 1.0
    return e


@dataclass(frozen=True)
class BipartiteDims:
    """Dimensions (m, n) of C^m (x) C^n; matrices on it have side m*n."""

    m: int
    n: int

    def __post_init__(self):
        if int(self.m) < 1 or int(self.n) < 1:
            raise SizeError(f"bipartite dimensions must be positive, got ({self.m}, {self.n})")

    @property
    def side(self) -> int:
        return self.m * self.n

    def check(self, mat: np.ndarray, name: str = "matrix") -> np.ndarray:
        mat = as_square(mat, name)
        if mat.shape[0] != self.side:
            raise SizeError(
                f"{name} has side {mat.shape[0]}, expected {self.m}*{self.n}={self.side}"
            )
        return mat


def kron(a, b) -> np.ndarray:
    """
    Kronecker product with block (j,k) equal to ``a[j,k] * b``.

    Raises
    ------
    SizeError
        If the product would exceed ``MAX_ENTRIES`` entries.
    """
    a = as_cmat(a, "A")
    b = as_cmat(b, "B")
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows * cols > MAX_ENTRIES:
        raise SizeError(f"Kronecker product of size {rows}x{cols} exceeds {MAX_ENTRIES} entries")
    return np.kron(a, b)


def partial_transpose(mat, dims: BipartiteDims) -> np.ndarray:
    """
    Transpose each n x n block of the m x m block structure.

    The transpose acts on the second tensor factor: block (j,k) of the
    result is the transpose of block (j,k) of ``mat``.
    """
    mat = dims.check(mat)
    m, n = dims.m, dims.n
    return mat.reshape(m, n, m, n).transpose(0, 3, 2, 1).reshape(m * n, m * n)


def hermiticity_defect(mat: np.ndarray) -> float:
    return max_abs(mat - mat.conj().T)


def hermitian_eigenvalues(mat, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """
    Ascending eigenvalues of a Hermitian matrix.

    The Hermiticity check is relative to ``max(1, ||M||_max)``; the matrix is
    symmetrized before the LAPACK call so round-off asymmetry is harmless.

    Raises
    ------
    HermiticityError
        If ``||M - M*||_max`` exceeds the tolerance.
    """
    mat = as_square(mat)
    defect = hermiticity_defect(mat)
    scale = max(1.0, max_abs(mat))
    if defect > tol * scale:
        logger.error(f"Matrix is not Hermitian: defect {defect:.3e} > {tol * scale:.3e}")
        raise HermiticityError(f"matrix is not Hermitian (defect {defect:.3e})")
    herm = 0.5 * (mat + mat.conj().T)
    return np.linalg.eigvalsh(herm)


def min_eigenvalue(mat, tol: float = HERMITIAN_TOL) -> float:
    return float(hermitian_eigenvalues(mat, tol)[0])


def is_psd(mat, tol: Optional[float] = None) -> bool:
    """True iff the smallest eigenvalue is at least ``-tol * max(1, ||M||_max)``."""
    if tol is None:
        tol = PSD_TOL
    mat = as_square(mat)
    lam = hermitian_eigenvalues(mat, max(tol, HERMITIAN_TOL))[0]
    return bool(lam >= -tol * max(1.0, max_abs(mat)))


def numerical_rank(mat, rel_tol: float = RANK_TOL) -> int:
    """Count singular values above ``rel_tol * sigma_max * max(rows, cols)``."""
    mat = as_cmat(mat)
    sv = scipy.linalg.svdvals(mat)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    threshold = rel_tol * sv[0] * max(mat.shape)
    return int(np.count_nonzero(sv > threshold))


def expm(mat, t: float = 1.0) -> np.ndarray:
    """exp(t*M) by scaling and squaring (scipy's Pade implementation)."""
    mat = as_square(mat)
    return scipy.linalg.expm(t * mat)


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    u = as_square(u)
    return max_abs(u @ u.conj().T - np.eye(u.shape[0])) <= tol * max(1, u.shape[0])


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Haar-distributed n x n unitary.

    QR of a complex Ginibre matrix, with the phases of diag(R) moved into Q.
    """
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = scipy.linalg.qr(z)
    d = np.diag(r)
    ph = d / np.abs(d)
    return q * ph


def cmat_to_json(mat) -> dict:
    """Row-major JSON form ``{rows, cols, re, im}``."""
    mat = as_cmat(mat)
    flat = mat.reshape(-1)
    return {
        "rows": int(mat.shape[0]),
        "cols": int(mat.shape[1]),
        "re": [float(x) for x in flat.real],
        "im": [float(x) for x in flat.imag],
    }


def cmat_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * len(obj["re"])), dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"malformed matrix JSON: {e}") from e
    if rows < 1 or cols < 1 or re.size != rows * cols or im.size != rows * cols:
        raise ValidationError(
            f"matrix JSON declares {rows}x{cols} but carries {re.size}/{im.size} entries"
        )
    return as_cmat((re + 1j * im).reshape(rows, cols))
