"""
Matrices unitarily equivalent to their transposes, and PPT matrices built
from them.

A matrix T is UET when T = U T^t U* for some unitary U. Every UET matrix is,
up to unitary equivalence, a T with TQ = QT^t where Q is block diagonal with

- a complex symmetric unitary block ``q_plus``,
- a skew-symmetric unitary block ``q_minus``,
- off-pair blocks [[0, lam X^t], [X, 0]] with X unitary and lam != +-1.

T then splits into matching sectors: T+ = Q+ T+^t Q+*, T- = Q- T-^t Q-*, and
diag(A, X A^t X*) with A arbitrary on each off-pair.

A tuple (Y_1, ..., Y_s) is CUET when a single unitary U works for all
members. If the blocks of a positive block matrix [A_jk] form a CUET tuple
then [A_jk^t] = U~* [A_jk] U~ with U~ = diag(U, ..., U), hence the block
matrix is PPT. ``construct_ppt`` builds such matrices.
"""

# Python Includes
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from loguru import logger

# choidynamics Includes
from .errors import ConstructionError, SizeError, ValidationError
from .foliated import format_real
from .matrixcore import (
    BipartiteDims,
    as_cmat,
    as_square,
    cmat_from_json,
    cmat_to_json,
    hermitian_eigenvalues,
    is_unitary,
    kron,
    max_abs,
    partial_transpose,
    random_unitary,
)
from .tolerances import CUET_TOL, MARGIN_REL, PSD_SHIFT_EPS, UNITARY_TOL

SEARCH_SAMPLES = 100_000
SEARCH_BATCH = 10_000
SEARCH_THRESHOLD = 1e-8


def reversal_permutation(n: int) -> np.ndarray:
    """The permutation matrix reversing the standard basis; symmetric and unitary."""
    if n < 1:
        raise SizeError(f"n >= 1 required, got {n}")
    return np.eye(n, dtype=np.complex128)[::-1].copy()


def random_symmetric_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """U U^t for a Haar unitary U."""
    u = random_unitary(n, rng)
    return u @ u.T


def random_skew_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """U J U^t with J the standard symplectic form; n must be even."""
    if n < 2 or n % 2:
        raise SizeError(f"skew-symmetric unitaries need even n >= 2, got {n}")
    k = n // 2
    j = np.block([[np.zeros((k, k)), np.eye(k)], [-np.eye(k), np.zeros((k, k))]])
    u = random_unitary(n, rng)
    return u @ j @ u.T


def _frozen(mat: np.ndarray) -> np.ndarray:
    out = np.array(mat, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class QStructure:
    """
    The block-diagonal unitary Q of a UET canonical form.

    Parameters
    ----------
    q_plus : ndarray or None
        Complex symmetric unitary block.
    q_minus : ndarray or None
        Skew-symmetric unitary block.
    off_pairs : sequence of (complex, ndarray)
        ``(lam, X)`` pairs; Q contains [[0, lam X^t], [X, 0]] for each.
        Unitarity of Q forces ``|lam| = 1``, and ``lam`` may not be +-1.

    Raises
    ------
    ValidationError
        If a block breaks its symmetry or unitarity condition.
    """

    q_plus: Optional[np.ndarray] = None
    q_minus: Optional[np.ndarray] = None
    off_pairs: Tuple[Tuple[complex, np.ndarray], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.q_plus is not None:
            qp = as_square(self.q_plus, "q_plus")
            if max_abs(qp - qp.T) > UNITARY_TOL:
                raise ValidationError("q_plus must be complex symmetric")
            if not is_unitary(qp):
                raise ValidationError("q_plus must be unitary")
            object.__setattr__(self, "q_plus", _frozen(qp))
        if self.q_minus is not None:
            qm = as_square(self.q_minus, "q_minus")
            if max_abs(qm + qm.T) > UNITARY_TOL:
                raise ValidationError("q_minus must be skew-symmetric")
            if not is_unitary(qm):
                raise ValidationError("q_minus must be unitary")
            object.__setattr__(self, "q_minus", _frozen(qm))

        pairs = []
        for i, pair in enumerate(self.off_pairs):
            try:
                lam, x = pair
            except (TypeError, ValueError) as e:
                raise ValidationError(f"off-pair {i} must be (lambda, X)") from e
            lam = complex(lam)
            x = as_square(x, f"X_{i}")
            if abs(lam - 1) <= UNITARY_TOL or abs(lam + 1) <= UNITARY_TOL:
                raise ValidationError(f"off-pair {i}: lambda = +-1 is not allowed")
            if abs(abs(lam) - 1) > UNITARY_TOL:
                logger.error(f"Off-pair {i} has |lambda| = {abs(lam):.6g}; Q cannot be unitary")
                raise ValidationError(
                    f"off-pair {i}: |lambda| = 1 required for a unitary Q, got |lambda|={abs(lam):.6g}"
                )
            if not is_unitary(x):
                raise ValidationError(f"off-pair {i}: X must be unitary")
            pairs.append((lam, _frozen(x)))
        object.__setattr__(self, "off_pairs", tuple(pairs))

        if self.side == 0:
            raise ValidationError("Q structure has no blocks")

    @classmethod
    def reversal(cls, n: int) -> "QStructure":
        return cls(q_plus=reversal_permutation(n))

    @classmethod
    def identity(cls, n: int) -> "QStructure":
        return cls(q_plus=np.eye(n))

    @property
    def sector_sizes(self) -> List[Tuple[str, int]]:
        """(kind, side) of each diagonal sector in assembly order."""
        out = []
        if self.q_plus is not None:
            out.append(("plus", self.q_plus.shape[0]))
        if self.q_minus is not None:
            out.append(("minus", self.q_minus.shape[0]))
        out += [("pair", 2 * x.shape[0]) for _, x in self.off_pairs]
        return out

    @property
    def side(self) -> int:
        return sum(size for _, size in self.sector_sizes)

    def to_json(self) -> dict:
        return {
            "q_plus": None if self.q_plus is None else cmat_to_json(self.q_plus),
            "q_minus": None if self.q_minus is None else cmat_to_json(self.q_minus),
            "off_pairs": [
                {"lambda": [lam.real, lam.imag], "x": cmat_to_json(x)} for lam, x in self.off_pairs
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QStructure":
        if not isinstance(obj, dict):
            raise ValidationError("Q structure JSON must be an object")
        if "reversal" in obj:
            return cls.reversal(int(obj["reversal"]))
        try:
            qp = obj.get("q_plus")
            qm = obj.get("q_minus")
            pairs = [
                (complex(p["lambda"][0], p["lambda"][1]), cmat_from_json(p["x"]))
                for p in obj.get("off_pairs", [])
            ]
        except (KeyError, IndexError, TypeError, ValueError) as e:
            raise ValidationError(f"malformed Q structure JSON: {e}") from e
        return cls(
            q_plus=None if qp is None else cmat_from_json(qp),
            q_minus=None if qm is None else cmat_from_json(qm),
            off_pairs=tuple(pairs),
        )


def assemble_Q(spec: QStructure) -> np.ndarray:  # pylint: disable=invalid-name
    """
    Block-diagonal Q of side dim(q_plus) + dim(q_minus) + 2 sum dim(X_i).

    Raises
    ------
    ValidationError
        If the assembled matrix is not unitary.
    """
    blocks = []
    if spec.q_plus is not None:
        blocks.append(spec.q_plus)
    if spec.q_minus is not None:
        blocks.append(spec.q_minus)
    for lam, x in spec.off_pairs:
        k = x.shape[0]
        pair = np.zeros((2 * k, 2 * k), dtype=np.complex128)
        pair[:k, k:] = lam * x.T
        pair[k:, :k] = x
        blocks.append(pair)
    q = scipy.linalg.block_diag(*blocks).astype(np.complex128)
    if not is_unitary(q):
        logger.error("Assembled Q is not unitary")
        raise ValidationError("assembled Q is not unitary")
    return q


def _check_pair(t: np.ndarray, q: np.ndarray):
    if t.shape != q.shape:
        raise SizeError(f"T is {t.shape[0]}x{t.shape[0]} but Q is {q.shape[0]}x{q.shape[0]}")


def is_uet_pair(t, q, tol: float = CUET_TOL) -> bool:
    """True iff ||TQ - QT^t||_max <= tol * max(1, ||T|| ||Q||)."""
    t = as_square(t, "T")
    q = as_square(q, "Q")
    _check_pair(t, q)
    residual = max_abs(t @ q - q @ t.T)
    return residual <= tol * max(1.0, max_abs(t) * max_abs(q))


def _involution_sign(q: np.ndarray) -> int:
    """+1 or -1 according to Q conj(Q) = +-I."""
    eye = np.eye(q.shape[0])
    prod = q @ q.conj()
    if max_abs(prod - eye) <= 1e-10:
        return 1
    if max_abs(prod + eye) <= 1e-10:
        return -1
    logger.error("Q conj(Q) is neither I nor -I")
    raise ConstructionError("Q block is neither symmetric nor skew-symmetric unitary")


def project_T_sector(m, q_block, tol: float = CUET_TOL) -> np.ndarray:  # pylint: disable=invalid-name
    """
    T = (M + Q M^t Q*) / 2, which satisfies T = Q T^t Q*.

    Raises
    ------
    ConstructionError
        If Q conj(Q) != +-I or the result fails T = Q T^t Q*.
    """
    m = as_square(m, "M")
    q = as_square(q_block, "Q")
    _check_pair(m, q)
    _involution_sign(q)
    t = 0.5 * (m + q @ m.T @ q.conj().T)
    residual = max_abs(t - q @ t.T @ q.conj().T)
    if residual > tol * max(1.0, max_abs(t)):
        logger.error(f"Projected sector misses T = Q T^t Q* by {residual:.3e}")
        raise ConstructionError(f"projected sector is not UET with its Q (residual {residual:.3e})")
    return t


# -------------------------------------------------------------------------
# CUET tuples
# -------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CuetTuple:
    """Matrices Y_j with a candidate common witness U (Y_j = U Y_j^t U*)."""

    matrices: Tuple[np.ndarray, ...]
    witness: np.ndarray

    def __post_init__(self):
        u = as_square(self.witness, "U")
        mats = tuple(as_square(y, f"Y_{j}") for j, y in enumerate(self.matrices))
        for j, y in enumerate(mats):
            if y.shape != u.shape:
                raise SizeError(f"Y_{j} has shape {y.shape}, witness has {u.shape}")
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "witness", u)

    def __len__(self):
        return len(self.matrices)

    def residual(self) -> float:
        """max_j ||Y_j - U Y_j^t U*||_max relative to max(1, ||Y_j||_max)."""
        u = self.witness
        worst = 0.0
        for y in self.matrices:
            dev = max_abs(y - u @ y.T @ u.conj().T) / max(1.0, max_abs(y))
            worst = max(worst, dev)
        return worst

    def to_json(self) -> dict:
        return {
            "witness": cmat_to_json(self.witness),
            "matrices": [cmat_to_json(y) for y in self.matrices],
        }


def cuet_check(tup: CuetTuple, tol: float = CUET_TOL) -> bool:
    """True iff Y_j = U Y_j^t U* for all j within ``tol`` and U is unitary."""
    return is_unitary(tup.witness) and tup.residual() <= tol


def _gaussian(rng: np.random.Generator, k: int) -> np.ndarray:
    return rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))


def _cuet_member(qs: QStructure, rng: np.random.Generator) -> np.ndarray:
    """One random T with TQ = QT^t, built sector by sector."""
    blocks = []
    if qs.q_plus is not None:
        blocks.append(project_T_sector(_gaussian(rng, qs.q_plus.shape[0]), qs.q_plus))
    if qs.q_minus is not None:
        blocks.append(project_T_sector(_gaussian(rng, qs.q_minus.shape[0]), qs.q_minus))
    for _, x in qs.off_pairs:
        a = _gaussian(rng, x.shape[0])
        blocks.append(scipy.linalg.block_diag(a, x @ a.T @ x.conj().T))
    return scipy.linalg.block_diag(*blocks).astype(np.complex128)


def _make_positive(y: np.ndarray) -> np.ndarray:
    """Hermitian part shifted by (|lambda_min| + eps) I; both steps keep the CUET relation."""
    h = 0.5 * (y + y.conj().T)
    lam = hermitian_eigenvalues(h)[0]
    return h + (abs(lam) + PSD_SHIFT_EPS) * np.eye(h.shape[0])


def generate_cuet_tuple(qs: QStructure, count: int, seed: int, psd_prefix: int = 0,
                        zero: bool = False, tol: float = CUET_TOL) -> CuetTuple:
    """
    ``count`` random matrices sharing the witness Q = assemble_Q(qs).

    The first ``psd_prefix`` members are positive semidefinite. With
    ``zero`` every member is the zero matrix.

    Raises
    ------
    ValidationError
        If ``psd_prefix`` is out of range.
    ConstructionError
        If a sector fails its projection or the tuple fails cuet_check.
    """
    if count < 0:
        raise ValidationError(f"count >= 0 required, got {count}")
    if not 0 <= psd_prefix <= count:
        raise ValidationError(f"0 <= psd_prefix <= count required, got {psd_prefix} > {count}")
    q = assemble_Q(qs)
    k = q.shape[0]
    if zero:
        mats = [np.zeros((k, k), dtype=np.complex128) for _ in range(count)]
    else:
        rng = np.random.default_rng(seed)
        mats = [_cuet_member(qs, rng) for _ in range(count)]
        mats[:psd_prefix] = [_make_positive(y) for y in mats[:psd_prefix]]
    tup = CuetTuple(tuple(mats), q)
    if not cuet_check(tup, tol):
        logger.error(f"Generated tuple misses the CUET relation by {tup.residual():.3e}")
        raise ConstructionError(f"generated tuple is not CUET (residual {tup.residual():.3e})")
    logger.debug(f"Generated CUET {count}-tuple of side {k} (seed={seed}, psd_prefix={psd_prefix})")
    return tup


# -------------------------------------------------------------------------
# Block matrices
# -------------------------------------------------------------------------

def assemble_blocks(blocks: Sequence[Sequence[np.ndarray]]) -> np.ndarray:
    """Square block matrix [A_jk] from an n x n grid of equal square blocks."""
    grid = [[as_square(b, f"A_{j}{k}") for k, b in enumerate(row)] for j, row in enumerate(blocks)]
    n = len(grid)
    if n == 0 or any(len(row) != n for row in grid):
        raise SizeError("block grid must be square and non-empty")
    shape = grid[0][0].shape
    if any(b.shape != shape for row in grid for b in row):
        raise SizeError("all blocks must have the same shape")
    return np.block(grid).astype(np.complex128)


def split_blocks(mat, n: int) -> List[List[np.ndarray]]:
    """Inverse of assemble_blocks for an n x n grid."""
    mat = as_square(mat)
    if n < 1 or mat.shape[0] % n:
        raise SizeError(f"side {mat.shape[0]} is not a multiple of {n}")
    k = mat.shape[0] // n
    return [[mat[j * k:(j + 1) * k, l * k:(l + 1) * k] for l in range(n)] for j in range(n)]


def block_conjugation_transpose(blocks, u, tol: float = CUET_TOL) -> np.ndarray:
    """
    U~* [A_jk] U~ with U~ = I_n (x) U.

    The blocks must be CUET with witness U; the result then equals the
    blockwise transpose [A_jk^t], which is asserted.

    Raises
    ------
    ValidationError
        If U is not unitary.
    ConstructionError
        If the result differs from the blockwise transpose.
    """
    a = assemble_blocks(blocks)
    u = as_square(u, "U")
    if not is_unitary(u, 1e-10):
        raise ValidationError("witness U must be unitary")
    n = len(blocks)
    k = u.shape[0]
    if a.shape[0] != n * k:
        raise SizeError(f"blocks have side {a.shape[0] // n}, witness has side {k}")
    u_tilde = kron(np.eye(n), u)
    conj = u_tilde.conj().T @ a @ u_tilde
    transposed = partial_transpose(a, BipartiteDims(n, k))
    residual = max_abs(conj - transposed)
    if residual > tol * max(1.0, max_abs(a)):
        logger.error(f"U~* A U~ differs from the blockwise transpose by {residual:.3e}")
        raise ConstructionError(
            f"blocks are not CUET with this witness (residual {residual:.3e})"
        )
    return conj


@dataclass(frozen=True, eq=False)
class PPTConstruction:
    """A PPT block matrix A = B + a I and its verification transcript."""

    n: int
    matrix: np.ndarray
    hermitian_part: np.ndarray
    a0: float
    shift: float
    margin: float
    witness: np.ndarray
    eigenvalues: np.ndarray
    pt_eigenvalues: np.ndarray
    seed: Optional[int] = None

    @property
    def dims(self) -> BipartiteDims:
        return BipartiteDims(self.n, self.n)

    def density(self) -> np.ndarray:
        return self.matrix / np.trace(self.matrix).real

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "a0": format_real(self.a0),
            "a": format_real(self.shift),
            "margin": format_real(self.margin),
            "matrix": cmat_to_json(self.matrix),
            "witness": cmat_to_json(self.witness),
            "verification": {
                "eigenvalues": [format_real(x) for x in self.eigenvalues],
                "pt_eigenvalues": [format_real(x) for x in self.pt_eigenvalues],
                "min_eigenvalue": format_real(self.eigenvalues[0]),
                "min_pt_eigenvalue": format_real(self.pt_eigenvalues[0]),
                "ppt": True,
            },
        }


def hermitian_cuet_grid(n: int, tup: CuetTuple) -> List[List[np.ndarray]]:
    """
    Arrange an n(n+1)/2-tuple as a Hermitian grid: the first n members on
    the diagonal, the rest as B_pq (p < q, row-major) with B_qp = B_pq*.
    """
    m = n * (n + 1) // 2
    if len(tup) != m:
        raise SizeError(f"a grid of order {n} needs {m} matrices, got {len(tup)}")
    grid: List[List[Optional[np.ndarray]]] = [[None] * n for _ in range(n)]
    for j in range(n):
        grid[j][j] = tup.matrices[j]
    rest = iter(tup.matrices[n:])
    for p in range(n):
        for q in range(p + 1, n):
            b = next(rest)
            grid[p][q] = b
            grid[q][p] = b.conj().T
    return grid


def construct_ppt(n: int, qs: Optional[QStructure] = None, seed: int = 0, zero: bool = False,
                  margin: Optional[float] = None, tol: float = CUET_TOL) -> PPTConstruction:
    """
    Build a PPT matrix of side n^2 from a CUET tuple.

    ``qs`` defaults to the reversal permutation of order n. The Hermitian
    block matrix B is shifted to A = B + (a0 + margin) I where
    a0 = max(0, -lambda_min(B)).

    Raises
    ------
    SizeError
        If n < 2 or Q does not have side n.
    ConstructionError
        If A or its partial transpose is not PSD, or the blocks fail the
        CUET mechanism check.
    """
    if n < 2:
        raise SizeError(f"n >= 2 required, got {n}")
    if qs is None:
        qs = QStructure.reversal(n)
    if qs.side != n:
        raise SizeError(f"Q has side {qs.side}, expected {n}")

    m = n * (n + 1) // 2
    tup = generate_cuet_tuple(qs, m, seed, psd_prefix=n, zero=zero, tol=tol)
    grid = hermitian_cuet_grid(n, tup)
    b = assemble_blocks(grid)
    lam_min = hermitian_eigenvalues(b)[0]
    a0 = max(0.0, -float(lam_min))
    if margin is None:
        margin = MARGIN_REL * max(1.0, float(np.linalg.norm(b, 2)))
    shift = a0 + margin
    a = b + shift * np.eye(n * n)
    logger.debug(f"PPT construction n={n} seed={seed}: a0={a0:.6g}, margin={margin:.3g}")

    for j in range(n):
        grid[j][j] = grid[j][j] + shift * np.eye(n)
    try:
        block_conjugation_transpose(grid, tup.witness, tol)
    except ConstructionError as e:
        u = tup.witness
        defects = {
            (j, k): max_abs(grid[j][k] - u @ grid[j][k].T @ u.conj().T)
            for j in range(n) for k in range(n)
        }
        worst = max(defects, key=defects.get)
        raise ConstructionError(f"{e}; largest CUET defect at block {worst}") from e

    eig = hermitian_eigenvalues(a)
    pt_eig = hermitian_eigenvalues(partial_transpose(a, BipartiteDims(n, n)))
    floor = -tol * max(1.0, max_abs(a))
    for name, values in (("A", eig), ("partial transpose of A", pt_eig)):
        if values[0] < floor:
            i = int(np.argmin(values))
            logger.error(f"{name} has eigenvalue {values[0]:.3e} (index {i}) below {floor:.3e}")
            raise ConstructionError(
                f"{name} is not PSD: eigenvalue #{i} = {format_real(values[0])}"
            )
    return PPTConstruction(n, a, b, a0, shift, margin, tup.witness, eig, pt_eig, seed)


def construct_ppt_batch(n: int, seeds: Sequence[int], qs: Optional[QStructure] = None,
                        jobs: int = 1, zero: bool = False) -> List[PPTConstruction]:
    """construct_ppt for each seed; results are in seed order."""
    logger.info(f"Constructing {len(seeds)} PPT matrices of order {n} with {jobs} worker(s)")
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        out = list(pool.map(lambda s: construct_ppt(n, qs, int(s), zero=zero), seeds))
    logger.success(f"{len(out)} PPT constructions verified")
    return out


# -------------------------------------------------------------------------
# Known examples and randomized witness searches
# -------------------------------------------------------------------------

def toeplitz_matrix(first_col, first_row=None) -> np.ndarray:
    """Toeplitz matrix; UET with the reversal permutation."""
    return as_cmat(scipy.linalg.toeplitz(first_col, first_row), "Toeplitz")


def halmos_matrix() -> np.ndarray:
    """[[0,1,0],[0,0,2],[0,0,0]], which is not UET."""
    return np.array([[0, 1, 0], [0, 0, 2], [0, 0, 0]], dtype=np.complex128)


def arveson_pair(lam: complex = 1j, mu: Optional[complex] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    ([[0,lam,1],[0,0,0],[0,0,0]], [[0,0,mu],[0,1,0],[0,-lam,0]]), not CUET for
    non-real lam and |mu|^2 = 1 + |lam|^2. ``mu`` defaults to the positive root.
    """
    lam = complex(lam)
    if lam.imag == 0:
        raise ValidationError("lambda must be non-real")
    if mu is None:
        mu = np.sqrt(1.0 + abs(lam) ** 2)
    mu = complex(mu)
    if abs(abs(mu) ** 2 - (1.0 + abs(lam) ** 2)) > 1e-12 * (1.0 + abs(lam) ** 2):
        raise ValidationError("|mu|^2 = 1 + |lambda|^2 required")
    y1 = np.array([[0, lam, 1], [0, 0, 0], [0, 0, 0]], dtype=np.complex128)
    y2 = np.array([[0, 0, mu], [0, 1, 0], [0, -lam, 0]], dtype=np.complex128)
    return y1, y2


def haar_unitaries(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """A stack of ``count`` Haar n x n unitaries (batched QR with phase fix)."""
    z = (rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


@dataclass
class WitnessSearch:
    """Best candidate from a randomized search; evidence only, never a proof."""

    best_residual: float
    best_unitary: np.ndarray
    samples: int
    threshold: float = SEARCH_THRESHOLD

    @property
    def found(self) -> bool:
        return self.best_residual <= self.threshold

    def to_json(self) -> dict:
        return {
            "best_residual": format_real(self.best_residual),
            "samples": self.samples,
            "threshold": format_real(self.threshold),
            "found": self.found,
        }


def search_cuet_witness(matrices: Sequence, samples: int = SEARCH_SAMPLES, seed: int = 0,
                        batch: int = SEARCH_BATCH) -> WitnessSearch:
    """
    Sample Haar unitaries U and keep the smallest max_j ||Y_j U - U Y_j^t||_max.
    """
    mats = [as_square(y, f"Y_{j}") for j, y in enumerate(matrices)]
    if not mats:
        raise ValidationError("at least one matrix is required")
    k = mats[0].shape[0]
    if any(y.shape[0] != k for y in mats):
        raise SizeError("matrices must share one size")
    rng = np.random.default_rng(seed)
    best, best_u, done = np.inf, np.eye(k, dtype=np.complex128), 0
    while done < samples:
        size = min(batch, samples - done)
        us = haar_unitaries(k, size, rng)
        res = np.zeros(size)
        for y in mats:
            dev = np.abs(y @ us - us @ y.T).max(axis=(-2, -1)) / max(1.0, max_abs(y))
            res = np.maximum(res, dev)
        i = int(np.argmin(res))
        if res[i] < best:
            best, best_u = float(res[i]), us[i].copy()
        done += size
    logger.info(f"Witness search over {samples} unitaries: best residual {best:.3e}")
    return WitnessSearch(best, best_u, samples)


def search_uet_witness(t, samples: int = SEARCH_SAMPLES, seed: int = 0,
                       batch: int = SEARCH_BATCH) -> WitnessSearch:
    """search_cuet_witness for the single matrix T."""
    return search_cuet_witness([t], samples, seed, batch)
