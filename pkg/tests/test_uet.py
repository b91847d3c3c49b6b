"""
Tests for UET canonical forms, CUET tuples and PPT construction.
"""

import numpy as np
import pytest

from choidynamics.core.errors import ConstructionError, SizeError, ValidationError
from choidynamics.core.matrixcore import (
    BipartiteDims,
    hermitian_eigenvalues,
    is_psd,
    is_unitary,
    max_abs,
    partial_transpose,
    random_unitary,
)
from choidynamics.core.uet import (
    CuetTuple,
    QStructure,
    arveson_pair,
    assemble_Q,
    assemble_blocks,
    block_conjugation_transpose,
    construct_ppt,
    construct_ppt_batch,
    cuet_check,
    generate_cuet_tuple,
    halmos_matrix,
    haar_unitaries,
    hermitian_cuet_grid,
    is_uet_pair,
    project_T_sector,
    random_skew_unitary,
    random_symmetric_unitary,
    reversal_permutation,
    search_cuet_witness,
    search_uet_witness,
    split_blocks,
    toeplitz_matrix,
)


def mixed_structure(rng):
    """Q with a symmetric 2-block, a skew 2-block and one off-pair of order 2."""
    return QStructure(
        q_plus=random_symmetric_unitary(2, rng),
        q_minus=random_skew_unitary(2, rng),
        off_pairs=((np.exp(0.7j), random_unitary(2, rng)),),
    )


class TestQStructure:
    """Validation and assembly of the block-diagonal Q."""

    def test_identity_of_order_one(self):
        """Q+ = I_1 assembles to [[1]]."""
        np.testing.assert_array_equal(assemble_Q(QStructure.identity(1)), [[1.0]])

    def test_reversal(self):
        """The reversal permutation is accepted as Q+."""
        q = assemble_Q(QStructure.reversal(4))
        assert is_unitary(q)
        np.testing.assert_array_equal(q, reversal_permutation(4))

    def test_lambda_off_circle_rejected(self):
        """|lambda| != 1 cannot give a unitary Q."""
        with pytest.raises(ValidationError, match=r"\|lambda\| = 1"):
            QStructure(off_pairs=((2.0, np.eye(1)),))

    @pytest.mark.parametrize("lam", [1.0, -1.0])
    def test_lambda_plus_minus_one_rejected(self, lam):
        """lambda = +-1 belongs to the symmetric or skew sector."""
        with pytest.raises(ValidationError):
            QStructure(off_pairs=((lam, np.eye(2)),))

    def test_non_symmetric_plus_block(self):
        """Q+ must be complex symmetric."""
        with pytest.raises(ValidationError):
            QStructure(q_plus=np.array([[0, 1], [1j, 0]]))

    def test_non_skew_minus_block(self):
        """Q- must be skew-symmetric."""
        with pytest.raises(ValidationError):
            QStructure(q_minus=np.eye(2))

    def test_empty(self):
        """A structure needs at least one block."""
        with pytest.raises(ValidationError):
            QStructure()

    def test_mixed_assembly(self, rng):
        """Sides add up and the result is unitary."""
        qs = mixed_structure(rng)
        assert [kind for kind, _ in qs.sector_sizes] == ["plus", "minus", "pair"]
        q = assemble_Q(qs)
        assert q.shape == (8, 8)
        assert is_unitary(q)

    def test_json_parse_back(self, rng):
        """from_json inverts to_json, and {"reversal": n} is shorthand."""
        qs = mixed_structure(rng)
        np.testing.assert_allclose(assemble_Q(QStructure.from_json(qs.to_json())), assemble_Q(qs))
        assert QStructure.from_json({"reversal": 3}).side == 3

    def test_malformed_json(self):
        """Missing keys are a validation error."""
        with pytest.raises(ValidationError):
            QStructure.from_json({"off_pairs": [{"lambda": [0.0, 1.0]}]})


class TestUetPairs:
    """T Q = Q T^t checks and known examples."""

    def test_toeplitz_reversal(self, rng):
        """Every Toeplitz matrix is UET with the reversal permutation."""
        for _ in range(50):
            k = int(rng.integers(2, 7))
            col = rng.standard_normal(k) + 1j * rng.standard_normal(k)
            row = rng.standard_normal(k) + 1j * rng.standard_normal(k)
            row[0] = col[0]
            assert is_uet_pair(toeplitz_matrix(col, row), reversal_permutation(k))

    def test_generic_matrix_fails(self, rng):
        """A random matrix is not UET with the reversal."""
        t = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert not is_uet_pair(t, reversal_permutation(4))

    def test_size_mismatch(self):
        """T and Q must have the same side."""
        with pytest.raises(SizeError):
            is_uet_pair(np.eye(3), np.eye(2))

    def test_halmos_search_fails(self):
        """No sampled unitary works for the Halmos matrix."""
        result = search_uet_witness(halmos_matrix(), samples=5_000, seed=1)
        assert not result.found
        assert result.samples == 5_000

    def test_arveson_search_fails(self):
        """The Arveson pair has no common sampled witness."""
        result = search_cuet_witness(arveson_pair(), samples=5_000, seed=2)
        assert not result.found
        assert result.to_json()["found"] is False

    @pytest.mark.slow
    def test_full_searches(self):
        """The default sample count finds nothing for either example."""
        assert not search_uet_witness(halmos_matrix()).found
        assert not search_cuet_witness(arveson_pair()).found

    def test_search_recovers_trivial_witness(self):
        """Real symmetric matrices are UET with U = I, which the search nears."""
        result = search_uet_witness(np.diag([1.0, 2.0]), samples=2_000, seed=3)
        assert result.best_residual < 0.1

    def test_arveson_validation(self):
        """Real lambda or a wrong |mu| is rejected."""
        with pytest.raises(ValidationError):
            arveson_pair(1.0)
        with pytest.raises(ValidationError):
            arveson_pair(1j, mu=1.0)
        y1, y2 = arveson_pair(1j)
        assert y2[0, 2] == pytest.approx(np.sqrt(2.0))
        assert y1[0, 1] == 1j

    def test_haar_stack(self, rng):
        """Each member of the batched stack is unitary."""
        us = haar_unitaries(3, 10, rng)
        assert us.shape == (10, 3, 3)
        assert all(is_unitary(u, 1e-12) for u in us)


class TestSectors:
    """Projection onto the sectors of Q."""

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_symmetric_sector(self, rng, k):
        """T = (M + Q M^t Q*) / 2 is UET with a symmetric Q."""
        q = random_symmetric_unitary(k, rng)
        m = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        assert is_uet_pair(project_T_sector(m, q), q)

    @pytest.mark.parametrize("k", [2, 4])
    def test_skew_sector(self, rng, k):
        """Same for a skew-symmetric Q."""
        q = random_skew_unitary(k, rng)
        m = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        assert is_uet_pair(project_T_sector(m, q), q)

    def test_non_involutive_rejected(self):
        """Q conj(Q) must be +-I."""
        q = np.array([[0, 1], [1j, 0]])
        with pytest.raises(ConstructionError):
            project_T_sector(np.eye(2), q)

    def test_odd_skew_rejected(self, rng):
        """Skew-symmetric unitaries need even order."""
        with pytest.raises(SizeError):
            random_skew_unitary(3, rng)


class TestCuetTuples:
    """Random tuples sharing a witness."""

    def test_reversal_tuples(self):
        """Generated tuples pass cuet_check for many seeds."""
        qs = QStructure.reversal(3)
        for seed in range(100):
            assert cuet_check(generate_cuet_tuple(qs, 4, seed))

    def test_mixed_tuple(self, rng):
        """All three sector kinds at once."""
        tup = generate_cuet_tuple(mixed_structure(rng), 3, seed=5, psd_prefix=2)
        assert cuet_check(tup)
        assert is_psd(tup.matrices[0]) and is_psd(tup.matrices[1])

    def test_psd_prefix(self):
        """The first members are PSD and still CUET."""
        tup = generate_cuet_tuple(QStructure.reversal(4), 5, seed=7, psd_prefix=3)
        assert all(is_psd(y) for y in tup.matrices[:3])
        assert cuet_check(tup)

    def test_psd_prefix_range(self):
        """psd_prefix may not exceed the tuple length."""
        with pytest.raises(ValidationError):
            generate_cuet_tuple(QStructure.reversal(2), 2, seed=0, psd_prefix=3)

    def test_zero_tuple(self):
        """zero=True gives zero matrices."""
        tup = generate_cuet_tuple(QStructure.reversal(2), 3, seed=0, zero=True)
        assert all(max_abs(y) == 0 for y in tup.matrices)
        assert tup.residual() == 0

    def test_deterministic(self):
        """The seed fixes the tuple."""
        a = generate_cuet_tuple(QStructure.reversal(3), 2, seed=11)
        b = generate_cuet_tuple(QStructure.reversal(3), 2, seed=11)
        for x, y in zip(a.matrices, b.matrices):
            np.testing.assert_array_equal(x, y)

    def test_wrong_witness(self, rng):
        """A tuple checked against the wrong unitary fails."""
        tup = generate_cuet_tuple(QStructure.reversal(3), 2, seed=0)
        assert not cuet_check(CuetTuple(tup.matrices, random_unitary(3, rng)))

    def test_witness_size_mismatch(self):
        """Members and witness must share one size."""
        with pytest.raises(SizeError):
            CuetTuple((np.eye(2),), np.eye(3))


class TestBlocks:
    """Block assembly and the blockwise transpose."""

    def test_split_inverts_assemble(self, rng):
        """split_blocks(assemble_blocks(g)) = g."""
        grid = [[rng.standard_normal((2, 2)) for _ in range(3)] for _ in range(3)]
        back = split_blocks(assemble_blocks(grid), 3)
        for row, row_back in zip(grid, back):
            for x, y in zip(row, row_back):
                np.testing.assert_array_equal(x, y)

    def test_ragged_grid(self):
        """Grids must be square with equal blocks."""
        with pytest.raises(SizeError):
            assemble_blocks([[np.eye(2), np.eye(2)]])
        with pytest.raises(SizeError):
            assemble_blocks([[np.eye(2), np.eye(2)], [np.eye(2), np.eye(3)]])

    def test_conjugation_is_partial_transpose(self):
        """U~* A U~ equals the blockwise transpose for CUET blocks."""
        tup = generate_cuet_tuple(QStructure.reversal(3), 4, seed=3)
        grid = [list(tup.matrices[:2]), list(tup.matrices[2:])]
        out = block_conjugation_transpose(grid, tup.witness)
        expected = partial_transpose(assemble_blocks(grid), BipartiteDims(2, 3))
        np.testing.assert_allclose(out, expected, atol=1e-10)

    def test_conjugation_rejects_non_cuet(self, rng):
        """Random blocks raise with the residual."""
        grid = [[rng.standard_normal((3, 3)) for _ in range(2)] for _ in range(2)]
        with pytest.raises(ConstructionError, match="residual"):
            block_conjugation_transpose(grid, reversal_permutation(3))

    def test_conjugation_rejects_non_unitary(self):
        """The witness must be unitary."""
        with pytest.raises(ValidationError):
            block_conjugation_transpose([[np.eye(2)]], 2 * np.eye(2))

    def test_hermitian_grid(self):
        """Lower blocks are adjoints of the upper ones."""
        tup = generate_cuet_tuple(QStructure.reversal(3), 6, seed=4, psd_prefix=3)
        grid = hermitian_cuet_grid(3, tup)
        a = assemble_blocks(grid)
        np.testing.assert_allclose(a, a.conj().T)
        with pytest.raises(SizeError):
            hermitian_cuet_grid(2, tup)


class TestConstructPPT:
    """PPT block matrices from CUET tuples."""

    @pytest.mark.parametrize("n", [2, 3])
    def test_psd_and_ppt(self, n):
        """A and its partial transpose are PSD for many seeds."""
        for seed in range(20):
            result = construct_ppt(n, seed=seed)
            a = result.matrix
            scale = max(1.0, max_abs(a))
            assert hermitian_eigenvalues(a)[0] >= -1e-10 * scale
            pt = partial_transpose(a, BipartiteDims(n, n))
            assert hermitian_eigenvalues(pt)[0] >= -1e-10 * scale

    def test_density(self):
        """The normalized matrix has trace one."""
        rho = construct_ppt(3, seed=1).density()
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)

    def test_a0_is_minimal(self):
        """With a0 > 0 the smallest eigenvalue of A is the margin."""
        result = construct_ppt(3, seed=2)
        if result.a0 > 0:
            assert result.eigenvalues[0] == pytest.approx(result.margin, abs=1e-8 * max(1.0, result.a0))
        np.testing.assert_allclose(result.matrix, result.hermitian_part + result.shift * np.eye(9))

    def test_zero_tuple(self):
        """The zero tuple gives margin * I."""
        result = construct_ppt(2, zero=True)
        assert result.a0 == 0
        np.testing.assert_allclose(result.matrix, result.margin * np.eye(4))

    def test_deterministic(self):
        """Same seed, same matrix."""
        np.testing.assert_array_equal(construct_ppt(2, seed=9).matrix, construct_ppt(2, seed=9).matrix)

    def test_custom_structure(self, rng):
        """Q may be any structure of side n."""
        qs = QStructure(q_plus=random_symmetric_unitary(3, rng))
        result = construct_ppt(3, qs, seed=0)
        assert result.pt_eigenvalues[0] >= -1e-10 * max(1.0, max_abs(result.matrix))

    def test_side_mismatch(self):
        """Q must have side n."""
        with pytest.raises(SizeError):
            construct_ppt(3, QStructure.reversal(2))

    def test_order_one_rejected(self):
        """n >= 2."""
        with pytest.raises(SizeError):
            construct_ppt(1)

    def test_transcript(self):
        """The JSON transcript carries the verification."""
        out = construct_ppt(2, seed=0).to_json()
        assert out["verification"]["ppt"] is True
        assert out["matrix"]["rows"] == 4

    def test_batch_order(self):
        """Batch results follow the seed order."""
        batch = construct_ppt_batch(2, [3, 1, 2], jobs=3)
        assert [r.seed for r in batch] == [3, 1, 2]
        np.testing.assert_array_equal(batch[1].matrix, construct_ppt(2, seed=1).matrix)
