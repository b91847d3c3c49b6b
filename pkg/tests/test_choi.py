"""
Tests for Choi matrices and the classification of rho, tau and theta maps.
"""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from choidynamics.core.choi import (
    CSV_HEADER,
    SeparabilityVerdict,
    block_positivity_minimum,
    central_block_eigenvalues,
    choi_matrix,
    choi_of_spec,
    choi_rank_analytic,
    circulant_foliated_cp,
    classify,
    classify_map,
    classify_rho,
    classify_state,
    classify_tau,
    classify_theta,
    foliated_map_from_choi,
    pptes_witness,
    rho_abc_decomposable,
    rho_abc_decomposition,
    rho_abc_positive,
    rho_abc_positivity_margin,
    schmidt_number_of_choi,
    schmidt_number_structured,
    theta_positivity_margin,
)
from choidynamics.core.errors import DomainError, ValidationError
from choidynamics.core.foliated import (
    FoliatedMap,
    RhoSpec,
    TauSpec,
    ThetaSpec,
    build_map,
    compose,
    horodecki_map,
)
from choidynamics.core.matrixcore import elementary, is_psd


def grid(start, stop, step):
    count = int(round((stop - start) / step)) + 1
    return [start + i * step for i in range(count)]


class TestChoiMatrix:
    """Construction of C = sum E_jk (x) Lambda(E_jk)."""

    def test_identity_map(self):
        """The Choi matrix of Id is the unnormalized maximally entangled projector."""
        c = choi_matrix(FoliatedMap.identity()).mat
        v = sum(np.kron(np.eye(3)[j], np.eye(3)[j]) for j in range(3))
        np.testing.assert_allclose(c, np.outer(v, v))

    def test_blocks_are_images(self):
        """Block (j,k) is Lambda(E_jk)."""
        m = build_map(ThetaSpec(1.5, 1, 2, 3))
        c = choi_matrix(m)
        for j, k in itertools.product(range(3), repeat=2):
            np.testing.assert_allclose(c.block(j, k), m.apply(elementary(j, k, 3)))

    def test_theta_expanded_entries(self):
        """C_theta has -1 at the (1,5), (1,9), (5,9) positions."""
        c = choi_of_spec(ThetaSpec(1.5, 1, 2, 3)).mat.real
        for i, j in ((0, 4), (0, 8), (4, 8)):
            assert c[i, j] == -1.0 and c[j, i] == -1.0

    @settings(max_examples=50, deadline=None, derandomize=True)
    @given(
        st.fractions(min_value=0, max_value=3, max_denominator=12),
        st.fractions(min_value=0, max_value=3, max_denominator=12),
        st.fractions(min_value=0, max_value=3, max_denominator=12),
        st.fractions(min_value=-3, max_value=3, max_denominator=12),
    )
    def test_partial_transpose_of_rho_is_tau(self, a, b, c, d):
        """partial_transpose(C_rho) equals C_tau exactly."""
        rho = choi_of_spec(RhoSpec(a, b, c, d))
        tau = choi_of_spec(TauSpec(a, b, c, d))
        np.testing.assert_array_equal(rho.partial_transpose(), tau.mat)

    @pytest.mark.parametrize("fmap", [
        build_map(ThetaSpec(1.5, 1, 2, 3)),
        build_map(TauSpec(1, 0.5, 2, -1)),
        FoliatedMap(np.arange(9.0).reshape(3, 3), 0.3, -0.7),
        horodecki_map(0.3, 1, 2),
    ])
    def test_map_from_choi(self, fmap):
        """The foliation is read back from the Choi matrix."""
        loaded = foliated_map_from_choi(choi_matrix(fmap).mat)
        np.testing.assert_allclose(loaded.lambda1, fmap.lambda1)
        assert loaded.alpha == pytest.approx(fmap.alpha)
        assert loaded.beta == pytest.approx(fmap.beta)

    def test_map_from_choi_rejects(self, rng):
        """Shapes other than n^2 x n^2 and non-foliated matrices are refused."""
        with pytest.raises(ValidationError):
            foliated_map_from_choi(np.eye(8))
        with pytest.raises(ValidationError):
            foliated_map_from_choi(np.ones((9, 4)))
        x = rng.standard_normal((9, 9))
        with pytest.raises(ValidationError):
            foliated_map_from_choi(x + x.T)


class TestCriteria:
    """Closed-form parameter criteria."""

    def test_choi_map_is_positive(self):
        """rho[1,0,1] (the Choi map) is positive but not decomposable."""
        assert rho_abc_positive(1, 0, 1)
        assert rho_abc_decomposable(1, 0, 1) is False

    def test_positive_needs_sum(self):
        """a + b + c >= 2 is necessary."""
        assert not rho_abc_positive(1, 0.25, 0.5)

    def test_decomposable_range(self):
        """Decomposability is only reported for 0 <= a < 2."""
        assert rho_abc_decomposable(2.5, 0, 0) is None
        assert rho_abc_decomposable(1, 1, 1)

    def test_generalized_cp_criterion(self):
        """D(x,y,z) (+) (alpha Id + beta t) against its Choi spectrum."""
        for x, y, z, alpha, beta in [(1, 1, 1, 1, 0), (1, 1, 1, 0.5, 0.5), (1, 0.2, 0.2, 0.1, 0.3)]:
            fmap = FoliatedMap(np.array([[x, y, z], [z, x, y], [y, z, x]], dtype=float), alpha, beta)
            assert circulant_foliated_cp(x, y, z, alpha, beta) == choi_matrix(fmap).is_psd()

    def test_central_block(self):
        """Eigenvalues of the central block are a+2d, a-d, a-d."""
        for a, d in [(1.0, 1.0), (1.0, -0.5), (2.0, -1.0), (0.3, 0.7)]:
            assert central_block_eigenvalues(a, d) == (a + 2 * d, a - d, a - d)

    def test_block_positivity_of_choi_map(self):
        """The Choi map sits on the boundary of positivity."""
        m = block_positivity_minimum(build_map(RhoSpec(1, 0, 1, -1)))
        assert -1e-9 <= m <= 1e-6

    def test_block_positivity_negative(self):
        """rho[0.5,0,0] is far from positive."""
        assert block_positivity_minimum(build_map(RhoSpec(0.5, 0, 0, -1))) < -0.1

    def test_block_positivity_affine_unsupported(self):
        """Affine off-diagonal actions are not searched."""
        assert block_positivity_minimum(FoliatedMap(np.eye(3), 0.5, 0.5)) is None

    def test_positivity_margin_sign(self):
        """The rho[a,b,c] margin is nonnegative exactly on the positive region."""
        axis = grid(0, 3, 0.25)
        for a, b, c in itertools.product(axis, repeat=3):
            margin = rho_abc_positivity_margin(a, b, c)
            if abs(margin) > 1e-12:
                assert (margin > 0) == rho_abc_positive(a, b, c), (a, b, c)

    def test_lattice_decides_away_from_boundary(self):
        """Off the boundary the simplex lattice alone gives the sign of the minimum."""
        for spec in (RhoSpec(2, 1, 1, -1), RhoSpec(1, 1, 1, -1), RhoSpec(0.5, 0, 0, -1),
                     RhoSpec(3, 0, 0, -1)):
            fmap = build_map(spec)
            coarse = block_positivity_minimum(fmap, refine=False)
            fine = block_positivity_minimum(fmap)
            assert fine <= coarse
            assert (coarse >= -1e-9) == (fine >= -1e-9) == rho_abc_positive(*spec.params[:3])

    def test_theta_margin_sign(self):
        """The theta margin is positive on clearly positive parameters."""
        assert theta_positivity_margin(1.5, 1, 1, 1) > 0
        assert theta_positivity_margin(0.5, 1, 1, 1) < 0
        assert theta_positivity_margin(1.0, 0.5, 0.5, 0.5) < 0


class TestDecomposition:
    """rho[a,b,c] = CP part + co-CP part, found numerically."""

    def test_parts_sum_to_map(self):
        """The two parts add up to rho[a,b,c] and have the required properties."""
        cp, cocp = rho_abc_decomposition(1, 1, 1)
        target = build_map(RhoSpec(1, 1, 1, -1))
        np.testing.assert_allclose(cp.lambda1 + cocp.lambda1, target.lambda1, atol=1e-12)
        assert cp.alpha + cocp.alpha == pytest.approx(target.alpha)
        assert choi_matrix(cp).is_psd()
        assert is_psd(choi_matrix(cocp).partial_transpose())

    def test_choi_map_has_none(self):
        """The Choi map rho[1,0,1] has no decomposition."""
        assert rho_abc_decomposition(1, 0, 1) is None

    def test_matches_criterion(self):
        """The search succeeds exactly where bc >= (1 - a/2)^2."""
        for a, b, c in itertools.product(grid(0, 1.75, 0.25), grid(0, 2.5, 0.25), grid(0, 2.5, 0.25)):
            found = rho_abc_decomposition(a, b, c) is not None
            assert found == rho_abc_decomposable(a, b, c), (a, b, c)

    def test_always_decomposable_from_two(self):
        """For a >= 2 a decomposition exists whatever b and c are."""
        for a, b, c in itertools.product((2.0, 2.5, 3.0), (0.0, 1.0), (0.0, 0.5)):
            assert rho_abc_decomposition(a, b, c) is not None, (a, b, c)

    def test_report_carries_both_opinions(self):
        """d = -1 reports fill both decomposability opinions."""
        for spec in (RhoSpec(1, 1, 1, -1), RhoSpec(1, 0, 1, -1), RhoSpec(2.5, 0, 0, -1)):
            report = classify_rho(spec)
            assert report.decomposable.numerical is not None
            assert report.decomposable.agree, spec


class TestClassifyRho:
    """rho[a,b,c,d] reports."""

    def test_ppt_entangled(self):
        """rho[1,1/2,2,1] is PPT and certified entangled by rho[1,0,1,-1]."""
        report = classify_rho(RhoSpec(1, 0.5, 2, 1))
        assert report.completely_positive.value
        assert report.completely_copositive.value
        assert report.ppt.analytic and report.ppt.numerical
        assert report.separable.verdict is SeparabilityVerdict.ENTANGLED
        assert report.separable.decided
        assert report.witness == "rho[1, 0, 1, -1]"
        assert report.agree

    def test_witness_composition_not_cp(self):
        """The composed Choi matrix has an eigenvalue below -1e-6."""
        spec = RhoSpec(1, 0.5, 2, 1)
        xi = pptes_witness(spec)
        composite = choi_matrix(compose(xi, build_map(spec)))
        assert composite.eigenvalues()[0] < -1e-6

    def test_witness_not_applicable(self):
        """No candidate when a+b >= 2d and a+c >= 2d."""
        assert pptes_witness(RhoSpec(2, 1, 1, 1)) is None

    def test_witness_precondition(self):
        """d > 0 is required."""
        with pytest.raises(DomainError):
            pptes_witness(RhoSpec(1, 1, 1, -1))

    def test_not_ppt(self):
        """rho[1,0,0,1] is CP but not co-CP."""
        report = classify_rho(RhoSpec(1, 0, 0, 1))
        assert report.completely_positive.value
        assert not report.ppt.value
        assert report.separable.verdict is SeparabilityVerdict.ENTANGLED

    def test_separable_when_d_zero(self):
        """d = 0 gives a diagonal Choi matrix."""
        report = classify_rho(RhoSpec(1, 1, 1, 0))
        assert report.separable.verdict is SeparabilityVerdict.SEPARABLE

    def test_undecidable(self):
        """PPT without an applicable witness stays undecidable."""
        report = classify_rho(RhoSpec(2, 1, 1, 1))
        assert report.ppt.value
        assert report.separable.verdict is SeparabilityVerdict.UNDECIDABLE
        assert not report.separable.decided

    def test_positivity_verdicts(self):
        """d = -1 populates both positivity opinions."""
        report = classify_rho(RhoSpec(1, 0, 1, -1))
        assert report.positive.analytic is True
        assert report.positive.numerical is True
        assert report.decomposable.value is False

    @pytest.mark.parametrize("eps", [5e-10, 1.5e-9, 3e-9, 1e-6])
    def test_witness_near_boundary(self, eps):
        """Points with a+b just below 2d classify without raising."""
        b = 1.0 - eps
        report = classify_rho(RhoSpec(1, b, 1.0 / b, 1))
        assert report.ppt.value
        assert report.separable.verdict in (SeparabilityVerdict.ENTANGLED, SeparabilityVerdict.UNDECIDABLE)
        assert report.agree

    def test_witness_selected_past_slack(self):
        """Once a+b < 2d clears the tolerance the witness certifies entanglement."""
        b = 1.0 - 1.5e-9
        spec = RhoSpec(1, b, 1.0 / b, 1)
        assert pptes_witness(spec) is not None
        assert classify_rho(spec).separable.verdict is SeparabilityVerdict.ENTANGLED

    def test_diagonal_schmidt_number(self):
        """d = 0 has Schmidt number 1."""
        assert classify_rho(RhoSpec(1, 1, 1, 0)).schmidt_number == 1
        assert classify_state(RhoSpec("1/9", "1/9", "1/9", 0)).schmidt_number == 1

    def test_negative_parameters_rejected(self):
        """a, b, c must be nonnegative."""
        with pytest.raises(DomainError):
            classify_rho(RhoSpec(1, -1, 1, 1))

    def test_csv_row(self):
        """One cell per header column."""
        report = classify(RhoSpec(1, 0.5, 2, 1))
        row = report.csv_row()
        assert len(row) == len(CSV_HEADER)
        assert row[0] == "rho" and row[-1] == "true"


class TestClassifyTau:
    """tau[a,b,c,d] reports."""

    def test_roles_swap(self):
        """tau[1,0,0,1] is co-CP but not CP."""
        report = classify_tau(TauSpec(1, 0, 0, 1))
        assert not report.completely_positive.value
        assert report.completely_copositive.value
        assert report.agree

    def test_dispatch(self):
        """classify picks the tau classifier."""
        assert classify(TauSpec(1, 1, 1, 1)).family == "tau"


class TestClassifyTheta:
    """theta[a,c1,c2,c3] reports."""

    def test_cp_at_two(self):
        """theta[2,1,1,1] is CP and flagged atomic by the parameter criterion."""
        report = classify_theta(ThetaSpec(2, 1, 1, 1))
        assert report.completely_positive.analytic and report.completely_positive.numerical
        assert report.atomic.value
        assert report.notes
        assert report.agree

    def test_atomic_one(self):
        """theta[1,1,1,1] is positive, not CP, atomic."""
        report = classify_theta(ThetaSpec(1, 1, 1, 1))
        assert report.positive.value
        assert not report.completely_positive.value
        assert report.atomic.value
        assert report.agree

    def test_not_positive(self):
        """theta[1/2,1,1,1] is not positive."""
        report = classify_theta(ThetaSpec(0.5, 1, 1, 1))
        assert report.positive.analytic is False
        assert report.positive.numerical is False

    def test_never_cocp(self):
        """theta is never co-CP."""
        report = classify_theta(ThetaSpec(3, 2, 2, 2))
        assert report.completely_copositive.analytic is False
        assert report.completely_copositive.numerical is False

    @pytest.mark.parametrize("a", [1.0 - 1e-12, 2.0 + 1e-12])
    def test_atomic_edges_within_tolerance(self, a):
        """The atomic range 1 <= a <= 2 carries the same slack as the other criteria."""
        report = classify_theta(ThetaSpec(a, 1, 1, 1))
        assert report.atomic.value is True
        assert report.positive.analytic is True

    def test_atomic_rows(self):
        """Over a in [1,2] the atomic flag follows c1 c2 c3 >= (2-a)^3."""
        for a in (1.0, 1.25, 1.5, 2.0):
            for cs in ((0.5, 0.5, 0.5), (1, 1, 1), (0.25, 1, 2)):
                report = classify_theta(ThetaSpec(a, *cs))
                assert report.atomic.value == (np.prod(cs) >= (2 - a) ** 3)


class TestRanks:
    """Analytic case table against numerical ranks."""

    @pytest.mark.parametrize("spec, expected", [
        (RhoSpec(1, 1, 1, 1), 7),
        (RhoSpec(2, 0.5, 3, 2), 7),
        (RhoSpec(0.5, 1, 2, 0.5), 7),
        (RhoSpec(2, 1, 1, -1), 8),
        (RhoSpec(1, 2, 0.5, -0.5), 8),
        (RhoSpec(3, 1, 2, -1.5), 8),
        (RhoSpec(1, 1, 1, 0.5), 9),
        (RhoSpec(1, 2, 3, -1), 9),
        (RhoSpec(2, 0.5, 0.5, 0), 9),
        (TauSpec(1, 1, 2, 1), 9),
        (TauSpec(2, 0.5, 0.5, 1), 9),
        (TauSpec(1, 3, 1, -1), 9),
        (TauSpec(1, 0, 0, 0), 3),
        (TauSpec(2, 0, 0, 0), 3),
        (TauSpec(0.5, 0, 0, 0), 3),
        (TauSpec(1, 1, 1, 1), 6),
        (TauSpec(1, 1, 0, 0), 6),
        (TauSpec(1, 4, 1, -2), 6),
        (ThetaSpec(1, 1, 1, 1), 6),
        (ThetaSpec(3, 1, 2, 3), 6),
        (ThetaSpec(0.5, 2, 2, 2), 6),
        (ThetaSpec(2, 1, 1, 1), 5),
        (ThetaSpec(2, 0.5, 2, 3), 5),
        (ThetaSpec(2, 3, 3, 3), 5),
    ])
    def test_rank_table(self, spec, expected):
        """Closed-form rank matches the numerical rank."""
        assert choi_rank_analytic(spec) == expected
        assert choi_of_spec(spec).rank() == expected

    def test_unlisted(self):
        """Zero b or c is outside the rho table."""
        assert choi_rank_analytic(RhoSpec(1, 0, 1, 1)) is None
        assert choi_rank_analytic(ThetaSpec(1, 0, 1, 1)) is None


class TestSchmidt:
    """Schmidt numbers of the structured densities."""

    @pytest.mark.parametrize("spec, expected", [
        (RhoSpec("1/6", "1/12", "1/12", "-1/12"), 2),
        (RhoSpec("2/9", "1/18", "1/18", "-1/9"), 2),
        (RhoSpec("1/6", "1/12", "1/12", "1/12"), 3),
        (RhoSpec("1/9", "1/9", "1/9", "1/9"), 3),
        (TauSpec("1/9", "1/9", "1/9", "1/9"), 2),
        (TauSpec("1/3", "0", "0", "0"), None),
        (TauSpec("1/6", "1/12", "1/12", "-1/20"), 2),
        (ThetaSpec(2, 1, 1, 1), 2),
        (ThetaSpec(2, 0.5, 1, 3), 2),
        (ThetaSpec(3, 1, 1, 1), 3),
        (ThetaSpec(2.5, 2, 1, 1), 3),
    ])
    def test_structured_rule(self, spec, expected):
        """Schmidt numbers 2 and 3 by the block rule."""
        if expected is None:
            with pytest.raises(DomainError):
                schmidt_number_structured(spec)
        else:
            assert schmidt_number_structured(spec) == expected

    def test_central_block_identity(self):
        """The eigenvalue identity holds at the density points."""
        for a, d in [(1 / 6, -1 / 12), (1 / 6, 1 / 12), (1 / 9, 1 / 9)]:
            eig = np.sort(central_block_eigenvalues(a, d))
            block = np.full((3, 3), d)
            np.fill_diagonal(block, a)
            np.testing.assert_allclose(np.linalg.eigvalsh(block), eig, atol=1e-12)

    def test_not_normalized(self):
        """rho densities need a + b + c = 1/3."""
        with pytest.raises(DomainError):
            schmidt_number_structured(RhoSpec(1, 1, 1, 1))

    def test_state_report(self):
        """classify_state marks densities and PPT entanglement."""
        report = classify_state(RhoSpec("2/21", "1/21", "4/21", "2/21"))
        assert report.density
        assert report.schmidt_number == 3
        assert "PPT entangled state" in report.notes

    @pytest.mark.parametrize("spec", [
        RhoSpec("2/21", "1/21", "4/21", "2/21"),
        RhoSpec("1/6", "1/12", "1/12", "-1/12"),
        TauSpec("1/9", "1/9", "1/9", "1/9"),
    ])
    def test_from_choi_matrix(self, spec):
        """A stored Choi matrix gives the structured Schmidt number."""
        assert schmidt_number_of_choi(choi_of_spec(spec).mat) == schmidt_number_structured(spec)

    def test_from_unnormalized_choi_matrix(self):
        """The stored matrix is normalized by its trace first."""
        assert schmidt_number_of_choi(choi_of_spec(RhoSpec(2, 1, 4, 2)).mat) == 3

    def test_from_choi_matrix_domain(self):
        """Non-circulant and non-foliated matrices are refused."""
        with pytest.raises(DomainError):
            schmidt_number_of_choi(choi_of_spec(ThetaSpec(2, 0.5, 1, 3)).mat)
        with pytest.raises(DomainError):
            schmidt_number_of_choi(choi_matrix(horodecki_map(0.5, 1, 1)).mat)
        with pytest.raises(ValidationError):
            schmidt_number_of_choi(np.ones((9, 9)))

    def test_schmidt_gt_two_note(self):
        """d < a < 2d and 2(b+c) < 2d - a produce the note."""
        report = classify_state(RhoSpec("3/10", "1/60", "1/60", "1/5"))
        assert any("Schmidt number > 2" in note for note in report.notes)


class TestClassifyMap:
    """Generic foliated maps."""

    def test_circulant_map_has_analytic_verdicts(self):
        """A real circulant map gets analytic CP and co-CP opinions."""
        report = classify_map(build_map(RhoSpec(1, 0.5, 2, 1)))
        assert report.completely_positive.analytic is True
        assert report.agree

    def test_two_by_two(self):
        """Non-circulant maps get numerical verdicts only."""
        report = classify_map(FoliatedMap(np.eye(2), 1.0, 0.0))
        assert report.completely_positive.analytic is None
        assert report.completely_positive.numerical is True

    def test_ppt_on_m2_is_separable(self):
        """A PPT Choi matrix in 2x2 is separable."""
        report = classify_map(FoliatedMap(np.ones((2, 2)), 0.5, 0.5))
        assert report.ppt.numerical
        assert report.separable.verdict is SeparabilityVerdict.SEPARABLE
        assert report.separable.reason == "PPT in 2x2"

    def test_ppt_on_m3_stays_open(self):
        """The small-dimension rule does not reach 3x3."""
        report = classify_map(build_map(RhoSpec(2, 1, 1, 1)))
        assert report.separable.verdict is SeparabilityVerdict.UNDECIDABLE

    @pytest.mark.parametrize("theta", [0.3, 0.6, np.pi / 4])
    def test_horodecki_separable_at_half(self, theta):
        """p = 1/2 is PPT and therefore separable."""
        report = classify_map(horodecki_map(0.5, np.cos(theta), np.sin(theta)))
        assert report.completely_positive.numerical
        assert report.ppt.numerical
        assert report.separable.verdict is SeparabilityVerdict.SEPARABLE

    @pytest.mark.parametrize("p", [0.0, 0.3, 0.7, 1.0])
    def test_horodecki_entangled_otherwise(self, p):
        """p != 1/2 is CP but not PPT."""
        report = classify_map(horodecki_map(p, np.cos(0.3), np.sin(0.3)))
        assert report.completely_positive.numerical
        assert not report.ppt.numerical
        assert report.separable.verdict is SeparabilityVerdict.ENTANGLED


class TestAgreement:
    """Analytic and numerical verdicts agree across parameter grids."""

    def test_coarse_rho_grid(self, tol):
        """Every rho point of a coarse grid agrees."""
        for a, b, c, d in itertools.product(grid(0, 3, 0.75), grid(0, 3, 0.75), grid(0, 3, 0.75),
                                            grid(-1.5, 1.5, 0.75)):
            assert classify_rho(RhoSpec(a, b, c, d), tol).agree, (a, b, c, d)

    def test_coarse_theta_grid(self, tol):
        """Every theta point of a coarse grid agrees."""
        axis = grid(0, 2, 1.0)
        for params in itertools.product(grid(0, 3, 1.0), axis, axis, axis):
            assert classify_theta(ThetaSpec(*params), tol).agree, params

    @pytest.mark.slow
    def test_full_rho_grid(self, sweep_step, tol):
        """Every rho point of the acceptance grid agrees."""
        step = float(sweep_step)
        abc = grid(0, 3, step)
        for a, b, c, d in itertools.product(abc, abc, abc, grid(-1.5, 1.5, step)):
            assert classify_rho(RhoSpec(a, b, c, d), tol).agree, (a, b, c, d)

    @pytest.mark.slow
    def test_full_theta_grid(self, sweep_step, tol):
        """Every theta point of the acceptance grid agrees."""
        axis = grid(0, 3, float(sweep_step))
        for params in itertools.product(axis, repeat=4):
            assert classify_theta(ThetaSpec(*params), tol).agree, params
