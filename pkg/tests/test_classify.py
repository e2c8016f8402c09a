import math

import numpy as np
import pytest

from tcpkit import fixtures as fx
from tcpkit.classify import (
    SearchBudget,
    all_principal_nonsingular,
    is_copositive,
    is_K_nonsingular,
    is_K_pd,
    is_K_regular,
    is_strictly_copositive,
    min_over_basis,
    q_in_dual_SA,
    s_cone_samples,
)
from tcpkit.cones import from_generators, orthant
from tcpkit.tensor import Tensor, apply_m, apply_m1, unit_tensor


class TestMinOverBasis:
    def test_e1_min_zero_on_axis(self, e1):
        v, x, _ = min_over_basis("xm", e1, orthant(2), SearchBudget())
        assert v == pytest.approx(0.0, abs=1e-9)
        assert min(x) == pytest.approx(0.0, abs=1e-9)  # an axis point

    def test_identity_simplex_minimum(self):
        # min of x1^3 + x2^3 on the standard simplex is 0.25 at (.5, .5)
        v, x, _ = min_over_basis("xm", unit_tensor(3, 2), orthant(2),
                                 SearchBudget())
        assert v == pytest.approx(0.25, abs=1e-9)
        assert np.allclose(x, [0.5, 0.5], atol=1e-6)

    def test_e4_min_on_diagonal(self, e4):
        v, x, _ = min_over_basis("xm", e4, orthant(2), SearchBudget())
        assert v == pytest.approx(0.0, abs=1e-9)
        assert x[0] == pytest.approx(x[1], abs=1e-4)

    def test_value_upper_bounds_lattice(self, e1):
        coarse = min_over_basis("xm", e1, orthant(2),
                                SearchBudget(grid_resolution=8))[0]
        fine = min_over_basis("xm", e1, orthant(2),
                              SearchBudget(grid_resolution=128))[0]
        assert fine <= coarse + 1e-12


class TestCopositivity:
    def test_e1_holds(self, e1):
        assert is_copositive(e1).status == "holds"

    def test_e4_holds(self, e4):
        assert is_copositive(e4).status == "holds"

    def test_negative_diagonal_fails(self):
        A = Tensor(3, 2, {(1, 1, 1): -1.0})
        v = is_copositive(A)
        assert v.status == "fails"
        assert np.allclose(v.witness, [1.0, 0.0])
        assert apply_m(A, v.witness) < -1e-6  # witness re-check

    def test_scale_invariance(self, e1, e4):
        for A in (e1, e4):
            assert is_copositive(A.scale(7.5)).status == is_copositive(A).status


class TestStrictCopositivity:
    def test_identity_holds(self):
        assert is_strictly_copositive(unit_tensor(3, 2)).status == "holds"

    def test_e1_fails_on_axis(self, e1):
        v = is_strictly_copositive(e1)
        assert v.status == "fails"
        assert min(abs(v.witness)) == pytest.approx(0.0, abs=1e-9)
        assert apply_m(e1, v.witness) <= 0.0

    def test_e4_fails_on_diagonal(self, e4):
        v = is_strictly_copositive(e4)
        assert v.status == "fails"
        assert np.allclose(v.witness, [1, 1] / np.sqrt(2), atol=1e-6)

    def test_pd_implies_nonsingular(self):
        for seed in range(5):
            A = fx.random_tensor("copositive", 3, 2, seed=seed)
            if is_K_pd(A, orthant(2)).status == "holds":
                assert is_K_nonsingular(A, orthant(2),
                                        SearchBudget().scaled(4)).status == "holds"


class TestRegularity:
    def test_identity_regular(self):
        assert is_K_regular(unit_tensor(3, 2), orthant(2)).status == "holds"

    def test_e1_fails(self, e1):
        v = is_K_regular(e1, orthant(2))
        assert v.status == "fails"
        assert abs(apply_m(e1, v.witness)) <= 1e-9

    def test_e2_fails(self, e2):
        assert is_K_regular(e2, orthant(2)).status == "fails"


class TestNonsingularity:
    def test_e1_nonsingular(self, e1):
        assert is_K_nonsingular(e1, orthant(2)).status == "holds"

    def test_e2_singular_with_witness(self, e2):
        v = is_K_nonsingular(e2, orthant(2))
        assert v.status == "fails"
        assert np.linalg.norm(apply_m1(e2, v.witness)) <= 1e-9
        # the cited singular direction certifies too
        assert np.linalg.norm(apply_m1(e2, [1.0, 0.0])) == 0.0

    def test_e3bar_singular(self, e3bar):
        v = is_K_nonsingular(e3bar, orthant(2))
        assert v.status == "fails"
        assert np.allclose(v.witness, np.array([2.0, 1.0]) / math.sqrt(5),
                           atol=1e-5)

    def test_general_cone(self):
        K = from_generators([[2.0, 1.0], [1.0, 2.0]])
        # E3bar's kernel direction (2,1) lies in K, so it is K-singular
        A = Tensor(2, 2, {(1, 1): 1.0, (1, 2): -2.0, (2, 1): 1.0, (2, 2): -2.0})
        assert is_K_nonsingular(A, K).status == "fails"


class TestPrincipalSweep:
    def test_e4_all_hold(self, e4):
        v = all_principal_nonsingular(e4)
        assert v.status == "holds"
        assert set(v.per_alpha) == {"1", "2", "1,2"}

    def test_e2_fails_at_full_subset(self, e2):
        v = all_principal_nonsingular(e2)
        assert v.status == "fails"
        assert v.per_alpha["1,2"] == "fails"

    def test_unit_tensor_holds(self):
        assert all_principal_nonsingular(unit_tensor(3, 3)).status == "holds"


class TestSCone:
    def test_e1_samples_on_axes(self, e1):
        pts = s_cone_samples(e1, 10, seed=0)
        assert pts
        for p in pts:
            assert min(p) == pytest.approx(0.0, abs=1e-6)  # axis points only

    def test_q_in_dual(self, e1):
        assert q_in_dual_SA(e1, [1.0, 1.0]).status == "holds"
        v = q_in_dual_SA(e1, [1.0, -1.0])
        assert v.status == "fails"
        assert float(np.dot([1.0, -1.0], v.witness)) < -1e-6

    def test_holds_note_mentions_resolution(self, e1):
        assert "sampling resolution" in q_in_dual_SA(e1, [1.0, 1.0]).note


class TestVerdictPlumbing:
    def test_json_shape(self, e1):
        obj = is_copositive(e1).to_json()
        assert obj["status"] == "holds"
        assert set(obj) >= {"property", "status", "certificate", "witness"}

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            SearchBudget(multistarts=0)
        with pytest.raises(ValueError):
            SearchBudget(margin=0.0)
