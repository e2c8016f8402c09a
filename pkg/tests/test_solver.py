import numpy as np
import pytest

from tcpkit import fixtures as fx
from tcpkit.classify import q_in_dual_SA
from tcpkit.compcones import q_membership
from tcpkit.cones import from_generators, orthant
from tcpkit.solver import (
    TcpInstance,
    instance_from_json,
    instance_to_json,
    is_solution,
    refine,
    residual,
    solution_set_probe,
    solve_enumerate,
)
from tcpkit.tensor import ShapeError

from oracle import MEMBER, NON_MEMBER, grid_tcp_oracle


class TestResidual:
    def test_trivial_zero_solution(self, identity32):
        inst = TcpInstance(orthant(2), np.array([1.0, 1.0]), identity32)
        assert residual(inst, np.zeros(2)) == (0.0, 0.0, 0.0)
        assert is_solution(inst, np.zeros(2), 1e-7)

    def test_e1_analytic_solution(self, e1):
        inst = TcpInstance(orthant(2), np.array([-1.0, -1.0]), e1)
        x = np.array([1.0, 1.0]) / np.sqrt(3)
        assert max(residual(inst, x)) <= 1e-8

    def test_e1_origin_not_solution(self, e1):
        inst = TcpInstance(orthant(2), np.array([-1.0, -1.0]), e1)
        p, d, c = residual(inst, np.zeros(2))
        assert d == pytest.approx(np.sqrt(2.0))
        assert not is_solution(inst, np.zeros(2), 1e-7)

    def test_dim_mismatch(self, e1):
        inst = TcpInstance(orthant(2), np.zeros(2), e1)
        with pytest.raises(ShapeError):
            residual(inst, np.zeros(3))

    def test_general_cone_verification(self):
        K = from_generators([[2.0, 1.0], [1.0, 2.0]])
        A = fx.identity(3, 2)
        inst = TcpInstance(K, np.array([1.0, 1.0]), A)
        assert is_solution(inst, np.zeros(2), 1e-9)


class TestEnumerate:
    def test_identity_unique(self, identity32):
        inst = TcpInstance(orthant(2), np.array([-1.0, -4.0]), identity32)
        out = solve_enumerate(inst)
        assert len(out.solutions) == 1 and not out.unknown
        assert np.allclose(out.solutions[0].x, [1.0, 2.0], atol=1e-9)

    def test_e1_nonneg_q_contains_zero(self, e1):
        inst = TcpInstance(orthant(2), np.array([1.0, 1.0]), e1)
        out = solve_enumerate(inst)
        assert any(np.allclose(s.x, 0.0) for s in out.solutions)

    def test_e1_negative_q_exactly_one(self, e1):
        inst = TcpInstance(orthant(2), np.array([-1.0, -1.0]), e1)
        out = solve_enumerate(inst)
        assert len(out.solutions) == 1
        assert np.allclose(out.solutions[0].x, [0.57735027] * 2, atol=1e-6)

    def test_certified_empty(self, e1):
        inst = TcpInstance(orthant(2), np.array([1.0, -1.0]), e1)
        out = solve_enumerate(inst)
        assert out.solutions == () and not out.unknown

    def test_soundness(self, e1, e4, identity32):
        rng = np.random.default_rng(3)
        for A in (e1, e4, identity32):
            for _ in range(10):
                q = rng.uniform(-2, 2, 2)
                inst = TcpInstance(orthant(2), q, A)
                for s in solve_enumerate(inst).solutions:
                    assert is_solution(inst, s.x, 1e-7)
                    assert s.max_residual <= 1e-7

    def test_sorted_and_deduped(self, e4):
        inst = TcpInstance(orthant(2), np.array([-0.5, -0.5]), e4)
        out = solve_enumerate(inst)
        xs = [tuple(s.x) for s in out.solutions]
        assert xs == sorted(xs)
        for i, a in enumerate(xs):
            for b in xs[i + 1:]:
                assert np.linalg.norm(np.array(a) - np.array(b)) > 1e-6

    def test_non_orthant_rejected(self, identity32):
        K = from_generators([[2.0, 1.0], [1.0, 2.0]])
        with pytest.raises(ValueError):
            solve_enumerate(TcpInstance(K, np.zeros(2), identity32))

    def test_matches_membership(self, e1, e4):
        rng = np.random.default_rng(17)
        for A in (e1, e4):
            for _ in range(15):
                q = rng.uniform(-2, 2, 2)
                out = solve_enumerate(TcpInstance(orthant(2), q, A))
                res = q_membership(A, q)
                if res.member is not None and not out.unknown:
                    assert bool(out.solutions) == res.member

    def test_matches_grid_oracle(self, e1):
        dense = e1.to_dense()
        for q in ([-1.0, -1.0], [1.0, -1.0], [0.5, 0.5], [-2.0, 0.3]):
            verdict, sols = grid_tcp_oracle(dense, q, res=800)
            out = solve_enumerate(TcpInstance(orthant(2), np.array(q), e1))
            if verdict == MEMBER:
                assert out.solutions
                for s in sols:
                    assert min(np.linalg.norm(s - t.x) for t in out.solutions) <= 1e-4
            elif verdict == NON_MEMBER:
                assert not out.solutions and not out.unknown


class TestHomogeneity:
    def test_scaling_law(self, e1, e4, identity32):
        for A, q in [(e1, [-1.0, -1.0]), (identity32, [-1.0, -4.0]),
                     (e4, [-0.5, -1.0])]:
            q = np.array(q)
            base = solve_enumerate(TcpInstance(orthant(2), q, A)).solutions
            for t in (0.25, 4.0):
                scaled = TcpInstance(orthant(2), t * q, A)
                for s in base:
                    xs = t ** (1.0 / (A.order - 1)) * s.x
                    assert max(residual(scaled, xs)) <= 1e-8


class TestRefine:
    def test_converges_to_analytic(self, e1):
        inst = TcpInstance(orthant(2), np.array([-1.0, -1.0]), e1)
        s = refine(inst, [0.5, 0.5])
        assert s.converged
        assert np.allclose(s.x, [1 / np.sqrt(3)] * 2, atol=1e-9)

    def test_fixed_point(self, identity32):
        inst = TcpInstance(orthant(2), np.array([-1.0, -4.0]), identity32)
        s = refine(inst, [1.0, 2.0])
        assert s.converged and np.allclose(s.x, [1.0, 2.0], atol=1e-12)

    def test_far_start(self, identity32):
        inst = TcpInstance(orthant(2), np.array([1.0, 1.0]), identity32)
        s = refine(inst, [10.0, 10.0])
        assert s.converged and np.allclose(s.x, 0.0, atol=1e-9)

    def test_never_false_success(self, e1):
        inst = TcpInstance(orthant(2), np.array([1.0, -1.0]), e1)  # unsolvable
        s = refine(inst, [1.0, 1.0])
        assert not s.converged


class TestProbeAndJson:
    def test_probe_identity(self, identity32):
        inst = TcpInstance(orthant(2), np.array([-1.0, -4.0]), identity32)
        rep = solution_set_probe(inst, radius=5.0, samples=40, seed=2)
        assert rep["count"] == 1
        assert rep["bounded_within"] == pytest.approx(np.sqrt(5.0), abs=1e-6)

    def test_probe_e1(self, e1):
        inst = TcpInstance(orthant(2), np.array([1.0, 1.0]), e1)
        rep = solution_set_probe(inst, radius=5.0, samples=40, seed=2)
        assert rep["count"] == 1  # only the origin

    def test_instance_round_trip(self, e1):
        inst = TcpInstance(orthant(2), np.array([-1.0, 2.0]), e1)
        inst2 = instance_from_json(instance_to_json(inst))
        assert np.array_equal(inst2.q, inst.q)
        assert dict(inst2.A.entries) == dict(inst.A.entries)
        assert inst2.cone.kind == "orthant"

    def test_copositive_existence(self, e1, e4, identity32):
        # copositive fixtures solve for every q accepted by the dual check
        rng = np.random.default_rng(29)
        for A in (e1, e4, identity32):
            for _ in range(12):
                q = rng.uniform(-2, 2, 2)
                if q_in_dual_SA(A, q).status != "holds":
                    continue
                out = solve_enumerate(TcpInstance(orthant(2), q, A))
                assert out.solutions
