"""Solving and verifying TCP(K, q, A).

Verification (residual triple, is_solution) works for any polyhedral cone;
the enumeration solver is orthant-only, walking the 2^n complementarity
supports and collecting every root the per-support search finds.  Local
refinement is a semismooth Newton method on the componentwise min-map.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from ._polysys import SYS_TOL, scan_system
from ._rng import SplitMix64
from .classify import SearchBudget
from .cones import PolyhedralCone, cone_from_json, cone_to_json, contains, dist, dual
from .tensor import (
    IndexSet,
    ShapeError,
    Tensor,
    apply_m1,
    apply_off,
    jacobian_m1,
    principal_subtensor,
    tensor_from_json,
    tensor_to_json,
)

__all__ = [
    "TcpInstance",
    "TcpSolution",
    "residual",
    "is_solution",
    "solve_enumerate",
    "EnumerationOutcome",
    "refine",
    "solution_set_probe",
    "instance_to_json",
    "instance_from_json",
]

_DEDUP_DIST = 1e-6
_SUPPORT_TOL = 1e-7


@dataclass(frozen=True)
class TcpInstance:
    cone: PolyhedralCone
    q: np.ndarray
    A: Tensor

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.shape != (self.A.dim,) or self.cone.dim != self.A.dim:
            raise ShapeError("cone, q and tensor dimensions disagree")
        object.__setattr__(self, "q", q)

    def w_of(self, x) -> np.ndarray:
        return apply_m1(self.A, x) + self.q


@dataclass(frozen=True)
class TcpSolution:
    x: np.ndarray
    w: np.ndarray
    primal_dist: float
    dual_dist: float
    comp_gap: float
    alpha: IndexSet
    converged: bool = True

    @property
    def max_residual(self) -> float:
        return max(self.primal_dist, self.dual_dist, self.comp_gap)

    def to_json(self) -> dict:
        return {
            "x": [float(v) for v in self.x],
            "w": [float(v) for v in self.w],
            "primal_dist": self.primal_dist,
            "dual_dist": self.dual_dist,
            "comp_gap": self.comp_gap,
            "alpha": list(self.alpha.members),
            "converged": self.converged,
        }


def residual(inst: TcpInstance, x) -> tuple[float, float, float]:
    """(dist(x, K), dist(w, K*), |<x, w>|) for w = A x^{m-1} + q."""
    x = np.asarray(x, dtype=float)
    if x.shape != (inst.A.dim,):
        raise ShapeError("candidate point has wrong dimension")
    w = inst.w_of(x)
    return (
        dist(inst.cone, x),
        dist(dual(inst.cone), w),
        abs(float(np.dot(x, w))),
    )


def is_solution(inst: TcpInstance, x, tol: float) -> bool:
    return all(r <= tol for r in residual(inst, x))


def _make_solution(inst: TcpInstance, x: np.ndarray, converged: bool = True) -> TcpSolution:
    p, d, c = residual(inst, x)
    support = tuple(i + 1 for i in range(len(x)) if x[i] > _SUPPORT_TOL)
    return TcpSolution(
        x=np.asarray(x, dtype=float),
        w=inst.w_of(x),
        primal_dist=p,
        dual_dist=d,
        comp_gap=c,
        alpha=IndexSet(support, inst.A.dim),
        converged=converged,
    )


@dataclass(frozen=True)
class EnumerationOutcome:
    solutions: tuple
    unknown: bool  # some support scan was inconclusive and nothing was found there


def solve_enumerate(inst: TcpInstance, budget: SearchBudget | None = None) -> EnumerationOutcome:
    """All solutions found by complementary-support enumeration (orthant only).

    Solutions are deduplicated at distance 1e-6 and sorted lexicographically
    by x.  The unknown flag is set when at least one support system could
    not be certified infeasible and yielded nothing.
    """
    if not inst.cone.is_orthant:
        raise ValueError("enumeration solver requires the nonnegative orthant")
    n = inst.A.dim
    if n > 12:
        raise ValueError("enumeration limited to dim <= 12")
    budget = budget or SearchBudget()
    sols: list[np.ndarray] = []
    unknown = False
    for r in range(0, n + 1):
        for alpha in itertools.combinations(range(1, n + 1), r):
            iset = IndexSet(alpha, n)
            if r == 0:
                if np.all(inst.q >= -SYS_TOL):
                    sols.append(np.zeros(n))
                continue
            sub = principal_subtensor(inst.A, iset)
            scan = scan_system(sub, inst.q[[i - 1 for i in alpha]],
                               multistarts=budget.multistarts, want_all=True)
            if scan.inconclusive:
                unknown = True
            for u_a in scan.roots:
                x = np.zeros(n)
                for kpos, i in enumerate(alpha):
                    x[i - 1] = u_a[kpos]
                if r < n:
                    slack = apply_off(inst.A, iset, u_a) + inst.q[[i - 1 for i in iset.complement]]
                    if np.any(slack < -1e-8):
                        continue
                if is_solution(inst, x, _SUPPORT_TOL):
                    sols.append(x)
    deduped: list[np.ndarray] = []
    for x in sorted(sols, key=lambda v: tuple(v)):
        if all(np.linalg.norm(x - y) > _DEDUP_DIST for y in deduped):
            deduped.append(x)
    found = tuple(_make_solution(inst, x) for x in deduped)
    return EnumerationOutcome(found, unknown and not found)


def refine(inst: TcpInstance, x0, iters: int = 80) -> TcpSolution:
    """Semismooth Newton on the min-map Phi(x) = min(x, A x^{m-1} + q).

    Returns a TcpSolution with converged=False (never a false success) when
    the iteration stalls above residual 1e-9.
    """
    if not inst.cone.is_orthant:
        raise ValueError("min-map refinement requires the nonnegative orthant")
    n = inst.A.dim
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (n,):
        raise ShapeError("starting point has wrong dimension")

    def phi(v):
        return np.minimum(v, inst.w_of(v))

    p = phi(x)
    merit = float(np.linalg.norm(p))
    for _ in range(iters):
        if merit <= 1e-12:
            break
        Jf = jacobian_m1(inst.A, x)
        w = inst.w_of(x)
        J = np.empty((n, n))
        for i in range(n):
            if x[i] <= w[i]:
                J[i] = np.eye(n)[i]
            else:
                J[i] = Jf[i]
        try:
            d = np.linalg.solve(J, -p)
        except np.linalg.LinAlgError:
            d = np.linalg.lstsq(J, -p, rcond=None)[0]
        if not np.all(np.isfinite(d)):
            break
        t = 1.0
        moved = False
        while t > 1e-14:
            xn = x + t * d
            pn = phi(xn)
            mn = float(np.linalg.norm(pn))
            if mn < merit * (1.0 - 1e-4 * t) or mn <= 1e-12:
                x, p, merit = xn, pn, mn
                moved = True
                break
            t *= 0.5
        if not moved:
            break
    x = np.maximum(x, 0.0)
    ok = is_solution(inst, x, 1e-9)
    return _make_solution(inst, x, converged=ok)


def solution_set_probe(inst: TcpInstance, radius: float, samples: int, seed: int,
                       budget: SearchBudget | None = None) -> dict:
    """Empirical boundedness probe: enumeration plus multistart refinement
    from random starts in [0, radius]^n."""
    outcome = solve_enumerate(inst, budget)
    found = [s.x for s in outcome.solutions]
    rng = SplitMix64(seed)
    n = inst.A.dim
    for _ in range(samples):
        x0 = np.array([rng.uniform(0.0, radius) for _ in range(n)])
        sol = refine(inst, x0)
        if sol.converged and all(np.linalg.norm(sol.x - y) > _DEDUP_DIST for y in found):
            found.append(sol.x)
    max_norm = max((float(np.linalg.norm(x)) for x in found), default=0.0)
    return {
        "count": len(found),
        "bounded_within": max_norm,
        "enumeration_unknown": outcome.unknown,
        "radius": radius,
        "samples": samples,
        "seed": seed,
    }


def instance_to_json(inst: TcpInstance) -> dict:
    return {
        "cone": cone_to_json(inst.cone),
        "q": [float(v) for v in inst.q],
        "tensor": tensor_to_json(inst.A),
    }


def instance_from_json(obj: dict) -> TcpInstance:
    return TcpInstance(
        cone=cone_from_json(obj["cone"]),
        q=np.asarray(obj["q"], dtype=float),
        A=tensor_from_json(obj["tensor"]),
    )
