"""Complementary tensors, their cones, and right-hand-side membership.

For a tensor A and index subset alpha, the complementary tensor flips the
sign of every entry whose trailing indices all lie in alpha and keeps unit
diagonal entries outside alpha.  The union of the images of the orthant
under all 2^n complementary tensors is exactly the set of right-hand sides
q for which the orthant TCP is solvable; membership is decided by scanning
the per-alpha polynomial systems.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._polysys import SYS_TOL, newton_refine, scan_system
from .classify import SearchBudget, Verdict, _simplex_lattice
from .cones import PolyhedralCone
from .tensor import (
    IndexSet,
    Tensor,
    apply_m1,
    apply_off,
    batch_apply_m1,
    jacobian_m1,
    power_vec,
    principal_subtensor,
    unit_tensor,
)

__all__ = [
    "MembershipResult",
    "complementary_tensor",
    "tpos_contains",
    "q_membership",
    "solution_from_membership",
]

SLACK_TOL = 1e-8


@dataclass(frozen=True)
class MembershipResult:
    member: bool | None  # None = unknown
    alpha: IndexSet | None
    u: np.ndarray | None
    residual: float
    subsets_examined: int

    def to_json(self) -> dict:
        return {
            "member": "unknown" if self.member is None else self.member,
            "alpha": None if self.alpha is None else list(self.alpha.members),
            "u": None if self.u is None else [float(v) for v in self.u],
            "residual": self.residual,
            "subsets_examined": self.subsets_examined,
        }


def complementary_tensor(A: Tensor, alpha: IndexSet | tuple) -> Tensor:
    """Entries: -a where all trailing indices are in alpha; Kronecker deltas
    on indices entirely outside alpha; zero otherwise."""
    if not isinstance(alpha, IndexSet):
        alpha = IndexSet(tuple(alpha), A.dim)
    inside = set(alpha.members)
    m = A.order
    entries: dict[tuple, float] = {}
    if inside:
        for idx, val in A.entries.items():
            if all(i in inside for i in idx[1:]):
                entries[idx] = -val
    for i in range(1, A.dim + 1):
        if i not in inside:
            key = (i,) * m
            entries[key] = entries.get(key, 0.0) + 1.0
    return Tensor(m, A.dim, entries)


def _subsets(n: int):
    """All subsets of {1..n}, increasing cardinality, lexicographic within."""
    for r in range(n + 1):
        yield from itertools.combinations(range(1, n + 1), r)


def tpos_contains(K: PolyhedralCone, A: Tensor, y, budget: SearchBudget | None = None) -> Verdict:
    """Does y lie in {A x^{m-1} : x in K}?

    holds: a witness x with small relative residual was found by multistart
    Gauss-Newton.  fails: the dense normalized-image grid stays separated
    from y-hat by more than the margin.  unknown otherwise.
    """
    budget = budget or SearchBudget()
    y = np.asarray(y, dtype=float)
    yn = float(np.linalg.norm(y))
    used = 0
    if yn <= SYS_TOL:
        return Verdict("tpos-contains", "holds", 0.0, np.zeros(A.dim), used)
    yhat = y / yn

    gens = [np.asarray(g, float) / np.linalg.norm(g) for g in K.generators]
    G = np.column_stack(gens)
    k = len(gens)
    res = max(budget.resolution_for(k), 256) if k <= 2 else budget.resolution_for(k)
    lattice = _simplex_lattice(k, res)
    X = lattice @ G.T
    dense = A.to_dense()
    Z = batch_apply_m1(dense, X)
    zn = np.linalg.norm(Z, axis=1)
    used += len(zn)
    ok = zn > 1e-12
    sep = math.inf
    if np.any(ok):
        D = np.linalg.norm(Z[ok] / zn[ok, None] - yhat, axis=1)
        sep = float(D.min())

    # polish the most promising directions into exact preimages
    m = A.order
    order = np.argsort(np.linalg.norm(Z - yhat * zn[:, None], axis=1), kind="stable")
    tol = budget.margin * max(1.0, yn)
    for i in order[: budget.multistarts]:
        if zn[i] <= 1e-12:
            continue
        t = (yn / zn[i]) ** (1.0 / (m - 1))
        x0 = t * X[int(i)]
        x, r = _gauss_newton_preimage(A, y, G, x0, budget.polish_iters)
        used += budget.polish_iters
        if r <= tol:
            return Verdict("tpos-contains", "holds", r, x, used)
        z = apply_m1(A, x)
        znorm = float(np.linalg.norm(z))
        if znorm > 1e-12:
            sep = min(sep, float(np.linalg.norm(z / znorm - yhat)))
    if sep > budget.margin:
        return Verdict("tpos-contains", "fails", sep, None, used,
                       note="separation on the normalized image grid")
    return Verdict("tpos-contains", "unknown", sep, None, used)


def _gauss_newton_preimage(A: Tensor, y: np.ndarray, G: np.ndarray,
                           x0: np.ndarray, iters: int):
    """Levenberg-style Gauss-Newton on ||A x^{m-1} - y||, x = G lam, lam >= 0."""
    # solve in lam-space so general cones reduce to a clamp
    lam = np.maximum(np.linalg.lstsq(G, x0, rcond=None)[0], 0.0)
    x = G @ lam
    r = apply_m1(A, x) - y
    rn = float(np.linalg.norm(r))
    mu = 1e-8
    for _ in range(iters):
        if rn <= 1e-14:
            break
        J = jacobian_m1(A, x) @ G
        H = J.T @ J + mu * np.eye(J.shape[1])
        try:
            d = np.linalg.solve(H, -J.T @ r)
        except np.linalg.LinAlgError:
            break
        moved = False
        t = 1.0
        while t > 1e-14:
            ln = np.maximum(lam + t * d, 0.0)
            xn = G @ ln
            rnew = apply_m1(A, xn) - y
            rnn = float(np.linalg.norm(rnew))
            if rnn < rn:
                lam, x, r, rn = ln, xn, rnew, rnn
                mu = max(mu * 0.3, 1e-12)
                moved = True
                break
            t *= 0.5
        if not moved:
            mu *= 10.0
            if mu > 1e6:
                break
    return x, rn


def q_membership(A: Tensor, q, budget: SearchBudget | None = None) -> MembershipResult:
    """Decide q in Q(R^n_+, A) by scanning supports in increasing cardinality.

    member=True comes with (alpha, u) reconstructing a verified solution;
    member=False only when every subset's system is certified infeasible
    (or feasible for the system but certified to violate the slack);
    otherwise unknown.
    """
    budget = budget or SearchBudget()
    q = np.asarray(q, dtype=float)
    n = A.dim
    if n > 12:
        raise ValueError("membership scan limited to dim <= 12")
    examined = 0
    any_inconclusive = False
    for alpha in _subsets(n):
        examined += 1
        iset = IndexSet(alpha, n)
        if len(alpha) == 0:
            if np.all(q >= -SLACK_TOL):
                u = power_vec(np.maximum(q, 0.0), 1.0 / (A.order - 1))
                return MembershipResult(True, iset, u, 0.0, examined)
            continue
        sub = principal_subtensor(A, iset)
        scan = scan_system(sub, q[[i - 1 for i in alpha]],
                           multistarts=budget.multistarts, want_all=True)
        found = None
        for u_a in scan.roots:
            slack = _slack(A, iset, u_a, q)
            if slack is None or np.all(slack >= -SLACK_TOL):
                found = (u_a, slack)
                break
        if found is not None:
            u_a, slack = found
            u = np.zeros(n)
            for kpos, i in enumerate(alpha):
                u[i - 1] = u_a[kpos]
            if slack is not None:
                for kpos, i in enumerate(iset.complement):
                    u[i - 1] = max(slack[kpos], 0.0) ** (1.0 / (A.order - 1))
            resid = _system_residual(A, iset, u_a, q)
            return MembershipResult(True, iset, u, resid, examined)
        if scan.roots and scan.roots_complete and not scan.inconclusive:
            pass  # every root of this alpha provably fails the slack test
        elif scan.roots and not scan.inconclusive and not scan.certified_infeasible:
            # system solvable but every root failed the slack test; the root
            # list is not certified complete, so stay agnostic for this alpha
            any_inconclusive = True
        elif not scan.certified_infeasible:
            any_inconclusive = True
    if any_inconclusive:
        return MembershipResult(None, None, None, math.inf, examined)
    return MembershipResult(False, None, None, math.inf, examined)


def _slack(A: Tensor, alpha: IndexSet, u_a: np.ndarray, q: np.ndarray):
    comp = alpha.complement
    if not comp:
        return None
    off = apply_off(A, alpha, u_a)
    return off + q[[i - 1 for i in comp]]


def _system_residual(A: Tensor, alpha: IndexSet, u_a: np.ndarray, q: np.ndarray) -> float:
    sub = principal_subtensor(A, alpha)
    return float(np.linalg.norm(apply_m1(sub, u_a) + q[[i - 1 for i in alpha.members]]))


def solution_from_membership(result: MembershipResult, A: Tensor, q) -> np.ndarray:
    """Reconstruct x = (u_alpha, 0) from a member result."""
    if result.member is not True:
        raise ValueError("no solution to reconstruct: result is not a member")
    q = np.asarray(q, dtype=float)
    x = np.zeros(A.dim)
    for i in result.alpha.members:
        x[i - 1] = result.u[i - 1]
    # one Newton touch-up keeps the reconstruction at solver tolerance
    if len(result.alpha) > 0:
        sub = principal_subtensor(A, result.alpha)
        u_a = np.array([result.u[i - 1] for i in result.alpha.members])
        u_ref, _ = newton_refine(sub, q[[i - 1 for i in result.alpha.members]], u_a)
        for kpos, i in enumerate(result.alpha.members):
            x[i - 1] = u_ref[kpos]
    return x
