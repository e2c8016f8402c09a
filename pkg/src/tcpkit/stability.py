"""Empirical probes for solution-set topology and solution stability.

Everything here is a seeded experiment: perturbations are drawn from a
splitmix64 stream, reports echo their full configuration, and repeated runs
with the same seed are bit-identical.  The probes estimate the existential
constants (solvability radius, error-bound constant) empirically; they
never claim exact values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import SplitMix64
from .classify import (
    SearchBudget,
    Verdict,
    _project_simplex,
    _simplex_lattice,
    is_copositive,
    is_K_nonsingular,
    is_K_regular,
    q_in_dual_SA,
)
from .compcones import complementary_tensor, q_membership
from .cones import PolyhedralCone, extreme_rays, from_generators, orthant, tangent_cone
from .solver import TcpInstance, is_solution, refine, residual, solve_enumerate
from .tensor import (
    IndexSet,
    Tensor,
    apply_m2,
    is_subsymmetric,
    tensor_from_dense,
    unit_tensor,
)

__all__ = [
    "PerturbationReport",
    "local_uniqueness_certificate",
    "perturb_existence",
    "error_bound_probe",
    "usc_probe",
    "graph_closedness_probe",
    "unsolvable_neighborhood_probe",
    "nonsingularity_openness_probe",
]


@dataclass(frozen=True)
class PerturbationReport:
    trials: int
    eps: float
    seed: int
    solvable_fraction: float
    max_solution_norm: float
    error_ratio_max: float
    failures: tuple = ()
    resamples: int = 0
    note: str = ""

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "eps": self.eps,
            "seed": self.seed,
            "solvable_fraction": self.solvable_fraction,
            "max_solution_norm": self.max_solution_norm,
            "error_ratio_max": self.error_ratio_max,
            "failures": list(self.failures),
            "resamples": self.resamples,
            "note": self.note,
        }


def _draw_perturbation(rng: SplitMix64, n: int, shape: tuple, eps: float):
    """(dq, dA) on a random ray, with ||dq|| + ||dA||_F = eps * U(0,1)."""
    size = n + int(np.prod(shape))
    if eps == 0.0:
        return np.zeros(n), np.zeros(shape)
    direction = np.array(rng.on_sphere(size))
    dq = direction[:n]
    dA = direction[n:].reshape(shape)
    total = float(np.linalg.norm(dq) + np.linalg.norm(dA))
    scale = eps * rng.uniform() / total
    return dq * scale, dA * scale


def _perturbed_tensor(A: Tensor, dA: np.ndarray) -> Tensor:
    return tensor_from_dense(A.to_dense() + dA)


def local_uniqueness_certificate(inst: TcpInstance, xbar,
                                 budget: SearchBudget | None = None) -> Verdict:
    """Second-order sufficient condition for local uniqueness of xbar.

    Minimizes v^T (A xbar^{m-2}) v over unit directions in the tangent cone
    of K at xbar that annihilate w.  A strictly positive minimum certifies
    local uniqueness; an empty feasible slice certifies it vacuously.
    """
    budget = budget or SearchBudget()
    xbar = np.asarray(xbar, dtype=float)
    if not is_solution(inst, xbar, 1e-6):
        raise ValueError("xbar is not a solution at tolerance 1e-6")
    note = ""
    if not is_subsymmetric(inst.A):
        note = "tensor is not sub-symmetric; the sufficient condition assumes it"

    M = apply_m2(inst.A, xbar)
    Msym = 0.5 * (M + M.T)
    n = inst.A.dim
    T = tangent_cone(inst.cone, xbar, tol=1e-8)
    rows = list(T.inequalities)
    w = inst.w_of(xbar)
    if float(np.linalg.norm(w)) > 1e-10:
        rows.extend([w, -w])

    if not rows:
        # feasible slice is the whole unit sphere: exact eigen-solve
        vals, vecs = np.linalg.eigh(Msym)
        cert = float(vals[0])
        witness = vecs[:, 0]
        status = "holds" if cert > budget.margin else ("fails" if cert <= 0 else "unknown")
        return Verdict("local-uniqueness", status, cert,
                       witness if status == "fails" else witness, 1, note=note)

    rays = extreme_rays(rows, n)
    if not rays:
        return Verdict("local-uniqueness", "holds", None, None, 1,
                       note=(note + "; " if note else "") + "empty unit slice")

    R = np.column_stack(rays)

    def rayleigh(lam):
        v = R @ lam
        nv = float(np.dot(v, v))
        if nv <= 1e-20:
            return math.inf, v
        return float(v @ Msym @ v) / nv, v

    k = R.shape[1]
    res = budget.resolution_for(k)
    lattice = _simplex_lattice(k, res)
    best_val, best_v, best_lam = math.inf, None, None
    for lam in lattice:
        val, v = rayleigh(lam)
        if val < best_val:
            best_val, best_v, best_lam = val, v, lam
    evals = len(lattice)

    lam = np.asarray(best_lam, dtype=float)
    step = 1.0
    f, v = rayleigh(lam)
    for _ in range(budget.polish_iters):
        nv = float(np.dot(v, v))
        g = R.T @ (2.0 * (Msym @ v - f * v) / nv)
        gn = float(np.linalg.norm(g))
        if gn <= 1e-14:
            break
        t = step
        moved = False
        for _ in range(30):
            cand = _project_simplex(lam - t * g)
            fc, vc = rayleigh(cand)
            evals += 1
            if fc < f:
                lam, f, v = cand, fc, vc
                step = min(2 * t, 1e6)
                moved = True
                break
            t *= 0.5
        if not moved:
            break
    if f < best_val:
        best_val, best_v = f, v

    witness = best_v / np.linalg.norm(best_v)
    if best_val > budget.margin:
        return Verdict("local-uniqueness", "holds", best_val, witness, evals, note=note)
    if best_val <= 0.0:
        return Verdict("local-uniqueness", "fails", best_val, witness, evals, note=note)
    return Verdict("local-uniqueness", "unknown", best_val, witness, evals, note=note)


def perturb_existence(inst: TcpInstance, eps: float, trials: int, seed: int,
                      budget: SearchBudget | None = None,
                      xbar=None) -> PerturbationReport:
    """Solvability of TCPs near a copositive base instance.

    Perturbations that break copositivity are redrawn (up to 100 times per
    trial, then shifted by eps times the unit tensor, which adds the sum of
    m-th powers to the polynomial)."""
    budget = budget or SearchBudget()
    if not inst.cone.is_orthant:
        raise ValueError("perturb_existence requires the orthant")
    base_cop = is_copositive(inst.A, budget)
    if base_cop.status != "holds":
        raise ValueError("base tensor is not certified copositive")
    dual_chk = q_in_dual_SA(inst.A, inst.q, budget)
    if dual_chk.status != "holds":
        raise ValueError("base q fails the dual-of-S_A necessary condition")

    rng = SplitMix64(seed)
    n = inst.A.dim
    shape = (n,) * inst.A.order
    solvable = 0
    max_norm = 0.0
    failures: list[int] = []
    resamples = 0
    for t in range(trials):
        trial_rng = rng.spawn(t + 1)
        dq, dA = _draw_perturbation(trial_rng, n, shape, eps)
        At = _perturbed_tensor(inst.A, dA)
        redraws = 0
        while is_copositive(At, budget).status != "holds" and redraws < 100:
            dq, dA = _draw_perturbation(trial_rng, n, shape, eps)
            At = _perturbed_tensor(inst.A, dA)
            redraws += 1
        if redraws >= 100:
            At = At + unit_tensor(inst.A.order, n).scale(eps)
        resamples += redraws
        pert = TcpInstance(inst.cone, inst.q + dq, At)
        outcome = solve_enumerate(pert, budget)
        norms = [float(np.linalg.norm(s.x)) for s in outcome.solutions]
        if not norms and xbar is not None:
            s = refine(pert, np.asarray(xbar, dtype=float))
            if s.converged:
                norms.append(float(np.linalg.norm(s.x)))
        if norms:
            solvable += 1
            max_norm = max(max_norm, max(norms))
        else:
            failures.append(t)
    return PerturbationReport(
        trials=trials, eps=eps, seed=seed,
        solvable_fraction=solvable / trials if trials else 1.0,
        max_solution_norm=max_norm,
        error_ratio_max=0.0,
        failures=tuple(failures),
        resamples=resamples,
    )


def error_bound_probe(inst: TcpInstance, xbar, neighborhood_radius: float,
                      eps: float, trials: int, seed: int,
                      budget: SearchBudget | None = None) -> PerturbationReport:
    """Estimate the local error-bound constant at an isolated solution."""
    budget = budget or SearchBudget()
    xbar = np.asarray(xbar, dtype=float)
    cert = local_uniqueness_certificate(inst, xbar, budget)
    if cert.status != "holds":
        raise ValueError("local uniqueness certificate does not hold at xbar")

    rng = SplitMix64(seed)
    n = inst.A.dim
    shape = (n,) * inst.A.order
    ratio_max = 0.0
    solvable = 0
    max_norm = 0.0
    failures: list[int] = []
    skipped = 0
    for t in range(trials):
        trial_rng = rng.spawn(t + 1)
        dq, dA = _draw_perturbation(trial_rng, n, shape, eps)
        denom = float(np.linalg.norm(dq) + np.linalg.norm(dA))
        pert = TcpInstance(inst.cone, inst.q + dq, _perturbed_tensor(inst.A, dA))
        sols = []
        starts = [xbar] + [
            xbar + 0.1 * neighborhood_radius * np.array(trial_rng.on_sphere(n))
            for _ in range(4)
        ]
        for x0 in starts:
            s = refine(pert, x0)
            if s.converged and float(np.linalg.norm(s.x - xbar)) <= neighborhood_radius:
                sols.append(s.x)
        if not sols:
            failures.append(t)
            continue
        solvable += 1
        max_norm = max(max_norm, max(float(np.linalg.norm(x)) for x in sols))
        if denom < 1e-12:
            skipped += 1
            continue
        ratio = max(float(np.linalg.norm(x - xbar)) for x in sols) / denom
        ratio_max = max(ratio_max, ratio)
    return PerturbationReport(
        trials=trials, eps=eps, seed=seed,
        solvable_fraction=solvable / trials if trials else 1.0,
        max_solution_norm=max_norm,
        error_ratio_max=ratio_max,
        failures=tuple(failures),
        note=f"skipped {skipped} zero-perturbation trials" if skipped else "",
    )


def usc_probe(inst: TcpInstance, eps: float, trials: int, seed: int,
              budget: SearchBudget | None = None) -> dict:
    """Upper-semicontinuity probe: how far can perturbed solutions drift
    from the base solution set."""
    budget = budget or SearchBudget()
    reg = is_K_regular(inst.A, inst.cone, budget)
    if reg.status != "holds":
        raise ValueError("base tensor is not certified K-regular")
    base = solve_enumerate(inst, budget)
    base_pts = [s.x for s in base.solutions]
    rng = SplitMix64(seed)
    n = inst.A.dim
    shape = (n,) * inst.A.order
    max_exc = 0.0
    unsolved = 0
    for t in range(trials):
        trial_rng = rng.spawn(t + 1)
        dq, dA = _draw_perturbation(trial_rng, n, shape, eps)
        pert = TcpInstance(inst.cone, inst.q + dq, _perturbed_tensor(inst.A, dA))
        outcome = solve_enumerate(pert, budget)
        if not outcome.solutions:
            unsolved += 1
            continue
        for s in outcome.solutions:
            d = min((float(np.linalg.norm(s.x - b)) for b in base_pts),
                    default=math.inf)
            max_exc = max(max_exc, d)
    return {
        "max_excursion": max_exc,
        "eps": eps,
        "trials": trials,
        "seed": seed,
        "base_solution_count": len(base_pts),
        "unsolved_trials": unsolved,
    }


def graph_closedness_probe(sequence, limit) -> bool:
    """Check a converging sequence of solutions against its limit.

    sequence: iterable of (TcpInstance, x) with every x a solution of its
    own instance at 1e-7; limit: (TcpInstance, x).  The limit tolerance
    grows with the residual of the tail of the sequence evaluated on the
    limit instance.
    """
    seq = list(sequence)
    if not seq:
        raise ValueError("empty sequence")
    for inst_l, x_l in seq:
        if not is_solution(inst_l, x_l, 1e-7):
            raise ValueError("sequence member is not a solution of its instance")
    lim_inst, lim_x = limit
    tail_inst, tail_x = seq[-1]
    tail_res = max(residual(lim_inst, np.asarray(tail_x, dtype=float)))
    tol_growth = max(1e-7, 10.0 * tail_res)
    return is_solution(lim_inst, lim_x, tol_growth)


def unsolvable_neighborhood_probe(A: Tensor, q, eps: float, trials: int, seed: int,
                                  budget: SearchBudget | None = None) -> dict:
    """Persistence of unsolvability under small right-hand-side changes."""
    budget = budget or SearchBudget()
    q = np.asarray(q, dtype=float)
    base = q_membership(A, q, budget)
    if base.member is not False:
        raise ValueError("probe requires a q certified as a non-member")
    warn = ""
    for r in range(1, A.dim + 1):
        import itertools as _it

        for alpha in _it.combinations(range(1, A.dim + 1), r):
            comp = complementary_tensor(A, IndexSet(alpha, A.dim))
            if is_K_nonsingular(comp, orthant(A.dim), budget).status != "holds":
                warn = ("closedness sufficient condition unverified for some "
                        "complementary tensors; result is empirical only")
                break
        if warn:
            break
    rng = SplitMix64(seed)
    n = A.dim
    unsolvable = 0
    unknowns = 0
    for t in range(trials):
        trial_rng = rng.spawn(t + 1)
        if eps == 0.0:
            dq = np.zeros(n)
        else:
            dq = eps * trial_rng.uniform() * np.array(trial_rng.on_sphere(n))
        res = q_membership(A, q + dq, budget)
        if res.member is False:
            unsolvable += 1
        elif res.member is None:
            unknowns += 1
    return {
        "fraction_unsolvable": unsolvable / trials if trials else 1.0,
        "unknown_trials": unknowns,
        "eps": eps,
        "trials": trials,
        "seed": seed,
        "note": warn,
    }


def nonsingularity_openness_probe(K: PolyhedralCone, A: Tensor, eps: float,
                                  trials: int, seed: int,
                                  budget: SearchBudget | None = None) -> dict:
    """Persistence of K-nonsingularity under tensor (and cone) jitter."""
    budget = budget or SearchBudget()
    base = is_K_nonsingular(A, K, budget)
    if base.status != "holds":
        raise ValueError("base tensor is not certified K-nonsingular")
    rng = SplitMix64(seed)
    n = A.dim
    shape = (n,) * A.order
    nonsingular = 0
    for t in range(trials):
        trial_rng = rng.spawn(t + 1)
        if eps == 0.0:
            dA = np.zeros(shape)
            Kp = K
        else:
            flat = np.array(trial_rng.on_sphere(int(np.prod(shape))))
            dA = (eps * trial_rng.uniform()) * flat.reshape(shape)
            if K.is_orthant:
                Kp = K
            else:
                gens = [g + eps * trial_rng.uniform(-1.0, 1.0) *
                        np.array(trial_rng.on_sphere(n)) for g in K.generators]
                Kp = from_generators(gens)
        if is_K_nonsingular(_perturbed_tensor(A, dA), Kp, budget).status == "holds":
            nonsingular += 1
    return {
        "fraction_nonsingular": nonsingular / trials if trials else 1.0,
        "eps": eps,
        "trials": trials,
        "seed": seed,
    }
