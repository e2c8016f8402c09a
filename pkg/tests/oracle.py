"""Independent brute-force TCP oracle for m=3, n=2 orthant instances.

Deliberately avoids the library's solver and membership code paths: dense
einsum evaluation of the min-map over a lattice, plus its own damped Newton
refinement.  Used to cross-check q_membership and solve_enumerate.
"""

from functools import lru_cache

import numpy as np

MEMBER = "member"
NON_MEMBER = "non-member"
UNKNOWN = "unknown"


def _w(dense, q, X):
    # specialized m=3, n=2 quadratic evaluation (much faster than einsum on
    # multi-million-point lattices)
    x1, x2 = X[:, 0], X[:, 1]
    p11, p12, p22 = x1 * x1, x1 * x2, x2 * x2
    a = dense
    w1 = a[0, 0, 0] * p11 + (a[0, 0, 1] + a[0, 1, 0]) * p12 \
        + a[0, 1, 1] * p22 + q[0]
    w2 = a[1, 0, 0] * p11 + (a[1, 0, 1] + a[1, 1, 0]) * p12 \
        + a[1, 1, 1] * p22 + q[1]
    return np.column_stack([w1, w2])


def _minmap_merit(dense, q, X):
    return np.abs(np.minimum(X, _w(dense, q, X))).max(axis=1)


@lru_cache(maxsize=8)
def _lattice(box, res):
    ax = np.linspace(0.0, box, res)
    g = np.meshgrid(ax, ax, indexing="ij")
    return np.column_stack([m.ravel() for m in g])


def _newton(dense, q, x0, iters=60):
    x = np.maximum(np.array(x0, dtype=float), 0.0)
    for _ in range(iters):
        w = _w(dense, q, x[None, :])[0]
        phi = np.minimum(x, w)
        r = np.abs(phi).max()
        if r <= 1e-12:
            break
        Jf = (np.einsum("ijk,k->ij", dense, x)
              + np.einsum("ikj,k->ij", dense, x))
        J = np.where((x <= w)[:, None], np.eye(2), Jf)
        try:
            d = np.linalg.solve(J, -phi)
        except np.linalg.LinAlgError:
            d = np.linalg.lstsq(J, -phi, rcond=None)[0]
        t, moved = 1.0, False
        base = np.linalg.norm(phi)
        while t > 1e-14:
            xn = x + t * d
            wn = _w(dense, q, xn[None, :])[0]
            if np.linalg.norm(np.minimum(xn, wn)) < base:
                x, moved = xn, True
                break
            t *= 0.5
        if not moved:
            break
    return np.maximum(x, 0.0)


def _passes(dense, q, x, tol=1e-7):
    w = _w(dense, q, x[None, :])[0]
    return (x.min() >= -tol and w.min() >= -tol
            and abs(float(np.dot(x, w))) <= tol)


def _refine_best(dense, q, X, merits, k=40):
    order = np.argsort(merits, kind="stable")[:k]
    sols = []
    for i in order:
        x = _newton(dense, q, X[int(i)])
        if _passes(dense, q, x) and all(
                np.linalg.norm(x - s) > 1e-4 for s in sols):
            sols.append(x)
    return sols


def grid_tcp_oracle(dense, q, box=8.0, res=2000, tau=0.05):
    """Returns (verdict, solutions).  verdict in {member, non-member, unknown}.

    Two stages: a coarse pass that settles most member cases cheaply, then
    the full lattice.  non-member requires the min-map merit to stay above
    tau on the fine grid over [0, box]^2 and on a coarse wide grid over
    [0, 5*box]^2.
    """
    q = np.asarray(q, dtype=float)
    ax0 = np.linspace(0.0, box, max(res // 5, 100))
    X0 = np.column_stack([m.ravel() for m in np.meshgrid(ax0, ax0, indexing="ij")])
    sols = _refine_best(dense, q, X0, _minmap_merit(dense, q, X0))
    if sols:
        return MEMBER, sols
    ax = np.linspace(0.0, box, res)
    X = np.column_stack([m.ravel() for m in np.meshgrid(ax, ax, indexing="ij")])
    merits = _minmap_merit(dense, q, X)
    sols = _refine_best(dense, q, X, merits)
    if sols:
        return MEMBER, sols
    gmin = float(merits.min())
    ax2 = np.linspace(0.0, 5 * box, 600)
    X2 = np.column_stack([m.ravel() for m in np.meshgrid(ax2, ax2, indexing="ij")])
    gmin_wide = float(_minmap_merit(dense, q, X2).min())
    if gmin > tau and gmin_wide > tau:
        return NON_MEMBER, []
    return UNKNOWN, []
