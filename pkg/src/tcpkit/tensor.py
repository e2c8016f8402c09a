"""Square real tensors of order m and dimension n, stored sparsely.

Indices are 1-based throughout, matching the JSON interchange format
``{"order": m, "dim": n, "entries": [{"idx": [i1, ..., im], "val": v}]}``.
A zero stored value is equivalent to an absent entry.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "Tensor",
    "IndexSet",
    "ShapeError",
    "apply_m1",
    "apply_m",
    "apply_m2",
    "jacobian_m1",
    "unit_tensor",
    "principal_subtensor",
    "apply_off",
    "power_vec",
    "is_symmetric",
    "is_subsymmetric",
    "frobenius_distance",
    "tensor_from_dense",
    "tensor_to_json",
    "tensor_from_json",
    "batch_apply_m1",
]

# Above this entry count, contractions switch to compensated summation.
_FSUM_THRESHOLD = 10_000


class ShapeError(ValueError):
    """Dimension or order mismatch between tensors/vectors."""


def _validate_entries(order: int, dim: int, entries: Mapping[tuple, float]) -> dict:
    clean: dict[tuple, float] = {}
    for idx, val in entries.items():
        idx = tuple(int(i) for i in idx)
        if len(idx) != order:
            raise ShapeError(f"index {idx} has length {len(idx)}, expected {order}")
        if any(i < 1 or i > dim for i in idx):
            raise ShapeError(f"index {idx} out of range 1..{dim}")
        val = float(val)
        if not math.isfinite(val):
            raise ValueError(f"non-finite entry at {idx}: {val}")
        if val != 0.0:
            clean[idx] = val
    return clean


@dataclass(frozen=True)
class Tensor:
    """Immutable m-th order, n-dimensional real square tensor."""

    order: int
    dim: int
    entries: Mapping[tuple, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.order < 2:
            raise ValueError(f"order must be >= 2, got {self.order}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        clean = _validate_entries(self.order, self.dim, self.entries)
        object.__setattr__(self, "entries", MappingProxyType(clean))

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def to_dense(self) -> np.ndarray:
        """Dense ndarray of shape (n,) * m (0-based axes)."""
        out = np.zeros((self.dim,) * self.order)
        for idx, val in self.entries.items():
            out[tuple(i - 1 for i in idx)] = val
        return out

    def scale(self, t: float) -> "Tensor":
        return Tensor(self.order, self.dim, {k: t * v for k, v in self.entries.items()})

    def __add__(self, other: "Tensor") -> "Tensor":
        if (self.order, self.dim) != (other.order, other.dim):
            raise ShapeError("tensor shapes differ")
        merged = dict(self.entries)
        for k, v in other.entries.items():
            merged[k] = merged.get(k, 0.0) + v
        return Tensor(self.order, self.dim, merged)

    def __repr__(self) -> str:
        return f"Tensor(order={self.order}, dim={self.dim}, nnz={self.nnz})"


@dataclass(frozen=True)
class IndexSet:
    """Sorted, duplicate-free subset of {1, ..., n}."""

    members: tuple
    n: int

    def __post_init__(self):
        mem = tuple(sorted(set(int(i) for i in self.members)))
        if any(i < 1 or i > self.n for i in mem):
            raise ValueError(f"members {mem} not within 1..{self.n}")
        object.__setattr__(self, "members", mem)

    @property
    def complement(self) -> tuple:
        inside = set(self.members)
        return tuple(i for i in range(1, self.n + 1) if i not in inside)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, i) -> bool:
        return i in self.members


def _check_vec(A: Tensor, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (A.dim,):
        raise ShapeError(f"vector of shape {x.shape} incompatible with dim {A.dim}")
    return x


def _accumulate(dim: int, terms: Iterable[tuple[int, float]], compensated: bool) -> np.ndarray:
    if not compensated:
        out = np.zeros(dim)
        for i, t in terms:
            out[i] += t
        return out
    buckets: list[list[float]] = [[] for _ in range(dim)]
    for i, t in terms:
        buckets[i].append(t)
    return np.array([math.fsum(b) for b in buckets])


def apply_m1(A: Tensor, x) -> np.ndarray:
    """F(x) = A x^{m-1}, component i = sum a_{i i2...im} x_{i2}...x_{im}."""
    x = _check_vec(A, x)

    def terms():
        for idx, val in A.entries.items():
            t = val
            for j in idx[1:]:
                t *= x[j - 1]
            yield idx[0] - 1, t

    return _accumulate(A.dim, terms(), A.nnz > _FSUM_THRESHOLD)


def apply_m(A: Tensor, x) -> float:
    """A x^m = <x, A x^{m-1}>, evaluated in exactly that order."""
    x = _check_vec(A, x)
    return float(np.dot(x, apply_m1(A, x)))


def apply_m2(A: Tensor, x) -> np.ndarray:
    """The n x n matrix (A x^{m-2})_{ij} = sum a_{i j i3...im} x_{i3}...x_{im}."""
    x = _check_vec(A, x)
    out = np.zeros((A.dim, A.dim))
    for idx, val in A.entries.items():
        t = val
        for j in idx[2:]:
            t *= x[j - 1]
        out[idx[0] - 1, idx[1] - 1] += t
    return out


def jacobian_m1(A: Tensor, x) -> np.ndarray:
    """Exact Jacobian of x -> A x^{m-1}.

    Coincides with (m-1) * apply_m2(A, x) when A is sub-symmetric; computed
    entrywise so that Newton steps stay correct for tensors that are not.
    """
    x = _check_vec(A, x)
    J = np.zeros((A.dim, A.dim))
    for idx, val in A.entries.items():
        i = idx[0] - 1
        tail = idx[1:]
        for pos, j in enumerate(tail):
            t = val
            for k, other in enumerate(tail):
                if k != pos:
                    t *= x[other - 1]
            J[i, j - 1] += t
    return J


def unit_tensor(m: int, n: int) -> Tensor:
    """Tensor of Kronecker deltas: entry 1 iff all indices coincide."""
    if m < 2 or n < 1:
        raise ValueError("unit tensor needs m >= 2, n >= 1")
    return Tensor(m, n, {(i,) * m: 1.0 for i in range(1, n + 1)})


def principal_subtensor(A: Tensor, alpha: IndexSet) -> Tensor:
    """Entries of A with every index in alpha, re-indexed to 1..|alpha|."""
    if len(alpha) == 0:
        raise ValueError("principal sub-tensor needs a nonempty index set")
    if alpha.n != A.dim:
        raise ShapeError("index set ambient dimension differs from tensor dim")
    pos = {i: k + 1 for k, i in enumerate(alpha.members)}
    sub = {}
    for idx, val in A.entries.items():
        if all(i in pos for i in idx):
            sub[tuple(pos[i] for i in idx)] = val
    return Tensor(A.order, len(alpha), sub)


def apply_off(A: Tensor, alpha: IndexSet, u_alpha) -> np.ndarray:
    """A_{comp,alpha} (u_alpha)^{m-1}: rows outside alpha, columns inside."""
    if len(alpha) == 0 or len(alpha) == A.dim:
        raise ValueError("alpha must be a nonempty proper subset")
    if alpha.n != A.dim:
        raise ShapeError("index set ambient dimension differs from tensor dim")
    u = np.asarray(u_alpha, dtype=float)
    if u.shape != (len(alpha),):
        raise ShapeError(f"u_alpha of shape {u.shape}, expected ({len(alpha)},)")
    col = {i: k for k, i in enumerate(alpha.members)}
    comp = alpha.complement
    row = {i: k for k, i in enumerate(comp)}
    out = np.zeros(len(comp))
    for idx, val in A.entries.items():
        if idx[0] in row and all(i in col for i in idx[1:]):
            t = val
            for j in idx[1:]:
                t *= u[col[j]]
            out[row[idx[0]]] += t
    return out


def power_vec(x, p: float) -> np.ndarray:
    """Componentwise power x^[p]."""
    x = np.asarray(x, dtype=float)
    p = float(p)
    if p < 0:
        raise ValueError("p must be >= 0")
    if p != int(p) and np.any(x < 0):
        raise ValueError("fractional power of a negative component")
    return x**p


def is_symmetric(A: Tensor) -> bool:
    """Invariance of entries under every permutation of the m indices."""
    for idx, val in A.entries.items():
        for perm in set(itertools.permutations(idx)):
            if A.entries.get(perm, 0.0) != val:
                return False
    return True


def is_subsymmetric(A: Tensor) -> bool:
    """Each slice A_i symmetric in the trailing m-1 indices."""
    for idx, val in A.entries.items():
        head, tail = idx[0], idx[1:]
        for perm in set(itertools.permutations(tail)):
            if A.entries.get((head,) + perm, 0.0) != val:
                return False
    return True


def frobenius_distance(A: Tensor, B: Tensor) -> float:
    if (A.order, A.dim) != (B.order, B.dim):
        raise ShapeError("tensor shapes differ")
    keys = set(A.entries) | set(B.entries)
    return math.sqrt(
        math.fsum((A.entries.get(k, 0.0) - B.entries.get(k, 0.0)) ** 2 for k in keys)
    )


def tensor_from_dense(arr, tol: float = 0.0) -> Tensor:
    """Build a Tensor from a dense (n,)*m array, dropping |a| <= tol."""
    arr = np.asarray(arr, dtype=float)
    m = arr.ndim
    if m < 2:
        raise ShapeError("dense tensor must have at least 2 axes")
    n = arr.shape[0]
    if arr.shape != (n,) * m:
        raise ShapeError(f"array of shape {arr.shape} is not square")
    entries = {}
    for idx in zip(*np.nonzero(arr)):
        v = float(arr[idx])
        if abs(v) > tol:
            entries[tuple(int(i) + 1 for i in idx)] = v
    return Tensor(m, n, entries)


def tensor_to_json(A: Tensor) -> dict:
    ents = [
        {"idx": list(idx), "val": val}
        for idx, val in sorted(A.entries.items())
    ]
    return {"order": A.order, "dim": A.dim, "entries": ents}


def tensor_from_json(obj: dict) -> Tensor:
    order = int(obj["order"])
    dim = int(obj["dim"])
    entries: dict[tuple, float] = {}
    for ent in obj.get("entries", []):
        idx = tuple(int(i) for i in ent["idx"])
        if idx in entries:
            raise ValueError(f"duplicate index {list(idx)} in tensor JSON")
        entries[idx] = float(ent["val"])
    return Tensor(order, dim, entries)


def batch_apply_m1(dense: np.ndarray, X: np.ndarray) -> np.ndarray:
    """A x^{m-1} for every row of X, using a dense coefficient array.

    Vectorized fast path for grid searches; m in {2, 3, 4} gets an einsum,
    anything larger falls back to a per-point loop.
    """
    X = np.asarray(X, dtype=float)
    m = dense.ndim
    if m == 2:
        return X @ dense.T
    if m == 3:
        return np.einsum("ijk,pj,pk->pi", dense, X, X, optimize=True)
    if m == 4:
        return np.einsum("ijkl,pj,pk,pl->pi", dense, X, X, X, optimize=True)
    A = tensor_from_dense(dense)
    return np.array([apply_m1(A, x) for x in X])
