"""Frolov lattice: generator matrices, node enumeration, admissibility checks.

The dual lattice is generated by the Vandermonde matrix ``B[i, j] = xi_i**j``
built from the polynomial roots; the primal generator is ``T = (B^T)^{-1}``.
Cubature nodes are the points of ``a^{-1} T(Z^d)`` inside a half-open box.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import FrolovPolynomial, Kind, RootSet, find_roots, mp_context
from .errors import BudgetExceeded, DomainError, SingularMatrix, ZeroVector

DEFAULT_BUDGET = 10**9
_CHUNK = 1 << 20


def worker_count() -> int:
    """Worker cap from ``FROLOV_THREADS`` (0 or unset means automatic)."""
    raw = os.environ.get("FROLOV_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"FROLOV_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise DomainError("FROLOV_THREADS must be >= 0")
    return n if n > 0 else min(8, os.cpu_count() or 1)


@dataclass(frozen=True, eq=False)
class FrolovBasis:
    """Generator matrices of the Frolov lattice and its dual for one dimension.

    ``B_mp`` and ``T_mp`` keep the extended-precision matrices; ``B`` and
    ``T`` are float64 copies.
    """

    d: int
    kind: Kind
    roots: RootSet
    B: np.ndarray
    T: np.ndarray
    detB: float
    detT: float
    absDetTinv: float
    B_mp: object = field(repr=False)
    T_mp: object = field(repr=False)

    @property
    def abs_det_T(self) -> float:
        return 1.0 / self.absDetTinv


def build_basis(d: int, kind: Kind | str = Kind.STANDARD) -> FrolovBasis:
    """Construct B from the roots and T by solving B^T T = I column by column."""
    poly = FrolovPolynomial(d, Kind.parse(kind))
    roots = find_roots(poly)
    ctx = mp_context(d)
    B_mp = ctx.matrix([[xi**j for j in range(d)] for xi in roots.roots])
    Bt = B_mp.T
    try:
        detB_mp = ctx.det(B_mp)
        if detB_mp == 0:
            raise ZeroDivisionError
        cols = [ctx.lu_solve(Bt, ctx.matrix([1 if i == k else 0 for i in range(d)]))
                for k in range(d)]
    except ZeroDivisionError:
        raise SingularMatrix(f"Vandermonde matrix for d={d} is numerically singular") from None
    T_mp = ctx.matrix(d, d)
    for k, col in enumerate(cols):
        for i in range(d):
            T_mp[i, k] = col[i]
    B = np.array(B_mp.tolist(), dtype=float)
    T = np.array(T_mp.tolist(), dtype=float)
    detB = float(detB_mp)
    return FrolovBasis(
        d=d,
        kind=poly.kind,
        roots=roots,
        B=B,
        T=T,
        detB=detB,
        detT=float(1 / detB_mp),
        absDetTinv=abs(detB),
        B_mp=B_mp,
        T_mp=T_mp,
    )


@dataclass(frozen=True, eq=False)
class NodeSet:
    """Points of ``a^{-1} T(Z^d)`` inside a box, in lexicographic order of
    their generating integer vectors."""

    a: float
    points: np.ndarray
    integers: np.ndarray
    lower: tuple
    upper: tuple

    @property
    def count(self) -> int:
        return len(self.points)

    def __len__(self):
        return self.count


def _unit_box(d):
    return (0.0,) * d, (1.0,) * d


def _normalize_box(d, box):
    if box is None:
        return _unit_box(d)
    lower, upper = box
    lower = tuple(float(v) for v in lower)
    upper = tuple(float(v) for v in upper)
    if len(lower) != d or len(upper) != d:
        raise DomainError(f"box must have {d} coordinates")
    if any(not (math.isfinite(lo) and math.isfinite(hi) and hi > lo)
           for lo, hi in zip(lower, upper)):
        raise DomainError(f"box sides must be finite and positive, got {box!r}")
    return lower, upper


def _integer_bounding_box(M: np.ndarray, lower, upper):
    """Integer box containing ``M @ y`` for every y in the box [lower, upper]."""
    M = np.asarray(M)
    lo = np.asarray(lower)
    hi = np.asarray(upper)
    # extreme of a linear map over a box is attained coordinatewise
    pos = np.clip(M, 0, None)
    neg = np.clip(M, None, 0)
    vmin = pos @ lo + neg @ hi
    vmax = pos @ hi + neg @ lo
    return np.floor(vmin).astype(np.int64) - 1, np.ceil(vmax).astype(np.int64) + 1


def _check_budget(mins, maxs, budget):
    sizes = [int(b - a + 1) for a, b in zip(mins, maxs)]
    total = math.prod(sizes)
    if total > budget:
        raise BudgetExceeded(
            f"bounding box holds {total} candidate integer vectors (budget {budget})"
        )
    return sizes


def _scan(mins, sizes, keep, workers):
    """Run ``keep(ints) -> mask`` over all integer vectors of the box.

    Candidates are produced in lexicographic order; chunks are processed by a
    thread pool and concatenated in order, so output is independent of the
    worker count.
    """
    d = len(sizes)
    total = math.prod(sizes)
    mins = np.asarray(mins, dtype=np.int64)
    shape = tuple(sizes)

    def run(start):
        flat = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        ints = np.stack(np.unravel_index(flat, shape), axis=1).astype(np.int64) + mins
        return ints[keep(ints)]

    starts = range(0, total, _CHUNK)
    if workers > 1 and total > _CHUNK:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    if not parts:
        return np.zeros((0, d), dtype=np.int64)
    return np.concatenate(parts, axis=0)


def _expand_level(lo, hi):
    """Parent index and value for every integer in each range [lo_k, hi_k]."""
    first = np.ceil(lo).astype(np.int64)
    last = np.floor(hi).astype(np.int64)
    counts = np.maximum(last - first + 1, 0)
    idx = np.repeat(np.arange(len(first)), counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    return idx, first[idx] + offsets


def _ellipsoid_candidates(G, lower, upper, budget):
    """Integer vectors m with ``G m`` in the ellipsoid circumscribing the box.

    Coordinates are rescaled so the box becomes a unit cube, whose
    circumscribed ball ``|G' m - c| <= sqrt(d)/2`` is enumerated level by
    level from the QR factor of G' (Fincke-Pohst).
    """
    d = G.shape[0]
    lo = np.asarray(lower)
    hi = np.asarray(upper)
    Gs = G / (hi - lo)[:, None]
    center = 0.5 * (lo + hi) / (hi - lo)
    Q, R = np.linalg.qr(Gs)
    signs = np.where(np.diag(R) < 0, -1.0, 1.0)
    R = R * signs[:, None]
    try:
        mc = np.linalg.solve(Gs, center)
    except np.linalg.LinAlgError:
        raise SingularMatrix("lattice generator is singular") from None
    radius2 = d / 4.0 * (1 + 1e-9) + 1e-12
    est = math.pi ** (d / 2) / math.gamma(d / 2 + 1) * radius2 ** (d / 2) / abs(np.prod(np.diag(R)))
    if est > budget:
        raise BudgetExceeded(f"about {est:.3g} candidate integer vectors (budget {budget})")

    assigned = np.zeros((1, 0), dtype=np.int64)
    used = np.zeros(1)
    for i in range(d - 1, -1, -1):
        y_rest = assigned - mc[i + 1:]
        off = y_rest @ R[i, i + 1:] if d - i - 1 else np.zeros(len(assigned))
        rem = np.sqrt(np.clip(radius2 - used, 0.0, None))
        rii = R[i, i]
        idx, vals = _expand_level(mc[i] + (-rem - off) / rii - 1e-9,
                                  mc[i] + (rem - off) / rii + 1e-9)
        if len(vals) > budget:
            raise BudgetExceeded(f"{len(vals)} partial candidates exceed budget {budget}")
        t = rii * (vals - mc[i]) + off[idx]
        assigned = np.concatenate([vals[:, None], assigned[idx]], axis=1)
        used = used[idx] + t * t
    return assigned


def _points_in_box(G, apply, lower, upper, closed, budget, method):
    """Integer vectors m (lexicographically sorted) with ``apply(m)`` in the box.

    ``apply`` must compute ``G m`` row-wise; it is used both for membership
    and by callers for the stored points, so the two always agree.
    """
    lo = np.asarray(lower)
    hi = np.asarray(upper)

    def keep(ints):
        x = apply(ints)
        upper_ok = (x <= hi) if closed else (x < hi)
        return np.all((x >= lo) & upper_ok, axis=1)

    if method == "bbox":
        mins, maxs = _integer_bounding_box(np.linalg.inv(G), lower, upper)
        sizes = _check_budget(mins, maxs, budget)
        return _scan(mins, sizes, keep, worker_count())
    if method != "ellipsoid":
        raise DomainError(f"unknown enumeration method {method!r}")
    ints = _ellipsoid_candidates(G, lower, upper, budget)
    ints = ints[keep(ints)]
    order = np.lexsort(ints.T[::-1])
    return ints[order]


def lattice_points(basis: FrolovBasis, ints: np.ndarray, a: float) -> np.ndarray:
    """Rows ``a^{-1} T m`` for the integer rows ``m``."""
    return (ints @ basis.T.T) / a


def enumerate_nodes(basis: FrolovBasis, a: float, box=None,
                    budget: int = DEFAULT_BUDGET, method: str = "ellipsoid") -> NodeSet:
    """All points of ``a^{-1} T(Z^d)`` in the half-open box (default [0,1)^d).

    A candidate is kept iff ``lower <= x < upper`` in every coordinate, with
    plain float comparisons. Candidates come from the ellipsoid enumeration
    (default) or, with ``method="bbox"``, from scanning the integer bounding
    box of the preimage ``a B^T(box)``. Output is sorted lexicographically by
    the generating integer vector.
    """
    if not a > 1:
        raise DomainError(f"scale a must exceed 1, got {a!r}")
    return scaled_lattice_in_box(basis, a, box, budget=budget, method=method)


def scaled_lattice_in_box(basis: FrolovBasis, a: float, box=None,
                          budget: int = DEFAULT_BUDGET, method: str = "ellipsoid") -> NodeSet:
    """:func:`enumerate_nodes` without the ``a > 1`` restriction (any a > 0)."""
    if not a > 0:
        raise DomainError(f"scale a must be positive, got {a!r}")
    a = float(a)
    lower, upper = _normalize_box(basis.d, box)
    ints = _points_in_box(basis.T / a, lambda m: lattice_points(basis, m, a),
                          lower, upper, False, budget, method)
    points = lattice_points(basis, ints, a)
    return NodeSet(a=a, points=points, integers=ints, lower=lower, upper=upper)


@dataclass(frozen=True)
class NodeCountDeviation:
    count: int
    expected: float
    deviation: float


def node_count_deviation(basis: FrolovBasis, a: float,
                         budget: int = DEFAULT_BUDGET) -> NodeCountDeviation:
    """Compare ``|X_a^d|`` with its volume prediction ``a^d |det T^{-1}|``."""
    count = enumerate_nodes(basis, a, budget=budget).count
    expected = float(a) ** basis.d * basis.absDetTinv
    return NodeCountDeviation(count=count, expected=expected, deviation=count - expected)


def dual_point(basis: FrolovBasis, m: Sequence[int], a: float = 1.0) -> np.ndarray:
    """The scaled dual-lattice point ``a B m``."""
    m = np.asarray(m, dtype=float)
    return a * (basis.B @ m)


@dataclass(frozen=True)
class ProductCheck:
    product: float
    nearest_integer: int
    ok: bool


def check_product_integrality(basis: FrolovBasis, m: Sequence[int],
                              rel_tol: float = 1e-6) -> ProductCheck:
    """Check that the coordinate product of ``B m`` is a nonzero integer.

    The product is formed in the basis' extended precision, so the integer
    snap reflects root accuracy rather than float64 rounding.
    """
    m = [int(v) for v in m]
    if len(m) != basis.d:
        raise DomainError(f"integer vector must have {basis.d} entries")
    if not any(m):
        raise ZeroVector("check_product_integrality needs a nonzero integer vector")
    z = basis.B_mp * basis.B_mp.ctx.matrix(m)
    prod = basis.B_mp.ctx.mpf(1)
    for i in range(basis.d):
        prod *= z[i]
    nearest = int(basis.B_mp.ctx.nint(prod))
    ok = (abs(prod - nearest) <= rel_tol * max(1, abs(prod))
          and nearest != 0
          and all(z[i] != 0 for i in range(basis.d)))
    return ProductCheck(product=float(prod), nearest_integer=nearest, ok=bool(ok))


def count_dual_in_box(basis: FrolovBasis, a: float, box,
                      budget: int = DEFAULT_BUDGET, method: str = "ellipsoid") -> int:
    """Number of points of ``a B(Z^d)`` inside the closed box ``[lower, upper]``."""
    if not a > 0:
        raise DomainError(f"scale a must be positive, got {a!r}")
    lower, upper = _normalize_box(basis.d, box)
    return len(_points_in_box(a * basis.B, lambda m: a * (m @ basis.B.T),
                              lower, upper, True, budget, method))


def box_vertices(lower, upper) -> np.ndarray:
    return np.array(list(itertools.product(*zip(lower, upper))), dtype=float)
