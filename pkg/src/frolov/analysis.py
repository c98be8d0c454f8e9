"""Diagnostics for the error analysis of the Frolov rule.

Frequency multiplier, lattice Poisson summation check, the cell-count
ratio C(a, T), convergence studies and log-log order fitting.
"""
from __future__ import annotations

import csv
import itertools
import math
import time
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .cubature import Mode, build_rule, integrate, theoretical_bound
from .errors import BudgetExceeded, DomainError, InsufficientData, UnsupportedFunction
from .lattice import DEFAULT_BUDGET, FrolovBasis, box_vertices, scaled_lattice_in_box

NOISE_FLOOR = 1e-14


@dataclass(frozen=True)
class MultiplierParams:
    s: int
    d: int

    def __post_init__(self):
        if self.s < 1 or self.d < 1:
            raise DomainError("multiplier needs s >= 1 and d >= 1")


def multiplier(params: MultiplierParams, y) -> float:
    """nu_s(y) = prod_j sum_{l=0}^{s} (2 pi |y_j|)^{2l}."""
    y = np.asarray(y, dtype=float).reshape(-1)
    if len(y) != params.d:
        raise DomainError(f"expected a {params.d}-vector")
    u = (2.0 * np.pi * y) ** 2
    acc = np.ones_like(u)
    for _ in range(params.s):
        acc = acc * u + 1.0
    return float(np.prod(acc))


@dataclass(frozen=True)
class PoissonCheck:
    node_sum: float
    dual_sum: float
    discrepancy: float


def poisson_check(basis: FrolovBasis, a: float, f, M: int,
                  budget: int = DEFAULT_BUDGET) -> PoissonCheck:
    """Compare both sides of Poisson summation on the lattice ``a^{-1} T(Z^d)``.

    Left: ``a^{-d} |det T| sum f(x)`` over lattice points in [0,1)^d. Right:
    ``sum f^(a B m)`` over the truncation ``|m|_inf <= M`` of the dual
    lattice, using the closed-form transform of ``f``.
    """
    if getattr(f, "transform", None) is None:
        raise UnsupportedFunction(f"{getattr(f, 'name', f)!r} has no closed-form transform")
    if f.d != basis.d:
        raise DomainError("function and lattice dimensions differ")
    if int(M) != M or M < 1:
        raise DomainError("truncation M must be a positive integer")
    d = basis.d
    nodes = scaled_lattice_in_box(basis, a, budget=budget)
    vals = f(nodes.points) if nodes.count else np.zeros(0)
    node_sum = float(a) ** (-d) * basis.abs_det_T * math.fsum(vals.tolist())

    side = 2 * int(M) + 1
    if side**d > budget:
        raise BudgetExceeded(f"dual truncation has {side**d} terms (budget {budget})")
    ms = np.arange(-M, M + 1, dtype=float)
    terms = []
    # one slab of the last coordinate at a time keeps memory flat
    for head in itertools.product(ms, repeat=d - 1):
        m = np.column_stack([np.broadcast_to(np.array(head), (side, d - 1)), ms])
        y = a * (m @ basis.B.T)
        terms.extend(f.fourier(y).real.tolist())
    dual_sum = math.fsum(terms)
    return PoissonCheck(node_sum=node_sum, dual_sum=dual_sum,
                        discrepancy=abs(node_sum - dual_sum))


@dataclass(frozen=True)
class CellCount:
    M: int
    C: float


def _cells_meet_lp(G, cell):
    """Largest margin t with an interior point common to the cell and G[0,1]^d."""
    d = G.shape[0]
    # variables (u, t); maximize t
    A, b = [], []
    for j in range(d):
        row = np.append(-G[j], 1.0)
        A.append(row)
        b.append(-cell[j])
        row = np.append(G[j], 1.0)
        A.append(row)
        b.append(cell[j] + 1.0)
    for i in range(d):
        e = np.zeros(d + 1)
        e[i], e[d] = -1.0, 1.0
        A.append(e)
        b.append(0.0)
        e = np.zeros(d + 1)
        e[i], e[d] = 1.0, 1.0
        A.append(e)
        b.append(1.0)
    c = np.zeros(d + 1)
    c[d] = -1.0
    res = linprog(c, A_ub=np.array(A), b_ub=np.array(b),
                  bounds=[(None, None)] * (d + 1), method="highs")
    return res.status == 0 and -res.fun > 1e-9


def cell_count(basis: FrolovBasis, a: float, budget: int = 10**7) -> CellCount:
    """Count unit cells ``m + (0,1)^d`` meeting the parallelepiped ``a T^{-1}[0,1]^d``.

    Cells are decided by vertex containment and by separating hyperplanes
    taken from the faces of either body; anything left undecided is settled
    by a small linear program. Returns M and ``C = a^{-d} |det T| M``.
    """
    if not a > 1:
        raise DomainError(f"scale a must exceed 1, got {a!r}")
    d = basis.d
    if d > 4:
        raise DomainError("cell_count supports d <= 4")
    G = float(a) * basis.B.T          # parallelepiped = G [0,1]^d
    Ginv = basis.T / float(a)         # preimage u = Ginv v
    pverts = box_vertices((0.0,) * d, (1.0,) * d) @ G.T
    lo = np.floor(pverts.min(axis=0)).astype(np.int64)
    hi = np.ceil(pverts.max(axis=0)).astype(np.int64)
    sizes = hi - lo
    total = int(np.prod(sizes))
    if total > budget:
        raise BudgetExceeded(f"{total} candidate cells exceed budget {budget}")
    cells = np.stack(np.unravel_index(np.arange(total), tuple(sizes)), axis=1) + lo
    offsets = box_vertices((0.0,) * d, (1.0,) * d)
    cverts = cells[:, None, :] + offsets[None, :, :]       # (n, 2^d, d)
    u = cverts @ Ginv.T

    vertex_inside = np.any(np.all((u > 0) & (u < 1), axis=2), axis=1)
    pvert_inside = np.any(np.all((pverts[None] > cells[:, None]) &
                                 (pverts[None] < cells[:, None] + 1), axis=2), axis=1)
    sep_p = np.any(np.all(u <= 0, axis=1) | np.all(u >= 1, axis=1), axis=1)
    sep_c = np.any(np.all(pverts[None] <= cells[:, None], axis=1) |
                   np.all(pverts[None] >= cells[:, None] + 1, axis=1), axis=1)
    meets = vertex_inside | pvert_inside
    undecided = ~meets & ~sep_p & ~sep_c
    if d <= 2:
        # face normals of both polygons form a complete separating set
        meets |= undecided
    else:
        for k in np.flatnonzero(undecided):
            meets[k] = _cells_meet_lp(G, cells[k])
    count = int(meets.sum())
    return CellCount(M=count, C=float(a) ** (-d) * basis.abs_det_T * count)


@dataclass(frozen=True)
class ConvergenceRecord:
    a: float
    n: int
    error: float
    bound: float
    seconds: float


CSV_HEADER = [f.name for f in fields(ConvergenceRecord)]


def convergence_study(basis: FrolovBasis, f, s: int, a_grid: Sequence[float],
                      mode: Mode | str = Mode.VANISHING, timed: bool = True,
                      budget: int = DEFAULT_BUDGET) -> list[ConvergenceRecord]:
    """Integrate ``f`` on each scale in ``a_grid`` and record the errors.

    With ``timed=False`` the ``seconds`` field is 0.0, which keeps repeated
    runs byte-identical.
    """
    a_grid = [float(a) for a in a_grid]
    if not a_grid or any(a <= 1 for a in a_grid):
        raise DomainError("a_grid must be non-empty with all values > 1")
    if any(x >= y for x, y in zip(a_grid, a_grid[1:])):
        raise DomainError("a_grid must be strictly increasing")
    mode = Mode.parse(mode)
    exact = f.exact_integral
    records = []
    for a in a_grid:
        start = time.perf_counter()
        rule = build_rule(basis, a, mode=mode, s=s if mode is Mode.PERIODIZED else None,
                          budget=budget)
        value = integrate(rule, f)
        elapsed = time.perf_counter() - start if timed else 0.0
        records.append(ConvergenceRecord(
            a=a, n=rule.count, error=abs(value - exact),
            bound=theoretical_bound(s, basis.d, a), seconds=elapsed,
        ))
    return records


def fit_order(records: Iterable[ConvergenceRecord]) -> float:
    """Least-squares slope of log(error) against log(n).

    Records at or below the 1e-14 noise floor are dropped.
    """
    usable = [r for r in records if r.error >= NOISE_FLOOR and r.n >= 1]
    if len(usable) < 3:
        raise InsufficientData(f"need 3 records above the noise floor, got {len(usable)}")
    x = np.log([r.n for r in usable])
    y = np.log([r.error for r in usable])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def _fmt(v):
    return str(v) if isinstance(v, (int, np.integer)) else format(float(v), ".17g")


def write_csv(records: Iterable[ConvergenceRecord], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow([_fmt(v) for v in astuple(r)])


def read_csv(stream) -> list[ConvergenceRecord]:
    reader = csv.DictReader(stream)
    if reader.fieldnames != CSV_HEADER:
        raise DomainError(f"unexpected CSV header {reader.fieldnames}")
    return [ConvergenceRecord(a=float(row["a"]), n=int(row["n"]), error=float(row["error"]),
                              bound=float(row["bound"]), seconds=float(row["seconds"]))
            for row in reader]
