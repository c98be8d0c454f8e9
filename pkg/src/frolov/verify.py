"""Seeded invariant suites used by ``frolov verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import NOISE_FLOOR, poisson_check
from .lattice import (DEFAULT_BUDGET, FrolovBasis, check_product_integrality,
                      count_dual_in_box, dual_point, enumerate_nodes, node_count_deviation)
from .testfunctions import sine_power

POISSON_GRIDS = {1: (25, 50, 100, 200), 2: (25, 50, 100, 200), 3: (5, 10, 20)}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def g17(v) -> str:
    return format(float(v), ".17g")


def random_nonzero_vectors(rng, d, count, bound=20):
    out = []
    while len(out) < count:
        m = rng.integers(-bound, bound + 1, size=d)
        if m.any():
            out.append(m)
    return out


def random_boxes(rng, d, a, count, vol_range=(0.1, 100.0)):
    """Axis-parallel boxes with log-uniform volume and random aspect ratio."""
    boxes = []
    for _ in range(count):
        log_vol = rng.uniform(math.log(vol_range[0]), math.log(vol_range[1]))
        shape = rng.normal(0.0, 0.7, size=d)
        sides = np.exp(log_vol / d + shape - shape.mean())
        center = rng.uniform(-2.0 * a, 2.0 * a, size=d)
        boxes.append((center - sides / 2, center + sides / 2))
    return boxes


def strictly_decreasing(values, floor=NOISE_FLOOR) -> bool:
    """Each step decreases, except steps where both values sit at the floor."""
    return all(b < a or (a <= floor and b <= floor) for a, b in zip(values, values[1:]))


def check_products(basis, rng, count=1000):
    bad = [m for m in random_nonzero_vectors(rng, basis.d, count)
           if not check_product_integrality(basis, m).ok]
    return CheckResult("product_integrality", not bad, f"{count - len(bad)}/{count} nonzero integer products")


def check_boxes(basis, rng, scales=(1.0, 2.0, 5.0), count=200, budget=DEFAULT_BUDGET):
    d = basis.d
    violations, worst = 0, -math.inf
    for a in scales:
        for lower, upper in random_boxes(rng, d, a, count):
            vol = float(np.prod(upper - lower))
            n = count_dual_in_box(basis, a, (lower, upper), budget=budget)
            limit = a ** (-d) * vol + 1
            worst = max(worst, n - limit)
            violations += n > limit
    return CheckResult("box_counts", violations == 0,
                       f"{violations} violations in {count * len(scales)} boxes, max excess {g17(worst)}")


def check_poisson(basis, scales=(1.0, 2.5, 3.0), tol=1e-5, budget=DEFAULT_BUDGET):
    grid = POISSON_GRIDS.get(basis.d)
    if grid is None:
        return CheckResult("poisson", True, f"skipped for d={basis.d}")
    f = sine_power(basis.d, 2)
    ok, parts = True, []
    for a in scales:
        disc = [poisson_check(basis, a, f, M, budget=budget).discrepancy for M in grid]
        good = disc[-1] <= tol and strictly_decreasing(disc)
        ok &= good
        parts.append(f"a={g17(a)}:{g17(disc[-1])}")
    return CheckResult("poisson", ok, " ".join(parts))


def check_duality(basis, rng, a=3.0, count=200):
    worst = 0.0
    for _ in range(count):
        m = rng.integers(-5, 6, size=basis.d)
        k = rng.integers(-5, 6, size=basis.d)
        x = basis.T @ m / a
        y = dual_point(basis, k, a)
        ip = float(x @ y)
        worst = max(worst, abs(ip - round(ip)))
    nodes = enumerate_nodes(basis, max(a, 2.0))
    recon = nodes.points @ (max(a, 2.0) * basis.B)
    recon_err = float(np.max(np.abs(recon - np.rint(recon)))) if nodes.count else 0.0
    ok = worst <= 1e-8 and recon_err <= 1e-6
    return CheckResult("duality", ok, f"max inner-product defect {g17(worst)}, reconstruction {g17(recon_err)}")


def node_count_scale(basis: FrolovBasis, target=2e4) -> float:
    return max(1.001, (target / basis.absDetTinv) ** (1.0 / basis.d))


def check_node_count(basis, budget=DEFAULT_BUDGET, tol=0.02):
    a = 40.0 if basis.d <= 2 else node_count_scale(basis)
    if a ** basis.d * basis.absDetTinv > 1e6:
        return CheckResult("node_count", True, f"skipped for d={basis.d} (too many nodes)")
    r = node_count_deviation(basis, a, budget=budget)
    ratio = r.count / r.expected
    return CheckResult("node_count", abs(ratio - 1) <= tol,
                       f"a={g17(a)} count={r.count} ratio={g17(ratio)}")


def run_all(basis: FrolovBasis, seed: int = 0, budget: int = DEFAULT_BUDGET) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        check_products(basis, rng),
        check_boxes(basis, rng, budget=budget),
        check_poisson(basis, budget=budget),
        check_duality(basis, rng),
        check_node_count(basis, budget=budget),
    ]
