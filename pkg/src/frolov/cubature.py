"""Equal-weight Frolov cubature on the unit cube or an axis-aligned box.

Integrands are vectorized callables: they take an ``(n, d)`` array of points
and return ``n`` values. An evaluator with a truthy ``reentrant`` attribute
may be called concurrently on chunks of the node set.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .core import polylog_negative_order
from .errors import DomainError, NonFiniteValue
from .lattice import DEFAULT_BUDGET, FrolovBasis, NodeSet, enumerate_nodes, worker_count

Integrand = Callable[[np.ndarray], np.ndarray]

_PARALLEL_MIN = 1 << 16


class Mode(enum.Enum):
    VANISHING = "vanishing"
    PERIODIZED = "periodized"

    @classmethod
    def parse(cls, value: "Mode | str") -> "Mode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown cubature mode {value!r}") from None


class PeriodizationMap:
    """The polynomial change of variables

        psi_s(t) = int_0^t u^s (1-u)^s du / B(s+1, s+1)

    mapping [0, 1] onto itself with psi_s' vanishing to order s at both ends.
    """

    def __init__(self, s: int):
        if int(s) != s or s < 1:
            raise DomainError(f"smoothness s must be a positive integer, got {s!r}")
        self.s = s = int(s)
        # 1 / B(s+1, s+1) = (2s+1)! / (s!)^2, kept exact until the coefficients are formed
        self.norm = Fraction(math.factorial(2 * s + 1), math.factorial(s) ** 2)
        coeffs = [Fraction(0)] * (2 * s + 2)
        for k in range(s + 1):
            coeffs[s + k + 1] = self.norm * (-1) ** k * math.comb(s, k) / (s + k + 1)
        # highest degree first, for np.polyval
        self._psi = np.array([float(c) for c in reversed(coeffs)])

    def psi(self, t):
        t = np.asarray(t, dtype=float)
        lower = np.polyval(self._psi, np.minimum(t, 1.0 - t))
        # evaluate on the nearer half; the map is antisymmetric about 1/2
        return np.where(t <= 0.5, lower, 1.0 - lower)

    def dpsi(self, t):
        t = np.asarray(t, dtype=float)
        return float(self.norm) * (t * (1.0 - t)) ** self.s

    __call__ = psi


def periodize(f: Integrand, s: int) -> Integrand:
    """Return g(x) = f(psi_s(x_1), ..., psi_s(x_d)) * prod_j psi_s'(x_j).

    g has the same integral over the unit cube as f and vanishes, together
    with its first s-1 derivatives, on the cube boundary.
    """
    pmap = PeriodizationMap(s)

    def g(x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        jac = np.prod(pmap.dpsi(x), axis=1)
        return _values(f, pmap.psi(x)) * jac

    g.reentrant = getattr(f, "reentrant", False)
    g.periodization = pmap
    return g


@dataclass(frozen=True, eq=False)
class CubatureRule:
    basis: FrolovBasis
    a: float
    nodes: NodeSet
    weight: float
    mode: Mode
    s: int | None
    lower: tuple
    upper: tuple

    @property
    def count(self) -> int:
        return self.nodes.count

    @property
    def volume(self) -> float:
        return math.prod(hi - lo for lo, hi in zip(self.lower, self.upper))

    @property
    def signed_det_T(self) -> float:
        return self.basis.detT

    def __call__(self, f: Integrand) -> float:
        return integrate(self, f)


def build_rule(basis: FrolovBasis, a: float, mode: Mode | str = Mode.VANISHING,
               s: int | None = None, domain=None,
               budget: int = DEFAULT_BUDGET) -> CubatureRule:
    """Nodes ``a^{-1} T(Z^d)`` in the domain with uniform weight ``a^{-d} |det T|``.

    ``domain`` is ``None`` for the unit cube or a pair ``(lower, upper)`` of
    corner sequences describing a half-open box. Periodized mode needs the
    unit cube and a smoothness ``s``.
    """
    mode = Mode.parse(mode)
    if mode is Mode.PERIODIZED:
        if domain is not None:
            raise DomainError("periodized mode is only defined on the unit cube")
        if s is None:
            raise DomainError("periodized mode requires a smoothness s")
        PeriodizationMap(s)
    nodes = enumerate_nodes(basis, a, box=domain, budget=budget)
    weight = float(a) ** (-basis.d) * basis.abs_det_T
    return CubatureRule(basis=basis, a=float(a), nodes=nodes, weight=weight, mode=mode,
                        s=s, lower=nodes.lower, upper=nodes.upper)


def _values(f, x):
    out = np.asarray(f(x), dtype=float)
    return np.broadcast_to(out, (len(x),)) if out.ndim == 0 else out.reshape(len(x))


def integrate(rule: CubatureRule, f: Integrand) -> float:
    """``weight * sum f(x)`` over the nodes, with an exactly rounded sum.

    In periodized mode f is first transformed by :func:`periodize`. Raises
    :class:`NonFiniteValue` if any integrand value is NaN or infinite.
    """
    g = periodize(f, rule.s) if rule.mode is Mode.PERIODIZED else f
    points = rule.nodes.points
    if len(points) == 0:
        return 0.0
    workers = worker_count()
    if getattr(g, "reentrant", False) and workers > 1 and len(points) >= _PARALLEL_MIN:
        chunks = np.array_split(points, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vals = np.concatenate(list(pool.map(lambda c: _values(g, c), chunks)))
    else:
        vals = _values(g, points)
    if not np.all(np.isfinite(vals)):
        bad = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise NonFiniteValue(f"integrand is not finite at node {points[bad].tolist()}")
    # fsum is an error-free-transform accumulation; node order is fixed
    return rule.weight * math.fsum(vals.tolist())


def error_constant(s: int, d: int) -> float:
    """c_{s,d} = 2^{d+2s+1} * Li_{1-d}(2^{1-2s})^{1/2}."""
    if s < 1 or d < 1:
        raise DomainError("s and d must be positive")
    return 2.0 ** (d + 2 * s + 1) * math.sqrt(polylog_negative_order(d - 1, 2.0 ** (1 - 2 * s)))


def theoretical_bound(s: int, d: int, a: float) -> float:
    """Worst-case error bound c_{s,d} a^{-sd} log2(a^d)^{(d-1)/2} on the unit ball."""
    if not a > 1:
        raise DomainError(f"scale a must exceed 1, got {a!r}")
    log_term = d * math.log2(a)
    if log_term <= 0:
        raise DomainError("log2(a^d) must be positive")
    return error_constant(s, d) * a ** (-s * d) * log_term ** ((d - 1) / 2)
