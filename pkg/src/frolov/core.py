"""Scalar machinery behind the Frolov construction.

The generating polynomials, their real roots in extended precision, and the
negative-order polylogarithm that enters the explicit error constant.

Two polynomial families are supported:

* ``Kind.STANDARD``:  P_d(t) = prod_{j=1}^d (t - 2j + 1) - 1, any d >= 1.
* ``Kind.CHEBYSHEV``: P*_d(t) = 2 cos(d arccos(t/2)), d a power of two,
  with roots 2 cos(pi (2i - 1) / (2d)).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from numbers import Integral

import numpy as np
from mpmath.ctx_mp import MPContext

from .errors import DomainError, RootCountMismatch

MAX_DIMENSION = 32


def mp_context(d: int) -> MPContext:
    """Private extended-precision context sized for dimension ``d``.

    Vandermonde conditioning grows roughly like (2d)^d, so the working
    precision grows linearly in d.
    """
    ctx = MPContext()
    ctx.dps = 40 + 3 * d
    return ctx


class Kind(enum.Enum):
    STANDARD = "standard"
    CHEBYSHEV = "chebyshev"

    @classmethod
    def parse(cls, value: "Kind | str") -> "Kind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown polynomial kind {value!r}") from None


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True)
class FrolovPolynomial:
    d: int
    kind: Kind = Kind.STANDARD

    def __post_init__(self):
        if not isinstance(self.d, Integral) or self.d < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.d!r}")
        if self.d > MAX_DIMENSION:
            raise DomainError(f"dimension {self.d} exceeds supported maximum {MAX_DIMENSION}")
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        if self.kind is Kind.CHEBYSHEV and not _is_power_of_two(self.d):
            raise DomainError(f"Chebyshev construction needs d a power of 2, got {self.d}")

    @property
    def abscissae(self) -> tuple[int, ...]:
        """The odd integers b_j = 2j - 1 of the product form."""
        return tuple(2 * j - 1 for j in range(1, self.d + 1))

    def __call__(self, t):
        return evaluate_poly(self, t)


@dataclass(frozen=True)
class RootSet:
    """Real roots of a Frolov polynomial, strictly decreasing.

    ``roots`` holds extended-precision values (mpmath numbers); use
    :attr:`values` for a float64 view.
    """

    d: int
    roots: tuple
    residual: float

    @property
    def values(self) -> np.ndarray:
        return np.array([float(r) for r in self.roots])

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def _chebyshev_recurrence(d, t):
    # monic Chebyshev: q0 = 2, q1 = t, q_{n+1} = t q_n - q_{n-1}
    q_prev, q = 2, t
    if d == 0:
        return q_prev
    for _ in range(d - 1):
        q_prev, q = q, t * q - q_prev
    return q


def evaluate_poly(p: FrolovPolynomial, t):
    """Evaluate the polynomial at a scalar ``t``.

    Standard kind uses the product form; integer ``t`` gives an exact Python
    integer. Chebyshev kind uses the trigonometric form on [-2, 2] and the
    three-term recurrence outside.
    """
    if p.kind is Kind.STANDARD:
        if isinstance(t, Integral):
            t = int(t)
        prod = 1
        for b in p.abscissae:
            prod = prod * (t - b)
        return prod - 1
    if isinstance(t, Integral):
        return _chebyshev_recurrence(p.d, int(t))
    if abs(t) <= 2 and isinstance(t, (float, np.floating)):
        return 2.0 * math.cos(p.d * math.acos(t / 2.0))
    return _chebyshev_recurrence(p.d, t)


def _poly_and_derivative(p: FrolovPolynomial, t):
    """P(t) and P'(t) in whatever number type ``t`` carries."""
    if p.kind is Kind.STANDARD:
        prod, dprod = 1, 0
        for b in p.abscissae:
            prod, dprod = prod * (t - b), dprod * (t - b) + prod
        return prod - 1, dprod
    # d/dt of q_n via the differentiated recurrence
    q_prev, q = 2, t
    dq_prev, dq = 0, 1
    for _ in range(p.d - 1):
        q_prev, q = q, t * q - q_prev
        dq_prev, dq = dq, q_prev + t * dq - dq_prev
    return q, dq


def _standard_grid_values(d: int, grid: np.ndarray) -> np.ndarray:
    vals = np.ones_like(grid)
    for j in range(1, d + 1):
        vals *= grid - (2 * j - 1)
    return vals - 1.0


def _bracket_sign_changes(d: int, min_spacing: float = 1e-6) -> list[tuple[float, float]]:
    lo, hi = -1.0, 2.0 * d
    n = 64 * d
    while True:
        grid = np.linspace(lo, hi, n + 1)
        vals = _standard_grid_values(d, grid)
        brackets = []
        i = 0
        while i < n:
            if vals[i] == 0.0:
                brackets.append((grid[i], grid[i]))
                i += 1
                continue
            if vals[i + 1] != 0.0 and np.sign(vals[i]) != np.sign(vals[i + 1]):
                brackets.append((grid[i], grid[i + 1]))
            i += 1
        if vals[n] == 0.0:
            brackets.append((grid[n], grid[n]))
        if len(brackets) >= d:
            return brackets
        if (hi - lo) / n <= min_spacing:
            raise RootCountMismatch(
                f"found {len(brackets)} sign changes for P_{d}, expected {d}"
            )
        n *= 2


def _bisect(d: int, lo: float, hi: float, width: float = 1e-10) -> float:
    flo = _standard_grid_values(d, np.array([lo]))[0]
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        fmid = _standard_grid_values(d, np.array([mid]))[0]
        if fmid == 0.0:
            return mid
        if np.sign(fmid) == np.sign(flo):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _newton_polish(p: FrolovPolynomial, x0: float, ctx: MPContext, steps: int = 60):
    x = ctx.mpf(x0)
    tol = ctx.mpf(10) ** (-(ctx.dps - 5))
    for _ in range(steps):
        f, df = _poly_and_derivative(p, x)
        step = f / df
        x -= step
        if abs(step) <= tol * max(1, abs(x)):
            break
    return x


def find_roots(p: FrolovPolynomial) -> RootSet:
    """All d real roots of ``p`` in decreasing order.

    Standard kind: sign-change bracketing on a grid over [-1, 2d], bisection
    to width 1e-10, then Newton polishing in extended precision. Chebyshev
    kind: closed form.
    """
    ctx = mp_context(p.d)
    if p.kind is Kind.CHEBYSHEV:
        roots = [2 * ctx.cos(ctx.pi * (2 * i - 1) / (2 * p.d)) for i in range(1, p.d + 1)]
    else:
        brackets = _bracket_sign_changes(p.d)
        roots = [
            _newton_polish(p, lo if lo == hi else _bisect(p.d, lo, hi), ctx)
            for lo, hi in brackets
        ]
    roots.sort(reverse=True)
    if len(roots) != p.d or any(r1 <= r2 for r1, r2 in zip(roots, roots[1:])):
        raise RootCountMismatch(f"roots of P_{p.d} are not {p.d} distinct reals")
    residual = max(abs(_poly_and_derivative(p, r)[0]) for r in roots)
    return RootSet(d=p.d, roots=tuple(roots), residual=float(residual))


def rational_root_sanity(p: FrolovPolynomial) -> bool:
    """True iff the Standard polynomial has no rational root.

    By the rational root theorem a monic integer polynomial can only have
    integer roots dividing its constant term, so those are all checked with
    exact integer arithmetic. This is a necessary condition for
    irreducibility, not a proof of it. For d = 1 the polynomial t - 2 has the
    rational root 2 and the result is False; degree one is irreducible
    trivially, so callers skip that case.
    """
    if p.kind is not Kind.STANDARD:
        raise DomainError("rational_root_sanity applies to the Standard kind only")
    if p.d > 12:
        raise DomainError("rational_root_sanity supports d <= 12")
    const = evaluate_poly(p, 0)
    if const == 0:
        return False
    c = abs(const)
    divisors = [k for k in range(1, math.isqrt(c) + 1) if c % k == 0]
    divisors += [c // k for k in divisors]
    return all(evaluate_poly(p, s * k) != 0 for k in set(divisors) for s in (1, -1))


def polylog_negative_order(k: int, z: float) -> float:
    """Li_{-k}(z) = sum_{l>=1} l^k z^l for 0 < z < 1, by direct summation.

    Summation stops once a term drops below 1e-16 of the partial sum (after
    the terms have started decreasing).
    """
    if not isinstance(k, Integral) or k < 0:
        raise DomainError(f"order k must be a non-negative integer, got {k!r}")
    if not 0.0 < z < 1.0:
        raise DomainError(f"z must lie in (0, 1), got {z!r}")
    terms = []
    total = 0.0
    ell = 1
    prev = 0.0
    while True:
        term = ell**k * z**ell
        terms.append(term)
        total += term
        if term < prev and term < 1e-16 * total:
            break
        prev = term
        ell += 1
    return math.fsum(terms)
