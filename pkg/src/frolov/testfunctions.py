"""Integrands with known exact integrals for convergence and Poisson tests.

All members are products of one-dimensional factors. Evaluators are
vectorized over ``(n, d)`` arrays and reentrant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, UnsupportedFunction


@dataclass(frozen=True, eq=False)
class TestFunction:
    """An integrand on [0,1]^d with certified metadata.

    ``smoothness`` is the mixed order s for which the zero extension lies in
    the Sobolev class (None when the function does not vanish on the
    boundary). ``factor`` evaluates the 1-D factor and ``transform`` its
    Fourier transform ``int_0^1 g(x) exp(-2 pi i y x) dx`` where a closed
    form exists. The norm ``||f||_{s,mix}`` is not tracked.
    """

    __test__ = False  # keep pytest from collecting this class

    name: str
    d: int
    smoothness: Optional[int]
    exact_integral: float
    vanishing: bool
    factor: Callable[[np.ndarray, int], np.ndarray]
    provenance: str
    transform: Optional[Callable[[np.ndarray], np.ndarray]] = None
    params: dict = field(default_factory=dict)
    reentrant: bool = True

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.d:
            raise DomainError(f"{self.name} expects {self.d}-dimensional points")
        out = np.ones(len(x))
        for j in range(self.d):
            out *= self.factor(x[:, j], j)
        return out

    def fourier(self, y) -> np.ndarray:
        """Tensor-product transform at the rows of ``y``."""
        if self.transform is None:
            raise UnsupportedFunction(f"{self.name} has no closed-form transform")
        y = np.atleast_2d(np.asarray(y, dtype=float))
        out = np.ones(len(y), dtype=complex)
        for j in range(self.d):
            out *= self.transform(y[:, j])
        return out


def _check_dim(d):
    if int(d) != d or d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d!r}")
    return int(d)


def bump(d: int, p: int) -> TestFunction:
    """prod_j c_p x_j^p (1 - x_j)^p with c_p = (2p+1)!/(p!)^2, integral 1.

    The zero extension is C^{p-1} with a bounded p-th derivative, so it lies
    in the mixed Sobolev class of order p.
    """
    d = _check_dim(d)
    if int(p) != p or p < 1:
        raise DomainError(f"bump order p must be a positive integer, got {p!r}")
    p = int(p)
    c = math.factorial(2 * p + 1) / math.factorial(p) ** 2

    def factor(t, _j):
        return c * (t * (1.0 - t)) ** p

    return TestFunction(
        name="bump", d=d, smoothness=p, exact_integral=1.0, vanishing=True,
        factor=factor, params={"d": d, "p": p},
        provenance="Beta integral: int_0^1 u^p (1-u)^p du = (p!)^2/(2p+1)!",
    )


def _sinpi_cospi(w):
    n = np.rint(w)
    r = w - n
    sign = np.where(np.fmod(n, 2.0) == 0.0, 1.0, -1.0)
    return sign * np.sin(np.pi * r), sign * np.cos(np.pi * r)


def unit_interval_exponential(w):
    """int_0^1 exp(2 pi i w x) dx, exactly zero at nonzero integers w."""
    w = np.asarray(w, dtype=float)
    sin, cos = _sinpi_cospi(w)
    with np.errstate(invalid="ignore", divide="ignore"):
        sinc = np.where(w == 0.0, 1.0, sin / (np.pi * np.where(w == 0.0, 1.0, w)))
    return (cos + 1j * sin) * sinc


def sine_power(d: int, s: int) -> TestFunction:
    """prod_j sin(pi x_j)^{2s}, integral (C(2s, s) / 4^s)^d.

    sin^{2s}(pi x) = 4^{-s} sum_{k=-s}^{s} (-1)^k C(2s, s+k) e^{2 pi i k x}, so
    the transform of the factor restricted to [0,1] is a finite sum of
    shifted kernels ``unit_interval_exponential(k - y)``.
    """
    d = _check_dim(d)
    if int(s) != s or s < 1:
        raise DomainError(f"sine power s must be a positive integer, got {s!r}")
    s = int(s)
    ks = np.arange(-s, s + 1)
    coeffs = np.array([(-1) ** int(k) * math.comb(2 * s, s + int(k)) for k in ks]) / 4.0**s
    one_d = math.comb(2 * s, s) / 4.0**s

    def factor(t, _j):
        return np.sin(np.pi * t) ** (2 * s)

    def transform(y):
        y = np.asarray(y, dtype=float)
        return unit_interval_exponential(ks[None, :] - y[:, None]) @ coeffs

    return TestFunction(
        name="sine_power", d=d, smoothness=2 * s, exact_integral=one_d**d,
        vanishing=True, factor=factor, transform=transform,
        params={"d": d, "s": s},
        provenance="mean of sin^{2s} over a period is C(2s, s)/4^s",
    )


def trig_mode(d: int, k) -> TestFunction:
    """prod_j cos(2 pi k_j x_j); integral 1 for k = 0, else 0. Not vanishing."""
    d = _check_dim(d)
    k = np.broadcast_to(np.asarray(k, dtype=int), (d,)).copy()

    def factor(t, j):
        return np.cos(2.0 * np.pi * k[j] * t)

    return TestFunction(
        name="trig_mode", d=d, smoothness=None,
        exact_integral=1.0 if not k.any() else 0.0, vanishing=False,
        factor=factor, params={"d": d, "k": tuple(int(v) for v in k)},
        provenance="cosine integrates to zero over whole periods",
    )


CORPUS = {"bump": bump, "sine_power": sine_power, "trig_mode": trig_mode}


def _parse_value(key, raw):
    if key == "k":
        return [int(v) for v in raw.split("/")]
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"selector value {key}={raw!r} is not an integer") from None


def parse_selector(selector: str, d: Optional[int] = None) -> TestFunction:
    """Build a corpus member from ``name:key=value[,key=value]*``.

    Vector values (``k`` of trig_mode) use ``/`` between entries, e.g.
    ``trig_mode:d=2,k=1/0``. A missing ``d`` is taken from the argument.
    """
    name, _, rest = selector.strip().partition(":")
    if name not in CORPUS:
        raise DomainError(f"unknown function {name!r}; choose from {sorted(CORPUS)}")
    kwargs = {}
    for item in filter(None, rest.split(",")):
        key, eq, raw = item.partition("=")
        if not eq or not key:
            raise DomainError(f"malformed selector item {item!r}")
        kwargs[key.strip()] = _parse_value(key.strip(), raw.strip())
    if "d" not in kwargs:
        if d is None:
            raise DomainError(f"selector {selector!r} needs a dimension")
        kwargs["d"] = d
    if name == "bump" and "p" not in kwargs:
        raise DomainError("bump needs p=<order>")
    if name == "sine_power":
        kwargs.setdefault("s", 1)
    if name == "trig_mode":
        kwargs.setdefault("k", 0)
    try:
        return CORPUS[name](**kwargs)
    except TypeError as exc:
        raise DomainError(f"bad parameters for {name}: {exc}") from None
