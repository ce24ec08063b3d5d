"""Classical orthogonal polynomials in monic normalization.

Weights:

* Hermite   ``exp(-x**2)`` on the whole line
* Laguerre  ``x**m * exp(-x)`` on ``[0, inf)``
* Jacobi    ``(1 - x)**(2p - 1) * (1 + x)**(2q - 1)`` on ``[-1, 1]``

Jacobi families are parameterized by the fixed-charge strengths ``p`` (at
``x = 1``) and ``q`` (at ``x = -1``); the weight exponents are
``alpha = 2p - 1`` and ``beta = 2q - 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .numkernel import SymTridiag, tridiag_eigenvalues


class Family(str, Enum):
    HERMITE = "hermite"
    LAGUERRE = "laguerre"
    JACOBI = "jacobi"


@dataclass(frozen=True)
class PolynomialFamily:
    kind: Family
    laguerre_m: Optional[float] = None
    jacobi_p: Optional[float] = None
    jacobi_q: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Family(self.kind))
        if self.kind is Family.LAGUERRE:
            if self.laguerre_m is None or not math.isfinite(self.laguerre_m) or self.laguerre_m <= -1:
                raise ValueError(f"Laguerre parameter m must be > -1, got {self.laguerre_m}")
            object.__setattr__(self, "laguerre_m", float(self.laguerre_m))
        elif self.kind is Family.JACOBI:
            for name in ("jacobi_p", "jacobi_q"):
                v = getattr(self, name)
                if v is None or not math.isfinite(v) or v <= 0:
                    raise ValueError(f"Jacobi parameter {name[-1]} must be > 0, got {v}")
                object.__setattr__(self, name, float(v))

    @classmethod
    def hermite(cls):
        return cls(Family.HERMITE)

    @classmethod
    def laguerre(cls, m: float):
        return cls(Family.LAGUERRE, laguerre_m=m)

    @classmethod
    def jacobi(cls, p: float, q: float):
        return cls(Family.JACOBI, jacobi_p=p, jacobi_q=q)

    @property
    def interval(self) -> tuple:
        return {
            Family.HERMITE: (-math.inf, math.inf),
            Family.LAGUERRE: (0.0, math.inf),
            Family.JACOBI: (-1.0, 1.0),
        }[self.kind]

    @property
    def alpha(self) -> float:
        return 2 * self.jacobi_p - 1

    @property
    def beta(self) -> float:
        return 2 * self.jacobi_q - 1

    @property
    def label(self) -> str:
        if self.kind is Family.LAGUERRE:
            return f"laguerre(m={self.laguerre_m:g})"
        if self.kind is Family.JACOBI:
            return f"jacobi(p={self.jacobi_p:g},q={self.jacobi_q:g})"
        return "hermite"

    def is_symmetric(self) -> bool:
        return self.kind is Family.HERMITE or (
            self.kind is Family.JACOBI and self.jacobi_p == self.jacobi_q
        )


@dataclass(frozen=True)
class ZeroSet:
    n: int
    positions: tuple
    family: PolynomialFamily

    def __post_init__(self):
        pos = tuple(float(v) for v in self.positions)
        object.__setattr__(self, "positions", pos)
        if len(pos) != self.n:
            raise ValueError(f"expected {self.n} positions, got {len(pos)}")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("zero positions must be strictly increasing")
        lo, hi = self.family.interval
        if pos and not (lo < pos[0] and pos[-1] < hi):
            raise ValueError(f"zeros must lie strictly inside {self.family.interval}")

    def as_array(self) -> np.ndarray:
        return np.array(self.positions)


def recurrence_coefficients(fam: PolynomialFamily, k: int) -> tuple:
    """Coefficients ``(a_k, b_k)`` of ``p_{k+1} = (x - a_k) p_k - b_k p_{k-1}``.

    ``b_0`` is the total mass of the weight (it multiplies ``p_{-1} = 0``).
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if fam.kind is Family.HERMITE:
        return 0.0, (math.sqrt(math.pi) if k == 0 else k / 2.0)
    if fam.kind is Family.LAGUERRE:
        m = fam.laguerre_m
        return 2.0 * k + m + 1.0, (math.gamma(m + 1.0) if k == 0 else k * (k + m))
    a, b = fam.alpha, fam.beta
    s = a + b
    if k == 0:
        mass = 2.0 ** (s + 1) * math.gamma(a + 1) * math.gamma(b + 1) / math.gamma(s + 2)
        return (b - a) / (s + 2), mass
    ak = (b * b - a * a) / ((2 * k + s) * (2 * k + s + 2))
    if k == 1:
        bk = 4 * (1 + a) * (1 + b) / ((2 + s) ** 2 * (3 + s))
    else:
        bk = (
            4 * k * (k + a) * (k + b) * (k + s)
            / ((2 * k + s) ** 2 * (2 * k + s + 1) * (2 * k + s - 1))
        )
    return ak, bk


def jacobi_matrix(fam: PolynomialFamily, n: int) -> SymTridiag:
    coeffs = [recurrence_coefficients(fam, k) for k in range(n)]
    return SymTridiag(
        [a for a, _ in coeffs],
        [math.sqrt(b) for _, b in coeffs[1:]],
    )


def evaluate(fam: PolynomialFamily, n: int, x):
    """Monic ``f_n`` and its first two derivatives at ``x`` (scalar or array)."""
    x = np.asarray(x, dtype=float)
    p_prev, p = np.zeros_like(x), np.ones_like(x)
    d_prev, d = np.zeros_like(x), np.zeros_like(x)
    dd_prev, dd = np.zeros_like(x), np.zeros_like(x)
    for k in range(n):
        a, b = recurrence_coefficients(fam, k)
        if k == 0:
            b = 0.0
        xa = x - a
        p_next = xa * p - b * p_prev
        d_next = p + xa * d - b * d_prev
        dd_next = 2 * d + xa * dd - b * dd_prev
        p_prev, p = p, p_next
        d_prev, d = d, d_next
        dd_prev, dd = dd, dd_next
    if p.ndim == 0:
        return float(p), float(d), float(dd)
    return p, d, dd


def newton_correction(fam: PolynomialFamily, n: int, x) -> np.ndarray:
    """The Newton step ``f_n(x) / f_n'(x)``, computed with rescaling against overflow."""
    x = np.asarray(x, dtype=float)
    p_prev, p = np.zeros_like(x), np.ones_like(x)
    d_prev, d = np.zeros_like(x), np.zeros_like(x)
    for k in range(n):
        a, b = recurrence_coefficients(fam, k)
        if k == 0:
            b = 0.0
        xa = x - a
        p_next = xa * p - b * p_prev
        d_next = p + xa * d - b * d_prev
        p_prev, p, d_prev, d = p, p_next, d, d_next
        scale = np.maximum(np.abs(p), np.abs(d))
        big = scale > 1e150
        if np.any(big):
            s = np.where(big, scale, 1.0)
            p_prev, p, d_prev, d = p_prev / s, p / s, d_prev / s, d / s
    return p / d


def zeros(fam: PolynomialFamily, n: int) -> ZeroSet:
    """Zeros of the degree-``n`` monic polynomial by Golub-Welsch plus one Newton polish."""
    if n < 1:
        raise ValueError("n must be >= 1")
    eig = np.array(tridiag_eigenvalues(jacobi_matrix(fam, n)))
    eig = eig - newton_correction(fam, n, eig)
    return ZeroSet(n, tuple(np.sort(eig)), fam)


def ode_terms(fam: PolynomialFamily, n: int, x):
    """The three terms of the family ODE applied to the monic ``f_n`` at ``x``.

    Hermite:  f'' - 2x f' + 2n f
    Laguerre: x f'' + (m + 1 - x) f' + n f
    Jacobi:   (1 - x^2) f'' + 2[q - p - (p + q) x] f' + n[n + 2(p + q) - 1] f
    """
    v, d1, d2 = evaluate(fam, n, x)
    x = np.asarray(x, dtype=float)
    if fam.kind is Family.HERMITE:
        terms = (d2, -2 * x * d1, 2 * n * v)
    elif fam.kind is Family.LAGUERRE:
        m = fam.laguerre_m
        terms = (x * d2, (m + 1 - x) * d1, n * v)
    else:
        p, q = fam.jacobi_p, fam.jacobi_q
        terms = ((1 - x * x) * d2, 2 * (q - p - (p + q) * x) * d1, n * (n + 2 * (p + q) - 1) * v)
    return terms


def ode_residual(fam: PolynomialFamily, n: int, x):
    """Absolute value of the family ODE applied to the monic ``f_n`` at ``x``."""
    t0, t1, t2 = ode_terms(fam, n, x)
    res = np.abs(t0 + t1 + t2)
    return float(res) if np.ndim(res) == 0 else res


def ode_scale(fam: PolynomialFamily, n: int, x):
    """Sum of absolute ODE terms, the natural scale for :func:`ode_residual`."""
    t0, t1, t2 = ode_terms(fam, n, x)
    s = np.abs(t0) + np.abs(t1) + np.abs(t2)
    return float(s) if np.ndim(s) == 0 else s


def oscillatory_range(fam: PolynomialFamily, n: int) -> tuple:
    """A finite interval containing all degree-``n`` zeros (used for sampling)."""
    if fam.kind is Family.HERMITE:
        r = math.sqrt(2 * n + 1) + 1.0
        return -r, r
    if fam.kind is Family.LAGUERRE:
        return 0.0, 4.0 * n + 2 * fam.laguerre_m + 4.0
    return -1.0, 1.0


def chebyshev_samples(fam: PolynomialFamily, n: int, count: int = 21) -> np.ndarray:
    lo, hi = oscillatory_range(fam, n)
    k = np.arange(1, count + 1)
    return 0.5 * (lo + hi) - 0.5 * (hi - lo) * np.cos((2 * k - 1) * np.pi / (2 * count))
