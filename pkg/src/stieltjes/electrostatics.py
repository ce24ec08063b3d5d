"""Unit logarithmic charges on a line in a rational external field.

Energy of positions ``x_1 < ... < x_n``::

    E = -sum_{i<j} log|x_i - x_j| + sum_i U(x_i)

with ``U' = F`` and ``F(x) = c0 + c1 x + sum_j r_j / (x - s_j)``.  The
equilibrium condition is ``sum_{j != k} 1 / (x_k - x_j) = F(x_k)``, which by
``f''(x_k) / f'(x_k) = 2 sum_{j != k} 1 / (x_k - x_j)`` is the zero relation
``f'' = 2 F f'`` of the monic polynomial with those zeros.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import PreconditionError, SingularConfigurationError
from .numkernel import NewtonOptions, newton_solve, symmetric_min_eigenvalue
from .orthopoly import Family, PolynomialFamily

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FieldSpec:
    c0: float = 0.0
    c1: float = 0.0
    poles: tuple = ()

    def __post_init__(self):
        poles = tuple((float(s), float(r)) for s, r in self.poles)
        locs = [s for s, _ in poles]
        if len(set(locs)) != len(locs):
            raise ValueError(f"field pole locations must be distinct: {locs}")
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "c0", float(self.c0))
        object.__setattr__(self, "c1", float(self.c1))

    def value(self, x):
        out = self.c0 + self.c1 * x
        for s, r in self.poles:
            out = out + r / (x - s)
        return out

    def derivative(self, x):
        out = self.c1 + 0.0 * x
        for s, r in self.poles:
            out = out - r / (x - s) ** 2
        return out

    def potential(self, x):
        """External potential ``U`` with ``U' = F`` and ``U`` free of constants."""
        out = self.c0 * x + 0.5 * self.c1 * x * x
        for s, r in self.poles:
            out = out + r * np.log(np.abs(x - s))
        return out

    def rescaled(self, scale: float) -> "FieldSpec":
        """The field seen in the variable ``y = scale * x``.

        Chosen so that equilibria map to equilibria: ``F_y(y) = F(y / scale) / scale``.
        """
        return FieldSpec(
            self.c0 / scale,
            self.c1 / scale**2,
            tuple((scale * s, r) for s, r in self.poles),
        )

    def is_close(self, other: "FieldSpec", tol: float = 1e-12) -> bool:
        if len(self.poles) != len(other.poles):
            return False
        pairs = [(self.c0, other.c0), (self.c1, other.c1)]
        for (s1, r1), (s2, r2) in zip(sorted(self.poles), sorted(other.poles)):
            pairs += [(s1, s2), (r1, r2)]
        return all(abs(a - b) <= tol * max(1.0, abs(a), abs(b)) for a, b in pairs)


def field_for_family(fam: PolynomialFamily) -> FieldSpec:
    """The real field whose equilibria are the zeros of ``fam``'s polynomials."""
    if fam.kind is Family.HERMITE:
        return FieldSpec(0.0, 1.0, ())
    if fam.kind is Family.LAGUERRE:
        return FieldSpec(0.5, 0.0, ((0.0, -(fam.laguerre_m + 1) / 2),))
    return FieldSpec(0.0, 0.0, ((1.0, -fam.jacobi_p), (-1.0, -fam.jacobi_q)))


@dataclass(frozen=True)
class ChargeConfiguration:
    positions: tuple
    interval: tuple = (-math.inf, math.inf)

    def __post_init__(self):
        pos = tuple(float(v) for v in self.positions)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "interval", tuple(float(v) for v in self.interval))
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("charge positions must be strictly increasing")
        lo, hi = self.interval
        if pos and not (lo < pos[0] and pos[-1] < hi):
            raise ValueError(f"charges must lie strictly inside {self.interval}")

    @property
    def n(self) -> int:
        return len(self.positions)

    def as_array(self) -> np.ndarray:
        return np.array(self.positions)


def _positions(cfg) -> np.ndarray:
    if isinstance(cfg, ChargeConfiguration):
        return cfg.as_array()
    return np.asarray(cfg, dtype=float)


def _check(x: np.ndarray, fld: FieldSpec):
    if x.size > 1 and len(np.unique(x)) != x.size:
        raise SingularConfigurationError("two charges coincide")
    for s, _ in fld.poles:
        if np.any(x == s):
            raise SingularConfigurationError(f"charge sits on the field pole at {s}")


def _inverse_differences(x: np.ndarray) -> np.ndarray:
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, np.inf)
    return 1.0 / diff


def energy(cfg, fld: FieldSpec) -> float:
    x = _positions(cfg)
    _check(x, fld)
    iu = np.triu_indices(x.size, 1)
    mutual = -np.sum(np.log(np.abs(x[iu[0]] - x[iu[1]])))
    return float(mutual + np.sum(fld.potential(x)))


def gradient(cfg, fld: FieldSpec) -> np.ndarray:
    """Component k: ``-sum_{j != k} 1/(x_k - x_j) + F(x_k)``."""
    x = _positions(cfg)
    _check(x, fld)
    return -np.sum(_inverse_differences(x), axis=1) + fld.value(x)


def hessian(cfg, fld: FieldSpec) -> np.ndarray:
    x = _positions(cfg)
    _check(x, fld)
    inv2 = _inverse_differences(x) ** 2
    h = -inv2
    h[np.diag_indices_from(h)] = np.sum(inv2, axis=1) + fld.derivative(x)
    return h


@dataclass
class EquilibriumResult:
    config: ChargeConfiguration
    field: FieldSpec
    residual_norm: float
    iterations: int
    min_hessian_eigenvalue: float
    stable: bool
    energy_history: list = field(default_factory=list)
    monotone: bool = True


def default_initializer(n: int, fld: FieldSpec, interval) -> np.ndarray:
    """Ordered starting positions inside ``interval``.

    [-1, 1]: Chebyshev points.  Whole line: Chebyshev points scaled to
    ``[-sqrt(2n+1), sqrt(2n+1)]``.  Half line: ``0.5 k (4n + 2m) / (n + 1)``,
    with ``m`` read off the strength of the field pole at 0.
    """
    k = np.arange(1, n + 1)
    cheb = -np.cos((2 * k - 1) * np.pi / (2 * n))
    lo, hi = interval
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi) + 0.5 * (hi - lo) * cheb
    if math.isinf(lo) and math.isinf(hi):
        return math.sqrt(2 * n + 1) * cheb
    strength = dict(fld.poles).get(lo, -0.5)
    m = max(-2 * strength - 1, -0.99)
    pts = 0.5 * k * (4 * n + 2 * m) / (n + 1)
    return lo + pts if math.isfinite(lo) else hi - pts[::-1]


def solve_equilibrium(
    n: int,
    fld: FieldSpec,
    interval=(-math.inf, math.inf),
    init: Optional[ChargeConfiguration] = None,
    opts: Optional[NewtonOptions] = None,
) -> EquilibriumResult:
    """Equilibrium of ``n`` unit charges in ``fld`` by guarded, energy-monotone Newton."""
    if n < 1:
        raise ValueError("n must be >= 1")
    interval = tuple(float(v) for v in interval)
    lo, hi = interval
    for s, _ in fld.poles:
        if lo < s < hi:
            raise PreconditionError(f"field pole {s} lies inside the charge interval {interval}")
    x0 = init.as_array() if init is not None else default_initializer(n, fld, interval)
    if x0.size != n:
        raise ValueError(f"initial configuration has {x0.size} charges, expected {n}")
    if opts is None:
        opts = NewtonOptions(
            max_iter=100,
            residual_tol=1e-12 * n,
            ordering_guard=True,
            bounds=interval,
            step_tol=1e-12,
        )
    sol = newton_solve(
        lambda x: gradient(x, fld),
        lambda x: hessian(x, fld),
        x0,
        opts,
        merit=lambda x: energy(x, fld),
    )
    steps = np.diff(sol.merit_history)
    monotone = bool(np.all(steps <= 8 * np.finfo(float).eps * (1 + np.abs(sol.merit_history[:-1]))))
    log.debug("equilibrium n=%d: %d iterations, residual %.3e, energy monotone=%s",
              n, sol.iterations, sol.residual_norm, monotone)
    cfg = ChargeConfiguration(tuple(sol.x), interval)
    lam = symmetric_min_eigenvalue(hessian(cfg, fld))
    return EquilibriumResult(
        config=cfg,
        field=fld,
        residual_norm=sol.residual_norm,
        iterations=sol.iterations,
        min_hessian_eigenvalue=lam,
        stable=lam > 0,
        energy_history=list(sol.merit_history),
        monotone=monotone,
    )


def certify_stability(res: EquilibriumResult) -> tuple:
    """Recompute the Hessian certificate at ``res``; returns ``(stable, min_eigenvalue)``."""
    n = res.config.n
    norm = float(np.linalg.norm(gradient(res.config, res.field)))
    if norm > 1e-8 * n:
        raise PreconditionError(f"configuration is not stationary (gradient norm {norm:.3e})")
    lam = symmetric_min_eigenvalue(hessian(res.config, res.field))
    return lam > 0, lam
