"""Quantum momentum function for exactly solvable models (hbar = mass = 1).

The momentum is ``p = -i d/dx ln psi``.  Writing ``psi = f exp(-U)`` with
``f`` the monic node polynomial and ``U' = F`` a real rational field gives::

    p(x) = -i * (sum_k 1/(x - x_k) - F(x))

so the nodes are simple poles of residue ``-i`` and ``Q = i F`` carries the
fixed-pole structure.  Substituting into ``p**2 - i p' = 2 (E - V)`` yields::

    f'' - 2 F f' + (2E - 2V + F**2 - F') f = 0

The residues of ``F`` are fixed by requiring ``sigma * bracket`` to be a
constant ``lambda`` (``sigma = 1`` for the oscillator, ``r`` for Coulomb,
the leading coefficient of the resulting hypergeometric-type equation), and
requiring a degree-``n`` polynomial solution gives
``lambda = -n * tau'`` with ``tau = -2 sigma F``.  That termination condition
quantizes the energy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .electrostatics import FieldSpec
from .errors import CurveError, ModelFitError, NumericalError, PreconditionError
from .numkernel import ClosedCurve, contour_integral, default_curve
from .orthopoly import PolynomialFamily, ZeroSet, zeros

POLE_GUARD = 1e-3
FD_STEP = 1e-6


class ModelKind(str, Enum):
    OSCILLATOR = "oscillator"
    COULOMB = "coulomb"


@dataclass(frozen=True)
class QuantumModel:
    """A built-in exactly solvable model with its Q ansatz and family map.

    For Coulomb the fixed-pole residue ``b = -(l+1)`` is resolved at build
    time; the constant part of the field depends on the level and is produced
    by :meth:`level`.
    """

    kind: ModelKind
    l: int = 0
    interval: tuple = (-math.inf, math.inf)
    q_structure: str = ""
    family_map: Optional[PolynomialFamily] = None
    pole_residue: float = 0.0

    @property
    def label(self) -> str:
        return "oscillator" if self.kind is ModelKind.OSCILLATOR else f"coulomb(l={self.l})"

    def potential(self, x):
        if self.kind is ModelKind.OSCILLATOR:
            return 0.5 * x * x
        return -1.0 / x + self.l * (self.l + 1) / (2.0 * x * x)

    def sigma(self, x):
        return 1.0 + 0.0 * x if self.kind is ModelKind.OSCILLATOR else x

    def level(self, n: int) -> "Level":
        return _level(self, n)


@dataclass(frozen=True)
class Level:
    """Resolved data for quantum number ``n``.

    ``scale`` maps the physical variable to the polynomial variable:
    ``x_poly = scale * x_phys``.
    """

    n: int
    energy: float
    field: FieldSpec
    scale: float
    termination_rule: str


@dataclass(frozen=True)
class SpectrumResult:
    n: int
    energy: float
    termination_rule: str


def build_model(kind, l: Optional[int] = None) -> QuantumModel:
    """Construct a built-in model and resolve the n-independent residues."""
    kind = ModelKind(kind)
    if kind is ModelKind.OSCILLATOR:
        model = QuantumModel(
            kind=kind,
            l=0,
            interval=(-math.inf, math.inf),
            q_structure="iQ = c0 + c1*x",
            family_map=PolynomialFamily.hermite(),
        )
    else:
        if l is None or int(l) != l or l < 0:
            raise ValueError(f"Coulomb angular momentum must be an integer >= 0, got {l}")
        l = int(l)
        # 1/r term of r*bracket: b^2 + b = l(l+1), roots l and -(l+1);
        # psi ~ r^(-b) must vanish at the origin
        b = -(l + 1)
        model = QuantumModel(
            kind=kind,
            l=l,
            interval=(0.0, math.inf),
            q_structure="iQ = C + b/r",
            family_map=PolynomialFamily.laguerre(2 * l + 1),
            pole_residue=float(b),
        )
    _check_balance(model, model.level(0))
    return model


def _fit_oscillator(n: int) -> tuple:
    # x^2 balance: c1^2 = 1, c1 > 0 for normalizability; x^1: 2 c0 c1 = 0
    c1, c0 = Fraction(1), Fraction(0)
    lam = 2 * n * c1  # -n * tau', tau = -2 (c0 + c1 x)
    energy = (lam + c1) / 2  # lambda = 2E + c0^2 - c1
    rule = "lambda = 2E - 1 = -n*tau' = 2n  =>  E = n + 1/2"
    return FieldSpec(float(c0), float(c1), ()), energy, Fraction(1), rule


def _fit_coulomb(l: int, n: int) -> tuple:
    b = Fraction(-(l + 1))
    # r*bracket = (2E + C^2) r + (2 + 2 C b) + (b^2 + b - l(l+1))/r
    # constant term must equal -n*tau' = 2 n C, tau = -2 (C r + b)
    c = 1 / (n - b)
    energy = -c * c / 2
    rule = "2 + 2Cb = -n*tau' = 2nC, b = -(l+1)  =>  C = 1/(n+l+1), E = -C^2/2"
    return FieldSpec(float(c), 0.0, ((0.0, float(b)),)), energy, 2 * c, rule


@lru_cache(maxsize=None)
def _level(model: QuantumModel, n: int) -> Level:
    if n < 0:
        raise ValueError("n must be >= 0")
    if model.kind is ModelKind.OSCILLATOR:
        fld, energy, scale, rule = _fit_oscillator(n)
    else:
        fld, energy, scale, rule = _fit_coulomb(model.l, n)
    return Level(n, float(energy), fld, float(scale), rule)


def _check_balance(model: QuantumModel, lev: Level, points: int = 17):
    """Verify numerically that ``sigma * (2E - 2V + F^2 - F')`` is constant."""
    if model.kind is ModelKind.OSCILLATOR:
        xs = np.linspace(-4, 4, points)
    else:
        xs = np.linspace(0.25, 12, points)
    fld = lev.field
    bracket = 2 * lev.energy - 2 * model.potential(xs) + fld.value(xs) ** 2 - fld.derivative(xs)
    vals = model.sigma(xs) * bracket
    spread = float(np.max(vals) - np.min(vals))
    if spread > 1e-9 * max(1.0, float(np.max(np.abs(vals)))):
        raise ModelFitError(f"{model.label}: sigma*bracket not constant (spread {spread:.3e})")


def spectrum(model: QuantumModel, n: int) -> SpectrumResult:
    lev = model.level(n)
    return SpectrumResult(n, lev.energy, lev.termination_rule)


def wavefunction_nodes(model: QuantumModel, n: int) -> ZeroSet:
    """Nodes in the physical variable: family-map zeros divided by the level scale."""
    if n == 0:
        return ZeroSet(0, (), model.family_map)
    lev = model.level(n)
    z = zeros(model.family_map, n).as_array() / lev.scale
    return ZeroSet(n, tuple(z), model.family_map)


@lru_cache(maxsize=None)
def _nodes_array(model: QuantumModel, n: int) -> np.ndarray:
    a = wavefunction_nodes(model, n).as_array()
    a.setflags(write=False)
    return a


def qmf_poles(model: QuantumModel, n: int) -> tuple:
    """(moving poles, fixed poles) of the momentum function."""
    return tuple(_nodes_array(model, n)), tuple(s for s, _ in model.level(n).field.poles)


def qmf_eval(model: QuantumModel, n: int, x):
    """``p(x) = -i (f'/f - F)(x)`` for scalar or array ``x`` (complex allowed)."""
    z = np.asarray(x, dtype=complex)
    nodes = _nodes_array(model, n)
    fld = model.level(n).field
    moving, fixed = nodes, [s for s, _ in fld.poles]
    for s in list(moving) + fixed:
        if np.any(z == s):
            raise NumericalError(f"momentum function evaluated at its pole {s}")
    log_deriv = np.sum(1.0 / (z[..., None] - nodes), axis=-1) if nodes.size else 0.0 * z
    p = -1j * (log_deriv - fld.value(z))
    return complex(p) if p.ndim == 0 else p


def _min_pole_distance(model, n, x):
    moving, fixed = qmf_poles(model, n)
    poles = np.array(moving + fixed)
    if poles.size == 0:
        return np.full(np.shape(x), np.inf)
    return np.min(np.abs(np.asarray(x, dtype=float)[..., None] - poles), axis=-1)


def riccati_residual(model: QuantumModel, n: int, x):
    """``|p^2 - i p' - 2(E_n - V)|`` with ``p'`` from central differences."""
    x = np.asarray(x, dtype=float)
    if np.any(_min_pole_distance(model, n, x) < POLE_GUARD):
        raise PreconditionError(f"sample within {POLE_GUARD} of a pole of p")
    e = model.level(n).energy
    p = qmf_eval(model, n, x)
    xp, xm = x + FD_STEP, x - FD_STEP
    dp = (qmf_eval(model, n, xp) - qmf_eval(model, n, xm)) / (xp - xm)
    res = np.abs(p * p - 1j * dp - 2 * (e - model.potential(x)))
    return float(res) if res.ndim == 0 else res


def riccati_grid(model: QuantumModel, n: int, points: int = 21) -> np.ndarray:
    """Equispaced sample points over the node region, nudged away from poles.

    A point closer than a quarter of the local node spacing (capped at 0.1)
    to a node is moved to that distance.
    """
    nodes = _nodes_array(model, n)
    if model.kind is ModelKind.OSCILLATOR:
        r = (float(np.max(np.abs(nodes))) if nodes.size else 0.0) + 1.5
        lo, hi = -r, r
    else:
        lo = 0.5
        hi = max(20.0, 1.1 * float(nodes[-1])) if nodes.size else 20.0
    xs = np.linspace(lo, hi, points)
    if nodes.size:
        gaps = np.diff(nodes)
        for i, x in enumerate(xs):
            k = int(np.argmin(np.abs(nodes - x)))
            local = [g for g in (gaps[k - 1] if k > 0 else None, gaps[k] if k < gaps.size else None)
                     if g is not None]
            guard = min(0.25 * min(local), 0.1) if local else 0.1
            d = x - nodes[k]
            if abs(d) < guard:
                xs[i] = nodes[k] + math.copysign(guard, d if d != 0 else 1.0)
    return xs


def model_curve(model: QuantumModel, n: int) -> ClosedCurve:
    """Default ellipse: encloses every node, keeps every fixed pole outside."""
    moving, fixed = qmf_poles(model, n)
    fallback = 0.0 if model.kind is ModelKind.OSCILLATOR else float(model.l + 1)
    return default_curve(moving, fixed, fallback_center=fallback)


def action_integral(model: QuantumModel, n: int, curve: Optional[ClosedCurve] = None) -> complex:
    """``(1 / 2 pi) * closed integral of p dz`` along ``curve`` (complex)."""
    c = curve if curve is not None else model_curve(model, n)
    moving, fixed = qmf_poles(model, n)
    for s in moving:
        if not c.contains(s):
            raise CurveError(f"curve does not enclose the node {s:.6g}")
    for s in fixed:
        if c.contains(s):
            raise CurveError(f"curve encloses the fixed pole {s:.6g}")
    _, z, _ = c.samples()
    for s in moving + fixed:
        if np.min(np.abs(z - s)) < POLE_GUARD:
            raise CurveError(f"curve passes within {POLE_GUARD} of the pole {s:.6g}")
    return contour_integral(lambda w: qmf_eval(model, n, w), c) / (2 * math.pi)


def quantize_contour(model: QuantumModel, n: int, curve: Optional[ClosedCurve] = None) -> float:
    """The action variable J as a real number; should equal ``n``."""
    j = action_integral(model, n, curve)
    if abs(j.imag) > 1e-9:
        raise NumericalError(f"action integral has imaginary part {j.imag:.3e}")
    return j.real


def node_residues(model: QuantumModel, n: int, radius: float = 1e-2, points: int = 64) -> list:
    """Residue of ``p`` at each node from a small circle: ``(1/2 pi i) closed integral``."""
    out = []
    for s in _nodes_array(model, n):
        c = ClosedCurve(float(s), radius, radius, points)
        out.append(contour_integral(lambda w: qmf_eval(model, n, w), c) / (2j * math.pi))
    return out
