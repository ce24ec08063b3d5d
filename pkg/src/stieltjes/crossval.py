"""Three-route agreement reports: polynomial zeros, charge equilibria, QHJ nodes."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from .electrostatics import certify_stability, field_for_family, solve_equilibrium
from .errors import NumericalError
from .orthopoly import PolynomialFamily, zeros
from . import qhj


@dataclass(frozen=True)
class TolerancePolicy:
    positions: float = 1e-9
    riccati: float = 1e-7
    quantization: float = 1e-8


@dataclass
class CrossReport:
    subject: str
    n: int
    route_zeros: tuple
    route_equilibrium: tuple
    route_nodes: Optional[tuple]
    dev_zeros_eq: Optional[float]
    dev_eq_nodes: Optional[float]
    dev_zeros_nodes: Optional[float]
    min_hess_eig: Optional[float]
    stable: bool
    riccati_max: Optional[float]
    J: Optional[float]
    tol: float
    passed: bool
    message: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "CrossReport":
        kw = {f.name: d[f.name] for f in fields(cls)}
        for key in ("route_zeros", "route_equilibrium", "route_nodes"):
            if kw[key] is not None:
                kw[key] = tuple(kw[key])
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> "CrossReport":
        return cls.from_dict(json.loads(text))


def _max_dev(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.shape != b.shape:
        return math.inf
    return float(np.max(np.abs(np.sort(a) - np.sort(b))))


def _finite_or_none(v):
    return None if v is None or not math.isfinite(v) else float(v)


def verify_family(fam: PolynomialFamily, n: int, tol: float = 1e-9) -> CrossReport:
    """Compare Golub-Welsch zeros with the electrostatic equilibrium for ``fam``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not tol > 0:
        raise ValueError("tol must be > 0")
    z = ()
    try:
        z = zeros(fam, n).positions
        eq = solve_equilibrium(n, field_for_family(fam), fam.interval)
        stable, lam = certify_stability(eq)
    except NumericalError as exc:
        return CrossReport(fam.label, n, z, (), None, None, None, None, None, False,
                           None, None, tol, False, f"numerical failure: {exc}")
    dev = _max_dev(z, eq.config.positions)
    passed = dev <= tol and stable
    return CrossReport(
        subject=fam.label,
        n=n,
        route_zeros=z,
        route_equilibrium=eq.config.positions,
        route_nodes=None,
        dev_zeros_eq=dev,
        dev_eq_nodes=None,
        dev_zeros_nodes=None,
        min_hess_eig=lam,
        stable=stable,
        riccati_max=None,
        J=None,
        tol=tol,
        passed=passed,
        message="" if passed else f"deviation {dev:.3e} or unstable",
    )


def verify_model(kind, params=None, n: int = 0, tol: float = 1e-9,
                 policy: TolerancePolicy = TolerancePolicy()) -> CrossReport:
    """Three-way check for a built-in quantum model, in the polynomial variable.

    The electrostatic route uses the model's fitted field mapped into the
    polynomial variable, so it depends on the QHJ residue fit rather than on
    the family table.
    """
    model = qhj.build_model(kind, params)
    if n < 0:
        raise ValueError("n must be >= 0")
    lev = model.level(n)
    problems = []
    try:
        nodes_phys = qhj.wavefunction_nodes(model, n).as_array()
        nodes = tuple(nodes_phys * lev.scale)
        if n:
            fam = model.family_map
            z = zeros(fam, n).positions
            fld = lev.field.rescaled(lev.scale)
            if not fld.is_close(field_for_family(fam)):
                problems.append("fitted field does not match the family field")
            eq = solve_equilibrium(n, fld, fam.interval)
            stable, lam = certify_stability(eq)
            eq_pos = eq.config.positions
        else:
            z, eq_pos, stable, lam = (), (), True, None
        grid = qhj.riccati_grid(model, n)
        ric = float(np.max(qhj.riccati_residual(model, n, grid)))
        j = qhj.quantize_contour(model, n)
    except NumericalError as exc:
        return CrossReport(model.label, n, (), (), None, None, None, None, None, False,
                           None, None, tol, False, f"numerical failure: {exc}")
    d_ze = _max_dev(z, eq_pos)
    d_en = _max_dev(eq_pos, nodes)
    d_zn = _max_dev(z, nodes)
    if max(d_ze, d_en, d_zn) > tol:
        problems.append(f"position deviation {max(d_ze, d_en, d_zn):.3e} > {tol:g}")
    if not stable:
        problems.append("equilibrium not stable")
    if ric > policy.riccati:
        problems.append(f"riccati residual {ric:.3e} > {policy.riccati:g}")
    if abs(j - n) > policy.quantization:
        problems.append(f"|J - n| = {abs(j - n):.3e} > {policy.quantization:g}")
    return CrossReport(
        subject=model.label,
        n=n,
        route_zeros=tuple(z),
        route_equilibrium=tuple(eq_pos),
        route_nodes=nodes,
        dev_zeros_eq=d_ze,
        dev_eq_nodes=d_en,
        dev_zeros_nodes=d_zn,
        min_hess_eig=_finite_or_none(lam),
        stable=stable,
        riccati_max=ric,
        J=j,
        tol=tol,
        passed=not problems,
        message="; ".join(problems),
    )
