"""Self-contained numerical kernels.

* ``tridiag_eigenvalues``: implicit-shift QL with deflation for symmetric
  tridiagonal matrices (the Golub-Welsch backend).
* ``symmetric_eigenvalues`` / ``symmetric_min_eigenvalue``: cyclic Jacobi
  rotations for dense symmetric matrices.
* ``newton_solve``: damped Newton iteration with an optional ordering guard
  and an optional merit function for backtracking.
* ``contour_integral``: periodic trapezoid rule on an ellipse.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    CurveError,
    EigenvalueError,
    PreconditionError,
    SingularJacobianError,
)

EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# Symmetric tridiagonal eigenvalues
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymTridiag:
    """Symmetric tridiagonal matrix stored by its diagonal and off-diagonal."""

    diag: tuple
    offdiag: tuple

    def __post_init__(self):
        object.__setattr__(self, "diag", tuple(float(v) for v in self.diag))
        object.__setattr__(self, "offdiag", tuple(float(v) for v in self.offdiag))
        if len(self.diag) == 0:
            raise ValueError("empty tridiagonal matrix")
        if len(self.offdiag) != len(self.diag) - 1:
            raise ValueError(
                f"offdiag must have length {len(self.diag) - 1}, got {len(self.offdiag)}"
            )
        bad = [v for v in self.diag + self.offdiag if not math.isfinite(v)]
        if bad:
            raise ValueError(f"non-finite entries in tridiagonal matrix: {bad[:3]}")

    @property
    def n(self) -> int:
        return len(self.diag)

    def dense(self) -> np.ndarray:
        m = np.diag(np.asarray(self.diag))
        if self.n > 1:
            off = np.asarray(self.offdiag)
            m += np.diag(off, 1) + np.diag(off, -1)
        return m


def tridiag_eigenvalues(t: SymTridiag, max_iter: int = 60) -> list[float]:
    """Eigenvalues of ``t`` in ascending order (implicit QL, Wilkinson-type shift).

    ``max_iter`` bounds the QL sweeps spent on any single eigenvalue.
    """
    n = t.n
    d = list(t.diag)
    e = list(t.offdiag) + [0.0]
    for l in range(n):
        iters = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= EPS * dd:
                    break
                m += 1
            if m == l:
                break
            if iters == max_iter:
                raise EigenvalueError(
                    f"QL iteration did not converge for eigenvalue {l} after {max_iter} sweeps"
                )
            iters += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    # split at an underflowed rotation and restart this block
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return sorted(d)


# ---------------------------------------------------------------------------
# Dense symmetric eigenvalues (cyclic Jacobi)
# ---------------------------------------------------------------------------

def _as_symmetric(m) -> np.ndarray:
    a = np.array(m, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise PreconditionError("matrix has non-finite entries")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if a.size and np.max(np.abs(a - a.T)) > 1e-12 * max(scale, np.finfo(float).tiny):
        raise PreconditionError("matrix is not symmetric to 1e-12 relative")
    return 0.5 * (a + a.T)


def symmetric_eigenvalues(m, max_sweeps: int = 60) -> np.ndarray:
    """All eigenvalues of a dense symmetric matrix, ascending, by cyclic Jacobi."""
    a = _as_symmetric(m)
    n = a.shape[0]
    if n == 0:
        return np.array([])
    frob = float(np.linalg.norm(a))
    if frob == 0.0:
        return np.zeros(n)
    for _ in range(max_sweeps):
        off = float(np.sqrt(np.sum(np.triu(a, 1) ** 2)))
        if off <= EPS * frob:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300 or abs(apq) <= 0.1 * EPS * math.sqrt(abs(a[p, p] * a[q, q])):
                    a[p, q] = a[q, p] = 0.0
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
    else:
        raise EigenvalueError(f"cyclic Jacobi did not converge in {max_sweeps} sweeps")
    return np.sort(np.diag(a))


def symmetric_min_eigenvalue(m) -> float:
    """Smallest eigenvalue of a dense symmetric matrix."""
    return float(symmetric_eigenvalues(m)[0])


# ---------------------------------------------------------------------------
# Damped Newton
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NewtonOptions:
    """Settings for :func:`newton_solve`.

    ``step_damping`` is the largest step fraction tried (1 = full Newton step);
    rejected trial steps are halved.  With ``ordering_guard`` set, the iterate
    must stay strictly increasing and strictly inside ``bounds``, and no gap
    (or distance to a finite bound) may shrink below ``guard_margin`` times
    its current value in one step.  A positive ``step_tol`` additionally
    requires the last applied step to satisfy
    ``max|step| <= step_tol * max(1, max|x|)`` before stopping.
    """

    max_iter: int = 100
    residual_tol: float = 1e-12
    step_damping: float = 1.0
    ordering_guard: bool = False
    bounds: tuple = (-math.inf, math.inf)
    guard_margin: float = 0.1
    max_halvings: int = 60
    step_tol: float = 0.0

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be > 0")
        if not 0 < self.step_damping <= 1:
            raise ValueError("step_damping must lie in (0, 1]")


@dataclass
class NewtonResult:
    x: np.ndarray
    iterations: int
    residual_norm: float
    history: list = field(default_factory=list)
    merit_history: list = field(default_factory=list)

    def __iter__(self):
        # allows ``x, iterations, norm = newton_solve(...)``
        return iter((self.x, self.iterations, self.residual_norm))


def _guard_gaps(x: np.ndarray, bounds) -> np.ndarray:
    lo, hi = bounds
    parts = [np.diff(x)]
    if math.isfinite(lo):
        parts.append([x[0] - lo])
    if math.isfinite(hi):
        parts.append([hi - x[-1]])
    return np.concatenate(parts)


def _admissible(x: np.ndarray, bounds) -> bool:
    return bool(np.all(_guard_gaps(x, bounds) > 0))


def newton_solve(
    residual: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], np.ndarray],
    x0: Sequence[float],
    opts: NewtonOptions = NewtonOptions(),
    merit: Optional[Callable[[np.ndarray], float]] = None,
) -> NewtonResult:
    """Solve ``residual(x) = 0`` by damped Newton steps.

    If ``merit`` is supplied the step is also halved until the merit value does
    not increase (beyond rounding), which makes the iteration monotone in it.
    The convergence test uses the Euclidean norm of the residual.
    """
    x = np.array(x0, dtype=float)
    if opts.ordering_guard and not _admissible(x, opts.bounds):
        raise PreconditionError("initial iterate violates ordering or bounds")
    r = np.asarray(residual(x), dtype=float)
    norm = float(np.linalg.norm(r))
    history = [norm]
    merits = [merit(x)] if merit is not None else []
    best_x, best_norm = x.copy(), norm
    iterations = 0
    last_step = math.inf

    def done():
        if norm > opts.residual_tol:
            return False
        if opts.step_tol <= 0:
            return True
        return last_step <= opts.step_tol * max(1.0, float(np.max(np.abs(x))))

    while not done():
        if iterations >= opts.max_iter:
            raise ConvergenceError(
                f"no convergence in {opts.max_iter} iterations (residual {best_norm:.3e})",
                best_iterate=best_x,
                history=history,
            )
        jac = np.asarray(jacobian(x), dtype=float)
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(f"singular Jacobian at iteration {iterations}", x.copy()) from exc
        if not np.all(np.isfinite(step)):
            raise SingularJacobianError(f"non-finite Newton step at iteration {iterations}", x.copy())

        t = opts.step_damping
        old_gaps = _guard_gaps(x, opts.bounds) if opts.ordering_guard else None
        for _ in range(opts.max_halvings):
            trial = x + t * step
            ok = True
            if opts.ordering_guard:
                ok = bool(np.all(_guard_gaps(trial, opts.bounds) > opts.guard_margin * old_gaps))
            if ok and merit is not None:
                m_new = merit(trial)
                slack = 8 * EPS * (1.0 + abs(merits[-1]))
                ok = math.isfinite(m_new) and m_new <= merits[-1] + slack
            if ok:
                break
            t *= 0.5
        else:
            raise ConvergenceError(
                f"step length underflow at iteration {iterations}",
                best_iterate=best_x,
                history=history,
            )
        last_step = float(np.max(np.abs(trial - x)))
        x = trial
        iterations += 1
        r = np.asarray(residual(x), dtype=float)
        norm = float(np.linalg.norm(r))
        history.append(norm)
        if merit is not None:
            merits.append(m_new)
        if norm < best_norm:
            best_x, best_norm = x.copy(), norm
    return NewtonResult(x, iterations, norm, history, merits)


# ---------------------------------------------------------------------------
# Contour quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosedCurve:
    """Positively oriented ellipse ``center + a cos t + i b sin t`` sampled at ``points``."""

    center: float
    semi_axis_real: float
    semi_axis_imag: float
    points: int = 512
    kind: str = "ellipse"

    def __post_init__(self):
        if self.kind != "ellipse":
            raise ValueError(f"unsupported curve kind {self.kind!r}")
        if not (self.semi_axis_real > 0 and self.semi_axis_imag > 0):
            raise ValueError("semi-axes must be positive")
        if self.points < 64 or self.points % 2:
            raise ValueError("points must be even and >= 64")

    def parameters(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.points) / self.points

    def samples(self):
        """Return (t, z(t), z'(t)) at the quadrature nodes."""
        t = self.parameters()
        z = self.center + self.semi_axis_real * np.cos(t) + 1j * self.semi_axis_imag * np.sin(t)
        dz = -self.semi_axis_real * np.sin(t) + 1j * self.semi_axis_imag * np.cos(t)
        return t, z, dz

    def contains(self, z) -> bool:
        z = complex(z)
        u = (z.real - self.center) / self.semi_axis_real
        v = z.imag / self.semi_axis_imag
        return u * u + v * v < 1.0

    def pole_rate(self, z0) -> float:
        """Distance of the preimage of ``z0`` from the real parameter axis.

        The trapezoid error for an integrand with a pole at ``z0`` decays like
        ``exp(-points * rate)``.
        """
        a, b = self.semi_axis_real, self.semi_axis_imag
        big, small = (a + b) / 2, (a - b) / 2
        w = np.roots([big, -(complex(z0) - self.center), small])
        with np.errstate(divide="ignore"):
            return float(np.min(np.abs(np.log(np.abs(w)))))


def contour_integral(f: Callable, c: ClosedCurve) -> complex:
    """Trapezoid-rule value of the closed integral of ``f`` along ``c``.

    ``f`` is called once with the array of sample points; it must be
    vectorised over numpy arrays.
    """
    t, z, dz = c.samples()
    vals = np.asarray(f(z), dtype=complex)
    if vals.shape != z.shape:
        vals = np.array([complex(f(zz)) for zz in z])
    bad = ~np.isfinite(vals)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise CurveError(f"integrand is not finite on the curve at t={t[k]:.6g} (z={z[k]:.6g})")
    return complex(np.sum(vals * dz) * (2 * np.pi / c.points))


def default_curve(
    enclosed: Sequence[float],
    excluded: Sequence[float] = (),
    fallback_center: float = 0.0,
    points: int = 512,
    decay: float = 36.0,
    max_points: int = 1 << 20,
) -> ClosedCurve:
    """Ellipse around the real points ``enclosed`` keeping ``excluded`` outside.

    Centre at the midpoint of the extremal enclosed points, real semi-axis
    1.5 times the half-spread (at least 1), imaginary semi-axis half the real
    one.  An end of the ellipse is pulled in to at least halfway between an
    excluded point and the nearest enclosed point.  The sample count is raised
    (in powers of two) until every pole's trapezoid decay rate times the count
    reaches ``decay``.
    """
    pts = sorted(float(v) for v in enclosed)
    lo_pt, hi_pt = (pts[0], pts[-1]) if pts else (fallback_center, fallback_center)
    center = 0.5 * (lo_pt + hi_pt)
    a = max(1.5 * 0.5 * (hi_pt - lo_pt), 1.0)
    left, right = center - a, center + a
    for s in excluded:
        s = float(s)
        if lo_pt <= s <= hi_pt and pts:
            raise CurveError(f"excluded point {s} lies between enclosed points; no ellipse separates them")
        if s < lo_pt:
            left = max(left, s + 0.5 * (lo_pt - s))
        else:
            right = min(right, s - 0.5 * (s - hi_pt))
    center = 0.5 * (left + right)
    a = 0.5 * (right - left)
    curve = ClosedCurve(center, a, 0.5 * a, points)
    rates = [curve.pole_rate(v) for v in list(pts) + [float(s) for s in excluded]]
    if rates:
        need = decay / max(min(rates), 1e-300)
        n_pts = points
        while n_pts < need and n_pts < max_points:
            n_pts *= 2
        curve = ClosedCurve(center, a, 0.5 * a, n_pts)
    return curve
