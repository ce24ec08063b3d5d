"""Independent reference computations used only by the tests."""
import mpmath as mp
import numpy as np


def moments(kind, count, m=0.0, p=1.0, q=1.0, dps=60):
    """Raw moments of the family weight, in high precision."""
    with mp.workdps(dps):
        if kind == "hermite":
            return [mp.gamma(mp.mpf(k + 1) / 2) if k % 2 == 0 else mp.mpf(0) for k in range(count)]
        if kind == "laguerre":
            return [mp.gamma(k + mp.mpf(m) + 1) for k in range(count)]
        a, b = 2 * mp.mpf(p) - 1, 2 * mp.mpf(q) - 1
        return [mp.quad(lambda x: x**k * (1 - x) ** a * (1 + x) ** b, [-1, 0, 1]) for k in range(count)]


def gram_schmidt_recurrence(mu, kmax, dps=60):
    """Monic recurrence (a_k, b_k), k < kmax, from moments by Stieltjes' procedure."""
    with mp.workdps(dps):
        def inner(f, g):
            s = mp.mpf(0)
            for i, fi in enumerate(f):
                for j, gj in enumerate(g):
                    s += fi * gj * mu[i + j]
            return s

        def times_x(f):
            return [mp.mpf(0)] + list(f)

        prev, cur = [mp.mpf(0)], [mp.mpf(1)]
        out = []
        norm_prev = None
        for k in range(kmax):
            norm = inner(cur, cur)
            a = inner(times_x(cur), cur) / norm
            b = norm / norm_prev if norm_prev is not None else norm
            out.append((float(a), float(b)))
            xp = times_x(cur)
            nxt = [xp[i] - a * (cur[i] if i < len(cur) else 0) - (b * prev[i] if k and i < len(prev) else 0)
                   for i in range(len(xp))]
            prev, cur, norm_prev = cur, nxt, norm
        return out


def bisection_roots(f, lo, hi, grid=4001, tol=1e-15):
    """All sign-change roots of ``f`` on ``[lo, hi]`` by plain bisection."""
    xs = np.linspace(lo, hi, grid)
    vals = [f(x) for x in xs]
    roots = []
    for x0, x1, f0, f1 in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        if f0 == 0:
            roots.append(x0)
            continue
        if f0 * f1 < 0:
            a, b, fa = x0, x1, f0
            while b - a > tol * max(1.0, abs(a)):
                c = 0.5 * (a + b)
                fc = f(c)
                if fc == 0:
                    a = b = c
                    break
                if (fc < 0) == (fa < 0):
                    a, fa = c, fc
                else:
                    b = c
            roots.append(0.5 * (a + b))
    return roots


def monic_by_recurrence(coeffs, n, x):
    """Monic polynomial value from explicit (a_k, b_k) pairs."""
    p_prev, p = 0.0, 1.0
    for k in range(n):
        a, b = coeffs[k]
        p_prev, p = p, (x - a) * p - (b * p_prev if k else 0.0)
    return p


def fd_gradient(f, x, h):
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / ((x + e)[i] - (x - e)[i])
    return g


def fd_hessian(f, x, h):
    x = np.asarray(x, dtype=float)
    n = x.size
    H = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            ei = np.zeros(n)
            ej = np.zeros(n)
            ei[i] = h
            ej[j] = h
            H[i, j] = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h * h)
    return H


def fd_jacobian(F, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((np.asarray(F(x + e)) - np.asarray(F(x - e))) / (2 * h))
    return np.column_stack(cols)
