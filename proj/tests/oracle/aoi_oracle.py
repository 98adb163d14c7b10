"""Independent high-precision oracle for frozen test values.

Evaluates the block error rate, the f_max / n* series by direct summation
(no binomial expansion), and the average AoI of both schemes with mpmath.
Run: python3 tests/oracle/aoi_oracle.py
"""
from mpmath import mp, mpf, erfc, sqrt, log, e, floor

mp.dps = 40


def q(x):
    return erfc(mpf(x) / sqrt(2)) / 2


def block_error(l, m, g):
    g = mpf(g)
    z = (log(1 + g, 2) / 2 - mpf(l) / m) / (log(e, 2) * sqrt((1 - 1 / (1 + g) ** 2) / (2 * m)))
    return q(z)


def blocklength(bits, rate):
    return max(1, int(floor(mpf(bits) / mpf(rate) + mpf('0.5'))))


def sigma_series(n, eps, tol=mpf('1e-30')):
    eps = mpf(eps)
    s, f = mpf(0), 1
    while n * eps ** f / (1 - eps) >= tol:
        s += 1 - (1 - eps ** f) ** n
        f += 1
    return s


def nstar_pmf(n, eps, tol=mpf('1e-30')):
    eps = mpf(eps)
    pmf = [mpf(0)] * n
    f = 0
    while n * eps ** f >= tol or f == 0:
        a, b, w = 1 - eps ** f, 1 - eps ** (f + 1), eps ** f * (1 - eps)
        for k in range(1, n + 1):
            pmf[k - 1] += (a ** (k - 1) if k > 1 else 1) * b ** (n - k) * w
        f += 1
        if eps == 0:
            break
    return pmf


def beta_series(n, eps):
    pmf = nstar_pmf(n, eps)
    return sum(p * (n - k + 1) for k, p in enumerate(pmf, start=1))


def joint(n, lh, alpha, rate, g, eps=None):
    L = n * lh - alpha
    M = blocklength(L, rate)
    ej = block_error(L, M, g) if eps is None else mpf(eps)
    return M / (1 - ej) + mpf(M - 1) / 2


def distributed(n, lh, rate, g, eps=None):
    Mh = blocklength(lh, rate)
    ed = block_error(lh, Mh, g) if eps is None else mpf(eps)
    return sigma_series(n, ed) * n * Mh + beta_series(n, ed) * Mh + mpf(Mh - 1) / 2


def alpha0(n, lh, rate, g):
    Mh = blocklength(lh, rate)
    ed = block_error(lh, Mh, g)
    return ((3 - 2 * sigma_series(n, ed)) * n - 2 * beta_series(n, ed) - 1) / 3 * lh


if __name__ == "__main__":
    P = lambda *a: print(*[mp.nstr(x, 17) if not isinstance(x, (int, str)) else x for x in a])
    P("sigma(2,.5)", sigma_series(2, '0.5'), "beta(2,.5)", beta_series(2, '0.5'))
    P("sigma(5,.3)", sigma_series(5, '0.3'), "beta(4,.7)", beta_series(4, '0.7'))
    P("eps_D(120,150,3)", block_error(120, 150, 3), "eps_J(480,600,3)", block_error(480, 600, 3))
    for r in ['0.6', '0.8', '1.0']:
        P("R", r, "joint", joint(4, 120, 0, r, 3), "dist", distributed(4, 120, r, 3))
    P("dist forced .1 N=4 Mh=150", distributed(4, 120, '0.8', 3, '0.1'))
    P("dist forced .5 N=2 Mh=150", distributed(2, 120, '0.8', 3, '0.5'))
    for n in (2, 4):
        a0 = alpha0(n, 120, '0.8', 3)
        dd = distributed(n, 120, '0.8', 3)
        lo, hi = 0, n * 120 - 1
        d = lambda a: joint(n, 120, a, '0.8', 3) - dd
        assert d(lo) > 0 and d(hi) < 0
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if d(mid) > 0:
                lo = mid
            else:
                hi = mid
        P("N", n, "alpha0", a0, "crossover bracket", lo, hi, d(lo), d(hi))
    # Fig. 3 curves
    for lh in (60, 120):
        rs = [mpf(30 + 5 * i) / 100 for i in range(23)]
        for name, fn in (("joint", lambda r: joint(4, lh, 0, r, 3)), ("dist", lambda r: distributed(4, lh, r, 3))):
            vals = []
            for r in rs:
                try:
                    vals.append(fn(r))
                except ZeroDivisionError:
                    vals.append(mp.inf)
            i = min(range(len(vals)), key=lambda k: vals[k])
            P("fig3 Lh", lh, name, "argmin R", rs[i], "min", vals[i], "ends", vals[0], vals[-1])
