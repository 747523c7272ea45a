"""Independent reference for pattern bounds, w_est, W and F_c.

Written from the formulas alone, sharing no code with the C++ library.
Usage: python3 ffamily_oracle.py PATTERN N0 T M [EPS ...]
"""
import sys

import mpmath as mp
import numpy as np

mp.mp.dps = 40
P31, P13 = (3, 1), (1, 3)


def cf(a0, digits, period):
    # periodic tail y = [t1; t2, ..., y] solved as a fixed point in high precision
    y = mp.mpf(2)
    for _ in range(200):
        v = y
        for d in reversed(period):
            v = d + 1 / v
        y = v
    v = y
    for d in reversed(digits):
        v = d + 1 / v
    return a0 + 1 / v


def bounds(c):
    c = [None] + list(c)  # 1-based
    fwd = lambda i, per: cf(c[i], c[i + 1:10], per)
    bwd = lambda i, per: cf(0, c[i:0:-1], per)

    def cont(seq):
        p, q = 1, 0
        for d in seq:
            p, q = d * p + q, p
        return p

    vmin, vmax = fwd(5, P31), fwd(5, P13)
    cmin, cmax = bwd(4, P31), bwd(4, P13)
    b = dict(vmin=vmin, vmax=vmax, cmin=cmin, cmax=cmax,
             lmin=1 / (vmax + cmax), lmax=1 / (vmin + cmin), l1={}, l1max={})
    for j in range(1, 5):
        lo, hi = (P31, P13) if j % 2 else (P13, P31)
        k1, k2 = cont(c[5:5 + j]), cont(c[6:5 + j])
        b['l1'][j] = 1 / (k1 + cmax * k2) / (fwd(5 + j, lo) + bwd(4 + j, lo))
        b['l1max'][j] = 1 / (k1 + cmin * k2) / (fwd(5 + j, hi) + bwd(4 + j, hi))
    k1, k2 = cont(c[5:10]), cont(c[6:10])
    b['l1'][5] = 1 / (k1 + cmax * k2) / (cf(3, [], P13) + bwd(9, P31))
    b['l1max'][5] = 1 / (k1 + cmin * k2) / (cf(1, [], P31) + bwd(9, P13))
    b['eps_min'] = -b['lmax'] + b['l1'][1]
    b['eps_max'] = (c[5] - 1) * b['lmax'] + b['l1max'][1]
    return b


def cfmin(word):
    return cf(0, word, P31 if len(word) % 2 == 0 else P13)


def cfmax(word):
    return cf(0, word, P13 if len(word) % 2 == 0 else P31)


def w_est(n0, T, x, y):
    n = np.arange(1, T + 1, dtype=np.float64)
    nx = n * np.float64(x)
    ny = n * np.float64(y)
    fx, fy = np.floor(nx), np.floor(ny)
    same = fx == fy
    tmin = np.where(same, 1 - (ny - fy), 0.0) - 0.5
    tmax = 0.5 - np.where(same, nx - fx, 0.0)
    l = n[n0:]
    wt = 1 / (l * (l + 1))
    smin = float(np.sum(np.cumsum(tmin)[n0:] * wt))
    smax = float(np.sum(np.cumsum(tmax)[n0:] * wt))
    return max(abs(smin), abs(smax))


class Restart(Exception):
    pass


def W(left, n0, T, m):
    err = max(w_est(n0, T, cfmin(left), cfmin(left)), w_est(n0, T, cfmax(left), cfmax(left))) + 1e-6

    def rec(C):
        w = w_est(n0, T, cfmin(C), cfmax(C))
        if w < err:
            return w
        if len(C) >= m:
            raise Restart
        return max(rec(C + [d]) for d in (1, 2, 3))

    while True:
        try:
            return rec(list(left))
        except Restart:
            err *= 1.05


def F(c, n0, T, Wc, eps):
    b = bounds(c)
    lmin, lmax = float(b['lmin']), float(b['lmax'])
    cmin, cmax = b['cmin'], b['cmax']
    prod = 2 * mp.pi * (eps + lmin)
    for n in range(1, n0 + 1):
        fa, fb = mp.floor(n * cmax), mp.floor(n * cmin)
        if fa != fb:
            g = (1 - lmax / (2 * n)) ** 2
        else:
            fr = float(n * cmax - fa)
            lam = lmax if fr >= 0.5 else lmin
            g = (1 - lam * (fr - 0.5) / n) ** 2
        e = max((eps + lmax / 2) ** 2, (eps + lmin / 2) ** 2) / n ** 2
        prod *= g - e
    E = lmax + (eps * lmax + eps ** 2) / (n0 + 1)
    finf = 1 - (2 * lmax * (Wc + 4.5 * (1 + mp.log(T)) / T)
                + (lmax ** 2 / 4 + (eps + 0.5 * lmax) ** 2 + E ** 2) / n0)
    return prod * finf


if __name__ == '__main__':
    c = [int(ch) for ch in sys.argv[1]]
    n0, T, m = map(int, sys.argv[2:5])
    b = bounds(c)
    Wc = W([c[3], c[2], c[1], c[0]], n0, T, m)
    print(f"W {Wc:.12f}")
    for k in ('vmin', 'vmax', 'cmin', 'cmax', 'lmin', 'lmax', 'eps_min', 'eps_max'):
        print(k, mp.nstr(b[k], 17))
    for eps in sys.argv[5:]:
        print('F', eps, mp.nstr(F(c, n0, T, Wc, mp.mpf(eps)), 15))
