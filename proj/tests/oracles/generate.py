#!/usr/bin/env python3
"""Reference values frozen into the C++ tests.

Run: python3 tests/oracles/generate.py
Everything here is independent of the C++ code: mpmath for special
functions, direct eigenvalue-density integration for psi, and a Fredholm
determinant (Gauss-Legendre discretization) for the TW1 distribution.
"""
import mpmath as mp
import numpy as np
from scipy import integrate, special

mp.mp.dps = 50


def header(name):
    print(f"\n# {name}")


header("special functions")
print("lgamma(46.446) =", mp.nstr(mp.loggamma(mp.mpf("46.446")), 20))
print("P(5.5, 3.2) =", mp.nstr(mp.gammainc(mp.mpf("5.5"), 0, mp.mpf("3.2"), regularized=True), 20))
print("Q(5.5, 30) =", mp.nstr(mp.gammainc(mp.mpf("5.5"), mp.mpf(30), mp.inf, regularized=True), 20))
print("P(80, 20) =", mp.nstr(mp.gammainc(80, 0, 20, regularized=True), 20))
print("P(3.5; 1.5, 6.25) =", mp.nstr(mp.gammainc(mp.mpf("3.5"), mp.mpf("1.5"), mp.mpf("6.25"), regularized=True), 20))
print("lnC(30000,300) =", mp.nstr(mp.log(mp.binomial(30000, 300)), 20))
print("lnC(5000,4) =", mp.nstr(mp.log(mp.binomial(5000, 4)), 20))
lmg = mp.mpf(4 * 3) / 4 * mp.log(mp.pi) + sum(mp.loggamma(mp.mpf(10) - mp.mpf(j) / 2) for j in range(4))
print("ln Gamma_4(10) =", mp.nstr(lmg, 20))


header("pfaffian of a fixed 6x6 skew matrix")
A = mp.matrix(6, 6)
vals = [0.7, -1.3, 2.1, 0.4, -0.9, 1.7, 0.25, -2.2, 1.1, 0.6, -0.35, 1.9, -1.4, 0.8, 0.45]
k = 0
for i in range(6):
    for j in range(i + 1, 6):
        A[i, j] = vals[k]
        A[j, i] = -vals[k]
        k += 1


def pf_expand(M):
    n = M.rows
    if n == 0:
        return mp.mpf(1)
    total = mp.mpf(0)
    for j in range(1, n):
        idx = [r for r in range(n) if r not in (0, j)]
        sub = mp.matrix(n - 2, n - 2)
        for a, r in enumerate(idx):
            for b, c in enumerate(idx):
                sub[a, b] = M[r, c]
        total += (-1) ** (j + 1) * M[0, j] * pf_expand(sub)
    return total


pf = pf_expand(A)
print("Pf =", mp.nstr(pf, 20), " sqrt(det) =", mp.nstr(mp.sqrt(mp.det(A)), 20))


header("psi from the eigenvalue density (unnormalized Wishart, identity covariance)")


def psi_s2(m, a, b):
    al = (m - 3) / 2.0
    f = lambda y, x: (y - x) * (x * y) ** al * np.exp(-(x + y) / 2)
    num, _ = integrate.dblquad(f, a, b, lambda x: x, lambda x: b, epsabs=0, epsrel=1e-13)
    den, _ = integrate.dblquad(f, 0, np.inf, lambda x: x, lambda x: np.inf, epsabs=0, epsrel=1e-13)
    return num / den


def psi_s3(m, a, b):
    al = (m - 4) / 2.0
    f = lambda z, y, x: (y - x) * (z - x) * (z - y) * (x * y * z) ** al * np.exp(-(x + y + z) / 2)
    opts = dict(epsabs=0, epsrel=1e-11)
    num, _ = integrate.tplquad(f, a, b, lambda x: x, lambda x: b, lambda x, y: y, lambda x, y: b, **opts)
    den, _ = integrate.tplquad(f, 0, 200, lambda x: x, lambda x: 200, lambda x, y: y, lambda x, y: 200, **opts)
    return num / den


for m, a, b in [(6, 0.5, 8.0), (6, 1.0, 15.0), (9, 2.0, 20.0), (5, 0.0, 6.0)]:
    print(f"psi(m={m}, s=2, [{a},{b}]) =", repr(psi_s2(m, a, b)))
for m, a, b in [(8, 1.0, 20.0), (10, 1.0, 30.0)]:
    print(f"psi(m={m}, s=3, [{a},{b}]) =", repr(psi_s3(m, a, b)))


header("chi-square case (s=1): P(m/2; a/2, b/2)")
for m, a, b in [(4, 0, 4), (4, 1, 3)]:
    print(f"m={m} [{a},{b}] ->", mp.nstr(mp.gammainc(mp.mpf(m) / 2, mp.mpf(a) / 2, mp.mpf(b) / 2, regularized=True), 20))


header("concentration closed form")
m, s, d = 400, 4, mp.mpf(1) / 3
r = mp.sqrt(mp.mpf(s) / m)
t1 = max(0, -1 - r + mp.sqrt(1 + d))
t2 = max(0, 1 - r - mp.sqrt(1 - d))
print("m=400 s=4 delta=1/3 ->", mp.nstr(1 - mp.exp(-m / 2 * t1**2) - mp.exp(-m / 2 * t2**2), 20))


header("robustness constants")
for d in [mp.mpf("0.2"), mp.mpf("0.3071")]:
    c1 = mp.sqrt(8 * (1 + d)) / (1 - 3 * d)
    c2 = mp.sqrt(8) * (2 * d + mp.sqrt((1 - 3 * d) * d)) / (1 - 3 * d) + 2
    print(f"delta={d}: C1 =", mp.nstr(c1, 20), " C2 =", mp.nstr(c2, 20))
print("FL symmetric root =", mp.nstr(1 / (1 + 2 * (1 + mp.sqrt(2)) / 4), 20))


header("TW1 CDF via Fredholm determinant det(I - K), K(x,y) = Ai((x+y)/2 + t)/2 on (0, inf)")


def tw1_cdf(t, n=80, L=None):
    if L is None:
        L = max(12.0, 12.0 - t)
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * L * (x + 1)
    w = 0.5 * L * w
    sw = np.sqrt(w)
    K = 0.5 * special.airy(0.5 * (x[:, None] + x[None, :]) + t)[0]
    return np.linalg.det(np.eye(n) - sw[:, None] * K * sw[None, :])


ts = np.linspace(-5, 3, 33)
for t in ts:
    print(f"{{{t:.2f}, {1.0 - tw1_cdf(t):.15g}}},")
