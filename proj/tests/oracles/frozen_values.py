"""Independent multiprecision evaluation of the frozen expected values used in the C++ tests."""
from mpmath import mp, mpf, log, sin, cos, sqrt, pi, floor, quad, exp, inf

mp.dps = 40

def bracket(x):
    return sqrt(1 + mpf(x) ** 2)

print("weight (1+9)^(1/4)         =", mp.nstr(mpf(10) ** (mpf(1) / 4), 20))

# example coefficient at t=1, x=0, kappa1=kappa2=0.5
k1 = k2 = mpf("0.5")
x, t = mpf(0), mpf(1)
a = bracket(x) ** (2 * k1) * (2 + sin(bracket(x) ** (1 - k2) + cos(x) * log(t))
                             + (2 + cos(bracket(x) ** (1 - k2))) * log(1 + 1 / t))
print("example a(1,0)             =", mp.nstr(a, 20))

print("int_0^1 log(1+1/t)         =", mp.nstr(quad(lambda s: log(1 + 1 / s), [0, 1]), 20))
for eps in ["1e-3", "1e-1", "1"]:
    e = mpf(eps)
    print(f"primitive eps={eps:5s}         =", mp.nstr(e * log(1 + 1 / e) + log(1 + e), 20))

def marks(lam, gam):
    q = int(floor(mpf(lam) ** (mpf(1) / 4)))
    h = int(floor(sqrt(mpf(lam))))
    return 2 * pi / (gam * lam) * q, 2 * pi / (gam * lam) * h, q, h

for j in range(10, 15):
    lam = 2 ** j
    a_l, b_l, q, h = marks(lam, 1)
    theta_l = min(log(1 / b_l), log(lam))
    phi = theta_l / 32 * log(mpf(h) / q)
    print(f"lambda=2^{j}: a={mp.nstr(a_l, 17)} b={mp.nstr(b_l, 17)} theta={mp.nstr(theta_l, 17)} phi={mp.nstr(phi, 17)}")

# sup of a/(omega^2 log(1+1/t)) for the example coefficient over t in [1e-6,1], |x|<=R
import numpy as np
best = 0
for tt in np.logspace(-6, 0, 400):
    for xx in np.linspace(-50, 50, 2001):
        bx = np.sqrt(1 + xx * xx)
        av = bx * (2 + np.sin(bx ** 0.5 + np.cos(xx) * np.log(tt)) + (2 + np.cos(bx ** 0.5)) * np.log(1 + 1 / tt))
        r = av / (bx * np.log(1 + 1 / tt))
        best = max(best, r)
print("logblow sup (grid, R=50)   =", best)

# Bessel potential ratio for a Gaussian packet exp(-x^2/2 + i 50 x): continuous Fourier side
for s1 in [1, 2]:
    num = quad(lambda z: (1 + z * z) ** s1 * exp(-(z - 50) ** 2), [-inf, 50, inf])
    den = quad(lambda z: exp(-(z - 50) ** 2), [-inf, 50, inf])
    print(f"bessel ratio s1={s1}          =", mp.nstr(sqrt(num / den), 20), " <50>^s1 =", mp.nstr(sqrt(mpf(2501)) ** s1, 20))

print("pi^(1/4)                   =", mp.nstr(pi ** (mpf(1) / 4), 20))

# mfn example: x=0, xi=0, k=1, psi0 only with C1=1, T=1 : int_0^1 phi(t) log(1+1/t) dt / log 2
def nu(r):
    r = mpf(r)
    if r <= 0: return mpf(0)
    if r >= 1: return mpf(1)
    e1 = exp(-1 / r); e2 = exp(-1 / (1 - r))
    return e1 / (e1 + e2)
def step(r):
    return nu(2 - r)
val = quad(lambda s: step(s) * log(1 + 1 / s), [0, 1, 2])
print("psi0 ratio T=2             =", mp.nstr(val / log(2), 20))
val1 = quad(lambda s: step(s) * log(1 + 1 / s), [0, 1])
print("psi0 ratio T=1             =", mp.nstr(val1 / log(2), 20))

# log-log regression slope of |d/dt log(1+1/t)| = 1/(t(1+t)) over log-spaced t in [1e-6, T]
for T in [1.0, 0.5, 0.1]:
    ts = np.logspace(-6, np.log10(T), 200)
    y = np.log(1 / (ts * (1 + ts)))
    slope = np.polyfit(np.log(ts), y, 1)[0]
    print(f"fit exponent log-blowup T={T}:", -slope)
