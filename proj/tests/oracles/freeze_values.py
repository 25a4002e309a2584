"""Independent high-precision oracle for frozen test constants.

Runs with mpmath only; nothing here touches the C++ implementation.
"""
import mpmath as mp

mp.mp.dps = 30
s3 = mp.sqrt(3)


def d_par(g):
    if -2 < g < 1:
        return (2 - (2 + g) * mp.sqrt(1 - g)) / (3 * s3)
    return 2 / (3 * s3)


def d_par_over_g2(g):
    # same function divided by g^2, with the cancellation at g = 0 removed by
    # multiplying through by 2 + (2 + g) sqrt(1 - g); tanh-sinh nodes crowd 0.
    if -2 < g < 1:
        return (3 + g) / (2 + (2 + g) * mp.sqrt(1 - g)) / (3 * s3)
    return 2 / (3 * s3) / g**2


def d_rand_mc_free(g):
    # E over mu in [0,1] of min(|g|, L)^2 / (4 L), L = sqrt(1 + 3 mu^2)
    g = abs(g)
    f = lambda mu: min(g, mp.sqrt(1 + 3 * mu * mu)) ** 2 / (4 * mp.sqrt(1 + 3 * mu * mu))
    if 1 < g < 2:
        mus = mp.sqrt((g * g - 1) / 3)
        return mp.quad(f, [0, mus, 1])
    return mp.quad(f, [0, 1])


def d_rand_over_g2(g):
    # min(|g|, L)^2 / g^2 is exactly 1 for |g| <= 1
    if abs(g) <= 1:
        return mp.quad(lambda mu: 1 / (4 * mp.sqrt(1 + 3 * mu * mu)), [0, 1])
    return d_rand_mc_free(g) / g**2


def charfn(k, P, dinf, pts):
    re = mp.quad(lambda g: mp.cos(k * g) * P(g), pts, maxdegree=12)
    im = -mp.quad(lambda g: mp.sin(k * g) * P(g), pts, maxdegree=12)
    tail = 2 * dinf * (mp.cos(2 * k) / 2 - k * (mp.pi / 2 - mp.si(2 * k)))
    return re + tail, im


dinf_p = 2 / (3 * s3)
dinf_r = mp.mpf(1) / 4 + s3 / 24 * mp.asinh(s3)
print("dinf_p", dinf_p)
print("dinf_r", dinf_r)
gc = mp.mpf(2) / 9 * (3 + s3 * mp.log((s3 - 1) / (s3 + 1)))
print("gc_p closed", gc)
print("gc_p quad", mp.quad(lambda g: d_par(g) / g if g != 0 else 0, [-2, 0, 1, 2]))
print("center coeff", gc * 4 * mp.pi / 3, "width coeff", mp.pi * dinf_p * 4 * mp.pi / 3)
print("D_r(1)", d_rand_mc_free(1), "D_r(1.5)", d_rand_mc_free(1.5), "D_r(10)", d_rand_mc_free(10))
for x in [0.5, 1, 3.9, 4, 10, 50, 1000]:
    print("Si", x, mp.si(x))
for k in [0.1, 1, 10]:
    print("pt_par", k, charfn(k, d_par_over_g2, dinf_p, [-2, 0, 1, 2]))
for k in [0.1, 1, 10]:
    print("pt_rand", k, charfn(k, d_rand_over_g2, dinf_r, [-2, -1, 0, 1, 2]))
