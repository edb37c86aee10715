#!/usr/bin/env python3
"""Regenerate log_moments_oracle.txt: ln rho_n for n = 0..30 at 50 digits.

The Bessel-type rows are evaluated from the Mellin integral
int_0^inf u^(mu-1) K_nu(u) du = 2^(mu-2) Gamma((mu+nu)/2) Gamma((mu-nu)/2)
applied to each closed-form weight, not from the moment formulas.
"""
import mpmath as mp

mp.mp.dps = 50
N_MAX = 30


def mellin_k(mu, nu):
    return (mu - 2) * mp.log(2) + mp.loggamma((mu + nu) / 2) + mp.loggamma((mu - nu) / 2)


def bessel_moment(ln_a, p, nu, c, n):
    # t = (u/c)^2: int t^n A t^p K_nu(c sqrt t) dt = 2A c^(-2(n+p+1)) int u^(2(n+p)+1) K_nu(u) du
    m = 2 * (n + p + 1)
    return mp.log(2) + ln_a - m * mp.log(c) + mellin_k(m, nu)


def rows():
    for n in range(N_MAX + 1):
        yield "glauber", "none", n, mp.loggamma(n + 1)
    for j in ["1", "1.5", "2", "3"]:
        jj = mp.mpf(j)
        for n in range(N_MAX + 1):
            # (2j-1) B(n+1, 2j-1)
            v = mp.log(2 * jj - 1) + mp.loggamma(n + 1) + mp.loggamma(2 * jj - 1) - mp.loggamma(n + 2 * jj)
            yield "su11", "j:" + j, n, v
    for j in ["0.5", "1", "2"]:
        jj = mp.mpf(j)
        for n in range(N_MAX + 1):
            v = bessel_moment(mp.log(2) - mp.loggamma(2 * jj), (2 * jj - 1) / 2, 2 * jj - 1, 2, n)
            yield "barut-girardello", "j:" + j, n, v
    for t in ["0.05", "0.1", "0.5"]:
        tau = mp.mpf(t)
        beta = 1 + 2 / tau
        p = beta / 2
        ln_a = (4 + beta) / 2 * mp.log(2) - mp.log(tau) - mp.loggamma(1 + beta) - p * mp.log(tau)
        for n in range(N_MAX + 1):
            yield "nc-oscillator", "tau:" + t, n, bessel_moment(ln_a, p, beta, 2 * mp.sqrt(2 / tau), n)
    for t, g, e in [("0.2", "0.2", "0.2"), ("0.1", "0.3", "0.05"), ("0.5", "0", "0")]:
        tau, gamma, eps = mp.mpf(t), mp.mpf(g), mp.mpf(e)
        a = mp.sqrt(1 + 4 * gamma / tau) / 2
        b = mp.sqrt(1 + 4 * eps / tau) / 2
        eta = (3 + a + b) / 2
        ln_a = -eta * mp.log(tau) - 2 * mp.loggamma(eta) - (eta - 1) * mp.log(2)
        params = "tau:%s;gamma:%s;epsilon:%s" % (t, g, e)
        for n in range(N_MAX + 1):
            yield "nc-poschl-teller", params, n, bessel_moment(ln_a, eta - 1, 0, mp.sqrt(2 / tau), n)


with open("log_moments_oracle.txt", "w") as f:
    f.write("# family params n ln_moment method\n")
    for fam, params, n, v in rows():
        f.write("%s %s %d %s mpmath(dps=50)\n" % (fam, params, n, mp.nstr(v, 25)))
