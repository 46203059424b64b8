#!/usr/bin/env python3
"""Regenerate the frozen oracle values under tests/goldens/.

Every value is computed here with mpmath at 50 significant digits, through
routes independent of the C++ evaluation paths (direct series, brute-force
double series, adaptive quadrature, density convolutions). Run from the
repository root:

    python3 scripts/make_goldens.py
"""
import math
import pathlib

import mpmath as mp

mp.mp.dps = 40

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "goldens"


class Link:
    def __init__(self, alpha, kappa, mu, m, gbar=1.0):
        self.alpha, self.kappa, self.mu, self.m, self.gbar = (
            mp.mpf(alpha), mp.mpf(kappa), mp.mpf(mu), mp.mpf(m), mp.mpf(gbar))
        self.theta = self.m ** self.m / (mp.gamma(self.mu) * (self.mu * self.kappa + self.m) ** self.m)
        self.beta = self.mu * self.kappa / (self.mu * self.kappa + self.m)
        self.c = (1 / (self.theta * mp.gamma(self.mu + 2 / self.alpha)
                       * mp.hyp2f1(self.m, self.mu + 2 / self.alpha, self.mu, self.beta))) ** (self.alpha / 2)

    def pdf(self, x):
        x = mp.mpf(x)
        if x <= 0:
            return mp.mpf(0)
        lam = (x / self.gbar) ** (self.alpha / 2)
        return (self.theta * self.alpha / (2 * self.c ** self.mu * self.gbar)
                * (x / self.gbar) ** (self.alpha * self.mu / 2 - 1)
                * mp.exp(-lam / self.c)
                * mp.hyp1f1(self.m, self.mu, self.beta * lam / self.c))

    def cdf(self, x):
        lam = (mp.mpf(x) / self.gbar) ** (self.alpha / 2)
        X = lam / self.c
        return self.theta * mp.quad(
            lambda u: u ** (self.mu - 1) * mp.exp(-u) * mp.hyp1f1(self.m, self.mu, self.beta * u),
            [0, X])

    def cdf_env(self, r):
        return self.cdf(mp.mpf(r) ** 2)

    def mellin(self, s):
        s = mp.mpf(s)
        return (self.theta * self.gbar ** (s - 1) * self.c ** (2 * (s - 1) / self.alpha)
                * mp.gamma(self.mu + (s - 1) * 2 / self.alpha)
                * mp.hyp2f1(self.m, self.mu + (s - 1) * 2 / self.alpha, self.mu, self.beta))


def phi2_brute(b1, b2, c, x, y, kmax=400):
    b1, b2, c, x, y = map(mp.mpf, (b1, b2, c, x, y))
    total = mp.mpf(0)
    for j in range(kmax):
        cj = mp.rf(b1, j) * mp.mpf(x) ** j / (mp.rf(c, j) * mp.factorial(j))
        total += cj * mp.hyp1f1(b2, c + j, y)
    return total


def f2_brute(a, b1, b2, c1, c2, x, y, kmax=400):
    a, b1, b2, c1, c2, x, y = map(mp.mpf, (a, b1, b2, c1, c2, x, y))
    total = mp.mpf(0)
    for mi in range(kmax):
        inner = mp.mpf(0)
        for n in range(kmax):
            t = (mp.rf(a, mi + n) * mp.rf(b1, mi) * mp.rf(b2, n) * mp.mpf(x) ** mi * mp.mpf(y) ** n
                 / (mp.rf(c1, mi) * mp.rf(c2, n) * mp.factorial(mi) * mp.factorial(n)))
            inner += t
            if abs(t) < mp.mpf("1e-46") * (abs(total) + abs(inner) + 1):
                break
        total += inner
        if abs(inner) < mp.mpf("1e-44") * (abs(total) + 1):
            break
    return total


def kratzel(nu, rho, x):
    return mp.quad(lambda t: t ** (mp.mpf(nu) - 1) * mp.exp(-t - mp.mpf(x) * t ** (-mp.mpf(rho))),
                   [0, mp.inf])


def prod_pdf(L1, L2, y):
    y = mp.mpf(y)
    return mp.quad(lambda x: L1.pdf(y / x) * L2.pdf(x) / x, [0, mp.inf])


def ratio_pdf(L1, L2, z):
    z = mp.mpf(z)
    return mp.quad(lambda x: L1.pdf(z * x) * L2.pdf(x) * x, [0, mp.inf])


def ratio_cdf(L1, L2, z):
    # P(X1/X2 <= z) = E[F1(z X2)]
    return mp.quad(lambda x: L2.pdf(x) * L1.cdf(mp.mpf(z) * x), [0, mp.inf])


def prod_cdf(L1, L2, y):
    return mp.quad(lambda x: L2.pdf(x) * L1.cdf(mp.mpf(y) / x), [0, mp.inf])


def prod_mgf(L1, L2, s):
    # E[e^{s X1 X2}] = E_x2[ M_{X1}(s x2) ]
    def inner(x2):
        return mp.quad(lambda y: mp.exp(mp.mpf(s) * y * x2) * L1.pdf(y), [0, mp.inf])
    return mp.quad(lambda x2: L2.pdf(x2) * inner(x2), [0, mp.inf])


def ratio_mgf(L1, L2, s):
    def inner(x2):
        return mp.quad(lambda y: mp.exp(mp.mpf(s) * y / x2) * L1.pdf(y), [0, mp.inf])
    return mp.quad(lambda x2: L2.pdf(x2) * inner(x2), [0, mp.inf])


import contextlib


@contextlib.contextmanager
def working_dps(n):
    old = mp.mp.dps
    mp.mp.dps = n
    try:
        yield
    finally:
        mp.mp.dps = old


def rec(fh, rid, inputs, value, tol):
    print("  ", rid, flush=True)
    fields = ", ".join([rid] + [mp.nstr(mp.mpf(v), 17) for v in inputs]
                       + [mp.nstr(mp.mpf(value), 22), mp.nstr(mp.mpf(tol), 3)])
    fh.write(fields + "\n")


def main():
    OUT.mkdir(parents=True, exist_ok=True)

    # ---- special functions ----
    with open(OUT / "specfun.txt", "w") as fh:
        fh.write("# id, inputs..., value, abs_tol\n")
        v1 = mp.hyp1f1(mp.mpf("2.8"), mp.mpf("1.2"), mp.mpf("3.5"))
        rec(fh, "v1_1f1", [2.8, 1.2, 3.5], v1, 1e-12)
        z2 = mp.mpf(6.3) / mp.mpf(10.7)
        v2 = mp.hyp2f1(mp.mpf("4.4"), mp.mpf(3.0) + 2 / mp.mpf(2.5), mp.mpf("3.0"), z2)
        rec(fh, "v2_2f1", [4.4, 3.8, 3.0, z2], v2, 1e-11)
        v2b = mp.hyp2f1(mp.mpf("2.5"), mp.mpf("1.7"), mp.mpf("3.1"), mp.mpf("0.95"))
        rec(fh, "v2b_2f1_nearunit", [2.5, 1.7, 3.1, 0.95], v2b, 1e-10)
        v3 = f2_brute("4.2", "2.8", "4.4", "1.2", "3.0", "0.25", "0.30")
        v3_check = mp.appellf2(mp.mpf("4.2"), mp.mpf("2.8"), mp.mpf("4.4"), mp.mpf("1.2"),
                               mp.mpf("3.0"), mp.mpf("0.25"), mp.mpf("0.30"))
        assert abs(v3 - v3_check) < mp.mpf("1e-25") * abs(v3), (v3, v3_check)
        rec(fh, "v3_f2", [4.2, 2.8, 4.4, 1.2, 3.0, 0.25, 0.30], v3, 1e-11)
        v4 = phi2_brute("-2.5", "4.0", "2.5", "-1.2", "-0.4")
        rec(fh, "v4_phi2", [-2.5, 4.0, 2.5, -1.2, -0.4], v4, 1e-11)
        v5 = kratzel("1.5", 1, 2)
        v5_bessel = 2 * mp.mpf(2) ** mp.mpf("0.75") * mp.besselk(mp.mpf("1.5"), 2 * mp.sqrt(2))
        assert abs(v5 - v5_bessel) < mp.mpf("1e-25") * abs(v5)
        rec(fh, "v5_kratzel_bessel", [1.5, 1.0, 2.0], v5, 1e-10)
        v6 = kratzel("0.8", "1.6667", "0.9")
        rec(fh, "v6_kratzel", [0.8, 1.6667, 0.9], v6, 1e-10)
        v7 = 2 * mp.besselk(mp.mpf("1.8"), 2)  # H20_02 at x=1, unit weights
        rec(fh, "v7_h2002_bessel", [1.0, 1.2, 1.0, 3.0, 1.0], v7, 1e-10)

    # ---- distribution-level oracles ----
    A1 = Link("1.5", "5.0", "1.2", "2.8")
    A2 = Link("2.5", "2.1", "3.0", "4.4")
    with open(OUT / "dist.txt", "w") as fh:
        fh.write("# id, inputs..., value, abs_tol\n")
        rec(fh, "akmu_theta", [1.5, 5.0, 1.2, 2.8], A1.theta, 1e-13)
        rec(fh, "akmu_beta", [1.5, 5.0, 1.2, 2.8], A1.beta, 1e-14)
        rec(fh, "akmu_c", [1.5, 5.0, 1.2, 2.8], A1.c, 1e-13)
        rec(fh, "akmu_pdf_x1", [1.0], A1.pdf(1), 1e-12)
        rec(fh, "akmu_cdf_x1", [1.0], A1.cdf(1), 1e-11)
        rec(fh, "akmu_mellin_s25", [2.5], A1.mellin("2.5"), 1e-12)
        SR = Link("3.0", "2.1", "3.0", "4.4", mp.mpf(10) ** -4)
        rec(fh, "akmu_moment_half_sr", [0.5], SR.mellin("1.5"), 1e-14)
        SDi = Link("2.0", "0.8", "1.5", "4.0", mp.mpf(90) ** -4)
        rec(fh, "akmu_env_sd_r05", [0.5], SDi.cdf_env("0.5"), 1e-10)

        for y in ("0.1", "1.0", "5.0"):
            rec(fh, f"prod_pdf_y{y}", [y], prod_pdf(A1, A2, y), 1e-10)
        with working_dps(22):
            rec(fh, "prod_cdf_y1", [1.0], prod_cdf(A1, A2, 1), 1e-9)
            rec(fh, "prod_mgf_m1", [-1.0], prod_mgf(A1, A2, -1), 1e-9)
        rec(fh, "prod_moment_n2", [2.0], A1.mellin(3) * A2.mellin(3), 1e-12)
        for z in ("0.3", "1.0", "3.0"):
            rec(fh, f"ratio_pdf_z{z}", [z], ratio_pdf(A1, A2, z), 1e-10)
        with working_dps(22):
            rec(fh, "ratio_cdf_z2", [2.0], ratio_cdf(A1, A2, 2), 1e-9)
            rec(fh, "ratio_mgf_m2", [-2.0], ratio_mgf(A1, A2, -2), 1e-9)
        rec(fh, "ratio_moment_n1", [1.0], A1.mellin(2) * A2.mellin(0), 1e-12)

        S1 = Link("2.2", "5.0", "1.2", "2.8")
        S2 = Link("2.2", "2.1", "3.0", "4.4")
        rec(fh, "same_alpha_pdf_z08", [0.8], ratio_pdf(S1, S2, "0.8"), 1e-10)

    # ---- application-level oracles ----
    with open(OUT / "apps.txt", "w") as fh:
        fh.write("# id, inputs..., value, abs_tol\n")
        # cascade set (gamma_th = 5 dB, gbar1 = 10 dB)
        C2 = Link("2.0", "2.1", "3.0", "1.0")
        gth = mp.mpf(10) ** mp.mpf("0.5")
        C1 = Link("2.0", "5.0", "1.2", "3.6", mp.mpf(10))
        with working_dps(22):
            rec(fh, "cascade_op_a2_g10db", [2.0, 10.0, 5.0], prod_cdf(C1, C2, gth), 1e-8)
        # AF for the same shape set at alpha1 = 2 (scale-free)
        af = (C1.mellin(3) * C2.mellin(3)) / (C1.gbar * C2.gbar) ** 2 - 1
        rec(fh, "cascade_af_a2", [2.0], af, 1e-10)
        # secrecy: SD(2.0,5.0,2.1,10.0)@0dB, SE(2.0,4.2,1.5,4.0)@0dB, Rs=1
        SDs = Link("2.0", "5.0", "2.1", "10.0")
        SEs = Link("2.0", "4.2", "1.5", "4.0")
        with working_dps(22):
            rec(fh, "sop_rs1_gse0db", [1.0, 0.0], ratio_cdf(SDs, SEs, 2), 1e-8)
        # SPSC at alpha_SD = 2.5, gbar_SE = -10 dB
        SDs25 = Link("2.5", "5.0", "2.1", "10.0")
        SEm10 = Link("2.0", "4.2", "1.5", "4.0", mp.mpf(10) ** -1)
        with working_dps(22):
            rec(fh, "spsc_a25_gsem10db", [2.5, -10.0], 1 - ratio_cdf(SDs25, SEm10, 1), 1e-8)
        # IRS geometry: S(0,0), R(0,10), D(90,0), beta=4, gamma_s=73dB
        dSR, dSD = mp.mpf(10), mp.mpf(90)
        dRD = mp.sqrt(mp.mpf(90) ** 2 + mp.mpf(10) ** 2)
        SD = Link("2.0", "0.8", "1.5", "4.0", dSD ** -4)
        SR4 = Link("3.0", "2.1", "3.0", "4.4", dSR ** -4)
        RD = Link("1.0", "5.0", "1.2", "2.8", dRD ** -4)
        muh = SR4.mellin(mp.mpf("1.5")) * RD.mellin(mp.mpf("1.5"))
        sig2 = SR4.gbar * RD.gbar - muh ** 2
        rec(fh, "irs_mu_half", [], muh, abs(muh) * 1e-12)
        rec(fh, "irs_sigma2", [], sig2, abs(sig2) * 1e-12)
        gs = mp.mpf(10) ** mp.mpf("7.3")

        def irs_gamma_op(N, gth_lin):
            w = mp.sqrt(mp.mpf(gth_lin) / gs)
            k = N * muh ** 2 / sig2
            th = sig2 / muh
            def integrand(t):
                x = w - t * th
                if x <= 0:
                    return mp.mpf(0)
                return t ** (k - 1) * mp.exp(-t) * SD.cdf_env(x)
            return mp.quad(integrand, [0, w / th]) / mp.gamma(k)

        def irs_gauss_op(N, gth_lin):
            w = mp.sqrt(mp.mpf(gth_lin) / gs)
            s = mp.sqrt(2 * N * sig2)
            L = (N * muh - w) / s
            def integrand(t):
                x = s * t - (N * muh - w)
                if x <= 0:
                    return mp.mpf(0)
                return mp.exp(-t ** 2) * SD.cdf_env(x)
            hi = max(float(L), 0.0) + 10.0
            return mp.quad(integrand, [L, hi]) / mp.sqrt(mp.pi)

        with working_dps(22):
            rec(fh, "irs_gamma_op_n16_0db", [16, 0.0], irs_gamma_op(16, 1), 1e-7)
            rec(fh, "irs_gauss_op_n16_0db", [16, 0.0], irs_gauss_op(16, 1), 1e-7)
            rec(fh, "irs_gauss_op_n64_0db", [64, 0.0], irs_gauss_op(64, 1), 1e-7)

    # ---- approximation fits (Fig. 1/2 set, both m-variants) ----
    with open(OUT / "approx.txt", "w") as fh:
        fh.write("# id, inputs..., value, abs_tol\n")
        for tag, m1, m2 in (("a", "2.8", "4.4"), ("b", "10.0", "10.0")):
            L1 = Link("1.5", "5.0", "1.2", m1)
            L2 = Link("2.5", "2.1", "3.0", m2)
            cpro = (L1.mellin(3) * L2.mellin(3)) - 1
            rec(fh, f"fit_ky_{tag}", [m1, m2], 1 / cpro, 1e-10)
            rec(fh, f"fit_thy_{tag}", [m1, m2], cpro, 1e-10)
            c1 = L1.mellin(3) - 1
            c2 = L2.mellin(3) - 1
            rec(fh, f"fit_kz1_{tag}", [m1, m2], 1 / c1, 1e-10)
            rec(fh, f"fit_kz2_{tag}", [m1, m2], 1 / c2, 1e-10)

    print("goldens written to", OUT)


if __name__ == "__main__":
    main()
