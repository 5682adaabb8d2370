"""High-precision reference values for the C++ test suites.

Everything here is computed with mpmath directly from the defining
integrals (no hypergeometric factorizations), except where a value is
itself a special-function identity.  Run once; the printed numbers are
pasted into tests/frozen_values.hpp.
"""
import mpmath as mp

mp.mp.dps = 30

H1, H2, T = mp.mpf("0.6"), mp.mpf("0.7"), mp.mpf(1)
half = mp.mpf(1) / 2


def out(name, v):
    print(f"inline constexpr double {name} = {mp.nstr(v, 20)};")


def hurst_consts(h1, h2):
    B = mp.beta
    al = 2 * h2 - h1 - half
    D1 = 2 * (1 - h1) * B(1.5 - h1, 1.5 - h1)
    D2 = (1 - h2) * B(1.5 - h1, 1.5 - h1)
    b3 = B(1.5 - h1, 2 * h2 - 1)
    D3 = 2 * (h2 - h1) * b3
    D4 = (h1 - half) * (1.5 - h1) / (2 * h2 - h1 + half) * b3
    D5 = (h1 - half) * b3
    c = (mp.gamma(2 - 2 * h1) * mp.cos(mp.pi * (1 - h1)) * h2 * (2 * h2 - 1)
         / (mp.pi * h1 * (2 * h1 - 1) * mp.gamma(1.5 - h1) ** 2))
    F5at1 = mp.hyp2f1(2 * h2 - 2 * h1, 2 * h2 - 1, 2 * h2 - h1 + half, 1)
    Xi = (D3 + D5) - D5 * F5at1
    Bc = (h1 - half) * B(al, 1 + 2 * h1 - 2 * h2)
    Cc = (1.5 + h1 - 2 * h2) * B(1.5 - h1, 1 + 2 * h1 - 2 * h2)
    F2at1 = mp.hyp2f1(1 + 2 * h2 - 2 * h1, 1.5 - h1, 4 - 2 * h1, 1)
    A = 2 * (h2 - h1) * D2 * F2at1 * B(1.5 - h1, al)
    return dict(c=c, D1=D1, D2=D2, D3=D3, D4=D4, D5=D5, Xi=Xi, A=A, B=Bc, C=Cc, ell=Cc * Xi)


def G2(u, s, h1=H1, h2=H2):
    # int_0^u (u-t)^{1/2-H1} t^{1/2-H1} (s-t)^{2H2-2} dt
    return mp.quad(lambda t: (u - t) ** (half - h1) * t ** (half - h1) * (s - t) ** (2 * h2 - 2), [0, u])


def I_phi(u, s, h1=H1, h2=H2):
    # int_s^u (u-t)^{1/2-H1} t^{1/2-H1} (t-s)^{2H2-2} dt
    return mp.quad(lambda t: (u - t) ** (half - h1) * t ** (half - h1) * (t - s) ** (2 * h2 - 2), [s, u])


def tau_direct(u, s, h1=H1, h2=H2):
    return -(h1 - half) * mp.quad(
        lambda t: (u - t) ** (-half - h1) * t ** (half - h1) * (s - t) ** (2 * h2 - 2), [0, s])


def main():
    print("// gamma / beta")
    out("kGamma1_8", mp.gamma(mp.mpf("1.8")))
    out("kBeta0_9_1_1", mp.beta(mp.mpf("0.9"), mp.mpf("1.1")))
    out("kF1At1_06_07", mp.gamma(1.8) * mp.gamma(0.3) / (mp.gamma(1.2) * mp.gamma(0.9)))
    h1, h2 = H1, H2
    F5one = mp.gamma(2 * h2 - h1 + half) * mp.gamma(1.5 - 2 * h2 + h1) / (mp.gamma(h1 + half) * mp.gamma(1.5 - h1))
    out("kF5At1_06_07", F5one)

    print("// 2F1 samples (a, b, c, z, value)")
    params = {
        "F1": (2 - 2 * h2, 1.5 - h1, 3 - 2 * h1),
        "F2": (1 + 2 * h2 - 2 * h1, 1.5 - h1, 4 - 2 * h1),
        "F3": (h1 - half, 1.5 - h1, 2 * h2 - h1 + half),
        "F4": (2 * h2 - 2 * h1 + 1, 2 * h2 - 1, 2 * h2 - h1 + 1.5),
        "F5": (2 * h2 - 2 * h1, 2 * h2 - 1, 2 * h2 - h1 + half),
    }
    for name, (a, b, c) in params.items():
        for z in ["0.1", "0.45", "0.5", "0.55", "0.9", "0.999", "0.999999"]:
            v = mp.hyp2f1(a, b, c, mp.mpf(z))
            print(f"  {{{mp.nstr(a,17)}, {mp.nstr(b,17)}, {mp.nstr(c,17)}, {z}, {mp.nstr(v,20)}}},  // {name}")

    print("// constants at (0.6, 0.7)")
    for k, v in hurst_consts(H1, H2).items():
        out(f"kConst_{k}", v)

    out("kGrhs_06_half", (mp.mpf("0.25") ** (-mp.mpf("0.1"))) / (2 * H1 * mp.beta(1.5 - H1, H1 + half)))

    print("// psi(0.3, 0.7) via derivative of the defining integral")
    u, s = mp.mpf("0.3"), mp.mpf("0.7")
    out("kPsi_03_07", mp.diff(lambda uu: G2(uu, s), u))

    print("// rho(0.7, 0.3) = d/du I(u,s) + tau")
    u, s = mp.mpf("0.7"), mp.mpf("0.3")
    out("kPhi_07_03", mp.diff(lambda uu: I_phi(uu, s), u))
    out("kTau_07_03", tau_direct(u, s))

    print("// Phi1(0.5), Phi2(0.5) from their defining integrals")
    a1, b1, c1 = params["F1"]
    a2, b2, c2 = params["F2"]
    F1 = lambda x: mp.hyp2f1(a1, b1, c1, x)
    F2 = lambda x: mp.hyp2f1(a2, b2, c2, x)
    z = mp.mpf("0.5")
    al = 2 * h2 - h1 - half
    out("kPhi1_05", mp.quad(lambda y: (F1(z) - F1(z + (1 - z) * y)) / y ** (h1 + half), [0, 0.5, 1]))
    out("kPhi2_05", mp.quad(lambda y: (z * F2(z) - (z + (1 - z) * y) * (1 - y) ** (al - 1) * F2(z + (1 - z) * y))
                            / y ** (h1 + half), [0, 0.5, 1]))

    print("// Psi_j and Lambda_j from the original-variable integrals of the rho pieces")
    a3, b3_, c3 = params["F3"]
    a4, b4, c4 = params["F4"]
    a5, b5, c5 = params["F5"]
    F3 = lambda x: mp.hyp2f1(a3, b3_, c3, 1 - x)
    F4 = lambda x: mp.hyp2f1(a4, b4, c4, 1 - x)
    F5 = lambda x: mp.hyp2f1(a5, b5, c5, x)
    k = hurst_consts(h1, h2)
    D3, D4, D5 = k["D3"], k["D4"], k["D5"]
    gam = 2 * h2 - 2 * h1

    def rho_pieces(u, s):
        zz = s / u
        r1 = (u - s) ** (al - 1) * u ** (-h1 - half) * (D3 * u + D5 * s) * F3(zz)
        r2 = D4 * u ** (-2 * h2) * s ** al * (u - s) ** al * F4(zz)
        r3 = -D5 * u ** (1 - 2 * h2) * s ** al * (u - s) ** (al - 1) * F5(zz)
        return (r1, r2, r3)

    u, s, TT = mp.mpf("0.4"), mp.mpf("0.2"), mp.mpf("1.0")
    for j in range(3):
        f = lambda t: (u ** (2 * h1 - 1) * rho_pieces(u, s)[j] - t ** (2 * h1 - 1) * rho_pieces(t, s)[j]) / (t - u) ** (h1 + half)
        val = (u - s) ** (1 - gam) * u ** (half - h1) * mp.quad(f, [u, u + mp.mpf("0.05"), TT])
        out(f"kPsi{j+1}_05_3", val)
    u, s, TT = mp.mpf("0.2"), mp.mpf("0.5"), mp.mpf("1.1")
    for j in range(3):
        f = lambda t: (t - u) ** (-half - h1) * t ** (2 * h1 - 1) * rho_pieces(t, s)[j]
        val = (s - u) ** (1 - gam) * s ** (half - h1) * mp.quad(f, [s, s + mp.mpf("0.05"), TT])
        out(f"kLambda{j+1}_04_2", val)


if __name__ == "__main__":
    main()
