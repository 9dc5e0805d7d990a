"""Independent evaluation of the frozen expected values used in the C++ tests.

Uses mpmath at 30 digits directly from the closed-form expressions, sharing no
code with the library. Run: python3 tests/oracles/frozen_values.py
"""
import mpmath as mp

mp.mp.dps = 30
c = mp.mpf(299792458)
hbar = mp.mpf("1.054571817e-34")
kB = mp.mpf("1.380649e-23")
pi = mp.pi


def omega_o(lam):
    return 2 * pi * c / lam


def lorentz(delta, gt):
    return 1 / (1j * delta + gt / 2)


lam = mp.mpf("1530e-9")
wo = omega_o(lam)

# transmission at zero detuning, Q_i = 6.4e4, Q_t = 5.9e4
gi = wo / mp.mpf(64000)
gt = wo / mp.mpf(59000)
gex = gt - gi
t0 = 1 - gex * lorentz(0, gt)
print("T(0) Qi=6.4e4 Qt=5.9e4:", mp.nstr(abs(t0) ** 2, 17))

# photon number at 1.5 mW
gi = wo / mp.mpf(64000)
print("N(1.5 mW):", mp.nstr(mp.mpf("1.5e-3") / (hbar * wo * gi), 17))
print("N(13 mW):", mp.nstr(mp.mpf("13e-3") / (hbar * wo * gi), 17))

# mechanics
m = mp.mpf("40e-15")
for fm in (mp.mpf("2.0e9"), mp.mpf("2.1e9")):
    wm = 2 * pi * fm
    print("f_m", fm, "x_zpm:", mp.nstr(mp.sqrt(hbar / (2 * m * wm)), 17),
          "x_th(295):", mp.nstr(mp.sqrt(kB * 295 / (m * wm ** 2)), 17),
          "n_th(295):", mp.nstr(1 / (mp.exp(hbar * wm / (kB * 295)) - 1), 17))

# damping shift at Delta = +omega_m
g0 = 2 * pi * mp.mpf(26000)
N = mp.mpf("6.5e5")
go = wo / mp.mpf(60000)
wm = 2 * pi * mp.mpf("2.1e9")
D = wm
dg = g0 ** 2 * N * (go / (go ** 2 / 4 + (D + wm) ** 2) - go / (go ** 2 / 4 + (D - wm) ** 2))
print("dgamma/2pi at D=wm:", mp.nstr(dg / (2 * pi), 17))

# cooperativity
wm20 = 2 * pi * mp.mpf("2.0e9")
gm = wm20 / 9000
print("C:", mp.nstr(mp.mpf("2.8e6") * g0 ** 2 / (go * gm), 17))


def threshold(qm, qt, qi, fm):
    wm = 2 * pi * fm
    gm = wm / qm
    gi = wo / qi
    gt = wo / qt
    xz = mp.sqrt(hbar / (2 * m * wm))
    gom = g0 / xz
    return m * wo / (2 * gom ** 2) * (gm * gi / (wm * gt)) * (gt / 2) ** 2 * ((2 * wm) ** 2 + (gt / 2) ** 2)


print("P_T device c:", mp.nstr(threshold(9000, 60000, 64000, mp.mpf("2.1e9")), 17))
# P_T is linear in gamma_i = omega_o / Q_i, so Q_i = P_T(Q_i=1) / 3 mW
print("Q_i device d:", mp.nstr(threshold(8000, 40000, 1, mp.mpf("2.1e9")) / mp.mpf("3e-3"), 17))

# thermal
a = mp.mpf("1e-6") + mp.mpf("1e-5") / mp.mpf("2.4")
print("a:", mp.nstr(a, 17))
print("dlambda(50 K):", mp.nstr(lam * a * 50, 17))
print("dT(400 pm):", mp.nstr((mp.mpf("400e-12") / lam) / a, 17))

# transduction arg-max over detuning (grid oracle)
gt = 2 * pi * mp.mpf("3.3e9")
w = 2 * pi * mp.mpf("2.1e9")
gi = gt * mp.mpf("0.9")
gex = gt - gi


def H(w, D):
    t = 1 - gex * lorentz(D, gt)
    K = gex * (mp.conj(t) * lorentz(D + w, gt) * lorentz(D, gt) - t * mp.conj(lorentz(D - w, gt) * lorentz(D, gt)))
    return abs(K) ** 2


best = max((H(w, w * k / 2000), k) for k in range(1, 4001))
print("argmax H / omega (grid 1/2000):", best[1] / 2000)
