# Reference values frozen into tests/test_specfun.cpp and tests/test_spectra.cpp.
# Run with: python3 tests/oracles/specfun_oracles.py
import mpmath as mp

mp.mp.dps = 40

def show(label, v):
    print(f"{label} = {mp.nstr(v, 20)}")

show("lngamma(3.7)", mp.loggamma(3.7))
for z in [mp.mpc(2.5, 3.0), mp.mpc(0.3, -7.0), mp.mpc(-2.5, 0.5), mp.mpc(1.2, 60.0), mp.mpc(40, 70)]:
    v = mp.loggamma(z)
    show(f"loggamma({z}).re", v.real)
    show(f"loggamma({z}).im", v.imag)
for a, b, c, x in [(0.2, 0.6, 1.6, 0.9), (0.8, 0.9, 1.9, 0.99), (0.5, 0.75, 1.75, 0.75),
                   (0.4, 0.7, 1.7, 0.6), (-0.3, 1.2, 2.5, 0.8)]:
    show(f"hyp2f1({a},{b},{c},{x})", mp.hyp2f1(a, b, c, x))
show("normalization(1.5,0.75)", mp.gamma(2) * mp.gamma(1.5) * 2.5 / mp.gamma(2.5))

# Eq. (7) as printed, no extra 1/pi.
def f7(al, H, lam):
    k = al + H - 1
    return (mp.sin(mp.pi * H) * mp.gamma(k + H) * mp.gamma(k + 1 - H) * k * mp.cosh(mp.pi * lam)
            / ((mp.sinh(mp.pi * lam) ** 2 + mp.sin(mp.pi * H) ** 2) * abs(mp.gamma(1j * lam + k + 1)) ** 2))

for al, H, lam in [(2.0, 0.3, 0.0), (2.0, 0.3, 1.3), (0.8, 0.7, 1.0), (0.6, 0.9, 3.0), (8, 0.5, 0.5)]:
    show(f"f7({al},{H},{lam})", f7(al, H, lam))
for al, H in [(2.0, 0.3), (0.6, 0.9)]:
    show(f"int f7({al},{H})", 2 * mp.quad(lambda l: f7(al, H, l), [0, 1, 10, 100, mp.inf]))
