"""Recompute the frozen high-precision constants used by tests/reference_values.rs."""
from mpmath import mp, mpf, acos, cos, sin, pi, log

mp.dps = 40


def ostar(a, b):
    return acos(cos(a) * cos(b))


def boxstar(a, b, l):
    s = 1 if l == 0 else -1
    return acos((cos(a) + s * cos(b)) / (1 + s * cos(a) * cos(b)))


def h2(p):
    return -p * log(p, 2) - (1 - p) * log(1 - p, 2)


cases = {
    "ostar(0.2pi, 0.3pi)": ostar(mpf("0.2") * pi, mpf("0.3") * pi),
    "ostar(0.05pi, 0.45pi)": ostar(mpf("0.05") * pi, mpf("0.45") * pi),
    "boxstar(0.2pi, 0.4pi, 0)": boxstar(mpf("0.2") * pi, mpf("0.4") * pi, 0),
    "boxstar(0.2pi, 0.4pi, 1)": boxstar(mpf("0.2") * pi, mpf("0.4") * pi, 1),
    "boxstar(0.1pi, 0.15pi, 1)": boxstar(mpf("0.1") * pi, mpf("0.15") * pi, 1),
    "holevo(0.2pi)": h2((1 + cos(mpf("0.2") * pi)) / 2),
    "classical(0.2pi)": 1 - h2((1 - sin(mpf("0.2") * pi)) / 2),
}
for name, value in cases.items():
    print(f"{name} = {mp.nstr(value, 25)}")
