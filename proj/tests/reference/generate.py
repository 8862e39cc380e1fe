"""Regenerates tests/reference_values.hpp with mpmath at 40 digits.

    python3 tests/reference/generate.py > tests/reference_values.hpp
"""
import mpmath as mp

mp.mp.dps = 40
I = mp.mpc(0, 1)


def xi_chain(ra, rb, pa, pb, dth):
    ra, rb, pa, pb, dth = [mp.mpf(x) for x in (ra, rb, pa, pb, dth)]
    ta, tb = mp.tanh(ra), mp.tanh(rb)
    ca, cb = mp.cosh(ra), mp.cosh(rb)

    def f(x):
        return 1 - mp.cos(2 * x) + 2 * I * mp.sin(2 * x)

    def fm(ta, tb, pa, pb, d):
        return 4 * mp.exp(2 * I * d) * (
            -mp.sin(d) ** 2 + mp.sin(2 * pa + d) ** 2 * ta ** 2 + mp.sin(2 * pb - d) ** 2 * tb ** 2
            - 2 * mp.sin(2 * pa) * mp.sin(2 * pb) * ta * tb - mp.sin(2 * pa - 2 * pb + d) ** 2 * ta ** 2 * tb ** 2)

    def ds(ta, tb, ca, cb, pa, pb, d):
        e2 = mp.exp(2 * I * d)
        d1 = e2 * (f(2 * pa + d) * ta ** 2 + f(2 * pb - d) * tb ** 2 - f(d)
                   - 2 * (f(pa + pb) - f(pb - pa)) * ta * tb - f(2 * pb - 2 * pa - d) * ta ** 2 * tb ** 2)
        d2 = 4 * I * e2 * (mp.sin(2 * pa) * ta - mp.sin(2 * pb - 2 * d) * tb
                           - mp.sin(4 * pa - 2 * pb + 2 * d) * ta ** 2 * tb + mp.sin(2 * pa) * ta * tb ** 2)
        d3 = -4 * I * e2 * (mp.sin(d) + mp.sin(2 * pa - 2 * pb + d) * ta * tb) / (ca * cb)
        d4 = 4 * I * e2 * (mp.sin(2 * pa + d) * ta - mp.sin(2 * pb - d) * tb) / (ca * cb)
        return d1, d2, d3, d4

    fM = fm(ta, tb, pa, pb, dth)
    D = [x / fM for x in ds(ta, tb, ca, cb, pa, pb, dth)]
    fMba = fm(tb, ta, pb, pa, -dth)
    dba = ds(tb, ta, cb, ca, pb, pa, -dth)
    Db1, Db2 = mp.conj(dba[0] / fMba), mp.conj(dba[1] / fMba)

    def A(r, p):
        return -(1 + mp.exp(-4 * I * p) * mp.tanh(r) ** 2) / (1 - mp.exp(-4 * I * p) * mp.tanh(r) ** 2)

    def B(r, p):
        return 2 * mp.exp(-2 * I * p) * mp.tanh(r) / (1 - mp.exp(-4 * I * p) * mp.tanh(r) ** 2)

    cD1 = mp.mpf(1) / 2 + A(rb, pb) - D[0]
    cDb1 = mp.mpf(1) / 2 + mp.conj(A(ra, pa)) - Db1
    cD2 = B(rb, pb) - D[1]
    cDb2 = mp.conj(B(ra, pa)) - Db2
    D3, D4 = D[2], D[3]
    den = cD1 * cDb1 - D4 ** 2
    x11 = cD1 - (cDb1 * cD2 ** 2 + cD1 * D3 ** 2 - 2 * cD2 * D3 * D4) / den
    x22 = cDb1 - (cD1 * cDb2 ** 2 + cDb1 * D3 ** 2 - 2 * cDb2 * D3 * D4) / den
    x12 = D4 - (cDb1 * cD2 * D3 + cD1 * cDb2 * D3 - cD2 * cDb2 * D4 - D3 ** 2 * D4) / den
    return fM, x11, x22, x12


def c(z):
    z = mp.mpc(z)
    return "{%s, %s}" % (e(z.real), e(z.imag))


def e(x):
    return mp.nstr(mp.mpf(x), 20, min_fixed=0, max_fixed=0) if x != 0 else "0.0"


ERFC_POINTS = [
    (0, 0), (0.5, 0), (-0.5, 0), (2, 0), (-3, 0), (5.5, 0), (0, 1), (0, -4), (1, 1), (-1, 1),
    (1, -1), (-1, -1), (3.9, 0.1), (4.1, -0.1), (0.1, 3.95), (2.5, 3.0), (-2.5, -3.0), (5.9, 0.5),
    (6.1, 0.5), (0.3, 5.8), (-4, 4), (4, -4), (7, 2), (-7, 2), (10, -3), (0.01, 0.02), (1e-8, 1e-8),
    (15, 15), (26, 1), (-0.7, 5.99),
]

XI_POINTS = [
    (5, 5, 0, 0, 0.3), (5, 5, -0.2, 0.2, 0.5), (1.5, 1.5, 0, 0, 0.7), (0.4, 0.3, 0.3, -0.2, 0.7),
    (2.0, 3.5, 0.9, -1.3, 2.2), (8, 8, 0.3, -0.1, 0.4),
]

print("#pragma once")
print()
print("// Generated by tests/reference/generate.py (mpmath, 40 digits). Do not edit.")
print()
print("#include <complex>")
print()
print("namespace refdata {")
print()
print("struct ErfcRef {")
print("    std::complex<double> z;")
print("    std::complex<double> erfc;")
print("};")
print()
print("inline const ErfcRef kErfc[] = {")
for x, y in ERFC_POINTS:
    z = mp.mpc(x, y)
    print("    {%s, %s}," % (c(z), c(mp.erfc(z))))
print("};")
print()
print("struct XiRef {")
print("    double ra, rb, pa, pb, dtheta;")
print("    std::complex<double> fM, xi11, xi22, xi12;")
print("};")
print()
print("inline const XiRef kXi[] = {")
for p in XI_POINTS:
    fM, x11, x22, x12 = xi_chain(*p)
    print("    {%s, %s, %s, %s, %s," % tuple(e(v) for v in p))
    print("     %s, %s, %s, %s}," % (c(fM), c(x11), c(x22), c(x12)))
print("};")
print()
print("}  // namespace refdata")
