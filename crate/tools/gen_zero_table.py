#!/usr/bin/env python3
"""Generate the bundled zeta-zero ordinate table and the zeta' companion CSV.

Usage: python3 tools/gen_zero_table.py COUNT OUTDIR

Writes OUTDIR/zeta_zeros_COUNT.txt (one ordinate per line) and
OUTDIR/zeta_prime_COUNT.csv (gamma,re,im of zeta'(1/2 + i gamma)).
Values are computed with mpmath at 30 significant digits.
"""
import sys
import mpmath

def main():
    count = int(sys.argv[1])
    outdir = sys.argv[2]
    mpmath.mp.dps = 30
    zeros = open(f"{outdir}/zeta_zeros_{count}.txt", "w")
    comp = open(f"{outdir}/zeta_prime_{count}.csv", "w")
    zeros.write(f"# imaginary parts of the first {count} nontrivial zeta zeros (mpmath.zetazero, 30 digits)\n")
    comp.write("gamma,re,im\n")
    for n in range(1, count + 1):
        rho = mpmath.zetazero(n)
        g = rho.imag
        zp = mpmath.zeta(rho, derivative=1)
        zeros.write(mpmath.nstr(g, 20, strip_zeros=False) + "\n")
        comp.write("%s,%s,%s\n" % (mpmath.nstr(g, 20, strip_zeros=False),
                                   mpmath.nstr(zp.real, 20, strip_zeros=False),
                                   mpmath.nstr(zp.imag, 20, strip_zeros=False)))
    zeros.close()
    comp.close()

if __name__ == "__main__":
    main()
