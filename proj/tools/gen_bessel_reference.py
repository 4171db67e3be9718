"""Writes tests/data/bessel_zeros_mpmath.json: selected positive zeros of J_nu
to 30 significant digits, used to cross-check the Boost-based oracle.

Integer-friendly orders use mpmath.besseljzero. For the large non-integer
order besseljzero does not converge, so zeros are located by scanning J_nu
from x = nu in unit steps (zeros there are more than pi apart) and refined
with findroot; the scan also fixes each zero's index.
"""

import json
import sys
from pathlib import Path

import mpmath

DIRECT = {
    "1": [1, 2, 3, 10, 100, 1000, 10000],
    "10": [1, 2, 10, 100, 1000, 10000],
    "100": [1, 2, 10, 100, 1000, 10000],
}
SCANNED = {"1414.2135623730951": [1, 2, 3, 10, 50, 100, 500, 1000]}
MAXPREC = 30000


def direct(nu_text, ks):
    mpmath.mp.dps = 40
    return [(k, mpmath.besseljzero(mpmath.mpf(nu_text), k)) for k in ks]


def scanned(nu_text, ks):
    nu = mpmath.mpf(nu_text)
    wanted = set(ks)
    out = []
    f = lambda x: mpmath.besselj(nu, x, maxprec=MAXPREC)
    mpmath.mp.dps = 20
    x = mpmath.floor(nu)
    prev = mpmath.sign(f(x))
    k = 0
    while k < max(ks):
        x += 1
        cur = mpmath.sign(f(x))
        if cur != prev:
            k += 1
            if k in wanted:
                mpmath.mp.dps = 40
                z = mpmath.findroot(f, (x - 1, x), solver="anderson")
                out.append((k, z))
                mpmath.mp.dps = 20
        prev = cur
    return out


def main(out: Path) -> None:
    rows = []
    jobs = [(nu, ks, direct) for nu, ks in DIRECT.items()] + [(nu, ks, scanned) for nu, ks in SCANNED.items()]
    for nu_text, ks, method in jobs:
        for k, z in method(nu_text, ks):
            rows.append({"nu": nu_text, "k": k, "zero": mpmath.nstr(z, 30)})
            print(nu_text, k, rows[-1]["zero"], file=sys.stderr)
    out.write_text(json.dumps({"digits": 30, "zeros": rows}, indent=1) + "\n")


if __name__ == "__main__":
    default = Path(__file__).resolve().parent.parent / "tests" / "data" / "bessel_zeros_mpmath.json"
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else default)
