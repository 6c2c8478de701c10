"""Compare the compiled and pure-Python term kernels.

Kernel-level timings call both backends directly in this process.  The
end-to-end Gröbner timings run a child process per backend, switching
with ``BIDERIVE_PURE_PYTHON`` the way users would.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json]
"""

import argparse
import json
import os
import random
import subprocess
import sys
import timeit
from fractions import Fraction

from biderive import _pykernels

try:
    from biderive import _ckernels
except ImportError:
    _ckernels = None

GB_SNIPPET = r"""
import time
from biderive import kernels
from biderive.exactpoly import Ring
from biderive.ideals import IdealHandle, groebner_basis
R = Ring(("a", "b", "c", "d", "e"))
gens = ["a+b+c+d+e", "a*b+b*c+c*d+d*e+e*a", "a*b*c+b*c*d+c*d*e+d*e*a+e*a*b",
        "a*b*c*d+b*c*d*e+c*d*e*a+d*e*a*b+e*a*b*c", "a*b*c*d*e-1"]
t = time.perf_counter()
gb = groebner_basis([R.parse(g).num for g in gens], ring=R)
print(kernels.BACKEND, time.perf_counter() - t, len(gb.basis))
"""


def random_terms(rng, n, nterms, deg):
    out = {}
    for _ in range(nterms):
        e = tuple(rng.randint(0, deg) for _ in range(n))
        out[e] = Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 5))
    return out


def kernel_cases(seed=0):
    rng = random.Random(seed)
    a = random_terms(rng, 4, 40, 5)
    b = random_terms(rng, 4, 40, 5)
    return {
        "mul_terms 40x40": lambda k: k.mul_terms(a, b),
        "add_terms shifted": lambda k: k.add_terms(a, b, Fraction(3, 2), (1, 0, 2, 0)),
        "diff_terms": lambda k: k.diff_terms(a, 1),
    }


def normal_form_case():
    from biderive.exactpoly import Ring
    from biderive.ideals import _as_triples, groebner_basis

    R = Ring(("x", "y", "z"))
    gb = groebner_basis([R.parse(g).num for g in ("x^2 - y*z + 1", "y^2 - x*z", "z^3 - x - y")], ring=R)
    tri = _as_triples(gb.basis)
    f = R.parse("(x + y + z + 1)^7").num.terms
    return lambda k: k.normal_form(f, tri, R.sortkey)


def time_it(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def end_to_end(backend):
    env = dict(os.environ)
    if backend == "python":
        env["BIDERIVE_PURE_PYTHON"] = "1"
    else:
        env.pop("BIDERIVE_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", GB_SNIPPET], capture_output=True, text=True, env=env, check=True)
    name, secs, size = out.stdout.split()
    return name, float(secs), int(size)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    cases = dict(kernel_cases())
    cases["normal_form (x+y+z+1)^7"] = normal_form_case()
    rows = []
    for name, fn in cases.items():
        row = {"case": name}
        for bname, mod in backends:
            row[bname] = time_it(lambda: fn(mod), args.repeat)
        rows.append(row)
    gb = {}
    for bname, _ in backends:
        got, secs, size = end_to_end(bname)
        gb[bname] = {"loaded": got, "seconds": secs, "basis_size": size}
    if args.json:
        print(json.dumps({"kernels": rows, "cyclic5": gb}, indent=2))
        return 0
    if _ckernels is None:
        print("compiled kernels not built; only the Python backend was timed")
    print(f"{'case':28} {'python':>10} {'cython':>10} {'speedup':>8}")
    for r in rows:
        c = r.get("cython")
        sp = f"{r['python'] / c:7.2f}x" if c else "-"
        print(f"{r['case']:28} {r['python'] * 1e3:8.2f}ms {(c or 0) * 1e3:8.2f}ms {sp:>8}")
    for bname, v in gb.items():
        print(f"cyclic-5 GB [{v['loaded']}]: {v['seconds']:.3f}s, {v['basis_size']} elements")
    return 0


if __name__ == "__main__":
    sys.exit(main())
