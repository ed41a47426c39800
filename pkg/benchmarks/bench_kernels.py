"""Compare the compiled and pure-Python rewriting kernels on the same workloads.

Run ``python benchmarks/bench_kernels.py``; both backends must agree on every
result before timings are reported.
"""
import argparse
import random
import timeit

from qinstanton import _kernels_py
from qinstanton.ncengine import MAX_PASSES
from qinstanton.qalgebras import AlgebraId, build
from qinstanton.scalar import ONE, PMode

try:
    from qinstanton import _kernels as _kernels_c
except ImportError:  # not compiled
    _kernels_c = None


def workloads(seed):
    rng = random.Random(seed)
    S = build(AlgebraId.SL2q_ext)
    M = build(AlgebraId.Mpq, PMode.P_EQ_Q)
    F = build(AlgebraId.Fpq, PMode.P_EQ_Q)
    gens = [S.index[n] for n in S.base_generators]
    words = [tuple(rng.choice(gens) for _ in range(rng.randint(4, 7))) for _ in range(60)]
    terms = {w: ONE for w in words}
    return {
        "reduce SL2q_ext words (60 words, length 4-7)":
            lambda K: K.reduce_terms(dict(terms), S._rules, S._lengths, MAX_PASSES),
        "irreducible words Mpq up to degree 6":
            lambda K: K.irreducible_words(tuple(range(len(M.names))), M._rules, M._lengths, 6),
        "irreducible words Fpq up to degree 4":
            lambda K: K.irreducible_words(tuple(range(len(F.names))), F._rules, F._lengths, 4),
        "multiply 60 x 60 terms":
            lambda K: K.multiply_terms(terms, terms),
    }


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    backends = [("python", _kernels_py)] + ([("cython", _kernels_c)] if _kernels_c else [])
    if _kernels_c is None:
        print("compiled kernels unavailable; timing the Python fallback only")
    print(f"{'workload':48} " + " ".join(f"{n:>10}" for n, _ in backends) + "   speedup")
    for name, fn in workloads(args.seed).items():
        results = [fn(K) for _, K in backends]
        if any(r != results[0] for r in results[1:]):
            raise SystemExit(f"backends disagree on {name!r}")
        times = [min(timeit.repeat(lambda: fn(K), number=1, repeat=args.repeat))
                 for _, K in backends]
        speed = f"{times[0] / times[1]:8.2f}x" if len(times) > 1 else ""
        print(f"{name:48} " + " ".join(f"{t * 1e3:8.2f}ms" for t in times) + f"  {speed}")


if __name__ == "__main__":
    main()
