"""Benchmark the compiled kernel against the pure-Python fallback.

Runs the two hot paths (sentence evaluation, partition refinement) through
both back ends on identical inputs, checks the results agree, and prints
the timings.  Usage:

    python benchmarks/bench_kernels.py [--trials N]
"""

import argparse
import itertools
import os
import random
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

from indepax import _kernel, generators, scott  # noqa: E402
from indepax.model import Signature, Structure, compile_sentence  # noqa: E402


def random_structure(rng, sig, n):
    tables = {name: [t for t in itertools.product(range(n), repeat=arity)
                     if rng.random() < 0.45]
              for name, arity in sig.relations}
    return Structure.make(sig, n, tables)


def bench_eval(kern, progs, structs):
    t0 = time.perf_counter()
    results = []
    for prog in progs:
        for M in structs:
            results.append(kern.eval_program(prog, M.kernel_handle(kern), ()))
    return time.perf_counter() - t0, results


def bench_refine(kern, instances):
    t0 = time.perf_counter()
    results = []
    for ext, init in instances:
        results.append(kern.refine_levels(ext, init))
    return time.perf_counter() - t0, results


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=200)
    args = parser.parse_args()

    if _kernel.compiled is None:
        print("compiled kernel not built; run `python setup.py build_ext "
              "--inplace` first")
        return 1

    rng = random.Random(0)
    sig = generators.FUZZ_SIGNATURE
    structs = [random_structure(rng, sig, rng.randint(2, 6))
               for _ in range(15)]

    random_progs = []
    while len(random_progs) < args.trials:
        s = generators.random_formula(rng, 4)
        random_progs.append(compile_sentence(s, sig, ()))

    bsig = Signature((("R", 2),))
    bstructs = [random_structure(rng, bsig, 3) for _ in range(10)]
    scott_progs = [compile_sentence(scott.scott_sentence(M), bsig, ())
                   for M in bstructs[:6]]

    refine_instances = []
    for _ in range(args.trials):
        n = rng.randint(20, 120)
        ext = [[rng.randrange(n) for _ in range(rng.randint(0, 6))]
               for _ in range(n)]
        remap = {}
        init = [remap.setdefault(rng.randint(0, 4), len(remap))
                for _ in range(n)]
        refine_instances.append((ext, init))

    rows = []
    for name, fn, payload in [
        ("random sentence eval", bench_eval, (random_progs, structs)),
        ("scott sentence eval", bench_eval, (scott_progs, bstructs)),
        ("partition refinement", bench_refine, (refine_instances,)),
    ]:
        t_pure, r_pure = fn(_kernel.pure, *payload)
        t_comp, r_comp = fn(_kernel.compiled, *payload)
        if r_pure != r_comp:
            print(f"PARITY FAILURE in {name}")
            return 1
        rows.append((name, t_pure, t_comp))

    print(f"{'benchmark':<24}{'pure':>10}{'compiled':>10}{'speedup':>9}")
    for name, tp, tc in rows:
        print(f"{name:<24}{tp:>9.3f}s{tc:>9.3f}s{tp / tc:>8.1f}x")
    print("results identical across back ends")
    return 0


if __name__ == "__main__":
    sys.exit(main())
