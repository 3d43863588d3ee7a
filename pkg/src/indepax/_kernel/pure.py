"""Pure-Python kernel: reference implementation of the hot inner loops.

Always available; the compiled twin in ``_core`` replaces it when the
extension was built.  Semantics of the two must match bit for bit (see
``benchmarks/bench_kernels.py`` and ``tests/test_kernel_parity.py``).
"""

from .program import (OP_AND, OP_ATOM, OP_EQ, OP_EXISTS, OP_FORALL, OP_NOT,
                      OP_OR, Program)

BACKEND = "pure"


def encode_structure(size: int, tables: list[tuple[int, list[tuple[int, ...]]]]):
    """Pack relation tables into per-relation bit masks.

    ``tables`` holds one ``(arity, tuples)`` entry per signature relation.
    Bit index of tuple (a0, .., ak) is ((a0*n + a1)*n + a2)... (fold left).
    """
    masks = []
    for _arity, tups in tables:
        mask = 0
        for tup in tups:
            idx = 0
            for a in tup:
                idx = idx * size + a
            mask |= 1 << idx
        masks.append(mask)
    return (size, masks)


def supports(prog: Program, handle) -> bool:  # the pure kernel is total
    return True


def eval_program(prog: Program, handle, env0: tuple[int, ...]) -> bool:
    """Evaluate a compiled sentence over an encoded structure.

    ``env0`` fills the free slots; quantifier nodes extend the environment.
    AND/OR/quantifier results are memoised on the slots their subtree reads.
    """
    size, masks = handle
    ops = prog.ops
    arg1 = prog.arg1
    arg2 = prog.arg2
    cstart = prog.cstart
    cend = prog.cend
    children = prog.children
    env = [0] * max(prog.nslots, len(env0))
    env[:len(env0)] = env0
    memo: dict[tuple, bool] = {}

    def rec(i: int) -> bool:
        op = ops[i]
        if op == OP_ATOM:
            idx = 0
            for k in range(cstart[i], cend[i]):
                idx = idx * size + env[children[k]]
            return bool((masks[arg1[i]] >> idx) & 1)
        if op == OP_EQ:
            return env[arg1[i]] == env[arg2[i]]
        if op == OP_NOT:
            return not rec(arg1[i])
        key = (i,) + tuple(env[s] for s in prog.uslots[prog.ustart[i]:prog.uend[i]])
        hit = memo.get(key)
        if hit is not None:
            return hit
        if op == OP_AND:
            res = all(rec(children[k]) for k in range(cstart[i], cend[i]))
        elif op == OP_OR:
            res = any(rec(children[k]) for k in range(cstart[i], cend[i]))
        elif op == OP_EXISTS:
            slot, child = arg2[i], arg1[i]
            res = False
            for v in range(size):
                env[slot] = v
                if rec(child):
                    res = True
                    break
        elif op == OP_FORALL:
            slot, child = arg2[i], arg1[i]
            res = True
            for v in range(size):
                env[slot] = v
                if not rec(child):
                    res = False
                    break
        else:
            raise AssertionError(f"bad opcode {op}")
        memo[key] = res
        return res

    return rec(prog.root)


def refine_levels(ext: list[list[int]], init_labels: list[int]):
    """Iterate one-step signature refinement until the partition repeats.

    ``ext[i]`` lists the item indices reachable from item i by appending one
    element (empty for items at the tuple-length cap).  Labels are dense,
    assigned in first-occurrence order, so the result is deterministic.
    Returns (levels, stable) with levels[k] the labels at level k and
    ``stable`` the first level whose refinement is itself.
    """
    n = len(init_labels)
    levels = [list(init_labels)]
    nclasses = len(set(init_labels))
    while True:
        cur = levels[-1]
        sig2new: dict[tuple, int] = {}
        new = [0] * n
        for i in range(n):
            sig = (cur[i], tuple(sorted({cur[j] for j in ext[i]})))
            lab = sig2new.get(sig)
            if lab is None:
                lab = len(sig2new)
                sig2new[sig] = lab
            new[i] = lab
        # refinement only ever splits classes, so an unchanged count means
        # an identical partition
        if len(sig2new) == nclasses:
            return levels, len(levels) - 1
        nclasses = len(sig2new)
        levels.append(new)
