# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernel: C twin of ``pure``.

Same program/table encodings, same results; only faster.  Structures are
limited to size <= 8 and programs to 16 read slots so a memo key packs into
one 64-bit integer; ``supports`` reports whether a given call fits and the
model layer falls back to the pure kernel when it does not.
"""

from cython.operator cimport dereference
from cpython cimport array
from libc.stdint cimport int64_t, uint8_t
from libcpp.unordered_map cimport unordered_map

import array

BACKEND = "compiled"

DEF OP_ATOM = 0
DEF OP_EQ = 1
DEF OP_NOT = 2
DEF OP_AND = 3
DEF OP_OR = 4
DEF OP_EXISTS = 5
DEF OP_FORALL = 6

MAX_SIZE = 8
MAX_SLOTS = 16
MAX_NODES = 1 << 15


def encode_structure(int size, tables):
    """Bit-table encoding identical to the pure kernel, stored as bytes."""
    encoded = []
    for arity, tups in tables:
        nbits = size ** arity
        buf = bytearray((nbits + 7) >> 3)
        for tup in tups:
            idx = 0
            for a in tup:
                idx = idx * size + a
            buf[idx >> 3] |= 1 << (idx & 7)
        encoded.append(bytes(buf))
    return (size, encoded)


def supports(prog, handle) -> bool:
    return (handle[0] <= MAX_SIZE and prog.nslots <= MAX_SLOTS
            and len(prog.ops) <= MAX_NODES)


cdef struct ProgView:
    const int* ops
    const int* arg1
    const int* arg2
    const int* cstart
    const int* cend
    const int* children
    const int* ustart
    const int* uend
    const int* uslots


cdef class _CompiledProgram:
    """Cached C arrays for one Program (attached to it on first use)."""
    cdef array.array ops, arg1, arg2, cstart, cend, children, ustart, uend, uslots
    cdef ProgView view
    cdef public int root

    def __init__(self, prog):
        self.ops = array.array("i", prog.ops)
        self.arg1 = array.array("i", prog.arg1)
        self.arg2 = array.array("i", prog.arg2)
        self.cstart = array.array("i", prog.cstart)
        self.cend = array.array("i", prog.cend)
        self.children = array.array("i", prog.children or [0])
        self.ustart = array.array("i", prog.ustart)
        self.uend = array.array("i", prog.uend)
        self.uslots = array.array("i", prog.uslots or [0])
        self.root = prog.root
        self.view.ops = self.ops.data.as_ints
        self.view.arg1 = self.arg1.data.as_ints
        self.view.arg2 = self.arg2.data.as_ints
        self.view.cstart = self.cstart.data.as_ints
        self.view.cend = self.cend.data.as_ints
        self.view.children = self.children.data.as_ints
        self.view.ustart = self.ustart.data.as_ints
        self.view.uend = self.uend.data.as_ints
        self.view.uslots = self.uslots.data.as_ints


def _get_compiled(prog):
    cp = getattr(prog, "_core_cache", None)
    if cp is None:
        cp = _CompiledProgram(prog)
        prog._core_cache = cp
    return cp


cdef int _rec(ProgView* p, int i, const uint8_t** tables, int size,
              int* env, unordered_map[int64_t, char]* memo) except -1:
    cdef int op = p.ops[i]
    cdef int k, v, slot, child, idx
    cdef int64_t key
    cdef char res
    if op == OP_ATOM:
        idx = 0
        for k in range(p.cstart[i], p.cend[i]):
            idx = idx * size + env[p.children[k]]
        return (tables[p.arg1[i]][idx >> 3] >> (idx & 7)) & 1
    if op == OP_EQ:
        return env[p.arg1[i]] == env[p.arg2[i]]
    if op == OP_NOT:
        return not _rec(p, p.arg1[i], tables, size, env, memo)
    # node id in the high bits, 3 bits per used slot below: unambiguous for
    # <= 16 slots and element values < 8
    key = (<int64_t> i) << 48
    v = 0
    for k in range(p.ustart[i], p.uend[i]):
        key |= (<int64_t> env[p.uslots[k]]) << (3 * v)
        v += 1
    it = memo.find(key)
    if it != memo.end():
        return dereference(it).second
    if op == OP_AND:
        res = 1
        for k in range(p.cstart[i], p.cend[i]):
            if not _rec(p, p.children[k], tables, size, env, memo):
                res = 0
                break
    elif op == OP_OR:
        res = 0
        for k in range(p.cstart[i], p.cend[i]):
            if _rec(p, p.children[k], tables, size, env, memo):
                res = 1
                break
    elif op == OP_EXISTS:
        slot = p.arg2[i]
        child = p.arg1[i]
        res = 0
        for v in range(size):
            env[slot] = v
            if _rec(p, child, tables, size, env, memo):
                res = 1
                break
    else:  # OP_FORALL
        slot = p.arg2[i]
        child = p.arg1[i]
        res = 1
        for v in range(size):
            env[slot] = v
            if not _rec(p, child, tables, size, env, memo):
                res = 0
                break
    dereference(memo)[key] = res
    return res


def eval_program(prog, handle, env0) -> bool:
    cdef int size = handle[0]
    cdef _CompiledProgram cp = _get_compiled(prog)
    cdef const uint8_t* tabs[64]
    cdef int nrel = len(handle[1])
    if nrel > 64:
        raise ValueError("too many relations for compiled kernel")
    cdef int j
    cdef bytes b
    encoded = handle[1]
    for j in range(nrel):
        b = encoded[j]
        tabs[j] = <const uint8_t*> b
    cdef int env[64]
    for j in range(64):
        env[j] = 0
    for j, v in enumerate(env0):
        env[j] = v
    cdef unordered_map[int64_t, char] memo
    return bool(_rec(&cp.view, cp.root, tabs, size, env, &memo))


def refine_levels(ext, init_labels):
    """Same contract as the pure kernel's refine_levels."""
    if any(len(e) > 8 for e in ext):
        from . import pure as _pure
        return _pure.refine_levels(ext, init_labels)
    cdef int n = len(init_labels)
    cdef array.array flat_arr = array.array("i", [x for lst in ext for x in lst] or [0])
    cdef array.array off_arr = array.array("i", [0] * (n + 1))
    cdef int* flat = flat_arr.data.as_ints
    cdef int* off = off_arr.data.as_ints
    cdef int i, j, k, m, t, nclasses, pos
    pos = 0
    for i in range(n):
        off[i] = pos
        pos += len(ext[i])
    off[n] = pos

    levels = [list(init_labels)]
    nclasses = len(set(init_labels))
    cdef array.array cur_arr = array.array("i", init_labels)
    cdef array.array new_arr = array.array("i", [0] * n)
    cdef int* cur = cur_arr.data.as_ints
    cdef int* new = new_arr.data.as_ints
    cdef int buf[8]
    while True:
        sig2new = {}
        for i in range(n):
            m = 0
            for k in range(off[i], off[i + 1]):
                buf[m] = cur[flat[k]]
                m += 1
            # insertion sort + dedup of at most 8 labels
            for j in range(1, m):
                t = buf[j]
                k = j - 1
                while k >= 0 and buf[k] > t:
                    buf[k + 1] = buf[k]
                    k -= 1
                buf[k + 1] = t
            sig = [cur[i]]
            for j in range(m):
                if j == 0 or buf[j] != buf[j - 1]:
                    sig.append(buf[j])
            tsig = tuple(sig)
            lab = sig2new.get(tsig)
            if lab is None:
                lab = len(sig2new)
                sig2new[tsig] = lab
            new[i] = lab
        if len(sig2new) == nclasses:
            return levels, len(levels) - 1
        nclasses = len(sig2new)
        levels.append([new[i] for i in range(n)])
        for i in range(n):
            cur[i] = new[i]
