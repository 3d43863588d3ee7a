"""Back-and-forth type computation, Scott heights, Scott sentences, and
canonical isomorphism invariants for finite structures.

Levels are finite: a finite structure's tuple partition stabilizes after
finitely many refinement rounds, so ordinals are plain naturals here.
Tuples run over lengths 0..n_max with n_max the largest structure size; a
tuple listing every element already pins the structure, and repeated
coordinates are covered because equality patterns are part of level 0.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from . import _kernel
from .errors import (MaterializationRefusedError, PreconditionError,
                     SignatureMismatchError)
from .model import (And, Atom, Eq, ModelSpace, Not, Or, Sentence,
                    Structure, exists_block, forall_block)


@dataclass(frozen=True)
class TypeId:
    """Equivalence class of (structure, tuple) pairs at one level.

    Class indices are dense per level; equal TypeId means same class within
    one partition run.
    """

    level: int
    class_index: int


@dataclass(eq=False)
class TypePartition:
    """Per-level classes of (structure index, tuple) pairs from one joint
    refinement run.  levels[k] refines levels[k-1]; every level at or beyond
    ``stabilization_level`` equals the stabilized partition."""

    structures: tuple[Structure, ...]
    n_max: int
    items: tuple[tuple[int, tuple[int, ...]], ...]
    item_index: dict
    levels: tuple[tuple[int, ...], ...]
    stabilization_level: int

    def class_at(self, level: int, struct_idx: int, tup: Sequence[int]) -> int:
        idx = self.item_index.get((struct_idx, tuple(tup)))
        if idx is None:
            raise PreconditionError(
                f"tuple {tuple(tup)} not tracked (length cap {self.n_max})")
        return self.levels[min(level, self.stabilization_level)][idx]

    def type_id(self, level: int, struct_idx: int, tup: Sequence[int]) -> TypeId:
        return TypeId(level, self.class_at(level, struct_idx, tup))

    def classes_at(self, level: int) -> int:
        return max(self.levels[min(level, self.stabilization_level)]) + 1


def _atomic_code(M: Structure, tup: tuple[int, ...]) -> tuple:
    """Canonical value of the atomic type: equality pattern plus all
    relation facts over the tuple's positions.  Comparable across
    structures that share a signature."""
    pat = tuple(tup.index(v) for v in tup)
    facts = []
    for (_name, arity), table in zip(M.signature.relations, M.tables):
        bits = 0
        for combo in itertools.product(range(len(tup)), repeat=arity):
            bits = (bits << 1) | (tuple(tup[i] for i in combo) in table)
        facts.append(bits)
    return (len(tup), pat, tuple(facts))


def joint_type_partition(structures: Sequence[Structure]) -> TypePartition:
    """Simultaneous refinement of all tuples of all given structures.

    Level 0 groups by atomic type; level a+1 groups two tuples iff they were
    grouped at level a and their one-element extensions realize the same set
    of level-a classes (extension stops at the length cap).  Halts at the
    first level equal to its predecessor.
    """
    structures = tuple(structures)
    if not structures:
        raise PreconditionError("need at least one structure")
    sig = structures[0].signature
    for s in structures[1:]:
        if s.signature != sig:
            raise SignatureMismatchError("structures over different signatures")
    n_max = max(s.size for s in structures)

    items: list[tuple[int, tuple[int, ...]]] = []
    for si, M in enumerate(structures):
        for length in range(n_max + 1):
            items.extend((si, tup) for tup
                         in itertools.product(range(M.size), repeat=length))
    item_index = {it: i for i, it in enumerate(items)}

    code_label: dict[tuple, int] = {}
    init = []
    for si, tup in items:
        code = _atomic_code(structures[si], tup)
        lab = code_label.get(code)
        if lab is None:
            lab = len(code_label)
            code_label[code] = lab
        init.append(lab)

    ext = []
    for si, tup in items:
        if len(tup) < n_max:
            ext.append([item_index[(si, tup + (c,))]
                        for c in range(structures[si].size)])
        else:
            ext.append([])

    levels, stable = _kernel.active.refine_levels(ext, init)
    return TypePartition(structures, n_max, tuple(items), item_index,
                         tuple(tuple(lv) for lv in levels), stable)


@lru_cache(maxsize=512)
def _pair_partition(M: Structure, N: Structure) -> TypePartition:
    return joint_type_partition((M, N))


@lru_cache(maxsize=2048)
def _self_partition(M: Structure) -> TypePartition:
    return joint_type_partition((M,))


def types_equal(M: Structure, a: Sequence[int], N: Structure,
                b: Sequence[int], alpha: int) -> bool:
    """Whether (M, a) and (N, b) share a class at level alpha (clamped to
    the stabilization level) of the joint partition of M and N."""
    a, b = tuple(a), tuple(b)
    if len(a) != len(b):
        raise PreconditionError(f"tuple lengths differ: {len(a)} vs {len(b)}")
    for tup, S in ((a, M), (b, N)):
        if any(not (0 <= v < S.size) for v in tup):
            raise PreconditionError(f"tuple {tup} out of range")
    part = _pair_partition(M, N)
    if len(a) > part.n_max:
        # tuples past the length cap never split beyond their atomic type
        return _atomic_code(M, a) == _atomic_code(N, b)
    return part.class_at(alpha, 0, a) == part.class_at(alpha, 1, b)


def scott_height(M: Structure) -> int:
    """Least level at which the self-partition of M's tuples stabilizes."""
    return _self_partition(M).stabilization_level


# ---------------------------------------------------------------------------
# Canonical invariant
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8192)
def canonical_invariant(M: Structure) -> str:
    """Opaque token equal across structures iff they are isomorphic.

    The stabilized tuple partition is the greatest fixpoint of one-element
    refinement; on the length-layered tuple system that fixpoint is unique,
    so one bottom-up pass assigns each stable class a canonical digest.  The
    token is the digest of the empty tuple's class plus the size.
    """
    n = M.size
    names: dict[tuple[int, ...], str] = {}
    for length in range(n, -1, -1):
        for tup in itertools.product(range(n), repeat=length):
            payload = repr(_atomic_code(M, tup))
            if length < n:
                kids = sorted({names[tup + (c,)] for c in range(n)})
                payload += "|" + ",".join(kids)
            names[tup] = hashlib.sha256(payload.encode()).hexdigest()
    token = f"{n}|{names[()]}"
    return hashlib.sha256(token.encode()).hexdigest()


# ---------------------------------------------------------------------------
# Scott sentences
# ---------------------------------------------------------------------------

DEFAULT_MATERIALIZE_CAP = 4


class _Materializer:
    """Builds the level-indexed type formulas of one structure, shared via
    hash-consing; free variables are x0..x(k-1) for a length-k tuple."""

    def __init__(self, M: Structure):
        self.M = M
        self.n_max = M.size
        self.memo: dict[tuple[tuple[int, ...], int], Sentence] = {}

    @staticmethod
    def var(i: int) -> str:
        return f"x{i}"

    def atomic(self, tup: tuple[int, ...]) -> Sentence:
        M = self.M
        conj: list[Sentence] = []
        k = len(tup)
        for i in range(k):
            for j in range(i + 1, k):
                e = Eq(self.var(i), self.var(j))
                conj.append(e if tup[i] == tup[j] else Not(e))
        for (name, arity), table in zip(M.signature.relations, M.tables):
            for combo in itertools.product(range(k), repeat=arity):
                at = Atom(name, tuple(self.var(i) for i in combo))
                conj.append(at if tuple(tup[i] for i in combo) in table
                            else Not(at))
        return And(conj)

    def formula(self, tup: tuple[int, ...], alpha: int) -> Sentence:
        key = (tup, alpha)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if alpha == 0:
            res = self.atomic(tup)
        else:
            n_max, size = self.n_max, self.M.size
            k = len(tup)
            conj: list[Sentence] = [self.formula(tup, alpha - 1)]
            for ell in range(1, n_max - k + 1):
                yvars = [self.var(k + j) for j in range(ell)]
                seen: set[int] = set()
                for ext in itertools.product(range(size), repeat=ell):
                    f = self.formula(tup + ext, alpha - 1)
                    if id(f) not in seen:
                        seen.add(id(f))
                        conj.append(exists_block(yvars, f))
            for ell in range(1, n_max + 2 - k):
                yvars = [self.var(k + j) for j in range(ell)]
                disj = [self.formula(tup + ext, alpha - 1)
                        for ext in itertools.product(range(size), repeat=ell)]
                conj.append(forall_block(yvars, Or(disj)))
            res = And(conj)
        self.memo[key] = res
        return res


@lru_cache(maxsize=128)
def _materializer(M: Structure) -> _Materializer:
    return _Materializer(M)


def type_formula(M: Structure, tup: Sequence[int], alpha: int,
                 cap: int = DEFAULT_MATERIALIZE_CAP) -> Sentence:
    """The formula of the level-alpha type of a tuple in M, with free
    variables x0..x(len-1).  The empty tuple at a high enough level is the
    Scott sentence."""
    if M.size > cap:
        raise MaterializationRefusedError(
            f"size {M.size} exceeds materialization cap {cap}; "
            "the canonical invariant is still available")
    tup = tuple(tup)
    if any(not (0 <= v < M.size) for v in tup):
        raise PreconditionError(f"tuple {tup} out of range")
    return _materializer(M).formula(tup, alpha)


def scott_sentence(M: Structure, cap: int = DEFAULT_MATERIALIZE_CAP) -> Sentence:
    """Materialize the sentence characterizing M up to isomorphism among
    finite structures: the empty tuple's type at level scott_height(M)+2.

    Level 0 is the atomic conjunction; a successor level conjoins the
    previous level, existential extension blocks (total tuple length up to
    n_max), and one universal block per extension length with the longest
    block one past n_max, which pins the structure size by pigeonhole.
    """
    return type_formula(M, (), scott_height(M) + 2, cap)


@dataclass(frozen=True)
class ScottReport:
    """Height, canonical invariant, and (if materialized) Scott sentence."""

    structure: Structure
    height: int
    sentence: Optional[Sentence]
    invariant: str


def scott_report(M: Structure, cap: int = DEFAULT_MATERIALIZE_CAP) -> ScottReport:
    sentence = None
    if M.size <= cap:
        sentence = scott_sentence(M, cap)
    return ScottReport(M, scott_height(M), sentence, canonical_invariant(M))


# ---------------------------------------------------------------------------
# Type sets of a sentence over a space
# ---------------------------------------------------------------------------

def space_partition(space: ModelSpace) -> TypePartition:
    """Joint partition over all representatives of the space (cached)."""
    part = space._extra.get("partition")
    if part is None:
        part = joint_type_partition(space.representatives)
        space._extra["partition"] = part
    return part


def alpha_types_of(sentence: Sentence, alpha: int,
                   space: ModelSpace) -> tuple[set[TypeId], set[TypeId]]:
    """(all level-alpha classes realized by tuples in models of the
    sentence, the subset realized by empty tuples), within the space."""
    if alpha < 0:
        raise PreconditionError("alpha must be >= 0")
    part = space_partition(space)
    sat = space.satset(sentence)
    level = min(alpha, part.stabilization_level)
    labels = part.levels[level]
    psi: set[TypeId] = set()
    phi: set[TypeId] = set()
    for idx, (si, tup) in enumerate(part.items):
        if (sat >> si) & 1:
            tid = TypeId(alpha, labels[idx])
            psi.add(tid)
            if not tup:
                phi.add(tid)
    return psi, phi


def space_scott_sentence(space: ModelSpace, rep_index: int) -> Sentence:
    """Scott sentence of a representative, cached per space.

    Its satisfaction bitset is computed eagerly: every consumer combines
    these sentences into large conjunctions/disjunctions, which then reduce
    to cached bitset algebra instead of evaluating the combined DAG."""
    cache = space._extra.setdefault("scott_sentences", {})
    s = cache.get(rep_index)
    if s is None:
        rep = space.representatives[rep_index]
        s = scott_sentence(rep, cap=max(DEFAULT_MATERIALIZE_CAP, space.max_size))
        cache[rep_index] = s
        space.satset(s)
    return s
