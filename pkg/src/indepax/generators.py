"""Seeded random instance generators shared by the fuzz command and the
acceptance suite.  Everything is driven by an explicit random.Random so a
fixed seed reproduces runs byte for byte.
"""

from __future__ import annotations

import random
from typing import Optional

from .model import (And, Atom, Eq, Exists, Forall, ModelSpace, Not, Or,
                    Sentence, Signature, Theory)
from .scott import TypeId, space_partition, type_formula
from .setfam import SetFamily

FUZZ_SIGNATURE = Signature((("P", 1), ("R", 2)))


def random_formula(rng: random.Random, depth: int, scope: tuple[str, ...] = ()
                   ) -> Sentence:
    """Random formula of quantifier/connective depth <= depth over the fuzz
    signature; closed when scope is empty."""
    if not scope or (depth > 0 and rng.random() < 0.45):
        if depth == 0 and not scope:
            return Exists("v0", Atom("P", ("v0",)))
        v = f"v{len(scope)}"
        body = random_formula(rng, depth - 1, scope + (v,))
        return Exists(v, body) if rng.random() < 0.5 else Forall(v, body)
    if depth == 0:
        return _leaf(rng, scope)
    k = rng.randrange(5)
    if k == 0:
        return Not(random_formula(rng, depth - 1, scope))
    if k == 1:
        return And([random_formula(rng, depth - 1, scope) for _ in range(2)])
    if k == 2:
        return Or([random_formula(rng, depth - 1, scope) for _ in range(2)])
    return _leaf(rng, scope)


def _leaf(rng: random.Random, scope: tuple[str, ...]) -> Sentence:
    k = rng.randrange(4)
    if k == 0:
        return Atom("P", (rng.choice(scope),))
    if k == 1 or len(scope) == 1:
        return Atom("R", (rng.choice(scope), rng.choice(scope)))
    if k == 2:
        return Eq(rng.choice(scope), rng.choice(scope))
    return Not(Atom("P", (rng.choice(scope),)))


def random_theory(rng: random.Random, space: ModelSpace,
                  max_sentences: int = 5, depth: int = 4,
                  require_consistent: bool = True,
                  max_attempts: int = 200) -> Theory:
    """Random theory over the fuzz signature, resampled until consistent
    after preprocessing when requested."""
    for _ in range(max_attempts):
        n = rng.randint(1, max_sentences)
        T = Theory.of([random_formula(rng, depth) for _ in range(n)])
        if not require_consistent:
            return T
        if space.theory_mask(T):
            return T
    raise RuntimeError("could not generate a consistent theory")


def random_family(rng: random.Random, max_universe: int = 16,
                  max_sets: int = 8) -> SetFamily:
    """Random family with a nonempty intersection (a common element is
    forced into every set)."""
    universe = rng.randint(1, max_universe)
    k = rng.randint(0, max_sets)
    common = rng.randrange(universe)
    full = (1 << universe) - 1
    sets = []
    for _ in range(k):
        mask = rng.getrandbits(universe) & full
        sets.append(mask | (1 << common))
    return SetFamily(universe, tuple(sets))


def random_partition_instance(rng: random.Random, space: ModelSpace,
                              max_attempts: int = 300
                              ) -> Optional[tuple[Theory, int, list[Sentence]]]:
    """(theory, pivot index, parts) such that the parts partition the
    negation of the pivot over the space: counter-model classes of the
    pivot are split into blocks and each part is the disjunction of the
    block's Scott sentences."""
    from .scott import space_scott_sentence
    for _ in range(max_attempts):
        n = rng.randint(2, 4)
        T = random_theory(rng, space, max_sentences=n, depth=3)
        if len(T) < 2:
            continue
        pivot = rng.randrange(len(T))
        counter = space.full_mask & ~space.satset(T.sentences[pivot])
        classes = [i for i in range(len(space.representatives))
                   if (counter >> i) & 1]
        if len(classes) < len(T) - 1:
            continue
        rng.shuffle(classes)
        nblocks = len(T) - 1
        blocks = [classes[i::nblocks] for i in range(nblocks)]
        parts = [Or([space_scott_sentence(space, i) for i in sorted(block)])
                 for block in blocks]
        return T, pivot, parts
    return None


def random_pair_instance(rng: random.Random, space: ModelSpace
                         ) -> tuple[Theory, Theory]:
    """Disjoint (C, D) sentence lists for the pairing transform; whether
    the applicability hypothesis holds is up to the caller to test."""
    nc = rng.randint(2, 4)
    nd = rng.randint(0, min(2, nc))
    seen: set[int] = set()
    sentences = []
    while len(sentences) < nc + nd:
        s = random_formula(rng, 3)
        if id(s) not in seen:
            seen.add(id(s))
            sentences.append(s)
    return Theory.of(sentences[:nc]), Theory.of(sentences[nc:])


def random_type_instance(rng: random.Random, space: ModelSpace,
                         count: int, max_attempts: int = 50
                         ) -> Optional[list[tuple[TypeId, list[Sentence]]]]:
    """2..6 stabilized one-element types realized in pairwise disjoint sets
    of space models, as negation-completed formula sets (each type carries
    its own type formula plus the negations of the others')."""
    part = space_partition(space)
    level = part.stabilization_level
    # class -> (first realizing (rep, element), realizing rep set)
    realizers: dict[int, tuple[int, int]] = {}
    rep_sets: dict[int, int] = {}
    for idx, (si, tup) in enumerate(part.items):
        if len(tup) != 1:
            continue
        lab = part.levels[level][idx]
        realizers.setdefault(lab, (si, tup[0]))
        rep_sets[lab] = rep_sets.get(lab, 0) | (1 << si)
    labels = sorted(realizers)
    for _ in range(max_attempts):
        rng.shuffle(labels)
        chosen: list[int] = []
        used_reps = 0
        for lab in labels:
            if len(chosen) == count:
                break
            if rep_sets[lab] & used_reps:
                continue
            chosen.append(lab)
            used_reps |= rep_sets[lab]
        if len(chosen) < count:
            continue
        chosen.sort()
        base = {}
        for lab in chosen:
            si, e = realizers[lab]
            base[lab] = type_formula(space.representatives[si], (e,), level,
                                     cap=max(4, space.max_size))
        out = []
        for lab in chosen:
            formulas = [base[lab]] + [Not(base[other]) for other in chosen
                                      if other != lab]
            out.append((TypeId(level, lab), formulas))
        return out
    return None
