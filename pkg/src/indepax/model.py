"""Finite relational structures, sentence ASTs, evaluation, and bounded
model spaces.

Sentences are hash-consed: building the same shape twice yields the same
object, so structural equality is identity and per-sentence caches can key
on ``id``.  All values are immutable after construction; every operation
here is a pure function of its inputs plus the (idempotent) caches.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, Union

from . import _kernel
from ._kernel import (OP_AND, OP_ATOM, OP_EQ, OP_EXISTS, OP_FORALL, OP_NOT,
                      OP_OR, Program)
from .errors import (EnumerationOverflowError, MalformedSentenceError,
                     ParseError, SignatureMismatchError)

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_.'-]*$")
MAX_PARSE_DEPTH = 400

# ---------------------------------------------------------------------------
# Sentence AST (interned)
# ---------------------------------------------------------------------------

_INTERN: dict = {}


class Sentence:
    """Base class for formula nodes.  A sentence is a formula whose ``free``
    set is empty."""

    __slots__ = ("free",)

    def __repr__(self):
        return to_sexpr(self)


class Atom(Sentence):
    __slots__ = ("rel", "args")

    def __new__(cls, rel: str, args: Iterable[str]):
        args = tuple(args)
        key = (0, rel, args)
        node = _INTERN.get(key)
        if node is None:
            node = object.__new__(cls)
            node.rel = rel
            node.args = args
            node.free = frozenset(args)
            _INTERN[key] = node
        return node


class Eq(Sentence):
    __slots__ = ("left", "right")

    def __new__(cls, left: str, right: str):
        key = (1, left, right)
        node = _INTERN.get(key)
        if node is None:
            node = object.__new__(cls)
            node.left = left
            node.right = right
            node.free = frozenset((left, right))
            _INTERN[key] = node
        return node


class Not(Sentence):
    __slots__ = ("child",)

    def __new__(cls, child: Sentence):
        key = (2, id(child))
        node = _INTERN.get(key)
        if node is None:
            node = object.__new__(cls)
            node.child = child
            node.free = child.free
            _INTERN[key] = node
        return node


def _dedup(children: Iterable[Sentence]) -> tuple[Sentence, ...]:
    seen = set()
    out = []
    for c in children:
        if id(c) not in seen:
            seen.add(id(c))
            out.append(c)
    return tuple(out)


class And(Sentence):
    """Finite conjunction over a set of children (duplicates collapse, a
    single child collapses to itself, the empty conjunction is true)."""

    __slots__ = ("children",)

    def __new__(cls, children: Iterable[Sentence]):
        kids = _dedup(children)
        if len(kids) == 1:
            return kids[0]
        key = (3, tuple(map(id, kids)))
        node = _INTERN.get(key)
        if node is None:
            node = object.__new__(cls)
            node.children = kids
            node.free = frozenset().union(*(c.free for c in kids)) if kids else frozenset()
            _INTERN[key] = node
        return node


class Or(Sentence):
    """Finite disjunction; empty disjunction is false."""

    __slots__ = ("children",)

    def __new__(cls, children: Iterable[Sentence]):
        kids = _dedup(children)
        if len(kids) == 1:
            return kids[0]
        key = (4, tuple(map(id, kids)))
        node = _INTERN.get(key)
        if node is None:
            node = object.__new__(cls)
            node.children = kids
            node.free = frozenset().union(*(c.free for c in kids)) if kids else frozenset()
            _INTERN[key] = node
        return node


class Exists(Sentence):
    __slots__ = ("var", "child")

    def __new__(cls, var: str, child: Sentence):
        key = (5, var, id(child))
        node = _INTERN.get(key)
        if node is None:
            node = object.__new__(cls)
            node.var = var
            node.child = child
            node.free = child.free - {var}
            _INTERN[key] = node
        return node


class Forall(Sentence):
    __slots__ = ("var", "child")

    def __new__(cls, var: str, child: Sentence):
        key = (6, var, id(child))
        node = _INTERN.get(key)
        if node is None:
            node = object.__new__(cls)
            node.var = var
            node.child = child
            node.free = child.free - {var}
            _INTERN[key] = node
        return node


#: canonical contradiction: no element differs from itself
CONTRADICTION = Exists("x", Not(Eq("x", "x")))
#: valid over every nonempty domain
TAUTOLOGY = Exists("x", Eq("x", "x"))
TRUE = And(())
FALSE = Or(())


def exists_block(vars_: Sequence[str], child: Sentence) -> Sentence:
    for v in reversed(vars_):
        child = Exists(v, child)
    return child


def forall_block(vars_: Sequence[str], child: Sentence) -> Sentence:
    for v in reversed(vars_):
        child = Forall(v, child)
    return child


# ---------------------------------------------------------------------------
# s-expression text format
# ---------------------------------------------------------------------------

def to_sexpr(sentence: Sentence) -> str:
    """Serialize a formula.  Iterative so shared DAGs of any depth print."""
    out: list[str] = []
    stack: list[object] = [sentence]
    while stack:
        x = stack.pop()
        if isinstance(x, str):
            out.append(x)
        elif isinstance(x, Atom):
            out.append("(atom " + " ".join((x.rel,) + x.args) + ")" if x.args
                       else f"(atom {x.rel})")
        elif isinstance(x, Eq):
            out.append(f"(eq {x.left} {x.right})")
        elif isinstance(x, Not):
            stack += [")", x.child, "(not "]
        elif isinstance(x, (And, Or)):
            tag = "and" if isinstance(x, And) else "or"
            stack.append(")")
            for c in reversed(x.children):
                stack += [c, " "]
            stack.append(f"({tag}")
        elif isinstance(x, (Exists, Forall)):
            tag = "exists" if isinstance(x, Exists) else "forall"
            stack += [")", x.child, f"({tag} {x.var} "]
        else:
            raise MalformedSentenceError(f"not a sentence node: {x!r}")
    return "".join(out)


_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")


def _tokenize(text: str):
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if not m:
            rest = text[pos:]
            if rest.strip():
                raise ParseError(f"unexpected input {rest.strip()[:10]!r}", pos)
            return
        yield m.group(1), m.start(1)
        pos = m.end()


def _check_ident(tok: str, pos: int, what: str) -> str:
    if not _IDENT.match(tok):
        raise ParseError(f"invalid {what} {tok!r}", pos)
    return tok


def parse_sentence(text: str) -> Sentence:
    """Parse one s-expression formula; raises ParseError with a position."""
    tokens = list(_tokenize(text))
    node, nxt = _parse_at(tokens, 0)
    if nxt != len(tokens):
        raise ParseError("trailing input after sentence", tokens[nxt][1])
    return node


def _parse_at(tokens, i) -> tuple[Sentence, int]:
    # first pass: nested token lists (iterative, so depth is data not stack)
    if i >= len(tokens):
        raise ParseError("unexpected end of input")
    stack: list[list] = []
    root = None
    depth = 0
    while True:
        if i >= len(tokens):
            raise ParseError("unclosed '('", tokens[-1][1])
        tok, pos = tokens[i]
        i += 1
        if tok == "(":
            depth += 1
            if depth > MAX_PARSE_DEPTH:
                raise ParseError("expression too deeply nested", pos)
            stack.append([pos])
        elif tok == ")":
            if not stack:
                raise ParseError("unmatched ')'", pos)
            done = stack.pop()
            depth -= 1
            if stack:
                stack[-1].append(done)
            else:
                root = done
                break
        else:
            if not stack:
                raise ParseError("expected '('", pos)
            stack[-1].append((tok, pos))
    return _build(root), i


def _build(lst) -> Sentence:
    # explicit stack: convert nested lists bottom-up
    built: dict[int, Sentence] = {}
    work = [(lst, False)]
    while work:
        node, expanded = work.pop()
        pos = node[0]
        items = node[1:]
        if not items:
            raise ParseError("empty expression", pos)
        head = items[0]
        if not isinstance(head, tuple):
            raise ParseError("operator must be a symbol", pos)
        op, oppos = head
        if not expanded:
            work.append((node, True))
            for sub in items[1:]:
                if isinstance(sub, list):
                    work.append((sub, False))
            continue
        args = items[1:]

        def as_formula(x):
            if isinstance(x, list):
                return built[id(x)]
            raise ParseError(f"expected a subexpression, got {x[0]!r}", x[1])

        def as_name(x, what):
            if isinstance(x, list):
                raise ParseError(f"expected {what}", x[0])
            return _check_ident(x[0], x[1], what)

        if op in ("and", "or"):
            kids = [as_formula(a) for a in args]
            built[id(node)] = And(kids) if op == "and" else Or(kids)
        elif op == "not":
            if len(args) != 1:
                raise ParseError("not takes one argument", oppos)
            built[id(node)] = Not(as_formula(args[0]))
        elif op in ("exists", "forall"):
            if len(args) != 2:
                raise ParseError(f"{op} takes a variable and a body", oppos)
            var = as_name(args[0], "variable")
            body = as_formula(args[1])
            built[id(node)] = (Exists if op == "exists" else Forall)(var, body)
        elif op == "atom":
            if not args:
                raise ParseError("atom needs a relation name", oppos)
            rel = as_name(args[0], "relation name")
            vs = [as_name(a, "variable") for a in args[1:]]
            built[id(node)] = Atom(rel, vs)
        elif op == "eq":
            if len(args) != 2:
                raise ParseError("eq takes two variables", oppos)
            built[id(node)] = Eq(as_name(args[0], "variable"),
                                 as_name(args[1], "variable"))
        else:
            raise ParseError(f"unknown operator {op!r}", oppos)
    return built[id(lst)]


# ---------------------------------------------------------------------------
# Signature and structures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Signature:
    """Finite relational signature: (name, arity) pairs, names unique."""

    relations: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [n for n, _ in self.relations]
        if len(set(names)) != len(names):
            raise SignatureMismatchError("duplicate relation names")
        for n, a in self.relations:
            if not _IDENT.match(n):
                raise SignatureMismatchError(f"invalid relation name {n!r}")
            if a < 1:
                raise SignatureMismatchError(f"arity of {n} must be >= 1")

    @cached_property
    def index(self) -> dict[str, int]:
        return {n: i for i, (n, _) in enumerate(self.relations)}

    def arity(self, name: str) -> int:
        return self.relations[self.index[name]][1]


@dataclass(frozen=True)
class Structure:
    """Finite structure with universe 0..size-1.  ``tables`` aligns with
    ``signature.relations``."""

    signature: Signature
    size: int
    tables: tuple[frozenset[tuple[int, ...]], ...]

    @staticmethod
    def make(signature: Signature, size: int,
             tables: Mapping[str, Iterable[Sequence[int]]]) -> "Structure":
        if size < 1:
            raise ParseError("structure size must be >= 1")
        known = {n for n, _ in signature.relations}
        extra = set(tables) - known
        if extra:
            raise ParseError(f"unknown relations in tables: {sorted(extra)}")
        packed = []
        for name, arity in signature.relations:
            rows = set()
            for row in tables.get(name, ()):  # missing relation = empty table
                row = tuple(row)
                if len(row) != arity:
                    raise ParseError(f"tuple {row} has wrong arity for {name}")
                if any(not (0 <= v < size) for v in row):
                    raise ParseError(f"tuple {row} out of range for size {size}")
                rows.add(row)
            packed.append(frozenset(rows))
        return Structure(signature, size, tuple(packed))

    def table(self, name: str) -> frozenset[tuple[int, ...]]:
        return self.tables[self.signature.index[name]]

    @cached_property
    def _handles(self) -> dict:
        return {}

    def kernel_handle(self, kern):
        h = self._handles.get(kern.BACKEND)
        if h is None:
            spec = [(arity, sorted(tab)) for (name, arity), tab
                    in zip(self.signature.relations, self.tables)]
            h = kern.encode_structure(self.size, spec)
            self._handles[kern.BACKEND] = h
        return h

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Per-relation bit masks (fold-left positional index)."""
        out = []
        for tab in self.tables:
            m = 0
            for tup in tab:
                idx = 0
                for a in tup:
                    idx = idx * self.size + a
                m |= 1 << idx
            out.append(m)
        return tuple(out)

    def apply_permutation(self, perm: Sequence[int]) -> "Structure":
        tabs = tuple(frozenset(tuple(perm[v] for v in tup) for tup in tab)
                     for tab in self.tables)
        return Structure(self.signature, self.size, tabs)

    @cached_property
    def canonical_key(self) -> tuple:
        """Lexicographically minimal mask tuple over all relabelings.
        Exact isomorphism-class key for size <= 8 (and beyond, just slower)."""
        best = None
        for perm in itertools.permutations(range(self.size)):
            masks = self.apply_permutation(perm).masks
            if best is None or masks < best:
                best = masks
        return (self.size, best)

    def canonical_form(self) -> "Structure":
        size, masks = self.canonical_key
        tabs = tuple(
            frozenset(_unrank_cells(m, size, arity))
            for m, (_n, arity) in zip(masks, self.signature.relations))
        return Structure(self.signature, size, tabs)


def _unrank_cells(mask: int, size: int, arity: int):
    for flat in range(size ** arity):
        if (mask >> flat) & 1:
            coords = []
            x = flat
            for _ in range(arity):
                coords.append(x % size)
                x //= size
            yield tuple(reversed(coords))


# ---------------------------------------------------------------------------
# Compiling sentences to kernel programs
# ---------------------------------------------------------------------------

_PROGRAM_CACHE: dict = {}


def compile_sentence(sentence: Sentence, signature: Signature,
                     free_order: tuple[str, ...] = ()) -> Program:
    key = (id(sentence), signature, free_order)
    prog = _PROGRAM_CACHE.get(key)
    if prog is not None:
        return prog
    missing = sentence.free - set(free_order)
    if missing:
        raise MalformedSentenceError(
            f"unbound variables: {sorted(missing)}")
    prog = Program()
    rel_index = signature.index
    arities = dict(signature.relations)
    node_memo: dict = {}
    max_slot = len(free_order) - 1

    def rec(node: Sentence, binding: dict[str, int], next_slot: int) -> int:
        nonlocal max_slot
        fkey = tuple(sorted((v, binding[v]) for v in node.free))
        memo_key = (id(node), fkey)
        hit = node_memo.get(memo_key)
        if hit is not None:
            return hit
        if isinstance(node, Atom):
            if node.rel not in rel_index:
                raise MalformedSentenceError(f"unknown relation {node.rel!r}")
            if len(node.args) != arities[node.rel]:
                raise MalformedSentenceError(
                    f"relation {node.rel} expects {arities[node.rel]} "
                    f"arguments, got {len(node.args)}")
            slots = tuple(binding[v] for v in node.args)
            idx = prog.add_node(OP_ATOM, rel_index[node.rel], kids=slots,
                                used=tuple(sorted(set(slots))))
        elif isinstance(node, Eq):
            a, b = binding[node.left], binding[node.right]
            idx = prog.add_node(OP_EQ, a, b, used=tuple(sorted({a, b})))
        elif isinstance(node, Not):
            c = rec(node.child, binding, next_slot)
            idx = prog.add_node(OP_NOT, c, used=prog.used_slots(c))
        elif isinstance(node, (And, Or)):
            kids = tuple(rec(c, binding, next_slot) for c in node.children)
            used = sorted(set().union(*(prog.used_slots(k) for k in kids)) if kids else ())
            idx = prog.add_node(OP_AND if isinstance(node, And) else OP_OR,
                                kids=kids, used=tuple(used))
        elif isinstance(node, (Exists, Forall)):
            slot = next_slot
            max_slot = max(max_slot, slot)
            inner = dict(binding)
            inner[node.var] = slot
            c = rec(node.child, inner, next_slot + 1)
            used = tuple(s for s in prog.used_slots(c) if s != slot)
            idx = prog.add_node(OP_EXISTS if isinstance(node, Exists) else OP_FORALL,
                                c, slot, used=used)
        else:
            raise MalformedSentenceError(f"not a formula node: {node!r}")
        node_memo[memo_key] = idx
        return idx

    base = {v: i for i, v in enumerate(free_order)}
    prog.root = rec(sentence, base, len(free_order))
    prog.nslots = max_slot + 1
    _PROGRAM_CACHE[key] = prog
    return prog


def eval(M: Structure, sentence: Sentence,
         assignment: Optional[Mapping[str, int]] = None) -> bool:
    """Tarskian truth of ``sentence`` in ``M`` under ``assignment``.

    Free variables must all be assigned values in range.  Empty conjunction
    is true, empty disjunction false.
    """
    assignment = assignment or {}
    free_order = tuple(sorted(sentence.free))
    for v in free_order:
        if v not in assignment:
            raise MalformedSentenceError(f"no assignment for free variable {v!r}")
        if not (0 <= assignment[v] < M.size):
            raise MalformedSentenceError(
                f"assignment {v}={assignment[v]} out of range")
    prog = compile_sentence(sentence, M.signature, free_order)
    env0 = tuple(assignment[v] for v in free_order)
    kern = _kernel.active
    handle = M.kernel_handle(kern)
    if not kern.supports(prog, handle):
        kern = _kernel.pure
        handle = M.kernel_handle(kern)
    return kern.eval_program(prog, handle, env0)


# ---------------------------------------------------------------------------
# Theories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Theory:
    """Ordered sentence list with provenance labels; order is significant
    and duplicates are permitted."""

    sentences: tuple[Sentence, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels",
                               tuple(f"input[{i}]" for i in range(len(self.sentences))))
        if len(self.labels) != len(self.sentences):
            raise ParseError("theory labels must match sentences")

    @staticmethod
    def of(sentences: Iterable[Sentence], labels: Optional[Iterable[str]] = None) -> "Theory":
        return Theory(tuple(sentences), tuple(labels) if labels else ())

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)


# ---------------------------------------------------------------------------
# Bounded model space
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class ModelSpace:
    """One representative per isomorphism class of size <= max_size.

    Satisfaction of each sentence is cached as a bitset over representative
    indices; all higher-level checks reduce to bitset algebra, so every
    sentence is evaluated over the space at most once.
    """

    signature: Signature
    max_size: int
    representatives: tuple[Structure, ...]
    _satsets: dict = field(default_factory=dict, repr=False)
    _elemsets: dict = field(default_factory=dict, repr=False)
    _keep: list = field(default_factory=list, repr=False)
    _extra: dict = field(default_factory=dict, repr=False)

    @cached_property
    def full_mask(self) -> int:
        return (1 << len(self.representatives)) - 1

    @cached_property
    def rep_index(self) -> dict[int, int]:
        return {id(r): i for i, r in enumerate(self.representatives)}

    def satset(self, sentence: Sentence) -> int:
        """Bitset of representatives satisfying a closed sentence."""
        if sentence.free:
            raise MalformedSentenceError(
                f"sentence has free variables {sorted(sentence.free)}")
        cached = self._satsets.get(id(sentence))
        if cached is not None:
            return cached
        # decompose a conjunction/disjunction only when its boolean skeleton
        # bottoms out in already-cached sentences; otherwise one memoized DAG
        # walk per representative beats re-walking shared subformulas
        if isinstance(sentence, (And, Or)) and all(
                self._decomposable(c) for c in sentence.children):
            if isinstance(sentence, And):
                m = self.full_mask
                for c in sentence.children:
                    m &= self.satset(c)
                    if not m:
                        break
            else:
                m = 0
                for c in sentence.children:
                    m |= self.satset(c)
                    if m == self.full_mask:
                        break
        elif isinstance(sentence, Not):
            m = self.full_mask & ~self.satset(sentence.child)
        else:
            m = 0
            for i, rep in enumerate(self.representatives):
                if eval(rep, sentence):
                    m |= 1 << i
        self._satsets[id(sentence)] = m
        self._keep.append(sentence)
        return m

    def _decomposable(self, s: Sentence) -> bool:
        # only True is memoized: a node can become decomposable later once
        # its satset lands in the cache, and False short-circuits fast
        memo = self._extra.setdefault("decomposable", {})
        if memo.get(id(s)):
            return True
        if id(s) in self._satsets:
            hit = True
        elif isinstance(s, Not):
            hit = self._decomposable(s.child)
        elif isinstance(s, (And, Or)):
            hit = all(self._decomposable(c) for c in s.children)
        else:
            hit = False
        if hit:
            memo[id(s)] = True
        return hit

    def theory_mask(self, T: Union[Theory, Iterable[Sentence]]) -> int:
        m = self.full_mask
        for s in T:
            m &= self.satset(s)
            if not m:
                break
        return m

    def elem_satset(self, formula: Sentence, var: str) -> tuple[int, ...]:
        """Per-representative bitsets of elements satisfying a one-free-
        variable formula."""
        if formula.free - {var}:
            raise MalformedSentenceError(
                f"extra free variables {sorted(formula.free - {var})}")
        key = (id(formula), var)
        cached = self._elemsets.get(key)
        if cached is not None:
            return cached
        out = []
        for rep in self.representatives:
            m = 0
            for e in range(rep.size):
                if eval(rep, formula, {var: e} if formula.free else None):
                    m |= 1 << e
            out.append(m)
        res = tuple(out)
        self._elemsets[key] = res
        self._keep.append(formula)
        return res

    def mask_members(self, mask: int) -> list[Structure]:
        return [r for i, r in enumerate(self.representatives) if (mask >> i) & 1]

    def first_member(self, mask: int) -> Optional[Structure]:
        if not mask:
            return None
        return self.representatives[(mask & -mask).bit_length() - 1]


def enumerate_models(signature: Signature, max_size: int,
                     class_cap: Optional[int] = 100_000,
                     labeled_cap: int = 2_000_000) -> ModelSpace:
    """One canonical representative per isomorphism class of size 1..max_size.

    Deduplication is by lexicographically minimal relation-table encoding
    over all universe permutations; representatives are the canonical
    relabelings, ordered by (size, canonical key).
    """
    if max_size < 1:
        raise EnumerationOverflowError("max_size must be >= 1")
    reps: list[Structure] = []
    for n in range(1, max_size + 1):
        cells = [n ** arity for _name, arity in signature.relations]
        total = 1
        for c in cells:
            total *= 2 ** c
            if total > labeled_cap:
                raise EnumerationOverflowError(
                    f"{total}+ labeled structures of size {n} exceeds cap "
                    f"{labeled_cap}")
        perms = list(itertools.permutations(range(n)))
        # cell index permutation per relation per universe permutation
        cellmaps = []
        for (_name, arity), ncells in zip(signature.relations, cells):
            maps = []
            for perm in perms:
                m = [0] * ncells
                for flat in range(ncells):
                    coords = []
                    x = flat
                    for _ in range(arity):
                        coords.append(x % n)
                        x //= n
                    coords.reverse()
                    tgt = 0
                    for c in coords:
                        tgt = tgt * n + perm[c]
                    m[flat] = tgt
                maps.append(m)
            cellmaps.append(maps)

        seen: set[tuple[int, ...]] = set()
        canon_keys: list[tuple[int, ...]] = []
        for combo in itertools.product(*(range(2 ** c) for c in cells)):
            best = None
            for p in range(len(perms)):
                cand = []
                for r, mask in enumerate(combo):
                    pm = 0
                    cmap = cellmaps[r][p]
                    mm = mask
                    while mm:
                        low = mm & -mm
                        pm |= 1 << cmap[low.bit_length() - 1]
                        mm ^= low
                    cand.append(pm)
                cand = tuple(cand)
                if best is None or cand < best:
                    best = cand
            if best not in seen:
                seen.add(best)
                canon_keys.append(best)
                if class_cap is not None and len(seen) + len(reps) > class_cap:
                    raise EnumerationOverflowError(
                        f"more than {class_cap} isomorphism classes")
        for key in sorted(canon_keys):
            tabs = tuple(frozenset(_unrank_cells(mask, n, arity))
                         for mask, (_name, arity)
                         in zip(key, signature.relations))
            reps.append(Structure(signature, n, tabs))
    return ModelSpace(signature, max_size, tuple(reps))


def models_of(T: Union[Theory, Iterable[Sentence]], space: ModelSpace) -> list[Structure]:
    """Representatives satisfying every sentence of T."""
    return space.mask_members(space.theory_mask(T))


def entails(T: Union[Theory, Iterable[Sentence]], sentence: Sentence,
            space: ModelSpace) -> tuple[bool, Optional[Structure]]:
    """Bounded entailment: true iff every model of T in the space satisfies
    the sentence; otherwise returns a witness counter-model.  Sound only
    relative to the space's max_size."""
    bad = space.theory_mask(T) & ~space.satset(sentence)
    if bad:
        return False, space.first_member(bad)
    return True, None


def preprocess(T: Theory, space: ModelSpace) -> Theory:
    """Drop sentences valid over the space; an inconsistent theory becomes
    the canonical contradiction."""
    if space.theory_mask(T) == 0:
        return Theory.of([CONTRADICTION], ["contradiction"])
    keep = [(s, lab) for s, lab in zip(T.sentences, T.labels)
            if space.satset(s) != space.full_mask]
    return Theory.of([s for s, _ in keep], [lab for _, lab in keep])


# ---------------------------------------------------------------------------
# JSON formats
# ---------------------------------------------------------------------------

def structure_to_json(M: Structure) -> dict:
    return {
        "signature": [{"name": n, "arity": a} for n, a in M.signature.relations],
        "size": M.size,
        "relations": {n: sorted([list(t) for t in tab])
                      for (n, _a), tab in zip(M.signature.relations, M.tables)},
    }


def structure_from_json(data: dict) -> Structure:
    try:
        sig = Signature(tuple((r["name"], int(r["arity"]))
                              for r in data["signature"]))
        size = int(data["size"])
        tables = {name: [tuple(int(v) for v in row) for row in rows]
                  for name, rows in data.get("relations", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad structure JSON: {exc}") from None
    return Structure.make(sig, size, tables)


def load_structure(path: str) -> Structure:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON in {path}: {exc}") from None
    return structure_from_json(data)


def theory_to_json(T: Theory) -> list[str]:
    return [to_sexpr(s) for s in T.sentences]


def theory_from_json(data) -> Theory:
    if not isinstance(data, list) or any(not isinstance(x, str) for x in data):
        raise ParseError("theory file must be a JSON array of sentence strings")
    return Theory.of([parse_sentence(s) for s in data])


def load_theory(path: str) -> Theory:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON in {path}: {exc}") from None
    return theory_from_json(data)


def infer_signature(sentences: Iterable[Sentence]) -> Signature:
    """Signature from the atoms of the sentences, names in first-appearance
    order.  Inconsistent arities raise ParseError."""
    rels: dict[str, int] = {}

    def walk(node):
        stack = [node]
        while stack:
            x = stack.pop()
            if isinstance(x, Atom):
                if x.rel in rels and rels[x.rel] != len(x.args):
                    raise ParseError(
                        f"relation {x.rel} used with arities "
                        f"{rels[x.rel]} and {len(x.args)}")
                rels.setdefault(x.rel, len(x.args))
            elif isinstance(x, Not):
                stack.append(x.child)
            elif isinstance(x, (And, Or)):
                stack.extend(reversed(x.children))
            elif isinstance(x, (Exists, Forall)):
                stack.append(x.child)
    for s in sentences:
        walk(s)
    return Signature(tuple(rels.items()))
