import itertools
import random

import pytest

from indepax import model, scott, verify
from indepax.errors import (MaterializationRefusedError, PreconditionError,
                            SignatureMismatchError)
from indepax.model import Signature, Structure, parse_sentence


def cycle(sig, n):
    return Structure.make(sig, n, {"R": [(i, (i + 1) % n) for i in range(n)]})


@pytest.fixture(scope="module")
def sig():
    return Signature((("R", 2),))


class TestJointPartition:
    def test_empty_signature_stabilizes_immediately(self):
        M = Structure.make(Signature(()), 3, {})
        part = scott.joint_type_partition([M])
        assert part.stabilization_level == 0
        # tuples grouped by equality pattern only
        assert part.class_at(0, 0, (0, 1)) == part.class_at(0, 0, (1, 2))
        assert part.class_at(0, 0, (0, 0)) != part.class_at(0, 0, (0, 1))

    def test_cycles_split_at_level_two(self, sig):
        part = scott.joint_type_partition([cycle(sig, 3), cycle(sig, 4)])
        assert part.class_at(0, 0, ()) == part.class_at(0, 1, ())
        assert part.class_at(1, 0, ()) == part.class_at(1, 1, ())
        assert part.class_at(2, 0, ()) != part.class_at(2, 1, ())

    def test_same_structure_twice_is_reflexive(self, sig):
        M = cycle(sig, 3)
        part = scott.joint_type_partition([M, M])
        for level in range(part.stabilization_level + 1):
            for length in range(part.n_max + 1):
                for tup in itertools.product(range(3), repeat=length):
                    assert part.class_at(level, 0, tup) == part.class_at(level, 1, tup)

    def test_signature_mismatch(self, sig):
        M = cycle(sig, 3)
        N = Structure.make(Signature((("S", 2),)), 2, {})
        with pytest.raises(SignatureMismatchError):
            scott.joint_type_partition([M, N])

    def test_refinement_and_stabilization_properties(self, sig):
        rng = random.Random(0)
        for _ in range(15):
            sizes = [rng.randint(1, 4) for _ in range(2)]
            structs = [
                Structure.make(sig, n, {"R": [t for t in
                                              itertools.product(range(n), repeat=2)
                                              if rng.random() < 0.4]})
                for n in sizes]
            part = scott.joint_type_partition(structs)
            # each level refines its predecessor
            for lv in range(1, part.stabilization_level + 1):
                groups = {}
                for idx in range(len(part.items)):
                    groups.setdefault(part.levels[lv][idx], set()).add(
                        part.levels[lv - 1][idx])
                assert all(len(g) == 1 for g in groups.values())
            assert part.stabilization_level <= len(part.items)


class TestTypesEqual:
    def test_reflexive(self, sig):
        M = cycle(sig, 3)
        for alpha in range(4):
            assert scott.types_equal(M, (0, 1), M, (0, 1), alpha)

    def test_cycle_pair_levels(self, sig):
        c3, c4 = cycle(sig, 3), cycle(sig, 4)
        assert scott.types_equal(c3, (), c4, (), 1)
        assert not scott.types_equal(c3, (), c4, (), 2)

    def test_two_element_order_endpoints(self, sig):
        lin = Structure.make(sig, 2, {"R": [(0, 1)]})
        assert scott.types_equal(lin, (0,), lin, (1,), 0)
        assert not scott.types_equal(lin, (0,), lin, (1,), 1)

    def test_length_mismatch(self, sig):
        M = cycle(sig, 3)
        with pytest.raises(PreconditionError):
            scott.types_equal(M, (0,), M, (0, 1), 2)

    def test_monotone_in_level(self, sig):
        rng = random.Random(5)
        for _ in range(10):
            n = rng.randint(1, 4)
            M = Structure.make(sig, n, {"R": [t for t in
                                              itertools.product(range(n), repeat=2)
                                              if rng.random() < 0.5]})
            part = scott.joint_type_partition([M, M])
            for length in range(3):
                for a in itertools.product(range(n), repeat=length):
                    for b in itertools.product(range(n), repeat=length):
                        for alpha in range(part.stabilization_level + 1):
                            if scott.types_equal(M, a, M, b, alpha + 1):
                                assert scott.types_equal(M, a, M, b, alpha)


class TestScottHeight:
    def test_empty_signature(self):
        for n in (1, 2, 4):
            M = Structure.make(Signature(()), n, {})
            assert scott.scott_height(M) == 0

    def test_unary_singleton_pattern(self):
        M = Structure.make(Signature((("P", 1),)), 2, {"P": [(0,)]})
        assert scott.scott_height(M) == 0

    def test_two_element_order(self, sig):
        # frozen from the naive-recursion oracle before the build
        assert scott.scott_height(Structure.make(sig, 2, {"R": [(0, 1)]})) == 1

    def test_zero_height_when_level0_stable(self, sig):
        M = cycle(sig, 3)
        part = scott.joint_type_partition([M])
        if part.stabilization_level == 0:
            assert scott.scott_height(M) == 0


class TestScottSentence:
    def test_singleton_with_p(self):
        usig = Signature((("P", 1),))
        M = Structure.make(usig, 1, {"P": [(0,)]})
        s = scott.scott_sentence(M)
        space = model.enumerate_models(usig, 3)
        sat = [r for r in space.representatives if model.eval(r, s)]
        assert len(sat) == 1 and sat[0].size == 1 and len(sat[0].table("P")) == 1

    def test_relabeled_copy_satisfies(self, sig):
        M = Structure.make(sig, 3, {"R": [(0, 1), (2, 1)]})
        Mp = M.apply_permutation((2, 0, 1))
        assert model.eval(Mp, scott.scott_sentence(M))

    def test_c4_fails_c3_sentence(self, sig):
        assert not model.eval(cycle(sig, 4), scott.scott_sentence(cycle(sig, 3)))

    def test_materialization_cap(self, sig):
        M = Structure.make(sig, 5, {"R": [(0, 1)]})
        with pytest.raises(MaterializationRefusedError):
            scott.scott_sentence(M)
        scott.scott_sentence(M, cap=5)  # raising the cap works

    def test_every_labeled_structure_satisfies_its_class_sentence(self, sig):
        # exhaustive over all 18 labeled structures of size <= 2: each one
        # satisfies exactly the Scott sentence of its isomorphism class
        space = model.enumerate_models(sig, 2)
        sentences = [scott.scott_sentence(r) for r in space.representatives]
        for n in (1, 2):
            for cells in itertools.product([0, 1], repeat=n * n):
                table = [t for t, bit in
                         zip(itertools.product(range(n), repeat=2), cells)
                         if bit]
                M = Structure.make(sig, n, {"R": table})
                hits = [i for i, s in enumerate(sentences) if model.eval(M, s)]
                assert len(hits) == 1
                assert verify.oracle_isomorphic(
                    M, space.representatives[hits[0]])[0]


class TestCanonicalInvariant:
    def test_permuted_copy_equal(self, sig):
        M = Structure.make(sig, 4, {"R": [(0, 1), (1, 2), (3, 3)]})
        Mp = M.apply_permutation((3, 1, 0, 2))
        assert scott.canonical_invariant(M) == scott.canonical_invariant(Mp)

    def test_different_sizes_differ(self, sig):
        M = Structure.make(sig, 2, {})
        N = Structure.make(sig, 3, {})
        assert scott.canonical_invariant(M) != scott.canonical_invariant(N)

    def test_matches_permutation_oracle_on_random_pairs(self, sig):
        rng = random.Random(9)
        for _ in range(40):
            n = rng.randint(1, 5)
            def rand():
                return Structure.make(sig, n, {"R": [
                    t for t in itertools.product(range(n), repeat=2)
                    if rng.random() < 0.4]})
            M = rand()
            if rng.random() < 0.5:
                perm = list(range(n))
                rng.shuffle(perm)
                N = M.apply_permutation(perm)
            else:
                N = rand()
            assert (scott.canonical_invariant(M) == scott.canonical_invariant(N)) \
                == verify.oracle_isomorphic(M, N)[0]


class TestAlphaTypes:
    def test_unsatisfiable_sentence_empty(self, binary_space):
        psi, phi = scott.alpha_types_of(model.CONTRADICTION, 2, binary_space)
        assert psi == set() and phi == set()

    def test_empty_signature_sizes(self):
        space = model.enumerate_models(Signature(()), 2)
        psi, phi = scott.alpha_types_of(model.TAUTOLOGY, 2, space)
        assert len(phi) == 2       # one model type per size at stabilization
        psi0, phi0 = scott.alpha_types_of(model.TAUTOLOGY, 0, space)
        assert len(phi0) == 1      # empty tuples are atomically alike

    def test_phi_subset_psi(self, binary_space):
        s = parse_sentence("(exists x (atom R x x))")
        for alpha in range(3):
            psi, phi = scott.alpha_types_of(s, alpha, binary_space)
            assert phi <= psi

    def test_stabilized_model_types_count_models(self, binary_space):
        # at stabilization, empty-tuple classes separate exactly the
        # isomorphism classes, so the model-type count equals the number of
        # satisfying representatives
        import random
        from indepax import generators
        part = scott.space_partition(binary_space)
        rng = random.Random(12)
        checked = 0
        while checked < 10:
            s = generators.random_formula(rng, 3)
            if "atom P" in model.to_sexpr(s):
                continue
            count = bin(binary_space.satset(s)).count("1")
            _psi, phi = scott.alpha_types_of(s, part.stabilization_level,
                                             binary_space)
            assert len(phi) == count
            checked += 1
