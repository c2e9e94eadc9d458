"""Permutation arithmetic and the stabilizer-chain group machinery."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from designforge import InvalidPermutationError, PermGroup, Permutation
from designforge.perm import minimal_block_size

from . import oracles


def cycle(n: int, *points: int) -> Permutation:
    """Permutation of degree n cycling the listed points in order."""
    images = list(range(n))
    for a, b in zip(points, points[1:] + points[:1]):
        images[a] = b
    return Permutation(images)


@st.composite
def permutations(draw, max_degree: int = 12) -> Permutation:
    n = draw(st.integers(min_value=1, max_value=max_degree))
    images = list(range(n))
    rng = random.Random(draw(st.integers(min_value=0, max_value=2**32)))
    rng.shuffle(images)
    return Permutation(images)


class TestPermutation:
    def test_composition_is_left_to_right(self):
        p = cycle(4, 0, 1)
        q = cycle(4, 1, 2)
        assert (p * q)(0) == q(p(0)) == 2

    def test_identity_is_neutral(self):
        p = cycle(5, 0, 3, 1)
        e = Permutation.identity(5)
        assert p * e == e * p == p
        assert e.is_identity()

    @pytest.mark.parametrize(
        "images",
        [[0, 0, 1], [0, 3, 1], [-1, 1, 0], [0.5, 1, 2], ["1", 0, 2]],
    )
    def test_rejects_non_bijections(self, images):
        with pytest.raises(InvalidPermutationError):
            Permutation(images)

    def test_degree_mismatch_in_product(self):
        with pytest.raises(InvalidPermutationError):
            cycle(3, 0, 1) * cycle(4, 0, 1)

    @given(permutations())
    def test_inverse_law(self, p):
        assert (p * p.inverse()).is_identity()
        assert (p.inverse() * p).is_identity()

    @given(permutations(), st.integers(min_value=-6, max_value=6))
    def test_power_matches_repeated_product(self, p, n):
        expected = Permutation.identity(p.degree)
        step = p if n >= 0 else p.inverse()
        for _ in range(abs(n)):
            expected = expected * step
        assert p**n == expected

    @given(permutations())
    def test_order_annihilates(self, p):
        assert (p ** p.order()).is_identity()
        if p.order() > 1:
            assert not (p ** (p.order() - 1)).is_identity() or p.order() == 1

    def test_cycles_lead_with_smallest_point(self):
        p = Permutation([1, 0, 3, 4, 2, 5])
        assert p.cycles() == [(0, 1), (2, 3, 4)]
        assert p.cycles(include_fixed=True) == [(0, 1), (2, 3, 4), (5,)]
        assert p.fixed_points() == (5,)

    def test_act_on_set(self):
        p = cycle(6, 0, 1, 2)
        assert p.act_on_set({0, 2, 5}) == frozenset({1, 0, 5})

    @given(permutations())
    def test_cycle_reconstruction(self, p):
        images = list(range(p.degree))
        for cyc in p.cycles():
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a] = b
        assert Permutation(images) == p


def symmetric(n: int) -> PermGroup:
    return PermGroup([cycle(n, *range(n)), cycle(n, 0, 1)])


class TestPermGroup:
    @pytest.mark.parametrize(
        "gens, degree, order",
        [
            ([cycle(4, 0, 1, 2, 3), cycle(4, 0, 1)], 4, 24),
            ([cycle(4, 0, 1, 2), cycle(4, 1, 2, 3)], 4, 12),
            ([cycle(6, *range(6))], 6, 6),
            ([cycle(6, *range(6)), Permutation([0, 5, 4, 3, 2, 1])], 6, 12),
            ([cycle(4, 0, 1), cycle(4, 2, 3)], 4, 4),
        ],
    )
    def test_order(self, gens, degree, order):
        assert PermGroup(gens, degree).order() == order

    def test_trivial_group_needs_degree(self):
        assert PermGroup([], degree=5).order() == 1
        with pytest.raises(InvalidPermutationError):
            PermGroup([])

    def test_membership(self):
        a4 = PermGroup([cycle(4, 0, 1, 2), cycle(4, 1, 2, 3)])
        assert cycle(4, 0, 2, 1) in a4
        assert cycle(4, 0, 1) not in a4
        assert cycle(3, 0, 1, 2) not in a4

    def test_is_subgroup(self):
        s4 = symmetric(4)
        a4 = PermGroup([cycle(4, 0, 1, 2), cycle(4, 1, 2, 3)])
        assert a4.is_subgroup(s4)
        assert not s4.is_subgroup(a4)

    def test_point_orbits_and_transitivity(self):
        g = PermGroup([cycle(5, 0, 1), cycle(5, 2, 3, 4)])
        assert g.orbits() == [(0, 1), (2, 3, 4)]
        assert not g.is_transitive()
        assert symmetric(5).is_transitive()

    def test_point_stabilizer(self):
        s4 = symmetric(4)
        stab = s4.point_stabilizer(2)
        assert stab.order() == 6
        assert all(g(2) == 2 for g in stab.generators)
        assert stab.is_subgroup(s4)

    def test_transversal(self):
        s4 = symmetric(4)
        g = s4.transversal_to(1, 3)
        assert g is not None and g(1) == 3
        split = PermGroup([cycle(4, 0, 1), cycle(4, 2, 3)])
        assert split.transversal_to(0, 2) is None

    @pytest.mark.parametrize(
        "gens, degree, expected",
        [
            ([cycle(5, *range(5)), cycle(5, 0, 1)], 5, 5),
            ([cycle(4, 0, 1, 2), cycle(4, 1, 2, 3)], 4, 2),
            ([cycle(6, *range(6))], 6, 1),
            ([cycle(4, 0, 1), cycle(4, 2, 3)], 4, 0),
        ],
    )
    def test_transitivity_degree(self, gens, degree, expected):
        result = PermGroup(gens, degree).transitivity_degree(cap=6)
        assert result.value == expected
        assert not result.capped

    def test_transitivity_cap(self):
        result = symmetric(7).transitivity_degree(cap=3)
        assert result == (3, True)

    @pytest.mark.parametrize(
        "gens, degree, expected",
        [
            ([cycle(4, 0, 1, 2, 3), cycle(4, 0, 1)], 4, True),
            ([cycle(4, 0, 1, 2), cycle(4, 1, 2, 3)], 4, True),
            ([cycle(4, 0, 1, 2, 3)], 4, False),
            ([cycle(4, 0, 1), cycle(4, 2, 3)], 4, False),
            ([cycle(6, *range(6)), Permutation([0, 5, 4, 3, 2, 1])], 6, False),
            ([cycle(5, *range(5))], 5, True),
        ],
    )
    def test_is_primitive(self, gens, degree, expected):
        group = PermGroup(gens, degree)
        assert group.is_primitive() is expected
        elements = oracles.closure([g.images for g in group.generators])
        assert oracles.is_primitive(elements, degree) is expected

    def test_minimal_block_size_on_induced_images(self):
        images = [cycle(6, *range(6)).images]
        assert minimal_block_size(images, 6, 0, 3) == 2
        assert minimal_block_size(images, 6, 0, 1) == 6

    def test_random_element_is_member_and_deterministic(self):
        s4 = symmetric(4)
        rng = random.Random(11)
        sample = [s4.random_element(rng) for _ in range(20)]
        assert all(g in s4 for g in sample)
        rng2 = random.Random(11)
        assert sample == [s4.random_element(rng2) for _ in range(20)]

    def test_elements_enumerates_exactly_once(self):
        a4 = PermGroup([cycle(4, 0, 1, 2), cycle(4, 1, 2, 3)])
        elements = list(a4.elements())
        assert len(elements) == len(set(elements)) == 12
        with pytest.raises(Exception, match="cap exceeded"):
            list(symmetric(8).elements(limit=100))

    def test_conjugate_preserves_order(self):
        a4 = PermGroup([cycle(4, 0, 1, 2), cycle(4, 1, 2, 3)])
        twisted = a4.conjugate(cycle(4, 0, 3))
        assert twisted.order() == 12
        assert twisted.is_subgroup(symmetric(4))

    @settings(max_examples=30)
    @given(st.integers(min_value=0, max_value=2**32))
    def test_order_matches_closure_on_random_pairs(self, seed):
        rng = random.Random(seed)
        n = rng.randrange(4, 8)
        gens = []
        for _ in range(2):
            images = list(range(n))
            rng.shuffle(images)
            gens.append(Permutation(images))
        group = PermGroup(gens, n)
        elements = oracles.closure([g.images for g in gens])
        assert group.order() == len(elements)
