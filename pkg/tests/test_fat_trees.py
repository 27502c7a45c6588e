#
# Copyright © 2025 Agora
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0, with certain conditions.
# Refer to the "LICENSE" file in the root directory for more information.
#

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tree_forcing import (
    DENSE,
    BlockTree,
    BudgetExceededError,
    ClopenSet,
    EmptyInputError,
    FatnessMissingError,
    FiniteTree,
    MalformedInputError,
    PreconditionError,
    branches_subset,
    fat_extend,
    fatclaim_step,
    g0_tree_inside,
    is_fat,
    ladder,
    ladder_leq,
    stem_of,
)
from tree_forcing.cantor_core import clopen_from_cylinders, words_of_length
from tree_forcing.fat_trees import (
    bounded_compatible,
    direct_fatness_witness,
    shift_witness,
    slalom_cover,
    thin_antichain,
)


# ============================================================================
# Fatness
# ============================================================================


def test_full_tree_is_fat(full_tree, logger):
    report = is_fat(full_tree, 3, 16, logger=logger)
    assert report.fat
    assert report.nodes[:3] == ["", "0", "1"]
    assert not report.missing()
    assert len(report.entries) == 1 + 2 * 2 + 4 * 4 + 8 * 8


def test_fatness_needs_a_deep_enough_search(full_tree):
    report = is_fat(full_tree, 3, 13)
    assert not report.fat
    assert all(e.exhausted_depth == 13 for e in report.missing())
    # only s_14 = 1110… starts with 111
    assert len(report.missing()) == 8
    assert all(e.t == format(int(e.s, 2) ^ 0b111, "03b") for e in report.missing())


def test_non_fat_tree(non_fat_tree):
    report = is_fat(non_fat_tree, 3, 16)
    assert not report.fat
    assert report.missing()


def test_fatness_is_for_silver_trees():
    with pytest.raises(MalformedInputError):
        is_fat(BlockTree(blocks=[("00", "11")]))
    with pytest.raises(PreconditionError):
        is_fat(BlockTree.full(), 3, 2)


def test_direct_fatness_witness(full_tree):
    witness = direct_fatness_witness(full_tree, "", "")
    assert witness.certificate.edge
    assert witness.certificate.coordinate == 0
    witness = direct_fatness_witness(full_tree, "1", "1")
    assert witness is not None and witness.certificate.kind == "g0"
    with pytest.raises(PreconditionError):
        direct_fatness_witness(full_tree, "1", "")


@given(
    st.text(alphabet="01", min_size=13, max_size=13),
    st.sets(st.integers(min_value=0, max_value=12), max_size=4),
    st.integers(min_value=0, max_value=3),
)
@settings(max_examples=300, deadline=None)
def test_is_fat_agrees_with_the_branch_search(bits, stars, first):
    pattern = "".join(
        "*" if i in stars | {first} else b for i, b in enumerate(bits)
    )
    p = BlockTree.silver_from_pattern(pattern)
    report = is_fat(p, p.level_height(0), 12)
    assert report.entries
    for entry in report.entries:
        found = direct_fatness_witness(p, entry.s, entry.t, 12)
        assert (entry.coordinate is not None) == (found is not None), pattern


# ============================================================================
# Clopen claim
# ============================================================================


def test_fatclaim_step():
    claim = fatclaim_step(ClopenSet(depth=1, words=["1"]), "1", "0")
    assert claim.u == "1"
    assert claim.n == 2
    assert claim.a_t == ClopenSet(depth=3, words=["100", "101"])
    assert claim.probe.positive()
    assert not claim.probe.in_ideal()


def test_fatclaim_step_on_a_long_node():
    """A five-bit node forces n = 62 and stays inside a shallow set."""
    claim = fatclaim_step(ClopenSet.cylinder("1"), "11111", "00000")
    v = "11111" + "0" * 57
    assert claim.n == 62
    assert claim.a_t == ClopenSet(depth=63, words=[v + "0", v + "1"])
    assert claim.probe.contained_in(ClopenSet.cylinder("1"))


def test_fatclaim_step_preconditions():
    A = ClopenSet.cylinder("1")
    with pytest.raises(PreconditionError):
        fatclaim_step(A, "0", "1")
    with pytest.raises(PreconditionError):
        fatclaim_step(A, "1", "01")
    with pytest.raises(EmptyInputError):
        fatclaim_step(ClopenSet.empty(1), "1", "0")


nonempty_clopen_sets = st.integers(min_value=1, max_value=6).flatmap(
    lambda d: st.lists(
        st.text(alphabet="01", min_size=d, max_size=d), min_size=1, max_size=8
    ).map(lambda ws: ClopenSet(depth=d, words=ws))
)


@given(nonempty_clopen_sets)
@settings(max_examples=200, deadline=None)
def test_fatclaim_step_on_random_sets(A):
    stem = stem_of(A)
    for m in range(len(stem), 5):
        s = next(w for w in words_of_length(m) if w.startswith(stem) and A.meets(w))
        for t in words_of_length(m):
            claim = fatclaim_step(A, s, t)
            assert not claim.a_t.is_empty()
            assert claim.a_t.is_subset(A)
            n = claim.n
            for w in claim.a_t.words:
                assert A.contains(w[:n] + ("1" if w[n] == "0" else "0"))
            assert stem_of(claim.a_t.shift(t)).startswith(DENSE(n))
            assert claim.probe.positive()


# ============================================================================
# Fat extensions
# ============================================================================


def test_fat_extend_doubles_the_leaves(logger):
    A = ClopenSet.full(0)
    p1 = fat_extend(FiniteTree(), A, logger=logger)
    assert len(p1.leaves) == 2
    p2 = fat_extend(p1, A)
    assert len(p2.leaves) == 8
    assert p2.pattern() == "***"
    assert shift_witness(p2, "1") == 1


def test_fat_extend_stays_inside_the_set():
    A = ClopenSet.cylinder("1")
    p = fat_extend(FiniteTree.from_pattern("1"), A)
    assert all(A.contains(leaf) for leaf in p.leaves)
    assert len(p.leaves) == 4


def test_fat_extend_preconditions():
    with pytest.raises(PreconditionError):
        fat_extend(FiniteTree.from_words(["00", "1"]), ClopenSet.full(0))
    with pytest.raises(PreconditionError):
        fat_extend(FiniteTree.from_pattern("0"), ClopenSet.cylinder("1"))
    with pytest.raises(BudgetExceededError):
        fat_extend(FiniteTree.from_pattern("**"), ClopenSet.full(0), budget=3)


def test_fat_extend_runs_claim_steps():
    """Each pass appends the split of the claim step on the leftmost cone."""
    claim = fatclaim_step(ClopenSet.cylinder("1"), "1", "0")
    p = fat_extend(FiniteTree.from_pattern("1"), ClopenSet.cylinder("1"))
    assert p.pattern() == "10**"
    assert p.is_splitting(claim.a_t.words[0][: claim.n])
    assert all(w in p for w in claim.a_t.words)


def test_g0_tree_inside_a_cylinder(logger):
    A = ClopenSet.cylinder("1")
    tree = g0_tree_inside(A, logger=logger)
    assert tree.stem == "10"
    splits = [2, 3, 5, *range(24, 32), 33, 35, 37, 39, 41, 43, 45]
    assert tree.split_coordinates(45) == splits
    assert branches_subset(tree, A, bound=46)
    assert is_fat(tree, 4, 45).fat


def test_g0_tree_inside_a_deep_cylinder():
    tree = g0_tree_inside(ClopenSet(depth=2, words=["01"]), 1)
    assert tree.stem == "0100"
    assert tree.split_coordinates(23) == [4, 7, 13, 23]
    assert tree == BlockTree.silver_from_pattern("0100*00*" + "0" * 5 + "*" + "0" * 9 + "*")


def test_g0_tree_inside_the_whole_space():
    assert g0_tree_inside(ClopenSet.full(0)) == BlockTree.full()


def test_g0_tree_inside_needs_budget():
    with pytest.raises(BudgetExceededError):
        g0_tree_inside(ClopenSet.cylinder("1"), 2, budget=10)
    with pytest.raises(BudgetExceededError):
        g0_tree_inside(ClopenSet.cylinder("1"), 3)
    with pytest.raises(PreconditionError):
        g0_tree_inside(ClopenSet.cylinder("1"), 0)
    with pytest.raises(EmptyInputError):
        g0_tree_inside(ClopenSet.empty(2))


@given(
    st.sampled_from("01"),
    st.lists(st.text(alphabet="01", min_size=1, max_size=6), max_size=7),
)
@settings(max_examples=60, deadline=None)
def test_g0_tree_inside_sets_holding_a_half(half, extra):
    """Such sets start from a node of length at most one, where two passes fit the budget."""
    A = clopen_from_cylinders([half, *extra])
    tree = g0_tree_inside(A, 2)
    assert tree.is_silver()
    assert branches_subset(tree, A, bound=20)
    assert is_fat(tree, 2, 64).fat


# ============================================================================
# Ladders
# ============================================================================


def test_ladder_of_the_full_tree(full_tree):
    result = ladder(full_tree, 3)
    assert result.sizes == [1, 2, 8, 2048]
    assert result.heights == [0, 1, 3, 15]
    assert result.splits[2] == [0, 1, 2]
    assert result.growth_law_holds()
    assert result.tree(2).leaves == [format(i, "03b") for i in range(8)]


def test_ladder_is_increasing(full_tree):
    result = ladder(full_tree, 2)
    for k in range(2):
        upper = result.tree(k + 1)
        assert all(leaf in upper for leaf in result.levels[k])


def test_ladder_missing_witness(non_fat_tree):
    with pytest.raises(FatnessMissingError) as e:
        ladder(non_fat_tree, 1)
    assert (e.value.s, e.value.t) == ("1", "0")


def test_ladder_budget(full_tree):
    with pytest.raises(BudgetExceededError) as e:
        ladder(full_tree, 3, budget=10)
    assert e.value.metadata["level"] == 3
    assert e.value.metadata["sizes"] == [1, 2, 8]


def test_ladder_budget_bounds_the_leaves(full_tree):
    with pytest.raises(BudgetExceededError) as e:
        ladder(full_tree, 3, budget=5)
    assert e.value.metadata["level"] == 2
    assert e.value.metadata["height"] == 1


@pytest.mark.parametrize("c", range(15, 25))
def test_ladder_ignores_a_coordinate_fixed_past_the_third_level(c, full_tree):
    p = BlockTree.silver_from_partial({c: "1"}, c + 1)
    result = ladder(p, 3)
    assert result.sizes == [1, 2, 8, 2048]
    assert result.growth_law_holds()
    assert result.levels == ladder(full_tree, 3).levels
    for k in range(3):
        assert result.sizes[k + 1] == result.sizes[k] * 2 ** (2 ** result.heights[k])


def test_ladder_of_a_constructed_tree_stops_at_the_budget():
    """A deep second level is refused before any leaf is enumerated."""
    tree = g0_tree_inside(ClopenSet.cylinder("1"), 1)
    assert tree == BlockTree(stem="10")
    first = ladder(tree, 1)
    assert first.heights == [2, 7]
    assert first.sizes == [1, 16]
    assert first.splits[1] == [2, 3, 4, 6]
    assert first.growth_law_holds()
    with pytest.raises(BudgetExceededError) as e:
        ladder(tree, 2)
    assert e.value.metadata["level"] == 2
    assert e.value.metadata["sizes"] == first.sizes


def test_ladder_leq(full_tree):
    assert ladder_leq(full_tree, full_tree, 2)
    assert not ladder_leq(BlockTree(stem="1"), full_tree, 1)
    assert not ladder_leq(full_tree, BlockTree(stem="1"), 0)


# ============================================================================
# Slaloms and antichains
# ============================================================================


def test_slalom_cover():
    p = FiniteTree.from_pattern("**")
    slalom = slalom_cover(p, lambda w: [int(w, 2), 0], 2)
    assert slalom.values == [[0, 1, 2, 3], [0]]
    assert slalom.is_valid()
    assert slalom.covers([2, 0])
    assert not slalom.covers([2, 1])


def test_slalom_cover_needs_a_total_name():
    p = FiniteTree.from_pattern("*")
    with pytest.raises(PreconditionError):
        slalom_cover(p, lambda w: {"0": [1]}[w], 1)


def test_bounded_compatibility(full_tree):
    assert bounded_compatible(full_tree, BlockTree(stem="1"), 0)
    assert not bounded_compatible(BlockTree(stem="0000"), BlockTree(stem="1111"), 0)


def test_thin_antichain(full_tree, logger):
    candidates = [BlockTree(stem="00"), BlockTree(stem="11")]
    thinning = thin_antichain(full_tree, candidates, 1, 1, logger=logger)
    assert thinning.bound == 2
    assert thinning.chosen == {"0": 0, "1": 1}
