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
    BlockTree,
    BudgetExceededError,
    CertificateViolationError,
    ClopenSet,
    FiniteTree,
    FusionSequence,
    LazyTree,
    Point,
    PreconditionError,
    amalgamate,
    branches_subset,
    fusion,
    is_subtree,
    leq_n,
    sigma_star,
    splitting_level,
)
from tree_forcing.cantor_core import words_up_to
from tree_forcing.tree_algebra import (
    e0_law_holds,
    is_perfect,
    recover_block_tree,
    restrict_tree,
    silver_law_holds,
)


@pytest.fixture
def fused_tree() -> BlockTree:
    """The full tree with the root block widened to 00 / 11."""
    return BlockTree(blocks=[("00", "11")])


@pytest.fixture
def silver_tree() -> BlockTree:
    return BlockTree.silver_from_pattern("1*0*")


# ============================================================================
# Block trees
# ============================================================================


def test_presentation_is_canonical(full_tree):
    assert BlockTree(blocks=[("0", "1")]) == full_tree
    assert BlockTree(
        tail={"kind": "cycle", "blocks": [("00", "11"), ("00", "11")]}
    ) == BlockTree(tail={"kind": "cycle", "blocks": [("00", "11")]})
    assert BlockTree(tail={"kind": "cycle", "blocks": [("0", "1")]}).tail.kind == "free"


@pytest.mark.parametrize(
    "block", [("0", "11"), ("1", "0"), ("", ""), ("0a", "1a")]
)
def test_malformed_blocks_are_rejected(block):
    with pytest.raises(ValueError):
        BlockTree(blocks=[block])


def test_silver_from_pattern(silver_tree):
    assert silver_tree.stem == "1"
    assert silver_tree.blocks == (("00", "10"),)
    assert silver_tree.is_silver()
    assert silver_tree.pattern(6) == "1*0***"
    assert silver_tree.split_coordinates(5) == [1, 3, 4, 5]
    assert silver_tree == BlockTree.silver_from_partial({0: "1", 2: "0"}, 3)


def test_membership(silver_tree):
    assert "100" in silver_tree
    assert "110" in silver_tree
    assert "101" not in silver_tree
    assert "0" not in silver_tree
    assert silver_tree.nodes_at(2) == ["10", "11"]
    assert silver_tree.to_finite(3).pattern() == "1*0"


def test_selectors_and_branches(fused_tree):
    assert fused_tree.node_of_selector("10") == "110"
    assert fused_tree.selector_of("110") == "10"
    assert fused_tree.branch(Point()) == Point()
    assert fused_tree.branch(Point(prefix="1")) == Point(prefix="11")
    assert fused_tree.leftmost(5) == "00000"
    with pytest.raises(PreconditionError):
        fused_tree.selector_of("01")


def test_restrictions(full_tree, fused_tree):
    assert full_tree.restrict("1") == BlockTree(stem="1")
    assert fused_tree.restrict("1") == BlockTree(stem="11")
    assert fused_tree.restrict_to_node("0") == BlockTree(stem="00")


def test_fuse_split(full_tree, fused_tree):
    assert full_tree.fuse_split(0, "0", "1") == fused_tree
    with pytest.raises(PreconditionError):
        full_tree.fuse_split(0, "0", "")


def test_exact_inclusion(full_tree, fused_tree, silver_tree):
    assert fused_tree.is_subtree(full_tree)
    assert not full_tree.is_subtree(fused_tree)
    assert silver_tree.is_subtree(full_tree)
    assert not silver_tree.is_subtree(fused_tree)
    assert is_subtree(silver_tree, silver_tree)


@given(st.text(alphabet="01*", max_size=8))
@settings(max_examples=40)
def test_silver_patterns_round_trip(pattern):
    tree = BlockTree.silver_from_pattern(pattern)
    assert tree.is_silver()
    assert tree.pattern(len(pattern)) == pattern
    assert silver_law_holds(tree, len(pattern) + 2)


# ============================================================================
# Finite and lazy trees
# ============================================================================


def test_finite_tree_shape():
    tree = FiniteTree.from_pattern("*1*")
    assert tree.ht == 3
    assert tree.leaves == ["010", "011", "110", "111"]
    assert tree.splitting_nodes == ["", "01", "11"]
    assert tree.pattern() == "*1*"
    assert "digraph" in tree.to_dot()


def test_finite_tree_must_be_closed():
    with pytest.raises(ValueError):
        FiniteTree(nodes=["", "01"])


def test_non_uniform_tree_has_no_pattern():
    tree = FiniteTree.from_words(["00", "1"])
    assert tree.pattern() is None
    assert not tree.is_uniform()


def test_silver_law():
    assert silver_law_holds(FiniteTree.from_pattern("*1*"), 3)
    assert not silver_law_holds(FiniteTree.from_words(["00", "11"]), 2)


def test_lazy_tree_splitting(fused_tree):
    lazy = LazyTree.of(fused_tree)
    assert lazy.next_split("0") == "00"
    assert lazy.sigma_star("1") == "11"
    assert lazy.restrict("0").nodes_at(3) == ["000", "001"]
    with pytest.raises(BudgetExceededError):
        LazyTree(lambda s: set(s) <= {"0"}).next_split("", bound=5)


def test_sigma_star_respects_bound(fused_tree):
    assert sigma_star(fused_tree, "1") == "11"
    with pytest.raises(BudgetExceededError):
        sigma_star(fused_tree, "1", bound=1)
    assert splitting_level(fused_tree, 1) == {"00", "11"}


blocks = st.integers(min_value=0, max_value=2).flatmap(
    lambda n: st.tuples(
        st.text(alphabet="01", min_size=n, max_size=n),
        st.text(alphabet="01", min_size=n, max_size=n),
    ).map(lambda uv: ("0" + uv[0], "1" + uv[1]))
)

block_trees = st.builds(
    lambda stem, head, cycle: BlockTree(
        stem=stem,
        blocks=head,
        tail={"kind": "cycle", "blocks": cycle} if cycle else None,
    ),
    st.text(alphabet="01", max_size=3),
    st.lists(blocks, max_size=3),
    st.lists(blocks, max_size=2),
)

selectors = st.text(alphabet="01", max_size=4)


@given(block_trees, selectors, selectors)
@settings(max_examples=100)
def test_sigma_star_is_an_order_isomorphism(p, sigma, tau):
    s, t = sigma_star(p, sigma), sigma_star(p, tau)
    assert tau.startswith(sigma) == t.startswith(s)
    assert (s == t) == (sigma == tau)
    assert p.contains(s + "0") and p.contains(s + "1")
    n = len(sigma)
    assert splitting_level(p, n) == set(p.nodes_at(p.level_height(n)))


@given(block_trees, st.text(alphabet="01", max_size=3), st.sampled_from("01"))
@settings(max_examples=100)
def test_restriction_composes(p, sigma, i):
    assert restrict_tree(p, sigma + i) == restrict_tree(restrict_tree(p, sigma), i)
    assert restrict_tree(p, sigma).stem == sigma_star(p, sigma)


def test_recover_block_tree(fused_tree):
    assert recover_block_tree(LazyTree.of(fused_tree), 4) == fused_tree


def test_perfectness(full_tree):
    assert is_perfect(full_tree, 4)
    assert not is_perfect(FiniteTree.from_pattern("**"), 2)
    assert e0_law_holds(full_tree, 4)


def test_e0_law_mirrors_blocks(fused_tree):
    assert e0_law_holds(fused_tree, 5)
    assert not silver_law_holds(fused_tree, 5)
    assert e0_law_holds(LazyTree.of(fused_tree), 5)
    assert e0_law_holds(FiniteTree.from_pattern("*0*"), 3)
    # the continuation after coordinate 1 depends on the root bit
    parity = FiniteTree.from_words(["000", "011", "101", "110"])
    assert not e0_law_holds(parity, 3)
    # the right side splits one coordinate later
    assert not e0_law_holds(FiniteTree.from_words(["000", "001", "100", "110"]), 3)


# ============================================================================
# Orders, amalgamation and fusion
# ============================================================================


def test_leq_n(full_tree, fused_tree):
    assert leq_n(fused_tree, full_tree, 0)
    assert not leq_n(fused_tree, full_tree, 1)
    assert leq_n(full_tree, full_tree, 3)


def test_amalgamation_replaces_the_cone(full_tree):
    r = BlockTree(stem="11")
    q = amalgamate(full_tree, "1", r)
    assert q == BlockTree(blocks=[("01", "11")])
    assert q.restrict("1") == r
    assert leq_n(q, full_tree, 0)


def test_amalgamation_needs_a_subtree(full_tree):
    with pytest.raises(PreconditionError):
        amalgamate(full_tree, "1", BlockTree(stem="01"))


def test_lazy_amalgamation(full_tree):
    q = amalgamate(full_tree, "1", BlockTree(stem="11"), mirror=False)
    assert isinstance(q, LazyTree)
    assert "00" in q and "01" in q
    assert "10" not in q


def test_fusion_of_a_sequence(full_tree, fused_tree):
    seq = FusionSequence.from_list([full_tree, fused_tree])
    seq.verify(2)
    tree = fusion(seq)
    assert "00" in tree
    assert "01" not in tree
    assert "0011" in tree


def test_fusion_certificate_failure(full_tree, fused_tree):
    seq = FusionSequence.from_list([fused_tree, full_tree])
    with pytest.raises(CertificateViolationError) as e:
        seq.verify(1)
    assert e.value.index == 1


@given(st.text(alphabet="01", min_size=40, max_size=40))
@settings(max_examples=20, deadline=None)
def test_fusion_of_twenty_one_conditions(bits):
    """Each condition fixes one third of the coordinates below its n-th free one."""
    fixed = [c for c in range(40) if c % 3 == 1]
    free = [c for c in range(40) if c % 3 != 1]
    conditions = [
        BlockTree.silver_from_partial({c: bits[c] for c in fixed if c < free[n]}, 40)
        for n in range(21)
    ]
    seq = FusionSequence.from_list(conditions)
    seq.verify(20)
    tree = fusion(seq)
    for w in words_up_to(8):
        assert (w in tree) == all(p.contains(w) for p in conditions)
    assert silver_law_holds(tree, 8)


def test_branches_subset(silver_tree):
    assert branches_subset(silver_tree, ClopenSet.cylinder("1"))
    assert branches_subset(silver_tree, ClopenSet(depth=3, words=["100", "110"]))
    assert not branches_subset(silver_tree, ClopenSet.cylinder("11"))
