#
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0.
# See the LICENSE file for more information.
#
from typing import Callable, Optional, Sequence

from pydantic import BaseModel

from .cantor_core import (
    DENSE,
    ClopenSet,
    DenseSequence,
    Point,
    Word,
    check_word,
    stem_of,
    unit,
    word_xor,
    words_of_length,
    words_up_to,
    xor,
)
from .const import (
    DEFAULT_BUDGET,
    DEFAULT_COMPATIBILITY_BOUND,
    DEFAULT_LADDER_PROBE,
    DEFAULT_PROBE_DEPTH,
    LOG_CATEGORY_KEY_POINT,
    LOG_CATEGORY_SEARCH,
    LOG_CATEGORY_VERIFY,
)
from .graphs import EdgeWitness, G0Graph
from .helper import Logger
from .message import (
    BudgetExceededError,
    CertificateViolationError,
    EmptyInputError,
    FatnessMissingError,
    MalformedInputError,
    PreconditionError,
)
from .tree_algebra import BlockTree, FiniteTree, branches_subset


def _check_silver(p: BlockTree) -> None:
    p.validate_structure()
    if not p.is_silver():
        raise MalformedInputError("fatness is defined for Silver trees", stem=p.stem)


# ============================================================================
# Fatness
# ============================================================================


class FatnessEntry(BaseModel):
    s: Word
    t: Word
    coordinate: Optional[int] = None
    witness: Optional[Word] = None  # splitting node of p_s + t on the dense sequence
    exhausted_depth: Optional[int] = None


class FatnessReport(BaseModel):
    fat: bool = True
    split_depth: int = 0
    probe_depth: int = 0
    nodes: list[Word] = []
    entries: list[FatnessEntry] = []

    def missing(self) -> list[FatnessEntry]:
        return [e for e in self.entries if e.coordinate is None]


def is_fat(
    p: BlockTree,
    split_depth: int = 3,
    probe_depth: int = DEFAULT_PROBE_DEPTH,
    dense: DenseSequence = DENSE,
    logger: Optional[Logger] = None,
) -> FatnessReport:
    """Check G₀-fatness at every splitting node of height at most split_depth.

    Two branches of the Silver tree p_s + t form a G₀-edge exactly when
    they split at a node equal to some s_c. So the shift t is witnessed by
    a split coordinate c ≥ |s| with s⌢s_c[|s|:] ∈ p, and then
    t = s + s_c↾|s|.
    """
    _check_silver(p)
    if probe_depth < split_depth:
        raise PreconditionError(
            f"probe depth {probe_depth} is below split depth {split_depth}"
        )
    coordinates = p.split_coordinates(probe_depth)
    report = FatnessReport(split_depth=split_depth, probe_depth=probe_depth)
    m = 0
    while p.level_height(m) <= split_depth:
        for sigma in words_of_length(m):
            s = p.node_of_selector(sigma)
            report.nodes.append(s)
            found: dict[Word, int] = {}
            for c in coordinates:
                if c < len(s):
                    continue
                sc = dense(c)
                if p.contains(s + sc[len(s) :]):
                    found.setdefault(word_xor(s, sc[: len(s)]), c)
            for t in words_of_length(len(s)):
                c = found.get(t)
                if c is None:
                    report.fat = False
                    report.entries.append(
                        FatnessEntry(s=s, t=t, exhausted_depth=probe_depth)
                    )
                else:
                    report.entries.append(
                        FatnessEntry(s=s, t=t, coordinate=c, witness=dense(c))
                    )
        m += 1
    if logger:
        logger.log_info(
            f"fatness {'holds' if report.fat else 'fails'} on {len(report.nodes)} nodes",
            LOG_CATEGORY_VERIFY,
        )
    return report


def direct_fatness_witness(
    p: BlockTree,
    s: Word,
    t: Word,
    probe_depth: int = DEFAULT_PROBE_DEPTH,
    dense: DenseSequence = DENSE,
) -> Optional[EdgeWitness]:
    """A G₀-edge between two shifted branches of p_s, found by brute force."""
    if len(t) != len(s):
        raise PreconditionError("shift and node must have equal length", s=s, t=t)
    graph = G0Graph(dense)
    cone = p.restrict_to_node(s)
    shift = Point.from_word(t)
    j = 0
    while (c := cone.level_height(j)) <= probe_depth:
        for sigma in words_of_length(j):
            x = cone.branch(Point.from_word(sigma))
            y = x.flip(c)
            xs, ys = xor(x, shift), xor(y, shift)
            certificate = graph.edge(xs, ys)
            if certificate:
                return EdgeWitness(x=xs, y=ys, certificate=certificate)
        j += 1
    return None


# ============================================================================
# Clopen claim step
# ============================================================================


class IdealShiftProbe(BaseModel):
    """The test "A + 1ₙ is positive" on a clopen set.

    Every nonempty clopen set is positive for the ideal of sets with
    countable Borel chromatic number, so the probe only looks at
    nonemptiness of the shifted set.
    """

    shift: int
    base: ClopenSet

    def shifted(self) -> ClopenSet:
        return self.base.shift(unit(self.shift))

    def in_ideal(self) -> bool:
        return self.shifted().is_empty()

    def positive(self) -> bool:
        return not self.in_ideal()

    def contained_in(self, A: ClopenSet) -> bool:
        return self.shifted().is_subset(A)


class FatClaim(BaseModel):
    s: Word
    t: Word
    u: Word  # member cylinder [u] ⊆ A extending s
    n: int
    a_t: ClopenSet
    probe: IdealShiftProbe


def fatclaim_step(
    A: ClopenSet,
    s: Word,
    t: Word,
    dense: DenseSequence = DENSE,
) -> FatClaim:
    """One shift of the fatness claim on a clopen set.

    Picks [u] ⊆ A above s and the least n ≥ |u| with s_n ⊇ u + t, then
    returns A_t = {x ∈ A : s_n ⊆ x + t and x + 1ₙ ∈ A} at depth n + 1.
    """
    if A.is_empty():
        raise EmptyInputError("clopen set is empty", depth=A.depth)
    check_word(s, "s")
    check_word(t, "t")
    if len(t) != len(s):
        raise PreconditionError("shift and node must have equal length", s=s, t=t)
    if not s.startswith(stem_of(A)):
        raise PreconditionError(
            f"{s!r} does not extend the stem {stem_of(A)!r}", s=s
        )
    if not A.meets(s):
        raise EmptyInputError(f"A does not meet [{s}]", s=s)

    u = s if len(s) >= A.depth else next(w for w in A.words if w.startswith(s))
    n = dense.first_extension(word_xor(u, t), len(u))
    v = word_xor(dense(n), t)
    words = [
        w
        for w in (v + "0", v + "1")
        if A.contains(w) and A.contains(w[:n] + ("1" if w[n] == "0" else "0"))
    ]
    a_t = ClopenSet(depth=n + 1, words=words)
    probe = IdealShiftProbe(shift=n, base=a_t)
    if (
        a_t.is_empty()
        or not probe.positive()
        or not probe.contained_in(A)
        or not a_t.is_subset(A)
        or not stem_of(a_t.shift(t)).startswith(dense(n))
    ):
        raise CertificateViolationError(
            index=n, message=f"claim step for s={s!r}, t={t!r} failed verification"
        )
    return FatClaim(s=s, t=t, u=u, n=n, a_t=a_t, probe=probe)


# ============================================================================
# Fat extensions and G₀-trees inside clopen sets
# ============================================================================


def shift_witness(
    p: FiniteTree, t: Word, dense: DenseSequence = DENSE
) -> Optional[int]:
    """Least n with s_n + t a splitting node of p."""
    for n in range(len(t), p.ht):
        if p.is_splitting(word_xor(dense(n), t)):
            return n
    return None


def _extend_pattern(pattern: str, budget: int, dense: DenseSequence) -> str:
    """One fat-extension pass over a {0, 1, *} pattern.

    The leaves of the pattern are assumed to lie in the clopen set, so each
    claim step runs on the cone of the current leftmost leaf.
    """
    height0 = len(pattern)
    if 2**height0 > budget:
        raise BudgetExceededError(
            f"fat extension needs {2**height0} shifts beyond budget {budget}",
            pattern=pattern,
        )
    for t in words_of_length(height0):
        height = len(pattern)
        leftmost = pattern.replace("*", "0")
        shift = t.ljust(height, "0")
        n = dense.first_extension(word_xor(leftmost, shift), height)
        if n > budget:
            raise BudgetExceededError(
                f"fat extension needs height {n} beyond budget {budget}",
                pattern=pattern,
                t=t,
            )
        claim = fatclaim_step(ClopenSet.cylinder(leftmost), leftmost, shift, dense)
        # a_t is leftmost⌢s_n[height:n] followed by both sides of the split at n
        pattern += claim.a_t.words[0][height : claim.n] + "*"
    return pattern


def fat_extend(
    p: FiniteTree,
    A: ClopenSet,
    budget: int = DEFAULT_BUDGET,
    dense: DenseSequence = DENSE,
    logger: Optional[Logger] = None,
) -> FiniteTree:
    """Extend a uniform tree so that every shift of its height is witnessed.

    Shifts t ∈ 2^{ht(p)} are handled in lex order, each by a claim step on
    the cone of the current leftmost leaf. The step's n is least with s_n
    extending leftmost leaf + t; the pass appends the bits of s_n beyond
    the current height and a split at n. The new splitting node is s_n + t,
    and every pass doubles the leaf count.
    """
    pattern = p.pattern()
    if pattern is None:
        raise PreconditionError("fat extensions need a uniform tree")
    if A.is_empty():
        raise EmptyInputError("clopen set is empty", depth=A.depth)
    if not all(A.contains(leaf) for leaf in p.leaves):
        raise PreconditionError("tree leaves must lie inside the clopen set")

    height0 = len(pattern)
    tree = FiniteTree.from_pattern(_extend_pattern(pattern, budget, dense))

    for t in words_of_length(height0):
        if shift_witness(tree, t, dense) is None:
            raise CertificateViolationError(
                index=len(t), message=f"shift {t!r} has no splitting witness"
            )
    if not all(A.contains(leaf) for leaf in tree.leaves):
        raise CertificateViolationError(index=tree.ht, message="leaves left the set")
    if logger:
        logger.log_info(
            f"fat extension to height {tree.ht} with {len(tree.leaves)} leaves",
            LOG_CATEGORY_KEY_POINT,
        )
    return tree


def g0_tree_inside(
    A: ClopenSet,
    levels: int = 2,
    budget: int = DEFAULT_BUDGET,
    dense: DenseSequence = DENSE,
    logger: Optional[Logger] = None,
) -> BlockTree:
    """A Silver tree with branches in A, G₀-fat below its last pass.

    Starts from the length-lex first u with [u] ⊆ A and runs `levels` fat
    extension passes on the pattern; coordinates past the last split are
    free. Fatness is verified at every split reached before the last pass.
    """
    if levels < 1:
        raise PreconditionError("a fat tree needs at least one extension pass")
    if A.is_empty():
        raise EmptyInputError("clopen set is empty", depth=A.depth)
    pattern = next(w for w in words_up_to(A.depth) if A.contains(w))
    closed = len(pattern)
    for _ in range(levels):
        closed = len(pattern)
        pattern = _extend_pattern(pattern, budget, dense)
        if logger:
            logger.log_debug(f"extension pass to height {len(pattern)}")
    tree = BlockTree.silver_from_pattern(pattern)
    if not branches_subset(tree, A, bound=max(A.depth, len(pattern))):
        raise CertificateViolationError(index=0, message="tree leaves the clopen set")
    report = is_fat(tree, closed, len(pattern) - 1, dense)
    if not report.fat:
        missing = report.missing()[0]
        raise FatnessMissingError(missing.s, missing.t)
    if logger:
        logger.log_info(
            f"fat tree with stem {tree.stem!r} and splits up to {len(pattern) - 1}",
            LOG_CATEGORY_VERIFY,
        )
    return tree



# ============================================================================
# Ladders
# ============================================================================


class Ladder(BaseModel):
    stem: Word
    levels: list[list[Word]]  # leaves of p⁰, p¹, …
    heights: list[int]
    splits: list[list[int]]

    @property
    def sizes(self) -> list[int]:
        return [len(level) for level in self.levels]

    def growth_law_holds(self) -> bool:
        sizes = self.sizes
        return all(
            sizes[k + 1] == sizes[k] * 2 ** (2 ** self.heights[k])
            for k in range(len(sizes) - 1)
        )

    def tree(self, k: int) -> FiniteTree:
        return FiniteTree.from_words(self.levels[k])


def _ladder_level(p: BlockTree, splits: set[int], height: int) -> list[Word]:
    """Nodes of p at height that take the left side at every unused split."""
    nodes, k = [p.stem], 0
    while (c := p.level_height(k)) < height:
        sides = (0, 1) if c in splits else (0,)
        nodes = [w + p.block(k)[i] for w in nodes for i in sides]
        k += 1
    return sorted(w[:height] for w in nodes)


def _leaves_within(size: int, height: int, budget: int) -> bool:
    """size · 2^(2^height) ≤ budget, without building the power."""
    if 2**height >= budget.bit_length():
        return False
    return size * 2 ** (2**height) <= budget


def ladder(
    p: BlockTree,
    n: int,
    budget: int = DEFAULT_BUDGET,
    probe_depth: int = DEFAULT_LADDER_PROBE,
    dense: DenseSequence = DENSE,
    logger: Optional[Logger] = None,
) -> Ladder:
    """The finite subtrees p⁰ ⊆ p¹ ⊆ … ⊆ pⁿ of a fat Silver tree.

    With t₀ the leftmost leaf of pᵏ, every t ∈ 2^{ht(pᵏ)} gets the least
    split coordinate c with s_c a splitting node of p_{t₀} + t. pᵏ⁺¹ splits
    at these coordinates on top of those of pᵏ and takes the left side at
    every other split of p.
    """
    _check_silver(p)
    splits: set[int] = set()
    height = len(p.stem)
    result = Ladder(stem=p.stem, levels=[[p.stem]], heights=[height], splits=[[]])
    shifts = checks = 0
    for k in range(n):
        t0 = result.levels[-1][0]
        shifts += 2**height
        if shifts > budget:
            raise BudgetExceededError(
                f"ladder level {k + 1} needs {2**height} shifts",
                level=k + 1,
                sizes=result.sizes,
            )
        if not _leaves_within(result.sizes[-1], height, budget):
            raise BudgetExceededError(
                f"ladder level {k + 1} would exceed {budget} leaves",
                level=k + 1,
                sizes=result.sizes,
                height=height,
            )
        found = []
        for t in words_of_length(height):
            target = word_xor(t0, t)
            c = dense.first_extension(target, height)
            checks += 1
            while not (p.is_split_coordinate(c) and p.contains(word_xor(dense(c), t))):
                c = dense.first_extension(target, c + 1)
                checks += 1
                if c > probe_depth:
                    raise FatnessMissingError(t0, t)
                if checks > budget:
                    raise BudgetExceededError(
                        f"ladder level {k + 1} exceeded {budget} coordinate checks",
                        level=k + 1,
                        sizes=result.sizes,
                    )
            found.append(c)
        splits |= set(found)
        height = max(found) + 1
        result.levels.append(_ladder_level(p, splits, height))
        result.heights.append(height)
        result.splits.append(sorted(splits))
        if logger:
            logger.log_info(
                f"ladder level {k + 1}: height {height}, {len(result.levels[-1])} leaves",
                LOG_CATEGORY_KEY_POINT,
            )
    return result


def ladder_leq(q: BlockTree, p: BlockTree, n: int, budget: int = DEFAULT_BUDGET) -> bool:
    """q ≤ₙ p iff q ⊆ p and qⁿ = pⁿ."""
    if not q.is_subtree(p):
        return False
    try:
        levels_q = ladder(q, n, budget).levels[n]
    except FatnessMissingError:
        return False
    return levels_q == ladder(p, n, budget).levels[n]


# ============================================================================
# Slaloms and antichains
# ============================================================================


class Slalom(BaseModel):
    width: list[int]
    values: list[list[int]]

    def covers(self, x: Sequence[int]) -> bool:
        if len(x) < len(self.values):
            return False
        return all(x[n] in self.values[n] for n in range(len(self.values)))

    def is_valid(self) -> bool:
        return all(len(v) <= w for v, w in zip(self.values, self.width))


def slalom_cover(
    p: FiniteTree,
    name: Callable[[Word], Sequence[int]],
    coords: int,
) -> Slalom:
    """The slalom of values a name takes on the leaves of p."""
    leaves = p.leaves
    images: dict[Word, list[int]] = {}
    for leaf in leaves:
        try:
            values = name(leaf)
        except (KeyError, IndexError, ValueError) as e:
            raise PreconditionError(f"name is undefined on {leaf!r}", leaf=leaf) from e
        if values is None or len(values) < coords:
            raise PreconditionError(
                f"name gives fewer than {coords} values on {leaf!r}", leaf=leaf
            )
        images[leaf] = [int(v) for v in values[:coords]]
    slalom = Slalom(
        width=[len(leaves)] * coords,
        values=[sorted({img[n] for img in images.values()}) for n in range(coords)],
    )
    if not slalom.is_valid() or not all(slalom.covers(x) for x in images.values()):
        raise CertificateViolationError(index=coords, message="slalom failed verification")
    return slalom


def bounded_compatible(
    p: BlockTree,
    q: BlockTree,
    depth: int,
    bound: int = DEFAULT_COMPATIBILITY_BOUND,
) -> bool:
    """Experimental compatibility test for two block trees.

    The trees count as compatible when some common node at depth has two
    common extensions within bound more levels. This is a heuristic and
    may disagree with true compatibility.
    """
    top = depth + bound
    common = set(p.nodes_at(top)) & set(q.nodes_at(top))
    heads: dict[Word, int] = {}
    for w in common:
        heads[w[:depth]] = heads.get(w[:depth], 0) + 1
    return any(count >= 2 for count in heads.values())


class AntichainThinning(BaseModel):
    bound: int  # at most 2ⁿ members stay compatible
    chosen: dict[str, Optional[int]]  # cone selector ↦ candidate index


def thin_antichain(
    p: BlockTree,
    candidates: Sequence[BlockTree],
    n: int,
    depth: int,
    bound: int = DEFAULT_COMPATIBILITY_BOUND,
    logger: Optional[Logger] = None,
) -> AntichainThinning:
    """Experimental: keep one compatible candidate per cone at level n."""
    chosen: dict[str, Optional[int]] = {}
    for sigma in words_of_length(n):
        cone = p.restrict(sigma)
        chosen[sigma] = next(
            (
                i
                for i, c in enumerate(candidates)
                if bounded_compatible(cone, c, max(depth, len(cone.stem)), bound)
            ),
            None,
        )
    if logger:
        logger.log_info(
            f"thinned {len(candidates)} candidates to {sum(v is not None for v in chosen.values())}",
            LOG_CATEGORY_SEARCH,
        )
    return AntichainThinning(bound=2**n, chosen=chosen)
