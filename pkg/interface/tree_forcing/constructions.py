#
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0.
# See the LICENSE file for more information.
#
import itertools
import random
from typing import Annotated, Callable, Iterator, Literal, Optional, TypeAlias, Union

from pydantic import BaseModel, Field

from .cantor_core import Point, Word, length_lex_word, words_of_length
from .const import (
    DEFAULT_BUDGET,
    DEFAULT_DEPTH_OUT,
    DEFAULT_PAIR_BUDGET,
    LOG_CATEGORY_KEY_POINT,
    LOG_CATEGORY_SEARCH,
    LOG_CATEGORY_VERIFY,
    RAMSEY_R4,
)
from .graphs import (
    ClopenGraph,
    E0Relation,
    EdgeCertificate,
    G1Graph,
    GraphSpec,
    WordMap,
    as_graph,
    find_cycle,
    pullback,
    ramsey_find,
)
from .helper import Logger
from .message import (
    BudgetExceededError,
    CertificateViolationError,
    DensityFailureError,
    MalformedInputError,
    NotFoundError,
    PreconditionError,
    RefuterFailureError,
)
from .tree_algebra import BlockTree, FiniteTree, amalgamate

Relation: TypeAlias = Literal["g1", "e0"]
RELATIONS = ("g1", "e0")


class CrossWitness(BaseModel):
    """A related pair across the root split lying in no box of the graph."""

    z0: Point
    z1: Point
    s0: Word  # [s0] × [s1] misses the graph
    s1: Word


class Refutation(CrossWitness):
    condition: BlockTree


class AgreementReport(BaseModel):
    verdict: Literal["agrees", "refuted"]
    relation: Relation = "g1"
    resolution: int = 0
    depth: int = 0
    checked_pairs: int = 0
    witness: Optional[CrossWitness] = None


Refuter: TypeAlias = Callable[[BlockTree], Refutation]


def _flip(w: Word, k: int) -> Word:
    return w[:k] + ("1" if w[k] == "0" else "0") + w[k + 1 :]


def _resolution(G: GraphSpec) -> int:
    res = G.resolution()
    if res is None:
        raise PreconditionError(f"{G.kind} graph has no clopen resolution")
    return res


def _check_condition(q: BlockTree, relation: str) -> None:
    if relation not in RELATIONS:
        raise PreconditionError(f"unknown relation {relation!r}", relation=relation)
    q.validate_structure()
    if relation == "g1" and not q.is_silver():
        raise MalformedInputError("G1 agreement needs a Silver tree")


def _cross_pairs(q: BlockTree, relation: str, depth: int) -> Iterator[tuple[Word, Word]]:
    """Prefix pairs of related branches through q∗0 and q∗1."""
    k = len(q.stem)
    nodes = q.nodes_at(depth)
    left = [a for a in nodes if a[k] == "0"]
    if relation == "g1":
        for a in left:
            yield a, _flip(a, k)
    else:
        right = [b for b in nodes if b[k] == "1"]
        yield from itertools.product(left, right)


def _related_pairs(
    q: BlockTree, relation: str, depth: int, resolution: int
) -> Iterator[tuple[Word, Word]]:
    """Prefix pairs of related branches across every split of q."""
    nodes = q.nodes_at(depth)
    if relation == "g1":
        members = set(nodes)
        coordinates = q.split_coordinates(depth - 1)
        for a in nodes:
            for c in coordinates:
                if a[c] == "0" and _flip(a, c) in members:
                    yield a, _flip(a, c)
    else:
        heads = sorted({a[:resolution] for a in nodes})
        yield from itertools.combinations(heads, 2)


def _branch_through(q: BlockTree, node: Word) -> Point:
    return q.branch(Point.from_word(q.selector_of(node)))


def agrees_with(
    q: BlockTree,
    G: Union[GraphSpec, ClopenGraph],
    relation: Relation = "g1",
) -> AgreementReport:
    """Decide ([q∗0] × [q∗1]) ∩ R ⊆ G for R the given relation.

    The related pairs are read off at depth max(d, |stem| + 1), where d is
    the resolution of G: the G1 pairs of a Silver tree differ only at the
    root split, and every pair of E0 classes meets both sides.
    """
    G = as_graph(G)
    res = _resolution(G)
    _check_condition(q, relation)
    depth = max(res, len(q.stem) + 1)
    checked = 0
    for a, b in _cross_pairs(q, relation, depth):
        checked += 1
        if G.words_adjacent(a, b):
            continue
        z0, z1 = _branch_through(q, a), _branch_through(q, b)
        related = G1Graph() if relation == "g1" else E0Relation()
        if G.edge(z0, z1) or not related.edge(z0, z1):
            raise CertificateViolationError(
                index=checked, message=f"refutation witness {a!r}, {b!r} failed"
            )
        return AgreementReport(
            verdict="refuted",
            relation=relation,
            resolution=res,
            depth=depth,
            checked_pairs=checked,
            witness=CrossWitness(z0=z0, z1=z1, s0=a, s1=b),
        )
    return AgreementReport(
        verdict="agrees",
        relation=relation,
        resolution=res,
        depth=depth,
        checked_pairs=checked,
    )


# ============================================================================
# Refuters
# ============================================================================


def default_refuter(G: Union[GraphSpec, ClopenGraph], relation: Relation = "g1") -> Refuter:
    """A refuter that shrinks both sides of the root split into a witness box."""
    G = as_graph(G)

    def refute(r: BlockTree) -> Refutation:
        report = agrees_with(r, G, relation)
        if report.witness is None:
            raise RefuterFailureError(
                "condition agrees with the graph", stem=r.stem, relation=relation
            )
        w = report.witness
        sel0, sel1 = r.selector_of(w.s0), r.selector_of(w.s1)
        refined = r.fuse_split(0, sel0[1:], sel1[1:])
        return Refutation(condition=refined, **w.model_dump())

    return refute


def _check_refutation(cone: BlockTree, ref: Refutation, G: GraphSpec, res: int) -> None:
    r = ref.condition
    problem = ""
    if r.stem != cone.stem:
        problem = "refuted condition moved the stem"
    elif not r.is_subtree(cone):
        problem = "refuted condition is not below the cone"
    elif min(len(ref.s0), len(ref.s1)) < res:
        problem = "witness boxes are shorter than the resolution"
    elif G.words_adjacent(ref.s0, ref.s1):
        problem = "witness boxes are adjacent"
    elif not (ref.z0.extends(ref.s0) and ref.z1.extends(ref.s1)):
        problem = "witness points leave their boxes"
    elif r.restrict("0").nodes_at(len(ref.s0)) != [ref.s0]:
        problem = "left side is not inside its box"
    elif r.restrict("1").nodes_at(len(ref.s1)) != [ref.s1]:
        problem = "right side is not inside its box"
    if problem:
        raise RefuterFailureError(problem, stem=cone.stem, s0=ref.s0, s1=ref.s1)


# ============================================================================
# Independent trees
# ============================================================================


def verify_independent(
    q: BlockTree,
    G: Union[GraphSpec, ClopenGraph],
    relation: Relation,
    depth: int,
) -> int:
    """Exhaustive check that no related pair across a split of q is adjacent.

    Returns the number of pairs checked.
    """
    G = as_graph(G)
    res = _resolution(G)
    checked = 0
    for a, b in _related_pairs(q, relation, max(depth, res), res):
        checked += 1
        if G.words_adjacent(a, b):
            raise CertificateViolationError(
                index=checked, message=f"related nodes {a!r}, {b!r} are adjacent"
            )
    return checked


def independent_tree(
    p: BlockTree,
    G: Union[GraphSpec, ClopenGraph],
    relation: Relation = "g1",
    refuter: Optional[Refuter] = None,
    depth_out: int = DEFAULT_DEPTH_OUT,
    logger: Optional[Logger] = None,
) -> BlockTree:
    """Fusion construction of a condition below p whose splits are refuted.

    Stage n refutes each cone at level n in length-lex order and mirrors the
    refined cone into p by amalgamation, so the first n splitting levels
    stay fixed. Splits at or beyond the resolution need no refutation
    because their two sides share every box.
    """
    G = as_graph(G)
    res = _resolution(G)
    _check_condition(p, relation)
    refute = refuter or default_refuter(G, relation)
    q, n = p, 0
    while q.level_height(n) < res:
        if logger:
            logger.log_info(
                f"independent tree stage {n} at height {q.level_height(n)}",
                LOG_CATEGORY_KEY_POINT,
            )
        for sigma in words_of_length(n):
            cone = q.restrict(sigma)
            ref = refute(cone)
            _check_refutation(cone, ref, G, res)
            q = amalgamate(q, sigma, ref.condition)
        n += 1
    checked = verify_independent(q, G, relation, depth_out)
    if logger:
        logger.log_info(
            f"independence verified on {checked} related pairs", LOG_CATEGORY_VERIFY
        )
    return q


# ============================================================================
# Dichotomy
# ============================================================================


class IndependentTree(BaseModel):
    kind: Literal["independent"] = "independent"
    tree: BlockTree
    cone: Word = ""  # selector of the cone the tree was built below
    verified_depth: int = 0


class CliqueEvidence(BaseModel):
    kind: Literal["clique"] = "clique"
    tree: FiniteTree
    splits: list[Word] = []
    resolution: int = 0
    verified_pairs: int = 0


class Undecided(BaseModel):
    kind: Literal["undecided"] = "undecided"
    reason: str = ""
    checks: int = 0
    budget: int = 0
    trace: list[str] = []


DichotomyOutcome: TypeAlias = Annotated[
    Union[IndependentTree, CliqueEvidence, Undecided], Field(discriminator="kind")
]


def _visible_selectors(p: BlockTree, res: int) -> list[Word]:
    """Selectors whose splitting node lies below the resolution, length-lex."""
    result, n = [], 0
    while p.level_height(n) < res:
        result.extend(words_of_length(n))
        n += 1
    return result


def density_dichotomy(
    p: BlockTree,
    G: Union[GraphSpec, ClopenGraph],
    relation: Relation = "g1",
    budget: int = DEFAULT_BUDGET,
    depth_out: int = DEFAULT_DEPTH_OUT,
    refuter: Optional[Refuter] = None,
    logger: Optional[Logger] = None,
) -> DichotomyOutcome:
    """Find a cone without agreeing refinements, or clique evidence.

    Every agreement check costs one unit of budget. The search is exact
    for resolvable graphs once the budget covers all visible cones.
    """
    G = as_graph(G)
    res = _resolution(G)
    _check_condition(p, relation)
    verified_depth = max(depth_out, res)
    if len(p.stem) >= res:
        tree = independent_tree(p, G, relation, refuter, depth_out, logger)
        return IndependentTree(tree=tree, verified_depth=verified_depth)

    visible = _visible_selectors(p, res)
    verdicts: dict[Word, bool] = {}
    trace: list[str] = []

    def agrees(tau: Word) -> bool:
        if tau not in verdicts:
            if len(verdicts) >= budget:
                raise BudgetExceededError(
                    f"agreement checks exceeded {budget}", checks=len(verdicts)
                )
            verdicts[tau] = agrees_with(p.restrict(tau), G, relation).verdict == "agrees"
            trace.append(f"{tau or '∅'}: {'agrees' if verdicts[tau] else 'refuted'}")
        return verdicts[tau]

    try:
        for sigma in visible:
            if any(agrees(tau) for tau in visible if tau.startswith(sigma)):
                continue
            if logger:
                logger.log_info(
                    f"cone {sigma or '∅'} has no agreeing refinement", LOG_CATEGORY_SEARCH
                )
            try:
                tree = independent_tree(
                    p.restrict(sigma), G, relation, refuter, depth_out, logger
                )
            except RefuterFailureError as e:
                trace.append(f"{sigma or '∅'}: refuter failed ({e.message})")
                continue
            return IndependentTree(tree=tree, cone=sigma, verified_depth=verified_depth)
        return perfect_clique(p, G, relation, depth_out, budget - len(verdicts), logger)
    except BudgetExceededError as e:
        reason = e.message
    except DensityFailureError as e:
        reason = e.message
    if logger:
        logger.log_info(f"dichotomy undecided: {reason}", LOG_CATEGORY_SEARCH)
    return Undecided(reason=reason, checks=len(verdicts), budget=budget, trace=trace)


# ============================================================================
# Perfect cliques
# ============================================================================


def _product_inside(c: BlockTree, G: GraphSpec, res: int) -> bool:
    """[c∗0] × [c∗1] ⊆ G, decided at the resolution."""
    depth = max(res, len(c.stem) + 1)
    return all(G.words_adjacent(a, b) for a, b in _cross_pairs(c, "e0", depth))


def perfect_clique(
    p: BlockTree,
    G: Union[GraphSpec, ClopenGraph],
    relation: Relation = "g1",
    depth_out: int = DEFAULT_DEPTH_OUT,
    budget: int = DEFAULT_BUDGET,
    logger: Optional[Logger] = None,
) -> CliqueEvidence:
    """Finite approximation of a perfect G-clique below p.

    Each condition is split at its first visible cone whose two sides span
    a box product inside G, until no visible split remains. The leaves,
    continued leftmost to max(depth_out, d), are pairwise adjacent.
    """
    G = as_graph(G)
    res = _resolution(G)
    _check_condition(p, relation)
    checks = 0

    def split_of(c: BlockTree) -> Optional[Word]:
        nonlocal checks
        for tau in _visible_selectors(c, res):
            if checks >= budget:
                raise BudgetExceededError(
                    f"product checks exceeded {budget}", checks=checks
                )
            checks += 1
            if _product_inside(c.restrict(tau), G, res):
                return tau
        return None

    splits: list[Word] = []
    done: list[BlockTree] = []
    frontier, stage = [p], 0
    while frontier:
        following = []
        for c in frontier:
            tau = split_of(c)
            if tau is None:
                if stage == 0:
                    raise DensityFailureError(
                        "no visible cone spans a box product", stem=p.stem
                    )
                done.append(c)
                continue
            splits.append(c.node_of_selector(tau))
            following += [c.restrict(tau + "0"), c.restrict(tau + "1")]
        if logger:
            logger.log_info(
                f"clique stage {stage}: {len(following)} open conditions",
                LOG_CATEGORY_KEY_POINT,
            )
        frontier, stage = following, stage + 1

    length = max(depth_out, res)
    leaves = sorted(c.leftmost(length) for c in done)
    verified = 0
    for a, b in itertools.combinations(leaves, 2):
        verified += 1
        if not G.words_adjacent(a, b):
            raise CertificateViolationError(
                index=verified, message=f"clique leaves {a!r}, {b!r} are not adjacent"
            )
    if logger:
        logger.log_info(f"clique verified on {verified} leaf pairs", LOG_CATEGORY_VERIFY)
    return CliqueEvidence(
        tree=FiniteTree.from_words(leaves),
        splits=sorted(splits),
        resolution=res,
        verified_pairs=verified,
    )


# ============================================================================
# Four cycles
# ============================================================================


class FourCycle(BaseModel):
    points: list[Point]
    phase: Literal["direct", "ramsey", "twin"]
    edges: list[EdgeCertificate] = []


def _verified_cycle(
    points: list[Point], G: GraphSpec, phase: str
) -> Optional[FourCycle]:
    if len(set(points)) != 4:
        return None
    certificates = [G.edge(points[i], points[(i + 1) % 4]) for i in range(4)]
    if not all(certificates):
        return None
    return FourCycle(points=points, phase=phase, edges=certificates)


def _next_split(r: BlockTree, depth: int) -> int:
    m = 0
    while r.level_height(m) < depth:
        m += 1
    return r.level_height(m)


def _sample_selectors(seed: Optional[int]) -> list[Word]:
    """Selectors 0⌢w⌢1 of the Ramsey samples; w is length-lex, or drawn from 2^5."""
    if seed is None:
        words = [length_lex_word(i) for i in range(RAMSEY_R4)]
    else:
        words = random.Random(seed).sample(list(words_of_length(5)), RAMSEY_R4)
    return ["0" + w + "1" for w in words]


def four_cycle(
    r: BlockTree,
    G: Union[GraphSpec, ClopenGraph],
    bound: int = DEFAULT_PAIR_BUDGET,
    seed: Optional[int] = None,
    logger: Optional[Logger] = None,
) -> FourCycle:
    """A verified 4-cycle among branches of an agreeing Silver condition.

    With z' the copy of z across the root split, (z, z') is always an
    edge, so two edges between {z, z'} and {w, w'} close a cycle. The
    search tries node pairs at the resolution, then 18 sampled branches
    and their copies, then two branches sharing their resolution prefix.
    A seed draws the sampled selectors at random instead of in length-lex
    order.
    """
    G = as_graph(G)
    report = agrees_with(r, G, "g1")
    if report.verdict != "agrees":
        raise PreconditionError("condition does not agree with the graph", stem=r.stem)
    k, res = len(r.stem), report.resolution

    def copy(z: Point) -> Point:
        return z.flip(k)

    def close(z: Point, w: Point, phase: str) -> Optional[FourCycle]:
        return _verified_cycle([z, copy(z), copy(w), w], G, phase) or _verified_cycle(
            [z, copy(z), w, copy(w)], G, phase
        )

    # node pairs left of the root split, one split lower while there is a single node
    depth = report.depth
    while len(left := [a for a in r.nodes_at(depth) if a[k] == "0"]) < 2:
        depth = _next_split(r, depth) + 1
    checked = 0
    for a, c in itertools.combinations(left, 2):
        if checked >= bound:
            break
        checked += 1
        a1, c1 = _flip(a, k), _flip(c, k)
        straight = G.words_adjacent(a, c) and G.words_adjacent(a1, c1)
        crossed = G.words_adjacent(a, c1) and G.words_adjacent(a1, c)
        if straight or crossed:
            found = close(_branch_through(r, a), _branch_through(r, c), "direct")
            if found:
                return found
    if logger:
        logger.log_info(f"direct phase checked {checked} node pairs", LOG_CATEGORY_SEARCH)

    samples = [r.branch(Point(prefix=sel, period="0")) for sel in _sample_selectors(seed)]
    try:
        result = ramsey_find(samples, G)
    except NotFoundError:
        result = None
    if result is not None and result.kind == "cycle":
        found = _verified_cycle(result.points, G, "ramsey")
        if found:
            return found
    if result is not None:
        if logger:
            logger.log_info("lifting an independent 4-set to copies", LOG_CATEGORY_SEARCH)
        quad = result.points
        for z, w in itertools.combinations(quad, 2):
            found = close(z, w, "ramsey")
            if found:
                return found
        for pool in ([copy(z) for z in quad], [copy(z) for z in samples]):
            order = find_cycle(pool, lambda i, j: bool(G.edge(pool[i], pool[j])))
            if order is not None:
                found = _verified_cycle([pool[i] for i in order], G, "ramsey")
                if found:
                    return found

    sel = r.selector_of(r.nodes_at(report.depth)[0])
    m = max(len(sel), r.selector_depth(res))
    sel += "0" * (m - len(sel))
    z = r.branch(Point(prefix=sel + "0", period="0"))
    w = r.branch(Point(prefix=sel + "1", period="0"))
    found = _verified_cycle([z, copy(z), w, copy(w)], G, "twin")
    if found:
        return found
    raise BudgetExceededError(
        "no verified 4-cycle found", samples=[str(s) for s in samples], bound=bound
    )


# ============================================================================
# Independent images
# ============================================================================


class ImageCertificate(BaseModel):
    """Non-adjacency of the image words of related pairs across every split."""

    resolution: int = 0
    depth: int = 0
    images: list[Word] = []
    checked_pairs: int = 0


def independent_image(
    f: WordMap,
    G: Union[GraphSpec, ClopenGraph],
    p: BlockTree,
    depth_out: int = DEFAULT_DEPTH_OUT,
    relation: Relation = "g1",
    refuter: Optional[Refuter] = None,
    logger: Optional[Logger] = None,
) -> tuple[BlockTree, ImageCertificate]:
    """Independent tree for the pull-back of G, with a certificate for its image."""
    H = pullback(f, G)
    q = independent_tree(p, H, relation, refuter, depth_out, logger)
    base = H.base
    d = _resolution(base)
    res = _resolution(H)
    depth = max(res, 1)
    checked = 0
    for a, b in _related_pairs(q, relation, depth, res):
        checked += 1
        fa, fb = f(a)[:d], f(b)[:d]
        if base.words_adjacent(fa, fb):
            raise CertificateViolationError(
                index=checked, message=f"images of {a!r}, {b!r} are adjacent"
            )
    images = sorted({f(a)[:d] for a in q.nodes_at(depth)})
    return q, ImageCertificate(
        resolution=d, depth=depth, images=images, checked_pairs=checked
    )
