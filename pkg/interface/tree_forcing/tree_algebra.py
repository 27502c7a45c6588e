#
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0.
# See the LICENSE file for more information.
#
import math
import threading
from collections import deque
from typing import Annotated, Callable, Iterable, Literal, Optional, TypeAlias, Union

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from .cantor_core import (
    ClopenSet,
    Point,
    Word,
    check_word,
    comparable,
    length_lex_key,
    words_of_length,
)
from .const import DEFAULT_BOUND, DEFAULT_DEPTH_OUT
from .helper import Logger
from .message import (
    BudgetExceededError,
    CertificateViolationError,
    MalformedInputError,
    PreconditionError,
)

Block: TypeAlias = tuple[Word, Word]
FREE_BLOCK: Block = ("0", "1")


def _check_block(block) -> Block:
    if len(block) != 2:
        raise ValueError(f"a block is a pair of words, got {block!r}")
    u0, u1 = check_word(block[0], "block"), check_word(block[1], "block")
    if not u0 or len(u0) != len(u1):
        raise ValueError(f"block words must be nonempty and of equal length: {block!r}")
    if u0[0] != "0" or u1[0] != "1":
        raise ValueError(f"block sides must start with 0 and 1: {block!r}")
    return (u0, u1)


def _primitive_cycle(cycle: list[Block]) -> list[Block]:
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle[:d] * (n // d) == cycle:
            return cycle[:d]
    return cycle


class FreeTail(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["free"] = "free"


class CycleTail(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["cycle"] = "cycle"
    blocks: tuple[Block, ...] = ()


Tail: TypeAlias = Annotated[Union[FreeTail, CycleTail], Field(discriminator="kind")]


class BlockTree(BaseModel):
    """A finitely presented E₀-tree: a stem followed by a stream of block pairs.

    The branches are stem⌢u⁰_{x(0)}⌢u¹_{x(1)}⌢… for selectors x ∈ 2^ω. The
    stream is an explicit list of blocks followed by a cycle repeated
    forever; the free tail is the cycle of the single pair ("0", "1").
    Presentations are canonical, so model equality is tree equality.
    """

    model_config = ConfigDict(frozen=True)

    stem: Word = ""
    blocks: tuple[Block, ...] = ()
    tail: Tail = FreeTail()

    @model_validator(mode="before")
    @classmethod
    def _canonicalize(cls, data):
        if not isinstance(data, dict):
            return data
        stem = check_word(data.get("stem", ""), "stem")
        blocks = [_check_block(b) for b in data.get("blocks", ())]
        tail = data.get("tail", None) or {"kind": "free"}
        if isinstance(tail, BaseModel):
            tail = tail.model_dump()
        match tail.get("kind", "free"):
            case "free":
                cycle = [FREE_BLOCK]
            case "cycle":
                cycle = [_check_block(b) for b in tail.get("blocks", ())]
                if not cycle:
                    raise ValueError("a cycle tail needs at least one block")
            case other:
                raise ValueError(f"unknown tail kind {other!r}")
        cycle = _primitive_cycle(cycle)
        while blocks and blocks[-1] == cycle[-1]:
            blocks.pop()
            cycle = [cycle[-1]] + cycle[:-1]
        if cycle == [FREE_BLOCK]:
            tail = {"kind": "free"}
        else:
            tail = {"kind": "cycle", "blocks": tuple(cycle)}
        return {"stem": stem, "blocks": tuple(blocks), "tail": tail}

    # ------------------------------------------------------------------
    # construction helpers

    @classmethod
    def full(cls) -> "BlockTree":
        return cls()

    @classmethod
    def silver_from_pattern(cls, pattern: str) -> "BlockTree":
        """Silver tree of a partial function written over {0, 1, *}.

        A '*' marks a free coordinate; coordinates past the pattern are free.
        """
        if any(c not in "01*" for c in pattern):
            raise ValueError(f"pattern must be over 0/1/*, got {pattern!r}")
        free = [i for i, c in enumerate(pattern) if c == "*"]
        if not free:
            return cls(stem=pattern)
        blocks = []
        for j, c in enumerate(free):
            end = free[j + 1] if j + 1 < len(free) else len(pattern)
            fill = pattern[c + 1 : end]
            blocks.append(("0" + fill, "1" + fill))
        return cls(stem=pattern[: free[0]], blocks=blocks)

    @classmethod
    def silver_from_partial(cls, fixed: dict[int, str], length: int) -> "BlockTree":
        """Silver tree fixing the given coordinates, free elsewhere."""
        pattern = "".join(fixed.get(i, "*") for i in range(length))
        return cls.silver_from_pattern(pattern)

    def _stream_from(self, k: int) -> tuple[list[Block], list[Block]]:
        """(explicit blocks, cycle) presenting the block stream from index k."""
        cycle = self.cycle
        if k <= len(self.blocks):
            return list(self.blocks[k:]), cycle
        r = (k - len(self.blocks)) % len(cycle)
        return [], cycle[r:] + cycle[:r]

    def _with_stream(self, stem: Word, head: list[Block], k: int) -> "BlockTree":
        rest, cycle = self._stream_from(k)
        return BlockTree(
            stem=stem,
            blocks=head + rest,
            tail={"kind": "cycle", "blocks": cycle},
        )

    # ------------------------------------------------------------------
    # block stream

    @property
    def cycle(self) -> list[Block]:
        if isinstance(self.tail, FreeTail):
            return [FREE_BLOCK]
        return list(self.tail.blocks)

    def validate_structure(self) -> None:
        """Re-check block invariants, including on unvalidated instances."""
        cycle = self.tail.blocks if isinstance(self.tail, CycleTail) else [FREE_BLOCK]
        if not cycle:
            raise MalformedInputError("block tree has an empty block stream")
        try:
            check_word(self.stem, "stem")
            for block in list(self.blocks) + list(cycle):
                _check_block(block)
        except ValueError as e:
            raise MalformedInputError(str(e)) from e

    def block(self, k: int) -> Block:
        if k < len(self.blocks):
            return self.blocks[k]
        cycle = self.cycle
        return cycle[(k - len(self.blocks)) % len(cycle)]

    def _fold(self, k: int) -> int:
        if k < len(self.blocks):
            return k
        return len(self.blocks) + (k - len(self.blocks)) % len(self.cycle)

    def level_height(self, m: int) -> int:
        """Length of the nodes in the m-th splitting level."""
        explicit = [len(b[0]) for b in self.blocks]
        if m <= len(explicit):
            return len(self.stem) + sum(explicit[:m])
        lengths = [len(b[0]) for b in self.cycle]
        full, part = divmod(m - len(explicit), len(lengths))
        return (
            len(self.stem) + sum(explicit) + full * sum(lengths) + sum(lengths[:part])
        )

    def selector_depth(self, depth: int) -> int:
        """Least m with level_height(m) ≥ depth."""
        m = 0
        while self.level_height(m) < depth:
            m += 1
        return m

    @property
    def explicit_height(self) -> int:
        return self.level_height(len(self.blocks))

    def split_coordinates(self, upto: int) -> list[int]:
        result, m = [], 0
        while (c := self.level_height(m)) <= upto:
            result.append(c)
            m += 1
        return result

    def is_split_coordinate(self, c: int) -> bool:
        pos = len(self.stem)
        if c < pos:
            return False
        for b in self.blocks:
            if pos == c:
                return True
            pos += len(b[0])
            if pos > c:
                return False
        offsets, total = [], 0
        for b in self.cycle:
            offsets.append(total)
            total += len(b[0])
        return (c - pos) % total in offsets

    def is_silver(self) -> bool:
        return all(b[0][1:] == b[1][1:] for b in list(self.blocks) + self.cycle)

    # ------------------------------------------------------------------
    # nodes and branches

    def node_of_selector(self, sigma: Word) -> Word:
        """σ*, the splitting node reached by following the selector σ."""
        return self.stem + "".join(
            self.block(k)[int(b)] for k, b in enumerate(sigma)
        )

    def contains(self, s: Word) -> bool:
        if len(s) <= len(self.stem):
            return self.stem.startswith(s)
        if not s.startswith(self.stem):
            return False
        rest, k = s[len(self.stem) :], 0
        while rest:
            u = self.block(k)[int(rest[0])]
            if len(rest) <= len(u):
                return u.startswith(rest)
            if not rest.startswith(u):
                return False
            rest = rest[len(u) :]
            k += 1
        return True

    def __contains__(self, s: Word) -> bool:
        return self.contains(s)

    def selector_of(self, node: Word) -> Word:
        """Selector bits of the blocks a node enters, including a partial one."""
        if not self.contains(node):
            raise PreconditionError(f"{node!r} is not a node of the tree", node=node)
        rest, k, sel = node[len(self.stem) :], 0, []
        while rest:
            sel.append(rest[0])
            rest = rest[len(self.block(k)[int(rest[0])]) :]
            k += 1
        return "".join(sel)

    def nodes_at(self, depth: int) -> list[Word]:
        if depth <= len(self.stem):
            return [self.stem[:depth]]
        m = self.selector_depth(depth)
        return sorted(
            {self.node_of_selector(s)[:depth] for s in words_of_length(m)}
        )

    def branch(self, selector: Point) -> Point:
        """The branch chosen by an eventually periodic selector."""
        start = max(len(self.blocks), len(selector.prefix))
        length = math.lcm(len(self.cycle), len(selector.period))

        def chosen(k: int) -> Word:
            return self.block(k)[int(selector.bit(k))]

        return Point(
            prefix=self.stem + "".join(chosen(k) for k in range(start)),
            period="".join(chosen(k) for k in range(start, start + length)),
        )

    def leftmost(self, depth: int) -> Word:
        return self.node_of_selector("0" * self.selector_depth(depth))[:depth]

    # ------------------------------------------------------------------
    # derived trees

    def restrict(self, sigma: Word) -> "BlockTree":
        """p∗σ: the stem moves up to σ*, the remaining blocks shift down."""
        return self._with_stream(self.node_of_selector(sigma), [], len(sigma))

    def restrict_to_node(self, t: Word) -> "BlockTree":
        """The cone {s ∈ p : s ⊆ t or t ⊆ s}."""
        return self.restrict(self.selector_of(t))

    def fuse_split(self, n: int, sel0: Word, sel1: Word) -> "BlockTree":
        """Merge block n with the following blocks along fixed selectors.

        Side i of block n is extended by the blocks chosen by sel_i, so
        every restriction at level n is refined in the same way.
        """
        if len(sel0) != len(sel1):
            raise PreconditionError(
                "fused selectors must have equal length", sel0=sel0, sel1=sel1
            )
        b0, b1 = self.block(n)
        b0 += "".join(self.block(n + 1 + i)[int(c)] for i, c in enumerate(sel0))
        b1 += "".join(self.block(n + 1 + i)[int(c)] for i, c in enumerate(sel1))
        head = [self.block(k) for k in range(n)] + [(b0, b1)]
        return self._with_stream(self.stem, head, n + 1 + len(sel0))

    def pattern(self, depth: int) -> str:
        """The partial function of a Silver tree up to depth, over {0, 1, *}."""
        if not self.is_silver():
            raise MalformedInputError("only Silver trees have a pattern")
        out, k = self.stem, 0
        while len(out) < depth:
            out += "*" + self.block(k)[0][1:]
            k += 1
        return out[:depth]

    def to_finite(self, depth: int) -> "FiniteTree":
        return FiniteTree.from_words(self.nodes_at(depth))

    # ------------------------------------------------------------------
    # exact inclusion via the block automaton

    def _start(self) -> tuple:
        return ("stem", 0) if self.stem else ("split", 0)

    def _step(self, state: tuple) -> dict[str, tuple]:
        match state:
            case ("stem", j):
                nxt = ("stem", j + 1) if j + 1 < len(self.stem) else ("split", 0)
                return {self.stem[j]: nxt}
            case ("split", k):
                out = {}
                for i in (0, 1):
                    u = self.block(k)[i]
                    out[str(i)] = (
                        ("block", k, i, 1)
                        if len(u) > 1
                        else ("split", self._fold(k + 1))
                    )
                return out
            case ("block", k, i, j):
                u = self.block(k)[i]
                nxt = (
                    ("block", k, i, j + 1)
                    if j + 1 < len(u)
                    else ("split", self._fold(k + 1))
                )
                return {u[j]: nxt}
        raise ValueError(f"unknown automaton state {state!r}")

    def is_subtree(self, other: "BlockTree") -> bool:
        """Exact test of self ⊆ other on the finite product automaton."""
        start = (self._start(), other._start())
        seen, queue = {start}, deque([start])
        while queue:
            sq, sp = queue.popleft()
            moves = other._step(sp)
            for letter, nq in self._step(sq).items():
                if letter not in moves:
                    return False
                pair = (nq, moves[letter])
                if pair not in seen:
                    seen.add(pair)
                    queue.append(pair)
        return True


class FiniteTree(BaseModel):
    """A finite downward closed set of words containing ∅."""

    model_config = ConfigDict(frozen=True)

    nodes: tuple[Word, ...] = ("",)

    _set: frozenset = PrivateAttr(default=frozenset())

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, data):
        if not isinstance(data, dict):
            return data
        nodes = set(check_word(w, "node") for w in data.get("nodes", ("",)))
        if "" not in nodes:
            raise ValueError("a finite tree must contain the empty word")
        for w in nodes:
            if w and w[:-1] not in nodes:
                raise ValueError(f"node {w!r} has no parent in the tree")
        return {"nodes": tuple(sorted(nodes, key=length_lex_key))}

    def model_post_init(self, __context) -> None:
        self._set = frozenset(self.nodes)

    @classmethod
    def from_words(cls, words: Iterable[Word]) -> "FiniteTree":
        """Downward closure of the given words."""
        nodes = {""}
        for w in words:
            nodes.update(w[:i] for i in range(len(w) + 1))
        return cls(nodes=nodes)

    @classmethod
    def from_pattern(cls, pattern: str) -> "FiniteTree":
        level = [""]
        nodes = [""]
        for c in pattern:
            level = [w + b for w in level for b in ("01" if c == "*" else c)]
            nodes.extend(level)
        return cls(nodes=nodes)

    def contains(self, s: Word) -> bool:
        return s in self._set

    def __contains__(self, s: Word) -> bool:
        return s in self._set

    @property
    def ht(self) -> int:
        return len(self.nodes[-1])

    def level(self, n: int) -> list[Word]:
        return [w for w in self.nodes if len(w) == n]

    def children(self, s: Word) -> list[Word]:
        return [s + b for b in "01" if s + b in self._set]

    @property
    def leaves(self) -> list[Word]:
        return sorted(w for w in self.nodes if not self.children(w))

    def is_splitting(self, s: Word) -> bool:
        return len(self.children(s)) == 2

    @property
    def splitting_nodes(self) -> list[Word]:
        return [w for w in self.nodes if self.is_splitting(w)]

    def pattern(self) -> Optional[str]:
        """The {0, 1, *} pattern of a uniform tree, or None."""
        out = ""
        for n in range(self.ht):
            kinds = {"".join(c[-1] for c in self.children(w)) for w in self.level(n)}
            if len(kinds) != 1:
                return None
            kind = kinds.pop()
            out += {"01": "*", "0": "0", "1": "1"}.get(kind, "?")
            if "?" in out:
                return None
        return out

    def is_uniform(self) -> bool:
        return self.pattern() is not None

    def to_dot(self, name: str = "tree") -> str:
        lines = [f"digraph {name} {{"]
        for w in self.nodes:
            lines.append(f'  "{w or "∅"}";')
        for w in self.nodes:
            if w:
                lines.append(f'  "{w[:-1] or "∅"}" -> "{w}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


class LazyTree:
    """A tree given by a deterministic membership oracle.

    The oracle must describe a fixed downward closed set of words. Splitting
    searches are bounded and fail loudly.
    """

    def __init__(
        self,
        oracle: Callable[[Word], bool],
        bound: int = DEFAULT_BOUND,
        name: str = "lazy",
    ):
        self._oracle = oracle
        self.bound = bound
        self.name = name

    @classmethod
    def of(cls, tree: Union[BlockTree, FiniteTree, "LazyTree"], bound: int = DEFAULT_BOUND) -> "LazyTree":
        if isinstance(tree, LazyTree):
            return tree
        return cls(tree.contains, bound=bound, name=type(tree).__name__)

    def contains(self, s: Word) -> bool:
        return self._oracle(s)

    def __contains__(self, s: Word) -> bool:
        return self._oracle(s)

    def is_splitting(self, s: Word) -> bool:
        return self.contains(s + "0") and self.contains(s + "1")

    def next_split(self, s: Word, bound: Optional[int] = None) -> Word:
        """The minimal splitting node extending s."""
        limit = bound if bound is not None else self.bound
        if not self.contains(s):
            raise PreconditionError(f"{s!r} is not a node of the tree", node=s)
        while not self.is_splitting(s):
            if len(s) >= limit:
                raise BudgetExceededError(
                    f"no splitting node above {s!r} within depth {limit}",
                    node=s,
                    depth=limit,
                )
            if self.contains(s + "0"):
                s += "0"
            elif self.contains(s + "1"):
                s += "1"
            else:
                raise MalformedInputError(f"tree has a dead end at {s!r}", node=s)
        return s

    def sigma_star(self, sigma: Word, bound: Optional[int] = None) -> Word:
        s = self.next_split("", bound)
        for b in sigma:
            s = self.next_split(s + b, bound)
        return s

    def nodes_at(self, depth: int) -> list[Word]:
        level = [""] if self.contains("") else []
        for _ in range(depth):
            level = [w + b for w in level for b in "01" if self.contains(w + b)]
        return level

    def restrict(self, sigma: Word, bound: Optional[int] = None) -> "LazyTree":
        star = self.sigma_star(sigma, bound)
        return LazyTree(
            lambda s: comparable(s, star) and self.contains(s),
            bound=self.bound,
            name=f"{self.name}*{sigma}",
        )


Tree: TypeAlias = Union[BlockTree, LazyTree]


def as_lazy(p: Union[Tree, FiniteTree], bound: int = DEFAULT_BOUND) -> LazyTree:
    return LazyTree.of(p, bound=bound)


def nodes_at(p: Union[Tree, FiniteTree], depth: int) -> list[Word]:
    if isinstance(p, (BlockTree, LazyTree)):
        return p.nodes_at(depth)
    return p.level(depth)


def sigma_star(p: Tree, sigma: Word, bound: int = DEFAULT_BOUND) -> Word:
    if isinstance(p, BlockTree):
        star = p.node_of_selector(sigma)
        if len(star) > bound:
            raise BudgetExceededError(
                f"splitting node for {sigma!r} lies beyond depth {bound}",
                sigma=sigma,
                depth=bound,
            )
        return star
    return p.sigma_star(sigma, bound)


def splitting_level(p: Tree, n: int, bound: int = DEFAULT_BOUND) -> set[Word]:
    """Lₙ(p) = {σ* : σ ∈ 2ⁿ}."""
    return {sigma_star(p, s, bound) for s in words_of_length(n)}


def restrict_tree(p: Tree, sigma: Word, bound: int = DEFAULT_BOUND) -> Tree:
    if isinstance(p, BlockTree):
        sigma_star(p, sigma, bound)
        return p.restrict(sigma)
    return p.restrict(sigma, bound)


def is_subtree(q: Tree, p: Tree, depth: int = DEFAULT_DEPTH_OUT) -> bool:
    """q ⊆ p; exact for block trees, checked up to depth otherwise."""
    if isinstance(q, BlockTree) and isinstance(p, BlockTree):
        return q.is_subtree(p)
    return all(p.contains(w) for w in nodes_at(q, depth))


def leq_n(q: Tree, p: Tree, n: int, bound: int = DEFAULT_BOUND) -> bool:
    """q ≤ₙ p iff q ⊆ p and Lₙ(q) = Lₙ(p)."""
    lq, lp = splitting_level(q, n, bound), splitting_level(p, n, bound)
    if lq != lp:
        return False
    depth = max(len(w) for w in lq | lp) + 1
    return is_subtree(q, p, depth)


def amalgamate(
    p: Tree,
    sigma: Word,
    r: Tree,
    mirror: bool = True,
    bound: int = DEFAULT_BOUND,
    check_depth: int = DEFAULT_DEPTH_OUT,
) -> Tree:
    """Replace the part of p above σ* by r.

    For block trees the replacement is mirrored to every restriction at
    level |σ|, so the result is again a block tree (and Silver when p and r
    are). Otherwise the literal replacement is returned as a lazy tree.
    """
    if isinstance(p, BlockTree) and isinstance(r, BlockTree) and mirror:
        cone = p.restrict(sigma)
        if r == cone:
            return p
        if not r.is_subtree(cone):
            raise PreconditionError(
                "replacement is not below the restriction", sigma=sigma
            )
        m = len(sigma)
        if m == 0:
            return r
        w = r.stem[len(cone.stem) :]
        head = [p.block(k) for k in range(m - 1)]
        b0, b1 = p.block(m - 1)
        head.append((b0 + w, b1 + w))
        return BlockTree(stem=p.stem, blocks=head + list(r.blocks), tail=r.tail)

    pl, rl = as_lazy(p, bound), as_lazy(r, bound)
    star = sigma_star(pl, sigma, bound)
    cone = pl.restrict(sigma, bound)
    if not rl.contains(star) or not is_subtree(rl, cone, max(check_depth, len(star) + 1)):
        raise PreconditionError(
            "replacement is not below the restriction", sigma=sigma
        )
    return LazyTree(
        lambda s: rl.contains(s) if s.startswith(star) else pl.contains(s),
        bound=bound,
        name="amalgamation",
    )


class FusionSequence:
    """
    A stream of conditions p₀ ≥ p₁ ≥ … with on-demand ≤ₙ certificates.

    Features:
    - Conditions are computed once and cached
    - Certificates p_{n+1} ≤ₙ pₙ are verified lazily and memoized
    - The cache is shared safely between threads
    """

    def __init__(
        self,
        stream: Callable[[int], Tree],
        bound: int = DEFAULT_BOUND,
        logger: Optional[Logger] = None,
    ):
        self._stream = stream
        self.bound = bound
        self.logger = logger
        self._lock = threading.RLock()
        self._conditions: dict[int, Tree] = {}
        self._verified = 0

    @classmethod
    def from_list(cls, conditions: list[Tree], **kwargs) -> "FusionSequence":
        """A sequence that stays constant after its last listed condition."""
        if not conditions:
            raise PreconditionError("a fusion sequence needs at least one condition")
        return cls(lambda n: conditions[min(n, len(conditions) - 1)], **kwargs)

    def condition(self, n: int) -> Tree:
        with self._lock:
            if n not in self._conditions:
                self._conditions[n] = self._stream(n)
            return self._conditions[n]

    def verify(self, upto: int) -> None:
        """Check p_{n+1} ≤ₙ pₙ for all n < upto."""
        with self._lock:
            for n in range(self._verified, upto):
                if not leq_n(self.condition(n + 1), self.condition(n), n, self.bound):
                    if self.logger:
                        self.logger.log_error(f"fusion certificate fails at {n + 1}")
                    raise CertificateViolationError(index=n + 1)
                self._verified = n + 1

    def level_min_length(self, m: int) -> int:
        p = self.condition(m)
        if isinstance(p, BlockTree):
            return p.level_height(m)
        return min(len(w) for w in splitting_level(p, m, self.bound))

    def stable_index(self, length: int) -> int:
        """Least m whose m-th splitting level lies beyond the given length."""
        m = 0
        while self.level_min_length(m) <= length:
            m += 1
        self.verify(m)
        return m


def fusion(seq: FusionSequence, bound: int = DEFAULT_BOUND) -> LazyTree:
    """Lazy membership oracle for the intersection of a fusion sequence."""

    def member(s: Word) -> bool:
        return seq.condition(seq.stable_index(len(s))).contains(s)

    return LazyTree(member, bound=bound, name="fusion")


def branches_subset(p: Tree, A: ClopenSet, bound: int = DEFAULT_BOUND) -> bool:
    """[p] ⊆ A, decided by the nodes of p at depth(A)."""
    if bound < A.depth:
        raise PreconditionError(
            f"bound {bound} is below the clopen depth {A.depth}", bound=bound
        )
    return all(w in A.words for w in nodes_at(p, A.depth))


def silver_law_holds(p: Union[Tree, FiniteTree], depth: int) -> bool:
    """s⌢0⌢x ∈ p iff s⌢1⌢x ∈ p at every splitting node below depth."""
    below: dict[Word, frozenset] = {w: frozenset({""}) for w in nodes_at(p, depth)}
    for _ in range(depth):
        above: dict[Word, dict[str, frozenset]] = {}
        for w, tails in below.items():
            above.setdefault(w[:-1], {})[w[-1]] = tails
        below = {}
        for s, kids in above.items():
            if len(kids) == 2 and kids["0"] != kids["1"]:
                return False
            below[s] = frozenset(b + x for b, tails in kids.items() for x in tails)
    return True


def e0_law_holds(p: Union[Tree, FiniteTree], depth: int) -> bool:
    """Every branch splits at the same coordinates below depth, and the
    segment from a split to the next one depends only on the bit taken.
    """
    if isinstance(p, BlockTree):
        try:
            p.validate_structure()
        except MalformedInputError:
            return False
    nodes = nodes_at(p, depth)
    if not nodes:
        return False
    prefixes = {w[:i] for w in nodes for i in range(depth + 1)}

    def splits(w: Word) -> list[int]:
        return [
            i for i in range(depth) if w[:i] + ("1" if w[i] == "0" else "0") in prefixes
        ]

    coordinates = splits(nodes[0])
    segments: dict[tuple[int, str], Word] = {}
    for w in nodes:
        if splits(w) != coordinates:
            return False
        for c, end in zip(coordinates, coordinates[1:] + [depth]):
            if segments.setdefault((c, w[c]), w[c:end]) != w[c:end]:
                return False
    return True


def is_perfect(p: Tree, depth: int, bound: int = DEFAULT_BOUND) -> bool:
    lazy = as_lazy(p, bound)
    try:
        for w in lazy.nodes_at(depth):
            lazy.next_split(w, depth + bound)
    except (BudgetExceededError, MalformedInputError):
        return False
    return True


def recover_block_tree(p: Tree, depth: int, bound: int = DEFAULT_BOUND) -> BlockTree:
    """Read off the block structure of an E₀-tree along its leftmost branch."""
    lazy = as_lazy(p, bound)
    limit = depth + bound
    s = lazy.next_split("", limit)
    stem, blocks = s, []
    while len(s) < depth:
        t0 = lazy.next_split(s + "0", limit)
        t1 = lazy.next_split(s + "1", limit)
        if len(t0) != len(t1):
            raise MalformedInputError(f"splits above {s!r} have different heights")
        blocks.append((t0[len(s) :], t1[len(s) :]))
        s = t0
    return BlockTree(stem=stem, blocks=blocks)
