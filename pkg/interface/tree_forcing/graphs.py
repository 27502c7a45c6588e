#
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0.
# See the LICENSE file for more information.
#
import itertools
from abc import ABC, abstractmethod
from typing import Any, Callable, Literal, Optional, Sequence

import networkx as nx
from networkx.algorithms.approximation import clique as approx_clique
from pydantic import BaseModel, ConfigDict, model_validator

from .cantor_core import (
    DENSE,
    ClopenSet,
    DenseSequence,
    Point,
    Word,
    check_word,
    enumerate_points,
    words_of_length,
    xor,
)
from .const import (
    DEFAULT_COLORING_BUDGET,
    DEFAULT_PAIR_BUDGET,
    DEFAULT_PROBE_DEPTH,
    LOG_CATEGORY_SEARCH,
    LOG_CATEGORY_VERIFY,
)
from .helper import Logger
from .message import (
    BudgetExceededError,
    EmptyInputError,
    NotFoundError,
    PreconditionError,
)
from .tree_algebra import BlockTree


class EdgeCertificate(BaseModel):
    edge: bool = False
    kind: str = ""
    coordinate: Optional[int] = None  # the single differing coordinate
    box: Optional[tuple[Word, Word]] = None
    agreement_index: Optional[int] = None  # tails agree from here on
    reason: str = ""

    def __bool__(self) -> bool:
        return self.edge


class EdgeWitness(BaseModel):
    x: Point
    y: Point
    certificate: EdgeCertificate


# ============================================================================
# Word maps
# ============================================================================


class WordMap(ABC):
    """A monotone map on words inducing a continuous map on branches."""

    injective: bool = False

    @abstractmethod
    def __call__(self, w: Word) -> Word:
        """Image of a word; images grow with their arguments."""

    @abstractmethod
    def apply_point(self, x: Point) -> Point:
        """Image of an eventually periodic point."""

    def modulus(self, d: int) -> Optional[int]:
        """Input length that determines the first d output bits, if known."""
        return None

    def to_json(self) -> dict[str, Any]:
        return {"kind": "rule"}


class IdentityMap(WordMap):
    injective = True

    def __call__(self, w: Word) -> Word:
        return w

    def apply_point(self, x: Point) -> Point:
        return x

    def modulus(self, d: int) -> Optional[int]:
        return d

    def to_json(self) -> dict[str, Any]:
        return {"kind": "identity"}


class PrefixMap(WordMap):
    """s ↦ prefix⌢s."""

    injective = True

    def __init__(self, prefix: Word):
        self.prefix = check_word(prefix, "prefix")

    def __call__(self, w: Word) -> Word:
        return self.prefix + w

    def apply_point(self, x: Point) -> Point:
        return Point(prefix=self.prefix + x.prefix, period=x.period)

    def modulus(self, d: int) -> Optional[int]:
        return max(0, d - len(self.prefix))

    def to_json(self) -> dict[str, Any]:
        return {"kind": "prefix", "prefix": self.prefix}


class XorMap(WordMap):
    """x ↦ x + t for a fixed word t."""

    injective = True

    def __init__(self, shift: Word):
        self.shift = check_word(shift, "shift")

    def __call__(self, w: Word) -> Word:
        return xor(w, self.shift)[: len(w)]

    def apply_point(self, x: Point) -> Point:
        return xor(x, Point.from_word(self.shift))

    def modulus(self, d: int) -> Optional[int]:
        return d

    def to_json(self) -> dict[str, Any]:
        return {"kind": "xor", "shift": self.shift}


class ConstantMap(WordMap):
    injective = False

    def __init__(self, point: Point):
        self.point = point

    def __call__(self, w: Word) -> Word:
        return self.point.head(len(w))

    def apply_point(self, x: Point) -> Point:
        return self.point

    def modulus(self, d: int) -> Optional[int]:
        return 0

    def to_json(self) -> dict[str, Any]:
        return {"kind": "constant", "point": self.point.model_dump()}


class BranchMap(WordMap):
    """Selector ↦ branch of a block tree."""

    injective = True

    def __init__(self, tree: BlockTree):
        self.tree = tree

    def __call__(self, w: Word) -> Word:
        return self.tree.node_of_selector(w)

    def apply_point(self, x: Point) -> Point:
        return self.tree.branch(x)

    def modulus(self, d: int) -> Optional[int]:
        return self.tree.selector_depth(d)

    def to_json(self) -> dict[str, Any]:
        return {"kind": "branch", "tree": self.tree.model_dump(mode="json")}


class RuleMap(WordMap):
    def __init__(
        self,
        word_rule: Callable[[Word], Word],
        point_rule: Callable[[Point], Point],
        injective: bool = False,
        modulus: Optional[Callable[[int], int]] = None,
    ):
        self._word_rule = word_rule
        self._point_rule = point_rule
        self.injective = injective
        self._modulus = modulus

    def __call__(self, w: Word) -> Word:
        return self._word_rule(w)

    def apply_point(self, x: Point) -> Point:
        return self._point_rule(x)

    def modulus(self, d: int) -> Optional[int]:
        return self._modulus(d) if self._modulus else None


# ============================================================================
# Finite graphs
# ============================================================================


class FiniteGraph:
    """A graph on all words of length n."""

    def __init__(self, n: int, edges: Sequence[tuple[Word, Word]] = ()):
        self.n = n
        self.graph = nx.Graph()
        self.graph.add_nodes_from(words_of_length(n))
        for u, v in edges:
            if u == v:
                raise PreconditionError(f"self loop at {u!r} in a finite graph")
            self.graph.add_edge(u, v)

    @property
    def vertices(self) -> list[Word]:
        return sorted(self.graph.nodes())

    @property
    def edges(self) -> list[tuple[Word, Word]]:
        return sorted(tuple(sorted(e)) for e in self.graph.edges())

    @property
    def edge_count(self) -> int:
        return self.graph.number_of_edges()

    def adjacent(self, u: Word, v: Word) -> bool:
        return self.graph.has_edge(u, v)

    def is_forest(self) -> bool:
        return nx.is_forest(self.graph)

    def is_connected(self) -> bool:
        return nx.is_connected(self.graph)

    def is_bipartite(self) -> bool:
        return nx.is_bipartite(self.graph)

    def components(self) -> list[list[Word]]:
        return sorted(sorted(c) for c in nx.connected_components(self.graph))

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "vertices": self.vertices,
            "edges": [list(e) for e in self.edges],
        }

    def to_dot(self, coloring: Optional[dict[Word, int]] = None) -> str:
        lines = [f"graph restriction_{self.n} {{"]
        for v in self.vertices:
            label = v or "∅"
            if coloring is not None:
                lines.append(f'  "{label}" [color={coloring[v]}];')
            else:
                lines.append(f'  "{label}";')
        for u, v in self.edges:
            lines.append(f'  "{u or "∅"}" -- "{v or "∅"}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


# ============================================================================
# Graph specifications
# ============================================================================


class ClopenGraph(BaseModel):
    """A symmetric union of boxes [u]×[v] with u ≠ v at one depth."""

    model_config = ConfigDict(frozen=True)

    depth: int = 0
    boxes: tuple[tuple[Word, Word], ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, data):
        if not isinstance(data, dict):
            return data
        depth = data.get("depth", 0)
        if not isinstance(depth, int) or depth < 0:
            raise ValueError(f"depth must be a non-negative integer, got {depth!r}")
        boxes = set()
        for box in data.get("boxes", ()):
            if len(box) != 2:
                raise ValueError(f"a box is a pair of words, got {box!r}")
            u, v = check_word(box[0]), check_word(box[1])
            if len(u) != depth or len(v) != depth:
                raise ValueError(f"box {box!r} is not at depth {depth}")
            if u == v:
                raise ValueError(f"box {box!r} would make the graph reflexive")
            boxes.add((min(u, v), max(u, v)))
        return {"depth": depth, "boxes": tuple(sorted(boxes))}

    @classmethod
    def complete(cls, depth: int) -> "ClopenGraph":
        words = list(words_of_length(depth))
        return cls(depth=depth, boxes=list(itertools.combinations(words, 2)))

    @classmethod
    def empty(cls, depth: int = 1) -> "ClopenGraph":
        return cls(depth=depth, boxes=[])

    def has(self, u: Word, v: Word) -> bool:
        return (min(u, v), max(u, v)) in self.boxes


class GraphSpec(ABC):
    """Edge oracle for a graph on eventually periodic points."""

    kind: str = ""

    @abstractmethod
    def edge(self, x: Point, y: Point) -> EdgeCertificate:
        pass

    def resolution(self) -> Optional[int]:
        """Depth at which word prefixes decide adjacency, if any."""
        return None

    def words_adjacent(self, a: Word, b: Word) -> bool:
        """[a]×[b] ⊆ G for words at least as long as the resolution."""
        raise PreconditionError(f"{self.kind} graph has no clopen resolution")

    def restrict(self, n: int) -> FiniteGraph:
        """Edges among the points w⌢0̄ for w ∈ 2ⁿ."""
        words = list(words_of_length(n))
        edges = [
            (u, v)
            for u, v in itertools.combinations(words, 2)
            if self.edge(Point.from_word(u), Point.from_word(v))
        ]
        return FiniteGraph(n, edges)

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind}


class G0Graph(GraphSpec):
    kind = "g0"

    def __init__(self, dense: DenseSequence = DENSE):
        self.dense = dense

    def edge(self, x: Point, y: Point) -> EdgeCertificate:
        diffs = x.differences(y)
        if diffs is None or len(diffs) != 1:
            return EdgeCertificate(kind=self.kind, reason="not a single difference")
        k = diffs[0]
        if x.head(k) != self.dense(k):
            return EdgeCertificate(
                kind=self.kind, coordinate=k, reason=f"prefix is not s_{k}"
            )
        return EdgeCertificate(edge=True, kind=self.kind, coordinate=k)

    def restrict(self, n: int) -> FiniteGraph:
        edges = []
        for k in range(n):
            s = self.dense(k)
            for x in words_of_length(n - k - 1):
                edges.append((s + "0" + x, s + "1" + x))
        return FiniteGraph(n, edges)


class G1Graph(GraphSpec):
    kind = "g1"

    def edge(self, x: Point, y: Point) -> EdgeCertificate:
        diffs = x.differences(y)
        if diffs is None or len(diffs) != 1:
            return EdgeCertificate(kind=self.kind, reason="not a single difference")
        return EdgeCertificate(edge=True, kind=self.kind, coordinate=diffs[0])

    def restrict(self, n: int) -> FiniteGraph:
        edges = []
        for w in words_of_length(n):
            for k in range(n):
                if w[k] == "0":
                    edges.append((w, w[:k] + "1" + w[k + 1 :]))
        return FiniteGraph(n, edges)


class E0Relation(GraphSpec):
    """Eventual agreement; on finite words every pair of distinct words is related."""

    kind = "e0"

    def edge(self, x: Point, y: Point) -> EdgeCertificate:
        if x == y:
            return EdgeCertificate(kind=self.kind, reason="equal points")
        index = x.agreement_index(y)
        if index is None:
            return EdgeCertificate(kind=self.kind, reason="tails never agree")
        return EdgeCertificate(edge=True, kind=self.kind, agreement_index=index)

    def restrict(self, n: int) -> FiniteGraph:
        return FiniteGraph(n, list(itertools.combinations(words_of_length(n), 2)))


class BoxGraph(GraphSpec):
    kind = "boxes"

    def __init__(self, graph: ClopenGraph):
        self.graph = graph

    def resolution(self) -> Optional[int]:
        return self.graph.depth

    def words_adjacent(self, a: Word, b: Word) -> bool:
        d = self.graph.depth
        if len(a) < d or len(b) < d:
            raise PreconditionError(f"words must have length at least {d}")
        return self.graph.has(a[:d], b[:d])

    def edge(self, x: Point, y: Point) -> EdgeCertificate:
        d = self.graph.depth
        a, b = x.head(d), y.head(d)
        if self.graph.has(a, b):
            return EdgeCertificate(edge=True, kind=self.kind, box=(a, b))
        return EdgeCertificate(kind=self.kind, reason="no box contains the pair")

    def restrict(self, n: int) -> FiniteGraph:
        d = self.graph.depth
        if n < d:
            raise PreconditionError(
                f"cannot restrict a depth {d} box graph to depth {n}", depth=d, n=n
            )
        tails = list(words_of_length(n - d))
        edges = [
            (u + x, v + y) for u, v in self.graph.boxes for x in tails for y in tails
        ]
        return FiniteGraph(n, edges)

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "depth": self.graph.depth,
            "boxes": [list(b) for b in self.graph.boxes],
        }


class PullbackGraph(GraphSpec):
    """f*[G]: (x, y) is an edge iff (f(x), f(y)) is a G-edge."""

    kind = "pullback"

    def __init__(self, f: WordMap, base: GraphSpec):
        self.f = f
        self.base = base

    def edge(self, x: Point, y: Point) -> EdgeCertificate:
        cert = self.base.edge(self.f.apply_point(x), self.f.apply_point(y))
        return cert.model_copy(update={"kind": f"{self.kind}:{cert.kind}"})

    def resolution(self) -> Optional[int]:
        d = self.base.resolution()
        if d is None:
            return None
        return self.f.modulus(d)

    def words_adjacent(self, a: Word, b: Word) -> bool:
        d = self.base.resolution()
        if d is None:
            return super().words_adjacent(a, b)
        fa, fb = self.f(a), self.f(b)
        if len(fa) < d or len(fb) < d:
            raise PreconditionError(f"images of {a!r}, {b!r} are shorter than {d}")
        return self.base.words_adjacent(fa[:d], fb[:d])

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "map": self.f.to_json(), "graph": self.base.to_json()}


def as_graph(G: "GraphSpec | ClopenGraph") -> GraphSpec:
    return BoxGraph(G) if isinstance(G, ClopenGraph) else G


def edge(G: GraphSpec, x: Point, y: Point) -> EdgeCertificate:
    return as_graph(G).edge(x, y)


def restrict(G: GraphSpec, n: int) -> FiniteGraph:
    return as_graph(G).restrict(n)


def pullback(f: WordMap, G: GraphSpec) -> PullbackGraph:
    if not f.injective:
        raise PreconditionError("pull-back needs an injective map")
    return PullbackGraph(f, as_graph(G))


# ============================================================================
# Exact chromatic number
# ============================================================================


class ColoringResult(BaseModel):
    chromatic_number: int = 0
    coloring: dict[str, int] = {}
    lower_bound: int = 0
    upper_bound: int = 0
    nodes_explored: int = 0
    method: str = ""


def _k_coloring(
    graph: nx.Graph, k: int, budget: int, explored: list[int]
) -> Optional[dict[Word, int]]:
    """Exact k-coloring by DSATUR-ordered backtracking, or None."""
    adj = {v: sorted(graph.neighbors(v)) for v in graph.nodes()}
    order = sorted(adj)
    counts = {v: [0] * k for v in adj}
    colors: dict[Word, int] = {}

    def assign(v: Word, c: int, delta: int) -> None:
        for n in adj[v]:
            counts[n][c] += delta

    def select() -> Word:
        best, best_key = None, None
        for v in order:
            if v in colors:
                continue
            key = (sum(1 for c in counts[v] if c), len(adj[v]))
            if best_key is None or key > best_key:
                best, best_key = v, key
        return best

    stack: list[list] = []
    while len(colors) < len(order):
        v = select()
        top = max(colors.values(), default=-1)
        candidates = [c for c in range(min(k, top + 2)) if counts[v][c] == 0]
        stack.append([v, candidates, 0])
        while stack:
            frame = stack[-1]
            v, candidates, i = frame
            if v in colors:
                assign(v, colors.pop(v), -1)
            if i >= len(candidates):
                stack.pop()
                continue
            frame[2] = i + 1
            colors[v] = candidates[i]
            assign(v, candidates[i], 1)
            explored[0] += 1
            if explored[0] > budget:
                raise BudgetExceededError(
                    f"coloring search exceeded {budget} nodes", nodes=explored[0]
                )
            break
        else:
            return None
    return dict(colors)


def verify_coloring(F: FiniteGraph, coloring: dict[Word, int]) -> bool:
    return all(v in coloring for v in F.vertices) and all(
        coloring[u] != coloring[v] for u, v in F.edges
    )


def chromatic_number(
    F: FiniteGraph,
    budget: int = DEFAULT_COLORING_BUDGET,
    logger: Optional[Logger] = None,
) -> ColoringResult:
    """Exact chromatic number with a verified witness coloring.

    Args:
        F: the finite graph to color.
        budget: maximal number of backtracking nodes.
        logger: optional logger for search progress.

    Returns:
        ColoringResult: the chromatic number, a coloring, and the bounds.
    """
    graph = F.graph
    if F.edge_count == 0:
        result = ColoringResult(
            chromatic_number=1,
            coloring={v: 0 for v in F.vertices},
            lower_bound=1,
            upper_bound=1,
            method="edgeless",
        )
    elif nx.is_bipartite(graph):
        coloring = {v: 0 for v in F.vertices}
        coloring.update(nx.bipartite.color(graph))
        result = ColoringResult(
            chromatic_number=2,
            coloring=coloring,
            lower_bound=2,
            upper_bound=2,
            method="bipartite",
        )
    else:
        greedy = nx.greedy_color(graph, strategy="saturation_largest_first")
        upper = max(greedy.values()) + 1
        lower = max(3, len(approx_clique.max_clique(graph)))
        if logger:
            logger.log_info(
                f"coloring bounds {lower}..{upper} on {len(greedy)} vertices",
                LOG_CATEGORY_SEARCH,
            )
        explored = [0]
        best, best_k = greedy, upper
        for k in range(lower, upper):
            try:
                found = _k_coloring(graph, k, budget, explored)
            except BudgetExceededError as e:
                raise BudgetExceededError(
                    f"coloring search exceeded {budget} nodes",
                    lower=k,
                    upper=upper,
                    nodes=explored[0],
                ) from e
            if found is not None:
                best, best_k = found, k
                break
        result = ColoringResult(
            chromatic_number=best_k,
            coloring=best,
            lower_bound=best_k,
            upper_bound=best_k,
            nodes_explored=explored[0],
            method="dsatur-backtracking",
        )
    if not verify_coloring(F, result.coloring):
        raise RuntimeError("witness coloring failed verification")
    if logger:
        logger.log_info(
            f"chromatic number {result.chromatic_number} verified", LOG_CATEGORY_VERIFY
        )
    return result


# ============================================================================
# Clopen independence, homomorphisms, Ramsey search
# ============================================================================


def clopen_independence_witness(
    G: GraphSpec,
    A: ClopenSet,
    probe_depth: int = DEFAULT_PROBE_DEPTH,
    logger: Optional[Logger] = None,
) -> Optional[EdgeWitness]:
    """An edge of G inside a nonempty clopen set, or None if the probe fails."""
    G = as_graph(G)
    if A.is_empty():
        raise EmptyInputError("no edge can lie inside an empty set", depth=A.depth)
    if probe_depth < A.depth:
        raise PreconditionError(
            f"probe depth {probe_depth} is below the set depth {A.depth}"
        )
    u = A.words[0]
    pair: Optional[tuple[Word, Word]] = None
    if isinstance(G, G0Graph):
        k = G.dense.first_extension(u, start=len(u))
        s = G.dense(k)
        pair = (s + "0", s + "1")
    elif isinstance(G, (G1Graph, E0Relation)):
        pair = (u + "0", u + "1")
    elif G.resolution() is not None:
        m = max(G.resolution(), A.depth)
        if m <= probe_depth:
            members = [w for w in words_of_length(m) if A.contains(w)]
            pair = next(
                ((a, b) for a, b in itertools.combinations(members, 2)
                 if G.words_adjacent(a, b)),
                None,
            )
    else:
        for m in range(A.depth, probe_depth + 1):
            members = [w for w in words_of_length(m) if A.contains(w)]
            pair = next(
                ((a, b) for a, b in itertools.combinations(members, 2)
                 if G.edge(Point.from_word(a), Point.from_word(b))),
                None,
            )
            if pair:
                break
    if pair is None:
        if logger:
            logger.log_info(f"no edge inside the set up to depth {probe_depth}", LOG_CATEGORY_SEARCH)
        return None
    x, y = Point.from_word(pair[0]), Point.from_word(pair[1])
    cert = G.edge(x, y)
    if not cert or not (A.contains(x) and A.contains(y)):
        raise RuntimeError(f"edge witness {pair} failed verification")
    return EdgeWitness(x=x, y=y, certificate=cert)


class HomomorphismReport(BaseModel):
    holds: bool = True
    checked_pairs: int = 0
    checked_edges: int = 0
    counterexample: Optional[tuple[Point, Point]] = None


def check_homomorphism(
    phi: WordMap,
    G: GraphSpec,
    H: GraphSpec,
    depth: int,
    budget: int = DEFAULT_PAIR_BUDGET,
) -> HomomorphismReport:
    """Check that phi maps G-edges among small points to H-edges."""
    G, H = as_graph(G), as_graph(H)
    points = enumerate_points(depth)
    pairs = len(points) * (len(points) - 1) // 2
    if pairs > budget:
        raise BudgetExceededError(
            f"{pairs} point pairs at depth {depth} exceed the budget {budget}",
            pairs=pairs,
            depth=depth,
        )
    report = HomomorphismReport()
    for x, y in itertools.combinations(points, 2):
        report.checked_pairs += 1
        if not G.edge(x, y):
            continue
        report.checked_edges += 1
        if not H.edge(phi.apply_point(x), phi.apply_point(y)):
            report.holds = False
            report.counterexample = (x, y)
            break
    return report


class RamseyResult(BaseModel):
    kind: Literal["cycle", "independent"]
    points: list[Point]


def find_cycle(points: Sequence[Point], adjacent: Callable[[int, int], bool]) -> Optional[list[int]]:
    """Indices of a 4-cycle in cyclic order, or None."""
    for quad in itertools.combinations(range(len(points)), 4):
        a, b, c, d = quad
        for order in ((a, b, c, d), (a, b, d, c), (a, c, b, d)):
            if all(adjacent(order[i], order[(i + 1) % 4]) for i in range(4)):
                return list(order)
    return None


def ramsey_find(points: Sequence[Point], G: GraphSpec) -> RamseyResult:
    """A verified 4-cycle or independent 4-set among the given points."""
    G = as_graph(G)
    if len(set(points)) != len(points):
        raise PreconditionError("points must be pairwise distinct")
    n = len(points)
    adj = [[False] * n for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        adj[i][j] = adj[j][i] = bool(G.edge(points[i], points[j]))
    cycle = find_cycle(points, lambda i, j: adj[i][j])
    if cycle is not None:
        return RamseyResult(kind="cycle", points=[points[i] for i in cycle])
    for quad in itertools.combinations(range(n), 4):
        if not any(adj[i][j] for i, j in itertools.combinations(quad, 2)):
            return RamseyResult(kind="independent", points=[points[i] for i in quad])
    raise NotFoundError(
        f"neither a 4-cycle nor an independent 4-set among {n} points", points=n
    )
