#
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0.
# See the LICENSE file for more information.
#
import itertools
import math
import os
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Literal, Optional, TypeAlias, Union

from pydantic import BaseModel, ConfigDict, model_validator

from .message import BudgetExceededError, EmptyInputError, PreconditionError

Word: TypeAlias = str
"""A finite binary word, written as a string over '0' and '1'."""

ClopenOp: TypeAlias = Literal["union", "intersect", "minus", "shift"]


def check_word(w: str, what: str = "word") -> str:
    if not isinstance(w, str) or any(c not in "01" for c in w):
        raise ValueError(f"{what} must be a string over 0/1, got {w!r}")
    return w


def extends(a: Word, b: Word) -> bool:
    """True iff a ⊇ b, i.e. b is an initial segment of a."""
    return a.startswith(b)


def comparable(a: Word, b: Word) -> bool:
    return a.startswith(b) or b.startswith(a)


def length_lex_key(w: Word) -> tuple[int, str]:
    return (len(w), w)


def words_of_length(n: int) -> Iterator[Word]:
    """All words of length n in lexicographic order."""
    for bits in itertools.product("01", repeat=n):
        yield "".join(bits)


def words_up_to(n: int) -> Iterator[Word]:
    """All words of length at most n in length-lex order."""
    for m in range(n + 1):
        yield from words_of_length(m)


def word_xor(a: Word, b: Word) -> Word:
    n = max(len(a), len(b))
    a, b = a.ljust(n, "0"), b.ljust(n, "0")
    return "".join("1" if x != y else "0" for x, y in zip(a, b))


def _primitive_root(w: str) -> str:
    n = len(w)
    for d in range(1, n + 1):
        if n % d == 0 and w[:d] * (n // d) == w:
            return w[:d]
    return w


class Point(BaseModel):
    """An eventually periodic point prefix⌢period^ω of Cantor space.

    Points are kept in canonical form (primitive period, shortest prefix),
    so equality of models is equality of the denoted sequences.
    """

    model_config = ConfigDict(frozen=True)

    prefix: Word = ""
    period: Word = "0"

    @model_validator(mode="before")
    @classmethod
    def _canonicalize(cls, data):
        if not isinstance(data, dict):
            return data
        prefix = check_word(data.get("prefix", ""), "prefix")
        period = check_word(data.get("period", "0"), "period")
        if not period:
            raise ValueError("period must be nonempty")
        period = _primitive_root(period)
        while prefix and prefix[-1] == period[-1]:
            prefix = prefix[:-1]
            period = period[-1] + period[:-1]
        return {"prefix": prefix, "period": period}

    @classmethod
    def from_word(cls, w: Word) -> "Point":
        """The branch w⌢0̄."""
        return cls(prefix=w, period="0")

    def bit(self, n: int) -> str:
        if n < len(self.prefix):
            return self.prefix[n]
        return self.period[(n - len(self.prefix)) % len(self.period)]

    def head(self, n: int) -> Word:
        """The initial segment x↾n."""
        if n <= len(self.prefix):
            return self.prefix[:n]
        return "".join(self.bit(i) for i in range(n))

    def extends(self, w: Word) -> bool:
        return self.head(len(w)) == w

    def flip(self, n: int) -> "Point":
        flipped = "1" if self.bit(n) == "0" else "0"
        if n < len(self.prefix):
            prefix = self.prefix[:n] + flipped + self.prefix[n + 1 :]
            return Point(prefix=prefix, period=self.period)
        r = (n + 1 - len(self.prefix)) % len(self.period)
        return Point(
            prefix=self.head(n) + flipped,
            period=self.period[r:] + self.period[:r],
        )

    def horizon(self, other: "Point") -> tuple[int, int]:
        """(start, length) of a window after which both points are periodic."""
        return (
            max(len(self.prefix), len(other.prefix)),
            math.lcm(len(self.period), len(other.period)),
        )

    def differences(self, other: "Point") -> Optional[list[int]]:
        """Coordinates where the points differ, or None if there are infinitely many."""
        start, length = self.horizon(other)
        if any(self.bit(i) != other.bit(i) for i in range(start, start + length)):
            return None
        return [i for i in range(start) if self.bit(i) != other.bit(i)]

    def agreement_index(self, other: "Point") -> Optional[int]:
        """Least N such that the points agree from N on, or None."""
        diffs = self.differences(other)
        if diffs is None:
            return None
        return diffs[-1] + 1 if diffs else 0

    def __str__(self) -> str:
        return f"{self.prefix}({self.period})"


def unit(n: int) -> Point:
    """The shift vector 1ₙ, the characteristic function of {n}."""
    return Point(prefix="0" * n + "1", period="0")


def as_point(x: Union[Word, Point]) -> Point:
    return x if isinstance(x, Point) else Point.from_word(x)


def xor(a: Union[Word, Point], b: Union[Word, Point]) -> Union[Word, Point]:
    """Coordinatewise sum mod 2.

    Two words are zero-padded to a common length. As soon as one argument
    is a Point the words are read as branches w⌢0̄ and the result is a Point.
    """
    if isinstance(a, str) and isinstance(b, str):
        return word_xor(a, b)
    x, y = as_point(a), as_point(b)
    start, length = x.horizon(y)
    bits = "".join(
        "1" if x.bit(i) != y.bit(i) else "0" for i in range(start + length)
    )
    return Point(prefix=bits[:start], period=bits[start:])


def enumerate_points(max_size: int) -> list[Point]:
    """Canonical points with |prefix| + |period| ≤ max_size.

    Sorted by presentation size, then prefix, then period.
    """
    seen: set[Point] = set()
    result: list[Point] = []
    for size in range(1, max_size + 1):
        for plen in range(size):
            for prefix in words_of_length(plen):
                for period in words_of_length(size - plen):
                    p = Point(prefix=prefix, period=period)
                    if p.prefix != prefix or p.period != period or p in seen:
                        continue
                    seen.add(p)
                    result.append(p)
    return result


@lru_cache(maxsize=4096)
def length_lex_word(k: int) -> Word:
    """The k-th word in the length-lex enumeration e₀ = ∅, e₁ = 0, e₂ = 1, e₃ = 00, …"""
    if k < 0:
        raise ValueError(f"index must be non-negative, got {k}")
    level = (k + 1).bit_length() - 1
    if level == 0:
        return ""
    return format(k - (2**level - 1), f"0{level}b")


def length_lex_index(w: Word) -> int:
    return 2 ** len(w) - 1 + (int(w, 2) if w else 0)


def canonical_dense_word(k: int) -> Word:
    e = length_lex_word(k)
    return e + "0" * (k - len(e))


class DenseSequence:
    """A sequence (sₖ) with |sₖ| = k that extends every word somewhere.

    The default rule pads the k-th length-lex word with zeros. Another
    rule can be injected for experiments; lookups on an injected rule
    fall back to a bounded linear scan.
    """

    def __init__(self, rule: Optional[Callable[[int], Word]] = None):
        self.rule = rule
        self._cache: dict[int, Word] = {}

    @property
    def canonical(self) -> bool:
        return self.rule is None

    def __call__(self, k: int) -> Word:
        if k < 0:
            raise ValueError(f"index must be non-negative, got {k}")
        if self.rule is None:
            return canonical_dense_word(k)
        word = self._cache.get(k)
        if word is None:
            word = check_word(self.rule(k), "dense sequence value")
            if len(word) != k:
                raise ValueError(f"rule returned a word of length {len(word)} at {k}")
            self._cache[k] = word
        return word

    def first_extension(
        self, s: Word, start: int = 0, bound: Optional[int] = None
    ) -> int:
        """Least k ≥ start with sₖ ⊇ s."""
        start = max(start, len(s))
        if self.rule is None:
            return self._first_canonical_extension(s, start)
        stop = bound if bound is not None else start + 2 ** 16
        for k in range(start, stop + 1):
            if self(k).startswith(s):
                return k
        raise BudgetExceededError(
            f"no dense word extends {s!r} below index {stop}", word=s, bound=stop
        )

    @staticmethod
    def _first_canonical_extension(s: Word, start: int) -> int:
        level = (start + 1).bit_length() - 1
        while True:
            if level < len(s):
                if not s[level:].strip("0"):
                    k = length_lex_index(s[:level])
                    if k >= start:
                        return k
            else:
                width = 2 ** (level - len(s))
                base = 2**level - 1 + (int(s, 2) if s else 0) * width
                k = max(base, start)
                if k < base + width:
                    return k
            level += 1

    def index_of(self, w: Word) -> int:
        """Position of w in the length-lex enumeration."""
        return length_lex_index(check_word(w))


DENSE = DenseSequence()


def dense_seq(k: int) -> Word:
    return DENSE(k)


class ClopenSet(BaseModel):
    """A finite union of cylinders [w], all words at one depth."""

    model_config = ConfigDict(frozen=True)

    depth: int = 0
    words: tuple[Word, ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, data):
        if not isinstance(data, dict):
            return data
        depth = data.get("depth", 0)
        if not isinstance(depth, int) or depth < 0:
            raise ValueError(f"depth must be a non-negative integer, got {depth!r}")
        words = data.get("words", ())
        for w in words:
            check_word(w)
            if len(w) != depth:
                raise ValueError(f"word {w!r} does not have length {depth}")
        return {"depth": depth, "words": tuple(sorted(set(words)))}

    @classmethod
    def full(cls, depth: int = 0) -> "ClopenSet":
        return cls(depth=depth, words=list(words_of_length(depth)))

    @classmethod
    def empty(cls, depth: int = 0) -> "ClopenSet":
        return cls(depth=depth, words=[])

    @classmethod
    def cylinder(cls, u: Word) -> "ClopenSet":
        return cls(depth=len(u), words=[u])

    def is_empty(self) -> bool:
        return not self.words

    def __len__(self) -> int:
        return len(self.words)

    def contains(self, x: Union[Point, Word]) -> bool:
        """Membership of a point, or inclusion [x] ⊆ A for a word."""
        if isinstance(x, Point):
            return x.head(self.depth) in self.words
        if len(x) >= self.depth:
            return x[: self.depth] in self.words
        below = sum(1 for u in self.words if u.startswith(x))
        return below == 2 ** (self.depth - len(x))

    def meets(self, w: Word) -> bool:
        """True iff [w] ∩ A is nonempty."""
        if len(w) >= self.depth:
            return w[: self.depth] in self.words
        return any(u.startswith(w) for u in self.words)

    def refine(self, depth: int) -> "ClopenSet":
        if depth < self.depth:
            raise PreconditionError(
                f"cannot refine depth {self.depth} down to {depth}",
                depth=self.depth,
                target=depth,
            )
        if depth == self.depth:
            return self
        tails = list(words_of_length(depth - self.depth))
        return ClopenSet(depth=depth, words=[w + v for w in self.words for v in tails])

    def _aligned(self, other: "ClopenSet") -> tuple[set[Word], set[Word], int]:
        d = max(self.depth, other.depth)
        return set(self.refine(d).words), set(other.refine(d).words), d

    def union(self, other: "ClopenSet") -> "ClopenSet":
        a, b, d = self._aligned(other)
        return ClopenSet(depth=d, words=a | b)

    def intersect(self, other: "ClopenSet") -> "ClopenSet":
        # the deeper side is filtered, the shallower one is never refined
        deep, shallow = (self, other) if self.depth >= other.depth else (other, self)
        return ClopenSet(
            depth=deep.depth, words=[w for w in deep.words if shallow.contains(w)]
        )

    def minus(self, other: "ClopenSet") -> "ClopenSet":
        if self.depth >= other.depth:
            return ClopenSet(
                depth=self.depth,
                words=[w for w in self.words if not other.contains(w)],
            )
        a, b, d = self._aligned(other)
        return ClopenSet(depth=d, words=a - b)

    def shift(self, t: Union[Word, Point]) -> "ClopenSet":
        """A + t for a word t, or for a finitely supported point such as 1ₙ."""
        if isinstance(t, Point):
            if t.period != "0":
                raise PreconditionError(
                    "shift must flip finitely many coordinates", shift=str(t)
                )
            t = t.prefix
        refined = self.refine(max(self.depth, len(t)))
        return ClopenSet(
            depth=refined.depth, words=[word_xor(w, t) for w in refined.words]
        )

    def is_subset(self, other: "ClopenSet") -> bool:
        return all(other.contains(w) for w in self.words)

    def equivalent(self, other: "ClopenSet") -> bool:
        return self.is_subset(other) and other.is_subset(self)


def refine(A: ClopenSet, depth: int) -> ClopenSet:
    return A.refine(depth)


def stem_of(A: ClopenSet) -> Word:
    """Longest word extended by every member word of A."""
    if A.is_empty():
        raise EmptyInputError("stem of an empty clopen set", depth=A.depth)
    return os.path.commonprefix(list(A.words))


def clopen_algebra(
    A: ClopenSet,
    B: Optional[ClopenSet] = None,
    op: ClopenOp = "union",
    shift: Union[Word, Point, None] = None,
) -> ClopenSet:
    if op == "shift":
        if shift is None:
            raise PreconditionError("shift operation needs a shift vector")
        return A.shift(shift)
    if B is None:
        raise PreconditionError(f"operation {op} needs two operands")
    match op:
        case "union":
            return A.union(B)
        case "intersect":
            return A.intersect(B)
        case "minus":
            return A.minus(B)
    raise PreconditionError(f"unknown clopen operation {op!r}")


def clopen_from_cylinders(words: Iterable[Word]) -> ClopenSet:
    """The union of cylinders of possibly different lengths."""
    words = list(words)
    depth = max((len(w) for w in words), default=0)
    result = ClopenSet.empty(depth)
    for w in words:
        result = result.union(ClopenSet.cylinder(w))
    return result
