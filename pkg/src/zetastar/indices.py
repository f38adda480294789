"""Admissible index types and their total order.

A :class:`Composition` is a finite admissible exponent tuple
(k1,...,kr) with k1 >= 2 and k_i >= 1.  A :class:`TailedIndex` appends an
infinite constant tail (or none) and is the argument type of the
evaluators.  The order implemented by :func:`index_compare` is the one
under which larger indices have larger zeta-star values: a proper
extension is larger, and at the first differing position the smaller
entry wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import InvalidIndex, NotInDomain

__all__ = [
    "Composition",
    "ConstTail",
    "NO_TAIL",
    "NoTail",
    "TailedIndex",
    "canonical_form",
    "index_compare",
    "make_composition",
]


@dataclass(frozen=True)
class Composition:
    """Finite admissible index (k1,...,kr), k1 >= 2, k_i >= 1, r >= 1."""

    parts: tuple[int, ...]

    def __post_init__(self):
        if not self.parts:
            raise InvalidIndex("empty index")
        if self.parts[0] < 2:
            raise InvalidIndex(f"first entry must be >= 2, got {self.parts[0]}")
        for k in self.parts[1:]:
            if k < 1:
                raise InvalidIndex(f"entries must be >= 1, got {k}")

    @property
    def depth(self) -> int:
        return len(self.parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def extend(self, k: int) -> "Composition":
        return Composition(self.parts + (k,))

    def __iter__(self):
        return iter(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(str(k) for k in self.parts) + ")"


def make_composition(parts: Iterable[int]) -> Composition:
    """Validate and build a Composition; raises InvalidIndex otherwise."""
    return Composition(tuple(int(k) for k in parts))


@dataclass(frozen=True)
class ConstTail:
    """Infinite constant tail {q}^inf appended to a prefix."""

    q: int

    def __post_init__(self):
        if self.q < 1:
            raise InvalidIndex(f"tail exponent must be >= 1, got {self.q}")

    def __str__(self) -> str:
        return f"{{{self.q}}}^inf"


class NoTail:
    """Marker for a plain finite index."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NoTail"

    def __str__(self) -> str:
        return "finite"


NO_TAIL = NoTail()


@dataclass(frozen=True)
class TailedIndex:
    """A prefix Composition plus an optional constant infinite tail."""

    prefix: Composition
    tail: ConstTail | NoTail = NO_TAIL

    @property
    def is_finite(self) -> bool:
        return isinstance(self.tail, NoTail)

    def __str__(self) -> str:
        if self.is_finite:
            return str(self.prefix)
        return f"({','.join(str(k) for k in self.prefix)},{self.tail})"


def index_compare(a: Composition, b: Composition) -> int:
    """Total order on finite indices: +1 if a > b, -1 if b > a, 0 if equal.

    Rule 1: a proper extension is larger than its prefix.  Rule 2: at the
    first differing position, the index with the smaller entry is larger.
    """
    for ka, kb in zip(a.parts, b.parts):
        if ka != kb:
            return 1 if ka < kb else -1
    if len(a.parts) == len(b.parts):
        return 0
    return 1 if len(a.parts) > len(b.parts) else -1


def canonical_form(t: TailedIndex) -> TailedIndex:
    """Normalize a TailedIndex to its unique admissible-sequence form.

    A ones-tail absorbs any trailing 1's of the prefix: (p,1,{1}^inf) and
    (p,{1}^inf) denote the same sequence, so the trailing 1's are dropped.
    Raises NotInDomain for the excluded (2,{1}^inf) pattern, whose value
    diverges and which the admissible set leaves out.
    """
    if t.is_finite or t.tail.q != 1:
        return t
    parts = list(t.prefix.parts)
    while len(parts) > 1 and parts[-1] == 1:
        parts.pop()
    if parts == [2]:
        raise NotInDomain("(2,{1}^inf) is not an admissible sequence")
    return TailedIndex(Composition(tuple(parts)), ConstTail(1))
