"""Finite loops stored as Latin squares, their translations and deviation maps."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import (
    EntryOutOfRange,
    IndexOutOfRange,
    LoopModError,
    NoIdentity,
    NotLatin,
    NotSquare,
    Unsupported,
)

LEFT = "left"
RIGHT = "right"
SIDES = (LEFT, RIGHT)

# (n-1)! relabelings; 720 at n = 7
MAX_CANONICAL_ORDER = 7


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise LoopModError(f"not a bijection of [0, {len(self.images)}): {self.images}")

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __getitem__(self, x: int) -> int:
        return self.images[x]

    def __iter__(self):
        return iter(self.images)

    def compose(self, other: Permutation) -> Permutation:
        """``self ∘ other``: apply ``other`` first."""
        if len(other) != len(self):
            raise LoopModError("cannot compose permutations of different sizes")
        mine = self.images
        return Permutation(tuple(mine[y] for y in other.images))

    def __mul__(self, other: Permutation) -> Permutation:
        return self.compose(other)

    def inverse(self) -> Permutation:
        inv = [0] * len(self.images)
        for x, y in enumerate(self.images):
            inv[y] = x
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(x == y for x, y in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = [False] * len(self.images)
        out = []
        for start in range(len(self.images)):
            if seen[start]:
                continue
            cyc = []
            x = start
            while not seen[x]:
                seen[x] = True
                cyc.append(x)
                x = self.images[x]
            out.append(tuple(cyc))
        return out


def compose(*perms: Permutation) -> Permutation:
    """Compose outermost-first: ``compose(f, g, h) == f ∘ g ∘ h``."""
    if not perms:
        raise LoopModError("compose needs at least one permutation")
    out = perms[-1]
    for p in reversed(perms[:-1]):
        out = p.compose(out)
    return out


@dataclass(frozen=True)
class LoopTable:
    order: int
    table: tuple[tuple[int, ...], ...]
    identity: int

    @property
    def elements(self) -> range:
        return range(self.order)

    def _check(self, *elems: int) -> None:
        for x in elems:
            if not isinstance(x, (int, np.integer)) or not 0 <= x < self.order:
                raise IndexOutOfRange(f"element {x!r} not in [0, {self.order})")

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.table]

    def __str__(self) -> str:
        return format_loop(self)


@dataclass(frozen=True)
class AssociativityWitness:
    triple: tuple[int, int, int] | None = None
    left_product: int | None = None  # (a*b)*c
    right_product: int | None = None  # a*(b*c)

    @property
    def associative(self) -> bool:
        return self.triple is None


def validate_table(raw: Sequence[Sequence[int]], identity_hint: int | None = None) -> LoopTable:
    """Check ``raw`` is the multiplication table of a loop and freeze it.

    Rows and columns must be permutations of ``range(n)``; the identity is
    auto-detected unless ``identity_hint`` is given, in which case it is
    checked instead.
    """
    rows = [list(r) for r in raw]
    n = len(rows)
    if n == 0:
        raise NotSquare("a loop needs at least one element")
    for i, r in enumerate(rows):
        if len(r) != n:
            raise NotSquare(f"row {i} has {len(r)} entries, expected {n}")
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or not 0 <= v < n:
                raise EntryOutOfRange(i, j, v)
            r[j] = int(v)
    for i, r in enumerate(rows):
        seen = set()
        for v in r:
            if v in seen:
                raise NotLatin("row", i, v)
            seen.add(v)
    for j in range(n):
        seen = set()
        for i in range(n):
            v = rows[i][j]
            if v in seen:
                raise NotLatin("column", j, v)
            seen.add(v)

    def is_identity(e: int) -> bool:
        return all(rows[e][x] == x and rows[x][e] == x for x in range(n))

    if identity_hint is not None:
        if not isinstance(identity_hint, int) or not 0 <= identity_hint < n:
            raise NoIdentity(f"identity hint {identity_hint!r} is not an element")
        if not is_identity(identity_hint):
            raise NoIdentity(f"element {identity_hint} is not a two-sided identity")
        e = identity_hint
    else:
        found = [e for e in range(n) if is_identity(e)]
        if not found:
            raise NoIdentity("no element acts as a two-sided identity")
        e = found[0]
    return LoopTable(n, tuple(tuple(r) for r in rows), e)


def multiply(L: LoopTable, a: int, b: int) -> int:
    L._check(a, b)
    return L.table[a][b]


def divide(L: LoopTable, side: str, a: int, b: int) -> int:
    """Left division solves ``a*x = b``; right division solves ``y*a = b``."""
    L._check(a, b)
    if side == LEFT:
        return L.table[a].index(b)
    if side == RIGHT:
        for y in range(L.order):
            if L.table[y][a] == b:
                return y
    raise LoopModError(f"side must be 'left' or 'right', got {side!r}")


def translation(L: LoopTable, side: str, a: int) -> Permutation:
    L._check(a)
    if side == LEFT:
        return Permutation(L.table[a])
    if side == RIGHT:
        return Permutation(tuple(row[a] for row in L.table))
    raise LoopModError(f"side must be 'left' or 'right', got {side!r}")


def deviation(L: LoopTable, a: int, b: int) -> Permutation:
    """Return ``L_a ∘ L_b ∘ L_ab^{-1}``, the permutation that corrects ``L_ab`` to ``L_a ∘ L_b``."""
    L._check(a, b)
    t = L.table
    ab = t[a][b]
    row_ab = t[ab]
    images = [0] * L.order
    # L_ab(y) = x  =>  Phi(x) = a(by)
    for y in range(L.order):
        images[row_ab[y]] = t[a][t[b][y]]
    return Permutation(tuple(images))


def deviation_family(L: LoopTable) -> list[list[Permutation]]:
    """All deviation maps as an n×n grid indexed ``[a][b]``."""
    return [[deviation(L, a, b) for b in L.elements] for a in L.elements]


def associativity_witness(L: LoopTable) -> AssociativityWitness:
    t = L.table
    n = L.order
    for a in range(n):
        ta = t[a]
        for b in range(n):
            ab = ta[b]
            tb = t[b]
            for c in range(n):
                lhs = t[ab][c]
                rhs = ta[tb[c]]
                if lhs != rhs:
                    return AssociativityWitness((a, b, c), lhs, rhs)
    return AssociativityWitness()


def is_associative(L: LoopTable) -> bool:
    return associativity_witness(L).associative


def relabel(L: LoopTable, sigma: Sequence[int]) -> LoopTable:
    """Transport the loop along ``sigma`` (old label ``x`` becomes ``sigma[x]``)."""
    n = L.order
    if sorted(sigma) != list(range(n)):
        raise LoopModError("relabeling must be a permutation of the elements")
    new = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            new[sigma[i]][sigma[j]] = sigma[L.table[i][j]]
    return LoopTable(n, tuple(tuple(r) for r in new), sigma[L.identity])


@lru_cache(maxsize=None)
def _relabelings(n: int, identity: int) -> tuple[np.ndarray, np.ndarray]:
    """Every sigma with sigma[identity] = 0, and their inverses, as arrays."""
    others = [x for x in range(n) if x != identity]
    sigmas = []
    for images in itertools.permutations(range(1, n)):
        s = [0] * n
        s[identity] = 0
        for x, y in zip(others, images):
            s[x] = y
        sigmas.append(s)
    sig = np.array(sigmas, dtype=np.int8).reshape(len(sigmas), n)
    inv = np.argsort(sig, axis=1).astype(np.int8)
    return sig, inv


def canonical_key(L: LoopTable) -> tuple[int, ...]:
    """Row-major entries of the lexicographically least relabeled table."""
    n = L.order
    if n > MAX_CANONICAL_ORDER:
        raise Unsupported(f"canonical form is only supported up to order {MAX_CANONICAL_ORDER}")
    sig, inv = _relabelings(n, L.identity)
    t = np.asarray(L.table, dtype=np.int8)
    # new[s][i][j] = sig[s][ t[inv[s][i]][inv[s][j]] ]
    moved = t[inv[:, :, None], inv[:, None, :]]
    new = np.take_along_axis(sig, moved.reshape(len(sig), n * n), axis=1)
    best = np.lexsort(new.T[::-1])[0]
    return tuple(int(v) for v in new[best])


def from_key(key: Sequence[int], n: int) -> LoopTable:
    rows = tuple(tuple(int(v) for v in key[i * n:(i + 1) * n]) for i in range(n))
    return LoopTable(n, rows, 0)


def canonical_form(L: LoopTable) -> LoopTable:
    """Isomorphism-class representative with the identity relabeled to 0."""
    return from_key(canonical_key(L), L.order)


def normalize(L: LoopTable) -> LoopTable:
    """Relabel so that the identity is 0 and the first row and column read ``0..n-1``.

    Only the identity swap is needed: with identity 0 the first row and
    column are already in natural order.
    """
    if L.identity == 0:
        return L
    sigma = list(range(L.order))
    sigma[0], sigma[L.identity] = L.identity, 0
    return relabel(L, sigma)


def parse_loop(text: str) -> LoopTable:
    """Read the loop text format: ``n [identity]`` then n rows of n integers."""
    lines = []
    for raw in text.splitlines():
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        lines.append(s)
    if not lines:
        raise LoopModError("empty loop file")
    header = lines[0].split()
    try:
        n = int(header[0])
        hint = int(header[1]) if len(header) > 1 else None
    except ValueError as exc:
        raise LoopModError(f"bad header line {lines[0]!r}") from exc
    if len(header) > 2:
        raise LoopModError(f"bad header line {lines[0]!r}")
    if n < 1:
        raise LoopModError("order must be at least 1")
    body = lines[1:]
    if len(body) != n:
        raise NotSquare(f"expected {n} rows, found {len(body)}")
    try:
        rows = [[int(tok) for tok in line.split()] for line in body]
    except ValueError as exc:
        raise LoopModError(f"non-integer entry: {exc}") from exc
    return validate_table(rows, hint)


def read_loop(source: str | TextIO) -> LoopTable:
    if hasattr(source, "read"):
        return parse_loop(source.read())
    with open(source) as fh:
        return parse_loop(fh.read())


def format_loop(L: LoopTable) -> str:
    width = len(str(L.order - 1))
    lines = [f"{L.order} {L.identity}"]
    lines += [" ".join(str(v).rjust(width) for v in row) for row in L.table]
    return "\n".join(lines) + "\n"


def format_loops(loops: Iterable[LoopTable]) -> str:
    return "\n".join(format_loop(L) for L in loops)
