"""Exhaustive generation of small loops and a few named fixture loops."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .errors import InvalidPrefix, LoopModError, UnknownBuiltin, UnsupportedOrder
from .loop import MAX_CANONICAL_ORDER, LoopTable, canonical_key, from_key, validate_table

NORMALIZED = "normalized"
UP_TO_ISOMORPHISM = "up_to_isomorphism"

Q5_ROWS = (
    (0, 1, 2, 3, 4),
    (1, 0, 3, 4, 2),
    (2, 3, 4, 0, 1),
    (3, 4, 1, 2, 0),
    (4, 2, 0, 1, 3),
)


@dataclass(frozen=True)
class EnumerationConfig:
    order: int
    mode: str = NORMALIZED
    limit: int | None = None
    prefix: tuple[int, ...] = ()

    def __post_init__(self):
        if self.order < 1:
            raise LoopModError("order must be at least 1")
        if self.mode not in (NORMALIZED, UP_TO_ISOMORPHISM):
            raise LoopModError(f"unknown mode {self.mode!r}")
        if self.mode == UP_TO_ISOMORPHISM and self.order > MAX_CANONICAL_ORDER:
            raise UnsupportedOrder(f"isomorphism mode supports orders up to {MAX_CANONICAL_ORDER}")
        if self.limit is not None and self.limit < 1:
            raise LoopModError("limit must be at least 1")


def worker_count() -> int:
    raw = os.environ.get("LOOPMOD_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise LoopModError(f"LOOPMOD_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def _check_prefix(n: int, prefix: Sequence[int]) -> None:
    """``prefix`` fixes row 1 from column 1 onward; it must be completable."""
    if n < 2 and prefix:
        raise InvalidPrefix("order 1 has no second row")
    if len(prefix) > n - 1:
        raise InvalidPrefix(f"prefix longer than the {n - 1} free cells of row 1")
    used = {1}
    for j, v in enumerate(prefix, start=1):
        if not isinstance(v, int) or not 0 <= v < n:
            raise InvalidPrefix(f"prefix value {v!r} out of range")
        if v in used or v == j:
            raise InvalidPrefix(f"prefix value {v} at column {j} breaks the Latin property")
        used.add(v)


def iter_reduced(n: int, prefix: Sequence[int] = ()) -> Iterator[list[list[int]]]:
    """Yield reduced Latin squares of order ``n`` (first row and column ``0..n-1``).

    Cells are filled row by row with ascending candidates; the yielded grid is
    reused between iterations, so copy it if you keep it.
    """
    _check_prefix(n, prefix)
    full = (1 << n) - 1
    grid = [[0] * n for _ in range(n)]
    for j in range(n):
        grid[0][j] = j
        grid[j][0] = j
    if n <= 2:
        if n == 2:
            grid[1][1] = 0
        yield grid
        return
    row_used = [1 << i for i in range(n)]
    col_used = [1 << j for j in range(n)]
    for j, v in enumerate(prefix, start=1):
        grid[1][j] = v
        row_used[1] |= 1 << v
        col_used[j] |= 1 << v
    cells = [(i, j) for i in range(1, n) for j in range(1, n)][len(prefix):]
    last = len(cells)

    def fill(k):
        if k == last:
            yield grid
            return
        i, j = cells[k]
        free = full & ~(row_used[i] | col_used[j])
        while free:
            bit = free & -free
            free ^= bit
            grid[i][j] = bit.bit_length() - 1
            row_used[i] |= bit
            col_used[j] |= bit
            yield from fill(k + 1)
            row_used[i] ^= bit
            col_used[j] ^= bit

    yield from fill(0)


def _as_loop(grid) -> LoopTable:
    return LoopTable(len(grid), tuple(tuple(r) for r in grid), 0)


def _iso_keys(n: int, prefix: tuple[int, ...]) -> tuple[int, set]:
    keys = set()
    total = 0
    for grid in iter_reduced(n, prefix):
        total += 1
        keys.add(canonical_key(_as_loop(grid)))
    return total, keys


def row1_prefixes(n: int) -> list[tuple[int, ...]]:
    """Disjoint one-cell prefixes that together cover the whole search."""
    if n < 3:
        return [()]
    return [(v,) for v in range(n) if v != 1]


def iso_classes(n: int, workers: int | None = None, prefix: tuple[int, ...] = ()) -> list[tuple[int, ...]]:
    """Sorted canonical keys of all loops of order ``n``."""
    if n > MAX_CANONICAL_ORDER:
        raise UnsupportedOrder(f"isomorphism mode supports orders up to {MAX_CANONICAL_ORDER}")
    workers = worker_count() if workers is None else workers
    parts = [prefix] if prefix or workers == 1 else row1_prefixes(n)
    keys: set = set()
    if workers > 1 and len(parts) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(parts))) as pool:
            for _, ks in pool.map(_iso_keys, [n] * len(parts), parts):
                keys |= ks
    else:
        for p in parts:
            keys |= _iso_keys(n, p)[1]
    return sorted(keys)


def enumerate_loops(
    cfg: EnumerationConfig,
    sink: Callable[[LoopTable], None] | None = None,
    workers: int | None = None,
) -> int:
    """Feed every loop described by ``cfg`` to ``sink`` and return how many were emitted."""
    n = cfg.order
    prefix = tuple(cfg.prefix)
    _check_prefix(n, prefix)
    emitted = 0
    if cfg.mode == NORMALIZED:
        for grid in iter_reduced(n, prefix):
            if sink is not None:
                sink(_as_loop(grid))
            emitted += 1
            if cfg.limit is not None and emitted >= cfg.limit:
                break
        return emitted
    for key in iso_classes(n, workers, prefix):
        if sink is not None:
            sink(from_key(key, n))
        emitted += 1
        if cfg.limit is not None and emitted >= cfg.limit:
            break
    return emitted


def all_loops(n: int) -> list[LoopTable]:
    out: list[LoopTable] = []
    enumerate_loops(EnumerationConfig(n), out.append)
    return out


def cyclic(n: int) -> LoopTable:
    return validate_table([[(i + j) % n for j in range(n)] for i in range(n)], 0)


def _fano_products() -> dict[tuple[int, int], tuple[int, int]]:
    """Signed products ``e_i e_j = s e_k`` for imaginary units 1..7."""
    wrap = lambda v: (v - 1) % 7 + 1  # noqa: E731
    prod = {}
    for t in range(1, 8):
        i, j, k = t, wrap(t + 1), wrap(t + 3)
        for p, q, r in ((i, j, k), (j, k, i), (k, i, j)):
            prod[(p, q)] = (1, r)
            prod[(q, p)] = (-1, r)
    return prod


def octonion16() -> LoopTable:
    """Unit octonions ``±e_0..±e_7``; element ``k`` is ``-e_{k-8}`` for ``k >= 8``."""
    fano = _fano_products()

    def unit(k):
        return (-1 if k >= 8 else 1), k % 8

    def mul(i, j):
        if i == 0:
            return 1, j
        if j == 0:
            return 1, i
        if i == j:
            return -1, 0
        return fano[(i, j)]

    rows = []
    for a in range(16):
        sa, ia = unit(a)
        row = []
        for b in range(16):
            sb, ib = unit(b)
            s, k = mul(ia, ib)
            s *= sa * sb
            row.append(k if s > 0 else k + 8)
        rows.append(row)
    try:
        return validate_table(rows, 0)
    except LoopModError as exc:
        raise LoopModError(f"octonion construction is not a loop: {exc}") from exc


def builtin_loop(name: str) -> LoopTable:
    if name.startswith("cyclic:"):
        try:
            n = int(name.split(":", 1)[1])
        except ValueError:
            raise UnknownBuiltin(f"bad cyclic order in {name!r}") from None
        if n < 1:
            raise UnknownBuiltin(f"bad cyclic order in {name!r}")
        return cyclic(n)
    if name == "q5_nonassoc":
        return validate_table(Q5_ROWS, 0)
    if name == "octonion16":
        return octonion16()
    raise UnknownBuiltin(f"unknown loop {name!r}; choose cyclic:N, q5_nonassoc or octonion16")
