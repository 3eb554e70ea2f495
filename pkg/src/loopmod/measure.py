"""Exact Radon–Nikodym data for weighted measures on finite loops.

On a finite set with a full-support measure ``mu`` the pushforward of ``mu``
under a bijection ``f`` has density ``mu(f^-1 x) / mu(x)`` at ``x``.  Every
quantity here is a :class:`fractions.Fraction`; every check is exact equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

from .errors import (
    EmptyGeneratorSet,
    IdentityFails,
    CapExceeded,
    LengthMismatch,
    LoopModError,
    NonpositiveWeight,
    SizeMismatch,
)
from .identities import (
    IdentityAst,
    TranslationWord,
    check_identity,
    compile_identity,
    evaluate,
)
from .loop import (
    LEFT,
    RIGHT,
    LoopTable,
    Permutation,
    compose,
    deviation,
    is_associative,
    translation,
)

MAX_FAILURES = 100
ONE = Fraction(1)


def frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Measure:
    weights: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, x: int) -> Fraction:
        return self.weights[x]

    @property
    def is_uniform(self) -> bool:
        return len(set(self.weights)) <= 1


def validate_measure(raw: Iterable, n: int) -> Measure:
    ws = []
    for i, w in enumerate(raw):
        q = Fraction(w)
        if q <= 0:
            raise NonpositiveWeight(i)
        ws.append(q)
    if len(ws) != n:
        raise LengthMismatch(f"measure has {len(ws)} weights, loop has order {n}")
    return Measure(tuple(ws))


def counting_measure(n: int) -> Measure:
    return Measure((ONE,) * n)


def parse_measure(text: str, n: int | None = None) -> Measure:
    """One weight per line as ``p`` or ``p/q``; ``#`` starts a comment line."""
    raw = []
    for line in text.splitlines():
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            raw.append(Fraction(s))
        except ValueError:
            raise LoopModError(f"bad rational {s!r}") from None
    return validate_measure(raw, len(raw) if n is None else n)


def read_measure(source: str | TextIO, n: int) -> Measure:
    if source == "uniform":
        return counting_measure(n)
    if hasattr(source, "read"):
        return parse_measure(source.read(), n)
    with open(source) as fh:
        return parse_measure(fh.read(), n)


def format_measure(mu: Measure) -> str:
    return "".join(frac_str(w) + "\n" for w in mu.weights)


@dataclass(frozen=True)
class DensityVector:
    values: tuple[Fraction, ...]

    def __getitem__(self, x: int) -> Fraction:
        return self.values[x]

    def __len__(self) -> int:
        return len(self.values)

    def is_one(self) -> bool:
        return all(v == 1 for v in self.values)


def _sizes(mu: Measure, n: int) -> None:
    if len(mu) != n:
        raise SizeMismatch(f"measure has {len(mu)} points, expected {n}")


def rn_derivative(f: Permutation, mu: Measure) -> DensityVector:
    """Density of ``f_* mu`` against ``mu``."""
    _sizes(mu, len(f))
    w = mu.weights
    inv = f.inverse().images
    return DensityVector(tuple(w[inv[x]] / w[x] for x in range(len(w))))


@dataclass(frozen=True)
class CocycleTable:
    kind: str
    entries: tuple[tuple[Fraction, ...], ...]

    def __getitem__(self, a: int) -> tuple[Fraction, ...]:
        return self.entries[a]

    def is_one(self) -> bool:
        return all(v == 1 for row in self.entries for v in row)


def cocycle_table(L: LoopTable, mu: Measure, kind: str) -> CocycleTable:
    _sizes(mu, L.order)
    rows = tuple(rn_derivative(translation(L, kind, a), mu).values for a in L.elements)
    return CocycleTable(kind, rows)


def deviation_jacobian(L: LoopTable, mu: Measure, a: int, b: int) -> DensityVector:
    _sizes(mu, L.order)
    return rn_derivative(deviation(L, a, b), mu)


@dataclass(frozen=True)
class Failure:
    case: tuple
    lhs: Fraction
    rhs: Fraction
    note: str = ""

    def to_dict(self) -> dict:
        d = {"case": list(self.case), "lhs": frac_str(self.lhs), "rhs": frac_str(self.rhs)}
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class VerificationReport:
    statement: str
    cases: int = 0
    failures: list[Failure] = field(default_factory=list)
    failure_count: int = 0

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def record(self, case: tuple, lhs: Fraction, rhs: Fraction, note: str = "") -> None:
        self.failure_count += 1
        if len(self.failures) < MAX_FAILURES:
            self.failures.append(Failure(case, lhs, rhs, note))

    def merge(self, other: VerificationReport) -> VerificationReport:
        out = VerificationReport(self.statement, self.cases + other.cases)
        out.failure_count = self.failure_count + other.failure_count
        out.failures = sorted(self.failures + other.failures, key=lambda f: f.case)[:MAX_FAILURES]
        return out

    def to_dict(self) -> dict:
        return {
            "statement": self.statement,
            "cases": self.cases,
            "failure_count": self.failure_count,
            "failures": [f.to_dict() for f in self.failures],
            "pass": self.passed,
        }


def verify_chain_rule(f: Permutation, g: Permutation, mu: Measure) -> VerificationReport:
    """Check ``d(f∘g)_*mu/dmu (x) = alpha(x) * beta(f^-1 x)`` at every point."""
    n = len(f)
    if len(g) != n:
        raise SizeMismatch("permutations differ in size")
    _sizes(mu, n)
    whole = rn_derivative(f.compose(g), mu)
    alpha = rn_derivative(f, mu)
    beta = rn_derivative(g, mu)
    finv = f.inverse()
    rep = VerificationReport("chain-rule", n)
    for x in range(n):
        rhs = alpha[x] * beta[finv[x]]
        if whole[x] != rhs:
            rep.record((x,), whole[x], rhs)
    return rep


class _LoopData:
    """Translations, inverses and cocycle rows computed once per (loop, measure)."""

    def __init__(self, L: LoopTable, mu: Measure):
        _sizes(mu, L.order)
        self.L = L
        self.mu = mu
        n = L.order
        self.left = [translation(L, LEFT, a) for a in range(n)]
        self.left_inv = [p.inverse().images for p in self.left]
        self.lam = cocycle_table(L, mu, LEFT).entries


def verify_cocycle_relation(L: LoopTable, mu: Measure) -> VerificationReport:
    """Check both forms of the deviation-corrected cocycle relation for every ``(a, b, x)``.

    Form 1: ``lam(a,x) lam(b, L_a^-1 x) = J(a,b;x) lam(ab, Phi^-1 x)``.
    Form 2: the same with ``x`` replaced by ``Phi(x)``.
    """
    d = _LoopData(L, mu)
    n = L.order
    lam = d.lam
    rep = VerificationReport("cocycle-relation")
    for a in range(n):
        la_inv = d.left_inv[a]
        lam_a = lam[a]
        for b in range(n):
            ab = L.table[a][b]
            phi = deviation(L, a, b)
            phi_inv = phi.inverse().images
            jac = rn_derivative(phi, mu).values
            lam_b, lam_ab = lam[b], lam[ab]
            for x in range(n):
                rep.cases += 1
                lhs = lam_a[x] * lam_b[la_inv[x]]
                rhs = jac[x] * lam_ab[phi_inv[x]]
                if lhs != rhs:
                    rep.record((a, b, x), lhs, rhs, "form 1")
                y = phi[x]
                lhs2 = lam_a[y] * lam_b[la_inv[y]]
                rhs2 = jac[y] * lam_ab[x]
                if lhs2 != rhs2:
                    rep.record((a, b, x), lhs2, rhs2, "form 2")
    return rep


def untwisted_pairs(L: LoopTable) -> list[tuple[int, int]]:
    """Pairs ``(a, b)`` whose deviation map is the identity."""
    return [(a, b) for a in L.elements for b in L.elements if deviation(L, a, b).is_identity()]


def _untwisted(L: LoopTable, d: _LoopData, pairs, statement: str) -> VerificationReport:
    rep = VerificationReport(statement)
    lam = d.lam
    for a, b in pairs:
        ab = L.table[a][b]
        inv = d.left_inv[a]
        for x in L.elements:
            rep.cases += 1
            lhs = lam[a][x] * lam[b][inv[x]]
            if lhs != lam[ab][x]:
                rep.record((a, b, x), lhs, lam[ab][x])
    return rep


def rigidity_report(L: LoopTable, mu: Measure) -> tuple[VerificationReport, list[tuple[int, int]]]:
    """Untwisted relation ``lam(a,x) lam(b, L_a^-1 x) = lam(ab, x)`` on every pair with trivial deviation."""
    d = _LoopData(L, mu)
    pairs = untwisted_pairs(L)
    return _untwisted(L, d, pairs, "rigidity"), pairs


def untwisted_relation(L: LoopTable, mu: Measure, pairs=None) -> VerificationReport:
    """Evaluate the untwisted relation on ``pairs`` (all pairs by default) without any precondition."""
    d = _LoopData(L, mu)
    if pairs is None:
        pairs = [(a, b) for a in L.elements for b in L.elements]
    return _untwisted(L, d, pairs, "untwisted-relation")


@dataclass(frozen=True)
class ModularFunction:
    kind: str
    values: tuple[Fraction, ...]
    multiplicative: VerificationReport | None = None


@dataclass(frozen=True)
class SpatiallyVarying:
    kind: str
    a: int
    x1: int
    x2: int
    v1: Fraction
    v2: Fraction


def modular_function(L: LoopTable, mu: Measure, kind: str = LEFT) -> ModularFunction | SpatiallyVarying:
    """The spatially constant value of each cocycle row, if every row is constant.

    When the loop is associative the result carries a check of
    ``Delta(ab) = Delta(a) Delta(b)``.
    """
    table = cocycle_table(L, mu, kind)
    for a in L.elements:
        row = table[a]
        for x in L.elements:
            if row[x] != row[0]:
                return SpatiallyVarying(kind, a, 0, x, row[0], row[x])
    values = tuple(row[0] for row in table.entries)
    mult = None
    if is_associative(L):
        mult = VerificationReport("modular-multiplicative")
        for a in L.elements:
            for b in L.elements:
                mult.cases += 1
                lhs = values[L.table[a][b]]
                rhs = values[a] * values[b]
                if lhs != rhs:
                    mult.record((a, b), lhs, rhs)
    return ModularFunction(kind, values, mult)


def unimodularity_check(L: LoopTable, mu: Measure) -> tuple[bool, tuple[str, int, int] | None]:
    for kind in (LEFT, RIGHT):
        table = cocycle_table(L, mu, kind)
        for a in L.elements:
            for x in L.elements:
                if table[a][x] != 1:
                    return False, (kind, a, x)
    return True, None


def word_permutation(L: LoopTable, word: TranslationWord, assignment) -> tuple[list[Permutation], list[int]]:
    params = [evaluate(L, t, assignment) for _, t in word.factors]
    perms = [translation(L, s, c) for (s, _), c in zip(word.factors, params)]
    return perms, params


def expand_chain(
    factors: Sequence[tuple[Sequence[Fraction], Permutation]], n: int
) -> tuple[Fraction, ...]:
    """Iterated two-factor chain rule for ``f1 ∘ f2 ∘ ... ∘ fk``.

    ``factors`` pairs each map with its own density; the i-th density is read
    at ``(f1 ∘ ... ∘ f_{i-1})^-1 x``.
    """
    out = []
    invs = [p.inverse().images for _, p in factors]
    for x in range(n):
        acc = ONE
        y = x
        for (dens, _), inv in zip(factors, invs):
            acc *= dens[y]
            y = inv[y]
        out.append(acc)
    return tuple(out)


def _cocycle_factors(word: TranslationWord, perms, params, lam, rho):
    return [((lam if s == LEFT else rho)[c], p) for (s, _), c, p in zip(word.factors, params, perms)]


def _deviation_factors(L: LoopTable, mu: Measure, word: TranslationWord, perms, params, lam, rho):
    """Cocycle factors with the first adjacent ``L_a ∘ L_b`` rewritten as ``Phi_{a,b} ∘ L_ab``."""
    facs = _cocycle_factors(word, perms, params, lam, rho)
    sides = [s for s, _ in word.factors]
    for i in range(len(sides) - 1):
        if sides[i] == LEFT and sides[i + 1] == LEFT:
            a, b = params[i], params[i + 1]
            phi = deviation(L, a, b)
            ab = L.table[a][b]
            jac = rn_derivative(phi, mu).values
            return facs[:i] + [(jac, phi), (lam[ab], translation(L, LEFT, ab))] + facs[i + 2:], True
    return facs, False


def identity_compatibility(
    L: LoopTable, mu: Measure, ident: IdentityAst, point: str | None = None
) -> VerificationReport:
    """Check that both sides of a valid identity induce the same measure distortion.

    For every assignment of the non-point variables the two compiled
    translation words must give the same permutation, the same density, and
    the same product of cocycle (and deviation-Jacobian) factors.
    """
    _sizes(mu, L.order)
    verdict = check_identity(L, ident)
    if not verdict.holds:
        raise IdentityFails(verdict)
    lw, rw = compile_identity(ident, point)
    point = lw.point
    n = L.order
    lam = cocycle_table(L, mu, LEFT).entries
    rho = cocycle_table(L, mu, RIGHT).entries
    params = [v for v in ident.variables if v != point]
    rep = VerificationReport(f"compatibility[{ident}; point={point}]")
    ident_perm = Permutation.identity(n)
    for vals in itertools.product(range(n), repeat=len(params)):
        assignment = dict(zip(params, vals))
        rep.cases += 1
        case = tuple(vals)
        lp, lc = word_permutation(L, lw, assignment)
        rp, rc = word_permutation(L, rw, assignment)
        t1 = compose(*lp) if lp else ident_perm
        t2 = compose(*rp) if rp else ident_perm
        if t1 != t2:
            x = next(x for x in range(n) if t1[x] != t2[x])
            rep.record(case + (x,), Fraction(t1[x]), Fraction(t2[x]), "operators differ")
            continue
        d1 = rn_derivative(t1, mu).values
        d2 = rn_derivative(t2, mu).values
        e1 = expand_chain(_cocycle_factors(lw, lp, lc, lam, rho), n)
        e2 = expand_chain(_cocycle_factors(rw, rp, rc, lam, rho), n)
        f1, _ = _deviation_factors(L, mu, lw, lp, lc, lam, rho)
        f2, _ = _deviation_factors(L, mu, rw, rp, rc, lam, rho)
        g1, g2 = expand_chain(f1, n), expand_chain(f2, n)
        for x in range(n):
            if d1[x] != d2[x]:
                rep.record(case + (x,), d1[x], d2[x], "densities differ")
            if e1[x] != e2[x]:
                rep.record(case + (x,), e1[x], e2[x], "cocycle expansions differ")
            if e1[x] != d1[x]:
                rep.record(case + (x,), e1[x], d1[x], "lhs expansion differs from density")
            if g1[x] != e1[x] or g2[x] != e2[x]:
                bad = (g1[x], e1[x]) if g1[x] != e1[x] else (g2[x], e2[x])
                rep.record(case + (x,), bad[0], bad[1], "deviation-factored expansion differs")
    return rep


def verify_all(L: LoopTable, mu: Measure) -> dict[str, VerificationReport]:
    """Chain rule on every pair of generating maps, cocycle relation, rigidity."""
    return {
        "chain-rule": chain_rule_on_loop(L, mu),
        "cocycle-relation": verify_cocycle_relation(L, mu),
        "rigidity": rigidity_report(L, mu)[0],
    }


def chain_rule_on_loop(L: LoopTable, mu: Measure, maps: Sequence[Permutation] | None = None) -> VerificationReport:
    """Chain rule for every ordered pair drawn from all ``L_a``, ``R_a`` and ``Phi_{a,b}``."""
    if maps is None:
        maps = loop_maps(L)
    rep = VerificationReport("chain-rule")
    for i, f in enumerate(maps):
        for j, g in enumerate(maps):
            sub = verify_chain_rule(f, g, mu)
            rep.cases += sub.cases
            for fl in sub.failures:
                rep.record((i, j) + fl.case, fl.lhs, fl.rhs)
    return rep


def loop_maps(L: LoopTable) -> list[Permutation]:
    """Distinct permutations among all translations and deviation maps, in a fixed order."""
    seen = {}
    for side in (LEFT, RIGHT):
        for a in L.elements:
            seen.setdefault(translation(L, side, a), None)
    for a in L.elements:
        for b in L.elements:
            seen.setdefault(deviation(L, a, b), None)
    return list(seen)


def parse_generators(L: LoopTable, spec: str | None) -> list[tuple[str, int]]:
    """``None``/``left`` → all left translations; ``right``, ``all``; or a list like ``L0,R2``."""
    if spec is None or spec == "left":
        return [(LEFT, a) for a in L.elements]
    if spec == "right":
        return [(RIGHT, a) for a in L.elements]
    if spec in ("all", "both"):
        return [(s, a) for s in (LEFT, RIGHT) for a in L.elements]
    out = []
    for tok in spec.replace(" ", "").split(","):
        if not tok:
            continue
        side = {"L": LEFT, "R": RIGHT}.get(tok[0].upper())
        if side is None or not tok[1:].isdigit():
            raise LoopModError(f"bad generator {tok!r}; use forms like L0 or R3")
        a = int(tok[1:])
        L._check(a)
        out.append((side, a))
    if not out:
        raise EmptyGeneratorSet("no generators given")
    return out


@dataclass(frozen=True)
class InvariantBasis:
    orbits: tuple[tuple[int, ...], ...]

    def basis(self, n: int) -> list[tuple[int, ...]]:
        """One 0/1 indicator vector per orbit."""
        return [tuple(int(x in orb) for x in range(n)) for orb in self.orbits]

    def is_invariant(self, mu: Measure) -> bool:
        return all(len({mu[x] for x in orb}) == 1 for orb in self.orbits)


def invariant_measure_basis(L: LoopTable, generators: Sequence[tuple[str, int]] | None = None) -> InvariantBasis:
    """Orbits of the points under the generating translations.

    A full-support measure is fixed by every generator exactly when it is
    constant on each orbit.
    """
    if generators is None:
        generators = [(LEFT, a) for a in L.elements]
    if not generators:
        raise EmptyGeneratorSet("at least one generator is required")
    parent = list(L.elements)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for side, a in generators:
        p = translation(L, side, a)
        for x in L.elements:
            rx, ry = find(x), find(p[x])
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)
    groups: dict[int, list[int]] = {}
    for x in L.elements:
        groups.setdefault(find(x), []).append(x)
    return InvariantBasis(tuple(tuple(g) for _, g in sorted(groups.items())))


def mult_group_size(L: LoopTable, side: str = LEFT, cap: int = 10**6) -> int:
    """Order of the permutation group generated by the chosen translations (BFS closure)."""
    if cap < 1:
        raise LoopModError("cap must be at least 1")
    sides = (LEFT, RIGHT) if side == "both" else (side,)
    gens = {translation(L, s, a).images for s in sides for a in L.elements}
    start = tuple(range(L.order))
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[y] for y in p)
                if q not in seen:
                    seen.add(q)
                    if len(seen) > cap:
                        raise CapExceeded(cap)
                    nxt.append(q)
        frontier = nxt
    return len(seen)
