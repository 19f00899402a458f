"""Character-lattice machinery for free abelian deck groups.

For Gamma = Z^n the cover Laplacian block-diagonalizes over the characters of
the quotient: the Betti number is the sum over lattice characters of the
kernel dimension of the evaluated symbol matrix.  Membership of a character
in the zero set of det(Laplacian) is decided numerically and then confirmed
exactly by realizing the character block as an integer matrix over the
cyclotomic field and taking a certified rational rank.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .caps import DEFAULT_CAPS, Caps
from .covers import CoverInstance
from .errors import (CrossCheckMismatch, NotAbelian, NotRankOne,
                     SizeCapExceeded)
from .group_ring import EquivariantChainComplex, GroupRingMatrix, laplacian
from .groups import AbelianQuotient, FreeAbelian

_KERNEL_TOL = 1e-8
_AMBIG_LO = 1e-9
_AMBIG_HI = 1e-7

Character = Tuple[Fraction, ...]


class LaurentPolynomial:
    """Integer Laurent polynomial in n commuting variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Dict[Tuple[int, ...], int]):
        self.nvars = nvars
        self.terms = {tuple(e): c for e, c in terms.items() if c}

    @classmethod
    def zero(cls, nvars: int) -> "LaurentPolynomial":
        return cls(nvars, {})

    @classmethod
    def one(cls, nvars: int) -> "LaurentPolynomial":
        return cls(nvars, {(0,) * nvars: 1})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return LaurentPolynomial(self.nvars, terms)

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) - c
        return LaurentPolynomial(self.nvars, terms)

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        terms: Dict[Tuple[int, ...], int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return LaurentPolynomial(self.nvars, terms)

    def evaluate(self, x: Sequence[float]) -> complex:
        """Value at the character exp(2*pi*i*x_k) per variable."""
        xs = np.asarray([float(v) for v in x])
        acc = 0j
        for e, c in self.terms.items():
            acc += c * np.exp(2j * np.pi * float(np.dot(e, xs)))
        return acc

    def degree_span(self, var: int = 0) -> int:
        """max exponent - min exponent in the given variable (0 if no terms)."""
        if not self.terms:
            return 0
        exps = [e[var] for e in self.terms]
        return max(exps) - min(exps)

    def __eq__(self, other) -> bool:
        return (isinstance(other, LaurentPolynomial)
                and self.nvars == other.nvars and self.terms == other.terms)

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self.nvars}, {self.terms})"


def _require_abelian(group) -> FreeAbelian:
    if not isinstance(group, FreeAbelian):
        raise NotAbelian("operation requires a free abelian deck group")
    return group


def as_laurent(el) -> LaurentPolynomial:
    """Reinterpret a group-ring element over Z^n as a Laurent polynomial."""
    group = _require_abelian(el.group)
    return LaurentPolynomial(group.rank, dict(el.terms))


def determinant(m: GroupRingMatrix, size_cap: int = 8) -> LaurentPolynomial:
    """Exact symbolic determinant of a square matrix over Z[Z^n]."""
    group = _require_abelian(m.group)
    if m.nrows != m.ncols:
        raise ValueError("determinant requires a square matrix")
    n = m.nrows
    if n > size_cap:
        raise SizeCapExceeded(f"symbolic determinant capped at size {size_cap}")
    if n == 0:
        return LaurentPolynomial.one(group.rank)
    entries = [[as_laurent(m.entries[i][j]) for j in range(n)] for i in range(n)]
    cache: Dict[Tuple[int, ...], LaurentPolynomial] = {}

    def minor(cols: Tuple[int, ...]) -> LaurentPolynomial:
        if cols in cache:
            return cache[cols]
        row = n - len(cols)
        if not cols:
            return LaurentPolynomial.one(group.rank)
        acc = LaurentPolynomial.zero(group.rank)
        for pos, j in enumerate(cols):
            entry = entries[row][j]
            if entry.is_zero:
                continue
            rest = cols[:pos] + cols[pos + 1:]
            term = entry * minor(rest)
            acc = acc + (term if pos % 2 == 0 else -term)
        cache[cols] = acc
        return acc

    return minor(tuple(range(n)))


# ---------------------------------------------------------------------------
# Characters of finite abelian quotients
# ---------------------------------------------------------------------------

def character_lattice(quot: AbelianQuotient) -> List[Character]:
    """All characters of Z^n trivial on the subgroup, as rational points."""
    if not isinstance(quot, AbelianQuotient):
        raise NotAbelian("character lattice requires an abelian quotient")
    n = quot.group.rank
    chars: List[Character] = []
    for y in quot.elements:
        x = tuple(
            sum(Fraction(y[i] * quot.u[i][k], quot.moduli[i])
                for i in range(len(quot.moduli))) % 1
            for k in range(n)
        )
        chars.append(x)
    if len(set(chars)) != quot.order:
        raise CrossCheckMismatch("characters are not distinct")  # pragma: no cover
    for col in quot.subgroup.columns():
        for x in chars:
            val = sum(xk * ck for xk, ck in zip(x, col))
            if val.denominator != 1:
                raise CrossCheckMismatch(
                    "character does not kill a subgroup generator")  # pragma: no cover
    return chars


def evaluate_matrix_at_characters(m: GroupRingMatrix,
                                  points: np.ndarray) -> np.ndarray:
    """Evaluate the symbol matrix at many characters: (L, a, a) complex array.

    ``points`` has shape (L, n); row x represents the character sending the
    k-th generator to exp(2*pi*i*x_k).
    """
    _require_abelian(m.group)
    L = points.shape[0]
    a = m.nrows
    out = np.zeros((L, a, m.ncols), dtype=complex)
    for i in range(a):
        for j in range(m.ncols):
            for e, c in m.entries[i][j].terms.items():
                out[:, i, j] += float(c) * np.exp(2j * np.pi * (points @ np.asarray(e, dtype=float)))
    return out


# ---------------------------------------------------------------------------
# Exact kernel dimension at a rational character (cyclotomic realization)
# ---------------------------------------------------------------------------

def _poly_mul(a: List[int], b: List[int]) -> List[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_mod(a: List[int], mod: List[int]) -> List[int]:
    """Remainder of a modulo a monic integer polynomial."""
    a = list(a)
    d = len(mod) - 1
    while len(a) > d:
        lead = a[-1]
        if lead:
            off = len(a) - 1 - d
            for i, c in enumerate(mod):
                a[off + i] -= lead * c
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> Tuple[int, ...]:
    """Coefficients (ascending) of the m-th cyclotomic polynomial."""
    if m == 1:
        return (-1, 1)
    poly = [0] * m + [1]
    poly[0] = -1  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            div = list(cyclotomic_polynomial(d))
            # exact division of integer polynomials
            q = [0] * (len(poly) - len(div) + 1)
            rem = list(poly)
            for k in range(len(q) - 1, -1, -1):
                coef = rem[k + len(div) - 1] // div[-1]
                q[k] = coef
                if coef:
                    for i, c in enumerate(div):
                        rem[k + i] -= coef * c
            if any(rem):
                raise RuntimeError("cyclotomic division failed")  # pragma: no cover
            poly = q
    return tuple(poly)


def exact_kernel_dimension(m: GroupRingMatrix, char: Character) -> int:
    """Kernel dimension of the symbol matrix at a rational character, exactly.

    The character values generate the cyclotomic field of the character's
    order; entries become integer polynomials modulo the cyclotomic
    polynomial, and the rank over that field is the size of the largest
    minor with nonzero determinant.  Everything stays in exact integer
    arithmetic, so root-of-unity coincidences cannot be missed.
    """
    group = _require_abelian(m.group)
    a = m.nrows
    if a == 0:
        return 0
    order = 1
    for x in char:
        order = order * x.denominator // gcd(order, x.denominator)
    phi_poly = list(cyclotomic_polynomial(order))
    numerators = [int(x * order) for x in char]

    entries: List[List[Tuple[int, ...]]] = []
    for i in range(a):
        row = []
        for j in range(m.ncols):
            coeffs = [0] * max(order, 1)
            for e, c in m.entries[i][j].terms.items():
                t = sum(v * numerators[k] for k, v in enumerate(e)) % order
                coeffs[t] += int(c)
            row.append(tuple(_poly_mod(coeffs, phi_poly)))
        entries.append(row)

    def mulmod(p, q):
        if not p or not q:
            return ()
        return tuple(_poly_mod(_poly_mul(list(p), list(q)), phi_poly))

    def accumulate(p, q, sign):
        out = [0] * max(len(p), len(q))
        for i, c in enumerate(p):
            out[i] += c
        for i, c in enumerate(q):
            out[i] += sign * c
        while out and out[-1] == 0:
            out.pop()
        return tuple(out)

    from itertools import combinations

    dets: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Tuple[int, ...]] = {}

    def det(rows: Tuple[int, ...], cols: Tuple[int, ...]) -> Tuple[int, ...]:
        if not rows:
            return (1,)
        key = (rows, cols)
        if key in dets:
            return dets[key]
        acc: Tuple[int, ...] = ()
        r = rows[0]
        for pos, c in enumerate(cols):
            e = entries[r][c]
            if e:
                term = mulmod(e, det(rows[1:], cols[:pos] + cols[pos + 1:]))
                acc = accumulate(acc, term, 1 if pos % 2 == 0 else -1)
        dets[key] = acc
        return acc

    size = min(a, m.ncols)
    for r in range(size, 0, -1):
        for rows in combinations(range(a), r):
            for cols in combinations(range(m.ncols), r):
                if det(rows, cols):
                    return a - r
    return a


# ---------------------------------------------------------------------------
# Betti numbers through characters
# ---------------------------------------------------------------------------

@dataclass
class PatternReport:
    """Characters on the pattern with their exact kernel dimensions."""

    a: int
    lattice_size: int
    kernel_characters: List[Tuple[Character, int]] = field(default_factory=list)
    betti: int = 0
    exact_betti: Optional[int] = None

    @property
    def pattern_count(self) -> int:
        """|Lambda intersect K|: characters with nontrivial kernel."""
        return len(self.kernel_characters)


def betti_by_characters(cx: EquivariantChainComplex, quot: AbelianQuotient,
                        q: int, caps: Caps = DEFAULT_CAPS,
                        cross_check: bool = True,
                        cover: Optional[CoverInstance] = None
                        ) -> Tuple[int, PatternReport]:
    """Betti number of the cover as a sum of character kernel dimensions.

    Every character claiming a kernel (or with an ambiguous singular value)
    is confirmed by the exact cyclotomic realization.  The total is
    cross-checked against the rank-based Betti number; on mismatch the exact
    rank value wins and a diagnostic is raised.
    """
    _require_abelian(cx.group)
    lap = laplacian(cx, q)
    a = cx.cells[q]
    chars = character_lattice(quot)
    report = PatternReport(a=a, lattice_size=len(chars))
    if a == 0:
        total = 0
    else:
        points = np.array([[float(x) for x in ch] for ch in chars])
        blocks = evaluate_matrix_at_characters(lap, points)
        sigma = np.linalg.svd(blocks, compute_uv=False)
        total = 0
        for idx, ch in enumerate(chars):
            svals = sigma[idx]
            numeric_dim = int(np.count_nonzero(svals < _KERNEL_TOL))
            ambiguous = bool(np.any((svals >= _AMBIG_LO) & (svals <= _AMBIG_HI)))
            if numeric_dim > 0 or ambiguous:
                dim = exact_kernel_dimension(lap, ch)
            else:
                dim = 0
            if dim > 0:
                report.kernel_characters.append((ch, dim))
            total += dim
    report.betti = total
    if cross_check:
        if cover is None:
            cover = CoverInstance(cx, quot, caps)
        exact_b = cover.betti(q)
        report.exact_betti = exact_b
        if exact_b != total:
            raise CrossCheckMismatch(
                f"character betti {total} != rank betti {exact_b}")
    return total, report


@dataclass
class SandwichReport:
    pattern_count: int
    betti: int
    a: int
    holds: bool


def sandwich_check(cx: EquivariantChainComplex, quot: AbelianQuotient, q: int,
                   caps: Caps = DEFAULT_CAPS,
                   cover: Optional[CoverInstance] = None) -> SandwichReport:
    """Verify |Lambda cap K| <= b(X') <= a * |Lambda cap K|."""
    if cx.cells[q] < 1:
        raise ValueError("sandwich check needs at least one cell in the dimension")
    total, report = betti_by_characters(cx, quot, q, caps, cover=cover)
    k = report.pattern_count
    holds = k <= total <= report.a * k
    return SandwichReport(pattern_count=k, betti=total, a=report.a, holds=holds)


@dataclass
class DichotomyResult:
    kind: str                      # "linear_growth" or "bounded"
    bound: Optional[int] = None    # valid when kind == "bounded"
    determinant: Optional[LaurentPolynomial] = None

    @property
    def is_linear(self) -> bool:
        return self.kind == "linear_growth"


def z_dichotomy(cx: EquivariantChainComplex, q: int) -> DichotomyResult:
    """Over Z: linear Betti growth iff det(Laplacian) vanishes identically.

    Otherwise Betti numbers of the cyclic covers are bounded by the degree
    span of the determinant times the number of cells.
    """
    group = _require_abelian(cx.group)
    if group.rank != 1:
        raise NotRankOne("dichotomy requires deck group Z")
    det = determinant(laplacian(cx, q))
    if det.is_zero:
        return DichotomyResult(kind="linear_growth", determinant=det)
    k = det.degree_span(0)
    return DichotomyResult(kind="bounded", bound=k * cx.cells[q], determinant=det)
