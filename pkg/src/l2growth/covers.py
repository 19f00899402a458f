"""Finite covers: instantiated boundary matrices, exact Betti numbers, spectra.

Each group element in a boundary entry is replaced by the permutation matrix
of right multiplication by its image in the finite quotient; this is a ring
homomorphism, so instantiated boundaries still compose to zero and the
instantiated Laplacian is the Laplacian of the cover.

Betti numbers come from certified rational ranks of the integer boundary
matrices; floating eigensolvers serve spectral statistics only, and the
near-zero eigenvalue count is cross-validated against the exact nullity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional

import numpy as np
import scipy.sparse as sp

from . import exact
from .caps import DEFAULT_CAPS, Caps
from .errors import (CrossCheckMismatch, DimensionOutOfRange, OrderCapExceeded,
                     SizeCapExceeded)
from .group_ring import (EquivariantChainComplex, GroupRingMatrix, gamma_trace,
                         evaluate_polynomial, laplacian, support_radius)
from .groups import FiniteQuotient, short_length
from .polynomials import as_poly

_ZERO_TOL = 1e-7


class CoverInstance:
    """A chain complex instantiated on a finite quotient."""

    def __init__(self, cx: EquivariantChainComplex, quot: FiniteQuotient,
                 caps: Caps = DEFAULT_CAPS):
        max_cells = max(cx.cells) if cx.cells else 0
        if quot.order * max_cells > caps.order:
            raise OrderCapExceeded(
                f"instantiated size {quot.order * max_cells} exceeds cap {caps.order}")
        self.cx = cx
        self.quotient = quot
        self.caps = caps
        self.order = quot.order
        self._boundaries: Dict[int, sp.csr_matrix] = {}
        for q, d in cx.boundaries.items():
            self._boundaries[q] = self._instantiate_matrix(d)
        # instantiation is a ring homomorphism, so d'd' = 0 must survive
        for q in self._boundaries:
            if q + 1 in self._boundaries:
                prod = self._boundaries[q] @ self._boundaries[q + 1]
                if prod.nnz and np.any(prod.data):
                    raise CrossCheckMismatch(
                        f"instantiated boundaries {q},{q + 1} do not compose to zero")
        self._laplacians: Dict[int, sp.csr_matrix] = {}
        self._betti: Dict[int, int] = {}
        self._ranks: Dict[int, int] = {}
        self._eigs: Dict[int, np.ndarray] = {}

    # -- construction ------------------------------------------------------
    def _instantiate_matrix(self, m: GroupRingMatrix) -> sp.csr_matrix:
        n = self.order
        quot = self.quotient
        rows, cols, vals = [], [], []
        base = np.arange(n, dtype=np.intp)
        for i in range(m.nrows):
            for j in range(m.ncols):
                for el, coeff in m.entries[i][j].terms.items():
                    if coeff != int(coeff):
                        raise ValueError("cover instantiation requires integer coefficients")
                    perm = quot.right_mult_indices(el)
                    rows.append(i * n + base)
                    cols.append(j * n + perm)
                    vals.append(np.full(n, int(coeff), dtype=np.int64))
        shape = (m.nrows * n, m.ncols * n)
        if not rows:
            return sp.csr_matrix(shape, dtype=np.int64)
        out = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=shape, dtype=np.int64)
        return out.tocsr()

    # -- matrices ----------------------------------------------------------
    def boundary(self, q: int) -> Optional[sp.csr_matrix]:
        return self._boundaries.get(q)

    def laplacian(self, q: int) -> sp.csr_matrix:
        if not 0 <= q <= self.cx.top_dim:
            raise DimensionOutOfRange(f"dimension {q} not in [0, {self.cx.top_dim}]")
        if q not in self._laplacians:
            n = self.cx.cells[q] * self.order
            acc = sp.csr_matrix((n, n), dtype=np.int64)
            down = self._boundaries.get(q)
            if down is not None:
                acc = acc + down.T @ down
            up = self._boundaries.get(q + 1)
            if up is not None:
                acc = acc + up @ up.T
            if (acc != acc.T).nnz:
                raise CrossCheckMismatch("instantiated laplacian is not symmetric")
            self._laplacians[q] = acc.tocsr()
        return self._laplacians[q]

    # -- exact invariants ----------------------------------------------------
    def _rank(self, q: int) -> int:
        if q not in self._ranks:
            d = self._boundaries.get(q)
            self._ranks[q] = 0 if d is None else exact.rank_certified(d)
        return self._ranks[q]

    def betti(self, q: int) -> int:
        """Exact q-th Betti number of the cover (rational rank formula)."""
        if not 0 <= q <= self.cx.top_dim:
            raise DimensionOutOfRange(f"dimension {q} not in [0, {self.cx.top_dim}]")
        if q not in self._betti:
            total = self.cx.cells[q] * self.order
            self._betti[q] = total - self._rank(q) - self._rank(q + 1)
        return self._betti[q]

    def euler_characteristic(self) -> int:
        return sum((-1) ** q * self.betti(q) for q in range(self.cx.top_dim + 1))

    # -- spectra -------------------------------------------------------------
    def eigenvalues(self, q: int) -> np.ndarray:
        """All eigenvalues of the instantiated Laplacian, ascending.

        The count of near-zero eigenvalues is cross-validated against the
        exact Betti number; a mismatch raises instead of being accepted.
        """
        if q not in self._eigs:
            lap = self.laplacian(q)
            if lap.shape[0] > self.caps.eig:
                raise SizeCapExceeded(
                    f"matrix size {lap.shape[0]} exceeds eigensolver cap {self.caps.eig}")
            if lap.shape[0] == 0:
                eigs = np.zeros(0)
            else:
                eigs = np.sort(np.linalg.eigvalsh(lap.toarray().astype(float)))
            near_zero = int(np.count_nonzero(np.abs(eigs) < _ZERO_TOL))
            if near_zero != self.betti(q):
                raise CrossCheckMismatch(
                    f"near-zero eigenvalue count {near_zero} != exact betti {self.betti(q)}")
            self._eigs[q] = eigs
        return self._eigs[q]

    def count_eigs_below(self, q: int, lam: float) -> int:
        """#{eigenvalues <= lam}, closed under the zero tolerance."""
        eigs = self.eigenvalues(q)
        return int(np.searchsorted(eigs, lam + 1e-9, side="right"))

    def normalized_trace(self, p, q: int) -> Fraction:
        """Exact matrix trace of p(Laplacian') divided by the quotient order."""
        poly = as_poly(p)
        lap = self.laplacian(q)
        traces = _power_traces(lap, poly.degree)
        total = sum(Fraction(c) * traces[k] for k, c in enumerate(poly.coeffs))
        return Fraction(total, self.order)


def _power_traces(m: sp.csr_matrix, deg: int):
    """[tr(M^0), ..., tr(M^deg)] exactly, guarding against int64 overflow."""
    n = m.shape[0]
    traces = [n]
    if deg <= 0 or n == 0:
        return traces + [0] * max(0, deg)
    max_a = int(abs(m).max()) if m.nnz else 0
    power = m.copy()
    traces.append(int(power.diagonal().sum()))
    max_p = max_a
    obj = None
    for _ in range(deg - 1):
        if obj is None:
            if max_a and n * max_p * max_a < 2 ** 62:
                power = power @ m
                max_p = int(abs(power).max()) if power.nnz else 0
                traces.append(int(power.diagonal().sum()))
                continue
            # switch to exact object arithmetic
            obj = power.toarray().astype(object)
            dense_m = m.toarray().astype(object)
        obj = obj @ dense_m
        traces.append(int(np.trace(obj)))
    return traces


def instantiate(cx: EquivariantChainComplex, quot: FiniteQuotient,
                caps: Caps = DEFAULT_CAPS) -> CoverInstance:
    """Instantiate every boundary matrix on the finite quotient."""
    return CoverInstance(cx, quot, caps)


def betti(cx: EquivariantChainComplex, quot: FiniteQuotient, q: int,
          caps: Caps = DEFAULT_CAPS) -> int:
    """Exact Betti number b_q of the cover attached to the quotient."""
    return CoverInstance(cx, quot, caps).betti(q)


@dataclass
class TraceEqualityReport:
    lhs: Fraction            # trace against the deck group
    rhs: Fraction            # normalized trace on the cover
    degree: int
    short: float
    radius: int
    condition_met: bool
    equal: bool


def verify_trace_equality(cx: EquivariantChainComplex, quot: FiniteQuotient,
                          q: int, p, caps: Caps = DEFAULT_CAPS,
                          cover: Optional[CoverInstance] = None) -> TraceEqualityReport:
    """Compare the deck-group trace of p(Laplacian) with the cover trace.

    When deg(p) < short/R the two must agree exactly; a mismatch under the
    verified condition is a library bug and raises.
    """
    poly = as_poly(p)
    lap = laplacian(cx, q)
    radius = support_radius(lap, caps)
    s = short_length(cx.group, quot.subgroup, caps=caps)
    lhs = Fraction(gamma_trace(evaluate_polynomial(poly, lap)))
    if cover is None:
        cover = CoverInstance(cx, quot, caps)
    rhs = cover.normalized_trace(poly, q)
    condition = radius == 0 or poly.degree < s / radius
    equal = lhs == rhs
    if condition and not equal:
        raise CrossCheckMismatch(
            f"trace equality violated under verified condition: {lhs} != {rhs}")
    return TraceEqualityReport(lhs=lhs, rhs=rhs, degree=poly.degree, short=s,
                               radius=radius, condition_met=condition, equal=equal)
