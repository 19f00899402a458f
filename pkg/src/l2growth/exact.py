"""Exact integer linear algebra: Smith normal form, certified ranks and kernels.

Betti numbers must be exact integers, so ranks of the instantiated boundary
matrices are computed over the rationals with a certificate:

1. reduce mod a large prime and compute a reduced row echelon form (fast,
   vectorized dense path, or a dict-based sparse path for large structured
   matrices);
2. lift the mod-p kernel basis to rational vectors by rational reconstruction
   (CRT over several primes if needed), clear denominators, and verify
   ``A @ v == 0`` in exact integer arithmetic.

Since rank mod p never exceeds the rational rank, exhibiting
``ncols - rank_p`` verified independent integer kernel vectors certifies the
rational nullity exactly.  A dense Fraction-based elimination remains as the
final fallback (and as the test oracle).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Dict, List, Sequence, Tuple

import numpy as np

_PRIMES = (
    2147483647,
    2147483629,
    2147483587,
    2147483579,
    2147483563,
    2147483549,
)

_SPARSE_THRESHOLD = 200      # min(ncols) above which sparsity is considered
_SPARSE_DENSITY = 0.02       # fraction of nonzeros below which sparse path is used


class _FillIn(Exception):
    """Sparse elimination filled in too much; retry densely."""


# ---------------------------------------------------------------------------
# Smith normal form and small exact determinants
# ---------------------------------------------------------------------------

def smith_normal_form(a: Sequence[Sequence[int]]):
    """Return (U, S, V) with U*A*V = S diagonal, U and V unimodular.

    Diagonal entries are nonnegative and each divides the next.
    Intended for the small (rank <= ~8) matrices describing subgroups.
    """
    m = [[int(x) for x in row] for row in a]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(i, j, q):
        # row_i += q * row_j
        mi, mj = m[i], m[j]
        for k in range(nc):
            mi[k] += q * mj[k]
        ui, uj = u[i], u[j]
        for k in range(nr):
            ui[k] += q * uj[k]

    def add_col(i, j, q):
        # col_i += q * col_j
        for row in m:
            row[i] += q * row[j]
        for row in v:
            row[i] += q * row[j]

    t = 0
    while t < min(nr, nc):
        # locate a nonzero entry of minimal magnitude in the trailing block
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if m[i][j] and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        if i != t:
            swap_rows(t, i)
        if j != t:
            swap_cols(t, j)
        dirty = False
        for i in range(t + 1, nr):
            if m[i][t]:
                q = m[i][t] // m[t][t]
                add_row(i, t, -q)
                if m[i][t]:
                    dirty = True
        for j in range(t + 1, nc):
            if m[t][j]:
                q = m[t][j] // m[t][t]
                add_col(j, t, -q)
                if m[t][j]:
                    dirty = True
        if dirty:
            continue
        # pivot must divide every remaining entry for the divisibility chain
        offender = None
        for i in range(t + 1, nr):
            for j in range(t + 1, nc):
                if m[i][j] % m[t][t]:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(t, offender, 1)
            continue
        if m[t][t] < 0:
            for k in range(nc):
                m[t][k] = -m[t][k]
            for k in range(nr):
                u[t][k] = -u[t][k]
        t += 1
    return u, m, v


def det_int(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a small integer matrix (fraction-free elimination)."""
    n = len(a)
    if n == 0:
        return 1
    m = [[int(x) for x in row] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def inverse_unimodular(a: Sequence[Sequence[int]]) -> List[List[int]]:
    """Exact inverse of an integer matrix with determinant +-1."""
    n = len(a)
    aug = [[Fraction(a[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            val = aug[i][n + j]
            if val.denominator != 1:
                raise ValueError("matrix is not unimodular")
            row.append(int(val))
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# Modular echelon forms
# ---------------------------------------------------------------------------

def _rref_modp_dense(a: np.ndarray, p: int):
    """Full RREF mod p.  Returns (rank, pivot_cols, kernel_basis mod p)."""
    m = np.array(a, dtype=np.int64) % p
    nr, nc = m.shape
    pivots: List[int] = []
    r = 0
    for col in range(nc):
        if r == nr:
            break
        nz = np.nonzero(m[r:, col])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            m[[r, i]] = m[[i, r]]
        inv = pow(int(m[r, col]), p - 2, p)
        m[r] = (m[r] * inv) % p
        rows = np.nonzero(m[:, col])[0]
        rows = rows[rows != r]
        if rows.size:
            m[rows] = (m[rows] - np.outer(m[rows, col], m[r])) % p
        pivots.append(col)
        r += 1
    pivot_set = set(pivots)
    free_cols = [c for c in range(nc) if c not in pivot_set]
    basis = []
    for fc in free_cols:
        vec: Dict[int, int] = {fc: 1}
        for i, pc in enumerate(pivots):
            val = int(m[i, fc])
            if val:
                vec[pc] = (-val) % p
        basis.append(vec)
    return len(pivots), free_cols, basis


def _rref_modp_sparse(rows: List[Dict[int, int]], ncols: int, p: int,
                      fill_cap: int):
    """Sparse full RREF mod p over dict rows.  Raises _FillIn when it densifies."""
    echelon: List[Dict[int, int]] = []
    pivot_of: Dict[int, int] = {}
    stored = 0
    for row in rows:
        r = {c: v % p for c, v in row.items() if v % p}
        while r:
            c = min(r)
            idx = pivot_of.get(c)
            if idx is not None:
                f = r.pop(c)
                for cc, vv in echelon[idx].items():
                    if cc == c:
                        continue
                    nv = (r.get(cc, 0) - f * vv) % p
                    if nv:
                        r[cc] = nv
                    elif cc in r:
                        del r[cc]
            else:
                inv = pow(r[c], p - 2, p)
                r = {cc: (vv * inv) % p for cc, vv in r.items()}
                pivot_of[c] = len(echelon)
                echelon.append(r)
                stored += len(r)
                if stored > fill_cap:
                    raise _FillIn
                break
    # back-substitution to full RREF
    order = sorted(pivot_of)
    for pos in range(len(order) - 1, -1, -1):
        pc = order[pos]
        src = echelon[pivot_of[pc]]
        for prev in range(pos):
            row = echelon[pivot_of[order[prev]]]
            f = row.pop(pc, 0)
            if not f:
                continue
            stored -= len(row) + 1
            for cc, vv in src.items():
                if cc == pc:
                    continue
                nv = (row.get(cc, 0) - f * vv) % p
                if nv:
                    row[cc] = nv
                elif cc in row:
                    del row[cc]
            stored += len(row)
            if stored > fill_cap:
                raise _FillIn
    pivot_set = set(pivot_of)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free_cols:
        vec = {fc: 1}
        for pc, idx in pivot_of.items():
            val = echelon[idx].get(fc)
            if val:
                vec[pc] = (-val) % p
        basis.append(vec)
    return len(pivot_of), free_cols, basis


# ---------------------------------------------------------------------------
# Rational reconstruction and certification
# ---------------------------------------------------------------------------

def rational_reconstruct(u: int, modulus: int) -> Fraction:
    """Find n/d with n/d == u (mod modulus), |n|, d <= sqrt(modulus/2)."""
    u %= modulus
    bound = isqrt(modulus // 2)
    r0, r1 = modulus, u
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound or gcd(r1, abs(t1)) != 1:
        raise ValueError("rational reconstruction failed")
    if t1 < 0:
        r1, t1 = -r1, -t1
    return Fraction(r1, t1)


def _crt_pair(a1: int, m1: int, a2: int, m2: int) -> Tuple[int, int]:
    m = m1 * m2
    x = (a1 + (a2 - a1) * pow(m1, -1, m2) % m2 * m1) % m
    return x, m


def _as_sparse_rows(a) -> Tuple[List[Dict[int, int]], int, int]:
    """Normalize input to (rows-as-dicts with python ints, nrows, ncols)."""
    if isinstance(a, np.ndarray):
        nr, nc = a.shape
        rows = []
        for i in range(nr):
            nz = np.nonzero(a[i])[0]
            rows.append({int(j): int(a[i, j]) for j in nz})
        return rows, nr, nc
    # scipy sparse
    if hasattr(a, "tocoo"):
        coo = a.tocoo()
        nr, nc = coo.shape
        rows = [dict() for _ in range(nr)]
        for i, j, v in zip(coo.row, coo.col, coo.data):
            if v:
                rows[int(i)][int(j)] = int(v)
        return rows, nr, nc
    raise TypeError(f"unsupported matrix type {type(a)!r}")


def _verify_kernel_exact(rows: List[Dict[int, int]], vecs: List[Dict[int, int]],
                         ncols: int) -> bool:
    """Check A @ v == 0 for every candidate, in exact integer arithmetic."""
    for vec in vecs:
        for row in rows:
            if len(row) < len(vec):
                s = sum(v * vec.get(c, 0) for c, v in row.items())
            else:
                s = sum(v * row.get(c, 0) for c, v in vec.items())
            if s != 0:
                return False
    return True


def _kernel_exact_fractions(rows: List[Dict[int, int]], nrows: int, ncols: int):
    """Fraction-based RREF; exact but slow.  Final fallback and test oracle."""
    m = [[Fraction(row.get(j, 0)) for j in range(ncols)] for row in rows]
    pivots: List[int] = []
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    pivot_set = set(pivots)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free_cols:
        entries = {fc: Fraction(1)}
        for i, pc in enumerate(pivots):
            if m[i][fc]:
                entries[pc] = -m[i][fc]
        denom = 1
        for val in entries.values():
            denom = denom * val.denominator // gcd(denom, val.denominator)
        vec = {c: int(v * denom) for c, v in entries.items() if v}
        basis.append(vec)
    return len(pivots), basis


def nullity_certified(a) -> int:
    """Exact nullity (rational kernel dimension) of an integer matrix."""
    return kernel_certified(a)[0]


def rank_certified(a) -> int:
    """Exact rational rank of an integer matrix."""
    nr, nc = a.shape
    if nr == 0 or nc == 0:
        return 0
    if nr < nc:
        a = a.T  # rank is transpose-invariant; fewer columns is cheaper
        nr, nc = nc, nr
    return nc - kernel_certified(a)[0]


def kernel_certified(a) -> Tuple[int, List[Dict[int, int]]]:
    """Exact nullity with verified integer kernel vectors (as sparse dicts).

    The returned vectors are linearly independent over Q and satisfy
    A @ v == 0 exactly; their count equals the rational nullity.
    """
    rows, nrows, ncols = _as_sparse_rows(a)
    if ncols == 0:
        return 0, []
    nnz = sum(len(r) for r in rows)
    if nnz == 0:
        return ncols, [{c: 1} for c in range(ncols)]

    use_sparse = (min(nrows, ncols) > _SPARSE_THRESHOLD
                  and nnz < _SPARSE_DENSITY * nrows * ncols)
    fill_cap = max(4 * nnz + 4096, int(0.25 * nrows * ncols))

    attempts = []  # (p, free_cols, basis)
    for p in _PRIMES:
        if use_sparse:
            try:
                rank, free_cols, basis = _rref_modp_sparse(rows, ncols, p, fill_cap)
            except _FillIn:
                use_sparse = False
                rank, free_cols, basis = _rref_modp_dense(_densify(rows, nrows, ncols, p), p)
        else:
            rank, free_cols, basis = _rref_modp_dense(_densify(rows, nrows, ncols, p), p)
        if rank == min(nrows, ncols) and not free_cols:
            # full column rank mod p certifies full rank over Q
            return 0, []
        attempts.append((p, tuple(free_cols), basis))
        # keep only attempts agreeing with the maximal-rank structure
        best = min(attempts, key=lambda t: len(t[1]))
        group = [t for t in attempts if t[1] == best[1]]
        candidates = _combine_and_reconstruct(group, ncols)
        if candidates is None:
            continue
        if _verify_kernel_exact(rows, candidates, ncols):
            return len(candidates), candidates
    # all primes exhausted without a certificate: exact fallback
    rank, basis = _kernel_exact_fractions(rows, nrows, ncols)
    return ncols - rank, basis


def _densify(rows: List[Dict[int, int]], nrows: int, ncols: int, p: int) -> np.ndarray:
    out = np.zeros((nrows, ncols), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, v in row.items():
            out[i, j] = v % p
    return out


def _combine_and_reconstruct(group, ncols: int):
    """CRT-combine matching mod-p kernels and lift to integer vectors."""
    p0, free_cols, basis0 = group[0]
    k = len(basis0)
    combined = [dict(vec) for vec in basis0]
    modulus = p0
    for p, _, basis in group[1:]:
        for i in range(k):
            merged = {}
            keys = set(combined[i]) | set(basis[i])
            for c in keys:
                x, m = _crt_pair(combined[i].get(c, 0), modulus, basis[i].get(c, 0), p)
                merged[c] = x
            combined[i] = merged
        modulus *= p
    out = []
    for vec in combined:
        try:
            fracs = {c: rational_reconstruct(v, modulus) for c, v in vec.items()}
        except ValueError:
            return None
        denom = 1
        for f in fracs.values():
            denom = denom * f.denominator // gcd(denom, f.denominator)
        ints = {c: int(f * denom) for c, f in fracs.items() if f}
        if not ints:
            return None
        g = 0
        for v in ints.values():
            g = gcd(g, abs(v))
        if g > 1:
            ints = {c: v // g for c, v in ints.items()}
        out.append(ints)
    return out
