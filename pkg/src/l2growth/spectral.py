"""Spectral density estimation and the sublinear Betti bound machinery.

The spectral density F counts, per deck-group trace, the Laplacian spectrum
up to lambda; its rescaling mu(x) = F(K*x)/a is a probability measure on
[0, 1].  All bounds share one engine: a shifted Chebyshev polynomial that is
1 at 0 and tiny on [z, 1] combined with a trace identity valid for degrees
below short/R, giving

    b_q(cover) <= a * index * (mu(z) + 4 * exp(-2 n sqrt(z))).

The gap, power-decay, and logarithmic-decay regimes differ only in the
choice of z and in how mu(z) is controlled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import qmc

from .caps import DEFAULT_CAPS, Caps
from .covers import CoverInstance
from .errors import (DegenerateZ, FamilyNotLogUniform, GapNotVerified,
                     HypothesisUnverified, InsufficientGrid, LambdaAboveGap,
                     NotAbelian, ShortTooSmall)
from .group_ring import EquivariantChainComplex, laplacian, norm_bound, support_radius
from .groups import FreeAbelian, quotient as make_quotient, short_length
from .pattern import determinant, evaluate_matrix_at_characters
from .polynomials import Poly, chebyshev_coefficients

__all__ = [
    "DensityEstimate", "Provenance", "density_zn", "density_by_quotients",
    "chebyshev", "luck_polynomial", "LuckPolynomial", "j_bound", "JBound",
    "BoundReport", "betti_bound_general", "gap_bound", "eig_count_bound",
    "ns_bound", "sublog_bound", "estimate_ns", "NsEstimate",
    "uniform_gap_exponent", "UniformGapReport", "certify_gap", "GapCertificate",
    "cosine_density_closed_form",
]


# ---------------------------------------------------------------------------
# Density estimates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Provenance:
    kind: str        # "closed_form" | "torus_quadrature" | "quotient_approximation"
    detail: Optional[int] = None   # sample count / quotient order

    def __str__(self):
        return self.kind if self.detail is None else f"{self.kind}({self.detail})"


class DensityEstimate:
    """Nondecreasing estimate of the spectral density F on [0, K].

    Values lie in [0, a].  Backed either by sorted eigenvalue samples with a
    per-sample weight, or by a closed-form function.
    """

    def __init__(self, K: float, a: int, provenance: Provenance,
                 samples: Optional[np.ndarray] = None,
                 weight: Optional[float] = None,
                 fn: Optional[Callable[[np.ndarray], np.ndarray]] = None):
        if (samples is None) == (fn is None):
            raise ValueError("exactly one of samples/fn must be given")
        self.K = float(K)
        self.a = int(a)
        self.provenance = provenance
        self._samples = np.sort(np.asarray(samples, dtype=float)) if samples is not None else None
        self._weight = float(weight) if weight is not None else None
        self._fn = fn
        self.members: List[Tuple[int, "DensityEstimate"]] = []

    # -- constructors --------------------------------------------------------
    @classmethod
    def from_samples(cls, eigenvalues, n_points: int, K: float, a: int,
                     provenance: Provenance) -> "DensityEstimate":
        return cls(K, a, provenance, samples=np.asarray(eigenvalues, dtype=float),
                   weight=1.0 / n_points)

    @classmethod
    def from_function(cls, fn: Callable, K: float, a: int,
                      provenance: Optional[Provenance] = None) -> "DensityEstimate":
        return cls(K, a, provenance or Provenance("closed_form"), fn=fn)

    # -- evaluation ----------------------------------------------------------
    def F(self, lam):
        """Estimated spectral density at lambda (vectorized)."""
        if self._fn is not None:
            return self._fn(lam)
        lam_arr = np.asarray(lam, dtype=float)
        counts = np.searchsorted(self._samples, lam_arr + 1e-12, side="right")
        out = counts * self._weight
        return float(out) if np.isscalar(lam) or lam_arr.ndim == 0 else out

    def F_at_zero(self) -> float:
        return float(self.F(0.0))

    def mu(self, x):
        """Rescaled probability distribution mu(x) = F(K x) / a."""
        return self.F(np.multiply(x, self.K)) / self.a

    def mass_strictly_below(self, lam: float) -> float:
        if self._fn is not None:
            return float(self._fn(np.nextafter(lam, -np.inf)))
        count = np.searchsorted(self._samples, lam - 1e-12, side="left")
        return float(count * self._weight)

    def integrate(self, func: Callable[[np.ndarray], np.ndarray]) -> float:
        """Integral of func against d(mu), the rescaled spectral measure."""
        if self._samples is not None:
            if self._samples.size == 0:
                return 0.0
            vals = func(self._samples / self.K)
            return float(np.sum(vals) * self._weight / self.a)
        xs = np.linspace(0.0, 1.0, 20001)
        fvals = np.asarray(self._fn(xs * self.K), dtype=float) / self.a
        mids = func(0.5 * (xs[:-1] + xs[1:]))
        return float(np.sum(mids * np.diff(fvals)))

    def to_grid(self, grid) -> np.ndarray:
        return np.asarray(self.F(np.asarray(grid, dtype=float)), dtype=float)

    def __repr__(self):
        return (f"DensityEstimate(K={self.K}, a={self.a}, "
                f"provenance={self.provenance})")


def cosine_density_closed_form(diag: float, off: float) -> DensityEstimate:
    """Exact density for a 1x1 symbol diag - off*(g + g^{-1}) over Z."""
    k = diag + 2 * abs(off)

    def fn(lam):
        arg = np.clip((diag - np.asarray(lam, dtype=float)) / (2 * abs(off)), -1.0, 1.0)
        out = np.arccos(arg) / np.pi
        return float(out) if np.isscalar(lam) else out

    return DensityEstimate.from_function(fn, K=k, a=1)


def density_zn(cx: EquivariantChainComplex, q: int, sample_count: int = 4096,
               seed: int = 0, caps: Caps = DEFAULT_CAPS) -> DensityEstimate:
    """Quasi-random character quadrature for the density of a Z^n complex.

    Deterministic for a fixed seed (scrambled Halton points).
    """
    if not isinstance(cx.group, FreeAbelian):
        raise NotAbelian("torus quadrature requires a free abelian deck group")
    if sample_count < 1000:
        raise ValueError("sample_count must be at least 1000")
    lap = laplacian(cx, q)
    a = cx.cells[q]
    k = float(norm_bound(lap)) if a else 2.0
    n = cx.group.rank
    sampler = qmc.Halton(d=n, scramble=True, seed=seed)
    points = sampler.random(sample_count)
    if a == 0:
        return DensityEstimate.from_samples(np.zeros(0), sample_count, k, 0,
                                            Provenance("torus_quadrature", sample_count))
    if a == 1:
        entry = lap.entries[0][0]
        vals = np.zeros(sample_count)
        for e, c in entry.terms.items():
            vals += float(c) * np.cos(2 * np.pi * (points @ np.asarray(e, dtype=float)))
        eigs = vals
    else:
        blocks = evaluate_matrix_at_characters(lap, points)
        eigs = np.linalg.eigvalsh(blocks).ravel()
    return DensityEstimate.from_samples(eigs, sample_count, k, a,
                                        Provenance("torus_quadrature", sample_count))


def density_by_quotients(cx: EquivariantChainComplex, q: int,
                         quotients: Sequence, caps: Caps = DEFAULT_CAPS
                         ) -> DensityEstimate:
    """Density approximation from the eigenvalues of a family of covers.

    Returns the estimate from the largest member; the per-member sequence is
    attached as ``.members`` to exhibit convergence.
    """
    lap = laplacian(cx, q)
    a = cx.cells[q]
    k = float(norm_bound(lap)) if a else 2.0
    members = []
    for quot in sorted(quotients, key=lambda qq: qq.order):
        cover = CoverInstance(cx, quot, caps)
        eigs = cover.eigenvalues(q)
        est = DensityEstimate.from_samples(eigs, quot.order, k, a,
                                           Provenance("quotient_approximation", quot.order))
        members.append((quot.order, est))
    if not members:
        raise ValueError("at least one quotient required")
    result = members[-1][1]
    result.members = members
    return result


# ---------------------------------------------------------------------------
# Chebyshev engine
# ---------------------------------------------------------------------------

def chebyshev(n: int, x):
    """First-kind Chebyshev value T_n(x); recurrence inside [-1, 1], closed
    form 0.5*((x + s)^n + (x - s)^n) with s = sqrt(x^2 - 1) outside."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    x_arr = np.asarray(x, dtype=float)
    out = np.empty_like(x_arr)
    inside = np.abs(x_arr) <= 1.0
    if np.any(inside):
        out[inside] = np.cos(n * np.arccos(x_arr[inside]))
    if np.any(~inside):
        y = x_arr[~inside]
        s = np.sqrt(y * y - 1.0)
        out[~inside] = 0.5 * ((y + s) ** n + (y - s) ** n)
    return float(out) if np.isscalar(x) or x_arr.ndim == 0 else out


def _log_t_plus_1(n: int, y):
    """log(T_n(y) + 1) for y >= 1, stable for huge T_n."""
    t = n * np.arccosh(np.asarray(y, dtype=float))
    return t + 2.0 * np.log1p(np.exp(-t)) - math.log(2.0)


class LuckPolynomial:
    """The degree-n comparison polynomial p(x) = (T_n(l(x)) + 1)/(T_n(l(0)) + 1).

    l maps [z, 1] onto [-1, 1] with l(0) = (1+z)/(1-z) > 1, so p(0) = 1, p is
    nonnegative on [0, 1], and p is exponentially small on [z, 1].
    """

    def __init__(self, n: int, z):
        if n < 1:
            raise ValueError("degree must be at least 1")
        zf = float(z)
        if not 0.0 < zf < 1.0:
            raise DegenerateZ(f"z={z} outside (0, 1)")
        self.n = n
        self.z = zf
        self.z_exact = Fraction(z)
        self.l0 = (1.0 + zf) / (1.0 - zf)
        self._log_denom = float(_log_t_plus_1(n, self.l0))
        self._coeffs: Optional[Poly] = None

    def _l(self, x):
        return (-2.0 / (1.0 - self.z)) * np.asarray(x, dtype=float) + self.l0

    def log_value(self, x) -> float:
        """log p(x); -inf where p vanishes.  Defined for x in [0, 1]."""
        # rounding can push l(1) infinitesimally below -1; clamp
        lx = np.maximum(self._l(x), -1.0)
        num = np.where(np.abs(lx) <= 1.0,
                       np.cos(self.n * np.arccos(np.clip(lx, -1, 1))) + 1.0,
                       np.nan)
        with np.errstate(divide="ignore"):
            log_num = np.where(lx > 1.0, _log_t_plus_1(self.n, np.maximum(lx, 1.0)),
                               np.log(num))
        out = log_num - self._log_denom
        return float(out) if np.isscalar(x) or np.asarray(x).ndim == 0 else out

    def value(self, x):
        out = np.exp(self.log_value(x))
        return float(out) if np.isscalar(x) or np.asarray(x).ndim == 0 else out

    __call__ = value

    def coefficients(self) -> Poly:
        """Exact rational coefficients (z taken exactly as given)."""
        if self._coeffs is None:
            z = self.z_exact
            l_poly = Poly([Fraction(1 + z, 1 - z), Fraction(-2, 1 - z)])
            t_of_l = chebyshev_coefficients(self.n).compose(l_poly)
            denom = t_of_l(Fraction(0)) + 1
            self._coeffs = (t_of_l + Poly([1])) / denom
        return self._coeffs

    def tail_bound(self) -> float:
        """p(z) <= 2/(T_n(l(0)) + 1) <= 4 exp(-2 n sqrt(z))."""
        return 4.0 * math.exp(-2.0 * self.n * math.sqrt(self.z))


def luck_polynomial(n: int, z) -> LuckPolynomial:
    """Comparison polynomial for the window [z, 1]."""
    return LuckPolynomial(n, z)


@dataclass
class JBound:
    bound: float              # mu(z) + 4 exp(-2 n sqrt(z))
    mu_z: float
    tail: float
    direct_integral: float    # integral of p_n against the measure


def j_bound(n: int, density: DensityEstimate, z: float) -> JBound:
    """Upper bound for the extremal polynomial integral at window z."""
    if not 0.0 < float(z) < 1.0:
        raise DegenerateZ(f"z={z} outside (0, 1)")
    mu_z = float(density.mu(z))
    tail = 4.0 * math.exp(-2.0 * n * math.sqrt(float(z)))
    if n >= 1:
        p = LuckPolynomial(n, z)
        direct = density.integrate(p.value)
    else:
        direct = density.integrate(lambda x: np.ones_like(np.asarray(x, dtype=float)))
    return JBound(bound=mu_z + tail, mu_z=mu_z, tail=tail, direct_integral=direct)


# ---------------------------------------------------------------------------
# Gap verification
# ---------------------------------------------------------------------------

@dataclass
class GapCertificate:
    certified_level: float
    grid_minimum: float
    lipschitz: float
    grid_per_dim: int


def certify_gap(cx: EquivariantChainComplex, q: int, grid_per_dim: int = 4096,
                caps: Caps = DEFAULT_CAPS) -> GapCertificate:
    """Certified lower bound for the bottom of the symbol spectrum (abelian).

    Minimizes the smallest eigenvalue of the evaluated symbol over a uniform
    character grid and subtracts a Lipschitz slack derived from the
    coefficient l1 norms, so the returned level is a true lower bound for
    the whole torus.
    """
    if not isinstance(cx.group, FreeAbelian):
        raise NotAbelian("gap certification requires a free abelian deck group")
    n = cx.group.rank
    lap = laplacian(cx, q)
    a = cx.cells[q]
    if a == 0:
        return GapCertificate(math.inf, math.inf, 0.0, grid_per_dim)
    per_dim = grid_per_dim if n == 1 else max(8, int(round(grid_per_dim ** (1.0 / n))))
    axes = [np.arange(per_dim) / per_dim] * n
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)
    if a == 1:
        entry = lap.entries[0][0]
        vals = np.zeros(points.shape[0])
        for e, c in entry.terms.items():
            vals += float(c) * np.cos(2 * np.pi * (points @ np.asarray(e, dtype=float)))
        grid_min = float(vals.min())
    else:
        blocks = evaluate_matrix_at_characters(lap, points)
        grid_min = float(np.linalg.eigvalsh(blocks)[:, 0].min())
    sq_sum = 0.0
    for row in lap.entries:
        for e in row:
            s = sum(abs(c) * sum(abs(v) for v in g) for g, c in e.terms.items())
            sq_sum += float(s) ** 2
    lipschitz = 2 * math.pi * math.sqrt(sq_sum)
    level = grid_min - lipschitz * 0.5 / per_dim
    return GapCertificate(certified_level=level, grid_minimum=grid_min,
                          lipschitz=lipschitz, grid_per_dim=per_dim)


def _verify_gap(lambda0: float, density: Optional[DensityEstimate],
                certificate: Optional[GapCertificate]) -> str:
    """Return the verification mode, or raise GapNotVerified."""
    if certificate is not None and certificate.certified_level >= lambda0:
        return "certified"
    if density is not None:
        mass = density.mass_strictly_below(lambda0)
        if mass == 0.0:
            return str(density.provenance)
    if certificate is not None:
        raise GapNotVerified(
            f"certified spectral floor {certificate.certified_level:.6g} "
            f"is below lambda0={lambda0}")
    raise GapNotVerified(f"density has mass below lambda0={lambda0}")


# ---------------------------------------------------------------------------
# Bound reports
# ---------------------------------------------------------------------------

@dataclass
class BoundReport:
    regime: str
    constants: dict
    bound: float
    betti: int
    satisfied: bool

    def lines(self) -> List[str]:
        parts = [f"regime={self.regime}"]
        for k, v in self.constants.items():
            if isinstance(v, float):
                parts.append(f"{k}={v:.6g}")
            else:
                parts.append(f"{k}={v}")
        parts.append(f"bound={self.bound:.6g}")
        parts.append(f"betti={self.betti}")
        parts.append("SATISFIED" if self.satisfied else "VIOLATED")
        return parts


def _chain_degree(short: float, radius: int) -> int:
    """Largest integer strictly below short/radius (the usable degree)."""
    if radius == 0:
        return 50  # scalar symbol: the trace identity holds in every degree
    ratio = short / radius
    n = math.ceil(ratio) - 1
    return max(n, 0)


def _base_constants(cx, quot, q, caps):
    lap = laplacian(cx, q)
    a = cx.cells[q]
    k = float(norm_bound(lap))
    r = support_radius(lap, caps)
    s = short_length(cx.group, quot.subgroup, caps=caps)
    return lap, a, k, r, s


def betti_bound_general(cx: EquivariantChainComplex, quot, q: int,
                        density: DensityEstimate, z: float,
                        caps: Caps = DEFAULT_CAPS,
                        cover: Optional[CoverInstance] = None) -> BoundReport:
    """Raw comparison-polynomial bound b_q <= a * index * J(n, mu) at window z."""
    _lap, a, k, r, s = _base_constants(cx, quot, q, caps)
    n = _chain_degree(s, r)
    jb = j_bound(n, density, z)
    bound = a * quot.order * jb.bound
    if cover is None:
        cover = CoverInstance(cx, quot, caps)
    b = cover.betti(q)
    return BoundReport(
        regime="raw",
        constants={"a": a, "index": quot.order, "short": s, "R": r, "K": k,
                   "n": n, "z": float(z), "mu_z": jb.mu_z, "tail": jb.tail,
                   "direct_integral": jb.direct_integral},
        bound=bound, betti=b, satisfied=b <= bound)


def gap_bound(cx: EquivariantChainComplex, quot, q: int, lambda0: float,
              density: Optional[DensityEstimate] = None,
              certificate: Optional[GapCertificate] = None,
              caps: Caps = DEFAULT_CAPS,
              cover: Optional[CoverInstance] = None) -> BoundReport:
    """Exponential bound 4a * index * exp(-M short), M = (2/R) sqrt(lambda0/K)."""
    _lap, a, k, r, s = _base_constants(cx, quot, q, caps)
    mode = _verify_gap(lambda0, density, certificate)
    if r == 0:
        m = math.inf
        bound = 0.0
    else:
        m = (2.0 / r) * math.sqrt(lambda0 / k)
        bound = 4.0 * a * quot.order * math.exp(-m * s)
    if cover is None:
        cover = CoverInstance(cx, quot, caps)
    b = cover.betti(q)
    return BoundReport(
        regime="gap",
        constants={"a": a, "index": quot.order, "short": s, "R": r, "K": k,
                   "lambda0": lambda0, "M": m, "gap_mode": mode},
        bound=bound, betti=b, satisfied=b <= bound)


def eig_count_bound(cx: EquivariantChainComplex, quot, q: int, lam: float,
                    lambda0: float,
                    density: Optional[DensityEstimate] = None,
                    certificate: Optional[GapCertificate] = None,
                    caps: Caps = DEFAULT_CAPS,
                    cover: Optional[CoverInstance] = None) -> BoundReport:
    """Bound the number of cover eigenvalues <= lam under a spectral gap.

    The guarantee needs lam < lambda0 (the comparison polynomial is monotone
    there); larger lam still yields a finite comparison value, reported with
    ``lambda_below_gap`` False.
    """
    _lap, a, k, r, s = _base_constants(cx, quot, q, caps)
    mode = _verify_gap(lambda0, density, certificate)
    if lam >= k:
        raise LambdaAboveGap(f"lam={lam} is not below the spectral bound K={k}")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    n = _chain_degree(s, r)
    if n < 1:
        raise ShortTooSmall("short/R leaves no usable polynomial degree")
    z = lambda0 / k
    p = LuckPolynomial(n, z)
    log_ratio = p.log_value(z) - p.log_value(lam / k)
    bound = quot.order * float(np.exp(log_ratio))
    if cover is None:
        cover = CoverInstance(cx, quot, caps)
    count = cover.count_eigs_below(q, lam)
    return BoundReport(
        regime="eig_count",
        constants={"a": a, "index": quot.order, "short": s, "R": r, "K": k,
                   "lambda": lam, "lambda0": lambda0, "n": n, "z": z,
                   "gap_mode": mode, "lambda_below_gap": lam < lambda0},
        bound=bound, betti=count, satisfied=count <= bound)


def _verify_power_hypothesis(density: DensityEstimate, beta: float,
                             c_density: float, cutoff: float,
                             extra_points=()) -> None:
    grid = np.geomspace(max(1e-9, cutoff * 1e-7), cutoff, 200)
    if extra_points:
        grid = np.sort(np.concatenate([grid, np.asarray(extra_points, dtype=float)]))
    vals = np.asarray(density.F(grid), dtype=float)
    limit = c_density * grid ** beta
    bad = vals > limit  # non-strict domination is all the bound chain needs
    if np.any(bad):
        i = int(np.argmax(bad))
        raise HypothesisUnverified(
            f"F({grid[i]:.6g}) = {vals[i]:.6g} is not below "
            f"C*lambda^beta = {limit[i]:.6g}")


def ns_bound(cx: EquivariantChainComplex, quot, q: int, beta: float,
             c_density: float, density: DensityEstimate,
             caps: Caps = DEFAULT_CAPS, cutoff: Optional[float] = None,
             cover: Optional[CoverInstance] = None) -> BoundReport:
    """Power-decay bound C1 * index * (log(short)/short)^(2 beta).

    Requires the verified density hypothesis F(lambda) < C * lambda^beta on
    a grid up to the cutoff; the constant C1 is assembled from the explicit
    inequality chain, never fitted.
    """
    if beta <= 0 or c_density <= 0:
        raise HypothesisUnverified("beta and C must be positive")
    _lap, a, k, r, s = _base_constants(cx, quot, q, caps)
    n = _chain_degree(s, r)
    if n / beta <= 1.0:
        raise ShortTooSmall(
            f"degree n={n} is too small for decay exponent beta={beta}")
    ratio = n / beta
    z = (math.log(ratio) / ratio) ** 2
    kz = k * z
    cut = cutoff if cutoff is not None else k
    if kz > cut:
        raise HypothesisUnverified(
            f"window K*z = {kz:.6g} lies beyond the verified cutoff {cut:.6g}")
    _verify_power_hypothesis(density, beta, c_density, cut, extra_points=[kz])
    c_mu = c_density * (k ** beta) / a
    j_val = c_mu * z ** beta + 4.0 * math.exp(-2.0 * n * math.sqrt(z))
    bound = a * quot.order * j_val
    if s <= 1:
        c1 = math.inf
    else:
        c1 = a * j_val / ((math.log(s) / s) ** (2 * beta))
    if cover is None:
        cover = CoverInstance(cx, quot, caps)
    b = cover.betti(q)
    return BoundReport(
        regime="ns",
        constants={"a": a, "index": quot.order, "short": s, "R": r, "K": k,
                   "beta": beta, "C_density": c_density, "n": n, "z": z,
                   "C1": c1},
        bound=bound, betti=b, satisfied=b <= bound)


def sublog_bound(cx: EquivariantChainComplex, quot, q: int,
                 density: DensityEstimate, caps: Caps = DEFAULT_CAPS,
                 cover: Optional[CoverInstance] = None) -> BoundReport:
    """Logarithmic-decay bound C * index / log(short).

    Uses the universal density estimate F(lambda) < a log(K) / (-log lambda)
    (verified empirically on the estimate's grid) and requires a vanishing
    mass at zero; for abelian groups the latter is certified by a nonzero
    symbol determinant.
    """
    _lap, a, k, r, s = _base_constants(cx, quot, q, caps)
    if s < 3:
        raise ShortTooSmall(f"short={s} must be at least 3")
    n = _chain_degree(s, r)
    if n < 2:
        raise ShortTooSmall(f"degree n={n} leaves no usable window")
    if isinstance(cx.group, FreeAbelian) and a <= 8:
        det = determinant(laplacian(cx, q))
        if det.is_zero:
            raise HypothesisUnverified(
                "symbol determinant vanishes identically: nonzero harmonic mass")
    elif density.F_at_zero() > 0:
        raise HypothesisUnverified("density has an atom at zero")
    z = (math.log(math.log(n)) / n) ** 2
    kz = k * z
    if kz >= 1.0:
        raise ShortTooSmall(f"window K*z = {kz:.6g} is not below 1")
    log_k = math.log(k)
    # verify F(lambda) < a log(K)/(-log lambda) on a grid through K*z
    hi = min(0.9, max(0.5, 1.05 * kz))
    grid = np.geomspace(max(1e-9, hi * 1e-7), hi, 200)
    grid = np.sort(np.append(grid, kz))
    vals = np.asarray(density.F(grid), dtype=float)
    limit = a * log_k / (-np.log(grid))
    bad = vals > limit
    if np.any(bad):
        i = int(np.argmax(bad))
        raise HypothesisUnverified(
            f"F({grid[i]:.6g}) = {vals[i]:.6g} is not below a*log(K)/(-log lambda)"
            f" = {limit[i]:.6g}")
    mu_z_bound = log_k / (-math.log(kz))
    tail = 4.0 * math.exp(-2.0 * n * math.sqrt(z))
    j_val = mu_z_bound + tail
    bound = a * quot.order * j_val
    if cover is None:
        cover = CoverInstance(cx, quot, caps)
    b = cover.betti(q)
    return BoundReport(
        regime="sublog",
        constants={"a": a, "index": quot.order, "short": s, "R": r, "K": k,
                   "n": n, "z": z, "C_prime": j_val * math.log(n),
                   "C": a * j_val * math.log(s)},
        bound=bound, betti=b, satisfied=b <= bound)


# ---------------------------------------------------------------------------
# Decay estimation
# ---------------------------------------------------------------------------

@dataclass
class NsEstimate:
    alpha_hat: Optional[float]
    gap_detected: bool
    slope: Optional[float] = None
    window: Optional[Tuple[float, float]] = None
    npoints: int = 0
    residual: Optional[float] = None


def estimate_ns(density: DensityEstimate, lo: float = 1e-6, hi: float = 1e-2,
                num: int = 61, min_counts: int = 4) -> NsEstimate:
    """Log-log decay rate of F near zero: alpha = 2 * fitted slope.

    Sampled estimates ignore grid points whose increment over F(0+) is
    below ``min_counts`` samples, to keep quadrature noise out of the fit.
    """
    if hi > 0.1 or hi <= lo:
        raise InsufficientGrid("window must satisfy lo < hi <= 0.1")
    if hi / lo < 100.0:
        raise InsufficientGrid("window must span at least two decades")
    grid = np.geomspace(lo, hi, num)
    f0 = density.F_at_zero()
    vals = np.asarray(density.F(grid), dtype=float) - f0
    floor = 0.0
    if density._samples is not None:
        floor = min_counts * density._weight
    usable = vals > max(floor, 0.0)
    if not np.any(usable):
        return NsEstimate(alpha_hat=None, gap_detected=True, window=(lo, hi))
    xs = grid[usable]
    ys = vals[usable]
    if xs.max() / xs.min() < 100.0:
        raise InsufficientGrid(
            f"only {xs.min():.3g}..{xs.max():.3g} usable; need two decades")
    lx = np.log(xs)
    ly = np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return NsEstimate(alpha_hat=2.0 * float(slope), gap_detected=False,
                      slope=float(slope), window=(float(xs.min()), float(xs.max())),
                      npoints=int(xs.size), residual=resid)


# ---------------------------------------------------------------------------
# Uniform families under a gap
# ---------------------------------------------------------------------------

@dataclass
class UniformGapReport:
    exponent: float
    d_fit: float
    c_fit: float
    m_const: float
    spread: float
    members: List[dict] = field(default_factory=list)

    @property
    def all_satisfied(self) -> bool:
        return all(m["satisfied"] for m in self.members)


def uniform_gap_exponent(group, family: Sequence, lambda0: float,
                         cx: EquivariantChainComplex, q: int,
                         density: Optional[DensityEstimate] = None,
                         certificate: Optional[GapCertificate] = None,
                         caps: Caps = DEFAULT_CAPS,
                         spread_cap: float = 4.0) -> UniformGapReport:
    """Sub-linear index exponent for a log-uniform family under a gap.

    Fits D = min short/log(index) over the family; the family is rejected
    (FamilyNotLogUniform) when the ratios spread by more than ``spread_cap``,
    which is what happens for polynomial-growth directions.  Verifies
    b_q <= 4a * index^(1 - M*D) per member.
    """
    data = []
    for sub in family:
        s = short_length(group, sub, caps=caps)
        quot = make_quotient(group, sub, caps)
        if quot.order < 2:
            continue
        data.append((sub, quot, s))
    if len(data) < 2:
        raise FamilyNotLogUniform("need at least two members of index >= 2")
    ratios = [s / math.log(quot.order) for _sub, quot, s in data]
    spread = max(ratios) / min(ratios)
    if spread > spread_cap:
        raise FamilyNotLogUniform(
            f"short/log(index) ratios spread by {spread:.3g} > {spread_cap}; "
            "family does not track logarithmic growth")
    d_fit = min(ratios)
    mode = _verify_gap(lambda0, density, certificate)
    lap = laplacian(cx, q)
    a = cx.cells[q]
    k = float(norm_bound(lap))
    r = support_radius(lap, caps)
    m_const = (2.0 / r) * math.sqrt(lambda0 / k) if r else math.inf
    exponent = 1.0 - m_const * d_fit
    c_fit = 4.0 * a
    report = UniformGapReport(exponent=exponent, d_fit=d_fit, c_fit=c_fit,
                              m_const=m_const, spread=spread, members=[])
    for sub, quot, s in data:
        cover = CoverInstance(cx, quot, caps)
        b = cover.betti(q)
        bound = c_fit * quot.order ** exponent
        report.members.append({
            "index": quot.order, "short": s, "betti": b,
            "bound": bound, "satisfied": b <= bound, "gap_mode": mode,
        })
    return report
