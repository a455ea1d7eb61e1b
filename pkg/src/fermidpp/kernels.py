"""Correlation kernels, static and space-time.

Finite-temperature Fermi kernels, spectral projections, Christoffel-Darboux
kernels, integral kernels of the continuous ensembles, and the two-branch
space-time kernel whose determinants give the dynamical correlation
functions.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import (
    ConfigurationError,
    NumericalFailureError,
    PreconditionError,
    ValidityError,
)
from .linalg import (
    SpectralDecomposition,
    SymmetricOperator,
    determinant,
    eig_sym,
    near_zero_flags,
)
from .orthopoly import (
    Family,
    Hermite,
    Jacobi,
    Laguerre,
    PolynomialTable,
    gauss_rule,
    jacobi_operator,
    weighted_poly_values,
)

_EIG_RANGE_TOL = {"integral": 1e-6}
_EIG_RANGE_DEFAULT = 1e-8


@dataclasses.dataclass
class CorrelationKernel:
    """Symmetric kernel matrix with eigenvalues in [0, 1] (up to tolerance)."""

    entries: np.ndarray
    site_labels: tuple
    provenance: str
    projection: bool = False

    def __post_init__(self):
        A = np.asarray(self.entries, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise PreconditionError(f"kernel entries must be square, got {A.shape}")
        scale = 1.0 + (np.max(np.abs(A)) if A.size else 0.0)
        if np.max(np.abs(A - A.T), initial=0.0) > 1e-10 * scale:
            raise NumericalFailureError("kernel not symmetric within 1e-10")
        self.entries = 0.5 * (A + A.T)
        self.site_labels = tuple(float(v) for v in self.site_labels)
        if len(self.site_labels) != A.shape[0]:
            raise PreconditionError("site label count does not match kernel dimension")
        tol = _EIG_RANGE_TOL.get(self.provenance, _EIG_RANGE_DEFAULT)
        if A.size:
            evs = np.linalg.eigvalsh(self.entries)
            if evs.min() < -tol or evs.max() > 1.0 + tol:
                raise NumericalFailureError(
                    f"kernel eigenvalues outside [0,1]: range [{evs.min():.3e}, {evs.max():.6f}]",
                    residual=float(max(-evs.min(), evs.max() - 1.0)),
                )
        if self.projection:
            resid = float(np.max(np.abs(self.entries @ self.entries - self.entries), initial=0.0))
            if resid > 1e-8:
                raise NumericalFailureError(
                    f"projection kernel violates K^2 = K by {resid:.3e}", residual=resid
                )

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def index_of(self, site: float) -> int:
        try:
            return self.site_labels.index(float(site))
        except ValueError:
            raise PreconditionError(f"site {site} not in kernel window") from None


def _finite_beta(beta) -> float:
    b = float(beta)
    if not (b > 0) or math.isinf(b):
        raise ConfigurationError(f"beta must be a positive finite real, got {beta}")
    return b


def fermi_kernel(H: SymmetricOperator, beta: float) -> CorrelationKernel:
    """K = e^{-beta H}(1 + e^{-beta H})^{-1}, evaluated branch-stably."""
    b = _finite_beta(beta)
    dec = eig_sym(H)
    vals = _logistic(-b * dec.eigenvalues)
    K = (dec.eigenvectors * vals) @ dec.eigenvectors.T
    return CorrelationKernel(K, H.site_labels, "fermi")


def _logistic(y: np.ndarray) -> np.ndarray:
    """e^y / (1 + e^y) without overflow."""
    out = np.empty_like(y)
    pos = y >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-y[pos]))
    out[~pos] = np.exp(y[~pos]) / (1.0 + np.exp(y[~pos]))
    return out


def _gap_check(dec: SpectralDecomposition):
    flags = near_zero_flags(dec.eigenvalues)
    if np.any(flags):
        offenders = dec.eigenvalues[flags]
        raise ValidityError(
            "spectrum touches 0; near-zero eigenvalues: "
            + ", ".join(f"{v:.3e}" for v in offenders)
        )


def negative_projection(H: SymmetricOperator) -> CorrelationKernel:
    """Spectral projection onto the strictly negative part of the spectrum."""
    dec = eig_sym(H)
    _gap_check(dec)
    vals = (dec.eigenvalues < 0).astype(float)
    K = (dec.eigenvectors * vals) @ dec.eigenvectors.T
    return CorrelationKernel(K, H.site_labels, "projection", projection=True)


def cd_kernel(table: PolynomialTable) -> CorrelationKernel:
    """Rank-N kernel K(x,y) = sum_{n<N} p_n(x) p_n(y) over the table window."""
    K = table.values.T @ table.values
    kern = CorrelationKernel(K, tuple(table.window.sites), "cd", projection=True)
    trace = float(np.trace(K))
    if abs(trace - table.N) > 1e-6 * table.N:
        raise NumericalFailureError(
            f"kernel trace {trace} far from rank {table.N}", residual=abs(trace - table.N)
        )
    return kern


# ---------------------------------------------------------------------------
# integral kernels for the continuous ensembles


_PANEL_ORDERS = (24, 32, 48, 64, 96)


def _panel_rule_cache():
    cache = {}

    def get(alpha: float, beta: float, order: int):
        key = (alpha, beta, order)
        if key not in cache:
            cache[key] = gauss_rule(Jacobi(a=alpha, b=beta), order)
        return cache[key]

    return get


_panel_rule = _panel_rule_cache()


def _support_bounds(family: Family):
    return family.support


def _effective_reach(family: Family, m: int) -> float:
    """Point beyond which every psi_x (x < m) is negligible."""
    if isinstance(family, Hermite):
        return math.sqrt(4.0 * m) + 10.0
    if isinstance(family, Laguerre):
        return 6.0 * m + 12.0 * family.c + 60.0
    return 1.0


def _edge_exponents(family: Family, a: float, b: float):
    """(alpha, beta) Jacobi exponents for a panel touching the support edge."""
    alpha = beta = 0.0
    lo, hi = family.support
    if isinstance(family, Laguerre) and a == lo:
        beta = family.c - 1.0
    if isinstance(family, Jacobi):
        if a == lo:
            beta = family.b
        if b == hi:
            alpha = family.a
    return alpha, beta


def _sharp_node_projection(family: Family, m: int, lo: float, hi: float):
    """Spectral window of the order-m recurrence operator.

    The nodes of the order-m Gauss rule are the eigenvalues of the truncated
    recurrence operator, so summing the Christoffel terms with nodes inside
    the interval reproduces exactly the spectral projection of that operator.
    """
    dec = eig_sym(jacobi_operator(family, m))
    inside = (dec.eigenvalues > lo) & (dec.eigenvalues < hi)
    V = dec.eigenvectors
    return (V * inside.astype(float)) @ V.T


def _integrate_fermi(family: Family, m: int, beta_t: float, r: float, sign: float, order: int):
    """integral of psi_x psi_y / (1 + e^{-sign * beta * (u - r)}) over the support."""
    s_lo, s_hi = family.support
    a = -_effective_reach(family, m) if math.isinf(s_lo) else s_lo
    b = _effective_reach(family, m) if math.isinf(s_hi) else s_hi
    width = min(1.0, 4.0 / beta_t)
    n_panels = max(2, int(math.ceil((b - a) / width)))
    K = np.zeros((m, m))
    edges = np.linspace(a, b, n_panels + 1)
    for pa, pb in zip(edges[:-1], edges[1:]):
        alpha, bexp = _edge_exponents(family, pa, pb)
        v, W = _panel_rule(alpha, bexp, order)
        half = (pb - pa) / 2.0
        us = pa + half * (v + 1.0)
        psi = weighted_poly_values(family, m, us)
        g = _logistic(sign * beta_t * (us - r))
        sing = np.ones_like(us)
        if alpha:
            sing *= (pb - us) ** (-alpha)
        if bexp:
            sing *= (us - pa) ** (-bexp)
        scale = half ** (alpha + bexp + 1.0)
        K += scale * ((psi * (W * g * sing)) @ psi.T)
    return K


def integral_kernel(
    family: Family,
    interval,
    m: int,
    beta: float = math.inf,
    r: float = 0.0,
    conjugate_signs: bool = False,
) -> CorrelationKernel:
    """Kernel K(x,y) indexed by polynomial degrees x, y < m.

    beta = inf: sharp spectral window of the order-m recurrence operator
    over `interval` (node-restricted Gauss sum), identical to the
    corresponding truncated spectral projection.  Finite beta: the interval
    endpoints are ignored and the entries are true weighted integrals with
    the smooth occupation factor 1/(1 + e^{-beta (u - r)}) filling the side
    above r, evaluated by panel quadrature with an order ladder;
    `conjugate_signs` applies the (-1)^{x+y} conjugation and reflects the
    occupation to the side below r, the convention in which the limit
    operator appears sign-conjugated as s(T-r)s.
    """
    if family.lattice != "continuous":
        raise PreconditionError("integral kernels exist for continuous families only")
    if m < 1:
        raise PreconditionError(f"need m >= 1, got {m}")
    lo, hi = float(interval[0]), float(interval[1])
    if lo >= hi:
        raise PreconditionError(f"empty interval ({lo}, {hi})")
    s_lo, s_hi = family.support
    if lo < s_lo - 1e-12 or hi > s_hi + 1e-12:
        raise PreconditionError(
            f"interval ({lo}, {hi}) not inside the weight support ({s_lo}, {s_hi})"
        )
    if math.isinf(beta):
        K = _sharp_node_projection(family, m, lo, hi)
        if conjugate_signs:
            s = (-1.0) ** np.arange(m)
            K = K * np.outer(s, s)
        return CorrelationKernel(K, tuple(range(m)), "integral", projection=True)
    sign = -1.0 if conjugate_signs else 1.0
    prev = None
    for order in _PANEL_ORDERS:
        K = _integrate_fermi(family, m, _finite_beta(beta), r, sign, order)
        if prev is not None and np.max(np.abs(K - prev)) <= 1e-8:
            break
        prev = K
    else:
        raise NumericalFailureError(
            "quadrature did not stabilize to 1e-8 at the order cap"
        )
    if conjugate_signs:
        s = (-1.0) ** np.arange(m)
        K = K * np.outer(s, s)
    return CorrelationKernel(K, tuple(range(m)), "integral")


# ---------------------------------------------------------------------------
# space-time kernel


@dataclasses.dataclass(frozen=True)
class SpaceTimePoint:
    site: float
    time: float


class SpaceTimeKernel:
    """Two-branch evaluator for the stationary space-time correlation kernel.

    For u = s - t >= 0 (ordered times) the eigenvalue factor is
    e^{u lam}/(1 + e^{beta lam}); for t > s it is
    -e^{-(t-s) lam}/(1 + e^{-beta lam}).  At beta = inf the logistic
    factors become sharp indicators on the sign of lam.
    """

    def __init__(self, H: SymmetricOperator, beta):
        b = float(beta)
        if not b > 0:
            raise ConfigurationError(f"beta must be positive or inf, got {beta}")
        dec = eig_sym(H)
        if math.isinf(b):
            _gap_check(dec)
        self.beta = b
        self.eigenvalues = dec.eigenvalues
        self.eigenvectors = dec.eigenvectors
        self.site_labels = H.site_labels
        self._index = {lab: i for i, lab in enumerate(H.site_labels)}

    @property
    def half_period(self) -> float:
        return self.beta / 2.0

    def _site_index(self, site: float) -> int:
        try:
            return self._index[float(site)]
        except KeyError:
            raise PreconditionError(f"site {site} not in kernel window") from None

    def _check_time(self, t: float):
        if not math.isfinite(t):
            raise PreconditionError(f"time {t} is not finite")
        if t < -self.half_period or t > self.half_period:
            raise PreconditionError(
                f"time {t} outside [{-self.half_period}, {self.half_period}]"
            )

    def _ordered_factor(self, u: float) -> np.ndarray:
        lam = self.eigenvalues
        out = np.empty_like(lam)
        neg = lam < 0
        if math.isinf(self.beta):
            out[neg] = np.exp(u * lam[neg])
            out[~neg] = 0.0
            return out
        b = self.beta
        out[neg] = np.exp(u * lam[neg]) / (1.0 + np.exp(b * lam[neg]))
        out[~neg] = np.exp((u - b) * lam[~neg]) / (1.0 + np.exp(-b * lam[~neg]))
        return out

    def _reversed_factor(self, v: float) -> np.ndarray:
        lam = self.eigenvalues
        out = np.empty_like(lam)
        neg = lam < 0
        if math.isinf(self.beta):
            out[neg] = 0.0
            out[~neg] = -np.exp(-v * lam[~neg])
            return out
        b = self.beta
        out[neg] = -np.exp((b - v) * lam[neg]) / (1.0 + np.exp(b * lam[neg]))
        out[~neg] = -np.exp(-v * lam[~neg]) / (1.0 + np.exp(-b * lam[~neg]))
        return out

    def evaluate(self, x: float, t: float, y: float, s: float) -> float:
        """Kernel value R(x, t; y, s); the t <= s branch owns ties."""
        self._check_time(t)
        self._check_time(s)
        if abs(t - s) > self.beta:
            raise PreconditionError(f"|t - s| = {abs(t - s)} exceeds beta = {self.beta}")
        i = self._site_index(x)
        j = self._site_index(y)
        if t <= s:
            factor = self._ordered_factor(s - t)
        else:
            factor = self._reversed_factor(t - s)
        return float(np.sum(self.eigenvectors[i] * self.eigenvectors[j] * factor))

    def grid_matrix(self, points) -> np.ndarray:
        """Matrix R(p_i; p_j) over a list of SpaceTimePoint."""
        pts = list(points)
        n = len(pts)
        out = np.empty((n, n))
        for i, p in enumerate(pts):
            for j, q in enumerate(pts):
                out[i, j] = self.evaluate(p.site, p.time, q.site, q.time)
        return out

    def static_kernel(self) -> CorrelationKernel:
        """Equal-time kernel (the Fermi kernel, or the projection at beta=inf)."""
        if math.isinf(self.beta):
            vals = (self.eigenvalues < 0).astype(float)
        else:
            vals = _logistic(-self.beta * self.eigenvalues)
        K = (self.eigenvectors * vals) @ self.eigenvectors.T
        tag = "projection" if math.isinf(self.beta) else "fermi"
        return CorrelationKernel(K, self.site_labels, tag, projection=math.isinf(self.beta))


def space_time_kernel(H: SymmetricOperator, beta) -> SpaceTimeKernel:
    return SpaceTimeKernel(H, beta)


def dynamical_correlation(kernel: SpaceTimeKernel, points) -> float:
    """det[R(x_i, t_i; x_j, t_j)] over time-sorted points.

    Repeated (site, time) pairs make the correlation vanish; unsorted
    times are rejected so that callers own the ordering convention.
    """
    pts = [p if isinstance(p, SpaceTimePoint) else SpaceTimePoint(*p) for p in points]
    if not pts:
        return 1.0
    times = [p.time for p in pts]
    if any(a > b for a, b in zip(times, times[1:])):
        raise PreconditionError("points must be sorted by nondecreasing time")
    seen = set()
    for p in pts:
        key = (float(p.site), float(p.time))
        if key in seen:
            return 0.0
        seen.add(key)
    return determinant(kernel.grid_matrix(pts))
