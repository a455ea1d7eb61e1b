"""Static sampling and correlation estimation for determinantal laws.

A determinantal law on a finite window is fixed by a correlation kernel K:
joint occupation probabilities of distinct sites are principal minors of K.
This module draws exact samples by the spectral method, evaluates ensemble
probability formulas (L-ensembles and N-point orthogonal polynomial
ensembles), and estimates or exhaustively enumerates correlations.
"""

from __future__ import annotations

import dataclasses
import functools
import itertools
import math

import numpy as np

from .errors import PreconditionError, SizeError, ValidityError
from .kernels import CorrelationKernel
from .linalg import SymmetricOperator, eig_sym
from .orthopoly import Family, SiteWindow

ENUMERATION_SITE_CAP = 14
SUBSET_BUDGET = 10_000_000
EIG_CLAMP_TOL = 1e-6


@dataclasses.dataclass(frozen=True)
class Configuration:
    """Occupation pattern on a window: bit i of `occupied` is site window[i]."""

    window: tuple
    occupied: int

    def __post_init__(self):
        object.__setattr__(self, "window", tuple(float(v) for v in self.window))
        occ = int(self.occupied)
        if not 0 <= occ < (1 << len(self.window)):
            raise PreconditionError(
                f"occupation mask {occ} does not fit a window of {len(self.window)} sites"
            )
        object.__setattr__(self, "occupied", occ)

    @property
    def m(self) -> int:
        return len(self.window)

    @property
    def count(self) -> int:
        return int(self.occupied).bit_count()

    def sites(self) -> tuple:
        return tuple(
            lab for i, lab in enumerate(self.window) if (self.occupied >> i) & 1
        )


@dataclasses.dataclass(frozen=True)
class CorrelationEstimate:
    value: float
    stderr: float
    n_samples: int

    def __post_init__(self):
        if not (self.stderr >= 0.0):
            raise PreconditionError(f"stderr must be nonnegative, got {self.stderr}")


@dataclasses.dataclass(frozen=True)
class LEnsemble:
    """Law P(omega) = det(L_omega) / det(1 + L) on the operator window."""

    L: SymmetricOperator

    def __post_init__(self):
        sign, logdet = np.linalg.slogdet(np.eye(self.L.dim) + self.L.entries)
        if sign <= 0:
            raise PreconditionError("L-ensemble needs det(1 + L) > 0")


@dataclasses.dataclass(frozen=True)
class OpEnsemble:
    """N points on the window with weight w: P propto prod w(x_i) * Vandermonde^2.

    The normalizer is an exhaustive sum over N-subsets of the window, so on
    an infinite lattice the law is the one conditioned on all points lying
    inside the window; the weight mass outside is not captured.
    """

    family: Family
    window: SiteWindow
    N: int

    def __post_init__(self):
        if self.family.lattice == "continuous":
            raise PreconditionError("point ensembles need a discrete lattice")
        if self.window.lattice != self.family.lattice:
            raise PreconditionError(
                f"window lattice {self.window.lattice!r} does not match "
                f"family lattice {self.family.lattice!r}"
            )
        if not 1 <= self.N <= len(self.window):
            raise PreconditionError(
                f"need 1 <= N <= {len(self.window)}, got N={self.N}"
            )
        if math.comb(len(self.window), self.N) > SUBSET_BUDGET:
            raise SizeError(
                f"binomial({len(self.window)}, {self.N}) exceeds the "
                f"exhaustive-normalizer budget {SUBSET_BUDGET}"
            )


@dataclasses.dataclass(frozen=True)
class ExplicitLaw:
    """Probability vector over all 2^m occupation masks of a window."""

    window: tuple
    probabilities: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "window", tuple(float(v) for v in self.window))
        p = np.asarray(self.probabilities, dtype=float)
        if p.shape != (1 << len(self.window),):
            raise PreconditionError(
                f"law over {len(self.window)} sites needs length {1 << len(self.window)}, "
                f"got {p.shape}"
            )
        if not np.all(np.isfinite(p)):
            raise PreconditionError("law contains non-finite probabilities")
        if float(np.min(p, initial=0.0)) < -1e-9:
            raise ValidityError(f"law has negative mass {float(np.min(p)):.3e}")
        object.__setattr__(self, "probabilities", np.clip(p, 0.0, None))


# ---------------------------------------------------------------------------
# sampling


def _thin_columns(K: CorrelationKernel, rng: np.random.Generator) -> np.ndarray:
    dec = eig_sym(SymmetricOperator(K.entries, site_labels=K.site_labels))
    lam = dec.eigenvalues
    worst = float(np.max(np.maximum(-lam, lam - 1.0), initial=0.0))
    if worst > EIG_CLAMP_TOL:
        raise ValidityError(
            f"kernel eigenvalue leaves [0, 1] by {worst:.3e}; not a correlation kernel"
        )
    lam = np.clip(lam, 0.0, 1.0)
    if K.projection:
        keep = lam > 0.5
    else:
        keep = rng.random(lam.size) < lam
    return dec.eigenvectors[:, keep]


def _sample_projection_sites(V: np.ndarray, rng: np.random.Generator) -> list:
    """Sequential conditional sites of the projection process onto span(V)."""
    sites = []
    W = V
    while W.shape[1]:
        p = np.einsum("ij,ij->i", W, W)
        p = np.clip(p, 0.0, None)
        x = int(rng.choice(p.size, p=p / p.sum()))
        sites.append(x)
        j = int(np.argmax(np.abs(W[x, :])))
        W = W - np.outer(W[:, j] / W[x, j], W[x, :])
        W = np.delete(W, j, axis=1)
        if W.shape[1]:
            W, _ = np.linalg.qr(W)
    return sites


def sample_dpp(K: CorrelationKernel, seed: int, count: int) -> list:
    """Draw i.i.d. occupation configurations with kernel K.

    Eigenvectors are Bernoulli-thinned by eigenvalue, then the induced
    projection process is sampled site by site. A projection-tagged kernel
    of rank N keeps its top eigenvectors deterministically, so every sample
    carries exactly N points. Deterministic per seed.
    """
    if count < 1:
        raise PreconditionError(f"need count >= 1, got {count}")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        V = _thin_columns(K, rng)
        mask = 0
        for x in _sample_projection_sites(V, rng):
            mask |= 1 << x
        out.append(Configuration(K.site_labels, mask))
    return out


# ---------------------------------------------------------------------------
# ensemble probabilities


def _squared_vandermonde(x: np.ndarray) -> float:
    if x.size < 2:
        return 1.0
    d = x[:, None] - x[None, :]
    return float(np.prod(np.square(d[np.triu_indices(x.size, 1)])))


@functools.lru_cache(maxsize=64)
def _op_normalizer(family: Family, window: SiteWindow, N: int) -> float:
    x = window.sites
    w = np.exp(family.log_weight(x))
    total = 0.0
    for combo in itertools.combinations(range(x.size), N):
        idx = np.asarray(combo)
        total += float(np.prod(w[idx])) * _squared_vandermonde(x[idx])
    if not (total > 0.0 and math.isfinite(total)):
        raise ValidityError(f"ensemble normalizer degenerate: {total}")
    return total


def ensemble_probability(kind, omega: Configuration) -> float:
    """Probability of one configuration under an L- or OP-ensemble."""
    if isinstance(kind, LEnsemble):
        L = kind.L
        if omega.window != tuple(float(v) for v in L.site_labels):
            raise PreconditionError("configuration window does not match the ensemble")
        idx = [i for i in range(omega.m) if (omega.occupied >> i) & 1]
        sub = L.entries[np.ix_(idx, idx)]
        num = float(np.linalg.det(sub)) if idx else 1.0
        den = float(np.linalg.det(np.eye(L.dim) + L.entries))
        return num / den
    if isinstance(kind, OpEnsemble):
        sites = kind.window.sites
        if omega.window != tuple(float(v) for v in sites):
            raise PreconditionError("configuration window does not match the ensemble")
        if omega.count != kind.N:
            return 0.0
        idx = np.asarray([i for i in range(omega.m) if (omega.occupied >> i) & 1])
        x = sites[idx]
        w = np.exp(kind.family.log_weight(x))
        num = float(np.prod(w)) * _squared_vandermonde(x)
        return num / _op_normalizer(kind.family, kind.window, kind.N)
    raise PreconditionError(f"unknown ensemble kind {type(kind).__name__}")


def ensemble_law(kind) -> ExplicitLaw:
    """Exhaustive law of a small ensemble over all 2^m masks."""
    if isinstance(kind, LEnsemble):
        window = tuple(float(v) for v in kind.L.site_labels)
    elif isinstance(kind, OpEnsemble):
        window = tuple(float(v) for v in kind.window.sites)
    else:
        raise PreconditionError(f"unknown ensemble kind {type(kind).__name__}")
    m = len(window)
    if m > ENUMERATION_SITE_CAP:
        raise SizeError(f"window of {m} sites exceeds enumeration cap {ENUMERATION_SITE_CAP}")
    probs = np.array(
        [ensemble_probability(kind, Configuration(window, mask)) for mask in range(1 << m)]
    )
    return ExplicitLaw(window, probs)


def kernel_law(K: CorrelationKernel) -> ExplicitLaw:
    """Exact law of the determinantal process with kernel K.

    P(omega) = (-1)^{m - |omega|} det(K - diag of the complement indicator),
    the inclusion-exclusion closed form of the correlation minors.
    """
    m = K.dim
    if m > ENUMERATION_SITE_CAP:
        raise SizeError(f"window of {m} sites exceeds enumeration cap {ENUMERATION_SITE_CAP}")
    probs = np.empty(1 << m)
    for mask in range(1 << m):
        comp = np.array([0.0 if (mask >> i) & 1 else 1.0 for i in range(m)])
        sign = -1.0 if int(comp.sum()) % 2 else 1.0
        probs[mask] = sign * float(np.linalg.det(K.entries - np.diag(comp)))
    probs = np.where(np.abs(probs) < 1e-12, np.maximum(probs, 0.0), probs)
    return ExplicitLaw(tuple(K.site_labels), probs)


# ---------------------------------------------------------------------------
# correlation estimation


def _point_mask(window: tuple, points) -> int | None:
    """Bitmask of the requested sites; None when a site repeats."""
    mask = 0
    for p in points:
        try:
            i = window.index(float(p))
        except ValueError:
            raise PreconditionError(f"site {p} not in window") from None
        bit = 1 << i
        if mask & bit:
            return None
        mask |= bit
    return mask


def estimate_correlations(samples, points) -> CorrelationEstimate:
    """Empirical joint-occupation frequency with binomial standard error."""
    if not samples:
        raise PreconditionError("need at least one sample")
    window = samples[0].window
    for s in samples:
        if s.window != window:
            raise PreconditionError("samples mix different windows")
    n = len(samples)
    mask = _point_mask(window, points)
    if mask is None:
        return CorrelationEstimate(0.0, 0.0, n)
    if mask == 0:
        return CorrelationEstimate(1.0, 0.0, n)
    hits = sum(1 for s in samples if (s.occupied & mask) == mask)
    value = hits / n
    stderr = math.sqrt(value * (1.0 - value) / n)
    return CorrelationEstimate(value, stderr, n)


def enumerate_correlations(law: ExplicitLaw, points) -> float:
    """Exact joint-occupation probability under an explicit law."""
    m = len(law.window)
    if m > ENUMERATION_SITE_CAP:
        raise SizeError(f"window of {m} sites exceeds enumeration cap {ENUMERATION_SITE_CAP}")
    mask = _point_mask(law.window, points)
    if mask is None:
        return 0.0
    states = np.arange(1 << m)
    return float(law.probabilities[(states & mask) == mask].sum())


def ensemble_correlations(kind: OpEnsemble, points) -> float:
    """Exact joint-occupation probability by N-subset enumeration.

    Sums the fixed-cardinality ensemble probabilities over every N-point
    configuration containing the requested sites, so windows far beyond
    the full-state enumeration cap stay tractable as long as the subset
    count fits the budget.
    """
    sites = tuple(float(s) for s in kind.window.sites)
    mask = _point_mask(sites, points)
    if mask is None:
        return 0.0
    fixed = [i for i in range(len(sites)) if (mask >> i) & 1]
    if len(fixed) > kind.N:
        return 0.0
    rest = [i for i in range(len(sites)) if not (mask >> i) & 1]
    total = 0.0
    for combo in itertools.combinations(rest, kind.N - len(fixed)):
        omega = mask
        for i in combo:
            omega |= 1 << i
        total += ensemble_probability(kind, Configuration(sites, omega))
    return total
