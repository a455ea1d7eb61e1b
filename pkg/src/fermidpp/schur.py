"""Truncated cylindric Plancherel process on integer partitions.

The transition operator acts on the span of all partitions of size at most
N_max. Its entries are exact finite sums

    T[lam, mu] = e^{theta^2(e^{-t}-1)} sum_k e^{-t|kappa|} s_{lam/kappa} s_{mu/kappa}

over kappa contained in both shapes, with every skew Schur function taken at
the exponential specialization: complete homogeneous h_k -> gamma^k / k!,
gamma = theta(1 - e^{-t}). Truncation only matters when operators are
composed; the reported tail bound tracks that dropped mass.
"""

from __future__ import annotations

import dataclasses
import functools
import math

import numpy as np

from .dpp import Configuration
from .errors import NumericalFailureError, PreconditionError, ValidityError
from .orthopoly import SiteWindow

TAIL_DEGREE_CAP = 60


@dataclasses.dataclass(frozen=True)
class Partition:
    """Weakly decreasing positive parts; () is the empty partition."""

    parts: tuple

    def __post_init__(self):
        p = tuple(int(v) for v in self.parts)
        if any(v <= 0 for v in p):
            raise PreconditionError(f"parts must be positive, got {p}")
        if any(p[i] < p[i + 1] for i in range(len(p) - 1)):
            raise PreconditionError(f"parts must be weakly decreasing, got {p}")
        object.__setattr__(self, "parts", p)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def part(self, i: int) -> int:
        """1-indexed part, zero beyond the length."""
        return self.parts[i - 1] if 1 <= i <= len(self.parts) else 0

    def contains(self, other: "Partition") -> bool:
        return all(self.part(i + 1) >= v for i, v in enumerate(other.parts))

    def __str__(self) -> str:
        return "+".join(str(v) for v in self.parts)


def _partitions_of(n: int):
    def rec(remaining, cap):
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, cap), 0, -1):
            for rest in rec(remaining - first, first):
                yield (first,) + rest

    yield from rec(n, n)


@functools.lru_cache(maxsize=8)
def _space_partitions(n_max: int):
    out = []
    for n in range(n_max + 1):
        out.extend(sorted(_partitions_of(n)))
    return tuple(Partition(p) for p in out)


def partition_count(n: int) -> int:
    """Number of partitions of n, by the Euler pentagonal recurrence."""
    if n < 0:
        return 0
    p = [1] + [0] * n
    for m in range(1, n + 1):
        total, k = 0, 1
        while True:
            g1 = k * (3 * k - 1) // 2
            g2 = k * (3 * k + 1) // 2
            if g1 > m and g2 > m:
                break
            sign = -1 if k % 2 == 0 else 1
            if g1 <= m:
                total += sign * p[m - g1]
            if g2 <= m:
                total += sign * p[m - g2]
            k += 1
        p[m] = total
    return p[n]


@dataclasses.dataclass(frozen=True)
class PartitionSpace:
    """All partitions of size <= N_max in frozen (size, lex) order."""

    n_max: int

    def __post_init__(self):
        if not (isinstance(self.n_max, int) and self.n_max >= 0):
            raise PreconditionError(f"need integer N_max >= 0, got {self.n_max}")
        parts = _space_partitions(self.n_max)
        object.__setattr__(self, "partitions", parts)
        object.__setattr__(self, "_index", {p.parts: i for i, p in enumerate(parts)})

    @property
    def dim(self) -> int:
        return len(self.partitions)

    def index_of(self, lam: Partition) -> int:
        try:
            return self._index[lam.parts]
        except KeyError:
            raise PreconditionError(f"partition {lam} exceeds N_max={self.n_max}") from None

    def sizes(self) -> np.ndarray:
        return np.array([p.size for p in self.partitions], dtype=float)


# ---------------------------------------------------------------------------
# skew Schur functions at the exponential specialization


def skew_schur_ex(lam: Partition, mu: Partition, gamma: float) -> float:
    """Jacobi-Trudi determinant det[h_{lam_i - mu_j - i + j}] with h_k = gamma^k/k!.

    Zero unless mu fits inside lam; the empty skew shape gives 1. All
    determinant terms share total degree |lam| - |mu|, so the value is
    gamma^{|lam/mu|} times a positive rational.
    """
    g = float(gamma)
    if g < 0:
        raise PreconditionError(f"need gamma >= 0, got {gamma}")
    if not lam.contains(mu):
        return 0.0
    ell = lam.length
    if ell == 0:
        return 1.0
    top = lam.parts[0] + ell
    h = np.zeros(top + 1)
    h[0] = 1.0
    for k in range(1, top + 1):
        h[k] = h[k - 1] * g / k
    M = np.zeros((ell, ell))
    for i in range(1, ell + 1):
        for j in range(1, ell + 1):
            k = lam.part(i) - mu.part(j) - i + j
            if 0 <= k <= top:
                M[i - 1, j - 1] = h[k]
    return float(np.linalg.det(M))


def _skew_matrix(space: PartitionSpace, gamma: float) -> np.ndarray:
    """S[i, k] = s_{lam_i / kappa_k}(ex_gamma) over the whole space."""
    P = space.dim
    S = np.zeros((P, P))
    for i, lam in enumerate(space.partitions):
        for k, kap in enumerate(space.partitions):
            if kap.size > lam.size:
                break
            if lam.contains(kap):
                S[i, k] = skew_schur_ex(lam, kap, gamma)
    return S


def _tail_bound(n_max: int, theta: float, t: float) -> float:
    """Coarse dropped-mass bound: sum over discarded degrees d of
    p(N_max + d) e^{-t(N_max + d)} gamma^d. Monotone, reported, not trusted."""
    gamma = theta * (1.0 - math.exp(-t))
    if gamma == 0.0:
        return 0.0
    total = 0.0
    for d in range(1, TAIL_DEGREE_CAP + 1):
        n = n_max + d
        term = partition_count(n) * math.exp(-t * n) * gamma**d
        total += term
        if term < 1e-300:
            break
    return total


@dataclasses.dataclass(frozen=True)
class TransitionMatrix:
    space: PartitionSpace
    theta: float
    t: float
    entries: np.ndarray
    tail_bound: float

    def __post_init__(self):
        E = np.asarray(self.entries, dtype=float)
        if not np.all(np.isfinite(E)):
            raise NumericalFailureError("transition entries are not finite")
        low = float(np.min(E, initial=0.0))
        if low < 0.0:
            raise ValidityError(f"transition entry {low:.3e} < 0 breaks Schur positivity")
        if not np.array_equal(E, E.T):
            raise ValidityError("transition matrix lost its symmetry")
        object.__setattr__(self, "entries", E)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))


def transition_matrix(space: PartitionSpace, theta: float, t: float) -> TransitionMatrix:
    """Truncation of T^theta_t; exact entrywise, symmetric, nonnegative."""
    if not theta >= 0:
        raise PreconditionError(f"need theta >= 0, got {theta}")
    if not t >= 0:
        raise PreconditionError(f"need t >= 0, got {t}")
    gamma = theta * (1.0 - math.exp(-t))
    pref = math.exp(theta**2 * (math.exp(-t) - 1.0))
    S = _skew_matrix(space, gamma)
    decay = np.exp(-t * space.sizes())
    T = pref * (S @ (decay[:, None] * S.T))
    T = 0.5 * (T + T.T)
    return TransitionMatrix(space, float(theta), float(t), T, _tail_bound(space.n_max, theta, t))


# ---------------------------------------------------------------------------
# vertex-operator identities on the truncation


@dataclasses.dataclass(frozen=True)
class VertexReport:
    commutation_residual: float
    energy_residual: float
    z_value: float
    protected_dim: int
    margin: int


def vertex_identity_check(
    space: PartitionSpace,
    gamma: float,
    gamma_prime: float,
    u: float = 0.5,
    margin: int = 4,
) -> VertexReport:
    """Residuals of the commutation and energy-conjugation identities.

    Commutation: raising past lowering costs the scalar e^{gamma gamma'};
    checked on the sub-block of shapes with |lam| <= N_max - margin, where
    the truncated sum over intermediate shapes has converged. The energy
    identity rescales the specialization by u and holds entrywise on the
    whole truncation.
    """
    if not 0 <= margin <= space.n_max:
        raise PreconditionError(f"margin must lie in [0, {space.n_max}], got {margin}")
    S = _skew_matrix(space, gamma)
    Sp = _skew_matrix(space, gamma_prime)
    for name, M in (("raising", S), ("lowering", Sp)):
        norm = float(np.linalg.norm(M, 2))
        if norm > 1e6:
            raise PreconditionError(f"{name} operator norm {norm:.3e} exceeds 1e6")
    # lowering adds boxes: target row, source column; raising is its transpose
    lower = Sp
    raise_ = S.T
    lhs = raise_ @ lower
    z = math.exp(gamma * gamma_prime)
    rhs = z * (lower @ raise_)
    sizes = space.sizes()
    keep = sizes <= space.n_max - margin
    block = np.ix_(keep, keep)
    commutation = float(np.max(np.abs(lhs[block] - rhs[block]), initial=0.0))
    uH = u ** sizes
    lhs_e = raise_ * uH[None, :]
    S_scaled = _skew_matrix(space, u * gamma)
    rhs_e = uH[:, None] * S_scaled.T
    energy = float(np.max(np.abs(lhs_e - rhs_e), initial=0.0))
    return VertexReport(commutation, energy, z, int(np.sum(keep)), margin)


# ---------------------------------------------------------------------------
# path law and sampling


@dataclasses.dataclass(frozen=True)
class CylindricPathLaw:
    """Cyclic transfer-chain law for partition-valued observations.

    prob multiplies transfer entries along the grid and the wrap segment
    closing the period; Z is the trace of the full cycle, which matches
    Tr(T_beta) up to the transfer tail bounds.
    """

    space: PartitionSpace
    theta: float
    beta: float
    times: tuple
    transfers: tuple
    wrap: np.ndarray
    Z: float

    def prob(self, states) -> float:
        idx = [int(s) for s in states]
        if len(idx) != len(self.times):
            raise PreconditionError(
                f"need {len(self.times)} states, got {len(idx)}"
            )
        value = self.wrap[idx[0], idx[-1]]
        for j, T in enumerate(self.transfers):
            value *= T[idx[j + 1], idx[j]]
        return float(value) / self.Z

    def cycle_matrix(self, i: int) -> np.ndarray:
        n = len(self.times)
        mats = list(self.transfers) + [self.wrap]
        acc = np.eye(self.space.dim)
        for j in range(n):
            acc = mats[(i + j) % n] @ acc
        return acc

    def marginal(self, i: int) -> np.ndarray:
        return np.diag(self.cycle_matrix(i)) / self.Z

    def sample(self, seed: int, count: int) -> np.ndarray:
        """Forward-filter backward-sample trajectories; (count, n) indices."""
        if count < 1:
            raise PreconditionError(f"need count >= 1, got {count}")
        rng = np.random.default_rng(seed)
        n = len(self.times)
        P = self.space.dim
        suffix = [None] * (n + 1)
        suffix[n] = self.wrap
        for i in range(n - 1, 0, -1):
            suffix[i] = suffix[i + 1] @ self.transfers[i - 1]
        start = np.clip(np.diag(suffix[1] if n > 1 else self.wrap), 0.0, None)
        start_cdf = np.cumsum(start / start.sum())
        out = np.empty((count, n), dtype=np.int64)
        for d in range(count):
            w0 = int(np.searchsorted(start_cdf, rng.random(), side="right"))
            w0 = min(w0, P - 1)
            out[d, 0] = w0
            prev = w0
            for i in range(1, n):
                q = self.transfers[i - 1][:, prev] * suffix[i + 1][w0, :]
                q = np.clip(q, 0.0, None)
                tot = q.sum()
                if not tot > 0:
                    raise NumericalFailureError("conditional sampling weights vanished")
                cdf = np.cumsum(q / tot)
                w = int(np.searchsorted(cdf, rng.random(), side="right"))
                prev = min(w, P - 1)
                out[d, i] = prev
        return out


def cylindric_path_law(
    space: PartitionSpace, theta: float, beta: float, grid
) -> CylindricPathLaw:
    """Joint law of the truncated process observed at the grid times."""
    times = tuple(float(t) for t in grid)
    if not times:
        raise PreconditionError("need at least one grid time")
    for t in times:
        if not 0.0 <= t <= beta:
            raise PreconditionError(f"grid time {t} outside [0, {beta}]")
    if any(times[i] >= times[i + 1] for i in range(len(times) - 1)):
        raise PreconditionError("grid times must be strictly increasing")
    base = transition_matrix(space, theta, beta)
    if not base.trace > 1e-300:
        raise NumericalFailureError(
            f"Tr(T_beta) = {base.trace} underflowed; increase N_max or reduce beta/theta"
        )
    transfers = tuple(
        transition_matrix(space, theta, times[i + 1] - times[i]).entries
        for i in range(len(times) - 1)
    )
    closing = beta - times[-1] + times[0]
    wrap = transition_matrix(space, theta, closing).entries
    acc = wrap.copy()
    for T in transfers:
        acc = acc @ T
    Z = float(np.trace(acc))
    if not Z > 1e-300:
        raise NumericalFailureError(
            f"cycle normalizer {Z} underflowed; increase N_max or reduce beta/theta"
        )
    return CylindricPathLaw(space, float(theta), float(beta), times, transfers, wrap, Z)


# ---------------------------------------------------------------------------
# Maya configurations


def maya_configuration(lam: Partition, window: SiteWindow) -> Configuration:
    """Half-integer occupation pattern {lam_i - i + 1/2} restricted to a window."""
    if window.lattice != "half_int":
        raise PreconditionError(f"need a half-integer window, got {window.lattice!r}")
    lo, hi = window.lo, window.hi
    top = lam.part(1) - 0.5
    bottom = -lam.length - 0.5
    if lo > bottom or hi < top:
        raise PreconditionError(
            f"window [{lo}, {hi}] must cover [{bottom}, {top}] for this shape"
        )
    depth = int(0.5 - lo)
    occupied_sites = {lam.part(i) - i + 0.5 for i in range(1, depth + 1)}
    sites = window.sites
    mask = 0
    for i, x in enumerate(sites):
        if float(x) in occupied_sites:
            mask |= 1 << i
    return Configuration(tuple(float(x) for x in sites), mask)
