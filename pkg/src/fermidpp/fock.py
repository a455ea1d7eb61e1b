"""Exact fermionic Fock-space machinery on small site windows.

Creation/annihilation matrices in the Jordan-Wigner representation,
second quantization, Gibbs expectations, Schwinger trace functions,
stochastic-positivity certificates, and exact stationary path laws with
trajectory sampling.  Everything is dense and exact; the window size is
capped so the 2^m-dimensional Fock space stays in memory.

Frozen conventions: basis states are occupation bitmasks ordered by
integer value, bit i of a mask is the i-th site of the window in
ascending site order, and the creation sign on a state is
(-1)^{#occupied sites below the target}.
"""

from __future__ import annotations

import dataclasses
import itertools
import math

import numpy as np

from .errors import (
    ConfigurationError,
    PreconditionError,
    SizeError,
    ValidityError,
)
from .linalg import SymmetricOperator, eig_sym

FOCK_SITE_CAP = 14
TRANSFER_CLAMP_TOL = 1e-12
MINOR_TOL = -1e-10


@dataclasses.dataclass(frozen=True)
class FockSpace:
    """Antisymmetric Fock space over a finite site window."""

    site_labels: tuple

    def __post_init__(self):
        labels = tuple(float(v) for v in self.site_labels)
        if len(labels) < 1:
            raise PreconditionError("empty site window")
        if len(labels) > FOCK_SITE_CAP:
            raise SizeError(
                f"window has {len(labels)} sites; the Fock-space cap is {FOCK_SITE_CAP}"
            )
        if any(b <= a for a, b in zip(labels, labels[1:])):
            raise PreconditionError("site labels must be strictly increasing")
        object.__setattr__(self, "site_labels", labels)

    @property
    def m(self) -> int:
        return len(self.site_labels)

    @property
    def dim(self) -> int:
        return 1 << self.m

    def index_of(self, site) -> int:
        try:
            return self.site_labels.index(float(site))
        except ValueError:
            raise PreconditionError(f"site {site} not in window") from None

    def occupation_vector(self, state: int) -> np.ndarray:
        """0/1 site occupations of a basis bitmask."""
        return np.array([(state >> i) & 1 for i in range(self.m)], dtype=np.int64)


def _popcounts(dim: int) -> np.ndarray:
    pc = np.zeros(dim, dtype=np.int64)
    for i in range(1, dim):
        pc[i] = pc[i >> 1] + (i & 1)
    return pc


@dataclasses.dataclass
class FockOperator:
    """Dense operator on a Fock space, optionally tagged self-adjoint."""

    space: FockSpace
    entries: np.ndarray
    self_adjoint: bool = False

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        d = self.space.dim
        if entries.shape != (d, d):
            raise PreconditionError(
                f"operator shape {entries.shape} does not match Fock dimension {d}"
            )
        if not np.all(np.isfinite(entries)):
            raise ValidityError("operator entries must be finite")
        if self.self_adjoint:
            scale = max(1.0, float(np.max(np.abs(entries))))
            if float(np.max(np.abs(entries - entries.T))) > 1e-12 * scale:
                raise ValidityError("operator tagged self-adjoint is not symmetric")
        self.entries = entries
        self._dec = None

    def spectral(self):
        """Eigendecomposition, cached; requires the self-adjoint tag."""
        if not self.self_adjoint:
            raise PreconditionError("spectral calculus needs a self-adjoint operator")
        if self._dec is None:
            lam, V = np.linalg.eigh(self.entries)
            self._dec = (lam, V)
        return self._dec


@dataclasses.dataclass(frozen=True)
class CarOperators:
    """Creation, annihilation, and number operators for every window site."""

    space: FockSpace
    creators: tuple
    annihilators: tuple
    numbers: tuple

    def create(self, site) -> FockOperator:
        return self.creators[self.space.index_of(site)]

    def annihilate(self, site) -> FockOperator:
        return self.annihilators[self.space.index_of(site)]

    def number(self, site) -> FockOperator:
        return self.numbers[self.space.index_of(site)]

    def field_create(self, h) -> FockOperator:
        """a*(h) = sum_x h(x) a*_x for a real coefficient vector h."""
        h = np.asarray(h, dtype=float)
        if h.shape != (self.space.m,):
            raise PreconditionError("coefficient vector length must match the window")
        total = sum(c * op.entries for c, op in zip(h, self.creators))
        return FockOperator(self.space, total)

    def field_annihilate(self, k) -> FockOperator:
        k = np.asarray(k, dtype=float)
        if k.shape != (self.space.m,):
            raise PreconditionError("coefficient vector length must match the window")
        total = sum(c * op.entries for c, op in zip(k, self.annihilators))
        return FockOperator(self.space, total)


def car_operators(space: FockSpace) -> CarOperators:
    """Jordan-Wigner matrices; the CAR relations hold in exact sign arithmetic."""
    dim = space.dim
    pc = _popcounts(dim)
    states = np.arange(dim, dtype=np.int64)
    creators = []
    annihilators = []
    numbers = []
    for i in range(space.m):
        bit = 1 << i
        low = bit - 1
        occupied = (states & bit) != 0
        src = states[occupied]
        dst = src ^ bit
        sign = 1.0 - 2.0 * (pc[src & low] & 1)
        A = np.zeros((dim, dim))
        A[dst, src] = sign
        annihilators.append(FockOperator(space, A))
        creators.append(FockOperator(space, A.T.copy()))
        numbers.append(
            FockOperator(space, np.diag(occupied.astype(float)), self_adjoint=True)
        )
    return CarOperators(space, tuple(creators), tuple(annihilators), tuple(numbers))


def second_quantization(space: FockSpace, H: SymmetricOperator) -> FockOperator:
    """L = sum_{x,y} H(x,y) a*_x a_y, assembled state-by-state."""
    if tuple(H.site_labels) != space.site_labels:
        raise PreconditionError(
            "operator window does not match the Fock-space window"
        )
    dim = space.dim
    m = space.m
    pc = _popcounts(dim)
    states = np.arange(dim, dtype=np.int64)
    L = np.zeros((dim, dim))
    for j in range(m):
        bit_j = 1 << j
        low_j = bit_j - 1
        occ = (states & bit_j) != 0
        src = states[occ]
        mid = src ^ bit_j
        sign_j = 1.0 - 2.0 * (pc[src & low_j] & 1)
        for i in range(m):
            h = H.entries[i, j]
            if h == 0.0:
                continue
            bit_i = 1 << i
            low_i = bit_i - 1
            free = (mid & bit_i) == 0
            fin = mid[free] | bit_i
            sign_i = 1.0 - 2.0 * (pc[mid[free] & low_i] & 1)
            L[fin, src[free]] += h * sign_j[free] * sign_i
    return FockOperator(space, L, self_adjoint=True)


def _finite_beta(beta) -> float:
    b = float(beta)
    if not (b > 0 and math.isfinite(b)):
        raise ConfigurationError("beta must be a positive finite real")
    return b


def gibbs_expectation(L: FockOperator, beta, A: FockOperator) -> float:
    """Tr(e^{-beta L} A) / Tr(e^{-beta L}) in L's eigenbasis."""
    b = _finite_beta(beta)
    if A.space.dim != L.space.dim:
        raise PreconditionError("observable lives on a different Fock space")
    lam, V = L.spectral()
    w = np.exp(-b * (lam - lam[0]))
    diag = np.einsum("ik,ik->k", V, A.entries @ V)
    return float(np.dot(diag, w) / np.sum(w))


def schwinger(L: FockOperator, beta, ops, times) -> float:
    """Normalized cyclic trace with heat-kernel spacers between the operators.

    Tr(e^{-(t_1+beta/2)L} A_1 e^{-(t_2-t_1)L} ... A_n e^{-(beta/2-t_n)L}) / Z
    with Z = Tr(e^{-beta L}).  The spectrum is shifted to its minimum before
    exponentiating; the shift cancels in the ratio because the spacers span
    one full period.
    """
    b = _finite_beta(beta)
    ops = list(ops)
    times = [float(t) for t in times]
    if len(ops) == 0 or len(ops) != len(times):
        raise PreconditionError("need equally many operators and times, at least one")
    if any(s > t for s, t in zip(times, times[1:])):
        raise PreconditionError("times must be nondecreasing")
    half = b / 2.0
    if times[0] < -half - 1e-12 or times[-1] > half + 1e-12:
        raise PreconditionError(f"times must lie in [-{half}, {half}]")
    for A in ops:
        if A.space.dim != L.space.dim:
            raise PreconditionError("operator lives on a different Fock space")
    lam, V = L.spectral()
    lam = lam - lam[0]
    tilde = [V.T @ A.entries @ V for A in ops]
    # cyclic: fold the leading and trailing spacers into one segment
    gaps = [times[i + 1] - times[i] for i in range(len(times) - 1)]
    closing = (times[0] + half) + (half - times[-1])
    acc = np.exp(-closing * lam)[:, None] * tilde[0]
    for gap, T in zip(gaps, tilde[1:]):
        acc = (acc * np.exp(-gap * lam)[None, :]) @ T
    Z = float(np.sum(np.exp(-b * lam)))
    return float(np.trace(acc) / Z)


# ---------------------------------------------------------------------------
# stochastic positivity


def _gauge_signs(H: SymmetricOperator) -> np.ndarray:
    """Diagonal +-1 vector making off-diagonal entries nonpositive, when the
    sign structure admits one; identity otherwise."""
    m = H.dim
    A = H.entries
    signs = np.zeros(m, dtype=np.int64)
    for root in range(m):
        if signs[root] != 0:
            continue
        signs[root] = 1
        queue = [root]
        while queue:
            x = queue.pop()
            for y in range(m):
                if y == x or A[x, y] == 0.0:
                    continue
                want = -signs[x] if A[x, y] > 0 else signs[x]
                if signs[y] == 0:
                    signs[y] = want
                    queue.append(y)
                elif signs[y] != want:
                    return np.ones(m)  # frustrated sign structure, leave as is
    return signs.astype(float)


@dataclasses.dataclass(frozen=True)
class MinorScan:
    duration: float
    order: int
    min_value: float


@dataclasses.dataclass(frozen=True)
class CertificateReport:
    """Outcome of the stochastic-positivity scan."""

    passed: bool
    threshold: float
    scans: tuple
    witness: tuple | None  # (duration, order, rows, cols, value)
    transfer_minima: tuple  # (duration, min Fock heat-kernel entry)

    @property
    def min_minor(self) -> float:
        return min(s.min_value for s in self.scans)


def positivity_certificate(H: SymmetricOperator, beta, time_grid) -> CertificateReport:
    """Scan minors of the one-particle heat kernels and the Fock transfers.

    For each duration t in the grid, every minor of e^{-tH} with increasing
    row and column indices up to order min(m,5) is checked against the
    threshold; the operator is first conjugated to its nonpositive
    off-diagonal gauge when the sign structure admits one, so certificates
    are invariant under diagonal +-1 conjugation.
    """
    b = _finite_beta(beta)
    durations = [float(t) for t in time_grid]
    if not durations:
        raise PreconditionError("empty certificate grid")
    for t in durations:
        if not 0.0 < t <= b + 1e-12:
            raise PreconditionError(f"certificate durations must lie in (0, {b}], got {t}")
    signs = _gauge_signs(H)
    Hf = SymmetricOperator(
        H.entries * np.outer(signs, signs), site_labels=H.site_labels
    )
    dec = eig_sym(Hf)
    m = H.dim
    max_order = min(m, 5)
    scans = []
    witness = None
    passed = True
    for t in durations:
        M = (dec.eigenvectors * np.exp(-t * dec.eigenvalues)) @ dec.eigenvectors.T
        for k in range(1, max_order + 1):
            combos = [np.asarray(c) for c in itertools.combinations(range(m), k)]
            stack = np.empty((len(combos), len(combos), k, k))
            for a, rows in enumerate(combos):
                block = M[rows, :]
                for c, cols in enumerate(combos):
                    stack[a, c] = block[:, cols]
            dets = np.linalg.det(stack.reshape(-1, k, k))
            low = float(np.min(dets))
            scans.append(MinorScan(t, k, low))
            if low < MINOR_TOL and (witness is None or low < witness[4]):
                flat = int(np.argmin(dets))
                witness = (
                    t,
                    k,
                    tuple(int(i) for i in combos[flat // len(combos)]),
                    tuple(int(i) for i in combos[flat % len(combos)]),
                    low,
                )
                passed = False
    space = FockSpace(H.site_labels)
    L = second_quantization(space, Hf)
    lam, V = L.spectral()
    lam = lam - lam[0]
    minima = []
    for t in sorted(set(durations)):
        E = (V * np.exp(-t * lam)) @ V.T
        minima.append((t, float(np.min(E))))
    return CertificateReport(
        passed, MINOR_TOL, tuple(scans), witness, tuple(minima)
    )


# ---------------------------------------------------------------------------
# path laws


@dataclasses.dataclass(frozen=True)
class PathLaw:
    """Exact cyclic law of the occupation process on a finite time grid.

    prob(w_1..w_n) multiplies the transfer entries along the grid and the
    wrap segment closing the period, normalized by Z = Tr(e^{-beta L}).
    """

    space: FockSpace
    beta: float
    times: tuple
    transfers: tuple  # T_i maps the state at times[i] to times[i+1]
    wrap: np.ndarray  # maps the state at times[-1] back to times[0]
    Z: float

    @property
    def n_times(self) -> int:
        return len(self.times)

    def prob(self, path) -> float:
        path = [int(w) for w in path]
        if len(path) != self.n_times:
            raise PreconditionError(
                f"path visits {len(path)} states, grid has {self.n_times}"
            )
        dim = self.space.dim
        if any(not 0 <= w < dim for w in path):
            raise PreconditionError("path state outside the Fock basis")
        value = self.wrap[path[0], path[-1]]
        for i, T in enumerate(self.transfers):
            value *= T[path[i + 1], path[i]]
        return float(value / self.Z)

    def cycle_matrix(self, i: int) -> np.ndarray:
        """Product of transfers once around the cycle, based at grid index i."""
        order = list(self.transfers[i:]) + [self.wrap] + list(self.transfers[:i])
        M = np.eye(self.space.dim)
        for T in order:
            M = T @ M
        return M

    def marginal(self, i: int) -> np.ndarray:
        """Exact one-time configuration marginal at grid index i."""
        return np.diag(self.cycle_matrix(i)) / self.Z

    def site_density(self, i: int) -> np.ndarray:
        """Occupation probability of each site at grid index i."""
        marg = self.marginal(i)
        states = np.arange(self.space.dim)
        dens = np.empty(self.space.m)
        for s in range(self.space.m):
            dens[s] = float(np.sum(marg[(states >> s) & 1 == 1]))
        return dens


def path_law(H: SymmetricOperator, beta, grid) -> PathLaw:
    b = _finite_beta(beta)
    times = [float(t) for t in grid]
    if not times:
        raise PreconditionError("empty time grid")
    half = b / 2.0
    if any(s >= t for s, t in zip(times, times[1:])):
        raise PreconditionError("grid times must be strictly increasing")
    if times[0] < -half - 1e-12 or times[-1] > half + 1e-12:
        raise PreconditionError(f"grid times must lie in [-{half}, {half}]")
    gaps = [t - s for s, t in zip(times, times[1:])]
    closing = b - (times[-1] - times[0])
    positive = sorted({g for g in gaps + [closing] if g > 0.0})
    report = positivity_certificate(H, b, positive if positive else [b])
    if not report.passed:
        t, k, rows, cols, value = report.witness
        raise ValidityError(
            "stochastic positivity certificate failed: "
            f"order-{k} minor {rows}x{cols} of the duration-{t} heat kernel "
            f"is {value:.3e}"
        )
    signs = _gauge_signs(H)
    Hf = SymmetricOperator(H.entries * np.outer(signs, signs), site_labels=H.site_labels)
    space = FockSpace(H.site_labels)
    L = second_quantization(space, Hf)
    lam, V = L.spectral()
    lam = lam - lam[0]

    cache = {}

    def transfer(duration: float) -> np.ndarray:
        if duration not in cache:
            E = (V * np.exp(-duration * lam)) @ V.T
            low = float(np.min(E))
            if low < -TRANSFER_CLAMP_TOL:
                raise ValidityError(
                    f"transfer entry {low:.3e} below the clamp tolerance "
                    f"for duration {duration}"
                )
            np.clip(E, 0.0, None, out=E)
            cache[duration] = E
        return cache[duration]

    transfers = tuple(transfer(g) for g in gaps)
    wrap = transfer(closing) if closing > 0.0 else np.eye(space.dim)
    Z = float(np.sum(np.exp(-b * lam)))
    if not Z > 0:
        raise ValidityError("partition function is not positive")
    law = PathLaw(space, b, tuple(times), transfers, wrap, Z)
    total = law.cycle_matrix(0).trace() / Z
    if abs(total - 1.0) > 1e-9:
        raise ValidityError(f"path probabilities sum to {total}, not 1")
    return law


def sample_trajectory(law: PathLaw, seed: int, count: int) -> np.ndarray:
    """Draw i.i.d. trajectories; forward-filter/backward-sample on the cycle.

    Returns an integer array of shape (count, n_times) of basis bitmasks;
    identical seeds reproduce identical draws.
    """
    if count < 1:
        raise PreconditionError("need count >= 1")
    rng = np.random.default_rng(seed)
    n = law.n_times
    dim = law.space.dim
    # suffix[i] maps the state at times[i] through the wrap back to times[0]
    suffix = [None] * n
    suffix[n - 1] = law.wrap
    for i in range(n - 2, -1, -1):
        suffix[i] = suffix[i + 1] @ law.transfers[i]
    start = np.diag(suffix[0]) / law.Z
    start = np.clip(start, 0.0, None)
    start_cdf = np.cumsum(start / np.sum(start))
    out = np.empty((count, n), dtype=np.int64)
    for d in range(count):
        w0 = int(np.searchsorted(start_cdf, rng.random(), side="right"))
        w0 = min(w0, dim - 1)
        out[d, 0] = w0
        prev = w0
        for i in range(n - 1):
            q = law.transfers[i][:, prev] * suffix[i + 1][w0, :]
            total = float(np.sum(q))
            cdf = np.cumsum(q / total)
            nxt = int(np.searchsorted(cdf, rng.random(), side="right"))
            prev = min(nxt, dim - 1)
            out[d, i + 1] = prev
    return out
