"""Orthogonal polynomial families and their operators.

Weight functions, Stieltjes recurrences, symmetrized difference operators
on lattice windows, Jacobi (three-term) operators for the continuous
families, and the ladder constructions for the limit transitions between
the discrete families and the modified Hermite/Laguerre/Jacobi ensembles.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy.special import gammaln, gammasgn, loggamma

from .errors import (
    ConfigurationError,
    NumericalFailureError,
    PreconditionError,
    ValidityError,
)
from .linalg import SymmetricOperator, eig_sym

WINDOW_SITE_CAP = 10_000
MASS_TARGET = 1.0 - 1e-12


# ---------------------------------------------------------------------------
# family specs


class Family:
    """Base tag; concrete families define lattice, weight, and rates."""

    lattice: str  # "nonneg" | "finite" | "int" | "half_int" | "continuous"

    @property
    def name(self) -> str:
        return type(self).__name__.lower()


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigurationError(message)


@dataclasses.dataclass(frozen=True)
class Meixner(Family):
    c: float
    xi: float
    lattice = "nonneg"

    def __post_init__(self):
        _require(self.c > 0, f"Meixner needs c > 0, got {self.c}")
        _require(0 < self.xi < 1, f"Meixner needs xi in (0,1), got {self.xi}")

    def log_weight(self, x):
        x = np.asarray(x, dtype=float)
        return (
            gammaln(self.c + x)
            - gammaln(self.c)
            + x * math.log(self.xi)
            + self.c * math.log1p(-self.xi)
            - gammaln(x + 1)
        )

    def rates(self, x):
        x = np.asarray(x, dtype=float)
        return x, self.xi * (x + self.c)

    def level(self, n):
        return -(1.0 - self.xi) * np.asarray(n, dtype=float)


@dataclasses.dataclass(frozen=True)
class Charlier(Family):
    mu: float
    lattice = "nonneg"

    def __post_init__(self):
        _require(self.mu > 0, f"Charlier needs mu > 0, got {self.mu}")

    def log_weight(self, x):
        x = np.asarray(x, dtype=float)
        return -self.mu + x * math.log(self.mu) - gammaln(x + 1)

    def rates(self, x):
        x = np.asarray(x, dtype=float)
        return x, np.full_like(x, self.mu)

    def level(self, n):
        return -np.asarray(n, dtype=float)


@dataclasses.dataclass(frozen=True)
class Krawtchouk(Family):
    M: int
    p: float
    lattice = "finite"

    def __post_init__(self):
        _require(self.M >= 1 and self.M == int(self.M), f"Krawtchouk needs integer M >= 1, got {self.M}")
        _require(0 < self.p < 1, f"Krawtchouk needs p in (0,1), got {self.p}")

    def log_weight(self, x):
        x = np.asarray(x, dtype=float)
        return (
            gammaln(self.M + 1)
            - gammaln(x + 1)
            - gammaln(self.M - x + 1)
            + x * math.log(self.p)
            + (self.M - x) * math.log1p(-self.p)
        )

    def rates(self, x):
        x = np.asarray(x, dtype=float)
        return (1.0 - self.p) * x, self.p * (self.M - x)

    def level(self, n):
        return -np.asarray(n, dtype=float)


@dataclasses.dataclass(frozen=True)
class Hahn(Family):
    M: int
    a: float
    b: float
    lattice = "finite"

    def __post_init__(self):
        _require(self.M >= 1 and self.M == int(self.M), f"Hahn needs integer M >= 1, got {self.M}")
        _require(self.a > -1 and self.b > -1, f"Hahn needs a, b > -1, got a={self.a}, b={self.b}")

    def log_weight(self, x):
        x = np.asarray(x, dtype=float)
        left = gammaln(self.a + x + 1) - gammaln(self.a + 1) - gammaln(x + 1)
        right = gammaln(self.M + self.b - x + 1) - gammaln(self.b + 1) - gammaln(self.M - x + 1)
        return left + right

    def rates(self, x):
        x = np.asarray(x, dtype=float)
        return x * (self.M + self.b + 1 - x), (x + self.a + 1) * (self.M - x)

    def level(self, n):
        n = np.asarray(n, dtype=float)
        return -n * (n + self.a + self.b + 1)


def _log_poch_signed(a: float, x_max: int):
    """Prefix log|(a)_x| and signs for x = 0..x_max.

    Returns (logs, signs); a zero factor poisons every later prefix
    (sign 0, log -inf).
    """
    factors = a + np.arange(x_max, dtype=float)
    logs = np.concatenate([[0.0], np.cumsum(np.log(np.abs(factors), where=factors != 0,
                                                   out=np.full(x_max, -np.inf)))])
    signs = np.concatenate([[1.0], np.cumprod(np.sign(factors))])
    return logs, signs


@dataclasses.dataclass(frozen=True)
class Racah(Family):
    M: int
    alpha: float
    beta: float
    gamma: float
    delta: float
    lattice = "finite"

    def __post_init__(self):
        _require(self.M >= 1 and self.M == int(self.M), f"Racah needs integer M >= 1, got {self.M}")
        ok = (
            self.alpha + 1 == -self.M
            or self.beta + self.delta + 1 == -self.M
            or self.gamma + 1 == -self.M
        )
        _require(ok, "Racah needs alpha+1=-M or beta+delta+1=-M or gamma+1=-M")

    def log_weight(self, x):
        xs = np.atleast_1d(np.asarray(x)).astype(int)
        g, d, al, be = self.gamma, self.delta, self.alpha, self.beta
        numer = [g + d + 1, (g + d + 3) / 2, al + 1, be + d + 1, g + 1]
        denom = [1.0, (g + d + 1) / 2, g + d - al + 1, g - be + 1, d + 1]
        x_max = int(xs.max(initial=0))
        log_v = np.zeros(len(xs))
        sign_v = np.ones(len(xs))
        for a in numer:
            logs, signs = _log_poch_signed(a, x_max)
            log_v += logs[xs]
            sign_v *= signs[xs]
        for a in denom:
            logs, signs = _log_poch_signed(a, x_max)
            log_v -= logs[xs]
            sign_v *= signs[xs]
        if np.any(sign_v <= 0):
            bad = xs[sign_v <= 0][0]
            raise ValidityError(f"Racah weight not positive at x={bad}")
        out = log_v if np.ndim(x) else log_v[0]
        return out

    def rates(self, x):
        x = np.asarray(x, dtype=float)
        g, d, al, be = self.gamma, self.delta, self.alpha, self.beta
        mu = x * (x + d) * (be - g - x) * (x - al + g + d) / (
            (2 * x + g + d + 1) * (2 * x + g + d)
        )
        lam = (-al - 1 - x) * (x + g + 1) * (x + g + d + 1) * (x + be + d + 1) / (
            (2 * x + g + d + 1) * (2 * x + g + d + 2)
        )
        return mu, lam

    def level(self, n):
        n = np.asarray(n, dtype=float)
        return -n * (n + self.alpha + self.beta + 1)


def _pair_kind(p: complex, q: complex) -> str:
    p, q = complex(p), complex(q)
    if p.imag != 0 or q.imag != 0:
        if q == p.conjugate() and p.imag != 0:
            return "principal"
        raise ConfigurationError(f"pair ({p}, {q}) is neither principal nor complementary")
    pr, qr = p.real, q.real
    if pr != int(pr) and qr != int(qr) and math.floor(pr) == math.floor(qr):
        return "complementary"
    raise ConfigurationError(
        f"real pair ({pr}, {qr}) must lie strictly inside a common unit interval (k, k+1)"
    )


def _pair_log_gamma(p: complex, q: complex, args_p, args_q):
    """log|Gamma(f(p)) Gamma(f(q))| for a principal/complementary pair; must be sign +."""
    kind = _pair_kind(p, q)
    if kind == "principal":
        return 2.0 * np.real(loggamma(np.asarray(args_p, dtype=complex)))
    ap = np.asarray(args_p).real.astype(float)
    aq = np.asarray(args_q).real.astype(float)
    sign = gammasgn(ap) * gammasgn(aq)
    if np.any(sign <= 0):
        raise ValidityError("gamma pair product not positive on the requested sites")
    return gammaln(ap) + gammaln(aq)


def _pair_product(p: complex, q: complex, x):
    """(x+p)(x+q) for a principal/complementary pair, evaluated in real arithmetic."""
    s = complex(p) + complex(q)
    prod = complex(p) * complex(q)
    x = np.asarray(x, dtype=float)
    return x * x + x * s.real + prod.real


@dataclasses.dataclass(frozen=True)
class AskeyLesky(Family):
    u: complex
    u2: complex
    w: complex
    w2: complex
    lattice = "int"

    def __post_init__(self):
        _pair_kind(self.u, self.u2)
        _pair_kind(self.w, self.w2)

    def log_weight(self, x):
        x = np.asarray(x, dtype=float)
        top = _pair_log_gamma(self.u, self.u2, np.asarray(self.u) - x + 1, np.asarray(self.u2) - x + 1)
        bot = _pair_log_gamma(self.w, self.w2, np.asarray(self.w) + x + 1, np.asarray(self.w2) + x + 1)
        return -(top + bot)

    def rates(self, x):
        mu = _pair_product(self.w, self.w2, x)
        lam = _pair_product(self.u, self.u2, -np.asarray(x, dtype=float))
        return mu, lam

    def level(self, n):
        raise PreconditionError("Askey-Lesky level law is not asserted (spectrum not fully determined)")


@dataclasses.dataclass(frozen=True)
class DiscreteHypergeometric(Family):
    """Hypergeometric difference operator family on the half-integer lattice."""

    z: complex
    z2: complex
    xi: float
    lattice = "half_int"

    def __post_init__(self):
        _require(0 < self.xi < 1, f"DiscreteHypergeometric needs xi in (0,1), got {self.xi}")
        _pair_kind(self.z, self.z2)

    def hop_sq(self, x):
        """a_x^2 = xi (z+x+1/2)(z'+x+1/2); must be positive on the lattice."""
        return self.xi * _pair_product(self.z, self.z2, np.asarray(x, dtype=float) + 0.5)

    def diagonal(self, x):
        x = np.asarray(x, dtype=float)
        s = (complex(self.z) + complex(self.z2)).real
        return -(x + self.xi * (s + x)) / (1.0 - self.xi)


@dataclasses.dataclass(frozen=True)
class Hermite(Family):
    lattice = "continuous"
    support = (-math.inf, math.inf)

    def log_weight(self, u):
        u = np.asarray(u, dtype=float)
        return -u * u

    def recurrence(self, x):
        x = np.asarray(x, dtype=float)
        return np.sqrt((x + 1) / 2.0), np.zeros_like(x)

    @property
    def mass0(self) -> float:
        return math.sqrt(math.pi)


@dataclasses.dataclass(frozen=True)
class Laguerre(Family):
    c: float
    lattice = "continuous"
    support = (0.0, math.inf)

    def __post_init__(self):
        _require(self.c > 0, f"Laguerre needs c > 0, got {self.c}")

    def log_weight(self, u):
        u = np.asarray(u, dtype=float)
        return (self.c - 1.0) * np.log(u) - u

    def recurrence(self, x):
        x = np.asarray(x, dtype=float)
        return np.sqrt((x + 1) * (x + self.c)), 2 * x + self.c

    @property
    def mass0(self) -> float:
        return math.exp(gammaln(self.c))


@dataclasses.dataclass(frozen=True)
class Jacobi(Family):
    a: float
    b: float
    lattice = "continuous"
    support = (-1.0, 1.0)

    def __post_init__(self):
        _require(self.a > -1 and self.b > -1, f"Jacobi needs a, b > -1, got a={self.a}, b={self.b}")

    def log_weight(self, u):
        u = np.asarray(u, dtype=float)
        return self.a * np.log1p(-u) + self.b * np.log1p(u)

    def recurrence(self, x):
        # Gautschi's recurrence coefficients for the measure (1-u)^a (1+u)^b du
        x = np.asarray(x, dtype=float)
        a, b = self.a, self.b
        ab = a + b
        with np.errstate(invalid="ignore", divide="ignore"):
            bx = np.where(
                x == 0,
                (b - a) / (ab + 2),
                (b * b - a * a) / ((2 * x + ab) * (2 * x + ab + 2)),
            )
            k = x + 1
            csq = np.where(
                k == 1,
                4 * (a + 1) * (b + 1) / ((ab + 2) ** 2 * (ab + 3)),
                4 * k * (k + a) * (k + b) * (k + ab)
                / ((2 * k + ab) ** 2 * (2 * k + ab + 1) * (2 * k + ab - 1)),
            )
        return np.sqrt(csq), bx

    @property
    def mass0(self) -> float:
        return math.exp(
            (self.a + self.b + 1) * math.log(2.0)
            + gammaln(self.a + 1)
            + gammaln(self.b + 1)
            - gammaln(self.a + self.b + 2)
        )


DISCRETE_CLASSICAL = (Meixner, Charlier, Krawtchouk, Hahn, Racah)
CONTINUOUS = (Hermite, Laguerre, Jacobi)


# ---------------------------------------------------------------------------
# windows and weights


@dataclasses.dataclass(frozen=True)
class SiteWindow:
    """Contiguous block of lattice sites, step 1 from lo to hi inclusive."""

    lattice: str
    lo: float
    hi: float

    def __post_init__(self):
        if self.lattice not in ("nonneg", "finite", "int", "half_int"):
            raise PreconditionError(f"unknown lattice tag {self.lattice!r}")
        lo, hi = float(self.lo), float(self.hi)
        if lo > hi:
            raise PreconditionError(f"window needs lo <= hi, got [{lo}, {hi}]")
        frac = 0.5 if self.lattice == "half_int" else 0.0
        for v in (lo, hi):
            if (v - frac) != round(v - frac):
                raise PreconditionError(f"bound {v} is not on the {self.lattice} lattice")
        if self.lattice in ("nonneg", "finite") and lo < 0:
            raise PreconditionError(f"lattice {self.lattice} has no negative sites (lo={lo})")
        if hi - lo + 1 > WINDOW_SITE_CAP:
            raise PreconditionError(f"window of {int(hi - lo + 1)} sites exceeds cap {WINDOW_SITE_CAP}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def sites(self) -> np.ndarray:
        return self.lo + np.arange(int(self.hi - self.lo) + 1, dtype=float)

    def __len__(self) -> int:
        return int(self.hi - self.lo) + 1


def site_window(family: Family, lo: float, hi: float) -> SiteWindow:
    """Window on the family's natural lattice, validated against it."""
    if family.lattice == "continuous":
        raise PreconditionError(f"{family.name} is continuous; it has no site windows")
    win = SiteWindow(family.lattice, lo, hi)
    if family.lattice == "finite" and hi > family.M:
        raise PreconditionError(f"window hi={hi} exceeds finite lattice bound M={family.M}")
    return win


def weight(family: Family, x) -> float:
    """Pointwise weight w(x), evaluated in log space.

    Discrete families take lattice sites; continuous families take points
    in the open support interval.
    """
    if isinstance(family, DiscreteHypergeometric):
        raise PreconditionError("the discrete hypergeometric family carries no scalar weight")
    if family.lattice == "continuous":
        u = float(x)
        lo, hi = family.support
        if not (lo < u < hi):
            raise PreconditionError(f"{u} outside open support ({lo}, {hi}) of {family.name}")
        return float(np.exp(family.log_weight(u)))
    frac = 0.5 if family.lattice == "half_int" else 0.0
    xf = float(x)
    if (xf - frac) != round(xf - frac):
        raise PreconditionError(f"{x} is not on the {family.lattice} lattice")
    if family.lattice in ("nonneg", "finite") and xf < 0:
        raise PreconditionError(f"{x} is negative, outside the {family.lattice} lattice")
    if family.lattice == "finite" and xf > family.M:
        raise PreconditionError(f"{x} exceeds the finite lattice bound M={family.M}")
    val = float(np.exp(family.log_weight(xf)))
    if not (val > 0 and math.isfinite(val)):
        raise NumericalFailureError(f"weight at x={x} evaluated to {val}")
    return val


def _window_mass(family: Family, window: SiteWindow) -> float:
    return float(np.sum(np.exp(family.log_weight(window.sites))))


def total_mass(family: Family) -> float:
    """Sum of the weight over the family's full lattice."""
    if family.lattice == "finite":
        return _window_mass(family, site_window(family, 0, family.M))
    if isinstance(family, (Meixner, Charlier)):
        return 1.0  # negative binomial / Poisson normalization
    if isinstance(family, AskeyLesky):
        # super-factorial decay: widen until the tail is dead
        lo, hi = -16.0, 16.0
        prev = -1.0
        while hi - lo < WINDOW_SITE_CAP:
            m = _window_mass(family, SiteWindow("int", lo, hi))
            if prev > 0 and m - prev <= 1e-16 * m:
                return m
            prev = m
            lo -= 16
            hi += 16
        raise NumericalFailureError("Askey-Lesky total mass did not stabilize")
    raise PreconditionError(f"no lattice mass for family {family.name}")


def captured_mass(family: Family, window: SiteWindow) -> float:
    """Fraction of the full lattice weight carried by the window (1.0 when finite)."""
    if family.lattice == "finite":
        return 1.0
    return _window_mass(family, window) / total_mass(family)


def auto_window(family: Family, mass_target: float = MASS_TARGET) -> SiteWindow:
    """Grow a window until it captures the target weight mass (cap 10^4 sites)."""
    if family.lattice == "finite":
        return site_window(family, 0, family.M)
    if family.lattice == "nonneg":
        hi = 8.0
        while hi + 1 <= WINDOW_SITE_CAP:
            win = SiteWindow("nonneg", 0.0, hi)
            if captured_mass(family, win) >= mass_target:
                return win
            hi = math.ceil(hi * 1.5)
        raise ValidityError(
            f"window cap {WINDOW_SITE_CAP} reached before mass {mass_target} for {family.name}"
        )
    if family.lattice in ("int", "half_int"):
        half = 8.0
        frac = 0.5 if family.lattice == "half_int" else 0.0
        while 2 * half + 1 <= WINDOW_SITE_CAP:
            win = SiteWindow(family.lattice, -half - frac, half - frac)
            if isinstance(family, DiscreteHypergeometric):
                return win  # no weight to capture; fixed moderate window
            if captured_mass(family, win) >= mass_target:
                return win
            half = math.ceil(half * 1.5)
        raise ValidityError(
            f"window cap {WINDOW_SITE_CAP} reached before mass {mass_target} for {family.name}"
        )
    raise PreconditionError(f"{family.name} has no lattice windows")


# ---------------------------------------------------------------------------
# polynomial tables (Stieltjes)


@dataclasses.dataclass
class PolynomialTable:
    """Rows p_n(x) = monic_n(x) w(x)^{1/2} / ||monic_n||, orthonormal on the window."""

    family: Family
    window: SiteWindow
    N: int
    values: np.ndarray
    captured_mass: float

    def __post_init__(self):
        G = self.values @ self.values.T
        resid = float(np.max(np.abs(G - np.eye(self.N))))
        allowed = max(1e-8, 3.0 * (1.0 - self.captured_mass))
        if resid > allowed:
            raise NumericalFailureError(
                f"polynomial table Gram residual {resid:.3e} exceeds {allowed:.3e}",
                residual=resid,
            )


def polynomial_table(family: Family, window: SiteWindow, N: int) -> PolynomialTable:
    """Orthonormal polynomial rows over the window by the Stieltjes procedure."""
    if family.lattice == "continuous":
        raise PreconditionError("polynomial tables are built on discrete lattices only")
    if isinstance(family, DiscreteHypergeometric):
        raise PreconditionError("the discrete hypergeometric family carries no weight")
    if window.lattice != family.lattice:
        raise PreconditionError(
            f"window lattice {window.lattice!r} does not match family lattice {family.lattice!r}"
        )
    if not 1 <= N <= len(window):
        raise PreconditionError(f"need 1 <= N <= {len(window)}, got N={N}")
    mass = captured_mass(family, window)
    if family.lattice != "finite" and mass < 0.999:
        raise ValidityError(
            f"window [{window.lo}, {window.hi}] captures mass {mass:.6f} < 0.999"
        )
    x = window.sites
    wv = np.exp(family.log_weight(x))
    sq = np.sqrt(wv)
    rows = np.empty((N, len(x)))
    p_prev = np.zeros_like(x)
    p_cur = np.ones_like(x)
    norm2_prev = 1.0
    norm2_cur = float(np.sum(wv))
    for n in range(N):
        if not (norm2_cur > 0 and math.isfinite(norm2_cur)):
            raise NumericalFailureError(
                f"Stieltjes norm lost positivity at degree {n}: {norm2_cur}"
            )
        r = p_cur * sq
        # the monic recurrence drifts at high degree; project out the span of
        # the earlier rows (twice) before normalizing
        for _ in range(2 if n > 0 else 0):
            r = r - rows[:n].T @ (rows[:n] @ r)
        nrm = float(np.linalg.norm(r))
        if not (nrm > 0 and math.isfinite(nrm)):
            raise NumericalFailureError(
                f"Stieltjes direction collapsed at degree {n}"
            )
        rows[n] = r / nrm
        if n == N - 1:
            break
        a_n = float(np.sum(x * p_cur * p_cur * wv)) / norm2_cur
        b_n = norm2_cur / norm2_prev if n > 0 else 0.0
        p_next = (x - a_n) * p_cur - b_n * p_prev
        p_prev, p_cur = p_cur, p_next
        norm2_prev, norm2_cur = norm2_cur, float(np.sum(p_cur * p_cur * wv))
    return PolynomialTable(family, window, N, rows, mass)


# ---------------------------------------------------------------------------
# difference and Jacobi operators


def _tridiag(sites, diag, off) -> SymmetricOperator:
    n = len(diag)
    A = np.zeros((n, n))
    A[np.arange(n), np.arange(n)] = diag
    if n > 1:
        A[np.arange(n - 1), np.arange(1, n)] = off
        A[np.arange(1, n), np.arange(n - 1)] = off
    return SymmetricOperator(A, site_labels=tuple(sites))


def difference_operator(family: Family, window: SiteWindow) -> SymmetricOperator:
    """Symmetrized difference operator D = w^{1/2} D_raw w^{-1/2} on the window.

    Tridiagonal with diagonal -(mu_x + lambda_x) and off-diagonal
    sqrt(mu_{x+1} lambda_x); couplings leaving the window are dropped
    (Dirichlet truncation).  The discrete hypergeometric family uses its
    own rates and the 1/(1-xi) scaling.
    """
    if family.lattice == "continuous":
        raise PreconditionError(f"{family.name} is continuous; use jacobi_operator")
    if window.lattice != family.lattice:
        raise PreconditionError(
            f"window lattice {window.lattice!r} does not match family lattice {family.lattice!r}"
        )
    x = window.sites
    if family.lattice == "finite" and (window.lo != 0 or window.hi != family.M):
        raise PreconditionError(
            f"finite families need the full window [0, {family.M}]"
        )
    if isinstance(family, DiscreteHypergeometric):
        hop = family.hop_sq(x[:-1]) if len(x) > 1 else np.zeros(0)
        bad = np.nonzero(hop <= 0)[0]
        if bad.size:
            raise ValidityError(f"hop rate not positive between sites {x[bad[0]]} and {x[bad[0]] + 1}")
        return _tridiag(x, family.diagonal(x), np.sqrt(hop) / (1.0 - family.xi))
    mu, lam = family.rates(x)
    # interior rate positivity: every used off-diagonal factor must be > 0
    bad_lam = np.nonzero(lam[:-1] <= 0)[0]
    if bad_lam.size:
        raise ValidityError(f"birth rate lambda_x <= 0 at site x={x[bad_lam[0]]}")
    bad_mu = np.nonzero(mu[1:] <= 0)[0]
    if bad_mu.size:
        raise ValidityError(f"death rate mu_x <= 0 at site x={x[bad_mu[0] + 1]}")
    off = np.sqrt(mu[1:] * lam[:-1]) if len(x) > 1 else np.zeros(0)
    return _tridiag(x, -(mu + lam), off)


def jacobi_operator(family: Family, dim: int) -> SymmetricOperator:
    """Three-term recurrence operator of the orthonormal polynomials, truncated."""
    if family.lattice != "continuous":
        raise PreconditionError(f"{family.name} is discrete; use difference_operator")
    if dim < 2:
        raise PreconditionError(f"jacobi_operator needs dim >= 2, got {dim}")
    x = np.arange(dim, dtype=float)
    a, b = family.recurrence(x)
    return _tridiag(x, b, a[:-1])


def gauss_rule(family: Family, order: int):
    """Golub-Welsch quadrature in the family weight: nodes and weights."""
    dec = eig_sym(jacobi_operator(family, order))
    nodes = dec.eigenvalues
    weights = family.mass0 * dec.eigenvectors[0, :] ** 2
    return nodes, weights


def weighted_poly_values(family: Family, n_max: int, us) -> np.ndarray:
    """psi_x(u) = p_hat_x(u) sqrt(w(u)) for x < n_max at each point u.

    p_hat are the orthonormal polynomials; the recurrence is seeded with
    psi_0 = sqrt(w/mass0), which keeps every value bounded.
    """
    if family.lattice != "continuous":
        raise PreconditionError("weighted polynomial values exist for continuous families")
    us = np.asarray(us, dtype=float)
    out = np.empty((n_max, len(us)))
    a, b = family.recurrence(np.arange(max(n_max, 1), dtype=float))
    out[0] = np.exp(0.5 * family.log_weight(us)) / math.sqrt(family.mass0)
    if n_max > 1:
        out[1] = (us - b[0]) / a[0] * out[0]
    for x in range(1, n_max - 1):
        out[x + 1] = ((us - b[x]) * out[x] - a[x - 1] * out[x - 1]) / a[x]
    return out


# ---------------------------------------------------------------------------
# limit regimes


def _window_head(m: int) -> SiteWindow:
    return SiteWindow("nonneg", 0.0, float(m - 1))


def _scaled_tridiag(m, mu, lam, shift, scale, ext_from=None, ext_value=0.0):
    """Tridiagonal (-(mu+lam) + shift)/scale with off sqrt(mu_{x+1} lam_x)/scale.

    Sites at index >= ext_from are replaced by the decoupled constant
    (ext_value + shift)/scale on the diagonal.
    """
    diag = (-(mu + lam) + shift) / scale
    off = np.sqrt(np.maximum(mu[1:] * lam[:-1], 0.0)) / scale
    if ext_from is not None and ext_from < m:
        diag[ext_from:] = (ext_value + shift) / scale
        if ext_from >= 1:
            off[ext_from - 1:] = 0.0
    return _tridiag(np.arange(m, dtype=float), diag, off)


def _sign_flip(op: SymmetricOperator) -> SymmetricOperator:
    """Conjugate by s delta_x = (-1)^x delta_x."""
    n = op.dim
    s = (-1.0) ** np.arange(n)
    return SymmetricOperator(op.entries * np.outer(s, s), site_labels=op.site_labels)


def _neg_s_conj(op: SymmetricOperator, r: float) -> SymmetricOperator:
    shifted = SymmetricOperator(
        op.entries - r * np.eye(op.dim), site_labels=op.site_labels
    )
    return SymmetricOperator(-_sign_flip(shifted).entries, site_labels=op.site_labels)


LADDER_K = 6
_REGIME_DEFAULT_DIM = 24


def _regime_charlier_dhermite(k: int, m: int, r: float = 0.3):
    N = 4.0 * 4.0**k
    mu = N + math.sqrt(2 * N) * r
    fam = Charlier(mu=mu)
    x = np.arange(m, dtype=float)
    mux, lamx = fam.rates(x)
    scaled = _scaled_tridiag(m, mux, lamx, shift=N, scale=math.sqrt(2 * N))
    T = jacobi_operator(Hermite(), m)
    target = SymmetricOperator(T.entries - r * np.eye(m))
    return scaled, target, float(N)


def _regime_meixner_dhermite(k: int, m: int, r: float = 0.3, xi: float = 0.5):
    c = 8.0 * 4.0**k
    xc = xi * c
    N = round((xc - math.sqrt(2 * xc) * r) / (1 - xi))
    fam = Meixner(c=c, xi=xi)
    x = np.arange(m, dtype=float)
    mux, lamx = fam.rates(x)
    scaled = _scaled_tridiag(m, mux, lamx, shift=(1 - xi) * N, scale=math.sqrt(2 * xc))
    T = jacobi_operator(Hermite(), m)
    target = SymmetricOperator(T.entries - r * np.eye(m))
    return scaled, target, float(c)


def _regime_meixner_dlaguerre(k: int, m: int, r: float = 1.0, c: float = 1.5):
    one_minus_xi = 0.25 / 2.0**k
    xi = 1.0 - one_minus_xi
    N = round(r / one_minus_xi)
    fam = Meixner(c=c, xi=xi)
    x = np.arange(m, dtype=float)
    mux, lamx = fam.rates(x)
    scaled = _scaled_tridiag(m, mux, lamx, shift=one_minus_xi * N, scale=1.0)
    target = _neg_s_conj(jacobi_operator(Laguerre(c=c), m), r)
    return scaled, target, float(xi)


def _regime_krawtchouk_dhermite(k: int, m: int, r: float = 0.3):
    # small p keeps the (1-2p) diagonal factor flat so the error halves per rung
    p = 0.05 / 2.0**k
    M = 1280 * 8**k
    pM = p * M
    N = round(pM - math.sqrt(2 * pM) * r)
    x = np.arange(m, dtype=float)
    mux = (1.0 - p) * x
    lamx = p * (M - x)
    ext = M + 1 if M + 1 < m else None
    m_N = -float(N)
    scaled = _scaled_tridiag(
        m, mux, lamx, shift=float(N), scale=math.sqrt(2 * pM),
        ext_from=ext, ext_value=m_N - 1.0,
    )
    T = jacobi_operator(Hermite(), m)
    target = SymmetricOperator(T.entries - r * np.eye(m))
    return scaled, target, float(pM)


def _regime_hahn_dlaguerre(k: int, m: int, r: float = 1.0, a: float = 0.5, b: float = 1.5):
    M = 64 * 4**k
    N = round(math.sqrt(r * M))
    x = np.arange(m, dtype=float)
    mux = x * (M + b + 1 - x)
    lamx = (x + a + 1) * (M - x)
    ext = M + 1 if M + 1 < m else None
    m_N = -float(N * (N + a + b + 1))
    scaled = _scaled_tridiag(
        m, mux, lamx, shift=float(N * (N + a + b + 1)), scale=float(M),
        ext_from=ext, ext_value=m_N - 1.0,
    )
    target = _neg_s_conj(jacobi_operator(Laguerre(c=a + 1), m), r)
    return scaled, target, float(M)


def _regime_racah_djacobi(k: int, m: int, r: float = 0.68, a: float = 0.5, b: float = 1.5):
    # (1-r)/2 = 0.16, so N = 0.4 M exactly on this ladder (no rounding noise)
    M = 40 * 2**k
    N = round(M * math.sqrt((1 - r) / 2))
    fam = Racah(M=M, alpha=-M - 1, beta=M + a + 1, gamma=a, delta=b)
    x = np.arange(m, dtype=float)
    mux, lamx = fam.rates(x)
    ext = M + 1 if M + 1 < m else None
    m_N = -float(N * (N + fam.alpha + fam.beta + 1))
    scaled = _scaled_tridiag(
        m, mux, lamx, shift=float(N * (N + fam.alpha + fam.beta + 1)),
        scale=M * M / 2.0, ext_from=ext, ext_value=m_N - 1.0,
    )
    T = jacobi_operator(Jacobi(a=a, b=b), m)
    target = SymmetricOperator(T.entries - r * np.eye(m))
    return scaled, target, float(M)


LIMIT_REGIMES = {
    "charlier_dhermite": _regime_charlier_dhermite,
    "meixner_dhermite": _regime_meixner_dhermite,
    "meixner_dlaguerre": _regime_meixner_dlaguerre,
    "krawtchouk_dhermite": _regime_krawtchouk_dhermite,
    "hahn_dlaguerre": _regime_hahn_dlaguerre,
    "racah_djacobi": _regime_racah_djacobi,
}


def limit_regime(name: str, k: int, dim: int = _REGIME_DEFAULT_DIM):
    """Rung k of a limit-transition ladder: (scaled operator, target, window).

    Both operators live on the shared window 0..dim-1; the third return
    value is the window.  The growing scale parameter of the rung is
    available via `regime_scale`.
    """
    if name not in LIMIT_REGIMES:
        raise ConfigurationError(
            f"unknown regime {name!r}; registered: {sorted(LIMIT_REGIMES)}"
        )
    if not 0 <= k <= 12:
        raise PreconditionError(f"ladder index k={k} outside 0..12")
    scaled, target, _ = LIMIT_REGIMES[name](k, dim)
    return scaled, target, _window_head(dim)


def regime_scale(name: str, k: int, dim: int = _REGIME_DEFAULT_DIM) -> float:
    """The growing parameter of rung k (N, c, xi, pM, or M depending on regime)."""
    if name not in LIMIT_REGIMES:
        raise ConfigurationError(
            f"unknown regime {name!r}; registered: {sorted(LIMIT_REGIMES)}"
        )
    return LIMIT_REGIMES[name](k, dim)[2]


def central_third(m: int) -> slice:
    """Index slice of the middle third of a window of m sites."""
    return slice(m // 3, 2 * (m // 3))
