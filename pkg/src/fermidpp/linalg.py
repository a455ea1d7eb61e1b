"""Dense symmetric and skew-symmetric linear algebra.

Eigendecompositions with a fixed sign convention, functional calculus
through a closed registry of scalar maps, determinants, and Pfaffians by
Parlett-Reid elimination.  Everything downstream (kernels, Fock traces,
samplers) goes through these entry points so that tolerances and
conventions live in one place.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import ConfigurationError, NumericalFailureError, PreconditionError

NEAR_ZERO_REL = 1e-10


def _square_float_array(entries, name: str = "entries") -> np.ndarray:
    A = np.array(entries, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise PreconditionError(f"{name} must be a square matrix, got shape {A.shape}")
    if A.size and not np.all(np.isfinite(A)):
        raise PreconditionError(f"{name} must have finite entries")
    return A


def _entry_scale(A: np.ndarray) -> float:
    return 1.0 + (float(np.max(np.abs(A))) if A.size else 0.0)


@dataclasses.dataclass
class SymmetricOperator:
    """Real symmetric matrix together with the site coordinates it acts on.

    Site labels are the physical coordinates of the truncation window
    (integers or half-integers, strictly increasing); row/column i of
    ``entries`` corresponds to ``site_labels[i]``.
    """

    entries: np.ndarray
    site_labels: tuple[float, ...] | None = None

    def __post_init__(self):
        A = _square_float_array(self.entries)
        if A.size:
            skew = float(np.max(np.abs(A - A.T)))
            if skew > 1e-12 * _entry_scale(A):
                raise PreconditionError(
                    f"matrix is not symmetric: max |A - A^T| = {skew:.3e}"
                )
        A.flags.writeable = False
        self.entries = A
        n = A.shape[0]
        if self.site_labels is None:
            self.site_labels = tuple(float(i) for i in range(n))
        else:
            labels = tuple(float(x) for x in self.site_labels)
            if len(labels) != n:
                raise PreconditionError(
                    f"need {n} site labels, got {len(labels)}"
                )
            if any(2.0 * x != round(2.0 * x) for x in labels):
                raise PreconditionError(
                    "site labels must be integers or half-integers"
                )
            if any(b <= a for a, b in zip(labels, labels[1:])):
                raise PreconditionError("site labels must be strictly increasing")
            self.site_labels = labels

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclasses.dataclass
class SpectralDecomposition:
    """Ascending eigenvalues and the matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        lam = np.array(self.eigenvalues, dtype=float).reshape(-1)
        V = np.array(self.eigenvectors, dtype=float)
        n = lam.shape[0]
        if V.shape != (n, n):
            raise PreconditionError(
                f"eigenvector matrix shape {V.shape} does not match {n} eigenvalues"
            )
        if n and np.any(np.diff(lam) < 0):
            raise PreconditionError("eigenvalues must be sorted ascending")
        if n:
            ortho = float(np.max(np.abs(V.T @ V - np.eye(n))))
            if ortho > 1e-10:
                raise NumericalFailureError(
                    f"eigenvector columns not orthonormal: residual {ortho:.3e}",
                    residual=ortho,
                )
        lam.flags.writeable = False
        V.flags.writeable = False
        self.eigenvalues = lam
        self.eigenvectors = V

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


@dataclasses.dataclass
class SkewSymmetricMatrix:
    """Real skew-symmetric matrix; the diagonal is zeroed on construction."""

    entries: np.ndarray

    def __post_init__(self):
        A = _square_float_array(self.entries)
        if A.size:
            sym = float(np.max(np.abs(A + A.T)))
            if sym > 1e-12 * _entry_scale(A):
                raise PreconditionError(
                    f"matrix is not skew-symmetric: max |A + A^T| = {sym:.3e}"
                )
        np.fill_diagonal(A, 0.0)
        A.flags.writeable = False
        self.entries = A

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _fix_column_signs(V: np.ndarray) -> np.ndarray:
    """Make each column's largest-magnitude entry positive (golden-test stability)."""
    V = V.copy()
    for j in range(V.shape[1]):
        i = int(np.argmax(np.abs(V[:, j])))
        if V[i, j] < 0:
            V[:, j] = -V[:, j]
    return V


def eig_sym(op: SymmetricOperator | np.ndarray) -> SpectralDecomposition:
    """Full eigendecomposition of a symmetric operator.

    Eigenvalues come back ascending; each eigenvector's largest-magnitude
    entry is positive.  The reconstruction V diag(lam) V^T is validated
    against the input.
    """
    if not isinstance(op, SymmetricOperator):
        op = SymmetricOperator(op)
    A = op.entries
    n = A.shape[0]
    if n == 0:
        return SpectralDecomposition(np.zeros(0), np.zeros((0, 0)))
    try:
        lam, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"symmetric eigensolver failed: {exc}") from exc
    dec = SpectralDecomposition(lam, _fix_column_signs(V))
    resid = float(np.max(np.abs((dec.eigenvectors * lam) @ dec.eigenvectors.T - A)))
    allowed = n * 1e-10 * _entry_scale(A)
    if resid > allowed:
        raise NumericalFailureError(
            f"eigendecomposition reconstruction residual {resid:.3e} exceeds {allowed:.3e}",
            residual=resid,
        )
    return dec


def near_zero_flags(eigenvalues: np.ndarray) -> np.ndarray:
    """Mask of eigenvalues too close to 0 for a strict sign split."""
    lam = np.asarray(eigenvalues, dtype=float)
    scale = 1.0 + (float(np.max(np.abs(lam))) if lam.size else 0.0)
    return np.abs(lam) <= NEAR_ZERO_REL * scale


def _eval_exp(lam: np.ndarray, c: float) -> np.ndarray:
    out = np.exp(c * lam)
    if not np.all(np.isfinite(out)):
        raise NumericalFailureError(
            f"exp({c}*lambda) overflowed for eigenvalue range "
            f"[{lam.min():.3e}, {lam.max():.3e}]"
        )
    return out


def _eval_fermi(lam: np.ndarray, beta: float, shift: float = 0.0) -> np.ndarray:
    # branch-wise form keeps every exponent non-positive (stable to beta*lam ~ 1e4)
    x = lam - shift
    out = np.empty_like(x)
    pos = x >= 0
    e = np.exp(-beta * x[pos])
    out[pos] = e / (1.0 + e)
    out[~pos] = 1.0 / (1.0 + np.exp(beta * x[~pos]))
    return np.clip(out, 0.0, 1.0)


def _eval_indicator_negative(lam: np.ndarray, shift: float = 0.0) -> np.ndarray:
    x = lam - shift
    keep = (x < 0) & ~near_zero_flags(x)
    return keep.astype(float)


_REGISTRY = {
    "exp": (_eval_exp, {"c"}),
    "fermi": (_eval_fermi, {"beta", "shift"}),
    "indicator_negative": (_eval_indicator_negative, {"shift"}),
}


def spectral_function(tag: str, **params):
    """Vectorized evaluator for one of the registered scalar maps.

    Registry: ``exp`` (param c, returns e^{c*lambda}), ``fermi`` (params
    beta and optional shift, returns 1/(1+e^{beta*(lambda-shift)})), and
    ``indicator_negative`` (optional shift, strict test lambda-shift < 0
    with near-zero eigenvalues excluded).
    """
    if tag not in _REGISTRY:
        raise ConfigurationError(
            f"unknown spectral function tag {tag!r}; registered: {sorted(_REGISTRY)}"
        )
    fn, allowed = _REGISTRY[tag]
    extra = set(params) - allowed
    if extra:
        raise ConfigurationError(f"unknown parameters {sorted(extra)} for tag {tag!r}")
    if tag == "exp" and "c" not in params:
        raise ConfigurationError("tag 'exp' requires parameter c")
    if tag == "fermi":
        beta = params.get("beta")
        if beta is None or not np.isfinite(beta) or beta <= 0:
            raise ConfigurationError("tag 'fermi' requires finite beta > 0")
    return lambda lam: fn(np.asarray(lam, dtype=float), **params)


def apply_spectral_function(
    dec: SpectralDecomposition, tag: str, **params
) -> SymmetricOperator:
    """Return V f(diag lam) V^T for a registered scalar map f."""
    f = spectral_function(tag, **params)
    vals = f(dec.eigenvalues)
    V = dec.eigenvectors
    M = (V * vals) @ V.T
    return SymmetricOperator(0.5 * (M + M.T))


def determinant(A: np.ndarray) -> float:
    """Determinant by pivoted LU; the empty matrix gives 1."""
    A = _square_float_array(A, name="determinant input")
    if A.shape[0] == 0:
        return 1.0
    return float(np.linalg.det(A))


def pfaffian(A: SkewSymmetricMatrix | np.ndarray) -> float:
    """Pfaffian by Parlett-Reid skew tridiagonalization with partial pivoting.

    Each elimination step pins the 2x2 corner Pf factor A[k,k+1] and
    replaces the trailing block by its skew Schur complement; row/column
    swaps flip the sign.  Odd dimension is rejected.
    """
    if not isinstance(A, SkewSymmetricMatrix):
        A = SkewSymmetricMatrix(A)
    M = np.array(A.entries, dtype=float)
    n = M.shape[0]
    if n % 2 == 1:
        raise PreconditionError("Pfaffian requires even dimension")
    if n == 0:
        return 1.0
    result = 1.0
    for k in range(0, n - 1, 2):
        col = np.abs(M[k + 1:, k])
        kp = k + 1 + int(np.argmax(col))
        if M[kp, k] == 0.0:
            return 0.0
        if kp != k + 1:
            M[[k + 1, kp], :] = M[[kp, k + 1], :]
            M[:, [k + 1, kp]] = M[:, [kp, k + 1]]
            result = -result
        b = M[k, k + 1]
        result *= b
        if k + 2 < n:
            tau = M[k + 2:, k] / b
            c1 = M[k + 2:, k + 1].copy()
            M[k + 2:, k + 2:] += np.outer(c1, tau) - np.outer(tau, c1)
    return result
