"""Synthetic designs, the dual ridge solver and exact conditional risk terms.

All solves go through the n x n system A = lam I_n + X X^T, which stays
usable for negative lam as long as A is positive definite.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg

from .exceptions import DomainError, NotPositiveDefinite

FAMILIES = ("gaussian", "rademacher", "uniform")
PD_RELATIVE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class RidgeSolution:
    theta_hat: np.ndarray
    dual_weights: np.ndarray
    lam: float
    pd_margin: float


@dataclass(frozen=True)
class RiskDecomposition:
    bias: float
    variance_expected: float
    variance_realized: float = None

    @property
    def mse(self):
        return self.bias + self.variance_expected


@dataclass(frozen=True)
class EigDiagnostics:
    mu_max_Ak: float
    mu_min_Ak: float
    cond_Ak: float
    pd: bool
    k: int


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def isotropic_rows(family, n, p, seed):
    """n x p matrix of i.i.d. mean-zero unit-variance entries."""
    rng = _rng(seed)
    if family == "gaussian":
        return rng.standard_normal((n, p))
    if family == "rademacher":
        return rng.integers(0, 2, size=(n, p), dtype=np.int8).astype(float) * 2.0 - 1.0
    if family == "uniform":
        s = np.sqrt(3.0)
        return rng.uniform(-s, s, size=(n, p))
    raise DomainError(f"unknown design family {family!r}; expected one of {FAMILIES}")


def sample_design(family, spec, n, seed):
    """Design X = Z Sigma^{1/2} with isotropic rows Z drawn from ``family``.

    Deterministic given (family, spec, n, seed); ``seed`` may be an int, a
    ``numpy.random.SeedSequence`` or a ``Generator``.
    """
    if int(n) < 1:
        raise DomainError(f"n must be positive, got {n}")
    z = isotropic_rows(family, int(n), spec.p, seed)
    z *= np.sqrt(spec.eigenvalues)
    return z


def regularized_gram(X, lam):
    a = X @ X.T
    a[np.diag_indices_from(a)] += lam
    return a


def _factor(X, lam, pd_tolerance=None):
    a = regularized_gram(X, lam)
    eig = linalg.eigvalsh(a)
    if pd_tolerance is None:
        pd_tolerance = PD_RELATIVE_TOLERANCE * max(abs(eig[-1]), np.finfo(float).tiny)
    if not eig[0] > pd_tolerance:
        raise NotPositiveDefinite(eig[0], pd_tolerance)
    return linalg.cho_factor(a, lower=True, check_finite=False), float(eig[0])


def ridge_fit_dual(X, y, lam, pd_tolerance=None):
    """theta_hat = X^T (lam I_n + X X^T)^{-1} y via a Cholesky solve.

    Raises NotPositiveDefinite when the smallest eigenvalue of the system is
    not above ``pd_tolerance`` (default 1e-10 times the largest eigenvalue).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    cho, margin = _factor(X, lam, pd_tolerance)
    alpha = linalg.cho_solve(cho, y, check_finite=False)
    return RidgeSolution(theta_hat=X.T @ alpha, dual_weights=alpha, lam=float(lam), pd_margin=margin)


def ridge_fit_primal_oracle(X, y, lam):
    """(lam I_p + X^T X)^{-1} X^T y; testing oracle restricted to lam > 0."""
    if not lam > 0:
        raise DomainError(f"primal oracle needs lam > 0, got {lam}")
    X = np.asarray(X, dtype=float)
    a = X.T @ X
    a[np.diag_indices_from(a)] += lam
    return linalg.solve(a, X.T @ np.asarray(y, dtype=float), assume_a="pos")


def exact_bias(X, spec, sig, lam, pd_tolerance=None):
    """B = ||(I - X^T A^{-1} X) theta*||_Sigma^2."""
    theta = sig.check(spec).theta_star
    cho, _ = _factor(X, lam, pd_tolerance)
    r = theta - X.T @ linalg.cho_solve(cho, X @ theta, check_finite=False)
    return float(spec.eigenvalues @ r**2)


def exact_variance(X, spec, lam, sigma_eps=1.0, pd_tolerance=None):
    """E_eps V = sigma_eps^2 tr(Sigma X^T A^{-2} X) for independent noise of variance sigma_eps^2."""
    cho, _ = _factor(X, lam, pd_tolerance)
    w = linalg.cho_solve(cho, X * np.sqrt(spec.eigenvalues), check_finite=False)
    return float(sigma_eps**2 * np.sum(w * w))


def realized_variance(X, spec, lam, eps, pd_tolerance=None):
    """V = ||X^T A^{-1} eps||_Sigma^2 for one noise draw (or a batch, one per column)."""
    cho, _ = _factor(X, lam, pd_tolerance)
    v = X.T @ linalg.cho_solve(cho, np.asarray(eps, dtype=float), check_finite=False)
    out = spec.eigenvalues @ v**2 if v.ndim == 1 else spec.eigenvalues @ (v * v)
    return out if np.ndim(out) else float(out)


def expected_bias_sign_flip(X, spec, theta_bar, lam, pd_tolerance=None):
    """E B when theta* is theta_bar with independent random sign flips.

    Equals sum_i theta_bar_i^2 M_ii with M = (I - P) Sigma (I - P),
    P = X^T A^{-1} X.
    """
    theta_bar = np.asarray(theta_bar, dtype=float)
    cho, _ = _factor(X, lam, pd_tolerance)
    w = linalg.cho_solve(cho, X, check_finite=False)
    p_diag = np.sum(X * w, axis=0)
    xs = X * np.sqrt(spec.eigenvalues)
    psp_diag = np.sum(w * ((xs @ xs.T) @ w), axis=0)
    lam_i = spec.eigenvalues
    m_diag = lam_i - 2 * lam_i * p_diag + psp_diag
    return float(theta_bar**2 @ m_diag)


def identity_residual(X, y, lam, k, relative=True, pd_tolerance=None):
    """Norm of theta_head + X_head^T A_k^{-1} X_head theta_head - X_head^T A_k^{-1} y.

    theta is the dual-form fit and A_k = lam I + X_tail X_tail^T. The
    expression vanishes identically; the returned value is numerical error,
    divided by ||X_head^T A_k^{-1} y|| when ``relative``.
    """
    X = np.asarray(X, dtype=float)
    if k == 0:
        return 0.0
    theta = ridge_fit_dual(X, y, lam, pd_tolerance).theta_hat
    head, tail = X[:, :k], X[:, k:]
    cho_k, _ = _factor(tail, lam, pd_tolerance)
    rhs = head.T @ linalg.cho_solve(cho_k, y, check_finite=False)
    lhs = theta[:k] + head.T @ linalg.cho_solve(cho_k, head @ theta[:k], check_finite=False)
    res = float(np.linalg.norm(lhs - rhs))
    if relative:
        res /= max(float(np.linalg.norm(rhs)), np.finfo(float).tiny)
    return res


def _diagnostics_from_eigs(eig, k):
    pd = bool(eig[0] > 0)
    cond = float(eig[-1] / eig[0]) if pd else float("nan")
    return EigDiagnostics(mu_max_Ak=float(eig[-1]), mu_min_Ak=float(eig[0]), cond_Ak=cond, pd=pd, k=int(k))


def eig_diagnostics(X, spec, lam, k):
    """Extreme eigenvalues and condition number of A_k = lam I + X_tail X_tail^T."""
    X = np.asarray(X, dtype=float)
    if not 0 <= k <= spec.p:
        raise DomainError(f"k must lie in [0, p], got {k}")
    tail = X[:, k:]
    eig = linalg.eigvalsh(regularized_gram(tail, lam))
    return _diagnostics_from_eigs(eig, k)


def eig_min_loo(X, spec, lam, j):
    """Smallest eigenvalue of A_{-j} = lam I + sum over columns i != j of X_i X_i^T.

    ``j`` is a 0-based column index.
    """
    X = np.asarray(X, dtype=float)
    if not 0 <= j < spec.p:
        raise DomainError(f"column index must lie in [0, p), got {j}")
    a = regularized_gram(X, lam)
    a -= np.outer(X[:, j], X[:, j])
    return float(linalg.eigvalsh(a)[0])


class GramPath:
    """Bias, variance and A_k diagnostics of one design along many lam values.

    One eigendecomposition of X X^T is shared by every lam, so each grid
    point costs O(n^2 + n p). Results agree with ``exact_bias`` and
    ``exact_variance`` up to rounding.
    """

    def __init__(self, X, spec, sig=None):
        self.X = np.asarray(X, dtype=float)
        self.spec = spec
        self.sig = sig.check(spec) if sig is not None else None
        self.d, self.q = linalg.eigh(self.X @ self.X.T)
        xs = self.X * np.sqrt(spec.eigenvalues)
        # diag of Q^T X Sigma X^T Q
        self._gs_diag = np.sum(self.q * ((xs @ xs.T) @ self.q), axis=0)
        self._tail_eigs = {}

    @cached_property
    def _v(self):
        return self.q.T @ (self.X @ self.sig.theta_star)

    def pd_margin(self, lam):
        return float(self.d[0] + lam)

    def tolerance(self, lam):
        return PD_RELATIVE_TOLERANCE * max(abs(self.d[-1] + lam), np.finfo(float).tiny)

    def is_pd(self, lam):
        return self.pd_margin(lam) > self.tolerance(lam)

    def bias(self, lam):
        if self.sig is None:
            raise DomainError("GramPath was built without a signal")
        self._check(lam)
        w = self.q @ (self._v / (self.d + lam))
        r = self.sig.theta_star - self.X.T @ w
        return float(self.spec.eigenvalues @ r**2)

    def variance(self, lam, sigma_eps=1.0):
        self._check(lam)
        return float(sigma_eps**2 * np.sum(self._gs_diag / (self.d + lam) ** 2))

    def diagnostics(self, lam, k):
        if k not in self._tail_eigs:
            tail = self.X[:, k:]
            self._tail_eigs[k] = linalg.eigvalsh(tail @ tail.T)
        return _diagnostics_from_eigs(self._tail_eigs[k] + lam, k)

    def _check(self, lam):
        if not self.is_pd(lam):
            raise NotPositiveDefinite(self.pd_margin(lam), self.tolerance(lam))
