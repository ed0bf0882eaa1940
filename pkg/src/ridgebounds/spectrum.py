"""Covariance spectra, effective ranks and selection of the split index.

Eigenvalues are stored 0-based in arrays, but the formulas below use the
usual 1-based convention: for a split index ``k`` the "head" is
``lambda_1 .. lambda_k`` (array slice ``[:k]``) and the "tail" starts at
``lambda_{k+1}`` (array element ``[k]``).
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError, DomainError

DEFAULT_B = 2.0


@dataclass(frozen=True)
class Spectrum:
    """Non-increasing positive eigenvalues of a diagonal covariance."""

    eigenvalues: np.ndarray
    model_tag: dict = field(default_factory=lambda: {"model": "explicit"})

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float).ravel()
        if lam.size == 0:
            raise DomainError("spectrum must contain at least one eigenvalue")
        bad = np.flatnonzero(~np.isfinite(lam) | (lam <= 0))
        if bad.size:
            i = int(bad[0])
            raise DomainError(f"eigenvalue at index {i} is not a positive finite number: {lam[i]!r}")
        rising = np.flatnonzero(np.diff(lam) > 0)
        if rising.size:
            i = int(rising[0]) + 1
            raise DomainError(
                f"eigenvalues must be non-increasing; index {i} ({lam[i]!r}) "
                f"exceeds index {i - 1} ({lam[i - 1]!r})"
            )
        lam.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)

    @property
    def p(self):
        return self.eigenvalues.size

    def head(self, k):
        return self.eigenvalues[:k]

    def tail(self, k):
        return self.eigenvalues[k:]

    def tail_sum(self, k):
        return float(self.eigenvalues[k:].sum())

    def tail_sq_sum(self, k):
        t = self.eigenvalues[k:]
        return float(t @ t)

    def scaled(self, c):
        return Spectrum(self.eigenvalues * c, dict(self.model_tag, scaled_by=float(c)))

    def to_config(self):
        tag = dict(self.model_tag)
        if tag.get("model") == "explicit":
            return {"model": "explicit", "values": [float(v) for v in self.eigenvalues]}
        tag["p"] = self.p
        return tag


@dataclass(frozen=True)
class EffectiveRanks:
    k: int
    rho_k: float
    big_R_k: float
    tail_sum: float
    tail_sq_sum: float


def build_spectrum(model, p=None):
    """Build a spectrum from a model descriptor.

    ``model`` is either a config mapping (``{"model": "exponential", "gamma": 1,
    "p": 3}``, ``{"model": "spiked", ...}``, ``{"model": "explicit", "values":
    [...]}``) or a bare model name with the parameters passed in a mapping.
    An explicit ``p`` argument overrides ``model["p"]``.
    """
    if not isinstance(model, dict):
        raise ConfigError(f"spectrum model must be a mapping, got {type(model).__name__}")
    kind = model.get("model")
    if kind == "explicit":
        if "values" not in model:
            raise ConfigError("explicit spectrum requires 'values'")
        return Spectrum(np.asarray(model["values"], dtype=float), {"model": "explicit"})

    p = model.get("p") if p is None else p
    if p is None:
        raise ConfigError(f"{kind!r} spectrum requires 'p'")
    p = _positive_int(p, "p")

    if kind == "exponential":
        gamma = float(_require(model, "gamma"))
        if not gamma > 0:
            raise DomainError(f"gamma must be positive, got {gamma}")
        lam = np.exp(-gamma * np.arange(1, p + 1))
        if lam[-1] <= 0:
            raise DomainError(f"exp(-gamma * p) underflows for gamma={gamma}, p={p}; truncate earlier")
        return Spectrum(lam, {"model": "exponential", "gamma": gamma})

    if kind == "spiked":
        k_spikes = int(_require(model, "k_spikes"))
        top = float(_require(model, "lambda_top"))
        tail = float(_require(model, "lambda_tail"))
        if not 0 <= k_spikes < p:
            raise DomainError(f"k_spikes must lie in [0, p), got {k_spikes} with p={p}")
        if not (tail > 0 and top >= tail):
            raise DomainError(f"need lambda_top >= lambda_tail > 0, got {top}, {tail}")
        lam = np.full(p, tail)
        lam[:k_spikes] = top
        return Spectrum(lam, {"model": "spiked", "k_spikes": k_spikes, "lambda_top": top, "lambda_tail": tail})

    raise ConfigError(f"unknown spectrum model {kind!r}")


def is_plateau(spec):
    """True for spectra with at most two distinct levels (spikes + flat tail)."""
    return spec.model_tag.get("model") == "spiked" or np.unique(spec.eigenvalues).size <= 2


def effective_ranks(spec, lam, n, k):
    """rho_k = (lam + tail) / (n lambda_{k+1}) and R_k = (lam + tail)^2 / tail_sq."""
    n = _positive_int(n, "n")
    k = int(k)
    if not 0 <= k < min(n, spec.p):
        raise DomainError(f"k must lie in [0, min(n, p)) = [0, {min(n, spec.p)}), got {k}")
    tail_sum = spec.tail_sum(k)
    tail_sq = spec.tail_sq_sum(k)
    shifted = lam + tail_sum
    if not shifted > 0:
        raise DomainError(
            f"effective rank undefined: lambda + sum_(i>k) lambda_i = {shifted:.6g} <= 0 (k={k})"
        )
    rho = shifted / (n * spec.eigenvalues[k])
    big_r = shifted**2 / tail_sq if tail_sq > 0 else np.inf
    return EffectiveRanks(k=k, rho_k=float(rho), big_R_k=float(big_r), tail_sum=tail_sum, tail_sq_sum=tail_sq)


def rho_profile(spec, lam, n):
    """rho_l for l = 0 .. min(n, p) - 1, NaN where lam + tail <= 0."""
    m = min(int(n), spec.p)
    lam_i = spec.eigenvalues
    # tails[l] = sum_{i > l} lambda_i (1-based), i.e. lam_i[l:].sum()
    tails = np.cumsum(lam_i[::-1])[::-1][:m]
    shifted = lam + tails
    rho = np.full(m, np.nan)
    ok = shifted > 0
    rho[ok] = shifted[ok] / (n * lam_i[:m][ok])
    return rho


def select_k_star(spec, lam, n, b=DEFAULT_B):
    """Smallest l in [0, min(n, p) - 1] with rho_l > b, or None."""
    if not b > 0:
        raise DomainError(f"threshold b must be positive, got {b}")
    _positive_int(n, "n")
    rho = rho_profile(spec, lam, n)
    hits = np.flatnonzero(np.nan_to_num(rho, nan=-np.inf) > b)
    return int(hits[0]) if hits.size else None


def _require(model, key):
    if key not in model:
        raise ConfigError(f"{model.get('model')!r} spectrum requires {key!r}")
    return model[key]


def _positive_int(v, name):
    if isinstance(v, bool) or int(v) != v or int(v) < 1:
        raise DomainError(f"{name} must be a positive integer, got {v!r}")
    return int(v)
