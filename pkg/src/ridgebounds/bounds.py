"""Closed-form generalization bounds for (possibly negatively) regularized ridge regression.

Every unnamed absolute constant is collapsed into one ``calibration_c``
multiplier (default 1), so the values returned here are the constant-free
cores of the bounds. Upper bounds are multiplied by ``calibration_c``,
lower bounds are divided by it.
"""

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import DomainError
from .spectrum import EffectiveRanks, effective_ranks, is_plateau, select_k_star


@dataclass(frozen=True)
class SignalSpec:
    """True parameter in the covariance eigenbasis."""

    theta_star: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta_star, dtype=float).ravel()
        if not np.all(np.isfinite(theta)):
            raise DomainError("theta_star must be finite")
        theta.setflags(write=False)
        object.__setattr__(self, "theta_star", theta)

    @property
    def p(self):
        return self.theta_star.size

    def check(self, spec):
        if self.p != spec.p:
            raise DomainError(f"signal length {self.p} does not match spectrum dimension {spec.p}")
        return self

    def energy(self, spec):
        """||theta*||_Sigma^2."""
        return float(spec.eigenvalues @ self.theta_star**2)

    def tail_energy(self, spec, k):
        """||theta*_{k:inf}||^2 weighted by Sigma_{k:inf}."""
        return float(spec.eigenvalues[k:] @ self.theta_star[k:] ** 2)

    def head_inverse_energy(self, spec, k):
        """||theta*_{0:k}||^2 weighted by Sigma_{0:k}^{-1}."""
        return float(np.sum(self.theta_star[:k] ** 2 / spec.eigenvalues[:k]))


@dataclass(frozen=True)
class EigEnvelope:
    mu_min_pred: float
    mu_max_pred: float
    context: str


class MatchedBounds(NamedTuple):
    B_under: float
    B_over: float
    V_under: float
    V_over: float


class RatioCaps(NamedTuple):
    B_cap: float
    V_cap: float


@dataclass
class RegimeBounds:
    lambda_used: float
    B_upper: float
    V_upper: float
    regime: str
    k: int
    form: str
    hypotheses: dict = field(default_factory=dict)


@dataclass
class BoundReport:
    k: int
    effective: EffectiveRanks
    B_upper: float
    V_upper: float
    B_lower: float
    V_lower: float
    B_ratio_cap: float
    V_ratio_cap: float
    constants: dict
    lam: float = 0.0
    n: int = 0
    matched: Optional[MatchedBounds] = None
    k_mode: str = "fixed"
    lower_form: str = "conditioned"

    CSV_COLUMNS = (
        "k", "lambda", "rho_k", "R_k", "B_upper", "V_upper",
        "B_lower", "V_lower", "B_ratio_cap", "V_ratio_cap",
    )

    def csv_row(self):
        e = self.effective
        return {
            "k": self.k, "lambda": self.lam, "rho_k": e.rho_k, "R_k": e.big_R_k,
            "B_upper": self.B_upper, "V_upper": self.V_upper,
            "B_lower": self.B_lower, "V_lower": self.V_lower,
            "B_ratio_cap": self.B_ratio_cap, "V_ratio_cap": self.V_ratio_cap,
        }

    def to_dict(self):
        """Flat JSON-ready mapping (numbers, strings, None only)."""
        out = self.csv_row()
        out.update(
            n=self.n,
            tail_sum=self.effective.tail_sum,
            tail_sq_sum=self.effective.tail_sq_sum,
            k_mode=self.k_mode,
            lower_form=self.lower_form,
        )
        if self.matched is not None:
            out.update(self.matched._asdict())
        out.update(self.constants)
        return {key: _json_number(v) for key, v in out.items()}


def _json_number(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if np.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def _split(spec, sig, n, lam, k):
    sig.check(spec)
    eff = effective_ranks(spec, lam, n, k)
    return eff, sig.tail_energy(spec, k), sig.head_inverse_energy(spec, k)


def upper_bounds_conditioned(spec, sig, n, lam, k, L=1.0, t=1.0, sigma_eps=1.0, calibration_c=1.0):
    """Upper bounds on (B, V) given that cond(A_k) <= L.

    B <= c L^4 (||theta_tail||^2_Sigma + ||theta_head||^2_{Sigma^-1} ((lam + tail) / n)^2)
    V <= c sigma_eps^2 t L^2 (k / n + n tail_sq / (lam + tail)^2)
    """
    if L < 1:
        raise DomainError(f"condition number bound L must be >= 1, got {L}")
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    eff, tail_e, head_e = _split(spec, sig, n, lam, k)
    shifted = lam + eff.tail_sum
    b_up = calibration_c * L**4 * (tail_e + head_e * (shifted / n) ** 2)
    v_up = calibration_c * sigma_eps**2 * t * L**2 * (k / n + n * eff.tail_sq_sum / shifted**2)
    return float(b_up), float(v_up)


def upper_bounds_general(spec, sig, n, lam, k, mu1_Ainv, mun_Ainv, t=1.0, sigma_eps=1.0, calibration_c=1.0):
    """Upper bounds on (B, V) in terms of the extreme eigenvalues of A_k^{-1}.

    ``mu1_Ainv`` is the largest and ``mun_Ainv`` the smallest eigenvalue of
    A_k^{-1}; valid for any sign of lambda as long as A_k is PD.
    """
    if not mun_Ainv > 0:
        raise DomainError(f"eigenvalues of A_k^-1 must be positive, got smallest {mun_Ainv}")
    if mu1_Ainv < mun_Ainv:
        raise DomainError(f"need mu1_Ainv >= mun_Ainv, got {mu1_Ainv} < {mun_Ainv}")
    sig.check(spec)
    if not 0 <= k <= min(n, spec.p):
        raise DomainError(f"k must lie in [0, min(n, p)], got {k}")
    lam_next = spec.eigenvalues[k] if k < spec.p else 0.0
    tail_sq = spec.tail_sq_sum(k)
    tail_e = sig.tail_energy(spec, k)
    head_e = sig.head_inverse_energy(spec, k)
    kappa2 = (mu1_Ainv / mun_Ainv) ** 2
    b_up = tail_e * (1 + kappa2 + mu1_Ainv**2 * (n**2 * lam_next**2 + n * tail_sq)) + head_e * (
        1 / (n**2 * mun_Ainv**2) + kappa2 * (lam_next**2 + tail_sq / n)
    )
    v_up = sigma_eps**2 * t * (kappa2 * k / n + n * mu1_Ainv**2 * tail_sq)
    return float(calibration_c * b_up), float(calibration_c * v_up)


def lower_bound_variance(spec, n, lam, k, sigma_x=1.0, calibration_c=1.0):
    """Lower bound on E_eps V for unit-variance noise and independent coordinates.

    (1 / (c n)) * sum_i min(1, lambda_i^2 / (sigma_x^4 lambda_{k+1}^2 (rho_k + 2)^2))
    """
    if lam < 0:
        raise DomainError("variance lower bound requires lambda >= 0")
    eff = effective_ranks(spec, lam, n, k)
    lam_next = spec.eigenvalues[k]
    ratio = spec.eigenvalues**2 / (sigma_x**4 * lam_next**2 * (eff.rho_k + 2) ** 2)
    return float(np.minimum(1.0, ratio).sum() / (calibration_c * n))


def lower_bound_bias(spec, theta_bar, lam, n, k, L=1.0):
    """Lower bound on the sign-flip-averaged bias.

    (1/2) sum_i lambda_i theta_bar_i^2 / (1 + lambda_i / (2 L lambda_{k+1} rho_k))^2
    """
    if lam < 0:
        raise DomainError("bias lower bound requires lambda >= 0")
    if L < 1:
        raise DomainError(f"L must be >= 1, got {L}")
    theta_bar = np.asarray(theta_bar, dtype=float)
    if theta_bar.size != spec.p:
        raise DomainError(f"theta_bar length {theta_bar.size} does not match p={spec.p}")
    eff = effective_ranks(spec, lam, n, k)
    scale = 2 * L * spec.eigenvalues[k] * eff.rho_k
    lam_i = spec.eigenvalues
    return float(0.5 * np.sum(lam_i * theta_bar**2 / (1 + lam_i / scale) ** 2))


def matched_bounds(spec, sig, n, lam, k):
    """The constant-free upper/lower pairs whose ratios are capped by ``ratio_caps``."""
    eff, tail_e, head_e = _split(spec, sig, n, lam, k)
    lam_i = spec.eigenvalues
    lam_next = lam_i[k]
    rho = eff.rho_k
    shifted = lam + eff.tail_sum
    theta2 = sig.theta_star**2
    b_under = np.sum(lam_i * theta2 / (1 + lam_i / (lam_next * rho)) ** 2)
    b_over = tail_e + head_e * (shifted / n) ** 2
    v_under = np.minimum(1.0, lam_i**2 / (lam_next**2 * (rho + 2) ** 2)).sum() / n
    v_over = k / n + n * eff.tail_sq_sum / shifted**2
    return MatchedBounds(float(b_under), float(b_over), float(v_under), float(v_over))


def _caps(a, b):
    return RatioCaps(max((1 + b) ** 2, (1 + 1 / a) ** 2), max((2 + b) ** 2, (1 + 2 / a) ** 2))


def ratio_caps(rho_k, mode="interval", a=None, b=None, n=None):
    """Caps on B_over/B_under and V_over/V_under.

    ``mode="interval"`` needs ``0 < a < rho_k < b``; ``mode="kstar"`` needs
    ``rho_k > b`` and, when ``n`` is given, ``b > 1/n``.
    """
    if mode == "interval":
        if a is None or b is None or not (0 < a < rho_k < b):
            raise DomainError(f"interval caps need 0 < a < rho_k < b, got a={a}, rho_k={rho_k}, b={b}")
        return _caps(a, b)
    if mode == "kstar":
        if b is None or not (b > 0 and rho_k > b):
            raise DomainError(f"k* caps need rho_k > b > 0, got rho_k={rho_k}, b={b}")
        if n is not None and not b > 1 / n:
            raise DomainError(f"k* caps need b > 1/n, got b={b}, n={n}")
        return _caps(b, b)
    raise DomainError(f"unknown ratio-cap mode {mode!r}")


def componentwise_bounds(spec, sig, n, lam, k):
    """Per-component bias and variance weights of the mixture form.

    B_i = lambda_i theta_i^2 s^2 / (s^2 + lambda_i^2), V_i = lambda_i^2 / (n (s^2 + lambda_i^2))
    with s = rho_k lambda_{k+1} = (lam + tail) / n.
    """
    eff, _, _ = _split(spec, sig, n, lam, k)
    s2 = (eff.rho_k * spec.eigenvalues[k]) ** 2
    lam_i = spec.eigenvalues
    denom = s2 + lam_i**2
    return lam_i * sig.theta_star**2 * s2 / denom, lam_i**2 / (n * denom)


def eigenvalue_envelope_Ak(spec, lam, k, n, t=1.0, sigma_x=1.0, small_ball_L=None, calibration_c=1.0):
    """Predicted range for the spectrum of A_k = lam I + X_tail X_tail^T.

    Upper edge: lam + c sigma_x^2 (lambda_{k+1} (t + n) + tail_sum).
    Lower edge: lam + tail_sum / L - c sigma_x^2 sqrt((t + n)(lambda_{k+1}^2 (t + n) + tail_sq))
    under a small-ball constant L, otherwise just lam.
    """
    if not t >= 0:
        raise DomainError(f"t must be non-negative, got {t}")
    if not 0 <= k <= spec.p:
        raise DomainError(f"k must lie in [0, p], got {k}")
    lam_next = spec.eigenvalues[k] if k < spec.p else 0.0
    tail = spec.tail_sum(k)
    tail_sq = spec.tail_sq_sum(k)
    c2 = calibration_c * sigma_x**2
    mu_max = lam + c2 * (lam_next * (t + n) + tail)
    if small_ball_L is None:
        mu_min = lam
    else:
        if not small_ball_L > 0:
            raise DomainError(f"small-ball L must be positive, got {small_ball_L}")
        mu_min = lam + tail / small_ball_L - c2 * np.sqrt((t + n) * (lam_next**2 * (t + n) + tail_sq))
    mu_min = min(mu_min, mu_max)
    return EigEnvelope(float(mu_min), float(mu_max), "A_k envelope")


def envelope_A0_from_Ak(spec, lam, n, t, sigma_x, L, K, calibration_c=1.0):
    """Two-sided envelope on the spectrum of A_0 when lam + sum lambda_i >= K n lambda_1.

    lower = (1 - t sigma_x^2 / n)(K - 1) / (L K) * S,  upper = c sigma_x^2 (K + 2) / K * S,
    S = lam + sum_i lambda_i.
    """
    if not K > 1:
        raise DomainError(f"K must exceed 1, got {K}")
    if not 0 <= t < n:
        raise DomainError(f"t must lie in [0, n), got {t}")
    total = lam + spec.tail_sum(0)
    if total < K * n * spec.eigenvalues[0]:
        raise DomainError(
            f"condition lam + sum lambda_i >= K n lambda_1 violated: {total:.6g} < {K * n * spec.eigenvalues[0]:.6g}"
        )
    lower = (1 - t * sigma_x**2 / n) * (K - 1) / (L * K) * total
    upper = calibration_c * sigma_x**2 * (K + 2) / K * total
    return EigEnvelope(float(lower), float(upper), "A_0 envelope")


def negative_lambda(spec, n, k, xi):
    """Regularization of the negative-lambda regime and the form used.

    Plateau (spiked) spectra: lam = -lambda_{k+1} (p - k) + xi lambda_{k+1} sqrt(n p).
    Otherwise: lam = -tail_sum + xi (n lambda_1 + sqrt(n tail_sq)).
    """
    tail = spec.tail_sum(k)
    if is_plateau(spec):
        lam_next = spec.eigenvalues[k]
        return float(-tail + xi * lam_next * np.sqrt(n * spec.p)), "plateau"
    return float(-tail + xi * (n * spec.eigenvalues[0] + np.sqrt(n * spec.tail_sq_sum(k)))), "general"


def regime_bounds(spec, sig, n, regime, t=1.0, sigma_eps=1.0, sigma_x=1.0, calibration_c=1.0):
    """Bounds for the three regularization regimes.

    ``regime`` is a mapping with ``name`` in {"large_lambda", "zero_lambda",
    "negative_lambda"}, a split index ``k``, plus ``lambda`` (zero_lambda,
    default 0) or ``xi`` (negative_lambda). Regime hypotheses are evaluated
    with constant ``calibration_c`` and reported, never enforced.
    """
    sig.check(spec)
    name = regime["name"]
    k = int(regime["k"])
    if not 0 <= k < min(n, spec.p):
        raise DomainError(f"k must lie in [0, min(n, p)), got {k}")
    c = calibration_c
    lam_i = spec.eigenvalues
    lam_next = lam_i[k]
    tail = spec.tail_sum(k)
    tail_sq = spec.tail_sq_sum(k)
    tail_e = sig.tail_energy(spec, k)
    head_e = sig.head_inverse_energy(spec, k)
    noise = c * sigma_eps**2 * t
    hyp = {"k_below_n_over_c": k < n / c}

    if name == "large_lambda":
        lam = n * lam_next
        # the last spike level; with an empty head fall back to lambda_1
        lam_k = lam_i[k - 1] if k > 0 else lam_i[0]
        b_up = c * (tail_e + lam_k**2 * head_e)
        v_up = noise * (k / n + tail_sq / (n * lam_k**2))
        hyp["n_lambda_next_dominates_tail"] = c * n * lam_next >= tail
        return RegimeBounds(float(lam), float(b_up), float(v_up), name, k, "closed_form", hyp)

    hyp["tail_dominates_n_lambda_next"] = tail >= c * n * lam_next
    if name == "zero_lambda":
        lam = float(regime.get("lambda", 0.0))
        hyp["lambda_in_range"] = 0 <= lam < tail
        b_up = c * (tail_e + head_e * (tail / n) ** 2)
        v_up = noise * (k / n + n * tail_sq / tail**2)
        return RegimeBounds(lam, float(b_up), float(v_up), name, k, "closed_form", hyp)

    if name == "negative_lambda":
        xi = float(regime["xi"])
        lam, form = negative_lambda(spec, n, k, xi)
        if not lam + tail > 0:
            raise DomainError(f"xi={xi} gives lambda + tail_sum = {lam + tail:.6g} <= 0")
        hyp["xi_above_c"] = xi > c
        if form == "plateau":
            p = spec.p
            theta = sig.theta_star
            b_up = c * (float(theta[k:] @ theta[k:]) * lam_next
                        + float(theta[:k] @ theta[:k]) * xi**2 * lam_next**2 * p / (lam_i[0] * n))
            v_up = noise * (k / n + 1 / xi**2)
            hyp["p_above_c_n"] = p > c * n
        else:
            scale = n * lam_next**2 + tail_sq
            b_up = c * (tail_e + head_e * xi**2 / n * scale)
            v_up = noise * (k / n + tail_sq / (xi**2 * scale))
        return RegimeBounds(lam, float(b_up), float(v_up), name, k, form, hyp)

    raise DomainError(f"unknown regime {name!r}")


def bound_report(spec, sig, n, lam, k=None, b=None, L=1.0, t=1.0, sigma_x=1.0, sigma_eps=1.0,
                 calibration_c=1.0, lower_form="conditioned"):
    """Assemble every bound at one (lam, k) point.

    Pass ``k`` for a fixed split, or ``b`` to use k = min{l : rho_l > b}.
    ``lower_form="conditioned"`` reports the standalone lower bounds (variance scaled by
    sigma_eps^2); ``lower_form="matched"`` reports the matched pair so that
    B_upper >= B_lower and V_upper >= V_lower hold whenever L = t = c = 1.
    Standalone lower bounds are NaN for lam < 0, where they do not apply.
    """
    if (k is None) == (b is None):
        raise DomainError("pass exactly one of k or b")
    k_mode = "fixed"
    if k is None:
        k = select_k_star(spec, lam, n, b)
        if k is None:
            raise DomainError(f"no k in [0, min(n, p)) has rho_k > {b}")
        k_mode = "kstar"
    sig.check(spec)
    eff = effective_ranks(spec, lam, n, k)
    matched = matched_bounds(spec, sig, n, lam, k)
    b_up, v_up = upper_bounds_conditioned(spec, sig, n, lam, k, L=L, t=t, sigma_eps=sigma_eps,
                                          calibration_c=calibration_c)
    if lower_form == "matched":
        b_low = matched.B_under / calibration_c
        v_low = sigma_eps**2 * matched.V_under / calibration_c
    elif lower_form == "conditioned":
        if lam >= 0:
            b_low = lower_bound_bias(spec, np.abs(sig.theta_star), lam, n, k, L=L)
            v_low = sigma_eps**2 * lower_bound_variance(spec, n, lam, k, sigma_x, calibration_c)
        else:
            b_low = v_low = float("nan")
    else:
        raise DomainError(f"unknown lower_form {lower_form!r}")

    if k_mode == "kstar":
        caps = ratio_caps(eff.rho_k, "kstar", b=b, n=n)
    else:
        # infimum over admissible intervals a < rho_k < b
        caps = _caps(eff.rho_k, eff.rho_k)
    constants = {"L": float(L), "t": float(t), "sigma_x": float(sigma_x), "sigma_eps": float(sigma_eps),
                 "calibration_c": float(calibration_c)}
    return BoundReport(k=k, effective=eff, B_upper=b_up, V_upper=v_up, B_lower=b_low, V_lower=v_low,
                       B_ratio_cap=caps.B_cap, V_ratio_cap=caps.V_cap, constants=constants, lam=float(lam),
                       n=int(n), matched=matched, k_mode=k_mode, lower_form=lower_form)

