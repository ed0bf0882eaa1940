"""Seeded Monte Carlo sweeps over lambda, regime presets and concentration audits.

Every random stream is derived from ``(base_seed, replicate, purpose)``
through ``numpy.random.SeedSequence``, so a sweep is a pure function of its
config no matter how replicates are scheduled across threads.
"""

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import linalg

from . import bounds
from .bounds import SignalSpec
from . import estimator
from .estimator import FAMILIES, GramPath, isotropic_rows, sample_design
from .exceptions import ConfigError, DomainError
from .spectrum import DEFAULT_B, build_spectrum, select_k_star

PURPOSE = {"design": 0, "noise": 1, "audit": 2}
SWEEP_COLUMNS = (
    "lambda", "replicate", "bias", "variance_expected", "mse",
    "pd_margin", "cond_Ak", "mu_max_Ak", "mu_min_Ak",
)
QUANTILES = (0.5, 0.9, 0.99)


def derive_seed(base_seed, replicate, purpose):
    """Independent stream for one (replicate, purpose) pair."""
    return np.random.SeedSequence(int(base_seed), spawn_key=(int(replicate), PURPOSE[purpose]))


@dataclass
class ExperimentConfig:
    spectrum: dict
    n: int
    lambda_grid: list
    design: str = "gaussian"
    signal: dict = field(default_factory=lambda: {"kind": "spikes"})
    sigma_eps: float = 1.0
    replicates: int = 100
    base_seed: int = 0
    k_policy: dict = field(default_factory=lambda: {"kind": "kstar", "b": 2.0})
    bound_constants: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not isinstance(self.spectrum, dict):
            raise ConfigError("'spectrum' must be a mapping")
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ConfigError(f"'n' must be a positive integer, got {self.n!r}")
        self.n = int(self.n)
        try:
            self.lambda_grid = [float(v) for v in self.lambda_grid]
        except (TypeError, ValueError) as err:
            raise ConfigError(f"'lambda_grid' must be a list of numbers: {err}") from None
        if not self.lambda_grid:
            raise ConfigError("'lambda_grid' must be non-empty")
        if self.design not in FAMILIES:
            raise ConfigError(f"'design' must be one of {FAMILIES}, got {self.design!r}")
        if int(self.replicates) < 1:
            raise ConfigError(f"'replicates' must be >= 1, got {self.replicates}")
        self.replicates = int(self.replicates)
        if not 0 <= int(self.base_seed) < 2**64:
            raise ConfigError("'base_seed' must be an unsigned 64-bit integer")
        self.base_seed = int(self.base_seed)
        if not float(self.sigma_eps) >= 0:
            raise ConfigError(f"'sigma_eps' must be non-negative, got {self.sigma_eps}")
        self.sigma_eps = float(self.sigma_eps)
        kind = self.k_policy.get("kind")
        if kind == "fixed":
            if int(self.k_policy.get("k", -1)) < 0:
                raise ConfigError("fixed k_policy needs a non-negative 'k'")
        elif kind == "kstar":
            if not float(self.k_policy.get("b", DEFAULT_B)) > 0:
                raise ConfigError("kstar k_policy needs b > 0")
        else:
            raise ConfigError(f"k_policy kind must be 'fixed' or 'kstar', got {kind!r}")
        unknown = set(self.bound_constants) - {"t", "sigma_x", "calibration_c", "L"}
        if unknown:
            raise ConfigError(f"unknown bound_constants keys: {sorted(unknown)}")

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a JSON object")
        names = set(cls.__dataclass_fields__)
        unknown = set(doc) - names
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        missing = {"spectrum", "n", "lambda_grid"} - set(doc)
        if missing:
            raise ConfigError(f"missing config fields: {sorted(missing)}")
        return cls(**doc)

    def to_dict(self):
        return asdict(self)

    def build_spectrum(self):
        return build_spectrum(self.spectrum)

    def build_signal(self, spec):
        return build_signal(self.signal, spec)

    def k_for(self, spec, lam):
        """Split index for one lambda, or None when k* does not exist."""
        if self.k_policy["kind"] == "fixed":
            return int(self.k_policy["k"])
        return select_k_star(spec, lam, self.n, float(self.k_policy.get("b", DEFAULT_B)))


def build_signal(desc, spec):
    """theta* from a descriptor, scaled so that ||theta*||_Sigma^2 = ``energy`` (default 1).

    Kinds: ``explicit`` (``values``, used as given), ``spikes`` (equal
    coordinates on the first ``count`` entries, default the spectrum's
    spike count), ``aligned_decay`` (theta_i proportional to sqrt(lambda_i)),
    ``zero``.
    """
    kind = desc.get("kind")
    lam = spec.eigenvalues
    if kind == "explicit":
        return SignalSpec(np.asarray(desc["values"], dtype=float)).check(spec)
    if kind == "zero":
        return SignalSpec(np.zeros(spec.p))
    energy = float(desc.get("energy", 1.0))
    if kind == "spikes":
        count = int(desc.get("count", spec.model_tag.get("k_spikes", 1)))
        if not 1 <= count <= spec.p:
            raise ConfigError(f"spike signal needs 1 <= count <= p, got {count}")
        theta = np.zeros(spec.p)
        theta[:count] = 1.0
    elif kind == "aligned_decay":
        theta = np.sqrt(lam)
    else:
        raise ConfigError(f"unknown signal kind {kind!r}")
    theta *= math.sqrt(energy / float(lam @ theta**2))
    return SignalSpec(theta)


@dataclass
class ReplicateResult:
    replicate: int
    rows: list


def run_replicate(config, replicate_index, spec=None, sig=None):
    """Evaluate every lambda of the grid on one sampled design.

    Lambdas at which lam I + X X^T is not positive definite give a row with
    ``pd=False`` and NaN risk entries.
    """
    spec = config.build_spectrum() if spec is None else spec
    sig = config.build_signal(spec) if sig is None else sig
    X = sample_design(config.design, spec, config.n, derive_seed(config.base_seed, replicate_index, "design"))
    path = GramPath(X, spec, sig)
    rows = []
    for lam in config.lambda_grid:
        k = config.k_for(spec, lam)
        diag = path.diagnostics(lam, 0 if k is None else min(k, spec.p))
        row = {
            "lambda": lam, "replicate": int(replicate_index),
            "pd_margin": path.pd_margin(lam), "cond_Ak": diag.cond_Ak,
            "mu_max_Ak": diag.mu_max_Ak, "mu_min_Ak": diag.mu_min_Ak, "k": k,
        }
        if path.is_pd(lam):
            b = path.bias(lam)
            v = path.variance(lam, config.sigma_eps)
            row.update(bias=b, variance_expected=v, mse=b + v, pd=True)
        else:
            row.update(bias=math.nan, variance_expected=math.nan, mse=math.nan, pd=False)
        rows.append(row)
    return ReplicateResult(int(replicate_index), rows)


@dataclass
class SweepResult:
    config: ExperimentConfig
    rows: list
    per_lambda: list
    lambda_opt: float
    bound_overlay: list

    def to_csv(self, fh=None):
        """Write the per-(lambda, replicate) table; returns the text when ``fh`` is None."""
        out = io.StringIO() if fh is None else fh
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in self.rows:
            writer.writerow([format_number(row[c]) for c in SWEEP_COLUMNS])
        return out.getvalue() if fh is None else None

    def summary(self):
        return {
            "lambda_grid": list(self.config.lambda_grid),
            "per_lambda": [json_ready(a) for a in self.per_lambda],
            "lambda_opt": self.lambda_opt,
            "bound_overlay": [None if r is None else r.to_dict() for r in self.bound_overlay],
        }

    def aggregate(self, lam):
        for agg in self.per_lambda:
            if agg["lambda"] == lam:
                return agg
        raise KeyError(lam)


def format_number(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    # repr gives the shortest string that round-trips
    return repr(float(v))


def json_ready(obj):
    if isinstance(obj, dict):
        return {k: json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_ready(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if np.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _aggregate(lam, rows, replicates):
    ok = [r for r in rows if r["pd"]]
    agg = {"lambda": lam, "n_valid": len(ok), "n_flagged": len(rows) - len(ok), "available": bool(ok)}
    if not ok:
        return agg
    mse = np.array([r["mse"] for r in ok])
    bias = np.array([r["bias"] for r in ok])
    var = np.array([r["variance_expected"] for r in ok])
    cond = np.array([r["cond_Ak"] for r in ok])
    se = float(mse.std(ddof=1) / math.sqrt(mse.size)) if mse.size > 1 else 0.0
    agg.update(
        mean=float(mse.mean()), median=float(np.median(mse)),
        q10=float(np.quantile(mse, 0.1)), q90=float(np.quantile(mse, 0.9)), se=se,
        bias_mean=float(bias.mean()), variance_mean=float(var.mean()),
        cond_Ak_median=float(np.nanmedian(cond)) if np.any(np.isfinite(cond)) else math.nan,
        complete=len(ok) == replicates,
    )
    return agg


def run_sweep(config, threads=1):
    """Run all replicates and reduce them in replicate order.

    ``lambda_opt`` is the grid argmin of mean MSE over lambdas where every
    replicate was positive definite.
    """
    spec = config.build_spectrum()
    sig = config.build_signal(spec)
    indices = range(config.replicates)
    if threads > 1 and config.replicates > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            results = list(pool.map(lambda i: run_replicate(config, i, spec, sig), indices))
    else:
        results = [run_replicate(config, i, spec, sig) for i in indices]
    results.sort(key=lambda r: r.replicate)

    rows, per_lambda, overlay = [], [], []
    for j, lam in enumerate(config.lambda_grid):
        lam_rows = [res.rows[j] for res in results]
        rows.extend(lam_rows)
        agg = _aggregate(lam, lam_rows, config.replicates)
        per_lambda.append(agg)
        overlay.append(_overlay(config, spec, sig, lam, agg))

    complete = [a for a in per_lambda if a.get("complete")]
    lambda_opt = min(complete, key=lambda a: a["mean"])["lambda"] if complete else None
    return SweepResult(config, rows, per_lambda, lambda_opt, overlay)


def _overlay(config, spec, sig, lam, agg):
    """Bound report at one lambda; L is the median measured cond(A_k)."""
    k = config.k_for(spec, lam)
    if k is None:
        return None
    L = agg.get("cond_Ak_median", math.nan) if agg["available"] else math.nan
    L = float(L) if np.isfinite(L) and L >= 1 else 1.0
    c = config.bound_constants
    if config.k_policy["kind"] == "kstar":
        split = {"b": float(config.k_policy.get("b", DEFAULT_B))}
    else:
        split = {"k": k}
    try:
        return bounds.bound_report(
            spec, sig, config.n, lam, **split, L=L, t=c.get("t", 1.0), sigma_x=c.get("sigma_x", 1.0),
            sigma_eps=config.sigma_eps, calibration_c=c.get("calibration_c", 1.0),
        )
    except DomainError:
        return None


def mse_gap(sweep, lam_a, lam_b):
    """(mean_a - mean_b) / sqrt(se_a^2 + se_b^2) between two grid points."""
    a, b = sweep.aggregate(lam_a), sweep.aggregate(lam_b)
    combined = math.hypot(a["se"], b["se"])
    diff = a["mean"] - b["mean"]
    return diff / combined if combined > 0 else math.copysign(math.inf, diff) if diff else 0.0


def _ratio(num, den):
    if num is None or den is None or not (np.isfinite(num) and np.isfinite(den)):
        return None
    if den == 0:
        return 1.0 if num == 0 else math.inf
    return float(num / den)


def compare_bounds(sweep):
    """Empirical means against the overlay bounds, one entry per lambda."""
    table = []
    for agg, rep in zip(sweep.per_lambda, sweep.bound_overlay):
        entry = {"lambda": agg["lambda"]}
        if rep is None or not agg["available"]:
            entry.update(B_over_upper=None, V_over_upper=None, lower_over_B=None, lower_over_V=None)
        else:
            b, v = agg["bias_mean"], agg["variance_mean"]
            entry.update(
                B_over_upper=_ratio(b, rep.B_upper), V_over_upper=_ratio(v, rep.V_upper),
                lower_over_B=_ratio(rep.B_lower, b), lower_over_V=_ratio(rep.V_lower, v),
            )
        table.append(entry)
    return table


# --- presets ---------------------------------------------------------------

def exponential_truncation(gamma, rel=1e-16):
    """Largest p with exp(-gamma p) >= rel * exp(-gamma)."""
    return int(math.floor(1 + math.log(1 / rel) / gamma))


def preset_exponential_decay(gamma, n, replicates=20, sigma_eps=1.0, base_seed=0,
                                  design="gaussian", signal=None, decades=4, points=9):
    """lambda_i = exp(-gamma i) with k = round(n^(2/3)) and lambda centered on n exp(-gamma (k + 1))."""
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    p = exponential_truncation(gamma)
    k = int(round(n ** (2 / 3)))
    k = min(k, p - 1, n - 1)
    center = n * math.exp(-gamma * (k + 1))
    grid = [center * 10.0**e for e in np.linspace(-decades / 2, decades / 2, points)]
    return ExperimentConfig(
        spectrum={"model": "exponential", "gamma": float(gamma), "p": p}, n=int(n), lambda_grid=grid,
        design=design, signal=signal or {"kind": "aligned_decay"}, sigma_eps=sigma_eps,
        replicates=replicates, base_seed=base_seed, k_policy={"kind": "fixed", "k": k},
    )


def spiked_xi_grid(k_spikes, p, n, calibration_c=1.0, points=16, xi_min=1.0, xi_max=20.0):
    """xi values for the negative-lambda family, including xi^2 = c n / k and xi^2 = p / n."""
    xs = set(np.geomspace(xi_min, xi_max, points).tolist())
    if k_spikes > 0:
        xs.add(math.sqrt(calibration_c * n / k_spikes))
    xs.add(math.sqrt(p / n))
    return sorted(xs)


def preset_spiked(k_spikes, p, lambda_top, lambda_tail, n, snr, replicates=100, base_seed=0,
                             design="gaussian", xi_grid=None, positive_grid=(0.1, 1.0)):
    """Spiked plateau with theta* on the spikes and ||theta*||_Sigma^2 / sigma_eps^2 = snr.

    The grid holds 0, a few positive values (fractions of the tail mass) and
    lambda(xi) = -lambda_tail (p - k) + xi lambda_tail sqrt(n p).
    """
    if not (0 <= k_spikes < n < p):
        raise DomainError(f"need k_spikes < n < p, got {k_spikes}, {n}, {p}")
    if not snr > 0:
        raise DomainError(f"snr must be positive, got {snr}")
    spectrum = {"model": "spiked", "k_spikes": int(k_spikes), "lambda_top": float(lambda_top),
                "lambda_tail": float(lambda_tail), "p": int(p)}
    spec = build_spectrum(spectrum)
    tail = spec.tail_sum(k_spikes)
    xis = spiked_xi_grid(k_spikes, p, n) if xi_grid is None else xi_grid
    grid = {0.0}
    grid.update(f * tail for f in positive_grid)
    grid.update(bounds.negative_lambda(spec, n, k_spikes, xi)[0] for xi in xis)
    signal = {"kind": "spikes", "count": max(int(k_spikes), 1), "energy": 1.0}
    return ExperimentConfig(
        spectrum=spectrum, n=int(n), lambda_grid=sorted(grid), design=design, signal=signal,
        sigma_eps=math.sqrt(1.0 / snr), replicates=replicates, base_seed=base_seed,
        k_policy={"kind": "fixed", "k": int(k_spikes)},
    )


def preset_plateau(n, p_over_n=50, lambda_grid=(0.0,), replicates=100, sigma_eps=1.0, base_seed=0,
                   design="gaussian"):
    """Flat spectrum of height 1 with p = p_over_n * n and a flat unit-energy signal."""
    p = int(round(p_over_n * n))
    return ExperimentConfig(
        spectrum={"model": "spiked", "k_spikes": 0, "lambda_top": 1.0, "lambda_tail": 1.0, "p": p},
        n=int(n), lambda_grid=list(lambda_grid), design=design, signal={"kind": "aligned_decay"},
        sigma_eps=sigma_eps, replicates=replicates, base_seed=base_seed, k_policy={"kind": "kstar", "b": 2.0},
    )


# --- concentration audit ---------------------------------------------------

@dataclass
class AuditReport:
    n: int
    k: int
    lam: float
    samples: int
    seed: int
    family: str
    statistics: dict
    raw: dict = field(repr=False, default_factory=dict)

    def to_dict(self):
        return json_ready({"n": self.n, "k": self.k, "lambda": self.lam, "samples": self.samples,
                       "seed": self.seed, "family": self.family, "statistics": self.statistics})


def _summarize(lhs, scale):
    lhs = np.asarray(lhs, dtype=float)
    ratio = lhs / scale
    return {
        "scale": scale if np.ndim(scale) == 0 else None,
        "mean": float(lhs.mean()),
        "se": float(lhs.std(ddof=1) / math.sqrt(lhs.size)),
        "constant_quantiles": {str(q): float(np.quantile(ratio, q)) for q in QUANTILES},
    }


def concentration_audit(spec, family, n, k, lam, samples, seed, t=0.0, quad_form="gram",
                        noise="gaussian", small_ball_L=None, calibration_c=1.0):
    """Empirical check of the concentration inequalities on ``samples`` fresh designs.

    For each inequality the report holds the mean of the left-hand quantity and
    quantiles of the implied constant LHS / scale, where the scale is the
    constant-free right-hand side. ``quad_form`` picks the PSD matrix of the
    quadratic-form check: ``identity`` or ``gram`` (X_tail Sigma_tail X_tail^T).
    """
    if samples < 100:
        raise DomainError(f"audit needs at least 100 samples, got {samples}")
    if not 0 <= k < spec.p:
        raise DomainError(f"k must lie in [0, p), got {k}")
    lam_i = spec.eigenvalues
    tail, tail_sq = spec.tail_sum(k), spec.tail_sq_sum(k)
    total, total_sq = spec.tail_sum(0), spec.tail_sq_sum(0)
    lam_next = lam_i[k]

    sum_norms = np.empty(samples)
    row_norm = np.empty(samples)
    quad = np.empty(samples)
    offdiag = np.empty(samples)
    mu_max = np.empty(samples)
    mu_min = np.empty(samples)
    mu_max_a0 = np.empty(samples)
    mu_min_a0 = np.empty(samples)
    for s in range(samples):
        ss = derive_seed(seed, s, "audit")
        design_seed, noise_seed = ss.spawn(2)
        X = sample_design(family, spec, n, design_seed)
        gram = X @ X.T
        xt = X[:, k:]
        gram_k = gram if k == 0 else xt @ xt.T
        sum_norms[s] = np.trace(gram_k)
        row_norm[s] = gram[0, 0]
        eps = isotropic_rows(noise, 1, n, noise_seed)[0]
        if quad_form == "identity":
            quad[s] = eps @ eps / n
        elif quad_form == "gram":
            xs = xt * np.sqrt(lam_i[k:])
            a = xs @ xs.T
            quad[s] = eps @ a @ eps / np.trace(a)
        else:
            raise DomainError(f"unknown quad_form {quad_form!r}")
        off = gram - np.diag(np.diag(gram))
        offdiag[s] = np.max(np.abs(linalg.eigvalsh(off)))
        eig_k = linalg.eigvalsh(gram_k) + lam
        mu_min[s], mu_max[s] = eig_k[0], eig_k[-1]
        eig_0 = eig_k if k == 0 else linalg.eigvalsh(gram) + lam
        mu_min_a0[s], mu_max_a0[s] = eig_0[0], eig_0[-1]

    statistics = {
        "sum_of_squared_norms": dict(_summarize(sum_norms, n * tail), expected=n * tail),
        "weighted_norm": _summarize(row_norm, t * lam_i[0] + total),
        "quadratic_form": _summarize(quad, 1.0),
        "offdiagonal_gram": _summarize(offdiag, math.sqrt((t + n) * (lam_i[0] ** 2 * (t + n) + total_sq))),
    }
    up_scale = lam_next * (t + n) + tail
    low_scale = math.sqrt((t + n) * (lam_next**2 * (t + n) + tail_sq))
    env = bounds.eigenvalue_envelope_Ak(spec, lam, k, n, t=t, small_ball_L=small_ball_L,
                                        calibration_c=calibration_c)
    statistics["A_k_envelope"] = {
        "upper": _summarize(mu_max - lam, up_scale),
        "lower_deficit": _summarize(lam + tail - mu_min, low_scale),
        "predicted": asdict(env),
        "hit_rate_upper": float(np.mean(mu_max <= env.mu_max_pred)),
        "hit_rate_lower": float(np.mean(mu_min >= env.mu_min_pred)),
    }
    big_k = (lam + total) / (n * lam_i[0])
    a0 = {"K": big_k}
    if big_k > 1 and t < n:
        cond = np.where(mu_min > 0, mu_max / np.where(mu_min > 0, mu_min, 1.0), np.inf)
        hits_low, hits_up = [], []
        for s in range(samples):
            if not np.isfinite(cond[s]):
                hits_low.append(False)
                hits_up.append(False)
                continue
            e = bounds.envelope_A0_from_Ak(spec, lam, n, t, 1.0, max(cond[s], 1.0), big_k * (1 - 1e-12),
                                           calibration_c)
            hits_low.append(mu_min_a0[s] >= e.mu_min_pred)
            hits_up.append(mu_max_a0[s] <= e.mu_max_pred)
        a0.update(hit_rate_lower=float(np.mean(hits_low)), hit_rate_upper=float(np.mean(hits_up)))
    statistics["A_0_envelope"] = a0

    raw = {"sum_norms": sum_norms, "row_norm": row_norm, "quad": quad, "offdiag": offdiag,
           "mu_max_Ak": mu_max, "mu_min_Ak": mu_min, "mu_max_A0": mu_max_a0, "mu_min_A0": mu_min_a0}
    return AuditReport(n=int(n), k=int(k), lam=float(lam), samples=int(samples), seed=int(seed),
                       family=family, statistics=statistics, raw=raw)


def quadratic_form_ratios(n, samples, seed, noise="gaussian"):
    """eps^T eps / n for ``samples`` independent noise vectors of length n."""
    ratios = np.empty(samples)
    for s in range(samples):
        eps = isotropic_rows(noise, 1, n, derive_seed(seed, s, "noise"))[0]
        ratios[s] = eps @ eps / n
    return ratios


def lower_bound_sanity(config, calibration_c=1.0, sigma_x=1.0):
    """Per-replicate lower bounds against the exact design-conditional risk.

    The bias bound is compared with the bias averaged over random sign flips
    of theta* (its stated setting) and uses L = measured cond(A_k); the
    variance bound is compared with the noise-averaged variance. Only the
    first lambda of the grid is used.
    """
    spec = config.build_spectrum()
    sig = config.build_signal(spec)
    lam = config.lambda_grid[0]
    k = config.k_for(spec, lam)
    if k is None:
        raise DomainError(f"no split index satisfies the k policy at lambda={lam}")
    theta_bar = np.abs(sig.theta_star)
    v_low = config.sigma_eps**2 * bounds.lower_bound_variance(spec, config.n, lam, k, sigma_x, calibration_c)
    rows = []
    for r in range(config.replicates):
        X = sample_design(config.design, spec, config.n, derive_seed(config.base_seed, r, "design"))
        path = GramPath(X, spec)
        cond = path.diagnostics(lam, k).cond_Ak
        b_low = bounds.lower_bound_bias(spec, theta_bar, lam, config.n, k, L=max(cond, 1.0))
        b_mean = estimator.expected_bias_sign_flip(X, spec, theta_bar, lam)
        v_mean = path.variance(lam, config.sigma_eps)
        rows.append({"replicate": r, "k": k, "L": cond, "B_lower": b_low, "B_mean": b_mean,
                     "V_lower": v_low, "V_mean": v_mean})
    return rows
