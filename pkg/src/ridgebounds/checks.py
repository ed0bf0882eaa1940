"""Self-verification suites: each one draws seeded random instances and
reports measured residuals next to the threshold they must meet."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import bounds, estimator
from .bounds import SignalSpec
from .exceptions import DomainError
from .experiments import concentration_audit, quadratic_form_ratios
from .spectrum import Spectrum, build_spectrum, effective_ranks, select_k_star

SUITES = ("dual_primal", "identity", "variance_mc", "ratio_caps", "concentration")
DEFAULT_SAMPLES = {"dual_primal": 200, "identity": 100, "variance_mc": 10, "ratio_caps": 500, "concentration": 200}


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: dict = field(default_factory=dict)


@dataclass
class SuiteReport:
    suite: str
    seed: int
    samples: int
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_dict(self):
        return {
            "suite": self.suite, "seed": self.seed, "samples": self.samples, "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": bool(c.passed), "measured": _num(c.measured),
                 "threshold": _num(c.threshold), **c.detail}
                for c in self.checks
            ],
        }


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else None


def random_spectrum(rng, p):
    """Non-increasing positive spectrum drawn from one of a few shapes.

    The decay is capped so that lambda_p / lambda_1 stays above about
    exp(-12); steeper spectra make the Gram systems so ill-conditioned
    that rounding alone exceeds the suites' tolerances.
    """
    shape = rng.integers(3)
    i = np.arange(1, p + 1)
    if shape == 0:
        lam = np.exp(-rng.uniform(0.01, 1.0) * min(1.0, 12.0 / p) * i)
    elif shape == 1:
        lam = i ** -rng.uniform(0.0, 2.0)
    else:
        k = int(rng.integers(0, p))
        lam = np.ones(p)
        lam[:k] = rng.uniform(1.0, 100.0)
    return Spectrum(lam * rng.uniform(0.1, 10.0))


def dual_primal(seed=0, samples=200):
    """Dual and primal ridge solutions agree for lambda > 0."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        n, p = int(rng.integers(5, 41)), int(rng.integers(1, 81))
        lam = float(rng.choice([0.01, 0.1, 1.0, 10.0]))
        spec = random_spectrum(rng, p)
        X = estimator.sample_design("gaussian", spec, n, rng)
        y = rng.standard_normal(n)
        dual = estimator.ridge_fit_dual(X, y, lam).theta_hat
        primal = estimator.ridge_fit_primal_oracle(X, y, lam)
        dev = np.max(np.abs(dual - primal)) / (1 + np.max(np.abs(primal)))
        worst = max(worst, float(dev))
    return SuiteReport("dual_primal", seed, samples, [Check("max_relative_deviation", worst <= 1e-8, worst, 1e-8)])


def identity_instances(seed, samples):
    """(X, y, lam, k) with both lam I + X X^T and A_k positive definite; about half have lam < 0."""
    rng = np.random.default_rng(seed)
    for s in range(samples):
        n = int(rng.integers(3, 30))
        k = int(rng.integers(1, n))
        p = k + n + int(rng.integers(0, 60))
        spec = random_spectrum(rng, p)
        X = estimator.sample_design("gaussian", spec, n, rng)
        y = rng.standard_normal(n)
        tail = X[:, k:]
        mu_min = float(np.linalg.eigvalsh(tail @ tail.T)[0])
        lam = -rng.uniform(0.05, 0.9) * mu_min if s % 2 else float(rng.uniform(0.01, 10.0))
        yield X, y, lam, k


def identity(seed=0, samples=100):
    """The head-block identity of the dual fit holds to rounding error."""
    worst, negatives = 0.0, 0
    for X, y, lam, k in identity_instances(seed, samples):
        negatives += lam < 0
        worst = max(worst, estimator.identity_residual(X, y, lam, k))
    return SuiteReport("identity", seed, samples,
                       [Check("max_relative_residual", worst <= 1e-8, worst, 1e-8, {"negative_lambda_cases": negatives})])


def variance_mc(seed=0, samples=10, draws=100_000, n=20, p=40):
    """Closed-form expected variance against a Monte Carlo mean over noise draws."""
    rng = np.random.default_rng(seed)
    checks = []
    for s in range(samples):
        spec = random_spectrum(rng, p)
        X = estimator.sample_design("gaussian", spec, n, rng)
        lam = float(rng.choice([0.01, 0.1, 1.0]))
        exact = estimator.exact_variance(X, spec, lam)
        vals = np.concatenate([
            estimator.realized_variance(X, spec, lam, rng.standard_normal((n, m)))
            for m in _chunks(draws, 20_000)
        ])
        se = vals.std(ddof=1) / math.sqrt(draws)
        z = abs(vals.mean() - exact) / se
        checks.append(Check(f"instance_{s}", z <= 3.0, z, 3.0, {"exact": exact, "mc_mean": float(vals.mean())}))
    return SuiteReport("variance_mc", seed, samples, checks)


def _chunks(total, size):
    while total > 0:
        yield min(total, size)
        total -= size


def ratio_caps(seed=0, samples=500):
    """Matched upper/lower ratios lie in [1, cap] in both cap modes."""
    rng = np.random.default_rng(seed)
    tol = 1e-9
    worst_low, worst_excess, evaluated = math.inf, -math.inf, 0
    for _ in range(samples):
        p, n = int(rng.integers(2, 60)), int(rng.integers(2, 50))
        spec = random_spectrum(rng, p)
        sig = SignalSpec(rng.standard_normal(p) * (rng.random(p) < 0.7) + 1e-3)
        lam = float(rng.uniform(-0.9, 2.0) * spec.tail_sum(min(n, p) - 1))
        pairs = []
        for k in range(min(n, p)):
            try:
                rho = effective_ranks(spec, lam, n, k).rho_k
            except DomainError:
                continue
            a, b = rho * rng.uniform(0.05, 0.999), rho / rng.uniform(0.05, 0.999)
            pairs.append((k, bounds.ratio_caps(rho, "interval", a=a, b=b)))
        b = float(rng.uniform(1.0 / n, 5.0)) + 1e-9
        k_star = select_k_star(spec, lam, n, b)
        if k_star is not None:
            rho = effective_ranks(spec, lam, n, k_star).rho_k
            pairs.append((k_star, bounds.ratio_caps(rho, "kstar", b=b, n=n)))
        for k, caps in pairs:
            m = bounds.matched_bounds(spec, sig, n, lam, k)
            for over, under, cap in ((m.B_over, m.B_under, caps.B_cap), (m.V_over, m.V_under, caps.V_cap)):
                r = over / under
                worst_low = min(worst_low, r)
                worst_excess = max(worst_excess, r - cap)
                evaluated += 1
    return SuiteReport("ratio_caps", seed, samples, [
        Check("min_ratio", worst_low >= 1 - tol, worst_low, 1 - tol, {"ratios_evaluated": evaluated}),
        Check("max_ratio_minus_cap", worst_excess <= tol, worst_excess, tol),
    ])


def concentration(seed=0, samples=200, n=100, p_over_n=20):
    """Sum-of-norms mean and the quadratic-form upper quantile on a plateau spectrum."""
    spec = build_spectrum({"model": "spiked", "k_spikes": 0, "lambda_top": 1.0, "lambda_tail": 1.0,
                           "p": p_over_n * n})
    audit = concentration_audit(spec, "gaussian", n, 0, 0.0, samples, seed)
    norms = audit.statistics["sum_of_squared_norms"]
    z = abs(norms["mean"] - norms["expected"]) / norms["se"]
    n_hw = 1000
    q99 = float(np.quantile(quadratic_form_ratios(n_hw, samples, seed), 0.99))
    return SuiteReport("concentration", seed, samples, [
        Check("sum_of_norms_mean_z", z <= 3.0, z, 3.0),
        Check("quadratic_form_q99", q99 <= 1 + 4 / math.sqrt(n_hw), q99, 1 + 4 / math.sqrt(n_hw), {"n": n_hw}),
    ])


def run_suite(name, seed=0, samples=None):
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; expected one of {SUITES}")
    fn = globals()[name]
    return fn(seed=seed, samples=DEFAULT_SAMPLES[name] if samples is None else samples)
