"""Monte Carlo and brute-force oracles for the bounds.

Coverage runs draw ``Binomial(n, p)`` counts with numpy's PCG64 generator.
Trials are split into fixed-size chunks, chunk ``i`` seeded by the ``i``-th
child of ``SeedSequence(seed)``, so a report depends only on the seed and
never on how many worker processes ran the chunks.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .concentration import BoundModel, improved_chernoff_arrays
from .decoy import TBounds, estimate_yields

MIN_TRIALS = 1000
CHUNK = 10_000
RNG_NAME = "numpy.random.PCG64 / SeedSequence.spawn"


@dataclass
class CoverageReport:
    model: BoundModel
    n: int
    p: float
    trials: int
    seed: int
    eps_target: float
    violations_upper: int = 0
    violations_lower: int = 0
    conditions_unmet: int = 0

    @property
    def evaluated(self):
        return self.trials - self.conditions_unmet

    @property
    def threshold(self):
        """Largest admissible violation rate per side (3-sigma slack)."""
        return self.eps_target + 3.0 * math.sqrt(self.eps_target / max(self.evaluated, 1))

    def rate(self, side):
        count = self.violations_upper if side == "upper" else self.violations_lower
        return count / self.evaluated if self.evaluated else 0.0

    @property
    def passed(self):
        return (self.rate("upper") <= self.threshold
                and self.rate("lower") <= self.threshold)

    def as_row(self):
        row = asdict(self)
        row["model"] = self.model.value
        row.update(evaluated=self.evaluated, rate_upper=self.rate("upper"),
                   rate_lower=self.rate("lower"), threshold=self.threshold,
                   passed=self.passed, rng=RNG_NAME)
        return row

    def to_text(self):
        status = "PASS" if self.passed else "FAIL"
        return "\n".join([
            f"model            {self.model.value}",
            f"n, p             {self.n}, {self.p!r}",
            f"trials           {self.trials} (seed {self.seed}, {RNG_NAME})",
            f"eps per side     {self.eps_target!r}",
            f"conditions unmet {self.conditions_unmet}",
            f"upper violations {self.violations_upper} (rate {self.rate('upper'):.3e})",
            f"lower violations {self.violations_lower} (rate {self.rate('lower'):.3e})",
            f"threshold        {self.threshold:.3e}",
            f"result           {status}",
        ]) + "\n"


def model_bounds(model, observed, n, eps_hat, eps):
    """Vectorised ``(lower, upper, usable)`` arrays for one bound model."""
    model = BoundModel.parse(model)
    obs = np.asarray(observed, dtype=np.float64)
    usable = np.ones(obs.shape, dtype=bool)
    if model is BoundModel.HOEFFDING or model is BoundModel.AZUMA:
        scale = 0.5 if model is BoundModel.HOEFFDING else 2.0
        up = obs + math.sqrt(scale * n * math.log(1.0 / eps_hat))
        lo = np.maximum(0.0, obs - math.sqrt(scale * n * math.log(1.0 / eps)))
    elif model is BoundModel.IMPROVED_CHERNOFF:
        lo, up = improved_chernoff_arrays(obs, eps_hat, eps)
    else:
        tau_low = obs - math.sqrt(0.5 * n * math.log(1.0 / eps))
        with np.errstate(divide="ignore", invalid="ignore"):
            usable = ((tau_low > 0)
                      & (math.log(2.0 / eps_hat) / tau_low <= 9.0 / 32.0)
                      & (math.log(1.0 / eps) / tau_low < 1.0 / 3.0))
        up = obs + np.sqrt(2.0 * obs * math.log(16.0 / eps_hat ** 4))
        lo = np.maximum(0.0, obs - np.sqrt(3.0 * obs * math.log(1.0 / eps)))
    return lo, np.minimum(up, n), usable


def _run_chunk(args):
    model, n, p, eps, size, seed_seq = args
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    draws = rng.binomial(n, p, size=size)
    lo, up, usable = model_bounds(model, draws, n, eps, eps)
    mean = n * p
    return (int(np.count_nonzero(usable & (mean > up))),
            int(np.count_nonzero(usable & (mean < lo))),
            int(np.count_nonzero(~usable)))


def bernoulli_coverage(model, n, p, eps, trials, seed, workers=1):
    """Empirical failure rates of ``model``'s interval on binomial draws.

    A violation is a trial whose true mean ``n p`` lies outside the
    interval built from the draw with failure probability ``eps`` per side.
    Draws where the multiplicative Chernoff conditions fail are counted in
    ``conditions_unmet`` instead.
    """
    model = BoundModel.parse(model)
    if trials < MIN_TRIALS:
        raise ValueError(f"need at least {MIN_TRIALS} trials, got {trials}")
    if not (n >= 1 and 0 <= p <= 1 and 0 < eps < 1):
        raise ValueError(f"invalid parameters n={n}, p={p}, eps={eps}")
    n = int(n)
    n_chunks = -(-trials // CHUNK)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    jobs = [(model, n, p, eps, min(CHUNK, trials - i * CHUNK), children[i])
            for i in range(n_chunks)]
    if workers > 1 and n_chunks > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(job) for job in jobs]
    report = CoverageReport(model, n, p, trials, seed, eps)
    for up, lo, unmet in parts:
        report.violations_upper += up
        report.violations_lower += lo
        report.conditions_unmet += unmet
    return report


# --- decoy sandwich oracle -------------------------------------------------

def poisson_weights(mu, size):
    """``mu^n / n!`` for ``n < size``."""
    return np.array([mu ** n / math.factorial(n) for n in range(size)])


def exact_t_values(Y, mu0, mu1):
    """Exact ``T_ab`` of a (truncated) yield matrix ``Y[n, m]``."""
    size = Y.shape[0]
    v = (poisson_weights(mu0, size), poisson_weights(mu1, size))
    return {(a, b): float(v[a] @ Y @ v[b]) for a in (0, 1) for b in (0, 1)}


UPPER_CHECKS = {"Y00_up": (0, 0), "Y02_up": (0, 2), "Y20_up": (2, 0), "Y11_up": (1, 1),
                "Y30_up": (3, 0), "Y03_up": (0, 3), "Y40_up": (4, 0), "Y04_up": (0, 4)}


def sandwich_violations(Y, mu0, mu1, tol=1e-12):
    """Names of the bounds that fail to contain the true yields of ``Y``."""
    yields = estimate_yields(TBounds.exact(exact_t_values(Y, mu0, mu1)), mu0, mu1)
    bad = [name for name, (n, m) in UPPER_CHECKS.items()
           if getattr(yields, name) < Y[n, m] - tol]
    if yields.Y22_low > Y[2, 2] + tol:
        bad.append("Y22_low")
    return bad


@dataclass
class SandwichReport:
    checked: int
    seed: int
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures


def decoy_sandwich_check(random_yield_matrices=1000, seed=7, mu0=0.4, mu1=1e-5, size=21,
                         tol=1e-12):
    """Check every yield bound against random yield matrices in ``[0, 1]``.

    Failures carry the offending matrix as nested lists.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    report = SandwichReport(checked=random_yield_matrices, seed=seed)
    for _ in range(random_yield_matrices):
        Y = rng.random((size, size))
        bad = sandwich_violations(Y, mu0, mu1, tol)
        if bad:
            report.failures.append({"bounds": bad, "matrix": Y.tolist()})
    return report
