"""Self-check suites: auxiliary-function certificates for the factor update and metric oracles."""

import logging
from itertools import permutations

import numpy as np
from pydantic import BaseModel, ConfigDict

from . import solver
from .core import AffinityMatrix, Factor, Partition, residual
from .metrics import acc

logger = logging.getLogger(__name__)

MAX_INSTANCE_SIZE = 10
MAX_INSTANCE_CLUSTERS = 3
TAU_CHOICES = (1.5, 2.0, 5.0)


class CertifiedInstance(BaseModel):
    """One random instance with its certificate values, serializable for replay."""

    model_config = ConfigDict(frozen=True)

    index: int
    seed: int
    n: int
    c: int
    tau: float
    alpha: float
    g_prev: float
    g_next: float
    f_prev: float
    f_next: float
    convex: bool
    perturbation_violations: int
    ok: bool
    affinity: list[list[float]]
    factor: list[list[float]]


class CertificateSuiteReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    instances: list[CertifiedInstance]
    oracle_cases: int
    oracle_failures: int

    @property
    def failures(self) -> list[CertifiedInstance]:
        return [instance for instance in self.instances if not instance.ok]

    @property
    def ok(self) -> bool:
        return not self.failures and self.oracle_failures == 0


def random_instance(seed: int, index: int) -> tuple[AffinityMatrix, Factor, float, float]:
    """Random positive (S, V, α_m, τ) with n <= 10 and c <= 3, reproducible from (seed, index)."""
    rng = np.random.default_rng([seed, index])
    n = int(rng.integers(2, MAX_INSTANCE_SIZE + 1))
    c = int(rng.integers(1, min(MAX_INSTANCE_CLUSTERS, n) + 1))

    upper = rng.random((n, n))
    affinity = AffinityMatrix((upper + upper.T) / 2.0)
    factor = Factor(rng.uniform(0.05, 1.0, (n, c)))
    alpha = float(rng.uniform(0.05, 1.0))
    tau = float(rng.choice(TAU_CHOICES))
    return affinity, factor, alpha, tau


def certify_instance(
    seed: int, index: int, perturbations: int = 10
) -> CertifiedInstance:
    """
    Certify one update step and check the bound g >= f at random positive perturbations.

    The factor step is looked up on the solver module at call time.
    """
    affinity, factor, alpha, tau = random_instance(seed, index)
    updated = solver.update_factor(affinity, factor)
    certificate = solver.certify_auxiliary(
        affinity, factor, updated, alpha, tau, seed=index, spot_checks=perturbations
    )

    rng = np.random.default_rng([seed, index, 1])
    weight = alpha**tau
    violations = 0
    for _ in range(perturbations):
        point = Factor(factor.values * rng.uniform(0.5, 2.0, factor.values.shape))
        g = solver.auxiliary_value(affinity, factor, point, alpha, tau)
        f = weight * residual(affinity, point)
        if g < f - 1e-8 * max(1.0, abs(f)):
            violations += 1

    return CertifiedInstance(
        index=index,
        seed=seed,
        n=affinity.n_samples,
        c=factor.n_clusters,
        tau=tau,
        alpha=alpha,
        g_prev=certificate.g_prev,
        g_next=certificate.g_next,
        f_prev=certificate.f_prev,
        f_next=certificate.f_next,
        convex=certificate.convex,
        perturbation_violations=violations,
        ok=certificate.ok and violations == 0,
        affinity=affinity.values.tolist(),
        factor=factor.values.tolist(),
    )


def brute_force_acc(pred: Partition, truth: Partition) -> float:
    """Best matching accuracy by trying every injective cluster-to-class assignment."""
    clusters = int(pred.labels.max()) + 1
    classes = int(truth.labels.max()) + 1
    best = 0
    if clusters <= classes:
        for image in permutations(range(classes), clusters):
            mapped = np.asarray(image)[pred.labels]
            best = max(best, int(np.sum(mapped == truth.labels)))
    else:
        for image in permutations(range(clusters), classes):
            mapped = np.asarray(image)[truth.labels]
            best = max(best, int(np.sum(mapped == pred.labels)))
    return best / pred.n_samples


def metric_oracle_failures(cases: int, seed: int, max_clusters: int = 6) -> int:
    """Count random labelings where assignment-based ACC differs from the brute-force optimum."""
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(cases):
        n = int(rng.integers(2, 25))
        pred = Partition.from_labels(rng.integers(0, rng.integers(1, max_clusters + 1), n))
        truth = Partition.from_labels(rng.integers(0, rng.integers(1, max_clusters + 1), n))
        if acc(pred, truth) != brute_force_acc(pred, truth):
            failures += 1
    return failures


def run_certificate_suite(
    instances: int = 50, seed: int = 0, perturbations: int = 10, oracle_cases: int = 200
) -> CertificateSuiteReport:
    """Certify ``instances`` random update steps and run the ACC oracle comparison."""
    results = [certify_instance(seed, index, perturbations) for index in range(instances)]
    oracle_failures = metric_oracle_failures(oracle_cases, seed)

    report = CertificateSuiteReport(
        instances=results, oracle_cases=oracle_cases, oracle_failures=oracle_failures
    )
    logger.info(
        f"Certified {len(results) - len(report.failures)}/{len(results)} instances, "
        f"{oracle_failures} metric oracle failure(s)"
    )
    return report
