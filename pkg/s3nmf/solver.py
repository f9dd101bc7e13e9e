"""Inner solver: multiplicative factor updates alternated with closed-form member weights."""

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed
from scipy.special import softmax

from .config.models import SolverConfig
from .core import (
    AffinityMatrix,
    DescentStep,
    EnsembleState,
    Factor,
    FloatArray,
    WeightVector,
    residual,
    weighted_objective,
)
from .exceptions import CertificateError, NumericError, ParameterError, ShapeError

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-12

FactorUpdate = Callable[[AffinityMatrix, Factor, float], Factor]


def init_factors(
    n: int,
    c: int,
    b: int,
    seed: int | np.random.SeedSequence,
    epsilon_floor: float = DEFAULT_EPSILON,
) -> list[Factor]:
    """
    Draw ``b`` independent random factors with entries uniform on (epsilon_floor, 1].

    Each member gets its own child stream of ``seed``, so the draws do not depend
    on the order in which members are consumed.

    Raises:
        ParameterError: If b < 2 or c is outside [2, n]
    """
    if b < 2:
        raise ParameterError(f"Ensemble needs at least 2 members, got {b}")

    if c < 2 or c > n:
        raise ParameterError(f"Cluster count must lie in [2, {n}], got {c}")

    sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)

    factors = []
    for child in sequence.spawn(b):
        rng = np.random.default_rng(child)
        draws = 1.0 - rng.random((n, c))
        factors.append(Factor(epsilon_floor + (1.0 - epsilon_floor) * draws))
    return factors


def _check_shapes(affinity: AffinityMatrix, factor: Factor) -> None:
    if factor.n_samples != affinity.n_samples:
        raise ShapeError(
            f"Factor has {factor.n_samples} rows but affinity is "
            f"{affinity.n_samples}x{affinity.n_samples}"
        )


def update_factor(
    affinity: AffinityMatrix, factor: Factor, epsilon_floor: float = DEFAULT_EPSILON
) -> Factor:
    """
    One multiplicative step V ← V ∘ (SV / VVᵀV)^(1/4).

    The member weight cancels in the ratio, so the step does not depend on it.
    Zero entries stay zero; positive entries are floored at ``epsilon_floor`` so no
    row can underflow to all zeros.

    Raises:
        ShapeError: If the factor does not match the affinity
        NumericError: If the step produces non-finite values
    """
    _check_shapes(affinity, factor)
    v = factor.values
    return Factor(_multiplicative_step(v, affinity.values @ v, epsilon_floor))


def _multiplicative_step(v: FloatArray, sv: FloatArray, epsilon_floor: float) -> FloatArray:
    with np.errstate(all="ignore"):
        denominator = np.maximum(v @ (v.T @ v), epsilon_floor)
        updated = v * np.power(sv / denominator, 0.25)
        updated = np.where(v > 0, np.maximum(updated, epsilon_floor), 0.0)

    if not np.isfinite(updated).all():
        raise NumericError("Factor update produced non-finite values")

    return updated


def gram_residual(squared_norm: float, v: FloatArray, sv: FloatArray) -> float:
    """
    ‖S - VVᵀ‖²_F from ‖S‖², V and SV, without forming the n×n product VVᵀ.

    Uses ‖S‖² - 2 tr(VᵀSV) + ‖VᵀV‖²_F, clamped at zero against cancellation.
    """
    gram = v.T @ v
    return max(squared_norm - 2.0 * float(np.sum(v * sv)) + float(np.sum(gram * gram)), 0.0)


def update_weights(
    residuals: Sequence[float] | FloatArray,
    tau: float,
    epsilon_floor: float = DEFAULT_EPSILON,
) -> WeightVector:
    """
    Closed-form member weights α_m ∝ (τ h_m)^(1/(1-τ)).

    Residuals are floored at ``epsilon_floor`` so a perfect member cannot take all the
    weight. Computed in the log domain.

    Raises:
        ParameterError: If tau <= 1
    """
    if tau <= 1:
        raise ParameterError(f"tau must be greater than 1, got {tau}")

    h = np.maximum(np.asarray(residuals, dtype=np.float64), epsilon_floor)
    if h.ndim != 1 or h.size == 0:
        raise ShapeError("Residuals must be a non-empty vector")

    alpha = softmax(np.log(tau * h) / (1.0 - tau))

    tiny = np.finfo(np.float64).tiny
    if (alpha < tiny).any():
        alpha = np.maximum(alpha, tiny)
        alpha = alpha / alpha.sum()

    return WeightVector(alpha)


def kkt_residual(affinity: AffinityMatrix, factor: Factor) -> FloatArray:
    """Entrywise stationarity measure |4(VVᵀV - SV)|."""
    _check_shapes(affinity, factor)
    v = factor.values
    return np.abs(4.0 * (v @ (v.T @ v) - affinity.values @ v))


@dataclass(frozen=True)
class AuxiliaryCertificate:
    """Auxiliary function g and objective f at the expansion point and at the next iterate."""

    g_prev: float
    g_next: float
    f_prev: float
    f_next: float
    convex: bool

    @property
    def tight(self) -> bool:
        return abs(self.g_prev - self.f_prev) <= 1e-8 * max(1.0, abs(self.f_prev))

    @property
    def bounds(self) -> bool:
        return self.g_next >= self.f_next - 1e-8 * max(1.0, abs(self.f_next))

    @property
    def descends(self) -> bool:
        return self.g_next <= self.g_prev + 1e-10 * max(1.0, abs(self.g_prev))

    @property
    def ok(self) -> bool:
        return self.tight and self.bounds and self.descends and self.convex


def auxiliary_value(
    affinity: AffinityMatrix,
    expansion: Factor,
    factor: Factor,
    alpha_m: float,
    tau: float,
) -> float:
    """
    Auxiliary function of (α_m)^τ ‖S - VVᵀ‖²_F around ``expansion`` (Vᵗ), evaluated at ``factor``.

    g(V) = (α_m)^τ [ ‖S‖² + Σ (VᵗVᵗᵀVᵗ)_ij V_ij⁴ / (Vᵗ_ij)³
                     - 2 Σ_ijk S_ik Vᵗ_ij Vᵗ_kj (1 + log(V_ij V_kj / (Vᵗ_ij Vᵗ_kj))) ]

    The expansion point must be strictly positive.
    """
    s = affinity.values
    vt = expansion.values
    v = factor.values

    sv = s @ vt
    quartic = np.sum((vt @ (vt.T @ vt)) * v**4 / vt**3)

    coefficient = vt * sv
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = np.log(v) - np.log(vt)
        log_term = np.where(coefficient > 0, coefficient * log_ratio, 0.0)

    # S is symmetric, so the (i,j) and (k,j) log halves contribute equally
    cross = np.sum(coefficient) + 2.0 * np.sum(log_term)

    return float(alpha_m**tau * (np.sum(s * s) + quartic - 2.0 * cross))


def auxiliary_gradient(
    affinity: AffinityMatrix, expansion: Factor, factor: Factor, alpha_m: float, tau: float
) -> FloatArray:
    """∂g/∂V_ij = 4(α_m)^τ [(VᵗVᵗᵀVᵗ)_ij V_ij³/(Vᵗ_ij)³ - (SVᵗ)_ij Vᵗ_ij / V_ij]."""
    vt = expansion.values
    v = factor.values
    quartic = vt @ (vt.T @ vt)
    sv = affinity.values @ vt
    return 4.0 * alpha_m**tau * (quartic * v**3 / vt**3 - sv * vt / v)


def auxiliary_curvature(
    affinity: AffinityMatrix, expansion: Factor, factor: Factor, alpha_m: float, tau: float
) -> FloatArray:
    """Diagonal of the Hessian of g; g is separable so the off-diagonal entries vanish."""
    vt = expansion.values
    v = factor.values
    quartic = vt @ (vt.T @ vt)
    sv = affinity.values @ vt
    return alpha_m**tau * (12.0 * quartic * v**2 / vt**3 + 4.0 * sv * vt / v**2)


def certify_auxiliary(
    affinity: AffinityMatrix,
    factor_prev: Factor,
    factor_next: Factor,
    alpha_m: float,
    tau: float,
    seed: int = 0,
    spot_checks: int = 5,
) -> AuxiliaryCertificate:
    """
    Evaluate the auxiliary-function guarantees for one factor step.

    Checks tightness g(Vᵗ) = f(Vᵗ), the bound g(V) >= f(V) at the next iterate, descent
    g(Vᵗ⁺¹) <= g(Vᵗ), and positive curvature of g at random positive points.

    Raises:
        CertificateError: If the expansion point has a zero entry
    """
    _check_shapes(affinity, factor_prev)
    _check_shapes(affinity, factor_next)

    if not (factor_prev.values > 0).all():
        raise CertificateError("Expansion point must be strictly positive")

    weight = alpha_m**tau
    rng = np.random.default_rng(seed)
    convex = True
    for _ in range(spot_checks):
        point = Factor(factor_prev.values * rng.uniform(0.1, 10.0, factor_prev.values.shape))
        if not (auxiliary_curvature(affinity, factor_prev, point, alpha_m, tau) > 0).all():
            convex = False
            break

    return AuxiliaryCertificate(
        g_prev=auxiliary_value(affinity, factor_prev, factor_prev, alpha_m, tau),
        g_next=auxiliary_value(affinity, factor_prev, factor_next, alpha_m, tau),
        f_prev=weight * residual(affinity, factor_prev),
        f_next=weight * residual(affinity, factor_next),
        convex=convex,
    )


def _advance_member(
    affinity: AffinityMatrix,
    factor: Factor,
    product: FloatArray | None,
    member: int,
    epsilon_floor: float,
    update: FactorUpdate,
) -> tuple[Factor, FloatArray | None, float]:
    """
    Step one member and return it with its next SV product and its residual.

    ``product`` is SV for the current factor; when given, the built-in step reuses it
    and the residual comes from ``gram_residual``. Custom steps pass None.
    """
    try:
        if product is None:
            updated = update(affinity, factor, epsilon_floor)
        else:
            updated = Factor(_multiplicative_step(factor.values, product, epsilon_floor))
    except NumericError as e:
        raise e.with_context(member=member) from e

    if product is None:
        return updated, None, residual(affinity, updated)

    next_product = affinity.values @ updated.values
    h = gram_residual(affinity.squared_norm, updated.values, next_product)
    return updated, next_product, h


def solve_inner(
    affinity: AffinityMatrix,
    factors_init: Sequence[Factor],
    config: SolverConfig,
    fixed_weights: WeightVector | None = None,
    n_jobs: int = 1,
    update: FactorUpdate = update_factor,
) -> EnsembleState:
    """
    Alternate member factor updates and the weight update until the variables settle.

    Each iteration updates every factor, then recomputes the weights from fresh
    residuals. Iteration stops once the largest absolute change over all factor
    entries and all weights falls below ``config.tol``, or after
    ``config.max_inner_iters`` iterations.

    Args:
        affinity: Affinity S being factorized
        factors_init: Strictly positive starting factors, at least two
        config: Solver settings
        fixed_weights: Pin the weights instead of learning them (unweighted variant)
        n_jobs: Worker threads for the member updates (1 runs inline)
        update: Factor step, replaceable for diagnostics

    Returns:
        Final factors, weights, residuals and the per-iteration objective history

    Raises:
        ParameterError: If fewer than two factors are given or a factor is not positive
        NumericError: If an update fails, tagged with member and iteration
        CertificateError: If ``config.certify`` is set and a step violates its certificate
    """
    b = len(factors_init)
    if b < 2:
        raise ParameterError(f"Ensemble needs at least 2 members, got {b}")

    for factor in factors_init:
        _check_shapes(affinity, factor)
        if not (factor.values > 0).all():
            raise ParameterError("Initial factors must be strictly positive")

    if fixed_weights is not None and len(fixed_weights) != b:
        raise ShapeError(f"Got {len(fixed_weights)} fixed weights for {b} members")

    tau = config.tau
    eps = config.epsilon_floor
    factors = list(factors_init)
    weights = fixed_weights if fixed_weights is not None else WeightVector.uniform(b)
    # the built-in step carries SV from one iteration to the next
    products: list[FloatArray | None]
    if update is update_factor:
        products = [affinity.values @ factor.values for factor in factors]
        residuals = np.array(
            [
                gram_residual(affinity.squared_norm, factor.values, product)
                for factor, product in zip(factors, products, strict=True)
            ]
        )
    else:
        products = [None] * b
        residuals = np.array([residual(affinity, factor) for factor in factors])
    current = weighted_objective(residuals, weights.alpha, tau)

    history = [current]
    trace: list[DescentStep] = []
    converged = False
    iteration = 0

    with Parallel(n_jobs=n_jobs, prefer="threads") as parallel:
        for iteration in range(1, config.max_inner_iters + 1):
            tasks = (
                delayed(_advance_member)(affinity, factor, product, m, eps, update)
                for m, (factor, product) in enumerate(zip(factors, products, strict=True))
            )
            try:
                if n_jobs == 1:
                    results = [
                        _advance_member(affinity, factor, product, m, eps, update)
                        for m, (factor, product) in enumerate(
                            zip(factors, products, strict=True)
                        )
                    ]
                else:
                    results = parallel(tasks)
            except NumericError as e:
                raise e.with_context(iteration=iteration) from e

            updated = [factor for factor, _, _ in results]
            products = [product for _, product, _ in results]
            new_residuals = np.array([h for _, _, h in results])

            if config.certify:
                _certify_step(affinity, factors, updated, weights, tau, iteration)

            after_factors = weighted_objective(new_residuals, weights.alpha, tau)
            new_weights = (
                fixed_weights
                if fixed_weights is not None
                else update_weights(new_residuals, tau, eps)
            )
            after_weights = weighted_objective(new_residuals, new_weights.alpha, tau)

            change = max(
                max(
                    float(np.max(np.abs(new.values - old.values)))
                    for new, old in zip(updated, factors, strict=True)
                ),
                float(np.max(np.abs(new_weights.alpha - weights.alpha))),
            )

            trace.append(DescentStep(current, after_factors, after_weights))
            history.append(after_weights)
            factors, weights = updated, new_weights
            residuals, current = new_residuals, after_weights

            if change < config.tol:
                converged = True
                break

    if converged:
        logger.debug(
            f"Inner solve converged after {iteration} iterations, objective={current:.6g}"
        )
    else:
        logger.warning(
            f"Inner solve stopped at the iteration limit ({config.max_inner_iters}) "
            f"without reaching tol={config.tol}"
        )

    return EnsembleState(
        factors=factors,
        weights=weights,
        affinity=affinity,
        residuals=residuals,
        objective_history=history,
        descent_trace=trace,
        iterations=iteration,
        converged=converged,
    )


def _certify_step(
    affinity: AffinityMatrix,
    previous: Sequence[Factor],
    updated: Sequence[Factor],
    weights: WeightVector,
    tau: float,
    iteration: int,
) -> None:
    for m, (prev, nxt) in enumerate(zip(previous, updated, strict=True)):
        if not (prev.values > 0).all():
            logger.debug(f"Skipping certificate for member {m}: expansion point has zeros")
            continue
        certificate = certify_auxiliary(
            affinity, prev, nxt, float(weights.alpha[m]), tau, seed=iteration, spot_checks=1
        )
        if not certificate.ok:
            raise CertificateError(
                f"Auxiliary-function certificate failed: {certificate}",
                member=m,
                iteration=iteration,
            )
