"""Closed-form spectral predictions, phase classification, and Monte Carlo checks.

For the geometric tree families this module evaluates the predicted phase
picture on the essential spectrum [-2, 2]: the threshold V(k), the open
window where the spectral measure is expected singular continuous, and the
exact local scaling exponent alpha(E) inside it.  The three closed forms
are one consistent chain

    V(k) = (1 + k)^2 / (4 k),
    alpha(E) = 1 - log((4 V - E^2) / (4 - E^2)) / log(gamma),
    window endpoint^2 = 4 (gamma - V) / (gamma - 1),

tied to the phase-average growth rate Z = (1/2) log((A + 1)/2) of the
per-bump amplification: alpha(E) = 1 - 2 Z(phi)/log(gamma) at E = 2 cos(phi),
and alpha vanishes exactly at the window endpoints.  The same Z is what the
Monte Carlo exponent estimator converges to for jittered random trees, so
the chain is checked twice: algebraically on grids and statistically
against simulated trajectories.

The remaining pieces are finite-horizon classifiers for the unbounded-
branching regime, a quadrature proxy for the spectral density in the phase
variable, and an essential-spectrum coverage metric for truncations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .decomposition import truncated_block
from .errors import GuardError, ValidationError
from .jacobi import ADJACENCY
from .operators import eigenvalues_sym
from .phase import PhaseReducer
from .trees import TreeSpec, parse_gamma, sample_omega_tree, theoretical_dimension
from .transfer import bump_coefficients, efgp_run

_BLOCK_DEPTH_GUARD = 100_000


def _as_float_gamma(gamma) -> float:
    value = float(parse_gamma(gamma))
    if not value > 2.0:
        raise ValidationError("gamma: must be > 2")
    return value


def _check_k(k: int) -> None:
    if not isinstance(k, int) or k < 2:
        raise ValidationError("k: branching factor must be an integer >= 2")


def V(k: int) -> float:
    """Threshold value (1 + k)^2 / (4 k) separating the two phases in gamma."""
    _check_k(k)
    return (1 + k) ** 2 / (4 * k)


def Z(phi: float, k: int) -> float:
    """Phase-averaged log amplification per bump at phase step phi.

    Equals the average of f_theta over a uniform angle, which is the
    growth exponent the Monte Carlo trajectories realize per bump.
    """
    _check_k(k)
    if not 0.0 < phi < math.pi:
        raise ValidationError("phi: must lie strictly between 0 and pi")
    sin2 = math.sin(phi) ** 2
    a = ((1.0 + k * k) / (2.0 * k) - math.cos(phi) ** 2) / sin2
    return 0.5 * math.log((a + 1.0) / 2.0)


def f_theta(theta: float, k: int, phi: float) -> float:
    """Log amplification of one bump at entry angle theta (before averaging)."""
    kick = bump_coefficients(k, phi)
    arg = kick.ratio_squared(theta)
    assert arg > 0.0, "amplification argument must be positive by unimodularity"
    return 0.5 * math.log(arg)


def f_theta_centered(theta: float, k: int, phi: float) -> float:
    """f_theta minus its angle average Z; integrates to zero over a period."""
    return f_theta(theta, k, phi) - Z(phi, k)


@dataclass(frozen=True)
class EnergyInterval:
    """Open symmetric energy window (-endpoint, endpoint)."""

    endpoint: float

    @property
    def lo(self) -> float:
        return -self.endpoint

    @property
    def hi(self) -> float:
        return self.endpoint

    def contains(self, energy: float) -> bool:
        return -self.endpoint < energy < self.endpoint

    def is_boundary(self, energy: float, tol: float = 1e-12) -> bool:
        return abs(abs(energy) - self.endpoint) <= tol * max(1.0, self.endpoint)


def interval_I(k: int, gamma) -> EnergyInterval | None:
    """Predicted singular-continuous energy window, or None when it is empty.

    The endpoint is where the local exponent crosses zero:
    endpoint^2 = 4 (gamma - V(k)) / (gamma - 1).  The window is empty
    exactly when gamma <= V(k).
    """
    g = _as_float_gamma(gamma)
    v = V(k)
    if g <= v:
        return None
    return EnergyInterval(endpoint=math.sqrt(4.0 * (g - v) / (g - 1.0)))


def local_dimension(energy: float, k: int, gamma) -> float:
    """Exact local scaling exponent of the spectral measure at `energy`.

    alpha(E) = 1 - log((4V - E^2)/(4 - E^2)) / log(gamma), defined for
    |E| < 2.  Positive inside the predicted window, zero at its endpoints,
    negative values outside the window signal the pure point regime.
    """
    g = _as_float_gamma(gamma)
    v = V(k)
    if not abs(energy) < 2.0:
        raise ValidationError("energy: local dimension needs |E| < 2")
    ratio = (4.0 * v - energy * energy) / (4.0 - energy * energy)
    return 1.0 - math.log(ratio) / math.log(g)


@dataclass(frozen=True)
class PhasePoint:
    """Classification of one energy for a (k, gamma) family.

    label is one of "sc" (inside the singular-continuous window, alpha
    set), "pp" (in [-2, 2] outside the closed window), "boundary" (at an
    endpoint, no prediction), or "outside" (|E| > 2).
    """

    energy: float
    k: int
    gamma: float
    label: str
    alpha: float | None

    def as_record(self) -> dict:
        return {
            "E": self.energy,
            "k": self.k,
            "gamma": self.gamma,
            "class": self.label,
            "alpha": self.alpha,
        }


def classify(energy: float, k: int, gamma) -> PhasePoint:
    """Place one energy in the predicted phase diagram."""
    g = _as_float_gamma(gamma)
    _check_k(k)
    window = interval_I(k, g)
    if abs(energy) > 2.0:
        return PhasePoint(energy, k, g, "outside", None)
    if window is None:
        return PhasePoint(energy, k, g, "pp", None)
    if window.is_boundary(energy):
        return PhasePoint(energy, k, g, "boundary", None)
    if window.contains(energy):
        return PhasePoint(energy, k, g, "sc", local_dimension(energy, k, g))
    return PhasePoint(energy, k, g, "pp", None)


def phase_diagram(k: int, gamma, energies: Sequence[float]) -> tuple[PhasePoint, ...]:
    return tuple(classify(e, k, gamma) for e in energies)


def corollary_check(k: int, gamma) -> bool:
    """Whether dimension >= 3 implies an empty singular-continuous window.

    Vacuously true when the theoretical dimension is below 3; otherwise
    requires interval_I to be empty.  Expected to hold on the whole
    gamma >= 4 grid.
    """
    g = _as_float_gamma(gamma)
    if g < 4.0:
        raise ValidationError("gamma: corollary check applies to gamma >= 4")
    if theoretical_dimension(k, g) < 3.0:
        return True
    return interval_I(k, g) is None


@dataclass(frozen=True)
class ExponentReport:
    """Monte Carlo estimate of the per-bump growth exponent.

    mean_y averages the per-bump kicks over all trials; std_error is the
    standard error of the per-trial means (None for fewer than 2 trials).
    slope is the pooled regression of accumulated log r against
    n * log(gamma), targeting Z / log(gamma); rms_residual measures the
    scatter around that line.
    """

    k: int
    gamma: float
    phi: float
    n_bumps: int
    trials: int
    seed: int
    z_predicted: float
    mean_y: float
    std_error: float | None
    deviation_sigmas: float | None
    slope: float
    slope_target: float
    slope_rel_error: float
    rms_residual: float
    trial_means: tuple[float, ...]


def mc_exponent(
    k: int,
    gamma,
    phi: float | None,
    n_bumps: int = 2000,
    trials: int = 20,
    seed: int = 0,
    pi_multiple: Fraction | str | None = None,
) -> ExponentReport:
    """Estimate the growth exponent from jittered random trees.

    Draws `trials` independent level-jittered trees (counter-split from
    `seed`), runs the phase flow across n_bumps branchings of each, and
    reports both estimators of the exponent: the sample mean of the
    per-bump kicks against the predicted Z, and the pooled regression
    slope of log r against n * log(gamma) against Z / log(gamma).

    Pass pi_multiple (e.g. "1/2" for a right angle) instead of a bare
    float to run at an exact rational multiple of pi: the phase advances
    are then reduced exactly, which preserves resonance effects a float
    angle would wash out at geometric depths.
    """
    g = _as_float_gamma(gamma)
    _check_k(k)
    if (phi is None) == (pi_multiple is None):
        raise ValidationError("phi: give exactly one of phi, pi_multiple")
    reducer = None
    if pi_multiple is not None:
        multiple = Fraction(pi_multiple)
        reducer = PhaseReducer.from_pi_multiple(multiple)
        phi = float(multiple) * math.pi
    if not 0.0 < phi < math.pi:
        raise ValidationError("phi: must lie strictly between 0 and pi")
    if n_bumps < 1:
        raise ValidationError("n_bumps: must be at least 1")
    if trials < 1:
        raise ValidationError("trials: must be at least 1")

    z = Z(phi, k)
    log_g = math.log(g)
    x = np.arange(n_bumps + 1, dtype=float) * log_g
    xc = x - x.mean()
    den = float(np.dot(xc, xc))
    trial_means: list[float] = []
    curves: list[np.ndarray] = []
    num = 0.0
    for trial in range(trials):
        spec, _ = sample_omega_tree(k=k, gamma=gamma, n_levels=n_bumps, seed=seed, trial=trial)
        trajectory = efgp_run(spec, phi, reducer=reducer)
        trial_means.append(trajectory.mean_y())
        curve = trajectory.log_r_array
        curves.append(curve)
        num += float(np.dot(xc, curve))

    slope = num / (den * trials)
    stacked = np.vstack(curves)
    intercept = float(stacked.mean()) - slope * float(x.mean())
    residuals = stacked - (intercept + slope * x)
    rms_residual = float(np.sqrt(np.mean(residuals**2)))

    means = np.asarray(trial_means)
    mean_y = float(means.mean())
    if trials >= 2:
        std_error = float(means.std(ddof=1) / math.sqrt(trials))
        deviation_sigmas = abs(mean_y - z) / std_error if std_error > 0.0 else math.inf
    else:
        std_error = None
        deviation_sigmas = None
    slope_target = z / log_g
    return ExponentReport(
        k=k,
        gamma=g,
        phi=phi,
        n_bumps=n_bumps,
        trials=trials,
        seed=seed,
        z_predicted=z,
        mean_y=mean_y,
        std_error=std_error,
        deviation_sigmas=deviation_sigmas,
        slope=slope,
        slope_target=slope_target,
        slope_rel_error=(slope - slope_target) / slope_target,
        rms_residual=rms_residual,
        trial_means=tuple(trial_means),
    )


@dataclass(frozen=True)
class TheoremReport:
    """Finite-horizon check of the unbounded-branching classification.

    factors_unbounded reports whether the branching factors trend upward
    over the horizon (nondecreasing with a net increase); epsilon_witness
    is the largest exponent margin epsilon such that the level gaps still
    dominate (product of factors)^(1 + epsilon) somewhere in the tail
    window (None when no gap exists).  When both conditions hold the
    prediction is purely singular continuous spectrum on (-2, 2);
    otherwise the classifier defers to the geometric-family phase
    predictions.  The dominating sequence is fixed to the branching
    factors themselves, the minimal admissible choice.
    """

    factors_unbounded: bool
    epsilon_witness: float | None
    gap_condition_holds: bool
    window_start: int
    prediction: str

    @property
    def holds(self) -> bool:
        return self.factors_unbounded and self.gap_condition_holds


PREDICTION_PURE_SC = "purely singular continuous on (-2, 2)"
PREDICTION_DEFERRED = "deferred to the geometric-family phase predictions"


def theorem_classifier(spec: TreeSpec) -> TheoremReport:
    """Check the two unbounded-branching conditions over the spec's horizon."""
    levels = spec.branch_levels
    factors = spec.branch_factors
    unbounded = len(factors) >= 2 and all(
        factors[i] <= factors[i + 1] for i in range(len(factors) - 1)
    ) and factors[-1] > factors[0]

    n_gaps = len(levels) - 1
    if n_gaps == 0:
        return TheoremReport(
            factors_unbounded=unbounded,
            epsilon_witness=None,
            gap_condition_holds=False,
            window_start=0,
            prediction=PREDICTION_DEFERRED,
        )
    window_start = max(1, n_gaps // 2)
    witness = -math.inf
    log_product = 0.0
    for n in range(1, n_gaps + 1):
        log_product += math.log(factors[n - 1])
        if n < window_start:
            continue
        gap = levels[n] - levels[n - 1]
        witness = max(witness, math.log(gap) / log_product - 1.0)
    gap_condition = witness > 0.0
    return TheoremReport(
        factors_unbounded=unbounded,
        epsilon_witness=witness,
        gap_condition_holds=gap_condition,
        window_start=window_start,
        prediction=PREDICTION_PURE_SC if (unbounded and gap_condition) else PREDICTION_DEFERRED,
    )


def pearson_density_proxy(
    spec: TreeSpec,
    phi_interval: tuple[float, float],
    n: int,
    nodes: int = 64,
    theta0: float = 0.0,
) -> float:
    """Quadrature of the inverse squared radius over a phase interval.

    Integrates 1 / r(L_n + 3)^2 in phi by Gauss-Legendre quadrature, one
    phase-flow run per node.  This is the finite-scale stand-in for the
    spectral measure's weight on the interval's energy image; n = 0 skips
    every bump and recovers the free value, the plain interval length.
    """
    lo, hi = phi_interval
    if not (0.0 < lo < hi < math.pi):
        raise ValidationError("phi_interval: need 0 < lo < hi < pi")
    if not 0 <= n <= len(spec.branch_levels):
        raise ValidationError("n: must be between 0 and the number of branchings")
    if nodes < 1:
        raise ValidationError("nodes: must be at least 1")
    points, weights = np.polynomial.legendre.leggauss(nodes)
    scaled = 0.5 * (hi - lo) * points + 0.5 * (hi + lo)
    half_width = 0.5 * (hi - lo)
    total = 0.0
    for w, phi in zip(weights, scaled):
        if n == 0:
            integrand = 1.0
        else:
            trajectory = efgp_run(spec, float(phi), theta0=theta0, n_bumps=n)
            integrand = math.exp(-2.0 * trajectory.checkpoints[-1].log_r)
        total += float(w) * integrand
    return half_width * total


def essential_spectrum_coverage(
    spec: TreeSpec,
    depth: int,
    eps: float,
    grid_points: int = 1000,
) -> float:
    """Fraction of a [-2, 2] grid within eps of the root block's spectrum.

    Diagonalizes the depth-truncated root Jacobi block (adjacency variant)
    and reports how much of the interval its eigenvalues cover at
    resolution eps.  Approaches 1 as the depth grows, which is the
    finite-size shadow of the essential spectrum being all of [-2, 2].
    """
    if depth > _BLOCK_DEPTH_GUARD:
        raise GuardError(
            f"depth {depth} exceeds the truncated-block solver guard ({_BLOCK_DEPTH_GUARD})"
        )
    if eps <= 0.0:
        raise ValidationError("eps: must be positive")
    if grid_points < 2:
        raise ValidationError("grid_points: need at least 2")
    block = truncated_block(spec, 0, depth, variant=ADJACENCY)
    eigenvalues = eigenvalues_sym(block)
    grid = np.linspace(-2.0, 2.0, grid_points)
    idx = np.searchsorted(eigenvalues, grid)
    left = eigenvalues[np.clip(idx - 1, 0, eigenvalues.size - 1)]
    right = eigenvalues[np.clip(idx, 0, eigenvalues.size - 1)]
    distance = np.minimum(np.abs(grid - left), np.abs(grid - right))
    return float(np.mean(distance <= eps))
