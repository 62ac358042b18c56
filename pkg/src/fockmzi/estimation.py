"""Phase-sensitivity evaluation, Fisher-information cross-checks, seeded
outcome sampling, and Bayesian post-processing.

The central quantity is the error-propagation sensitivity
delta_phi = sqrt(Var A) / |d<A>/dphi|, with the derivative taken exactly as
the expectation of i[A, G] for the phase generator G, never by finite
differences (those are kept as a test oracle only).
"""

import math
from dataclasses import dataclass

import numpy as np

from .elements import FixedStage, InterferometerPipeline
from .fock import (
    BlockObservable,
    BlockUnitary,
    TwoModeState,
    expectation,
    variance,
)
from .states import SchemeTag

DERIVATIVE_FLOOR = 1e-14
PROBABILITY_FLOOR = 1e-15
_ENSEMBLE_SIN_TOL = 1e-12


class NoPhaseInformationError(RuntimeError):
    """Raised when a sensitivity curve is divergent at every grid point."""


class ModelMismatchError(RuntimeError):
    """Raised when observed outcomes have zero likelihood everywhere on the grid."""


@dataclass(frozen=True)
class SensitivityCurve:
    """Sampled map phi -> delta_phi for one scheme/observable pair."""

    scheme: SchemeTag | None
    observable_name: str
    phi_grid: np.ndarray
    delta_phi: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.phi_grid, dtype=float)
        vals = np.asarray(self.delta_phi, dtype=float)
        if grid.ndim != 1 or grid.size == 0 or vals.shape != grid.shape:
            raise ValueError("phi grid and delta-phi values must be matching 1-d arrays")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("phi grid must be strictly increasing")
        if np.any(vals <= 0):
            raise ValueError("delta-phi entries must be positive or +inf")
        grid.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "phi_grid", grid)
        object.__setattr__(self, "delta_phi", vals)


@dataclass(frozen=True)
class OutcomeHistogram:
    """Counts of measured (n_a, n_b) outcomes from one seeded sampling run."""

    phi_true: float
    shots: int
    counts: dict[tuple[int, int], int]
    seed: int

    def __post_init__(self):
        if any(c < 0 for c in self.counts.values()):
            raise ValueError("counts must be nonnegative")
        total = sum(self.counts.values())
        if total != self.shots:
            raise ValueError(f"counts sum to {total}, expected {self.shots}")


@dataclass(frozen=True)
class PosteriorDistribution:
    """Normalized posterior weights over a phase grid covering one period."""

    phi_grid: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.phi_grid, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if grid.shape != w.shape or grid.ndim != 1:
            raise ValueError("grid and weights must be matching 1-d arrays")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-10:
            raise ValueError(f"weights sum to {w.sum()}, expected 1 within 1e-10")
        grid.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "phi_grid", grid)
        object.__setattr__(self, "weights", w)


def observable_noon_flip(n: int) -> BlockObservable:
    """The two-entry flip observable |N,0><0,N| + |0,N><N,0| on block N."""
    if n < 1:
        raise ValueError(f"flip observable needs n >= 1, got {n}")
    mat = np.zeros((n + 1, n + 1), dtype=np.complex128)
    mat[0, n] = 1.0
    mat[n, 0] = 1.0
    return BlockObservable({n: mat})


def noon_readout(n: int, cutoff: int) -> BlockUnitary:
    """Rotation taking the flip-observable eigenbasis to the number basis.

    On block N it acts as a Hadamard on span{|N,0>, |0,N>} and as identity on
    the rest; every other block is untouched.  Number-resolved detection after
    this stage realizes the flip measurement as a two-outcome coarse-graining.
    """
    if n < 1 or n > cutoff:
        raise ValueError(f"readout needs 1 <= n <= cutoff, got n={n}, cutoff={cutoff}")
    blocks = {m: np.eye(m + 1, dtype=np.complex128) for m in range(cutoff + 1)}
    h = np.eye(n + 1, dtype=np.complex128)
    r = 1.0 / math.sqrt(2.0)
    h[0, 0], h[0, n], h[n, 0], h[n, n] = r, r, r, -r
    blocks[n] = h
    return BlockUnitary(blocks)


def noon_readout_stage(n: int) -> FixedStage:
    return FixedStage("noon-readout", lambda cutoff: noon_readout(n, cutoff))


def phase_derivative(state: TwoModeState, observable: BlockObservable, generator: BlockObservable) -> float:
    """Exact d<A>/dphi for evolution exp(i phi G): the expectation of i[A, G]."""
    val = 0j
    for n, vec in state.blocks.items():
        a = observable.blocks.get(n)
        g = generator.blocks.get(n)
        if a is None or g is None:
            continue
        val += 1j * (np.vdot(vec, a @ (g @ vec)) - np.vdot(vec, g @ (a @ vec)))
    return float(val.real)


def sensitivity(state: TwoModeState, observable: BlockObservable, generator: BlockObservable) -> float:
    """Error-propagation phase uncertainty sqrt(Var A) / |d<A>/dphi|.

    The state must already be evolved to the working phase.  Divergence is a
    value, not an error: +inf is returned when the derivative magnitude falls
    below 1e-14.
    """
    deriv = abs(phase_derivative(state, observable, generator))
    if deriv < DERIVATIVE_FLOOR:
        return math.inf
    return math.sqrt(variance(observable, state)) / deriv


def sensitivity_curve(
    pipeline: InterferometerPipeline,
    input_state: TwoModeState,
    observable: BlockObservable,
    phi_grid,
    scheme: SchemeTag | None = None,
    observable_name: str = "",
) -> SensitivityCurve:
    """Pointwise sensitivity of the pipeline output over a phase grid."""
    grid = np.asarray(phi_grid, dtype=float)
    gen = pipeline.output_generator(input_state.cutoff)
    vals = np.array([sensitivity(pipeline.evolve(input_state, phi), observable, gen) for phi in grid])
    return SensitivityCurve(scheme, observable_name, grid, vals)


def min_sensitivity(curve: SensitivityCurve) -> tuple[float, float]:
    """Grid point with the smallest finite delta-phi; divergent points are skipped."""
    finite = np.isfinite(curve.delta_phi)
    if not finite.any():
        raise NoPhaseInformationError("sensitivity is divergent at every grid point")
    idx = np.argmin(np.where(finite, curve.delta_phi, math.inf))
    return float(curve.phi_grid[idx]), float(curve.delta_phi[idx])


def ensemble_sensitivity(n: int, phi: float) -> float:
    """Shot-noise uncertainty of N independent single-particle trials.

    The product-state model gives mean N cos(phi) and variance N sin^2(phi),
    so the sin(phi) factors cancel symbolically and the result is exactly
    1/sqrt(N) wherever the derivative does not vanish.
    """
    if n < 1:
        raise ValueError(f"trial count must be >= 1, got {n}")
    if abs(math.sin(phi)) <= _ENSEMBLE_SIN_TOL:
        return math.inf
    return 1.0 / math.sqrt(n)


def output_distribution(pipeline: InterferometerPipeline, input_state: TwoModeState, phi: float) -> dict[tuple[int, int], float]:
    """Number-resolved outcome probabilities of the evolved state, in canonical order."""
    return pipeline.evolve(input_state, phi).probabilities()


def classical_fisher(pipeline: InterferometerPipeline, input_state: TwoModeState, phi: float, dphi: float = 1e-5) -> float:
    """Fisher information of the output number distribution at phi.

    The derivative of each outcome probability is taken by central difference
    at step dphi; outcomes with probability below 1e-15 are skipped.
    """
    if dphi <= 0:
        raise ValueError(f"dphi must be positive, got {dphi}")
    center = output_distribution(pipeline, input_state, phi)
    plus = output_distribution(pipeline, input_state, phi + dphi)
    minus = output_distribution(pipeline, input_state, phi - dphi)
    info = 0.0
    for outcome, p in center.items():
        if p < PROBABILITY_FLOOR:
            continue
        slope = (plus.get(outcome, 0.0) - minus.get(outcome, 0.0)) / (2.0 * dphi)
        info += slope * slope / p
    return info


def sample_outcomes(
    pipeline: InterferometerPipeline,
    input_state: TwoModeState,
    phi: float,
    shots: int,
    seed: int,
) -> OutcomeHistogram:
    """Draw i.i.d. (n_a, n_b) outcomes from the exact output distribution.

    Probabilities below 1e-15 are zeroed (and the rest renormalized) before
    sampling, so interference nulls never fire.  Identical seeds give
    identical histograms; any 64-bit integer (signed or not) is a valid seed.
    """
    if shots < 0:
        raise ValueError(f"shots must be nonnegative, got {shots}")
    dist = output_distribution(pipeline, input_state, phi)
    labels = list(dist)
    probs = np.array([dist[k] for k in labels], dtype=float)
    probs[probs < PROBABILITY_FLOOR] = 0.0
    probs /= probs.sum()
    rng = np.random.default_rng(seed & 0xFFFF_FFFF_FFFF_FFFF)
    drawn = rng.multinomial(shots, probs) if shots else np.zeros(len(labels), dtype=int)
    counts = {lab: int(c) for lab, c in zip(labels, drawn) if c > 0}
    return OutcomeHistogram(phi_true=phi, shots=shots, counts=counts, seed=seed)


def bayes_posterior(
    hist: OutcomeHistogram,
    pipeline: InterferometerPipeline,
    input_state: TwoModeState,
    phi_grid,
) -> PosteriorDistribution:
    """Grid posterior over the phase given one histogram of outcomes.

    Uniform prior times the product of per-outcome likelihoods, accumulated in
    log space so large shot counts cannot underflow.  The grid should cover
    one period of the scheme's likelihood.
    """
    grid = np.asarray(phi_grid, dtype=float)
    observed = list(hist.counts.items())
    log_like = np.zeros(grid.size)
    for i, phi in enumerate(grid):
        dist = output_distribution(pipeline, input_state, phi)
        total = 0.0
        for outcome, count in observed:
            p = dist.get(outcome, 0.0)
            if p <= 0.0:
                total = -math.inf
                break
            total += count * math.log(p)
        log_like[i] = total
    peak = np.max(log_like)
    if not np.isfinite(peak):
        raise ModelMismatchError("observed outcomes have zero likelihood everywhere on the grid")
    weights = np.exp(log_like - peak)
    weights /= weights.sum()
    return PosteriorDistribution(grid, weights)


def _grid_period(grid: np.ndarray) -> float:
    # grid samples one period without a duplicated endpoint
    return float(grid[-1] - grid[0] + (grid[-1] - grid[0]) / (grid.size - 1))


def posterior_mean(posterior: PosteriorDistribution) -> float:
    """Circular mean of the posterior, mapped back into the grid's period."""
    grid, w = posterior.phi_grid, posterior.weights
    period = _grid_period(grid)
    angles = 2.0 * math.pi * (grid - grid[0]) / period
    mean_angle = math.atan2(float(np.sum(w * np.sin(angles))), float(np.sum(w * np.cos(angles))))
    return grid[0] + (mean_angle % (2.0 * math.pi)) * period / (2.0 * math.pi)


def posterior_std(posterior: PosteriorDistribution) -> float:
    """Standard deviation about the circular mean, with wrap-safe distances."""
    grid, w = posterior.phi_grid, posterior.weights
    period = _grid_period(grid)
    dev = grid - posterior_mean(posterior)
    dev = (dev + period / 2.0) % period - period / 2.0
    return math.sqrt(float(np.sum(w * dev * dev)))


def scaling_fit(points) -> tuple[float, float]:
    """Least-squares line through (log n, log value); returns (slope, intercept)."""
    pts = list(points)
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points, got {len(pts)}")
    ns = np.array([p[0] for p in pts], dtype=float)
    vals = np.array([p[1] for p in pts], dtype=float)
    if np.any(ns <= 0) or np.any(vals <= 0):
        raise ValueError("scaling fit needs positive sizes and values")
    slope, intercept = np.polyfit(np.log(ns), np.log(vals), 1)
    return float(slope), float(intercept)
