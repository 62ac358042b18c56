"""Deposition-rate curves, fringe-period extraction, and the beam-splitter
N00N-fidelity sweep."""

import math
from dataclasses import dataclass

import numpy as np

from .elements import _jx_eigensystem
from .fock import make_basis_state

KINDS = ("single", "classical-two-photon", "noon")


class InsufficientGridError(ValueError):
    """Raised when a curve grid resolves fewer than two fringe maxima."""


@dataclass(frozen=True)
class DepositionCurve:
    """Position-dependent absorption rate on the substrate, one exposure kind."""

    kind: str
    n: int
    x_grid: np.ndarray
    rate: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x_grid, dtype=float)
        r = np.asarray(self.rate, dtype=float)
        if x.shape != r.shape or x.ndim != 1:
            raise ValueError("x grid and rate must be matching 1-d arrays")
        if np.any(r < 0):
            raise ValueError("deposition rate must be nonnegative")
        x.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "x_grid", x)
        object.__setattr__(self, "rate", r)


def deposition_rate(kind: str, n: int, x_grid, wavelength: float) -> DepositionCurve:
    """Deposition rate over x, with the substrate position parametrized as
    phi = pi x / wavelength.

    'single' gives 1 + cos(phi); 'classical-two-photon' its square; 'noon'
    gives 1 + cos(N phi), the N-fold fringe compression of path-entangled
    exposure.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}, expected one of {KINDS}")
    if wavelength <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    if kind == "noon" and n < 1:
        raise ValueError(f"noon exposure needs n >= 1, got {n}")
    x = np.asarray(x_grid, dtype=float)
    phi = math.pi * x / wavelength
    if kind == "single":
        rate = 1.0 + np.cos(phi)
    elif kind == "classical-two-photon":
        rate = (1.0 + np.cos(phi)) ** 2
    else:
        rate = 1.0 + np.cos(n * phi)
    rate = np.maximum(rate, 0.0)  # clip -0.0-scale roundoff at the nulls
    return DepositionCurve(kind=kind, n=n if kind == "noon" else 1, x_grid=x, rate=rate)


def fringe_period(curve: DepositionCurve) -> float:
    """Mean distance between adjacent fringe maxima.

    Interior local maxima are refined by a three-point quadratic fit; the grid
    must span at least two full periods (>= 64 points each) so that two or
    more maxima exist.
    """
    x, r = curve.x_grid, curve.rate
    peaks = []
    for i in range(1, x.size - 1):
        if r[i] >= r[i - 1] and r[i] > r[i + 1]:
            denom = r[i - 1] - 2.0 * r[i] + r[i + 1]
            if denom >= 0.0:
                continue
            offset = 0.5 * (r[i - 1] - r[i + 1]) / denom
            peaks.append(x[i] + offset * (x[i + 1] - x[i]))
    if len(peaks) < 2:
        raise InsufficientGridError(f"found {len(peaks)} maxima; the grid must span at least two periods")
    return float(np.mean(np.diff(peaks)))


def noon_fidelity(out_state, n: int) -> float:
    """Phase-free overlap with the N00N family: (|c_{N,0}| + |c_{0,N}|)^2 / 2."""
    top = abs(out_state.amplitude(n, 0))
    bottom = abs(out_state.amplitude(0, n))
    return (top + bottom) ** 2 / 2.0


def noon_fidelity_sweep(n_a: int, n_b: int, theta_grid) -> tuple[float, float]:
    """Best N00N fidelity reachable from |n_a, n_b> with one beam splitter.

    Sweeps the splitter angle over the grid and returns (best_theta,
    best_fidelity).  The splitter action is evaluated from the cached J_x
    eigensystem, so dense angle grids stay cheap.
    """
    if n_a < 0 or n_b < 0 or n_a + n_b < 1:
        raise ValueError(f"need at least one photon, got ({n_a}, {n_b})")
    n = n_a + n_b
    thetas = np.asarray(theta_grid, dtype=float)
    w, v = _jx_eigensystem(n)
    source = v.conj().T @ make_basis_state(n_a, n_b, n).blocks[n]
    edges = v[[0, n], :] * source[None, :]
    # amplitudes on |N,0> and |0,N> for every theta at once
    amps = edges @ np.exp(1j * np.outer(w, thetas))
    fidelity = (np.abs(amps[0]) + np.abs(amps[1])) ** 2 / 2.0
    best = int(np.argmax(fidelity))
    return float(thetas[best]), float(fidelity[best])
