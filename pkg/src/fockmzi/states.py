"""Factories for the interferometer input states, plus the scheme tag they travel under."""

import math
from dataclasses import dataclass

import numpy as np

from .fock import TwoModeState, make_basis_state

SCHEME_NAMES = (
    "single-port-fock",
    "coherent",
    "dual-fock",
    "noon",
    "yurke-fermionic-analog",
    "yurke-bosonic",
)

_SQRT_HALF = 1.0 / math.sqrt(2.0)


class TruncationError(ValueError):
    """Raised when a Fock cutoff discards more probability mass than allowed."""

    def __init__(self, message: str, required_cutoff: int, tail_mass: float):
        super().__init__(message)
        self.required_cutoff = required_cutoff
        self.tail_mass = tail_mass


@dataclass(frozen=True)
class SchemeTag:
    """Canonical name + size of one input scheme, as used by the CLI."""

    name: str
    n: int
    extra: tuple[float, ...] = ()

    def __post_init__(self):
        if self.name not in SCHEME_NAMES:
            raise ValueError(f"unknown scheme {self.name!r}, expected one of {SCHEME_NAMES}")
        if self.n < 0:
            raise ValueError(f"scheme size must be nonnegative, got {self.n}")
        if self.name == "yurke-fermionic-analog" and self.n % 2 == 0:
            raise ValueError(f"yurke-fermionic-analog needs odd n, got {self.n}")
        if self.name == "yurke-bosonic" and (self.n % 2 == 1 or self.n == 0):
            raise ValueError(f"yurke-bosonic needs positive even n, got {self.n}")
        if self.name == "noon" and self.n < 1:
            raise ValueError(f"noon needs n >= 1, got {self.n}")


def single_port_fock(n: int, cutoff: int) -> TwoModeState:
    """All N photons in port A, vacuum in port B."""
    return make_basis_state(n, 0, cutoff)


def dual_fock(n: int, cutoff: int) -> TwoModeState:
    """Twin Fock input |N>_A |N>_B."""
    if 2 * n > cutoff:
        raise ValueError(f"dual Fock state with n={n} needs cutoff >= {2 * n}, got {cutoff}")
    return make_basis_state(n, n, cutoff)


def noon(n: int, phi: float, cutoff: int) -> TwoModeState:
    """Path-entangled (|N,0> + e^{iN phi}|0,N>)/sqrt(2)."""
    if n < 1:
        raise ValueError(f"noon state needs n >= 1, got {n}")
    if n > cutoff:
        raise ValueError(f"noon state with n={n} needs cutoff >= {n}, got {cutoff}")
    vec = np.zeros(n + 1, dtype=np.complex128)
    vec[0] = _SQRT_HALF
    vec[n] = _SQRT_HALF * np.exp(1j * n * phi)
    return TwoModeState(cutoff, {n: vec})


def yurke_fermionic_analog(n: int, cutoff: int) -> TwoModeState:
    """Near-balanced pair (|(N+1)/2,(N-1)/2> + |(N-1)/2,(N+1)/2>)/sqrt(2); N odd."""
    if n % 2 == 0 or n < 1:
        raise ValueError(f"fermionic-analog state needs positive odd n, got {n}")
    if n > cutoff:
        raise ValueError(f"state with n={n} photons needs cutoff >= {n}, got {cutoff}")
    hi, lo = (n + 1) // 2, (n - 1) // 2
    vec = np.zeros(n + 1, dtype=np.complex128)
    vec[lo] = _SQRT_HALF  # (hi, lo)
    vec[hi] = _SQRT_HALF  # (lo, hi)
    return TwoModeState(cutoff, {n: vec})


def yurke_bosonic(n: int, cutoff: int) -> TwoModeState:
    """Bosonic variant (|N/2,N/2> + |N/2+1,N/2-1>)/sqrt(2); N even and positive."""
    if n % 2 == 1 or n < 2:
        raise ValueError(f"bosonic variant needs positive even n, got {n}")
    if n > cutoff:
        raise ValueError(f"state with n={n} photons needs cutoff >= {n}, got {cutoff}")
    half = n // 2
    vec = np.zeros(n + 1, dtype=np.complex128)
    vec[half] = _SQRT_HALF  # (half, half)
    vec[half - 1] = _SQRT_HALF  # (half + 1, half - 1)
    return TwoModeState(cutoff, {n: vec})


def coherent_tail_mass(alpha: complex, cutoff: int) -> float:
    """Probability mass of the Poisson photon distribution beyond the cutoff."""
    lam = abs(alpha) ** 2
    term = math.exp(-lam)
    cum = term
    for k in range(1, cutoff + 1):
        term *= lam / k
        cum += term
    return max(0.0, 1.0 - cum)


def required_coherent_cutoff(alpha: complex, tail_tol: float, hard_cap: int = 100_000) -> int:
    """Smallest cutoff whose truncated Poisson tail is below tail_tol."""
    lam = abs(alpha) ** 2
    term = math.exp(-lam)
    cum = term
    k = 0
    while 1.0 - cum >= tail_tol:
        k += 1
        if k > hard_cap:
            raise ValueError(f"no cutoff below {hard_cap} reaches tail tolerance {tail_tol}")
        term *= lam / k
        cum += term
    return k


def coherent_vacuum(alpha: complex, cutoff: int, tail_tol: float = 1e-12) -> TwoModeState:
    """Coherent state in port A, vacuum in port B, truncated and renormalized.

    The discarded tail mass must stay below tail_tol; otherwise a
    TruncationError carrying the required cutoff is raised.  Use
    coherent_tail_mass() to inspect the mass actually dropped.
    """
    tail = coherent_tail_mass(alpha, cutoff)
    if tail >= tail_tol:
        needed = required_coherent_cutoff(alpha, tail_tol)
        raise TruncationError(
            f"cutoff {cutoff} keeps tail mass {tail:.3e} >= {tail_tol:.1e}; need cutoff >= {needed}",
            required_cutoff=needed,
            tail_mass=tail,
        )
    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    term = complex(math.exp(-abs(alpha) ** 2 / 2.0))
    amps[0] = term
    for k in range(1, cutoff + 1):
        term *= alpha / math.sqrt(k)
        amps[k] = term
    amps /= np.linalg.norm(amps)
    blocks = {}
    for k in range(cutoff + 1):
        vec = np.zeros(k + 1, dtype=np.complex128)
        vec[0] = amps[k]  # photon count k all in mode a
        blocks[k] = vec
    return TwoModeState(cutoff, blocks)
