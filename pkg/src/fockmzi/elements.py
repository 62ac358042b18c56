"""Optical elements and interferometer pipelines built from block unitaries."""

import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Callable

import numpy as np

from .fock import (
    BlockObservable,
    BlockUnitary,
    TwoModeState,
    apply,
    build_j_operator,
    j_observable,
    number_observable,
)

BALANCED = math.pi / 2  # splitter angle of the 50/50 beam splitter

ONE_ARM = "one-arm"
SYMMETRIC = "symmetric"
CONVENTIONS = (ONE_ARM, SYMMETRIC)


@lru_cache(maxsize=None)
def _jx_eigensystem(n: int) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(build_j_operator("x", n))
    w.setflags(write=False)
    v.setflags(write=False)
    return w, v


def beam_splitter(theta: float, cutoff: int) -> BlockUnitary:
    """Beam splitter exp(i theta J_x); theta = pi/2 is the 50/50 splitter.

    Identical to spectral_exponential(j_observable('x', cutoff), theta); the
    J_x eigensystem is cached per block since it does not depend on theta.
    """
    blocks = {}
    for n in range(cutoff + 1):
        w, v = _jx_eigensystem(n)
        blocks[n] = (v * np.exp(1j * theta * w)) @ v.conj().T
    return BlockUnitary(blocks)


def phase_shifter(phi: float, convention: str, cutoff: int) -> BlockUnitary:
    """Phase shifter: exp(i phi J_z) for 'symmetric', exp(i phi n_b) for 'one-arm'."""
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}, expected one of {CONVENTIONS}")
    blocks = {}
    for n in range(cutoff + 1):
        n_b = np.arange(n + 1)
        exponent = n_b if convention == ONE_ARM else (n / 2.0 - n_b)
        blocks[n] = np.diag(np.exp(1j * phi * exponent))
    return BlockUnitary(blocks)


def compose(*unitaries: BlockUnitary) -> BlockUnitary:
    """Compose unitaries listed in application order (first applied first)."""
    if not unitaries:
        raise ValueError("need at least one unitary")
    keys = set(unitaries[0].blocks)
    for u in unitaries[1:]:
        if set(u.blocks) != keys:
            raise ValueError("unitaries cover different blocks")
    blocks = {n: reduce(lambda acc, u: u.blocks[n] @ acc, unitaries[1:], unitaries[0].blocks[n]) for n in keys}
    return BlockUnitary(blocks)


def mach_zehnder(phi: float, convention: str = ONE_ARM, invert_second_bs: bool = False, cutoff: int = 0) -> BlockUnitary:
    """Full interferometer BS . PS(phi) . BS, optionally with the second splitter inverted."""
    second = -BALANCED if invert_second_bs else BALANCED
    return compose(
        beam_splitter(BALANCED, cutoff),
        phase_shifter(phi, convention, cutoff),
        beam_splitter(second, cutoff),
    )


@dataclass(frozen=True)
class SplitterStage:
    theta: float

    def unitary(self, phi: float, cutoff: int) -> BlockUnitary:
        return beam_splitter(self.theta, cutoff)


@dataclass(frozen=True)
class PhaseSlot:
    """The stage that receives the swept phase; also owns its generator."""

    convention: str = ONE_ARM

    def unitary(self, phi: float, cutoff: int) -> BlockUnitary:
        return phase_shifter(phi, self.convention, cutoff)

    def generator(self, cutoff: int) -> BlockObservable:
        if self.convention == ONE_ARM:
            return number_observable("b", cutoff)
        return j_observable("z", cutoff)


@dataclass(frozen=True)
class FixedStage:
    """A phase-independent custom element, e.g. a diagnostic readout rotation."""

    name: str
    build: Callable[[int], BlockUnitary]

    def unitary(self, phi: float, cutoff: int) -> BlockUnitary:
        return self.build(cutoff)


@dataclass(frozen=True)
class InterferometerPipeline:
    """Ordered stages with exactly one PhaseSlot receiving the swept phase."""

    stages: tuple

    def __post_init__(self):
        slots = [i for i, s in enumerate(self.stages) if isinstance(s, PhaseSlot)]
        if len(slots) != 1:
            raise ValueError(f"pipeline needs exactly one PhaseSlot, found {len(slots)}")
        object.__setattr__(self, "stages", tuple(self.stages))

    @property
    def phase_slot(self) -> int:
        return next(i for i, s in enumerate(self.stages) if isinstance(s, PhaseSlot))

    def unitary(self, phi: float, cutoff: int) -> BlockUnitary:
        return compose(*(stage.unitary(phi, cutoff) for stage in self.stages))

    def evolve(self, state: TwoModeState, phi: float) -> TwoModeState:
        for stage in self.stages:
            state = apply(stage.unitary(phi, state.cutoff), state)
        return state

    def output_generator(self, cutoff: int) -> BlockObservable:
        """Phase-slot generator conjugated into the output frame.

        With U_after the composed stages downstream of the slot, the evolved
        output state obeys d|psi>/dphi = i (U_after G U_after†) |psi>, so the
        returned observable drives exact phase derivatives of expectations.
        """
        gen = self.stages[self.phase_slot].generator(cutoff)
        after = self.stages[self.phase_slot + 1 :]
        if not after:
            return gen
        u_after = compose(*(stage.unitary(0.0, cutoff) for stage in after))
        blocks = {}
        for n, g in gen.blocks.items():
            u = u_after.blocks[n]
            m = u @ g @ u.conj().T
            blocks[n] = (m + m.conj().T) / 2.0  # re-hermitize roundoff
        return BlockObservable(blocks)


def mach_zehnder_pipeline(convention: str = ONE_ARM, invert_second_bs: bool = False) -> InterferometerPipeline:
    second = -BALANCED if invert_second_bs else BALANCED
    return InterferometerPipeline((SplitterStage(BALANCED), PhaseSlot(convention), SplitterStage(second)))


def phase_only_pipeline(convention: str = ONE_ARM) -> InterferometerPipeline:
    """Bare phase accumulation, for states injected past the first splitter."""
    return InterferometerPipeline((PhaseSlot(convention),))
