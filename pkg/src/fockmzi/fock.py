"""Two-mode bosonic Fock space: states, Schwinger operators, exact unitaries.

Basis states are occupation pairs (n_a, n_b).  Everything is stored per
fixed-total-photon-number block: block n covers {|n,0>, |n-1,1>, ..., |0,n>}
in descending n_a order, so number-conserving unitaries are block diagonal
and can be exponentiated exactly by Hermitian eigendecomposition.
"""

import math
from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-12
_VARIANCE_CLAMP = 1e-12

J_AXES = ("x", "y", "z", "squared")
NUMBER_MODES = ("a", "b", "total")


def block_labels(n: int) -> list[tuple[int, int]]:
    """Occupation pairs (n_a, n_b) of block n in storage order (descending n_a)."""
    return [(n - i, i) for i in range(n + 1)]


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TwoModeState:
    """Pure two-mode state held as one dense amplitude vector per populated block.

    Blocks absent from the map are exactly zero; number-conserving unitaries
    never create them, so unpopulated blocks stay zero by construction.
    """

    cutoff: int
    blocks: dict[int, np.ndarray]

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError(f"cutoff must be nonnegative, got {self.cutoff}")
        clean = {}
        for n in sorted(self.blocks):
            if not 0 <= n <= self.cutoff:
                raise ValueError(f"populated block {n} outside cutoff {self.cutoff}")
            vec = np.asarray(self.blocks[n])
            if vec.shape != (n + 1,):
                raise ValueError(f"block {n} needs {n + 1} amplitudes, got shape {vec.shape}")
            clean[n] = _frozen(vec)
        object.__setattr__(self, "blocks", clean)

    def amplitude(self, n_a: int, n_b: int) -> complex:
        if n_a < 0 or n_b < 0 or n_a + n_b > self.cutoff:
            raise ValueError(f"occupation ({n_a}, {n_b}) outside cutoff {self.cutoff}")
        vec = self.blocks.get(n_a + n_b)
        return 0j if vec is None else complex(vec[n_b])

    def norm(self) -> float:
        return math.sqrt(sum(float(np.vdot(v, v).real) for v in self.blocks.values()))

    def probabilities(self) -> dict[tuple[int, int], float]:
        """Outcome probabilities |amplitude|^2 over all populated basis states."""
        probs = {}
        for n, vec in self.blocks.items():
            for (n_a, n_b), amp in zip(block_labels(n), vec):
                probs[(n_a, n_b)] = float(abs(amp)) ** 2
        return probs


@dataclass(frozen=True)
class BlockObservable:
    """Hermitian operator stored per total-photon-number block; absent blocks are zero."""

    blocks: dict[int, np.ndarray]

    def __post_init__(self):
        clean = {}
        for n in sorted(self.blocks):
            mat = np.asarray(self.blocks[n])
            if mat.shape != (n + 1, n + 1):
                raise ValueError(f"block {n} must be {n + 1}x{n + 1}, got {mat.shape}")
            if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL:
                raise ValueError(f"block {n} is not Hermitian within {HERMITIAN_TOL}")
            clean[n] = _frozen(mat)
        object.__setattr__(self, "blocks", clean)

    def block(self, n: int) -> np.ndarray | None:
        return self.blocks.get(n)


@dataclass(frozen=True)
class BlockUnitary:
    """Number-conserving unitary stored per total-photon-number block."""

    blocks: dict[int, np.ndarray]

    def __post_init__(self):
        clean = {}
        for n in sorted(self.blocks):
            mat = np.asarray(self.blocks[n])
            if mat.shape != (n + 1, n + 1):
                raise ValueError(f"block {n} must be {n + 1}x{n + 1}, got {mat.shape}")
            if np.max(np.abs(mat.conj().T @ mat - np.eye(n + 1))) > UNITARY_TOL:
                raise ValueError(f"block {n} is not unitary within {UNITARY_TOL}")
            clean[n] = _frozen(mat)
        object.__setattr__(self, "blocks", clean)


def make_basis_state(n_a: int, n_b: int, cutoff: int) -> TwoModeState:
    """Single Fock basis state |n_a, n_b>."""
    if n_a < 0 or n_b < 0 or n_a + n_b > cutoff:
        raise ValueError(f"occupation ({n_a}, {n_b}) violates 0 <= n_a, n_b and n_a + n_b <= {cutoff}")
    vec = np.zeros(n_a + n_b + 1, dtype=np.complex128)
    vec[n_b] = 1.0
    return TwoModeState(cutoff, {n_a + n_b: vec})


def _cross_ladder(n: int) -> np.ndarray:
    # a†b on block n: takes (n_a, n_b) to (n_a+1, n_b-1) with weight sqrt((n_a+1) n_b)
    mat = np.zeros((n + 1, n + 1), dtype=np.complex128)
    for i in range(1, n + 1):
        mat[i - 1, i] = math.sqrt((n - i + 1) * i)
    return mat


def build_j_operator(axis: str, n: int) -> np.ndarray:
    """One fixed-n block of a Schwinger angular-momentum operator.

    'x', 'y', 'z' give J_x = (a†b + b†a)/2, J_y = -i(a†b - b†a)/2 and
    J_z = (a†a - b†b)/2 with standard bosonic ladder matrix elements;
    'squared' gives J_x^2 + J_y^2 + J_z^2.
    """
    if n < 0:
        raise ValueError(f"block index must be nonnegative, got {n}")
    if axis == "z":
        return np.diag([(n - 2 * i) / 2.0 for i in range(n + 1)]).astype(np.complex128)
    if axis in ("x", "y"):
        up = _cross_ladder(n)
        down = up.conj().T
        return (up + down) / 2.0 if axis == "x" else -0.5j * (up - down)
    if axis == "squared":
        jx, jy, jz = (build_j_operator(a, n) for a in ("x", "y", "z"))
        return jx @ jx + jy @ jy + jz @ jz
    raise ValueError(f"unknown axis {axis!r}, expected one of {J_AXES}")


def j_observable(axis: str, cutoff: int) -> BlockObservable:
    """Schwinger operator assembled over every block up to the cutoff."""
    return BlockObservable({n: build_j_operator(axis, n) for n in range(cutoff + 1)})


def number_observable(mode: str, cutoff: int) -> BlockObservable:
    """Photon-number operator for mode 'a', mode 'b', or 'total'."""
    if mode not in NUMBER_MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {NUMBER_MODES}")
    blocks = {}
    for n in range(cutoff + 1):
        if mode == "a":
            diag = [n - i for i in range(n + 1)]
        elif mode == "b":
            diag = list(range(n + 1))
        else:
            diag = [n] * (n + 1)
        blocks[n] = np.diag(diag).astype(np.complex128)
    return BlockObservable(blocks)


def spectral_exponential(observable: BlockObservable, scale: float) -> BlockUnitary:
    """exp(i * scale * H) per block, via eigendecomposition of the Hermitian block."""
    blocks = {}
    for n, mat in observable.blocks.items():
        w, v = np.linalg.eigh(mat)
        blocks[n] = (v * np.exp(1j * scale * w)) @ v.conj().T
    return BlockUnitary(blocks)


def apply(unitary: BlockUnitary, state: TwoModeState) -> TwoModeState:
    """Per-block matrix-vector product; preserves the norm and the populated blocks."""
    out = {}
    for n, vec in state.blocks.items():
        mat = unitary.blocks.get(n)
        if mat is None:
            raise ValueError(f"unitary has no block for total photon number {n} (cutoff mismatch)")
        out[n] = mat @ vec
    return TwoModeState(state.cutoff, out)


def expectation(observable: BlockObservable, state: TwoModeState) -> float:
    """<s|A|s>; the imaginary part (below 1e-12 for Hermitian A) is discarded."""
    val = 0j
    for n, vec in state.blocks.items():
        mat = observable.blocks.get(n)
        if mat is not None:
            val += np.vdot(vec, mat @ vec)
    return float(val.real)


def variance(observable: BlockObservable, state: TwoModeState) -> float:
    """<A^2> - <A>^2, evaluated as ||(A - <A>)|s>||^2 and clamped at zero.

    The residual form avoids the cancellation of the textbook difference of
    moments near eigenstates, where <A^2> and <A>^2 nearly coincide.
    """
    mean = expectation(observable, state)
    total = 0.0
    for n, vec in state.blocks.items():
        mat = observable.blocks.get(n)
        resid = (mat @ vec - mean * vec) if mat is not None else (-mean) * vec
        total += float(np.vdot(resid, resid).real)
    if -_VARIANCE_CLAMP < total < 0.0:
        return 0.0
    return total
