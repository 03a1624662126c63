"""Truncated Fock-space simulator of the interferometer.

Brute-force oracle for the closed forms in :mod:`uil.analytic`: states
are complex amplitude arrays over number states ``|0> .. |n_max>`` per
mode, beam splitters are matrix exponentials of the quadratic mode
generator, and probe-arm attenuation is realized exactly as a beam
splitter coupling to a discarded vacuum ancilla (the non-unitary
shortcut used by the closed forms only works for coherent beams; the
dilation works for any state).

Dense linear algebra throughout; the largest object is the d^2 x d^2
two-mode unitary with d = n_max + 1.  Truncation is surfaced, never
hidden: coherent states are not renormalized, constructing one with too
much Poisson weight beyond the cutoff raises :class:`TruncationError`,
and simulations emit :class:`TruncationWarning` when the retained edge
of the basis picks up population.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple
import warnings

import numpy as np
from scipy import stats

from .modes import INPUT_MODE, PROBE_MODE
from .params import InterferometerParams

DEFAULT_TAIL_TOL = 1e-10
DEFAULT_EDGE_TOL = 1e-8

__all__ = [
    "FockCutoff",
    "TruncationError",
    "TruncationWarning",
    "TwoModeState",
    "ModeOperatorMatrix",
    "SimulationMoments",
    "coherent_state",
    "required_cutoff",
    "mode_operators",
    "number_operator",
    "beam_splitter_unitary",
    "phase_unitary",
    "loss_channel",
    "apply_beam_splitter",
    "mode_number_moments",
    "edge_mass",
    "difference_observable",
    "simulate",
]


class TruncationError(Exception):
    """Raised when a state cannot be represented at the requested cutoff."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required_cutoff = required


class TruncationWarning(UserWarning):
    """Emitted when basis-edge population makes results untrustworthy."""


@dataclass(frozen=True)
class FockCutoff:
    """Highest retained photon number per mode."""

    n_max: int

    def __post_init__(self) -> None:
        if not isinstance(self.n_max, int) or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def dim(self) -> int:
        return self.n_max + 1


def as_cutoff(cutoff: FockCutoff | int) -> FockCutoff:
    return cutoff if isinstance(cutoff, FockCutoff) else FockCutoff(int(cutoff))


def required_cutoff(alpha: complex, tail_tol: float = DEFAULT_TAIL_TOL) -> int:
    """Smallest n_max whose Poisson tail mass is below ``tail_tol``."""
    mean = abs(alpha) ** 2
    if mean == 0.0:
        return 1
    n = max(1, int(mean))
    while stats.poisson.sf(n, mean) >= tail_tol:
        n += 1
    return n


def coherent_state(
    alpha: complex,
    cutoff: FockCutoff | int,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> np.ndarray:
    """Number-basis amplitudes of a coherent state, truncated at the cutoff.

    Coefficients are exp(-|alpha|^2/2) * alpha^n / sqrt(n!), computed by
    the stable recurrence and deliberately *not* renormalized: the norm
    deficit is the truncation error.  Raises :class:`TruncationError`
    when the Poisson weight beyond n_max reaches ``tail_tol``.
    """
    cutoff = as_cutoff(cutoff)
    alpha = complex(alpha)
    mean = abs(alpha) ** 2
    tail = float(stats.poisson.sf(cutoff.n_max, mean)) if mean > 0.0 else 0.0
    if tail >= tail_tol:
        needed = required_cutoff(alpha, tail_tol)
        raise TruncationError(
            f"coherent state with |alpha|^2 = {mean:.6g} keeps tail mass "
            f"{tail:.3e} beyond n_max = {cutoff.n_max} (tolerance {tail_tol:.1e}); "
            f"use n_max >= {needed}",
            required=needed,
        )
    amplitudes = np.zeros(cutoff.dim, dtype=complex)
    amplitudes[0] = math.exp(-0.5 * mean)
    for n in range(1, cutoff.dim):
        amplitudes[n] = amplitudes[n - 1] * alpha / math.sqrt(n)
    return amplitudes


def mode_operators(cutoff: FockCutoff | int) -> tuple[np.ndarray, np.ndarray]:
    """Single-mode annihilation and creation matrices (a|n> = sqrt(n)|n-1>)."""
    d = as_cutoff(cutoff).dim
    lowering = np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1).astype(complex)
    return lowering, lowering.conj().T


def number_operator(cutoff: FockCutoff | int) -> np.ndarray:
    d = as_cutoff(cutoff).dim
    return np.diag(np.arange(d, dtype=float)).astype(complex)


@dataclass(frozen=True)
class ModeOperatorMatrix:
    """Operator on the truncated basis, tagged with what it represents.

    ``entries`` is either a d^2 x d^2 two-mode matrix or a d x d
    single-mode factor together with the acting ``mode``.  Matrices of
    kind ``unitary`` must pass the unitarity check on construction.
    """

    entries: np.ndarray
    kind: str
    mode: int | None = None

    _KINDS = frozenset({"annihilation", "creation", "number", "unitary", "general"})

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.kind == "unitary" and self.unitarity_defect() >= 1e-12:
            raise ValueError(
                f"matrix tagged unitary has unitarity defect {self.unitarity_defect():.3e}"
            )

    def unitarity_defect(self) -> float:
        m = self.entries
        return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


class SimulationMoments(NamedTuple):
    mean_O: float
    std_O: float
    probe_intensity: float
    probe_std: float


@dataclass(frozen=True)
class TwoModeState:
    """Pure state of the two interferometer modes.

    ``amplitudes`` has length d^2, indexed by n_a * d + n_b (mode a =
    reference arm first, mode b = probe arm second).
    """

    amplitudes: np.ndarray
    cutoff: FockCutoff

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (self.cutoff.dim**2,):
            raise ValueError(
                f"amplitude vector must have length {self.cutoff.dim**2}, "
                f"got shape {self.amplitudes.shape}"
            )

    @classmethod
    def from_single_modes(
        cls, mode_a: np.ndarray, mode_b: np.ndarray, cutoff: FockCutoff | int
    ) -> "TwoModeState":
        cutoff = as_cutoff(cutoff)
        if mode_a.shape != (cutoff.dim,) or mode_b.shape != (cutoff.dim,):
            raise ValueError("single-mode vectors do not match the cutoff dimension")
        return cls(np.outer(mode_a, mode_b).ravel(), cutoff)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def as_matrix(self) -> np.ndarray:
        d = self.cutoff.dim
        return self.amplitudes.reshape(d, d)

    def edge_mass(self) -> float:
        return edge_mass(self.as_matrix())

    def apply(self, unitary: np.ndarray) -> "TwoModeState":
        return TwoModeState(unitary @ self.amplitudes, self.cutoff)

    def expectation(self, operator: np.ndarray) -> complex:
        return complex(self.amplitudes.conj() @ (operator @ self.amplitudes))


@functools.lru_cache(maxsize=3)
def _splitter_eigensystem(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigensystem of the Hermitian generator of the two-mode splitter.

    The splitter is exp(theta * (a†b - ab†)); diagonalizing
    H = i(a†b - ab†) once per cutoff lets every angle be applied as two
    matrix-vector products in the eigenbasis.
    """
    lowering = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    eye = np.eye(dim, dtype=complex)
    mode_a = np.kron(lowering, eye)
    mode_b = np.kron(eye, lowering)
    generator = mode_a.conj().T @ mode_b - mode_a @ mode_b.conj().T
    evals, evecs = np.linalg.eigh(1j * generator)
    return evals, evecs


def beam_splitter_unitary(theta: float, cutoff: FockCutoff | int) -> np.ndarray:
    """Dense two-mode splitter unitary exp(theta * (a†b - ab†)).

    In the Heisenberg picture U† a U = cos(theta) a + sin(theta) b and
    U† b U = -sin(theta) a + cos(theta) b, i.e. mode amplitudes mix by
    the same 2x2 rotation as in the closed-form model.
    """
    if not math.isfinite(theta):
        raise ValueError(f"mixing angle must be finite, got {theta!r}")
    d = as_cutoff(cutoff).dim
    evals, evecs = _splitter_eigensystem(d)
    return (evecs * np.exp(-1j * theta * evals)) @ evecs.conj().T


def apply_beam_splitter(
    psi: np.ndarray, theta: float, axes: tuple[int, int]
) -> np.ndarray:
    """Apply the two-mode splitter to one pair of axes of a state array.

    Works for any state rank; never materializes an operator larger
    than d^2 x d^2.
    """
    d = psi.shape[axes[0]]
    if psi.shape[axes[1]] != d:
        raise ValueError("both axes of the splitter pair must have equal dimension")
    evals, evecs = _splitter_eigensystem(d)
    moved = np.moveaxis(psi, axes, (0, 1))
    flat = moved.reshape(d * d, -1)
    flat = evecs @ (np.exp(-1j * theta * evals)[:, None] * (evecs.conj().T @ flat))
    return np.moveaxis(flat.reshape(moved.shape), (0, 1), axes)


def phase_unitary(
    phi: float, cutoff: FockCutoff | int, mode: int = PROBE_MODE
) -> np.ndarray:
    """Dense two-mode unitary exp(-i*phi*n) on one mode (probe by default).

    Diagonal in the number basis; sends a coherent amplitude beta to
    exp(-i*phi)*beta.
    """
    d = as_cutoff(cutoff).dim
    numbers = np.arange(d, dtype=float)
    occupation = {0: np.repeat(numbers, d), 1: np.tile(numbers, d)}[mode]
    return np.diag(np.exp(-1j * phi * occupation))


def loss_channel(
    kappa: float, cutoff: FockCutoff | int
) -> Callable[[np.ndarray, int], np.ndarray]:
    """Attenuation channel of amplitude transmission exp(-kappa).

    Returns a transformer ``channel(psi, axis)`` that appends a vacuum
    ancilla axis and couples it to ``axis`` through a beam splitter of
    transmission cos(theta) = exp(-kappa).  Expectation values on the
    original modes then realize the attenuated (trace-preserving,
    completely positive) dynamics exactly, for any input state.
    """
    if not (math.isfinite(kappa) and kappa >= 0.0):
        raise ValueError(f"kappa must be finite and >= 0, got {kappa!r}")
    cutoff = as_cutoff(cutoff)
    theta_loss = math.acos(math.exp(-kappa))

    def channel(psi: np.ndarray, axis: int = -1) -> np.ndarray:
        psi = np.asarray(psi, dtype=complex)
        axis = axis % psi.ndim
        with_ancilla = np.zeros(psi.shape + (cutoff.dim,), dtype=complex)
        with_ancilla[..., 0] = psi
        if theta_loss == 0.0:
            return with_ancilla
        return apply_beam_splitter(with_ancilla, theta_loss, axes=(axis, psi.ndim))

    return channel


def mode_number_moments(psi: np.ndarray, axis: int) -> tuple[float, float]:
    """Mean and standard deviation of the photon number on one axis."""
    probabilities = np.abs(psi) ** 2
    other_axes = tuple(i for i in range(psi.ndim) if i != axis)
    marginal = probabilities.sum(axis=other_axes)
    numbers = np.arange(marginal.size, dtype=float)
    mean = float(numbers @ marginal)
    second = float((numbers**2) @ marginal)
    return mean, math.sqrt(max(second - mean**2, 0.0))


def edge_mass(psi: np.ndarray) -> float:
    """Probability mass with any retained mode at its highest number state."""
    probabilities = np.abs(psi) ** 2
    interior = probabilities[tuple(slice(0, -1) for _ in range(psi.ndim))]
    return float(probabilities.sum() - interior.sum())


def difference_observable(cutoff: FockCutoff | int) -> np.ndarray:
    """Dense photon-number difference n_b - n_a on the two-mode basis."""
    d = as_cutoff(cutoff).dim
    number = number_operator(cutoff)
    eye = np.eye(d, dtype=complex)
    return np.kron(eye, number) - np.kron(number, eye)


def simulate(
    params: InterferometerParams,
    cutoff: FockCutoff | int,
    tail_tol: float = DEFAULT_TAIL_TOL,
    edge_tol: float = DEFAULT_EDGE_TOL,
) -> SimulationMoments:
    """Propagate the input state through the full network and measure.

    Pipeline: splitter(theta1), probe-arm statistics, probe phase,
    attenuation via the vacuum-ancilla dilation when kappa > 0,
    splitter(theta2), then mean and standard deviation of the detector
    difference signal n_b - n_a.

    Emits :class:`TruncationWarning` (with the measured edge mass) when
    population reaches the basis edge.
    """
    cutoff = as_cutoff(cutoff)
    d = cutoff.dim
    drive = coherent_state(params.alpha, cutoff, tail_tol=tail_tol)
    vacuum = np.zeros(d, dtype=complex)
    vacuum[0] = 1.0
    inputs = [vacuum, vacuum]
    inputs[INPUT_MODE] = drive
    psi = np.outer(inputs[0], inputs[1])

    psi = apply_beam_splitter(psi, params.theta1, axes=(0, 1))
    probe_intensity, probe_std = mode_number_moments(psi, axis=PROBE_MODE)

    phases = np.exp(-1j * params.phi * np.arange(d))
    psi = psi * (phases if PROBE_MODE == 1 else phases[:, None])
    if params.kappa > 0.0:
        psi = loss_channel(params.kappa, cutoff)(psi, axis=PROBE_MODE)
    psi = apply_beam_splitter(psi, params.theta2, axes=(0, 1))

    leaked = edge_mass(psi)
    if leaked >= edge_tol:
        warnings.warn(
            f"edge population {leaked:.3e} exceeds {edge_tol:.1e}; "
            f"increase the cutoff (n_max = {cutoff.n_max})",
            TruncationWarning,
            stacklevel=2,
        )

    probabilities = np.abs(psi) ** 2
    numbers = np.arange(d, dtype=float)
    weights = numbers[None, :] - numbers[:, None]  # n_b - n_a
    while weights.ndim < psi.ndim:
        weights = weights[..., None]
    mean = float((weights * probabilities).sum())
    second = float((weights**2 * probabilities).sum())
    return SimulationMoments(
        mean_O=mean,
        std_O=math.sqrt(max(second - mean**2, 0.0)),
        probe_intensity=probe_intensity,
        probe_std=probe_std,
    )
