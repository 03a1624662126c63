"""Closed-form model of the intensity-unbalanced two-path interferometer.

Every function here is a pure function of an operating point.  The
conventions (which arm is the probe, where the phase and the loss act)
come from :mod:`uil.modes`; the truncated Fock-space engine in
:mod:`uil.fock` implements the same network independently and is used by
the test suite to cross-check every formula in this module.

Scalar functions take an :class:`~uil.params.InterferometerParams`;
the ``*_values`` kernels broadcast over numpy arrays and back the sweep
and optimizer layers.
"""

from __future__ import annotations

import math

import numpy as np

from .modes import INPUT_MODE, mirror_factors
from .params import InterferometerParams, OutputAmplitudes, PerformanceMetrics

__all__ = [
    "beam_splitter_matrix",
    "output_amplitudes",
    "probe_arm_stats",
    "mean_difference_signal",
    "difference_signal_phase_gradient",
    "std_difference_signal",
    "phase_resolution",
    "intensity_performance_ratio",
    "fluctuation_performance_ratio",
    "visibility",
    "evaluate_metrics",
    "phase_resolution_values",
    "intensity_ratio_values",
    "fluctuation_ratio_values",
]


def beam_splitter_matrix(theta: float) -> np.ndarray:
    """Return the 2x2 rotation mixing the two path amplitudes.

    ``[[cos, sin], [-sin, cos]]``; orthogonal with determinant 1, and
    ``cos(theta)**2`` / ``sin(theta)**2`` are the transmitted/reflected
    intensity fractions.
    """
    if not math.isfinite(theta):
        raise ValueError(f"mixing angle must be finite, got {theta!r}")
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def output_amplitudes(params: InterferometerParams) -> OutputAmplitudes:
    """Coherent amplitudes at the two detectors.

    Splitter, probe-arm phase/attenuation, mixer, applied to the input
    amplitude vector (coherent drive in one port, vacuum in the other):

        a3 = cos(t2)*(cos(t1)*alpha) + e^(-i*phi-kappa)*sin(t2)*(-sin(t1)*alpha)
        b3 = -sin(t2)*(cos(t1)*alpha) + e^(-i*phi-kappa)*cos(t2)*(-sin(t1)*alpha)

    With kappa = 0 the map is unitary and |a3|^2 + |b3|^2 = |alpha|^2.
    """
    vec = np.zeros(2, dtype=complex)
    vec[INPUT_MODE] = params.alpha
    vec = beam_splitter_matrix(params.theta1) @ vec
    vec = mirror_factors(params.phi, params.kappa) * vec
    vec = beam_splitter_matrix(params.theta2) @ vec
    return OutputAmplitudes(a3=complex(vec[0]), b3=complex(vec[1]))


def probe_arm_stats(params: InterferometerParams) -> tuple[float, float]:
    """Mean photon number and its standard deviation in the probe arm.

    Evaluated between the first splitter and the mirror, so independent
    of ``phi``, ``kappa`` and ``theta2``.  Coherent light is Poissonian:
    the fluctuation is the square root of the intensity.
    """
    intensity = abs(params.alpha) ** 2 * math.sin(params.theta1) ** 2
    return intensity, abs(params.alpha * math.sin(params.theta1))


def mean_difference_signal(params: InterferometerParams) -> float:
    """Expected photon-number difference between the two detectors.

    For the lossless interferometer this is the trigonometric polynomial

        |alpha|^2 * [4 sin(t2) cos(t1) cos(t2) sin(t1) cos(phi) - 1
                     + 2 cos(t1)^2 - 4 cos(t2)^2 cos(t1)^2 + 2 cos(t2)^2]

    and with loss it is computed as |b3|^2 - |a3|^2 of the attenuated
    output amplitudes.
    """
    if params.kappa == 0.0:
        c1, c2 = math.cos(params.theta1), math.cos(params.theta2)
        s1, s2 = math.sin(params.theta1), math.sin(params.theta2)
        poly = (
            4.0 * s2 * c1 * c2 * s1 * math.cos(params.phi)
            - 1.0
            + 2.0 * c1 * c1
            - 4.0 * c2 * c2 * c1 * c1
            + 2.0 * c2 * c2
        )
        return abs(params.alpha) ** 2 * poly
    out = output_amplitudes(params)
    return abs(out.b3) ** 2 - abs(out.a3) ** 2


def difference_signal_phase_gradient(params: InterferometerParams) -> float:
    """d<difference signal>/d(phi), used by :func:`phase_resolution`."""
    return (
        -abs(params.alpha) ** 2
        * math.exp(-params.kappa)
        * math.sin(2.0 * params.theta1)
        * math.sin(2.0 * params.theta2)
        * math.sin(params.phi)
    )


def std_difference_signal(params: InterferometerParams) -> float:
    """Standard deviation of the detector difference signal.

    The output state is a product of coherent beams, so the variance is
    the sum of the two output intensities (independent Poisson counts).
    Lossless this equals |alpha| for any angles.
    """
    return math.sqrt(output_amplitudes(params).total_intensity)


def phase_resolution(params: InterferometerParams) -> float:
    """Smallest resolvable phase shift (noise over signal gradient).

        sqrt(cos(2 t1) (e^(2 kappa) - 1) + e^(2 kappa) + 1)
        / (sqrt(2) |alpha sin(2 t1) sin(2 t2) sin(phi)| * eta)

    At kappa = 0 the numerator is sqrt(2) and this reduces to
    1 / |alpha sin(2 t1) sin(2 t2) sin(phi)|.  Detector efficiency
    inflates the resolvable angle by 1/eta, which makes both
    performance ratios scale linearly with eta.

    Returns ``inf`` when the operating point has no phase sensitivity
    (any of the sine factors or |alpha| vanishing); that is not an
    error, callers must handle it.
    """
    return float(
        phase_resolution_values(
            params.theta1,
            params.theta2,
            params.phi,
            params.kappa,
            params.eta,
            abs(params.alpha),
        )
    )


def intensity_performance_ratio(params: InterferometerParams) -> float:
    """Inverse of (phase resolution x probe intensity).

    Extended-real contract: 0 when the resolution is infinite, ``inf``
    in the formally unbounded regime of zero probe intensity at finite
    resolution.  Lossless closed form:
    |sin(2 t1) sin(2 t2) sin(phi)| / (|alpha| sin(t1)^2).
    """
    return float(
        intensity_ratio_values(
            params.theta1,
            params.theta2,
            params.phi,
            params.kappa,
            params.eta,
            abs(params.alpha),
        )
    )


def fluctuation_performance_ratio(params: InterferometerParams) -> float:
    """Inverse of (phase resolution x probe intensity fluctuation).

    Independent of |alpha| and equal to
    |sin(2 t1) sin(2 t2) sin(phi)| / |sin(t1)| when lossless.  The
    sin(2 t1)/sin(t1) kink at theta1 = 0 is removable (equal to
    2 cos(t1)), and the implementation uses that continuous form, so
    the theta1 -> 0 homodyne-like limit evaluates to its limit value
    rather than 0/0.  Scales linearly with detector efficiency.
    """
    return float(
        fluctuation_ratio_values(
            params.theta1,
            params.theta2,
            params.phi,
            params.kappa,
            params.eta,
        )
    )


def visibility(params: InterferometerParams) -> float:
    """Fringe contrast (Imax - Imin)/(Imax + Imin) of one detector.

    The detected intensity is harmonic in the swept phase, so the
    extrema are analytic; ``params.phi`` is ignored.  Written so that a
    balanced lossless interferometer gives exactly 1, and zero input
    gives 0.
    """
    if abs(params.alpha) == 0.0:
        return 0.0
    t = params.transmission
    c1, s1 = math.cos(params.theta1), math.sin(params.theta1)
    c2, s2 = math.cos(params.theta2), math.sin(params.theta2)
    oscillation = 2.0 * t * abs(s1 * c1 * s2 * c2)
    # Imax + Imin = 2*(s2^2 c1^2 + t^2 c2^2 s1^2); rewriting it as
    # oscillation + (|s2 c1| - t|c2 s1|)^2 (per unit |alpha|^2, halved)
    # avoids cancellation and is exact at the balanced point.
    mismatch = (abs(s2 * c1) - t * abs(c2 * s1)) ** 2
    total = oscillation + mismatch
    if total == 0.0:
        return 0.0
    return oscillation / total


def evaluate_metrics(params: InterferometerParams) -> PerformanceMetrics:
    """Bundle every derived scalar at one operating point."""
    intensity, std_intensity = probe_arm_stats(params)
    return PerformanceMetrics(
        mean_O=mean_difference_signal(params),
        std_O=std_difference_signal(params),
        delta_phi=phase_resolution(params),
        intensity_probe=intensity,
        std_intensity_probe=std_intensity,
        rho_intensity=intensity_performance_ratio(params),
        rho_fluctuation=fluctuation_performance_ratio(params),
        visibility=visibility(params),
    )


# Vectorized kernels.  These are the single source of truth for the
# resolution and ratio formulas; the scalar API wraps them.

def phase_resolution_values(theta1, theta2, phi, kappa, eta=1.0, alpha_abs=1.0):
    """Broadcasting version of :func:`phase_resolution`."""
    theta1, theta2, phi, kappa = np.broadcast_arrays(
        *(np.asarray(x, dtype=float) for x in (theta1, theta2, phi, kappa))
    )
    growth = np.exp(2.0 * kappa)
    numerator = np.sqrt(np.cos(2.0 * theta1) * (growth - 1.0) + growth + 1.0)
    sensitivity = np.abs(np.sin(2.0 * theta1) * np.sin(2.0 * theta2) * np.sin(phi))
    denominator = math.sqrt(2.0) * alpha_abs * eta * sensitivity
    with np.errstate(divide="ignore"):
        return np.where(denominator == 0.0, np.inf, numerator / np.where(denominator == 0.0, 1.0, denominator))


def intensity_ratio_values(theta1, theta2, phi, kappa, eta=1.0, alpha_abs=1.0):
    """Broadcasting version of :func:`intensity_performance_ratio`."""
    resolution = phase_resolution_values(theta1, theta2, phi, kappa, eta, alpha_abs)
    intensity = alpha_abs**2 * np.sin(np.asarray(theta1, dtype=float)) ** 2
    intensity = np.broadcast_to(intensity, resolution.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = 1.0 / (resolution * intensity)
    return np.where(np.isinf(resolution), 0.0, np.where(intensity == 0.0, np.inf, raw))


def fluctuation_ratio_values(theta1, theta2, phi, kappa, eta=1.0):
    """Broadcasting version of :func:`fluctuation_performance_ratio`."""
    theta1, theta2, phi, kappa = np.broadcast_arrays(
        *(np.asarray(x, dtype=float) for x in (theta1, theta2, phi, kappa))
    )
    growth = np.exp(2.0 * kappa)
    numerator = 2.0 * math.sqrt(2.0) * np.abs(
        np.cos(theta1) * np.sin(2.0 * theta2) * np.sin(phi)
    )
    denominator = np.sqrt(np.cos(2.0 * theta1) * (growth - 1.0) + growth + 1.0)
    return eta * numerator / denominator
