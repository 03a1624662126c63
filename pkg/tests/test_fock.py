import math

import numpy as np
import pytest
from scipy import stats

from uil.analytic import (
    evaluate_metrics,
    mean_difference_signal,
    output_amplitudes,
    probe_arm_stats,
    std_difference_signal,
)
from uil.fock import (
    FockCutoff,
    ModeOperatorMatrix,
    TruncationError,
    TruncationWarning,
    TwoModeState,
    apply_beam_splitter,
    beam_splitter_unitary,
    coherent_state,
    difference_observable,
    edge_mass,
    loss_channel,
    mode_number_moments,
    mode_operators,
    number_operator,
    phase_unitary,
    required_cutoff,
    simulate,
)
from uil.params import InterferometerParams


def vacuum(dim):
    vec = np.zeros(dim, dtype=complex)
    vec[0] = 1.0
    return vec


# cutoff and coherent states


def test_cutoff_validation():
    assert FockCutoff(5).dim == 6
    for bad in (0, -1, 2.5):
        with pytest.raises(ValueError):
            FockCutoff(bad)


def test_vacuum_coherent_state_is_exact():
    state = coherent_state(0.0, 8)
    assert state[0] == 1.0
    assert np.linalg.norm(state) == 1.0


def test_coherent_coefficients_against_factorial_formula():
    alpha = 0.9 - 0.4j
    state = coherent_state(alpha, 20)
    for n in range(21):
        direct = (
            math.exp(-0.5 * abs(alpha) ** 2) * alpha**n / math.sqrt(math.factorial(n))
        )
        assert state[n] == pytest.approx(direct, abs=1e-15)


def test_coherent_mean_photon_number():
    state = coherent_state(1.0, 30)
    probabilities = np.abs(state) ** 2
    mean = np.arange(31) @ probabilities
    # independent oracle: truncated Poisson sum
    oracle = sum(n * stats.poisson.pmf(n, 1.0) for n in range(31))
    assert mean == pytest.approx(oracle, abs=1e-12)
    assert mean == pytest.approx(1.0, abs=1e-10)


def test_coherent_variance_is_mean():
    state = coherent_state(2.0, 40)
    mean, std = mode_number_moments(state, axis=0)
    assert std**2 == pytest.approx(4.0, abs=1e-8)
    assert mean == pytest.approx(4.0, abs=1e-8)


def test_coherent_norm_tracks_truncation():
    state = coherent_state(2.0, 40)
    assert 1.0 - 1e-10 <= np.linalg.norm(state) <= 1.0 + 1e-15


def test_coherent_tail_failure_raises_with_estimate():
    with pytest.raises(TruncationError) as err:
        coherent_state(3.0, 10)
    assert err.value.required_cutoff is not None
    needed = err.value.required_cutoff
    assert stats.poisson.sf(needed, 9.0) < 1e-10
    assert stats.poisson.sf(needed - 1, 9.0) >= 1e-10
    coherent_state(3.0, needed)  # now fits


def test_required_cutoff_zero_amplitude():
    assert required_cutoff(0.0) == 1


# ladder operators


def test_mode_operators_basics():
    lowering, raising = mode_operators(6)
    assert np.all(lowering @ vacuum(7) == 0.0)
    np.testing.assert_array_equal(raising, lowering.conj().T)
    for n in range(6):
        assert lowering[n, n + 1] == pytest.approx(math.sqrt(n + 1))
    number = raising @ lowering
    np.testing.assert_allclose(number, number_operator(6))
    np.testing.assert_allclose(number.diagonal().real, np.arange(7))


def test_truncated_commutator():
    n_max = 9
    lowering, raising = mode_operators(n_max)
    commutator = lowering @ raising - raising @ lowering
    diag = commutator.diagonal().real
    np.testing.assert_allclose(diag[:-1], np.ones(n_max), atol=1e-14)
    # the single deviation of the truncated algebra sits at the edge state
    assert diag[-1] == pytest.approx(-n_max)


# beam splitter unitary


def test_splitter_unitary_identity_at_zero():
    np.testing.assert_allclose(beam_splitter_unitary(0.0, 4), np.eye(25), atol=1e-14)


@pytest.mark.parametrize("n_max", [6, 25])
@pytest.mark.parametrize("theta", [0.3, math.pi / 4, 1.2])
def test_splitter_unitarity(n_max, theta):
    u = beam_splitter_unitary(theta, n_max)
    defect = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    assert defect < 1e-12


def test_splitter_inverse_by_negation():
    u = beam_splitter_unitary(0.7, 6) @ beam_splitter_unitary(-0.7, 6)
    np.testing.assert_allclose(u, np.eye(49), atol=1e-13)


def test_splitter_single_photon_action():
    d = 7
    one_photon_a = np.zeros(d, dtype=complex)
    one_photon_a[1] = 1.0
    state = TwoModeState.from_single_modes(one_photon_a, vacuum(d), 6)
    rotated = state.apply(beam_splitter_unitary(math.pi / 4, 6)).amplitudes.reshape(d, d)
    # |1,0> -> cos|1,0> - sin|0,1>
    assert rotated[1, 0] == pytest.approx(math.sqrt(0.5), abs=1e-13)
    assert rotated[0, 1] == pytest.approx(-math.sqrt(0.5), abs=1e-13)
    assert np.sum(np.abs(rotated) ** 2) == pytest.approx(1.0, abs=1e-13)


def test_splitter_heisenberg_consistency():
    n_max, theta = 10, 0.9
    d = n_max + 1
    u = beam_splitter_unitary(theta, n_max)
    lowering, _ = mode_operators(n_max)
    eye = np.eye(d, dtype=complex)
    mode_a, mode_b = np.kron(lowering, eye), np.kron(eye, lowering)
    transformed = u.conj().T @ mode_a @ u
    expected = math.cos(theta) * mode_a + math.sin(theta) * mode_b
    totals = np.add.outer(np.arange(d), np.arange(d)).ravel()
    keep = totals < n_max
    block = np.ix_(keep, keep)
    assert np.max(np.abs(transformed[block] - expected[block])) < 1e-10


def test_splitter_coherent_covariance():
    # splitting a coherent state yields the product of rotated amplitudes
    alpha, theta, n_max = 1.2 + 0.3j, 0.8, 25
    d = n_max + 1
    state = TwoModeState.from_single_modes(coherent_state(alpha, n_max), vacuum(d), n_max)
    split = state.apply(beam_splitter_unitary(theta, n_max))
    target = TwoModeState.from_single_modes(
        coherent_state(math.cos(theta) * alpha, n_max),
        coherent_state(-math.sin(theta) * alpha, n_max),
        n_max,
    )
    overlap = abs(np.vdot(target.amplitudes, split.amplitudes)) ** 2
    assert overlap >= 1.0 - 1e-10


def test_apply_beam_splitter_rejects_mismatched_axes():
    with pytest.raises(ValueError):
        apply_beam_splitter(np.zeros((3, 4), dtype=complex), 0.3, axes=(0, 1))


# phase unitary


def test_phase_identity_at_zero():
    np.testing.assert_allclose(phase_unitary(0.0, 5), np.eye(36), atol=1e-15)


def test_phase_flips_single_photon():
    d = 6
    state = TwoModeState.from_single_modes(vacuum(d), np.eye(d, dtype=complex)[1], 5)
    flipped = state.apply(phase_unitary(math.pi, 5))
    np.testing.assert_allclose(flipped.amplitudes, -state.amplitudes, atol=1e-15)


def test_phase_rotates_coherent_amplitude():
    n_max = 25
    d = n_max + 1
    state = TwoModeState.from_single_modes(vacuum(d), coherent_state(1.0, n_max), n_max)
    rotated = state.apply(phase_unitary(math.pi / 2, n_max))
    target = TwoModeState.from_single_modes(
        vacuum(d), coherent_state(-1.0j, n_max), n_max
    )
    assert np.max(np.abs(rotated.amplitudes - target.amplitudes)) < 1e-10


def test_phase_unitary_acts_on_requested_mode():
    d = 4
    one_a = np.eye(d, dtype=complex)[1]
    state = TwoModeState.from_single_modes(one_a, vacuum(d), 3)
    on_probe = state.apply(phase_unitary(1.0, 3, mode=1))
    np.testing.assert_allclose(on_probe.amplitudes, state.amplitudes)
    on_reference = state.apply(phase_unitary(1.0, 3, mode=0))
    np.testing.assert_allclose(
        on_reference.amplitudes, np.exp(-1j) * state.amplitudes, atol=1e-15
    )


# loss channel


def test_loss_identity_channel():
    channel = loss_channel(0.0, 12)
    state = coherent_state(0.7, 12)
    dilated = channel(state, axis=0)
    np.testing.assert_allclose(dilated[:, 0], state)
    assert np.max(np.abs(dilated[:, 1:])) == 0.0


def test_loss_attenuates_mean_photon_number():
    channel = loss_channel(math.log(2.0), 20)
    dilated = channel(coherent_state(1.0, 20), axis=0)
    mean, _ = mode_number_moments(dilated, axis=0)
    assert mean == pytest.approx(0.25, abs=1e-10)


def test_loss_keeps_vacuum():
    channel = loss_channel(0.8, 6)
    dilated = channel(vacuum(7), axis=0)
    assert abs(dilated[0, 0]) == pytest.approx(1.0, abs=1e-14)
    assert np.sum(np.abs(dilated) ** 2) == pytest.approx(1.0, abs=1e-14)


def test_loss_preserves_norm():
    channel = loss_channel(0.5, 18)
    state = coherent_state(1.5, 18)
    dilated = channel(state, axis=0)
    assert np.linalg.norm(dilated) == pytest.approx(np.linalg.norm(state), abs=1e-13)


def test_loss_rejects_negative_kappa():
    with pytest.raises(ValueError):
        loss_channel(-0.1, 5)


# state and operator containers


def test_two_mode_state_shape_checked():
    with pytest.raises(ValueError):
        TwoModeState(np.zeros(7, dtype=complex), FockCutoff(2))


def test_edge_mass_flags_edge_population():
    d = 5
    psi = np.zeros((d, d), dtype=complex)
    psi[d - 1, 0] = 1.0
    assert edge_mass(psi) == 1.0
    psi = np.zeros((d, d), dtype=complex)
    psi[1, 1] = 1.0
    assert edge_mass(psi) == 0.0


def test_difference_observable_expectation():
    d = 4
    one_b = np.eye(d, dtype=complex)[1]
    state = TwoModeState.from_single_modes(vacuum(d), one_b, 3)
    value = state.expectation(difference_observable(3))
    assert value.real == pytest.approx(1.0)
    assert value.imag == pytest.approx(0.0)


def test_operator_matrix_kinds_and_unitarity_gate():
    u = ModeOperatorMatrix(beam_splitter_unitary(0.4, 4), "unitary")
    assert u.unitarity_defect() < 1e-12
    lowering, _ = mode_operators(4)
    ModeOperatorMatrix(lowering, "annihilation", mode=0)
    with pytest.raises(ValueError):
        ModeOperatorMatrix(lowering, "unitary")
    with pytest.raises(ValueError):
        ModeOperatorMatrix(lowering, "hermitian")


# full simulation


def test_simulate_balanced_working_point():
    p = InterferometerParams(math.pi / 4, math.pi / 4, math.pi / 2)
    result = simulate(p, 30)
    assert result.mean_O == pytest.approx(0.0, abs=1e-10)
    assert result.std_O == pytest.approx(1.0, abs=1e-8)
    assert result.probe_intensity == pytest.approx(0.5, abs=1e-10)
    assert result.probe_std == pytest.approx(math.sqrt(0.5), abs=1e-10)


def test_simulate_vacuum_input():
    p = InterferometerParams(0.6, 1.1, 0.8, kappa=0.3, alpha=0.0)
    result = simulate(p, 8)
    assert result == (0.0, 0.0, 0.0, 0.0)


def test_simulate_std_is_amplitude_when_lossless():
    rng = np.random.default_rng(31)
    for _ in range(5):
        p = InterferometerParams(
            rng.uniform(0.0, math.pi / 2),
            rng.uniform(0.0, math.pi / 2),
            rng.uniform(0.0, 2 * math.pi),
            alpha=1.0,
        )
        assert simulate(p, 25).std_O == pytest.approx(1.0, abs=1e-8)


def test_simulate_matches_closed_forms_at_random_points():
    rng = np.random.default_rng(7)
    for _ in range(12):
        p = InterferometerParams(
            rng.uniform(0.0, math.pi / 2),
            rng.uniform(0.0, math.pi / 2),
            rng.uniform(0.0, 2 * math.pi),
            kappa=rng.uniform(0.0, 1.0),
            alpha=complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)),
        )
        result = simulate(p, 25)
        metrics = evaluate_metrics(p)
        assert result.mean_O == pytest.approx(metrics.mean_O, abs=1e-8)
        assert result.std_O == pytest.approx(metrics.std_O, abs=1e-8)
        assert result.probe_intensity == pytest.approx(metrics.intensity_probe, abs=1e-8)
        assert result.probe_std == pytest.approx(metrics.std_intensity_probe, abs=1e-8)


def test_simulate_network_output_is_product_coherent_state():
    n_max = 40
    for alpha, theta1, theta2, phi in [(2.0, 0.7, 0.9, 1.3), (1.0 + 1.0j, 0.3, 1.2, 2.1)]:
        p = InterferometerParams(theta1, theta2, phi, alpha=alpha)
        d = n_max + 1
        drive = coherent_state(alpha, n_max)
        vac = vacuum(d)
        psi = np.outer(drive, vac)
        psi = apply_beam_splitter(psi, theta1, axes=(0, 1))
        psi = psi * np.exp(-1j * phi * np.arange(d))
        psi = apply_beam_splitter(psi, theta2, axes=(0, 1))
        out = output_amplitudes(p)
        target = np.outer(coherent_state(out.a3, n_max), coherent_state(out.b3, n_max))
        fidelity = abs(np.vdot(target.ravel(), psi.ravel())) ** 2
        assert fidelity >= 1.0 - 1e-8


def test_simulate_warns_on_edge_population():
    p = InterferometerParams(0.4, 0.9, 0.5, alpha=1.0)
    with pytest.warns(TruncationWarning):
        simulate(p, 20, edge_tol=0.0)


def test_simulate_rejects_undersized_cutoff():
    p = InterferometerParams(0.4, 0.9, 0.5, alpha=3.0)
    with pytest.raises(TruncationError):
        simulate(p, 10)


def test_relabeled_network_gives_identical_physics():
    # Swapping which slot carries the drive, the phase and the loss is a
    # pure relabeling: with both splitters negated and the observable
    # negated, every reported number must be unchanged.
    p = InterferometerParams(0.65, 1.05, 0.85, kappa=0.4, alpha=1.1)
    n_max = 22
    d = n_max + 1
    reference = simulate(p, n_max)

    drive = coherent_state(p.alpha, n_max)
    psi = np.outer(vacuum(d), drive)  # drive now enters the second slot
    psi = apply_beam_splitter(psi, -p.theta1, axes=(0, 1))
    probe_intensity, probe_std = mode_number_moments(psi, axis=0)
    psi = psi * np.exp(-1j * p.phi * np.arange(d))[:, None]  # phase on first slot
    psi = loss_channel(p.kappa, n_max)(psi, axis=0)
    psi = apply_beam_splitter(psi, -p.theta2, axes=(0, 1))
    probabilities = np.abs(psi) ** 2
    numbers = np.arange(d, dtype=float)
    weights = (numbers[:, None] - numbers[None, :])[:, :, None]  # n_first - n_second
    mean = float((weights * probabilities).sum())
    second = float((weights**2 * probabilities).sum())
    std = math.sqrt(max(second - mean**2, 0.0))

    assert mean == pytest.approx(reference.mean_O, abs=1e-10)
    assert std == pytest.approx(reference.std_O, abs=1e-10)
    assert probe_intensity == pytest.approx(reference.probe_intensity, abs=1e-10)
    assert probe_std == pytest.approx(reference.probe_std, abs=1e-10)


def test_cross_check_lossy_resolution_against_simulator():
    # finite-difference the simulated signal and divide the simulated
    # noise: must reproduce the closed-form resolution
    p = InterferometerParams(math.pi / 4, math.pi / 4, math.pi / 2, kappa=0.5)
    n_max, step = 25, 1e-4
    plus = simulate(
        InterferometerParams(p.theta1, p.theta2, p.phi + step, kappa=p.kappa), n_max
    )
    minus = simulate(
        InterferometerParams(p.theta1, p.theta2, p.phi - step, kappa=p.kappa), n_max
    )
    gradient = (plus.mean_O - minus.mean_O) / (2.0 * step)
    std = simulate(p, n_max).std_O
    assert std / abs(gradient) == pytest.approx(math.sqrt((math.e + 1.0) / 2.0), rel=1e-6)


def test_probe_stats_match_closed_form_after_first_splitter():
    p = InterferometerParams(0.4, 1.2, 2.0, alpha=1.5)
    result = simulate(p, 25)
    intensity, std = probe_arm_stats(p)
    assert result.probe_intensity == pytest.approx(intensity, abs=1e-10)
    assert result.probe_std == pytest.approx(std, abs=1e-10)


def test_analytic_signal_and_noise_against_simulator_lossless():
    p = InterferometerParams(1.1, 0.35, 0.9, alpha=0.8 + 0.6j)
    result = simulate(p, 25)
    assert result.mean_O == pytest.approx(mean_difference_signal(p), abs=1e-10)
    assert result.std_O == pytest.approx(std_difference_signal(p), abs=1e-10)
