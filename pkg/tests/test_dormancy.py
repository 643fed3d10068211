import numpy as np
import pytest
from scipy.integrate import trapezoid

from src.analyzers.dormancy import classify_dormant, kde_peak_density, kde_profile
from src.errors import InvalidInputError
from src.network.activations import ActivationKind
from src.numerics.rng import make_rng


def test_constant_neuron_is_dormant():
    report = classify_dormant(np.full((512, 1), 0.3), ActivationKind.TANH, make_rng(0))
    assert report.neurons[0].dormant
    assert report.dormant_fraction == 1.0


def test_uniform_neuron_is_live():
    column = make_rng(1).uniform(-1.0, 1.0, size=(512, 1))
    report = classify_dormant(column, ActivationKind.TANH, make_rng(0))
    assert not report.neurons[0].dormant
    assert report.neurons[0].peak_density < 1.0


def test_uniform_neuron_is_live_at_4096_samples():
    column = make_rng(11).uniform(-1.0, 1.0, size=(4096, 1))
    neuron = classify_dormant(column, ActivationKind.TANH, make_rng(0)).neurons[0]
    assert not neuron.dormant
    assert neuron.peak_density < 1.0


def test_tanh_of_gaussian_pre_activations_is_live():
    column = np.tanh(make_rng(12).standard_normal((1024, 1)))
    neuron = classify_dormant(column, ActivationKind.TANH, make_rng(0)).neurons[0]
    assert not neuron.dormant
    assert neuron.peak_density < 10.0


def test_constant_sample_peak_is_deterministic_and_large():
    column = np.full(256, 0.999)
    first = kde_peak_density(column, make_rng(4))
    assert first == kde_peak_density(column, make_rng(4))
    assert first >= 20.0


def test_peak_density_scales_with_spread():
    rng = make_rng(2)
    narrow = kde_peak_density(rng.normal(0.0, 0.01, 512), make_rng(0))
    wide = kde_peak_density(rng.normal(0.0, 1.0, 512), make_rng(0))
    assert narrow > 20.0 > wide


def test_density_integrates_to_about_one():
    profile = kde_profile(make_rng(3).standard_normal(400), make_rng(0))
    assert trapezoid(profile.density, profile.grid) == pytest.approx(1.0, abs=0.01)
    assert profile.grid.shape == (512,)


def test_dormant_fraction_and_indices():
    rng = make_rng(4)
    features = rng.uniform(-1.0, 1.0, size=(256, 6))
    features[:, [1, 4]] = 0.999
    report = classify_dormant(features, ActivationKind.TANH, make_rng(0))
    assert report.dormant_indices == [1, 4]
    assert report.live_indices == [0, 2, 3, 5]
    assert report.dormant_fraction == pytest.approx(2 / 6)


def test_saturated_tanh_reports_its_sign():
    features = np.column_stack([np.full(256, 0.999), np.full(256, -0.999)])
    omega = classify_dormant(features, ActivationKind.TANH, make_rng(0)).omega_hat()
    assert omega == {0: 1.0, 1: -1.0}


def test_saturated_neurons_are_not_collapsed():
    features = np.column_stack([make_rng(13).uniform(0.9995, 1.0, 256), np.full(256, -0.999)])
    report = classify_dormant(features, ActivationKind.TANH, make_rng(0))
    assert report.dormant_indices == [0, 1]
    assert report.collapsed_indices == []
    assert report.omega_hat() == {0: 1.0, 1: -1.0}
    assert report.saturated_fraction == 1.0


def test_tanh_neuron_constant_near_zero_is_collapsed():
    rng = make_rng(14)
    features = rng.uniform(-1.0, 1.0, size=(512, 3))
    features[:, 2] = -0.004 + 1e-4 * rng.standard_normal(512)
    report = classify_dormant(features, ActivationKind.TANH, make_rng(0))
    neuron = report.neurons[2]
    assert neuron.dormant
    assert neuron.collapsed
    assert neuron.omega_hat == neuron.mean_activation
    assert report.dormant_fraction == pytest.approx(1 / 3)
    assert report.saturated_fraction == 0.0


def test_relu_neuron_constant_above_zero_is_collapsed():
    features = np.column_stack([np.zeros(128), np.full(128, 0.5)])
    report = classify_dormant(features, ActivationKind.RELU, make_rng(0))
    assert report.dormant_indices == [0, 1]
    assert report.collapsed_indices == [1]
    assert report.omega_hat() == {0: 0.0, 1: 0.5}


def test_saturation_tolerance_decides_collapse():
    column = np.full((256, 1), 0.95)
    loose = classify_dormant(column, ActivationKind.TANH, make_rng(0)).neurons[0]
    strict = classify_dormant(column, ActivationKind.TANH, make_rng(0), saturation_tolerance=0.01).neurons[0]
    assert not loose.collapsed and loose.omega_hat == 1.0
    assert strict.collapsed and strict.omega_hat == pytest.approx(0.95)


def test_bimodal_tanh_neuron_flagged():
    column = np.concatenate([np.full(200, -1.0), np.full(300, 1.0)])[:, np.newaxis]
    # Scott bandwidth spans both modes, so the threshold has to be low to see them
    neuron = classify_dormant(column, ActivationKind.TANH, make_rng(0), threshold=0.5).neurons[0]
    assert neuron.dormant
    assert neuron.bimodal
    assert neuron.omega_hat == 1.0


def test_bimodal_neuron_is_not_collapsed():
    column = np.concatenate([np.full(200, -1.0), np.full(300, 1.0)])[:, np.newaxis]
    neuron = classify_dormant(column, ActivationKind.TANH, make_rng(0), threshold=0.5).neurons[0]
    assert not neuron.collapsed


def test_dead_relu_is_dormant_even_without_jitter():
    features = np.zeros((64, 2))
    features[:, 1] = make_rng(5).uniform(0.0, 3.0, 64)
    report = classify_dormant(features, ActivationKind.RELU, make_rng(0), jitter_variance=0.0)
    assert report.dormant_indices == [0]
    assert report.omega_hat() == {0: 0.0}


def test_same_jitter_seed_same_report():
    features = make_rng(6).standard_normal((128, 4))
    a = classify_dormant(features, ActivationKind.TANH, make_rng(9))
    b = classify_dormant(features, ActivationKind.TANH, make_rng(9))
    assert np.array_equal(a.peak_densities, b.peak_densities)


def test_threshold_is_respected():
    column = make_rng(7).normal(0.0, 0.05, size=(512, 1))
    loose = classify_dormant(column, ActivationKind.TANH, make_rng(0), threshold=1.0)
    strict = classify_dormant(column, ActivationKind.TANH, make_rng(0), threshold=1000.0)
    assert loose.neurons[0].dormant
    assert not strict.neurons[0].dormant


def test_needs_two_observations():
    with pytest.raises(InvalidInputError):
        classify_dormant(np.zeros((1, 3)), ActivationKind.TANH, make_rng(0))


def test_rejects_non_finite():
    with pytest.raises(InvalidInputError):
        classify_dormant(np.array([[0.0], [np.inf]]), ActivationKind.TANH, make_rng(0))


def test_unjittered_constant_column_has_infinite_peak():
    report = classify_dormant(np.full((16, 1), 0.3), ActivationKind.TANH, make_rng(0), jitter_variance=0.0)
    assert report.neurons[0].dormant
    assert np.isinf(report.neurons[0].peak_density)
