import math

import numpy as np
import pytest

from nsfrft import (
    ComplexGrid,
    FT_POINT,
    FilterMask,
    GAConfig,
    KeyMaterial,
    add_awgn,
    band_filter,
    band_mask,
    chirp,
    ChirpSpec,
    drped_decrypt,
    drped_encrypt,
    ga_search,
    hermite_gaussian_2d,
    key_sensitivity_sweep,
    matched_chirp_for,
    mse,
    multiplicative_filter,
    nmse,
    noise_variance_for,
    nsfrft_fast,
    optimal_mask,
    wiener_denoise,
)
from nsfrft.apps import denoise_experiment

from conftest import P_CHIRP1, P_ENC, REF_SPACING, random_params, self_dual_spacing


@pytest.fixture(scope="module")
def image64():
    rng = np.random.default_rng(0)
    vals = np.clip(rng.random((64, 64)) * 0.5 + 0.25, 0, 1)
    vals[20:44, 16:40] += 0.3
    return ComplexGrid(vals.astype(complex), *self_dual_spacing(64))


@pytest.fixture(scope="module")
def encryption_key(image64):
    return KeyMaterial.generate(P_ENC, P_ENC, image64.shape, seed=42)


def test_key_material_masks_unimodular(encryption_key):
    np.testing.assert_allclose(np.abs(encryption_key.mask1), 1.0, atol=1e-12)
    np.testing.assert_allclose(np.abs(encryption_key.mask2), 1.0, atol=1e-12)
    with pytest.raises(ValueError):
        KeyMaterial(P_ENC, P_ENC, np.full((4, 4), 0.5 + 0j),
                    np.ones((4, 4), complex), 0)


def test_drped_roundtrip_exact(image64, encryption_key):
    ct = drped_encrypt(image64, encryption_key)
    dec = drped_decrypt(ct, encryption_key)
    assert mse(dec, image64) < 1e-20


def test_drped_zero_image(encryption_key, image64):
    zero = image64.with_values(np.zeros_like(image64.values))
    ct = drped_encrypt(zero, encryption_key)
    assert np.max(np.abs(ct.values)) < 1e-14


def test_drped_energy_preserved(image64, encryption_key):
    ct = drped_encrypt(image64, encryption_key)
    assert ct.energy == pytest.approx(image64.energy, rel=1e-10)


def test_drped_wrong_params_fails(image64, encryption_key):
    ct = drped_encrypt(image64, encryption_key)
    wrong = ParamSetLike = KeyMaterial(
        P_CHIRP1, P_CHIRP1, encryption_key.mask1, encryption_key.mask2, 42)
    assert mse(drped_decrypt(ct, wrong), image64) > 1e-2


def test_drped_wrong_mask_fails(image64, encryption_key):
    ct = drped_encrypt(image64, encryption_key)
    other = KeyMaterial.generate(P_ENC, P_ENC, image64.shape, seed=43)
    assert mse(drped_decrypt(ct, other), image64) > 1e-2


def test_drped_roundtrip_random_keys(image64):
    rng = np.random.default_rng(8)
    for seed in range(20):
        key = KeyMaterial.generate(random_params(rng), random_params(rng),
                                   image64.shape, seed=seed)
        dec = drped_decrypt(drped_encrypt(image64, key), key)
        assert mse(dec, image64) < 1e-20


def test_key_sensitivity_sweep(image64, encryption_key):
    rows = key_sensitivity_sweep(image64, encryption_key, 0.5, 0.05)
    assert len(rows) == 21
    by_delta = {round(d, 4): m for d, m in rows}
    assert by_delta[0.0] < 1e-20
    assert by_delta[0.05] > 1e10 * by_delta[0.0]
    assert by_delta[-0.05] > 1e10 * by_delta[0.0]


def test_multiplicative_filter_trivial_masks(image64):
    ones = FilterMask(np.ones(image64.shape, complex), "optimal")
    out = multiplicative_filter(image64, P_ENC, ones)
    assert nmse(out, image64) < 1e-12
    zeros = FilterMask(np.zeros(image64.shape, complex), "optimal")
    out = multiplicative_filter(image64, P_ENC, zeros)
    assert np.max(np.abs(out.values)) < 1e-14


def test_optimal_mask_limits(image64):
    ones = optimal_mask(image64, 0.0, FT_POINT)
    np.testing.assert_allclose(ones.values, 1.0, atol=1e-12)
    tiny = optimal_mask(image64, 1e12, FT_POINT)
    assert np.max(np.abs(tiny.values)) < 1e-3


def test_optimal_mask_values_in_unit_interval(image64):
    mask = optimal_mask(image64, 0.1, P_ENC)
    vals = mask.values.real
    assert np.all(vals >= 0.0) and np.all(vals <= 1.0)
    assert np.max(np.abs(mask.values.imag)) < 1e-15


def test_ft_filter_beats_noisy_input():
    x, y = np.meshgrid(*(np.arange(64) - 32,) * 2, indexing="ij")
    clean = ComplexGrid(np.exp(-((x * 0.2) ** 2 + (y * 0.2) ** 2)).astype(complex),
                        *self_dual_spacing(64))
    sigma2 = noise_variance_for(clean, 0.0)
    noisy = add_awgn(clean, 0.0, seed=3)
    filtered, err = wiener_denoise(noisy, clean, sigma2, FT_POINT)
    assert err < mse(noisy, clean)


def test_ga_search_deterministic_and_never_worse_than_ft():
    rng = np.random.default_rng(5)
    clean = hermite_gaussian_2d(0, 0, (64, 64), self_dual_spacing(64))
    sigma2 = noise_variance_for(clean, 0.0)
    observed = add_awgn(clean, 0.0, seed=11)
    config = GAConfig(population=8, generations=4, seed=9)
    res1 = ga_search(observed, clean, sigma2, config)
    res2 = ga_search(observed, clean, sigma2, config)
    assert res1.params.as_tuple() == res2.params.as_tuple()
    _, ft_err = wiener_denoise(observed, clean, sigma2, FT_POINT)
    assert res1.mse <= ft_err + 1e-15


def test_ga_search_collapsed_space_returns_ft_point():
    clean = hermite_gaussian_2d(0, 0, (32, 32), self_dual_spacing(32))
    sigma2 = noise_variance_for(clean, 0.0)
    observed = add_awgn(clean, 0.0, seed=2)
    res = ga_search(observed, clean, sigma2,
                    GAConfig(population=1, generations=0, elitism=1, seed=1))
    assert res.params.as_tuple() == FT_POINT.as_tuple()


def test_band_mask_complementarity():
    passing = band_mask((32, 32), (10, 12), 5, "pass")
    stopping = band_mask((32, 32), (10, 12), 5, "stop")
    np.testing.assert_array_equal(passing.values + stopping.values,
                                  np.ones((32, 32)))
    assert passing.kind == "bandpass" and stopping.kind == "bandstop"
    with pytest.raises(ValueError):
        FilterMask(np.full((4, 4), 0.5), "bandpass")


def test_band_filter_pass_plus_stop_is_unfiltered(image64):
    # complementary masks: the two outputs reassemble the input exactly
    passed = band_filter(image64, P_CHIRP1, "pass", 4)
    stopped = band_filter(image64, P_CHIRP1, "stop", 4)
    total = passed.with_values(passed.values + stopped.values)
    assert nmse(total, image64) < 1e-10
    with pytest.raises(ValueError):
        band_filter(image64, P_CHIRP1, "reject")


def test_band_filter_recovers_noisy_matched_chirp():
    clean = matched_chirp_for(P_CHIRP1, (200, 200), REF_SPACING)
    noisy = add_awgn(clean, -5.0, seed=4)
    recovered = band_filter(noisy, P_CHIRP1, "pass", 5)
    err_matched = nmse(recovered, clean)
    recovered_ft = band_filter(noisy, FT_POINT, "pass", 5)
    err_ft = nmse(recovered_ft, clean)
    assert err_matched < 0.1
    assert err_ft > 0.5


def test_band_filter_stop_removes_matched_chirp():
    clean = matched_chirp_for(P_CHIRP1, (200, 200), REF_SPACING)
    residual = band_filter(clean, P_CHIRP1, "stop", 5)
    assert residual.energy < 0.05 * clean.energy


def test_band_stop_removes_chirp_artifact_from_image():
    from conftest import P_CHIRP3

    rng = np.random.default_rng(12)
    base = np.clip(rng.random((200, 200)) * 0.2 + 0.2, 0, 1)
    base[60:140, 50:150] += 0.45
    img = ComplexGrid(base.astype(complex), *REF_SPACING)
    artifact = chirp(ChirpSpec(0.2816, 0.1552, 0.3064, 5.4319, -6.7898, sign=1),
                     (200, 200), REF_SPACING)
    corrupted = img.with_values(img.values + 0.6 * artifact.values)

    restored = band_filter(corrupted, P_CHIRP3, "stop", 5)
    restored_ft = band_filter(corrupted, FT_POINT, "stop", 5)
    assert mse(restored, img) < mse(corrupted, img)
    assert mse(restored, img) < mse(restored_ft, img)


def test_denoise_experiment_improves_on_ft(g2_nonsep=None):
    x, y = np.meshgrid(*((np.arange(64) - 32) * self_dual_spacing(64)[0],) * 2,
                       indexing="ij")
    clean = ComplexGrid(np.exp(-(x**2 + 1.5 * x * y + y**2)).astype(complex),
                        *self_dual_spacing(64))
    row = denoise_experiment(clean, 0.0, seed=42,
                             config=GAConfig(population=10, generations=6, seed=7))
    assert row["best_mse"] <= row["ft_mse"]
