import math

import numpy as np
import pytest

from nsfrft import (
    ChirpSpec,
    ComplexGrid,
    DimensionMismatchError,
    add_awgn,
    chirp,
    hermite_gaussian_2d,
    load_cgrid,
    load_png,
    matched_chirp_spec,
    mse,
    newton_rings,
    nmse,
    psnr,
    save_cgrid,
    save_png,
    second_order_hermite,
    ssim,
)

from conftest import (P_CHIRP1, P_CHIRP2, REF_SPACING, g1_signal,
                      self_dual_spacing)


def test_grid_geometry_centering():
    g = hermite_gaussian_2d(0, 0, (8, 10), (0.5, 0.25))
    assert g.x[4] == 0.0 and g.y[5] == 0.0
    assert g.x[0] == -2.0
    with pytest.raises(ValueError):
        ComplexGrid(np.zeros((1, 5)), 0.1, 0.1)
    with pytest.raises(ValueError):
        ComplexGrid(np.zeros((4, 4)), -0.1, 0.1)
    with pytest.raises(ValueError):
        ComplexGrid(np.full((4, 4), np.nan), 0.1, 0.1)


def test_hermite_gaussian_normalization():
    g = hermite_gaussian_2d(0, 0, (200, 200), REF_SPACING)
    x0 = g.values[100, 100].real
    assert x0 == pytest.approx(1.0 / math.sqrt(math.pi), rel=1e-12)
    assert g.energy == pytest.approx(1.0, abs=1e-6)


def test_hermite_gaussian_orthogonality():
    a = hermite_gaussian_2d(1, 2, (200, 200), REF_SPACING)
    b = hermite_gaussian_2d(3, 1, (200, 200), REF_SPACING)
    inner = np.vdot(a.values, b.values) * a.dx * a.dy
    assert abs(inner) < 1e-6


def test_parseval_energy_converges():
    # fixed spacing, growing extent: truncation error decreases with N
    # until it hits the float floor
    errs = []
    for n in (64, 128, 200):
        g = hermite_gaussian_2d(8, 9, (n, n), REF_SPACING)
        errs.append(abs(g.energy - 1.0))
    assert errs[0] > errs[1]
    assert errs[2] <= errs[1] + 1e-14
    assert errs[2] < 1e-6


def test_second_order_signal_values():
    g = g1_signal()
    assert g.values[100, 100] == pytest.approx(4.0)
    # value at (x, y) = (1, 0): 4 e^{-1/2} (0 - 2 + 1)
    g = second_order_hermite((8, 8), (1.0, 1.0))
    assert g.values[5, 4].real == pytest.approx(-4.0 * math.exp(-0.5), rel=1e-12)
    # even symmetry on a symmetric index range
    sym = g.values[1:, 1:]
    np.testing.assert_allclose(sym, sym[::-1, ::-1], atol=1e-12)


def test_second_order_signal_is_scaled_hermite22():
    g = g1_signal(shape=(64, 64), spacing=self_dual_spacing(64))
    h22 = hermite_gaussian_2d(2, 2, (64, 64), self_dual_spacing(64))
    np.testing.assert_allclose(g.values, 8 * math.sqrt(math.pi) * h22.values,
                               atol=1e-12)


def test_newton_rings():
    rings = newton_rings(2.0, 2.0, 600e-9, 0.4, shape=(200, 200),
                         spacing=(2.56e-5, 2.56e-5))
    assert rings.values[100, 100].real == pytest.approx(0.0, abs=1e-12)
    # radial symmetry: I(x, y) = I(-x, -y) on the symmetric sub-grid
    sym = rings.values[1:, 1:].real
    np.testing.assert_allclose(sym, sym[::-1, ::-1], atol=1e-12)
    assert np.all(rings.values.real >= -1e-12)
    assert rings.values.real.max() == pytest.approx(4.0, abs=1e-4)


def test_chirp_unit_magnitude_and_phase():
    spec = ChirpSpec(0.866, -2.0, 0.866, sign=-1)
    g = chirp(spec, (64, 64), self_dual_spacing(64))
    np.testing.assert_allclose(np.abs(g.values), 1.0, atol=1e-12)
    x, y = 3, -5
    i, j = 32 + x, 32 + y
    xx, yy = g.x[i], g.y[j]
    expected = np.exp(-1j * (0.866 * xx**2 - 2 * xx * yy + 0.866 * yy**2))
    assert g.values[i, j] == pytest.approx(expected, rel=1e-12)


def test_matched_chirp_reference_coefficients():
    spec = matched_chirp_spec(P_CHIRP1)
    # sign = -1, so the effective exponent is -(cxx, cxy, cyy)
    np.testing.assert_allclose([spec.cxx, spec.cxy, spec.cyy],
                               [0.866, -2.0, 0.866], atol=1e-3)
    spec = matched_chirp_spec(P_CHIRP2)
    np.testing.assert_allclose([-spec.cxx, -spec.cxy, -spec.cyy],
                               [0.2897, 0.0061, 0.2877], atol=2e-3)


def test_matched_chirp_ft_point_is_constant():
    from nsfrft import ParamSet, matched_chirp_for

    p = ParamSet(1, 0, 0, 0, math.pi / 2)
    g = matched_chirp_for(p, (16, 16), (0.3, 0.3))
    np.testing.assert_allclose(g.values, 1.0, atol=1e-12)


def test_awgn_power_calibration_and_determinism():
    g = g1_signal()
    noisy = add_awgn(g, 0.0, seed=5)
    noise = noisy.values - g.values
    p_sig = np.mean(np.abs(g.values) ** 2)
    p_noise = np.mean(np.abs(noise) ** 2)
    assert p_noise == pytest.approx(p_sig, rel=0.02)
    assert abs(10 * math.log10(p_sig / p_noise)) < 0.1
    again = add_awgn(g, 0.0, seed=5)
    np.testing.assert_array_equal(noisy.values, again.values)
    # complex input gets complex noise
    c = ComplexGrid(g.values * np.exp(0.3j), g.dx, g.dy)
    noisec = add_awgn(c, 0.0, seed=5).values - c.values
    assert np.any(noisec.imag)
    with pytest.raises(ValueError):
        add_awgn(g, math.inf, seed=0)


def test_metrics_basics():
    g = g1_signal(shape=(32, 32), spacing=self_dual_spacing(32))
    assert nmse(g, g) == 0.0
    assert mse(g, g) == 0.0
    assert psnr(g, g) == math.inf
    # magnitudes: adding 1 to a nonnegative image shifts |.| by exactly 1
    pos = ComplexGrid(np.abs(g.values) + 0.5, g.dx, g.dy)
    shifted = ComplexGrid(pos.values + 1.0, g.dx, g.dy)
    assert mse(shifted, pos) == pytest.approx(1.0, rel=1e-12)
    assert 0.0 < ssim(shifted, pos) <= 1.0
    assert ssim(g, g) == pytest.approx(1.0, abs=1e-12)
    other = g1_signal(shape=(16, 16), spacing=self_dual_spacing(16))
    with pytest.raises(DimensionMismatchError):
        nmse(g, other)


def test_cgrid_roundtrip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    g = ComplexGrid(rng.standard_normal((17, 23)) + 1j * rng.standard_normal((17, 23)),
                    0.123, 0.456)
    path = tmp_path / "x.cgrid"
    save_cgrid(path, g)
    back = load_cgrid(path)
    assert back.dx == g.dx and back.dy == g.dy
    np.testing.assert_array_equal(back.values, g.values)


def test_cgrid_rejects_bad_files(tmp_path):
    path = tmp_path / "bad.cgrid"
    path.write_bytes(b"NOPE" + b"\0" * 28)
    with pytest.raises(ValueError):
        load_cgrid(path)


def test_png_roundtrip_gray_and_rgb(tmp_path):
    rng = np.random.default_rng(1)
    g = ComplexGrid(rng.random((20, 20)).astype(complex), 0.1, 0.1)
    save_png(tmp_path / "g.png", [g])
    loaded = load_png(tmp_path / "g.png")
    assert len(loaded) == 1
    assert np.max(np.abs(loaded[0].values.real - np.abs(g.values))) < 1.5 / 255
    assert (tmp_path / "g.png.json").exists()

    channels = [ComplexGrid(rng.random((20, 20)).astype(complex), 0.1, 0.1)
                for _ in range(3)]
    save_png(tmp_path / "rgb.png", channels)
    loaded = load_png(tmp_path / "rgb.png")
    assert len(loaded) == 3
