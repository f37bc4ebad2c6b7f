import math

import numpy as np
import pytest
from scipy.interpolate import RegularGridInterpolator

from nsfrft import (
    ChirpSpec,
    IDENTITY_POINT,
    ParamSet,
    TooLargeError,
    chirp,
    hermite_gaussian_2d,
    impulse_report,
    matched_chirp_for,
    nsfrft_direct,
    predict_impulse_index,
    rotation4_from_params,
    verify_wd_rotation,
    wigner2d,
)

from conftest import P_AC1, P_CHIRP1, P_CHIRP3, REF_SPACING, self_dual_spacing


@pytest.fixture(scope="module")
def gauss32():
    return hermite_gaussian_2d(0, 0, (32, 32), self_dual_spacing(32))


def test_wigner_real_for_real_even_input(gauss32):
    w = wigner2d(gauss32)
    assert np.max(np.abs(w.values.imag)) < 1e-10


def test_wigner_size_limit():
    with pytest.raises(TooLargeError):
        wigner2d(hermite_gaussian_2d(0, 0, (64, 64), self_dual_spacing(64)))


def test_wigner_marginal_and_total(gauss32):
    w = wigner2d(gauss32)
    du = w.u[1] - w.u[0]
    dv = w.v[1] - w.v[0]
    marginal = w.values.real.sum(axis=(2, 3)) * du * dv
    predicted = (2 * math.pi) ** 2 * np.abs(gauss32.values) ** 2
    center = gauss32.shape[0] // 2
    assert marginal[center, center] == pytest.approx(predicted[center, center],
                                                     rel=0.05)
    total = w.values.real.sum() * du * dv * gauss32.dx * gauss32.dy
    assert total == pytest.approx((2 * math.pi) ** 2 * gauss32.energy, rel=0.05)


def test_wd_rotation_identity_point(gauss32):
    report = verify_wd_rotation(IDENTITY_POINT, gauss32)
    assert report.max_deviation < 1e-12


def test_wd_rotation_ft_point(gauss32):
    p = ParamSet(1, 0, 0, 0, math.pi / 2)
    report = verify_wd_rotation(p, gauss32)
    assert report.max_deviation < 0.05


def test_wd_rotation_nonseparable_point(gauss32):
    report = verify_wd_rotation(P_AC1, gauss32)
    assert report.max_deviation < 0.10


def test_wd_rotation_deviation_shrinks_with_n():
    # fixed physical points, both distributions interpolated; the mean
    # deviation must decrease as the grids refine
    p = ParamSet(1, 0, 0, 0, math.pi / 2)
    rng = np.random.default_rng(11)
    pts = np.column_stack([rng.uniform(-1.2, 1.2, 30), rng.uniform(-1.2, 1.2, 30),
                           rng.uniform(-0.8, 0.8, 30), rng.uniform(-0.8, 0.8, 30)])
    rot = rotation4_from_params(p)
    means = []
    for n in (16, 24, 32):
        g = hermite_gaussian_2d(0, 0, (n, n), self_dual_spacing(n))
        w_in = wigner2d(g)
        w_out = wigner2d(nsfrft_direct(p, g))
        interp_in = RegularGridInterpolator((w_in.x, w_in.y, w_in.u, w_in.v),
                                            w_in.values, bounds_error=False,
                                            fill_value=0.0)
        interp_out = RegularGridInterpolator((w_out.x, w_out.y, w_out.u, w_out.v),
                                             w_out.values, bounds_error=False,
                                             fill_value=0.0)
        dev = np.abs(interp_out(pts) - interp_in(pts @ rot.T))
        means.append(float(dev.mean()) / float(np.max(np.abs(w_in.values))))
    assert means[0] > means[1] > means[2]


def test_impulse_matched_chirp_centered():
    n = 128
    sp = self_dual_spacing(n)
    chirp_in = matched_chirp_for(P_CHIRP1, (n, n), sp)
    report = impulse_report(P_CHIRP1, nsfrft_direct(P_CHIRP1, chirp_in))
    assert report.predicted_index == (n // 2, n // 2)
    assert report.peak_index == report.predicted_index
    assert report.neighborhood_fraction > 0.5


def test_impulse_argmax_invariant_under_scaling():
    n = 64
    sp = self_dual_spacing(n)
    chirp_in = matched_chirp_for(P_AC1, (n, n), sp)
    r1 = impulse_report(P_AC1, nsfrft_direct(P_AC1, chirp_in))
    scaled = chirp_in.with_values(chirp_in.values * 3.7)
    r2 = impulse_report(P_AC1, nsfrft_direct(P_AC1, scaled))
    assert r1.peak_index == r2.peak_index
    assert r1.peak_fraction == pytest.approx(r2.peak_fraction, rel=1e-9)


def test_impulse_with_linear_terms_lands_at_prediction():
    # interference-style chirp: quadratic part matched to the parameters,
    # linear part shifts the focus off center
    linear = (5.4319, -6.7898)
    f3 = chirp(ChirpSpec(0.2816, 0.1552, 0.3064, *linear, sign=1),
               (200, 200), REF_SPACING)
    big_f = nsfrft_direct(P_CHIRP3, f3)
    report = impulse_report(P_CHIRP3, big_f, linear=linear)
    assert report.predicted_index != (100, 100)
    assert max(abs(report.peak_index[0] - report.predicted_index[0]),
               abs(report.peak_index[1] - report.predicted_index[1])) <= 1
    assert report.neighborhood_fraction > 0.4


def test_reports_serialize_to_json(gauss32):
    import json

    rotation = verify_wd_rotation(IDENTITY_POINT, gauss32, n_points=5)
    restored = json.loads(json.dumps(rotation.as_dict()))
    assert restored["max_deviation"] == rotation.max_deviation
    assert len(restored["points"]) == 5

    chirp_in = matched_chirp_for(P_AC1, (32, 32), self_dual_spacing(32))
    report = impulse_report(P_AC1, nsfrft_direct(P_AC1, chirp_in))
    restored = json.loads(json.dumps(report.as_dict()))
    assert tuple(restored["peak_index"]) == report.peak_index
    assert restored["neighborhood_fraction"] == report.neighborhood_fraction


def test_predict_impulse_index_solves_linear_system():
    from nsfrft import derive_coeffs

    co = derive_coeffs(P_CHIRP3)
    grid = matched_chirp_for(P_CHIRP3, (200, 200), REF_SPACING)
    linear = (1.3, -0.7)
    idx = predict_impulse_index(P_CHIRP3, grid, linear)
    u = (idx[0] - 100) * grid.dx
    v = (idx[1] - 100) * grid.dy
    res = np.array([co.m1 * u + co.m2 * v + co.t * linear[0],
                    co.m3 * u + co.m4 * v + co.t * linear[1]])
    assert np.max(np.abs(res)) < np.hypot(grid.dx, grid.dy)
