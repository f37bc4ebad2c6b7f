"""Verifiers for the transform's structural claims.

Small-grid Wigner distribution, the 4D rotation relation between input
and output distributions, and impulse formation for matched chirps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .direct import nsfrft_direct
from .errors import TooLargeError
from .grid import ComplexGrid
from .params import ParamSet, derive_coeffs, rotation4_from_params

WIGNER_MAX_SIZE = 32


@dataclass(frozen=True)
class WignerResult:
    """W(x, y, u, v) on the product of the spatial and frequency axes."""

    values: np.ndarray  # (M, N, M, N)
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray


def wigner2d(f: ComplexGrid) -> WignerResult:
    """Discrete 2D Wigner distribution.

    W(x, y, u, v) = sum_{k,l} f(x + k dx, y + l dy) f*(x - k dx, y - l dy)
                    e^{-j(u 2k dx + v 2l dy)} (2 dx)(2 dy)

    with lags restricted to on-grid pairs (tau = 2 k dx).  The frequency
    axes are the FFT duals of the lag grid: du = pi / (M dx).  Memory is
    O(N^4), so inputs are limited to 32 samples per axis.
    """
    m, n = f.shape
    if max(m, n) > WIGNER_MAX_SIZE:
        raise TooLargeError(f"grid {f.shape} exceeds {WIGNER_MAX_SIZE} per axis")
    vals = f.values
    w = np.zeros((m, n, m, n), dtype=np.complex128)
    ks = np.arange(m) - m // 2
    ls = np.arange(n) - n // 2
    for i in range(m):
        for j in range(n):
            ip = i + ks
            jp = j + ls
            okx = (ip >= 0) & (ip < m) & ((2 * i - ip) >= 0) & ((2 * i - ip) < m)
            oky = (jp >= 0) & (jp < n) & ((2 * j - jp) >= 0) & ((2 * j - jp) < n)
            prod = np.zeros((m, n), dtype=np.complex128)
            ix = ip[okx]
            jy = jp[oky]
            prod[np.ix_(okx, oky)] = (vals[np.ix_(ix, jy)]
                                      * np.conj(vals[np.ix_(2 * i - ix, 2 * j - jy)]))
            w[i, j] = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(prod)))
    w *= (2 * f.dx) * (2 * f.dy)
    u = (np.arange(m) - m // 2) * (np.pi / (m * f.dx))
    v = (np.arange(n) - n // 2) * (np.pi / (n * f.dy))
    return WignerResult(w, f.x.copy(), f.y.copy(), u, v)


@dataclass(frozen=True)
class RotationReport:
    """Deviation of W_{F}(z) from W_f(R z) at sampled phase-space points."""

    max_deviation: float
    mean_deviation: float
    points: np.ndarray
    values_out: np.ndarray
    values_mapped: np.ndarray

    def as_dict(self) -> dict:
        """JSON-ready summary with per-point deviations."""
        return {
            "max_deviation": self.max_deviation,
            "mean_deviation": self.mean_deviation,
            "points": self.points.tolist(),
            "deviations": np.abs(self.values_out - self.values_mapped).tolist(),
        }


def verify_wd_rotation(p: ParamSet, f: ComplexGrid, n_points: int = 20,
                       seed: int = 0) -> RotationReport:
    """Compare the output Wigner distribution against the rotated input one.

    The output distribution at a phase-space point z should equal the
    input distribution at R z, with R the 4D rotation of the parameters.
    Deviations are normalized by the peak input magnitude and reflect
    discretization plus 4D linear interpolation.
    """
    wf = wigner2d(f)
    big_f = nsfrft_direct(p, f)
    wff = wigner2d(big_f)
    rot = rotation4_from_params(p)

    interp = RegularGridInterpolator(
        (wf.x, wf.y, wf.u, wf.v), wf.values,
        bounds_error=False, fill_value=0.0)

    # deterministic interior sample: central half of each axis
    rng = np.random.default_rng(seed)
    m, n = f.shape
    idx = np.column_stack([
        rng.integers(m // 4, m - m // 4, n_points),
        rng.integers(n // 4, n - n // 4, n_points),
        rng.integers(m // 4, m - m // 4, n_points),
        rng.integers(n // 4, n - n // 4, n_points),
    ])
    pts = np.column_stack([wff.x[idx[:, 0]], wff.y[idx[:, 1]],
                           wff.u[idx[:, 2]], wff.v[idx[:, 3]]])
    out_vals = wff.values[idx[:, 0], idx[:, 1], idx[:, 2], idx[:, 3]]
    mapped_vals = interp(pts @ rot.T)

    scale = float(np.max(np.abs(wf.values)))
    dev = np.abs(out_vals - mapped_vals) / scale
    return RotationReport(float(dev.max()), float(dev.mean()), pts,
                          out_vals, mapped_vals)


@dataclass(frozen=True)
class ImpulseReport:
    peak_index: tuple[int, int]
    predicted_index: tuple[int, int]
    peak_fraction: float
    neighborhood_fraction: float

    def as_dict(self) -> dict:
        return {
            "peak_index": list(self.peak_index),
            "predicted_index": list(self.predicted_index),
            "peak_fraction": self.peak_fraction,
            "neighborhood_fraction": self.neighborhood_fraction,
        }


def predict_impulse_index(p: ParamSet, big_f: ComplexGrid,
                          linear=(0.0, 0.0)) -> tuple[int, int]:
    """Output bin where a matched chirp (with the given extra linear phase
    coefficients) focuses: solves [m1 m2; m3 m4] (u, v) = -T (lx, ly)."""
    co = derive_coeffs(p)
    mmat = np.array([[co.m1, co.m2], [co.m3, co.m4]])
    uv = np.linalg.solve(mmat, -co.t * np.asarray(linear, dtype=float))
    m, n = big_f.shape
    pi = int(round(uv[0] / big_f.dx)) + m // 2
    qi = int(round(uv[1] / big_f.dy)) + n // 2
    return (pi, qi)


def impulse_report(p: ParamSet, big_f: ComplexGrid,
                   linear=(0.0, 0.0)) -> ImpulseReport:
    """Locate the energy peak of a transformed matched chirp.

    peak_fraction is the energy share of the single largest bin;
    neighborhood_fraction is the share of the 3x3 block centered on the
    predicted bin.
    """
    power = np.abs(big_f.values) ** 2
    total = float(power.sum())
    peak = np.unravel_index(int(np.argmax(power)), power.shape)
    predicted = predict_impulse_index(p, big_f, linear)
    pi, qi = predicted
    lo_x, hi_x = max(pi - 1, 0), min(pi + 2, power.shape[0])
    lo_y, hi_y = max(qi - 1, 0), min(qi + 2, power.shape[1])
    neighborhood = float(power[lo_x:hi_x, lo_y:hi_y].sum())
    return ImpulseReport(
        peak_index=(int(peak[0]), int(peak[1])),
        predicted_index=predicted,
        peak_fraction=float(power[peak]) / total,
        neighborhood_fraction=neighborhood / total,
    )
