"""Sampled complex 2D signals, test-signal generators, noise and metrics.

Grids are centered: index (m, n) maps to coordinates
((m - M//2) * dx, (n - N//2) * dy), so the sample at (M//2, N//2) sits at
the origin.  The first array axis is x, the second is y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter
from scipy.special import eval_hermite

from .errors import DimensionMismatchError
from .params import ParamSet, derive_coeffs

DEFAULT_SHAPE = (200, 200)
DEFAULT_SPACING = (0.1772, 0.1772)


@dataclass(frozen=True)
class ComplexGrid:
    """Uniformly sampled complex 2D signal with centered coordinates."""

    values: np.ndarray
    dx: float
    dy: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.ndim != 2 or vals.shape[0] < 2 or vals.shape[1] < 2:
            raise ValueError("values must be a 2D array with at least 2 samples per axis")
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError("sample spacings must be positive")
        if not np.all(np.isfinite(vals.view(float))):
            raise ValueError("values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def x(self) -> np.ndarray:
        m = self.shape[0]
        return (np.arange(m) - m // 2) * self.dx

    @property
    def y(self) -> np.ndarray:
        n = self.shape[1]
        return (np.arange(n) - n // 2) * self.dy

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y, indexing="ij")

    @property
    def energy(self) -> float:
        """Discrete L2 energy: sum |f|^2 dx dy."""
        return float(np.sum(np.abs(self.values) ** 2) * self.dx * self.dy)

    def with_values(self, values: np.ndarray) -> "ComplexGrid":
        return ComplexGrid(values, self.dx, self.dy)

    def copy(self) -> "ComplexGrid":
        return ComplexGrid(self.values.copy(), self.dx, self.dy)


def coordinate_axes(shape, spacing) -> tuple[np.ndarray, np.ndarray]:
    m, n = shape
    dx, dy = spacing
    return (np.arange(m) - m // 2) * dx, (np.arange(n) - n // 2) * dy


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def hermite_gaussian_1d(m: int, x: np.ndarray) -> np.ndarray:
    """Order-m Hermite-Gaussian: H_m(x) exp(-x^2/2) / sqrt(2^m m! sqrt(pi))."""
    norm = math.sqrt(2.0**m * math.factorial(m) * math.sqrt(math.pi))
    return eval_hermite(m, x) * np.exp(-(x**2) / 2.0) / norm


def hermite_gaussian_2d(m: int, n: int,
                        shape=DEFAULT_SHAPE, spacing=DEFAULT_SPACING) -> ComplexGrid:
    """Separable 2D Hermite-Gaussian psi_m(x) psi_n(y), unit L2 norm."""
    if m < 0 or n < 0:
        raise ValueError("orders must be nonnegative")
    x, y = coordinate_axes(shape, spacing)
    vals = np.outer(hermite_gaussian_1d(m, x), hermite_gaussian_1d(n, y))
    return ComplexGrid(vals.astype(np.complex128), spacing[0], spacing[1])


def second_order_hermite(shape=DEFAULT_SHAPE, spacing=DEFAULT_SPACING) -> ComplexGrid:
    """4 exp(-(x^2+y^2)/2) (4 x^2 y^2 - 2 (x^2+y^2) + 1).

    A scaled order-(2,2) Hermite-Gaussian product, used as a smooth,
    well-contained reference input.
    """
    x, y = coordinate_axes(shape, spacing)
    xx, yy = np.meshgrid(x, y, indexing="ij")
    r2 = xx**2 + yy**2
    vals = 4.0 * np.exp(-r2 / 2.0) * (4.0 * xx**2 * yy**2 - 2.0 * r2 + 1.0)
    return ComplexGrid(vals.astype(np.complex128), spacing[0], spacing[1])


def newton_rings(i0: float, amplitude: float, wavelength: float, curvature_radius: float,
                 center=(0.0, 0.0), shape=DEFAULT_SHAPE,
                 spacing=DEFAULT_SPACING) -> ComplexGrid:
    """Interference fringe intensity I0 + A cos(K pi r^2 + pi), K = 2/(lambda R)."""
    if wavelength <= 0 or curvature_radius <= 0:
        raise ValueError("wavelength and curvature radius must be positive")
    x, y = coordinate_axes(shape, spacing)
    xx, yy = np.meshgrid(x, y, indexing="ij")
    k = 2.0 / (wavelength * curvature_radius)
    phase = k * math.pi * ((xx - center[0]) ** 2 + (yy - center[1]) ** 2) + math.pi
    vals = i0 + amplitude * np.cos(phase)
    return ComplexGrid(vals.astype(np.complex128), spacing[0], spacing[1])


@dataclass(frozen=True)
class ChirpSpec:
    """Quadratic-phase signal exp(j sign (cxx x^2 + cxy xy + cyy y^2 + lx x + ly y))."""

    cxx: float
    cxy: float
    cyy: float
    lx: float = 0.0
    ly: float = 0.0
    sign: int = 1

    def __post_init__(self):
        fields = (self.cxx, self.cxy, self.cyy, self.lx, self.ly)
        if not all(math.isfinite(v) for v in fields):
            raise ValueError("chirp coefficients must be finite")
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")


def chirp(spec: ChirpSpec, shape=DEFAULT_SHAPE, spacing=DEFAULT_SPACING) -> ComplexGrid:
    """Unit-magnitude 2D chirp with the given quadratic and linear phase."""
    x, y = coordinate_axes(shape, spacing)
    xx, yy = np.meshgrid(x, y, indexing="ij")
    phase = (spec.cxx * xx**2 + spec.cxy * xx * yy + spec.cyy * yy**2
             + spec.lx * xx + spec.ly * yy)
    vals = np.exp(1j * spec.sign * phase)
    return ComplexGrid(vals, spacing[0], spacing[1])


def matched_chirp_spec(p: ParamSet) -> ChirpSpec:
    """Chirp exp(-j (p1 x^2 + p2 xy + p3 y^2)/(2T)) that the transform focuses."""
    co = derive_coeffs(p)
    return ChirpSpec(co.p1 / (2 * co.t), co.p2 / (2 * co.t), co.p3 / (2 * co.t), sign=-1)


def matched_chirp_for(p: ParamSet, shape=DEFAULT_SHAPE,
                      spacing=DEFAULT_SPACING) -> ComplexGrid:
    """Sampled matched chirp: the transform with the same parameters maps it
    to an impulse at the output-grid origin."""
    return chirp(matched_chirp_spec(p), shape, spacing)


def add_awgn(g: ComplexGrid, snr_db: float, seed: int) -> ComplexGrid:
    """Add white Gaussian noise at the given SNR (dB, mean-power convention).

    Exactly real inputs get real noise; complex inputs get circularly
    symmetric complex noise.  Deterministic for a fixed seed.
    """
    if not math.isfinite(snr_db):
        raise ValueError("snr_db must be finite; omit noise instead of +inf")
    rng = np.random.default_rng(seed)
    power = float(np.mean(np.abs(g.values) ** 2))
    sigma2 = power * 10.0 ** (-snr_db / 10.0)
    if np.any(g.values.imag):
        noise = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
        noise *= math.sqrt(sigma2 / 2.0)
    else:
        noise = rng.standard_normal(g.shape) * math.sqrt(sigma2)
    return g.with_values(g.values + noise)


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def _check_same_shape(a: ComplexGrid, b: ComplexGrid):
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")


def nmse(est: ComplexGrid, ref: ComplexGrid) -> float:
    """Normalized mean square error sum|est-ref|^2 / sum|ref|^2."""
    _check_same_shape(est, ref)
    denom = float(np.sum(np.abs(ref.values) ** 2))
    if denom == 0.0:
        return 0.0 if not np.any(est.values) else math.inf
    return float(np.sum(np.abs(est.values - ref.values) ** 2)) / denom


def mse(a: ComplexGrid, b: ComplexGrid) -> float:
    """Mean square error of the magnitudes: sum(|a| - |b|)^2 / (M N)."""
    _check_same_shape(a, b)
    diff = np.abs(a.values) - np.abs(b.values)
    return float(np.sum(diff**2)) / (a.shape[0] * a.shape[1])


def psnr(a: ComplexGrid, b: ComplexGrid) -> float:
    """Peak signal-to-noise ratio in dB over the magnitudes.

    Peak is the dynamic range of the reference magnitudes; identical
    inputs return +inf.
    """
    _check_same_shape(a, b)
    err = mse(a, b)
    if err == 0.0:
        return math.inf
    mags = np.abs(b.values)
    peak = float(mags.max() - mags.min()) or float(mags.max()) or 1.0
    return 10.0 * math.log10(peak**2 / err)


def ssim(a: ComplexGrid, b: ComplexGrid, window: int = 8,
         k1: float = 0.01, k2: float = 0.03) -> float:
    """Mean structural similarity of the magnitudes.

    Uniform window (default 8x8), dynamic range taken from the reference
    data; constants C1 = (k1 L)^2, C2 = (k2 L)^2.
    """
    _check_same_shape(a, b)
    x = np.abs(a.values).astype(float)
    y = np.abs(b.values).astype(float)
    drange = float(y.max() - y.min()) or 1.0
    c1 = (k1 * drange) ** 2
    c2 = (k2 * drange) ** 2
    mu_x = uniform_filter(x, window)
    mu_y = uniform_filter(y, window)
    var_x = uniform_filter(x * x, window) - mu_x**2
    var_y = uniform_filter(y * y, window) - mu_y**2
    cov = uniform_filter(x * y, window) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))
