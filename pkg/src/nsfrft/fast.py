"""Fast O(N^2 log N) transform via matrix decomposition.

Two operator factorizations of the block matrix [A B; -B A]:

  algorithm I : CM(B^-1 A) -> FT -> AT(B) -> CM(A B^-1)
  algorithm II: CM(B^-1 (A-I)) -> CC(B) -> CM((A-I) B^-1)        (B = B^T)
                CC(H) -> CM(B'^-1 (A-I)) -> CC(B') -> CM((D'-I) B'^-1)
                with B' = B - A H, D' = A + B H and H = H^T chosen so
                that B' is symmetric                              (B != B^T)

built from four elementary operators: pointwise chirp multiplication,
FFT-realized chirp convolution, the centered unitary Fourier transform,
and affine resampling.  Each plan carries one complex scale constant,
derived analytically by propagating a reference Gaussian through the
factors and comparing against the closed-form transform of the same
Gaussian.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space
from scipy.ndimage import map_coordinates
from scipy.optimize import minimize

from .errors import (
    DecompositionFailureError,
    GeometryMismatchError,
    NonSymmetricError,
    NonSymmetricFactorError,
    SingularMatrixError,
    ZeroTError,
)
from .grid import ComplexGrid
from .params import ParamSet, SymplecticSpec, blocks_from_params

SYM_TOL = 1e-9
DET_TOL = 1e-12
# below this determinant a chirp-convolution factor is treated as unusable
CC_DET_LIMIT = 1e-6
# chirp factors steeper than this lose accuracy on self-dual grids (phase
# slope approaching the grid Nyquist over the signal footprint); the
# affine-based factorization handles such specs better
FACTOR_NORM_LIMIT = 2.0


def _require_symmetric(s: np.ndarray, what: str):
    s = np.asarray(s, dtype=float)
    if s.shape != (2, 2):
        raise ValueError(f"{what} must be 2x2")
    if abs(s[0, 1] - s[1, 0]) > SYM_TOL * max(1.0, np.max(np.abs(s))):
        raise NonSymmetricError(f"{what} is not symmetric: {s.tolist()}")
    return s


# ---------------------------------------------------------------------------
# elementary operators
# ---------------------------------------------------------------------------

def chirp_multiply(f: ComplexGrid, s: np.ndarray) -> ComplexGrid:
    """Pointwise multiply by exp(j (x,y)^T S (x,y) / 2), S symmetric."""
    s = _require_symmetric(s, "chirp multiplication matrix")
    xx, yy = f.meshgrid()
    phase = 0.5 * (s[0, 0] * xx**2 + 2 * s[0, 1] * xx * yy + s[1, 1] * yy**2)
    return f.with_values(f.values * np.exp(1j * phase))


def fourier2d(f: ComplexGrid, inverse: bool = False) -> ComplexGrid:
    """Centered unitary Fourier transform calibrated to the continuous one.

    Forward: F(u, v) ~ (1/2pi) sum f(x, y) e^{-j(ux+vy)} dx dy on the
    frequency grid du = 2 pi / (M dx), dv = 2 pi / (N dy); the discrete
    sum is exact for these grids, so forward followed by inverse is the
    identity to machine precision.
    """
    m, n = f.shape
    dxo = 2 * np.pi / (m * f.dx)
    dyo = 2 * np.pi / (n * f.dy)
    if inverse:
        vals = np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(f.values)))
        vals *= f.dx * f.dy * m * n / (2 * np.pi)
    else:
        vals = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(f.values)))
        vals *= f.dx * f.dy / (2 * np.pi)
    return ComplexGrid(vals, dxo, dyo)


def chirp_convolve(f: ComplexGrid, s: np.ndarray) -> ComplexGrid:
    """Chirp convolution realizing the factor [I S; 0 I].

    Implemented as FT -> multiply by exp(-j (u,v)^T S (u,v) / 2) -> inverse
    FT, which keeps the input grid and is unitary to machine precision.
    """
    s = _require_symmetric(s, "chirp convolution matrix")
    if abs(np.linalg.det(s)) <= DET_TOL:
        raise SingularMatrixError(f"chirp convolution matrix is singular: {s.tolist()}")
    spec = fourier2d(f)
    uu, vv = spec.meshgrid()
    phase = -0.5 * (s[0, 0] * uu**2 + 2 * s[0, 1] * uu * vv + s[1, 1] * vv**2)
    spec = spec.with_values(spec.values * np.exp(1j * phase))
    return fourier2d(spec, inverse=True)


def affine_resample(f: ComplexGrid, b: np.ndarray, out_shape=None,
                    out_spacing=None) -> ComplexGrid:
    """Coordinate scaling g(w) = f(B^-1 w) / sqrt(|det B|), bicubic.

    Samples outside the input footprint are zero.  The output grid
    defaults to the input geometry.
    """
    b = np.asarray(b, dtype=float)
    det = np.linalg.det(b)
    if abs(det) <= DET_TOL:
        raise SingularMatrixError(f"affine resample matrix is singular: {b.tolist()}")
    p, q = out_shape if out_shape is not None else f.shape
    du, dv = out_spacing if out_spacing is not None else (f.dx, f.dy)
    u = (np.arange(p) - p // 2) * du
    v = (np.arange(q) - q // 2) * dv
    uu, vv = np.meshgrid(u, v, indexing="ij")
    binv = np.linalg.inv(b)
    sx = binv[0, 0] * uu + binv[0, 1] * vv
    sy = binv[1, 0] * uu + binv[1, 1] * vv
    ix = sx / f.dx + f.shape[0] // 2
    iy = sy / f.dy + f.shape[1] // 2
    re = map_coordinates(f.values.real, [ix, iy], order=3, mode="constant", cval=0.0)
    im = map_coordinates(f.values.imag, [ix, iy], order=3, mode="constant", cval=0.0)
    return ComplexGrid((re + 1j * im) / np.sqrt(abs(det)), du, dv)


# ---------------------------------------------------------------------------
# operator plans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChirpMultiplyStep:
    s: np.ndarray


@dataclass(frozen=True)
class ChirpConvolveStep:
    s: np.ndarray


@dataclass(frozen=True)
class FourierStep:
    inverse: bool = False


@dataclass(frozen=True)
class AffineStep:
    b: np.ndarray


@dataclass(frozen=True)
class OperatorPlan:
    """Ordered elementary steps (applied input to output) plus one scale."""

    steps: tuple
    scale: complex

    def symplectic(self) -> np.ndarray:
        """Compose the steps' 4x4 symplectic representatives."""
        eye = np.eye(2)
        zero = np.zeros((2, 2))
        total = np.eye(4)
        for step in self.steps:
            if isinstance(step, ChirpMultiplyStep):
                rep = np.block([[eye, zero], [step.s, eye]])
            elif isinstance(step, ChirpConvolveStep):
                rep = np.block([[eye, step.s], [zero, eye]])
            elif isinstance(step, FourierStep):
                sgn = -1.0 if step.inverse else 1.0
                rep = np.block([[zero, sgn * eye], [-sgn * eye, zero]])
            elif isinstance(step, AffineStep):
                rep = np.block([[step.b, zero], [zero, np.linalg.inv(step.b).T]])
            else:
                raise TypeError(f"unknown step {step!r}")
            total = rep @ total
        return total


def _sqrt_det_right_half(mat: np.ndarray) -> complex:
    """sqrt(det) through principal roots of eigenvalues with Re > 0.

    This is the branch the convergent Gaussian integral selects; the
    matrices passed here always have their numerical range in the right
    half plane.
    """
    eig = np.linalg.eigvals(mat)
    if np.any(eig.real <= 0):
        raise ValueError(f"eigenvalues not in the right half plane: {eig}")
    return complex(np.prod(np.sqrt(eig)))


def _propagate_gaussian(steps) -> tuple[np.ndarray, complex]:
    """Push exp(-|x|^2/2) = exp(j x^T (jI) x / 2) through the steps.

    Returns the final complex quadratic-form matrix and the accumulated
    constant; every intermediate form keeps a positive-definite imaginary
    part, so each Fresnel integral is absolutely convergent.
    """
    gamma = 1j * np.eye(2)
    const = 1.0 + 0.0j

    def ft():
        nonlocal gamma, const
        const /= _sqrt_det_right_half(-1j * gamma)
        gamma = -np.linalg.inv(gamma)

    for step in steps:
        if isinstance(step, ChirpMultiplyStep):
            gamma = gamma + step.s
        elif isinstance(step, ChirpConvolveStep):
            ft()
            gamma = gamma - step.s
            ft()
        elif isinstance(step, FourierStep):
            ft()  # the Fresnel update is the same for both directions
        elif isinstance(step, AffineStep):
            binv = np.linalg.inv(step.b)
            gamma = binv.T @ gamma @ binv
            const /= np.sqrt(abs(np.linalg.det(step.b)))
        else:
            raise TypeError(f"unknown step {step!r}")
    return gamma, const


def _plan_scale(steps, spec: SymplecticSpec) -> complex:
    """Scale making the composed steps equal the transform with kernel
    constant 1/(2 pi sqrt(-T)); fixed by comparing both sides on a
    reference Gaussian."""
    t = spec.t_value
    binv = np.linalg.inv(spec.b_block)
    p_in = binv @ spec.a_block
    k_out = spec.a_block @ binv
    q = 1j * np.eye(2) + p_in
    kappa = 1.0 / (2 * np.pi * np.sqrt(complex(-t)))
    target_const = kappa * 2 * np.pi / _sqrt_det_right_half(-1j * q)
    target_gamma = k_out - binv.T @ np.linalg.inv(q) @ binv

    plan_gamma, plan_const = _propagate_gaussian(steps)
    if np.max(np.abs(plan_gamma - target_gamma)) > 1e-9:
        raise DecompositionFailureError(
            "composed factors do not reproduce the target quadratic form"
        )
    return target_const / plan_const


def _symmetrize_factor(mat: np.ndarray, what: str) -> np.ndarray:
    if abs(mat[0, 1] - mat[1, 0]) > SYM_TOL * max(1.0, np.max(np.abs(mat))):
        raise NonSymmetricFactorError(f"{what} is not symmetric: {mat.tolist()}")
    return (mat + mat.T) / 2.0


def plan_algorithm1(spec: SymplecticSpec) -> OperatorPlan:
    """Chirp-Fourier-affine-chirp factorization (needs interpolation)."""
    t = spec.t_value
    if abs(t) <= DET_TOL:
        raise ZeroTError(f"B is singular (T = {t!r})")
    binv = np.linalg.inv(spec.b_block)
    pre = _symmetrize_factor(binv @ spec.a_block, "B^-1 A")
    post = _symmetrize_factor(spec.a_block @ binv, "A B^-1")
    steps = (
        ChirpMultiplyStep(pre),
        FourierStep(),
        AffineStep(spec.b_block.copy()),
        ChirpMultiplyStep(post),
    )
    return OperatorPlan(steps, _plan_scale(steps, spec))


def _choose_h(a_blk: np.ndarray, b_blk: np.ndarray) -> np.ndarray:
    """Symmetric H making B - A H symmetric, with well-conditioned factors.

    Writing H = [[h1, h2], [h2, h3]], symmetry of B - A H is one linear
    equation in (h1, h2, h3); the remaining two degrees of freedom are
    searched for the smallest cond(B'), regularized by the norms of the
    chirp factors the choice induces (large factors mean steep discrete
    chirps and lost accuracy, so conditioning alone is not enough).
    """
    beta = b_blk[0, 1] - b_blk[1, 0]
    w = np.array([-a_blk[1, 0], a_blk[0, 0] - a_blk[1, 1], a_blk[0, 1]])
    wn2 = float(w @ w)
    if wn2 < 1e-24:
        raise DecompositionFailureError(
            "no symmetric H can symmetrize B' = B - A H for this spec"
        )
    h_part = beta * w / wn2
    basis = null_space(w[None, :])  # 3 x 2
    eye = np.eye(2)

    def build(free):
        h = h_part + basis @ free
        return np.array([[h[0], h[1]], [h[1], h[2]]])

    def cost(free):
        h = build(free)
        bp = b_blk - a_blk @ h
        bp = (bp + bp.T) / 2.0
        det_h = abs(np.linalg.det(h))
        det_b = abs(np.linalg.det(bp))
        if det_h < CC_DET_LIMIT or det_b < CC_DET_LIMIT:
            return 1e12 / (1.0 + min(det_h, det_b))
        binv = np.linalg.inv(bp)
        factor_norm = max(
            np.max(np.abs(h)),
            np.max(np.abs(bp)),
            np.max(np.abs(binv @ (a_blk - eye))),
            np.max(np.abs((a_blk + b_blk @ h - eye) @ binv)),
        )
        return float(np.linalg.cond(bp)) + factor_norm

    grid = np.linspace(-3.0, 3.0, 13)
    best, best_cost = None, np.inf
    for s1 in grid:
        for s2 in grid:
            val = cost((s1, s2))
            if val < best_cost:
                best, best_cost = np.array([s1, s2]), val
    res = minimize(cost, best, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 400})
    if res.fun < best_cost:
        best = res.x
    h = build(best)
    bp = b_blk - a_blk @ h
    if abs(np.linalg.det(h)) < CC_DET_LIMIT or abs(np.linalg.det(bp)) < CC_DET_LIMIT:
        raise DecompositionFailureError(
            f"no well-conditioned symmetric completion found: "
            f"|det H| = {abs(np.linalg.det(h)):.3e}, "
            f"|det B'| = {abs(np.linalg.det(bp)):.3e}, "
            f"cond(B') = {np.linalg.cond((bp + bp.T) / 2):.3e}"
        )
    return h


def plan_algorithm2(spec: SymplecticSpec) -> OperatorPlan:
    """Chirp-only factorization (no interpolation).

    Uses the three-factor form when B is symmetric; otherwise prepends a
    chirp convolution CC(H) and decomposes the remaining matrix, whose
    off-diagonal block B' = B - A H is symmetric by the choice of H.
    """
    t = spec.t_value
    if abs(t) <= DET_TOL:
        raise ZeroTError(f"B is singular (T = {t!r})")
    a_blk, b_blk = spec.a_block, spec.b_block
    eye = np.eye(2)

    if abs(b_blk[0, 1] - b_blk[1, 0]) <= SYM_TOL:
        if abs(np.linalg.det(b_blk)) < CC_DET_LIMIT:
            raise DecompositionFailureError(
                f"chirp-convolution factor near singular: |det B| = "
                f"{abs(np.linalg.det(b_blk)):.3e}"
            )
        bsym = (b_blk + b_blk.T) / 2.0
        binv = np.linalg.inv(bsym)
        pre = _symmetrize_factor(binv @ (a_blk - eye), "B^-1 (A - I)")
        post = _symmetrize_factor((a_blk - eye) @ binv, "(A - I) B^-1")
        steps = (
            ChirpMultiplyStep(pre),
            ChirpConvolveStep(bsym),
            ChirpMultiplyStep(post),
        )
    else:
        h = _choose_h(a_blk, b_blk)
        b_prime = b_blk - a_blk @ h
        b_prime = (b_prime + b_prime.T) / 2.0
        d_prime = a_blk + b_blk @ h
        binv = np.linalg.inv(b_prime)
        pre = _symmetrize_factor(binv @ (a_blk - eye), "B'^-1 (A' - I)")
        post = _symmetrize_factor((d_prime - eye) @ binv, "(D' - I) B'^-1")
        steps = (
            ChirpConvolveStep(h),
            ChirpMultiplyStep(pre),
            ChirpConvolveStep(b_prime),
            ChirpMultiplyStep(post),
        )
    worst = max(np.max(np.abs(step.s)) for step in steps if hasattr(step, "s"))
    if worst > FACTOR_NORM_LIMIT:
        raise DecompositionFailureError(
            f"chirp-only factorization needs a factor of norm {worst:.2f} "
            f"(limit {FACTOR_NORM_LIMIT}); the discrete chirp would be undersampled"
        )
    return OperatorPlan(steps, _plan_scale(steps, spec))


def execute(plan: OperatorPlan, f: ComplexGrid) -> ComplexGrid:
    """Apply the steps in order; the scale constant is applied once.

    The output grid keeps the input geometry (an affine step resamples
    onto it).
    """
    if not isinstance(f, ComplexGrid):
        raise GeometryMismatchError("execute expects a ComplexGrid input")
    out_shape, out_spacing = f.shape, (f.dx, f.dy)
    g = f
    for step in plan.steps:
        if isinstance(step, ChirpMultiplyStep):
            g = chirp_multiply(g, step.s)
        elif isinstance(step, ChirpConvolveStep):
            g = chirp_convolve(g, step.s)
        elif isinstance(step, FourierStep):
            g = fourier2d(g, inverse=step.inverse)
        elif isinstance(step, AffineStep):
            g = affine_resample(g, step.b, out_shape, out_spacing)
        else:
            raise TypeError(f"unknown step {step!r}")
    if g.shape != out_shape:
        raise GeometryMismatchError("plan did not restore the input geometry")
    return g.with_values(g.values * plan.scale)


# ---------------------------------------------------------------------------
# user-facing transform
# ---------------------------------------------------------------------------

def invert_plan(plan: OperatorPlan) -> OperatorPlan:
    """Exact inverse of a plan: reversed steps, each factor negated.

    Every elementary step inverts exactly on the discrete grid (chirp
    phases cancel pointwise, the FFT pair is exactly unitary), so the
    round trip through a plan and its inverse telescopes to the identity
    up to roundoff for chirp-only plans; an affine step inverts only to
    interpolation accuracy.
    """
    steps = []
    for step in reversed(plan.steps):
        if isinstance(step, ChirpMultiplyStep):
            steps.append(ChirpMultiplyStep(-step.s))
        elif isinstance(step, ChirpConvolveStep):
            steps.append(ChirpConvolveStep(-step.s))
        elif isinstance(step, FourierStep):
            steps.append(FourierStep(inverse=not step.inverse))
        elif isinstance(step, AffineStep):
            steps.append(AffineStep(np.linalg.inv(step.b)))
        else:
            raise TypeError(f"unknown step {step!r}")
    return OperatorPlan(tuple(steps), 1.0 / plan.scale)


_PLAN_CACHE: dict = {}


def plan_for(spec: SymplecticSpec, algorithm: str = "II") -> OperatorPlan:
    """Build (or reuse) the plan for one transform; algorithm II falls
    back to I (with a warning) when no chirp-only decomposition exists."""
    algorithm = str(algorithm).upper()
    key = (algorithm, spec.a_block.tobytes(), spec.b_block.tobytes())
    cached = _PLAN_CACHE.get(key)
    if cached is not None:
        return cached
    if algorithm in ("I", "1", "FAST1"):
        plan = plan_algorithm1(spec)
    elif algorithm in ("II", "2", "FAST2"):
        try:
            plan = plan_algorithm2(spec)
        except DecompositionFailureError:
            warnings.warn(
                "no usable chirp-only factorization for this spec; "
                "using the affine-based algorithm instead",
                RuntimeWarning, stacklevel=2)
            plan = plan_algorithm1(spec)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if len(_PLAN_CACHE) > 256:
        _PLAN_CACHE.clear()
    _PLAN_CACHE[key] = plan
    return plan


def nsfrft_fast(p: ParamSet, f: ComplexGrid, algorithm: str = "II") -> ComplexGrid:
    """Fast forward transform; identity point returns a copy."""
    if p.is_identity:
        return f.copy()
    return execute(plan_for(blocks_from_params(p), algorithm), f)


def grid_resolvable(spec: SymplecticSpec, row_limit: float = 1.5,
                    t_min: float = 0.7) -> bool:
    """Whether self-dual sampling resolves this spec's kernel chirps.

    The kernel's instantaneous frequencies are governed by the rows of
    B^-1, B^-1 A and A B^-1; on a self-dual grid the space and bandwidth
    budgets coincide, so row sums near 1 (equivalently |T| = det B near
    1) keep every chirp below Nyquist over the signal footprint.  Specs
    far outside this family alias in ANY fixed-grid discretization,
    including the exact Riemann sum.
    """
    if abs(spec.t_value) < t_min:
        return False
    binv = np.linalg.inv(spec.b_block)
    rows = max(
        float(np.max(np.abs(binv).sum(axis=1))),
        float(np.max(np.abs(binv @ spec.a_block).sum(axis=1))),
        float(np.max(np.abs(spec.a_block @ binv).sum(axis=1))),
    )
    return rows <= row_limit


def inverse_sign(t: float) -> complex:
    """Constant relating the conjugate-kernel inverse to the forward
    transform of the inverted spec: sqrt(-T) / conj(sqrt(-T))."""
    root = np.sqrt(complex(-t))
    return complex(root / np.conj(root))


def nsfrft_fast_inverse(p: ParamSet, big_f: ComplexGrid,
                        algorithm: str = "II") -> ComplexGrid:
    """Fast inverse transform (the conjugate-kernel inverse).

    Realized by inverting the forward plan factor by factor, which makes
    the discrete round trip exact for the chirp-only algorithm; on the
    continuum this operator equals the conjugate-kernel integral, i.e.
    the forward transform of the inverted spec times inverse_sign(T).
    """
    if p.is_identity:
        return big_f.copy()
    return execute(invert_plan(plan_for(blocks_from_params(p), algorithm)), big_f)
