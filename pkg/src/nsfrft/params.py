"""Parameter algebra for the 2D nonseparable fractional Fourier transform.

A transform is selected by five real parameters (a, b, c, d, theta) with
(a, b, c, d) on the unit 3-sphere.  This module derives everything the
numerical paths need from that point: the scalar T, the nine kernel phase
coefficients, the 2x2 block pair (A, B) whose 4x4 arrangement
[A B; -B A] is a rotation, the full 4D rotation matrix, and the unit
quaternion pair generating it.  It also embeds the separable fractional
Fourier transform, the gyrator transform and the coupled fractional
Fourier transform into the five-parameter family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    IdentityPointError,
    NotARotationError,
    ZeroTError,
)

SPHERE_TOL = 1e-12
T_TOL = 1e-12
# Published parameter sets are printed to four decimals, which perturbs the
# sphere norm by up to ~1e-4; inputs within this limit are renormalized.
RENORM_LIMIT = 1e-4
ROTATION_TOL = 1e-9


@dataclass(frozen=True)
class ParamSet:
    """Point (a, b, c, d, theta) with (a,b,c,d) on the unit 3-sphere.

    The constructor renormalizes (a,b,c,d) when the input norm is within
    a relative error of 1e-6 of unity and rejects anything worse.  The
    point (1, 0, 0, 0, 0) is the designated identity; every other valid
    point must have |T| > 1e-12.
    """

    a: float
    b: float
    c: float
    d: float
    theta: float

    def __post_init__(self):
        vec = np.array([self.a, self.b, self.c, self.d], dtype=float)
        if not (np.all(np.isfinite(vec)) and math.isfinite(self.theta)):
            raise ValueError("parameters must be finite")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > RENORM_LIMIT:
            raise ValueError(
                f"(a,b,c,d) norm {norm!r} deviates from 1 by more than {RENORM_LIMIT}"
            )
        if abs(norm - 1.0) > SPHERE_TOL:
            vec = vec / norm
            object.__setattr__(self, "a", float(vec[0]))
            object.__setattr__(self, "b", float(vec[1]))
            object.__setattr__(self, "c", float(vec[2]))
            object.__setattr__(self, "d", float(vec[3]))
        if abs(self.t_value) <= T_TOL and not self.is_identity:
            raise ZeroTError(
                f"T = {self.t_value!r} vanishes for {self.as_tuple()}; "
                "only (1,0,0,0,0) is admitted as a degenerate point"
            )

    @property
    def is_identity(self) -> bool:
        return (self.a, self.b, self.c, self.d, self.theta) == (1.0, 0.0, 0.0, 0.0, 0.0)

    @property
    def t_value(self) -> float:
        """T = (a^2 + b^2) sin^2(theta) - (c^2 + d^2) cos^2(theta)."""
        s2 = math.sin(self.theta) ** 2
        c2 = math.cos(self.theta) ** 2
        return (self.a**2 + self.b**2) * s2 - (self.c**2 + self.d**2) * c2

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.a, self.b, self.c, self.d, self.theta)


IDENTITY_POINT = ParamSet(1.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class DerivedCoeffs:
    """T and the nine kernel phase coefficients of a non-identity point.

    The kernel is
        (1 / (2 pi sqrt(-T)))
        * exp(j (p1 x^2 + p2 x y + p3 y^2) / (2T))
        * exp(j (m1 u x + m2 v x + m3 u y + m4 v y) / T)
        * exp(j (k1 u^2 + k2 u v + k3 v^2) / (2T))
    and m1 m4 - m2 m3 = T holds identically.
    """

    t: float
    p1: float
    p2: float
    p3: float
    m1: float
    m2: float
    m3: float
    m4: float
    k1: float
    k2: float
    k3: float

    @property
    def kernel_constant(self) -> complex:
        """1 / (2 pi sqrt(-T)) with the principal branch of the square root."""
        return 1.0 / (2.0 * math.pi * np.sqrt(complex(-self.t)))

    @property
    def input_quad(self) -> np.ndarray:
        """Symmetric matrix of the input chirp phase: x^T Q x / 2 with Q = this / T."""
        return np.array([[self.p1, self.p2 / 2], [self.p2 / 2, self.p3]]) / self.t

    @property
    def output_quad(self) -> np.ndarray:
        return np.array([[self.k1, self.k2 / 2], [self.k2 / 2, self.k3]]) / self.t

    @property
    def cross(self) -> np.ndarray:
        """Matrix M with cross phase x^T (M/T) u; equals -B^{-1} * T ... times 1/T."""
        return np.array([[self.m1, self.m2], [self.m3, self.m4]])


def derive_coeffs(p: ParamSet) -> DerivedCoeffs:
    """Compute T and the nine kernel coefficients from a non-identity point."""
    if p.is_identity:
        raise IdentityPointError("kernel coefficients are undefined at the identity point")
    a, b, c, d, th = p.as_tuple()
    sn, cs = math.sin(th), math.cos(th)
    t = p.t_value
    if abs(t) <= T_TOL:
        raise ZeroTError(f"T = {t!r} is numerically zero for {p.as_tuple()}")
    sc = sn * cs
    return DerivedCoeffs(
        t=t,
        p1=sc - a * c + b * d,
        p2=-2.0 * (b * c + a * d),
        p3=sc + a * c - b * d,
        m1=-a * sn + c * cs,
        m2=b * sn + d * cs,
        m3=-b * sn + d * cs,
        m4=-a * sn - c * cs,
        k1=sc - a * c - b * d,
        k2=2.0 * (b * c - a * d),
        k3=sc + a * c + b * d,
    )


@dataclass(frozen=True)
class SymplecticSpec:
    """2x2 block pair (A, B); the 4x4 arrangement [A B; -B A] is a rotation."""

    a_block: np.ndarray
    b_block: np.ndarray

    def __post_init__(self):
        a = np.array(self.a_block, dtype=float)
        b = np.array(self.b_block, dtype=float)
        if a.shape != (2, 2) or b.shape != (2, 2):
            raise ValueError("blocks must be 2x2")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a_block", a)
        object.__setattr__(self, "b_block", b)

    @property
    def t_value(self) -> float:
        return float(np.linalg.det(self.b_block))

    def matrix4(self) -> np.ndarray:
        """The 4x4 matrix [A B; -B A]."""
        return np.block([
            [self.a_block, self.b_block],
            [-self.b_block, self.a_block],
        ])


def _blocks(p: ParamSet) -> tuple[np.ndarray, np.ndarray]:
    a, b, c, d, th = p.as_tuple()
    sn, cs = math.sin(th), math.cos(th)
    blk_a = np.array([
        [a * cs - c * sn, b * cs - d * sn],
        [-b * cs - d * sn, a * cs + c * sn],
    ])
    blk_b = np.array([
        [a * sn + c * cs, b * sn + d * cs],
        [-b * sn + d * cs, a * sn - c * cs],
    ])
    return blk_a, blk_b


def blocks_from_params(p: ParamSet) -> SymplecticSpec:
    """Block pair (A, B) of a non-identity point; det(B) = T."""
    if p.is_identity:
        raise IdentityPointError("the identity point has no invertible B block")
    blk_a, blk_b = _blocks(p)
    return SymplecticSpec(blk_a, blk_b)


def rotation4_from_params(p: ParamSet) -> np.ndarray:
    """4D rotation mapping phase-space points (x, y, u, v) under the transform.

    Equals [[A^T, -B^T], [B^T, A^T]]; orthogonal with determinant +1.
    Valid at every point including the identity (where it is the 4x4
    identity matrix).
    """
    blk_a, blk_b = _blocks(p)
    return np.block([
        [blk_a.T, -blk_b.T],
        [blk_b.T, blk_a.T],
    ])


def invert_spec(s: SymplecticSpec) -> SymplecticSpec:
    """Block pair of the inverse transform: (A^T, -B^T)."""
    return SymplecticSpec(s.a_block.T, -s.b_block.T)


# ---------------------------------------------------------------------------
# quaternion structure of the 4D rotations
# ---------------------------------------------------------------------------

def left_matrix(q: np.ndarray) -> np.ndarray:
    """4x4 matrix of left multiplication by the quaternion q = (w, x, y, z)."""
    w, x, y, z = q
    return np.array([
        [w, -x, -y, -z],
        [x, w, -z, y],
        [y, z, w, -x],
        [z, -y, x, w],
    ])


def right_matrix(q: np.ndarray) -> np.ndarray:
    """4x4 matrix of right multiplication by the quaternion q = (w, x, y, z)."""
    w, x, y, z = q
    return np.array([
        [w, -x, -y, -z],
        [x, w, z, -y],
        [y, -z, w, x],
        [z, y, -x, w],
    ])


@dataclass(frozen=True)
class QuaternionPair:
    """Unit quaternion pair (left, right) with rotation left_matrix @ right_matrix."""

    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        left = np.array(self.left, dtype=float)
        right = np.array(self.right, dtype=float)
        for name, q in (("left", left), ("right", right)):
            if q.shape != (4,):
                raise ValueError(f"{name} quaternion must have four components")
            if abs(np.linalg.norm(q) - 1.0) > 1e-9:
                raise ValueError(f"{name} quaternion is not unit length")
            q.setflags(write=False)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def matrix(self) -> np.ndarray:
        return left_matrix(self.left) @ right_matrix(self.right)


# Frobenius-orthogonal basis left_matrix(e_i) @ right_matrix(e_j); projecting a
# rotation onto it recovers the rank-one outer product left * right^T.
_EYE4 = np.eye(4)
_PAIR_BASIS = np.array([
    [left_matrix(_EYE4[i]) @ right_matrix(_EYE4[j]) for j in range(4)]
    for i in range(4)
])


def quaternion_factorize(rot: np.ndarray) -> QuaternionPair:
    """Split a 4D rotation into left/right unit quaternion factors.

    The sign ambiguity (both quaternions may be jointly negated) is fixed
    by making the first nonzero component of the left quaternion positive.
    """
    rot = np.asarray(rot, dtype=float)
    if rot.shape != (4, 4):
        raise NotARotationError("expected a 4x4 matrix")
    if np.max(np.abs(rot.T @ rot - np.eye(4))) > ROTATION_TOL:
        raise NotARotationError("matrix is not orthogonal within 1e-9")
    if abs(np.linalg.det(rot) - 1.0) > ROTATION_TOL:
        raise NotARotationError("matrix determinant is not +1 within 1e-9")

    outer = np.einsum("ijkl,kl->ij", _PAIR_BASIS, rot) / 4.0
    u, sigma, vt = np.linalg.svd(outer)
    if sigma[0] < 1.0 - 1e-6 or sigma[1] > 1e-6:
        raise NotARotationError("matrix is not generated by a quaternion pair")
    left, right = u[:, 0], vt[0, :]
    nz = np.nonzero(np.abs(left) > 1e-12)[0][0]
    if left[nz] < 0:
        left, right = -left, -right
    return QuaternionPair(left / np.linalg.norm(left), right / np.linalg.norm(right))


# ---------------------------------------------------------------------------
# special-case embeddings
# ---------------------------------------------------------------------------

def params_from_sfrft(alpha1: float, alpha2: float) -> ParamSet:
    """Embed the separable fractional Fourier transform with angles (alpha1, alpha2).

    Returns (cos((a1-a2)/2), 0, sin((a1-a2)/2), 0, (a1+a2)/2); then
    A = diag(cos a1, cos a2) and B = diag(sin a1, sin a2).
    """
    t = math.sin(alpha1) * math.sin(alpha2)
    if abs(t) <= T_TOL:
        raise ZeroTError(
            f"separable embedding degenerate: T = sin({alpha1}) sin({alpha2}) = {t!r}"
        )
    half_diff = (alpha1 - alpha2) / 2.0
    return ParamSet(math.cos(half_diff), 0.0, math.sin(half_diff), 0.0,
                    (alpha1 + alpha2) / 2.0)


def params_from_gt(phi: float) -> ParamSet:
    """Embed the gyrator transform with angle phi: (cos phi, 0, 0, sin phi, 0)."""
    t = -math.sin(phi) ** 2
    if abs(t) <= T_TOL:
        raise ZeroTError(f"gyrator embedding degenerate: T = -sin^2({phi}) = {t!r}")
    return ParamSet(math.cos(phi), 0.0, 0.0, math.sin(phi), 0.0)


def params_from_cfrft(alpha: float, beta: float) -> ParamSet:
    """Embed the coupled fractional Fourier transform with angles (alpha, beta).

    With gamma = (alpha+beta)/2 and delta = (alpha-beta)/2 the point is
    (cos delta, -sin delta, 0, 0, gamma).
    """
    gamma = (alpha + beta) / 2.0
    t = math.sin(gamma) ** 2
    if abs(t) <= T_TOL:
        raise ZeroTError(f"coupled embedding degenerate: T = sin^2({gamma}) = {t!r}")
    delta = (alpha - beta) / 2.0
    return ParamSet(math.cos(delta), -math.sin(delta), 0.0, 0.0, gamma)


def resolve_params(descriptor: dict) -> ParamSet:
    """Build a ParamSet from a JSON-style descriptor.

    Accepts either the explicit form {"a":..., "b":..., "c":..., "d":...,
    "theta":...} or one of the shorthands {"sfrft": [a1, a2]}, {"gt": phi},
    {"cfrft": [alpha, beta]}.
    """
    if "sfrft" in descriptor:
        a1, a2 = descriptor["sfrft"]
        return params_from_sfrft(float(a1), float(a2))
    if "gt" in descriptor:
        return params_from_gt(float(descriptor["gt"]))
    if "cfrft" in descriptor:
        al, be = descriptor["cfrft"]
        return params_from_cfrft(float(al), float(be))
    try:
        return ParamSet(
            float(descriptor["a"]),
            float(descriptor["b"]),
            float(descriptor["c"]),
            float(descriptor["d"]),
            float(descriptor["theta"]),
        )
    except KeyError as exc:
        raise ValueError(f"parameter descriptor missing key {exc}") from exc
