import math

import numpy as np
import pytest

from nsfrft import (
    ComplexGrid,
    ParamSet,
    ZeroTError,
    blocks_from_params,
    hermite_gaussian_2d,
    second_order_hermite,
)

REF_SPACING = (0.1772, 0.1772)

# reference parameter sets exercised by the acceptance suite
P_AC1 = ParamSet(0.4033, 0.1555, 0.2851, -0.8555, math.pi / 8)
P_AC2 = ParamSet(0.1745, 0.5951, -0.7329, 0.2798, math.pi / 9)
P_RE = ParamSet(-0.1601, 0.6966, 0.2625, 0.6483, math.pi / 6)
P_ENC = ParamSet(0.7548, 0.4147, -0.0442, -0.5063, math.pi / 3)
P_CHIRP1 = ParamSet(0.5, 0.5, 0.5, 0.5, math.pi / 3)
P_CHIRP2 = ParamSet(-0.0046, 0.0016, -0.0241, 0.9997, math.pi / 6)
P_CHIRP3 = ParamSet(-0.0692, 0.0938, -0.8823, 0.4560, math.pi / 6)
P_CHIRP4 = ParamSet(0.1019, -0.2525, 0.8944, -0.3548, math.pi / 7)


def self_dual_spacing(n: int) -> tuple[float, float]:
    s = math.sqrt(2 * math.pi / n)
    return (s, s)


def g1_signal(shape=(200, 200), spacing=REF_SPACING) -> ComplexGrid:
    return second_order_hermite(shape, spacing)


def g2_signal(shape=(200, 200), spacing=REF_SPACING) -> ComplexGrid:
    a = hermite_gaussian_2d(1, 2, shape, spacing)
    b = hermite_gaussian_2d(3, 1, shape, spacing)
    return ComplexGrid(a.values + b.values, *spacing)


def random_params(rng, resolvable=False, row_limit=1.5, t_min=0.7) -> ParamSet:
    from nsfrft import grid_resolvable

    while True:
        vec = rng.standard_normal(4)
        vec /= np.linalg.norm(vec)
        try:
            p = ParamSet(*vec, rng.uniform(0.0, 2.0 * math.pi))
        except ZeroTError:
            continue
        if resolvable and not grid_resolvable(blocks_from_params(p), row_limit, t_min):
            continue
        return p


@pytest.fixture(scope="session")
def g1_200():
    return g1_signal()


@pytest.fixture(scope="session")
def g2_200():
    return g2_signal()


@pytest.fixture(scope="session")
def hermite_64():
    return hermite_gaussian_2d(1, 2, (64, 64), self_dual_spacing(64))
