"""2D nonseparable fractional Fourier transform toolkit.

Exact O(N^4) evaluation, two O(N^2 log N) fast algorithms built from chirp
multiplication / chirp convolution / Fourier / affine operators, parameter
algebra unifying the separable FRFT, gyrator and coupled FRFT, plus
double-random-phase encryption, Wiener-style optimal filtering and chirp
bandpass/bandstop filtering.
"""

from .analysis import (
    ImpulseReport,
    RotationReport,
    WignerResult,
    impulse_report,
    predict_impulse_index,
    verify_wd_rotation,
    wigner2d,
)
from .apps import (
    FT_POINT,
    FilterMask,
    GAConfig,
    KeyMaterial,
    SearchResult,
    band_filter,
    band_mask,
    denoise_experiment,
    drped_decrypt,
    drped_encrypt,
    ga_search,
    key_sensitivity_sweep,
    multiplicative_filter,
    noise_variance_for,
    optimal_mask,
    wiener_denoise,
)
from .direct import (
    kernel_value,
    nsfrft_direct,
    nsfrft_inverse_direct,
    unitary_output_spacing,
)
from .errors import (
    DecompositionFailureError,
    DimensionMismatchError,
    GeometryMismatchError,
    IdentityPointError,
    NonSymmetricError,
    NonSymmetricFactorError,
    NotARotationError,
    NsfrftError,
    SingularMatrixError,
    TooLargeError,
    ZeroTError,
)
from .fast import (
    OperatorPlan,
    affine_resample,
    chirp_convolve,
    chirp_multiply,
    execute,
    fourier2d,
    grid_resolvable,
    invert_plan,
    nsfrft_fast,
    nsfrft_fast_inverse,
    plan_algorithm1,
    plan_algorithm2,
    plan_for,
)
from .grid import (
    ChirpSpec,
    ComplexGrid,
    DEFAULT_SHAPE,
    DEFAULT_SPACING,
    add_awgn,
    chirp,
    coordinate_axes,
    hermite_gaussian_2d,
    matched_chirp_for,
    matched_chirp_spec,
    mse,
    newton_rings,
    nmse,
    psnr,
    second_order_hermite,
    ssim,
)
from .gridio import load_cgrid, load_png, save_cgrid, save_png, write_csv
from .params import (
    IDENTITY_POINT,
    DerivedCoeffs,
    ParamSet,
    QuaternionPair,
    SymplecticSpec,
    blocks_from_params,
    derive_coeffs,
    invert_spec,
    params_from_cfrft,
    params_from_gt,
    params_from_sfrft,
    quaternion_factorize,
    resolve_params,
    rotation4_from_params,
)
