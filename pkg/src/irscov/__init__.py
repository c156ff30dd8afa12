"""Coverage, outage and channel-hardening analysis for wireless links aided
by an intelligent reflecting surface, over Nakagami-m fading."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    FadingConfig,
    LinkGeometry,
    NakagamiParams,
    SystemParams,
    amplitude_threshold,
    bs_ue_distance,
    cascade_mean_var,
    double_nakagami_moment,
    noise_variance_w,
    path_gain_cascade,
    path_gain_direct,
    zeta_from_carrier,
)
from .specfun import (  # noqa: F401
    QuadratureError,
    QuadratureResult,
    erfc_complex,
    erfcx_complex,
    gamma_fn,
    integrate_adaptive,
    tanh_sinh,
)
from .mgf import (  # noqa: F401
    ChannelTransform,
    DegenerateTransform,
    DoubleNakagamiSumTransform,
    GammaSumTransform,
    GaussianTransform,
    NakagamiAmplitudeTransform,
    ProductTransform,
    cascade_transform_clt,
    cascade_transform_exact,
    cascade_transform_gamma_iid,
    direct_transform,
    double_nakagami_density,
    mgf_T,
    mgf_double_nakagami,
    mgf_nakagami,
    mgf_rayleigh_closed,
)
from .inversion import (  # noqa: F401
    InversionConfig,
    InversionError,
    InversionResult,
    ccdf,
    gil_pelaez_cdf,
)
from .coverage import (  # noqa: F401
    CoverageResult,
    IrsRangeResult,
    Scenario,
    channel_hardening_kappa,
    coverage,
    coverage_combined,
    coverage_direct,
    coverage_irs_only,
    irs_coverage_range,
    outage_irs_only,
)
from .montecarlo import (  # noqa: F401
    SimConfig,
    SimEstimate,
    estimate_hardening,
    sample_nakagami,
    simulate_coverage,
    simulate_threshold_curve,
)
