"""Link-level simulator of a full-duplex mmWave massive-MIMO point-to-point system.

The pipeline: geometric cluster channels between two full-duplex nodes plus a
near-field/far-field self-interference model; an analog RF stage that selects
orthogonal grid beams covering the intended angular supports while excluding
the self-interference supports; a baseband SVD precoder with water-filling and
either an SVD or a statistics-only MMSE combiner; an optional lossless
transfer-block factorization that cuts RF chains to the stream count; and a
deterministic Monte Carlo harness with CSV output.
"""

from .arrays import (
    AngleCoefficientPair,
    GridCell,
    UraGeometry,
    phase_response_matrix,
    phase_response_vector,
    quantized_angle_grid,
    steering_vector,
)
from .bbstage import (
    BbCombiner,
    BbPrecoder,
    SiCovarianceEstimate,
    effective_channel,
    estimate_si_covariance,
    normalize_combiner_rows,
    smmse_combiner,
    smmse_objective,
    svd_combiner,
    svd_precoder,
    waterfill,
)
from .channel import (
    ChannelRealization,
    ClusterSpec,
    DuplexPlacement,
    PathSet,
    angular_support,
    composite_si_channel,
    far_field_si_channel,
    intended_channel,
    near_field_si_channel,
    sample_paths,
)
from .config import (
    ARCHITECTURES,
    NodeConfig,
    SimConfig,
    config_from_dict,
    config_to_dict,
    default_config,
    load_config,
    save_config,
    with_square_arrays,
    with_stream_counts,
)
from .harness import (
    CSV_HEADER,
    SWEEP_PARAMETERS,
    RealizationResult,
    SweepRecord,
    SweepResult,
    apply_sweep_value,
    count_failures,
    read_csv,
    realization_seed,
    run_realization,
    run_sweep,
    write_csv,
)
from .metrics import (
    HardwareBudget,
    LinkMetrics,
    NodeDims,
    NoiseModel,
    StreamPowers,
    achievable_rate_fd,
    achievable_rate_hd,
    energy_efficiency,
    hardware_budget,
    interference_noise_covariance,
    per_stream_powers,
)
from .rfstage import (
    RfBeamformerPair,
    build_rf_beamformers,
    draw_coefficient_error,
    identity_rf_pair,
    perturb_support_coefficients,
    select_angle_pairs,
    select_grid_cells,
)
from .supports import (
    AngularSupport,
    support_boundary_polyline,
    support_bounding_box,
    support_contains,
    support_intersects_box,
)
from .transfer import TransferDecomposition, decompose_combiner, decompose_precoder

__version__ = "0.1.0"
