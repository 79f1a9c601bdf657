"""Crossbar velostat pressure-pad simulator.

Simulates the electrical sneak paths and mechanical force diffusion of a
piezoresistive crossbar matrix, reconstructs writing-pad captures through
a four-stage pipeline, and quantifies crosstalk with a distance-weighted
per-pixel metric. Ships with a frame-log codec, a binary wire protocol,
a CLI, and an interactive session service.
"""

from .circuit import (
    ADC_COUNTS,
    FRAME_UNITS,
    Frame,
    MechanismFlags,
    NORMALIZED,
    ReadoutConfig,
    ResistorNetwork,
    VOLTS,
    VelostatModel,
    adc_quantize,
    build_network,
    read_pixel,
    scan_frame,
    velostat_resistance,
)
from .crosstalk import (
    CrosstalkAboveUnityWarning,
    CrosstalkInput,
    CrosstalkReport,
    Neighborhood,
    UndefinedMetricError,
    characterize,
    crosstalk,
    crosstalk_frame,
    neighborhood,
)
from .framelog import (
    FrameLogRecord,
    LogError,
    STAGES,
    frame_to_record,
    ingest_external,
    read_frame_log,
    record_to_frame,
    staged_records,
    write_frame_log,
)
from .geometry import (
    BendState,
    FLAT,
    GRAVITY,
    PressureField,
    SensorGeometry,
    StrokeEvent,
    WeightStimulus,
    bend_stress_field,
    bending_radius,
    curvature,
    diffuse_field,
    rasterize_stimulus,
)
from .pipeline import (
    PipelineConfig,
    StagedOutput,
    accumulate,
    adaptive_threshold,
    gaussian_blur,
    run_pipeline,
    softmax_normalize,
    square_and_normalize,
)
from .session import CaptureResult, PadSession, SessionConfig
from .wire import (
    DecodeDiagnostics,
    StreamDecoder,
    WireFrame,
    crc16_ccitt_false,
    decode_stream,
    encode_wire,
)

__version__ = "0.1.0"
