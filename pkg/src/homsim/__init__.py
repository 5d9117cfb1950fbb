"""Two- and four-photon Hong-Ou-Mandel interference for spectrally correlated biphotons."""

__version__ = "0.1.0"

from .errors import (
    HomsimError,
    JsaFormatError,
    MemoryBoundError,
    NormalizationError,
    OracleCapError,
    ParameterError,
    PreconditionError,
)
from .spectral import (
    FrequencyGrid,
    GaussianJsaParams,
    SampledJsa,
    exchange_symmetry_defect,
    gaussian_jsa,
    gaussian_sigma_from_fwhm,
    load_jsa,
    make_grid,
    marginals,
    normalize,
    save_jsa,
    shift_jsa,
)
from .terms import DetectionScheme, Term, TermTable, table_for, term_table, two_photon_table
from .engine import (
    DelayKernelSet,
    InterferencePattern,
    baseline,
    build_kernels,
    pattern,
    pattern_symmetric_22,
)
from .twophoton import two_photon_pattern
from .oracle import oracle_pattern
from .analysis import (
    MonotonicityReport,
    classify_monotonic,
    feature_width,
    symmetry_residual_31,
    visibility,
)
