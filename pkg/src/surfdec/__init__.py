"""Surface-code decoding workbench.

Simulates Pauli noise on rotated surface codes (d = 3, 5, 7), decodes with an
exact minimum-weight-perfect-matching baseline and a two-level neural decoder,
and runs the Monte Carlo studies (pseudo-threshold, threshold, model
complexity, train/test ratio) that compare them.
"""

__version__ = "0.1.0"

from .code import (  # noqa: F401
    CodeLayout,
    LayoutError,
    LogicalClass,
    NonzeroSyndromeError,
    Pauli,
    PauliFrame,
    StabilizerCheck,
    build_layout,
    embed_syndrome_grid,
    extract_syndrome_bits,
    layout_dump,
    logical_class,
    syndrome,
)
from .noise import NoiseModel, RngStream, cycle_error_probability, make_noise, sample_error  # noqa: F401
from .mwpm import decode_mwpm, extract_defects, build_defect_graph, min_weight_matching  # noqa: F401
