"""Feature-extraction shim: hooks vision encoders and writes G2MF files."""

__version__ = "0.1.0"

from .encoders import (ExtractionSpec, HFEncoder, PatchProjectionEncoder,
                       ShuffleStyleEncoder, TOY_SPECS, build_encoder)
from .extract import ExtractionError, extract, validate
from .g2mf_io import read_tensor, write_tensor

__all__ = ["ExtractionSpec", "HFEncoder", "PatchProjectionEncoder",
           "ShuffleStyleEncoder", "TOY_SPECS", "build_encoder",
           "ExtractionError", "extract", "validate",
           "read_tensor", "write_tensor", "__version__"]
