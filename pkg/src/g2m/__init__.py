"""Grid-to-matrix transcription benchmark toolkit.

Pieces: deterministic grid generation (grid_gen), canonical prompts
(prompts), cascading response parsing (parsing), scoring (metrics),
patch-boundary geometry (patch_geometry), spatial probes over frozen
features (probe, g2mf), the evaluation harness (harness), and reporting
(report).
"""

__version__ = "0.1.0"

from . import g2mf, grid_gen, harness, metrics, parsing, patch_geometry, probe, prompts, report, rng

__all__ = ["g2mf", "grid_gen", "harness", "metrics", "parsing",
           "patch_geometry", "probe", "prompts", "report", "rng", "__version__"]
