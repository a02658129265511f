"""Batch figure renderer for spin-chain entanglement-tomography outputs.

Consumes only the toolkit's serialized CSV/JSON files and draws six
publication-style figure kinds deterministically (Agg canvas, pinned
fonts): bond-tension profiles, entropy-vs-boundary scatters with the Haar
reference, measured-vs-fitted parity plots, gap-ratio histograms with
GOE/COE/Poisson references, half-chain entropy growth curves, and
two-point mutual-information profiles.
"""
from .errors import SchemaError, SpecError, TomofigError
from .render import build_figure, render
from .spec import KINDS, FigureSpec, parse_spec_file

__version__ = "0.1.0"

__all__ = [
    "FigureSpec",
    "KINDS",
    "SchemaError",
    "SpecError",
    "TomofigError",
    "build_figure",
    "parse_spec_file",
    "render",
    "__version__",
]
