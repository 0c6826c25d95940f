"""Render publication-style figures from simulation output files.

Decoupled from the simulator by design: the only contract is the frozen
CSV/JSON schema (version stamp checked on load), so the two packages can
evolve independently.
"""

from .io import DataError, RunData, SchemaError, load_run
from .render import STYLE_VERSION, render

__version__ = "0.1.0"
