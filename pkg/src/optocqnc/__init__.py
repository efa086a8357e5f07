"""Force-noise spectra, stability and optical-spring analysis for a two-mode
optomechanical sensor with coherent quantum noise cancellation.

All rates are in units of the mechanical frequency. See :mod:`optocqnc.cli`
for the command-line interface.
"""

__version__ = "0.1.0"

from .params import (  # noqa: E402
    AncillaCoupling,
    PumpParams,
    SystemParams,
    matched_ancilla,
    validate,
)
from .spectra import (  # noqa: E402
    cancellation_ratio,
    noise_spectrum_cqnc,
    noise_spectrum_free,
    sql_optimal_g,
    sql_spectrum,
)

__all__ = [
    "__version__",
    "AncillaCoupling",
    "PumpParams",
    "SystemParams",
    "matched_ancilla",
    "validate",
    "cancellation_ratio",
    "noise_spectrum_cqnc",
    "noise_spectrum_free",
    "sql_optimal_g",
    "sql_spectrum",
]
