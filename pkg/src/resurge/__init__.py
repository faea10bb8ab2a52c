"""Écalle–Voronin invariants of simple parabolic germs from resurgent residua, with a horn-map cross-check."""

__version__ = "0.1.0"

from .alien import AlienConfig, ResiduaResult, VariationReport, bridge_check, cont_phi_k, ev_invariant, residua, sum_residua, variation_at  # noqa: E402
from .germ import GermData, GermSpec, germ_data, preset  # noqa: E402
from .grid import GridConfig  # noqa: E402
from .horn import FourierResult, HornOracle, OracleConfig, horn_fourier  # noqa: E402

__all__ = [
    "AlienConfig", "FourierResult", "GermData", "GermSpec", "GridConfig", "HornOracle", "OracleConfig",
    "ResiduaResult", "VariationReport", "bridge_check", "cont_phi_k", "ev_invariant", "germ_data",
    "horn_fourier", "preset", "residua", "sum_residua", "variation_at",
]
