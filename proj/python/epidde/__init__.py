"""Delay epidemic model toolkit, thin wrapper over the compiled core."""

try:
    from ._epidde import (  # installed package layout
        ModelParams,
        TempBetaModel,
        beta_at,
        classify_dfe,
        classify_endemic,
        critical_delay,
        disease_free_equilibrium,
        endemic_equilibrium,
        reproduction_number,
        simulate,
        temperature_sweep,
    )
except ImportError:  # build-tree layout: module sits next to the package
    from _epidde import (
        ModelParams,
        TempBetaModel,
        beta_at,
        classify_dfe,
        classify_endemic,
        critical_delay,
        disease_free_equilibrium,
        endemic_equilibrium,
        reproduction_number,
        simulate,
        temperature_sweep,
    )

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "TempBetaModel",
    "beta_at",
    "classify_dfe",
    "classify_endemic",
    "critical_delay",
    "disease_free_equilibrium",
    "endemic_equilibrium",
    "reproduction_number",
    "simulate",
    "temperature_sweep",
    "__version__",
]
