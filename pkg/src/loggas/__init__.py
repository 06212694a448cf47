"""Partition functions of one-dimensional multicomponent log-gases.

The canonical and isocharge grand canonical partition functions are
evaluated as Berezin integrals of forms built from Wronskian integrals,
with brute-force oracles and a generalized de Bruijn checker alongside.
"""

from .ensemble import (EnsembleSpec, canonical_partition, eta_form, gamma_form, grand_partition,
                       single_species_pfaffian)
from .errors import ConfigError, DomainError, QuadratureError, ResourceError
from .exterior import Multivector, berezin_exp, berezin_volume, exp_truncated, hyperpfaffian, wedge
from .quadrature import Estimate, Measure, QuadratureSpec

__all__ = [
    "EnsembleSpec", "canonical_partition", "grand_partition", "single_species_pfaffian",
    "gamma_form", "eta_form", "Multivector", "wedge", "berezin_volume", "berezin_exp",
    "exp_truncated", "hyperpfaffian", "Estimate", "Measure", "QuadratureSpec",
    "ConfigError", "DomainError", "QuadratureError", "ResourceError",
]

__version__ = "0.1.0"
