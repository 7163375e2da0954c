"""Discrete q-modulus of curve families on weighted networks."""
from .families import (Gamma0Bound, RhoN, gamma0_constants, gamma0_continuum_modulus,
                       gamma0_family, gamma0_modulus_bound, gamma0_network, radial_test_curves,
                       rho_N_density)
from .kernels import BACKEND
from .network import (Density, DiscreteCurve, MeasureNetwork, ModulusReport, NetworkError,
                      network_from_json, network_to_json)
from .rings import RingGrid, build_ring_network, ring_modulus
from .solver import (SolverConfig, curve_integrals, is_admissible, solve_connecting_modulus,
                     solve_modulus)

__all__ = [
    "BACKEND", "Density", "DiscreteCurve", "Gamma0Bound", "MeasureNetwork", "ModulusReport",
    "NetworkError", "RhoN", "RingGrid", "SolverConfig", "build_ring_network", "curve_integrals",
    "gamma0_constants", "gamma0_continuum_modulus", "gamma0_family", "gamma0_modulus_bound",
    "gamma0_network", "is_admissible", "network_from_json", "network_to_json",
    "radial_test_curves", "rho_N_density", "ring_modulus", "solve_connecting_modulus",
    "solve_modulus",
]
