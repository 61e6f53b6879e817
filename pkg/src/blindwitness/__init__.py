"""Exact simulation of a two-branch interference device with blind two-state witnesses."""

__version__ = "0.1.0"

from .composite import (  # noqa: E402
    CompositeModel,
    WitnessSpec,
    build_total_hamiltonian,
    make_witnesses,
    standard_witness_layout,
)
from .device import (  # noqa: E402
    DeviceGeometry,
    add_static_scatterers,
    branch_site,
    build_device_hamiltonian,
    build_geometry,
)
from .evolution import (  # noqa: E402
    TAU,
    T_F,
    LayeredPropagator,
    SpectralPropagator,
    build_layered,
    build_propagator,
    build_spectral,
    evolve,
    gaussian_packet,
    layered_evolve_equivalence_check,
)

__all__ = [
    "CompositeModel",
    "DeviceGeometry",
    "LayeredPropagator",
    "SpectralPropagator",
    "TAU",
    "T_F",
    "WitnessSpec",
    "add_static_scatterers",
    "branch_site",
    "build_device_hamiltonian",
    "build_geometry",
    "build_layered",
    "build_propagator",
    "build_spectral",
    "build_total_hamiltonian",
    "evolve",
    "gaussian_packet",
    "layered_evolve_equivalence_check",
    "make_witnesses",
    "standard_witness_layout",
]
