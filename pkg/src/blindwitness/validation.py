"""Fast self-checks of the numerical invariants, used by ``blindwitness validate``."""

from __future__ import annotations

from typing import Callable, Iterator

import numpy as np

from .composite import CompositeModel, make_witnesses, standard_witness_layout
from .device import build_device_hamiltonian, build_geometry, loop_phase
from .evolution import T_F, TAU, build_layered, build_spectral, gaussian_packet
from .observables import (
    bloch_entropy,
    bloch_vectors,
    site_probabilities,
    witness_density_matrix,
    witness_site_occupancy,
)

GEOM = build_geometry()
PACKET = gaussian_packet(GEOM)


def _model(n_wit: int, flux: float, e_int: float = 5.0) -> CompositeModel:
    H = build_device_hamiltonian(GEOM, flux=flux)
    return CompositeModel(H, tuple(make_witnesses(standard_witness_layout(n_wit), e_int)))


def check_hermiticity() -> float:
    return max(
        float(np.abs(H - H.conj().T).max())
        for H in (build_device_hamiltonian(GEOM, flux=f) for f in np.linspace(-1, 1, 21))
    )


def check_loop_phase() -> float:
    rng = np.random.default_rng(0)
    worst = 0.0
    for f in rng.uniform(-3, 3, 100):
        d = loop_phase(build_device_hamiltonian(GEOM, flux=f)) - 2 * np.pi * f
        worst = max(worst, abs(np.angle(np.exp(1j * d))))
    return worst


def check_unitarity() -> float:
    model = _model(2, 0.3)
    prop = build_spectral(model)
    states = prop.evolve_many(model.initial_state(PACKET), np.linspace(0, 3 * T_F, 40))
    return float(np.abs(np.linalg.norm(states, axis=1) - 1).max())


def check_energy_conservation() -> float:
    model = _model(2, 0.3)
    H = model.dense()
    prop = build_spectral(H)
    states = prop.evolve_many(model.initial_state(PACKET), np.linspace(0, 3 * T_F, 40))
    energies = np.einsum("ti,ij,tj->t", states.conj(), H, states).real
    return float(np.ptp(energies))


def check_reversibility() -> float:
    model = _model(2, 0.3)
    prop = build_spectral(model)
    psi0 = model.initial_state(PACKET)
    back = prop.evolve(prop.evolve(psi0, 2.7 * TAU), -2.7 * TAU)
    return float(np.abs(back - psi0).max())


def check_layered_equivalence() -> float:
    model = _model(4, 0.37, 7.0)
    psi0 = model.initial_state(PACKET)
    times = [TAU, 3 * TAU, T_F]
    dense = build_spectral(model).evolve_many(psi0, times)
    layered = build_layered(model).evolve_many(psi0, times)
    return float(np.abs(dense - layered).max())


def _blind_states(flux: float = 0.5) -> np.ndarray:
    model = _model(6, flux)
    prop = build_layered(model)
    return prop.evolve_many(model.initial_state(PACKET), np.linspace(0, T_F, 25))


def check_lambda_z() -> float:
    return float(max(np.abs(bloch_vectors(psi)[:, 2]).max() for psi in _blind_states()))


def check_witness_occupancy() -> float:
    worst = 0.0
    for psi in _blind_states():
        for m in range(6):
            pa, pb = witness_site_occupancy(psi, m)
            worst = max(worst, abs(pa - 0.5), abs(pb - 0.5))
    return worst


def check_entropy_bloch() -> float:
    worst = 0.0
    for psi in _blind_states():
        bloch = bloch_vectors(psi)
        s_bloch = bloch_entropy(bloch)
        for m in range(6):
            ev = np.clip(np.linalg.eigvalsh(witness_density_matrix(psi, m)), 1e-300, 1)
            s_rho = float(-(ev * np.log2(ev)).sum())
            worst = max(worst, abs(s_rho - s_bloch[m]))
    return worst


def check_flux_periodicity() -> float:
    def p_out(f):
        model = _model(0, f)
        psi = build_spectral(model).evolve(model.initial_state(PACKET), T_F)
        return site_probabilities(psi)[GEOM.output_site - 1]

    return max(abs(p_out(f) - p_out(f + 1)) for f in (0.0, 0.21, 0.5, -0.33))


def check_destructive_zero() -> float:
    model = _model(0, 0.5)
    psi = build_spectral(model).evolve(model.initial_state(PACKET), T_F)
    return float(site_probabilities(psi)[GEOM.output_site - 1])


CHECKS: list[tuple[str, Callable[[], float], float]] = [
    ("hermiticity", check_hermiticity, 1e-12),
    ("gauge loop phase", check_loop_phase, 1e-10),
    ("unitarity", check_unitarity, 1e-10),
    ("energy conservation", check_energy_conservation, 1e-10),
    ("reversibility", check_reversibility, 1e-10),
    ("layered vs dense", check_layered_equivalence, 1e-10),
    ("lambda_z stays zero", check_lambda_z, 1e-10),
    ("witness occupancy 1/2", check_witness_occupancy, 1e-10),
    ("entropy-Bloch consistency", check_entropy_bloch, 1e-9),
    ("flux periodicity", check_flux_periodicity, 1e-10),
    ("destructive zero at flux 1/2", check_destructive_zero, 1e-10),
]


def run_checks() -> Iterator[tuple[str, bool, float, float]]:
    for name, fn, tol in CHECKS:
        value = fn()
        yield name, bool(value < tol), value, tol
