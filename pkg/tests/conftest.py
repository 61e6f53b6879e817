import numpy as np
import pytest

from blindwitness.composite import CompositeModel, make_witnesses, standard_witness_layout
from blindwitness.device import build_device_hamiltonian, build_geometry
from blindwitness.evolution import gaussian_packet

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def geom():
    return build_geometry()


@pytest.fixture(scope="session")
def packet(geom):
    return gaussian_packet(geom)


@pytest.fixture
def make_model(geom):
    def _make(n_wit=0, flux=0.0, e_int=5.0, positions=None, gamma_w=0.0):
        if positions is None:
            positions = standard_witness_layout(n_wit)
        H = build_device_hamiltonian(geom, flux=flux)
        return CompositeModel(H, tuple(make_witnesses(positions, e_int, gamma_w)))

    return _make


def random_state(rng, n_wit, dim=35):
    psi = rng.normal(size=2**n_wit * dim) + 1j * rng.normal(size=2**n_wit * dim)
    return psi / np.linalg.norm(psi)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
