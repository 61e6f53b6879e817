"""Device coupled to two-state witnesses.

Composite basis index: ``g = w * 35 + (j - 1)``.  Bit ``m - 1`` of the
witness configuration ``w`` is 0 when witness ``m`` sits on its alpha dot
(the one next to the device) and 1 for the beta dot.  A composite state is
therefore a flat vector that reshapes to ``(2**n_wit, 35)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .device import branch_site

STANDARD_LAYOUTS: dict[int, tuple[str, ...]] = {
    0: (),
    2: ("3", "3'"),
    4: ("1", "1'", "5", "5'"),
    6: ("1", "1'", "3", "3'", "5", "5'"),
    8: ("1", "1'", "2", "2'", "4", "4'", "5", "5'"),
}

NORM_TOL = 1e-9


@dataclass(frozen=True)
class WitnessSpec:
    position: str
    e_int: float = 5.0
    gamma_w: float = 0.0

    @property
    def site(self) -> int:
        return branch_site(self.position)

    @property
    def blind(self) -> bool:
        return self.gamma_w == 0


def standard_witness_layout(n_wit: int) -> list[str]:
    try:
        return list(STANDARD_LAYOUTS[n_wit])
    except KeyError:
        raise ValueError(
            f"no standard layout for {n_wit} witnesses "
            f"(choose from {sorted(STANDARD_LAYOUTS)}); layout requires explicit positions"
        ) from None


def make_witnesses(
    positions: Sequence[str], e_int: float = 5.0, gamma_w: float = 0.0
) -> list[WitnessSpec]:
    return [WitnessSpec(str(p), float(e_int), float(gamma_w)) for p in positions]


def config_bits(n_wit: int) -> np.ndarray:
    """``bits[w, m]`` is 0 if witness m is on alpha in configuration w, else 1."""
    w = np.arange(2**n_wit)[:, None]
    return (w >> np.arange(n_wit)[None, :]) & 1


@dataclass(frozen=True)
class CompositeModel:
    """Device Hamiltonian plus a roster of witnesses."""

    device_hamiltonian: np.ndarray
    witnesses: tuple[WitnessSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "witnesses", tuple(self.witnesses))
        sites = [w.site for w in self.witnesses]
        if len(set(sites)) != len(sites):
            raise ValueError(f"duplicate witness positions: {[w.position for w in self.witnesses]}")
        H = np.asarray(self.device_hamiltonian)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValueError("device Hamiltonian must be square")

    @property
    def n_wit(self) -> int:
        return len(self.witnesses)

    @property
    def n_configs(self) -> int:
        return 2**self.n_wit

    @property
    def device_dim(self) -> int:
        return self.device_hamiltonian.shape[0]

    @property
    def dim(self) -> int:
        return self.n_configs * self.device_dim

    @property
    def blind(self) -> bool:
        return all(w.blind for w in self.witnesses)

    def layer_potentials(self) -> np.ndarray:
        """On-site potentials of every configuration layer, shape ``(2**n_wit, 35)``.

        Witness m adds ``e_int`` on its partner site in layers where it is on alpha.
        """
        V = np.zeros((self.n_configs, self.device_dim))
        bits = config_bits(self.n_wit)
        for m, wit in enumerate(self.witnesses):
            V[bits[:, m] == 0, wit.site - 1] += wit.e_int
        return V

    def layer_hamiltonians(self) -> np.ndarray:
        """Diagonal blocks of the total Hamiltonian, shape ``(2**n_wit, 35, 35)``."""
        blocks = np.broadcast_to(
            self.device_hamiltonian, (self.n_configs, self.device_dim, self.device_dim)
        ).copy()
        idx = np.arange(self.device_dim)
        blocks[:, idx, idx] += self.layer_potentials()
        return blocks

    def layer(self, w: int) -> np.ndarray:
        H = np.array(self.device_hamiltonian, dtype=complex, copy=True)
        H[np.diag_indices_from(H)] += self.layer_potentials()[w]
        return H

    def dense(self) -> np.ndarray:
        """Full Hamiltonian on the composite space, including witness tunnelling."""
        n, d = self.n_configs, self.device_dim
        H = np.zeros((n, d, n, d), dtype=complex)
        blocks = self.layer_hamiltonians()
        for w in range(n):
            H[w, :, w, :] = blocks[w]
        eye = np.eye(d)
        for m, wit in enumerate(self.witnesses):
            if wit.gamma_w == 0:
                continue
            for w in range(n):
                H[w ^ (1 << m), :, w, :] += -wit.gamma_w * eye
        return H.reshape(n * d, n * d)

    def initial_state(
        self, packet: np.ndarray, witness_phases: Sequence[float] | None = None
    ) -> np.ndarray:
        """Product of ``(|alpha> + e^{i theta_m}|beta>)/sqrt(2)`` witnesses with ``packet``."""
        packet = np.asarray(packet, dtype=complex)
        if packet.shape != (self.device_dim,):
            raise ValueError(f"packet must have shape ({self.device_dim},)")
        if abs(np.linalg.norm(packet) - 1) > NORM_TOL:
            raise ValueError("packet is not normalized")
        if witness_phases is None:
            witness_phases = np.zeros(self.n_wit)
        phases = np.asarray(witness_phases, dtype=float)
        if phases.shape != (self.n_wit,):
            raise ValueError(f"expected {self.n_wit} witness phases, got {phases.shape}")
        bits = config_bits(self.n_wit)
        weights = np.exp(1j * bits @ phases) / np.sqrt(self.n_configs)
        return (weights[:, None] * packet[None, :]).ravel()


def build_total_hamiltonian(H_d: np.ndarray, witnesses: Sequence[WitnessSpec]) -> CompositeModel:
    return CompositeModel(np.asarray(H_d, dtype=complex), tuple(witnesses))
