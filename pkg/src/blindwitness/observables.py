"""Measured quantities on composite states.

States are flat vectors in the composite basis of :mod:`blindwitness.composite`;
the number of witnesses is inferred from the length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .device import N_SITES, OUTPUT_SITE

MIN_SWEEP_SAMPLES = 101


def _layers(psi: np.ndarray, device_dim: int = N_SITES) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    n_configs, rem = divmod(psi.size, device_dim)
    if rem or n_configs & (n_configs - 1):
        raise ValueError(f"state length {psi.size} is not 2**n * {device_dim}")
    return psi.reshape(n_configs, device_dim)


def n_witnesses(psi: np.ndarray, device_dim: int = N_SITES) -> int:
    return _layers(psi, device_dim).shape[0].bit_length() - 1


def site_probabilities(psi: np.ndarray) -> np.ndarray:
    """Device-site probabilities, marginalised over witness configurations."""
    return np.sum(np.abs(_layers(psi)) ** 2, axis=0)


def p_out(psi: np.ndarray, site: int = OUTPUT_SITE) -> float:
    return float(site_probabilities(psi)[site - 1])


def _extrema(p_out_values) -> tuple[float, float]:
    p = np.asarray(p_out_values, dtype=float)
    if p.size == 0:
        raise ValueError("empty sweep")
    return float(p.max()), float(p.min())


def normalized_output(p_out_values) -> np.ndarray:
    """``(P_out - P_mid) / P_mid`` with ``P_mid`` the midpoint of the sampled extrema."""
    p_max, p_min = _extrema(p_out_values)
    p_mid = 0.5 * (p_max + p_min)
    if p_mid <= 0:
        raise ValueError("degenerate sweep: output probability vanishes everywhere")
    return (np.asarray(p_out_values, dtype=float) - p_mid) / p_mid


def visibility(flux, p_out_values) -> float:
    """``(P_max - P_min) / (P_max + P_min)`` over a sweep spanning a full flux period."""
    flux = np.asarray(flux, dtype=float)
    p = np.asarray(p_out_values, dtype=float)
    if flux.shape != p.shape:
        raise ValueError("flux and P_out arrays differ in shape")
    if p.size < MIN_SWEEP_SAMPLES:
        raise ValueError(f"sweep needs at least {MIN_SWEEP_SAMPLES} samples, got {p.size}")
    if np.ptp(flux) < 1.0 - 1e-12:
        raise ValueError("sweep must cover at least one full flux period")
    p_max, p_min = _extrema(p)
    if p_max + p_min <= 0:
        raise ValueError("degenerate sweep: output probability vanishes everywhere")
    return (p_max - p_min) / (p_max + p_min)


def bloch_vectors(psi: np.ndarray) -> np.ndarray:
    """Pauli expectations ``(lx, ly, lz)`` for every witness, shape ``(n_wit, 3)``.

    Uses the alpha/beta amplitude overlap: with ``a`` the layer where witness m
    is on alpha and ``b`` its partner with m on beta, ``lx + i ly = 2 <a|b>``.
    """
    layers = _layers(psi)
    n_configs = layers.shape[0]
    n_wit = n_configs.bit_length() - 1
    w = np.arange(n_configs)
    out = np.empty((n_wit, 3))
    for m in range(n_wit):
        on_alpha = (w >> m) & 1 == 0
        a = layers[on_alpha]
        b = layers[w[on_alpha] | (1 << m)]
        overlap = 2 * np.vdot(a, b)
        out[m] = overlap.real, overlap.imag, np.vdot(a, a).real - np.vdot(b, b).real
    return out


def witness_density_matrix(psi: np.ndarray, m: int) -> np.ndarray:
    """2x2 reduced density matrix of witness ``m`` (0-based) by explicit partial trace."""
    layers = _layers(psi)
    n_wit = layers.shape[0].bit_length() - 1
    if not 0 <= m < n_wit:
        raise IndexError(f"witness {m} out of range for {n_wit} witnesses")
    # axes: witnesses from highest bit down to bit 0, then device
    t = layers.reshape((2,) * n_wit + (N_SITES,))
    axis = n_wit - 1 - m
    t = np.moveaxis(t, axis, 0).reshape(2, -1)
    return t @ t.conj().T


def device_density_matrix(psi: np.ndarray) -> np.ndarray:
    """``rho(j, j') = sum_w psi(w, j) psi*(w, j')``."""
    layers = _layers(psi)
    return layers.T @ layers.conj()


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy in bits; zero eigenvalues contribute nothing."""
    ev = np.linalg.eigvalsh(rho)
    ev = ev[ev > 1e-15]
    return float(max(0.0, -np.sum(ev * np.log2(ev))))


def binary_entropy(p) -> np.ndarray:
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -p * np.log2(p) - (1 - p) * np.log2(1 - p)
    return np.nan_to_num(h, nan=0.0)


def bloch_entropy(bloch: np.ndarray) -> np.ndarray:
    """Two-level entropy from Bloch vectors; eigenvalues are ``(1 +/- |lambda|) / 2``."""
    length = np.linalg.norm(np.atleast_2d(bloch), axis=-1)
    return binary_entropy((1 + np.minimum(length, 1.0)) / 2)


def coherence_angles(bloch: np.ndarray) -> np.ndarray:
    bloch = np.atleast_2d(bloch)
    return np.arctan2(bloch[:, 1], bloch[:, 0])


def witness_site_occupancy(psi: np.ndarray, m: int) -> tuple[float, float]:
    """Marginal probabilities ``(p_alpha, p_beta)`` of witness ``m`` (0-based)."""
    layers = _layers(psi)
    n_wit = layers.shape[0].bit_length() - 1
    if n_wit == 0:
        raise ValueError("state has no witnesses")
    if not 0 <= m < n_wit:
        raise IndexError(f"witness {m} out of range for {n_wit} witnesses")
    weight = np.sum(np.abs(layers) ** 2, axis=1)
    on_beta = (np.arange(layers.shape[0]) >> m) & 1 == 1
    return float(weight[~on_beta].sum()), float(weight[on_beta].sum())


@dataclass
class WitnessReport:
    bloch: np.ndarray
    theta: np.ndarray
    entropy: np.ndarray
    device_entropy: float


def witness_report(psi: np.ndarray) -> WitnessReport:
    bloch = bloch_vectors(psi)
    return WitnessReport(
        bloch=bloch,
        theta=coherence_angles(bloch),
        entropy=bloch_entropy(bloch) if len(bloch) else np.zeros(0),
        device_entropy=von_neumann_entropy(device_density_matrix(psi)),
    )
