"""End-to-end experiments producing result tables."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .composite import CompositeModel, make_witnesses
from .config import ExperimentConfig
from .device import add_static_scatterers, build_device_hamiltonian, build_geometry
from .evolution import TAU, T_F, LayeredPropagator, build_propagator, gaussian_packet
from .observables import (
    bloch_entropy,
    bloch_vectors,
    coherence_angles,
    device_density_matrix,
    normalized_output,
    site_probabilities,
    visibility,
    von_neumann_entropy,
)

NORM_DRIFT_TOL = 1e-8

UNITS = {"hbar": 1, "gamma": 1, "a": 1, "tau": "pi*hbar/(2*gamma)", "T_f": "5.27 tau"}


class NumericalInvariantError(RuntimeError):
    pass


@dataclass
class ResultTable:
    columns: list[str]
    units: list[str]
    rows: np.ndarray
    metadata: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]


@dataclass(frozen=True)
class Scenario:
    """Everything that fixes the Hamiltonian and the initial state."""

    positions: tuple[str, ...] = ()
    e_int: float = 5.0
    gamma_w: float = 0.0
    phases: tuple[float, ...] | None = None
    scatterers: tuple[str, ...] = ()
    v_s: float = 0.0
    packet: tuple[float, float, float] = (5.0, 2.0, np.pi / 2)
    propagator: str = "auto"

    @classmethod
    def from_config(cls, cfg: ExperimentConfig, **overrides) -> "Scenario":
        kw = dict(
            positions=tuple(cfg.positions),
            e_int=cfg.e_int,
            gamma_w=cfg.gamma_w,
            phases=tuple(float(p) for p in cfg.phases()),
            packet=(cfg.packet.x0, cfg.packet.width, cfg.packet.k),
            propagator=cfg.propagator,
        )
        kw.update(overrides)
        return cls(**kw)

    def model(self, flux: float) -> CompositeModel:
        H = build_device_hamiltonian(GEOMETRY, flux=flux)
        if self.scatterers:
            H = add_static_scatterers(H, self.scatterers, self.v_s)
        return CompositeModel(H, tuple(make_witnesses(self.positions, self.e_int, self.gamma_w)))

    def states(self, flux: float, times: Sequence[float]) -> tuple[np.ndarray, str]:
        """Composite states at ``times`` (units of hbar/gamma) and the propagator path used."""
        model = self.model(flux)
        x0, width, k = self.packet
        psi0 = model.initial_state(gaussian_packet(GEOMETRY, x0, width, k), self.phases)
        prop = build_propagator(model, self.propagator)
        states = prop.evolve_many(psi0, times)
        check_norms(states)
        return states, "layered" if isinstance(prop, LayeredPropagator) else "dense"

    def output_probability(self, flux: float) -> float:
        states, _ = self.states(flux, [T_F])
        return float(site_probabilities(states[0])[GEOMETRY.output_site - 1])

    def path(self) -> str:
        n = len(self.positions)
        kind = self.propagator
        if kind == "auto":
            kind = "layered" if self.gamma_w == 0 and n >= 5 else "dense"
        return kind


GEOMETRY = build_geometry()


def check_norms(states: np.ndarray) -> None:
    drift = np.max(np.abs(np.linalg.norm(np.atleast_2d(states), axis=1) - 1.0))
    if drift > NORM_DRIFT_TOL:
        raise NumericalInvariantError(f"state norm drifted by {drift:.3e}")


def _p_out_point(args) -> float:
    scenario, flux = args
    return scenario.output_probability(flux)


def output_sweep(scenario: Scenario, fluxes: Sequence[float], workers: int = 1) -> np.ndarray:
    """``P_out`` at ``T_F`` for each flux value, in input order."""
    jobs = [(scenario, float(f)) for f in fluxes]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return np.array(list(pool.map(_p_out_point, jobs, chunksize=8)))
    return np.array([_p_out_point(j) for j in jobs])


def _base_metadata(cfg: ExperimentConfig, **extra) -> dict:
    meta = {
        "kind": cfg.kind,
        "config_hash": cfg.config_hash(),
        "code_version": __version__,
        "n_wit": cfg.n_wit,
        "layout": cfg.positions,
        "e_int_over_gamma": cfg.e_int,
        "gamma_w_over_gamma": cfg.gamma_w,
    }
    meta.update(extra)
    return meta


def run_snapshot(cfg: ExperimentConfig) -> ResultTable:
    t0 = time.perf_counter()
    scenario = Scenario.from_config(cfg)
    times = cfg.time_values()
    states, path = scenario.states(cfg.flux, times * TAU)
    rows = []
    for t, psi in zip(times, states):
        p = site_probabilities(psi)
        for j in range(GEOMETRY.n_sites):
            rows.append((j + 1, GEOMETRY.x[j], GEOMETRY.y[j], p[j], t))
    return ResultTable(
        columns=["site", "x_over_a", "y_over_a", "prob", "time_over_tau"],
        units=["1", "a", "a", "1", "tau"],
        rows=np.array(rows, dtype=float),
        metadata=_base_metadata(cfg, flux_ratio=cfg.flux, propagator=path),
        timings={"evolve": time.perf_counter() - t0},
    )


def _sweep_table(cfg: ExperimentConfig, scenario: Scenario, **extra) -> ResultTable:
    t0 = time.perf_counter()
    flux = cfg.flux_grid.values()
    p = output_sweep(scenario, flux, cfg.workers)
    t1 = time.perf_counter()
    return ResultTable(
        columns=["flux_ratio", "P_out", "dP_norm"],
        units=["phi0", "1", "1"],
        rows=np.column_stack([flux, p, normalized_output(p)]),
        metadata=_base_metadata(
            cfg,
            propagator=scenario.path(),
            n_flux=len(flux),
            visibility=visibility(flux, p),
            **extra,
        ),
        timings={"sweep": t1 - t0},
    )


def run_flux_sweep(cfg: ExperimentConfig) -> ResultTable:
    return _sweep_table(cfg, Scenario.from_config(cfg))


def run_scatterer_control(cfg: ExperimentConfig) -> ResultTable:
    scenario = Scenario.from_config(cfg, scatterers=tuple(cfg.scatterer_sites), v_s=cfg.v_s)
    return _sweep_table(
        cfg, scenario, scatterer_sites=list(cfg.scatterer_sites), v_s_over_gamma=cfg.v_s
    )


def run_visibility_sweep(cfg: ExperimentConfig) -> ResultTable:
    t0 = time.perf_counter()
    flux = cfg.flux_grid.values()
    rows = []
    paths = {}
    for n_wit in cfg.n_wit_list:
        layout = cfg.layout if cfg.layout and len(cfg.layout) == n_wit else None
        sub = cfg.model_copy(update={"n_wit": n_wit, "layout": layout})
        for e_int in cfg.e_int_grid:
            scenario = Scenario.from_config(sub, e_int=float(e_int), phases=tuple(sub.phases(n_wit)))
            p = output_sweep(scenario, flux, cfg.workers)
            rows.append((n_wit, e_int, visibility(flux, p)))
            paths[n_wit] = scenario.path()
    return ResultTable(
        columns=["n_wit", "E_int_over_gamma", "visibility"],
        units=["1", "gamma", "1"],
        rows=np.array(rows, dtype=float),
        metadata=_base_metadata(
            cfg,
            n_wit_list=list(cfg.n_wit_list),
            e_int_grid=list(cfg.e_int_grid),
            n_flux=len(flux),
            propagator={str(k): v for k, v in paths.items()},
        ),
        timings={"sweep": time.perf_counter() - t0},
    )


def witness_trajectories(scenario: Scenario, flux: float, times_over_tau) -> dict:
    """Bloch vectors, unwrapped angles and entropies of every witness over time."""
    states, path = scenario.states(flux, np.asarray(times_over_tau) * TAU)
    n_wit = len(scenario.positions)
    bloch = np.array([bloch_vectors(psi) for psi in states]).reshape(len(states), n_wit, 3)
    theta = np.array([coherence_angles(b) for b in bloch]).reshape(len(states), n_wit)
    theta = np.unwrap(theta, axis=0)
    entropy = np.array([bloch_entropy(b) for b in bloch]).reshape(len(states), n_wit)
    s_dev = np.array([von_neumann_entropy(device_density_matrix(psi)) for psi in states])
    return {"bloch": bloch, "theta": theta, "entropy": entropy, "s_dev": s_dev, "path": path}


def _dynamics_table(cfg: ExperimentConfig, extra_meta: dict, traj: dict, times) -> ResultTable:
    n = cfg.n_wit
    cols = (
        ["time_over_tau"]
        + [f"theta_{m}" for m in range(1, n + 1)]
        + [f"S_{m}" for m in range(1, n + 1)]
        + ["S_dev"]
    )
    units = ["tau"] + ["rad"] * n + ["bit"] * n + ["bit"]
    rows = np.column_stack([times, traj["theta"], traj["entropy"], traj["s_dev"]])
    return ResultTable(
        columns=cols,
        units=units,
        rows=rows,
        metadata=_base_metadata(
            cfg,
            flux_ratio=cfg.flux,
            n_times=len(times),
            witness_labels=cfg.positions,
            propagator=traj["path"],
            **extra_meta,
        ),
    )


def run_witness_dynamics(cfg: ExperimentConfig) -> ResultTable:
    t0 = time.perf_counter()
    scenario = Scenario.from_config(cfg)
    times = cfg.time_values()
    traj = witness_trajectories(scenario, cfg.flux, times)
    extra = {}
    if cfg.flux != 0:
        ref = witness_trajectories(scenario, 0.0, times)
        extra = {
            "max_theta_deviation_vs_flux_0": float(np.max(np.abs(traj["theta"] - ref["theta"]), initial=0.0)),
            "max_S_deviation_vs_flux_0": float(np.max(np.abs(traj["entropy"] - ref["entropy"]), initial=0.0)),
        }
    table = _dynamics_table(cfg, extra, traj, times)
    table.timings["dynamics"] = time.perf_counter() - t0
    return table


def run_long_run(cfg: ExperimentConfig) -> ResultTable:
    t0 = time.perf_counter()
    scenario = Scenario.from_config(cfg)
    times = cfg.time_values()
    traj = witness_trajectories(scenario, cfg.flux, times)
    tail = max(1, len(times) // 10)
    extra = {
        "S_dev_tail_mean": float(traj["s_dev"][-tail:].mean()),
        "S_witness_tail_mean": float(traj["entropy"][-tail:].mean()) if cfg.n_wit else 0.0,
    }
    table = _dynamics_table(cfg, extra, traj, times)
    table.timings["dynamics"] = time.perf_counter() - t0
    return table


RUNNERS = {
    "snapshot": run_snapshot,
    "flux_sweep": run_flux_sweep,
    "visibility_sweep": run_visibility_sweep,
    "witness_dynamics": run_witness_dynamics,
    "scatterer_control": run_scatterer_control,
    "long_run": run_long_run,
}


def run(cfg: ExperimentConfig) -> ResultTable:
    return RUNNERS[cfg.kind](cfg)
