"""Two-branch interference device: site geometry and Peierls Hamiltonian.

Sites are numbered 1..35 in the public API:

* 1-15   input lead, y = 0
* 16-20  top branch, y = +a/2 (aliases ``"1"`` .. ``"5"``)
* 21-25  bottom branch, y = -a/2 (aliases ``"1'"`` .. ``"5'"``)
* 26-35  output lead, y = 0

Arrays are indexed from zero, so site ``j`` lives at row ``j - 1``.
Working units are hbar = gamma = a = e = 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

N_SITES = 35
N_INPUT = 15
BRANCH_LENGTH = 5
TOP_FIRST = 16
BOTTOM_FIRST = 21
OUTPUT_FIRST = 26
OUTPUT_SITE = 27

# Closed loop through the branches, as 1-based site indices.
LOOP_PATH = (15, 16, 17, 18, 19, 20, 26, 25, 24, 23, 22, 21, 15)


@dataclass(frozen=True)
class DeviceGeometry:
    """Site positions (units of a) and nearest-neighbour bonds.

    ``edges`` holds 1-based ``(j, i)`` pairs with ``x_j <= x_i``.
    """

    positions: np.ndarray
    edges: tuple[tuple[int, int], ...]
    output_site: int = OUTPUT_SITE

    @property
    def n_sites(self) -> int:
        return len(self.positions)

    @property
    def x(self) -> np.ndarray:
        return self.positions[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.positions[:, 1]

    def degree(self) -> np.ndarray:
        deg = np.zeros(self.n_sites, dtype=int)
        for j, i in self.edges:
            deg[j - 1] += 1
            deg[i - 1] += 1
        return deg

    def loop_polygon(self) -> np.ndarray:
        """Vertices of the enclosed loop polygon (site centres of the forks and branch ends)."""
        corners = (15, 16, 20, 26, 25, 21)
        return self.positions[[c - 1 for c in corners]]

    def loop_area(self) -> float:
        return polygon_area(self.loop_polygon())

    def to_dict(self) -> dict:
        return {
            "sites": [
                {"site": j + 1, "x": float(x), "y": float(y)}
                for j, (x, y) in enumerate(self.positions)
            ],
            "edges": [list(e) for e in self.edges],
            "output_site": self.output_site,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def polygon_area(vertices: np.ndarray) -> float:
    """Unsigned shoelace area of a simple polygon."""
    x, y = np.asarray(vertices, dtype=float).T
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def build_geometry() -> DeviceGeometry:
    pos = np.zeros((N_SITES, 2))
    pos[:N_INPUT, 0] = np.arange(N_INPUT)
    for k in range(BRANCH_LENGTH):
        pos[TOP_FIRST - 1 + k] = (N_INPUT + k, 0.5)
        pos[BOTTOM_FIRST - 1 + k] = (N_INPUT + k, -0.5)
    n_out = N_SITES - OUTPUT_FIRST + 1
    pos[OUTPUT_FIRST - 1:, 0] = N_INPUT + BRANCH_LENGTH + np.arange(n_out)

    edges: list[tuple[int, int]] = []
    edges += [(j, j + 1) for j in range(1, N_INPUT)]
    edges += [(N_INPUT, TOP_FIRST), (N_INPUT, BOTTOM_FIRST)]
    for first in (TOP_FIRST, BOTTOM_FIRST):
        edges += [(first + k, first + k + 1) for k in range(BRANCH_LENGTH - 1)]
    edges += [(TOP_FIRST + 4, OUTPUT_FIRST), (BOTTOM_FIRST + 4, OUTPUT_FIRST)]
    edges += [(j, j + 1) for j in range(OUTPUT_FIRST, N_SITES)]

    pos.setflags(write=False)
    return DeviceGeometry(positions=pos, edges=tuple(edges))


def branch_site(label: str | int) -> int:
    """Resolve a branch alias (``"3"``, ``"3'"``) to its 1-based device site."""
    text = str(label).strip()
    bottom = text.endswith("'")
    digits = text[:-1] if bottom else text
    try:
        k = int(digits)
    except ValueError:
        raise ValueError(f"invalid branch position {label!r}") from None
    if not 1 <= k <= BRANCH_LENGTH:
        raise ValueError(f"branch position {label!r} out of range 1..{BRANCH_LENGTH}")
    return (BOTTOM_FIRST if bottom else TOP_FIRST) + k - 1


def branch_label(site: int) -> str:
    if TOP_FIRST <= site < TOP_FIRST + BRANCH_LENGTH:
        return str(site - TOP_FIRST + 1)
    if BOTTOM_FIRST <= site < BOTTOM_FIRST + BRANCH_LENGTH:
        return f"{site - BOTTOM_FIRST + 1}'"
    raise ValueError(f"site {site} is not on a branch")


def mirror_site(site: int) -> int:
    """Partner of ``site`` under the top/bottom reflection y -> -y."""
    if TOP_FIRST <= site < BOTTOM_FIRST:
        return site + BRANCH_LENGTH
    if BOTTOM_FIRST <= site < OUTPUT_FIRST:
        return site - BRANCH_LENGTH
    return site


def hop_phase(r_from: Sequence[float], r_to: Sequence[float], field: float) -> float:
    """Straight-line integral of A = -B y x-hat from ``r_from`` to ``r_to``."""
    dx = r_to[0] - r_from[0]
    y_mid = 0.5 * (r_to[1] + r_from[1])
    return -field * y_mid * dx


def field_for_flux(flux: float, area: float) -> float:
    """Field strength giving ``flux`` flux quanta (phi0 = 2 pi) through ``area``."""
    return 2.0 * np.pi * flux / area


def build_device_hamiltonian(
    geom: DeviceGeometry, gamma: float = 1.0, flux: float = 0.0
) -> np.ndarray:
    """Hermitian hopping matrix with Peierls phases for flux ratio ``flux``.

    ``H[i, j] = -gamma * exp(-1j * theta_ij)`` where ``theta_ij`` integrates the
    vector potential from site j to site i; the fork bonds keep magnitude gamma.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    field = field_for_flux(flux, geom.loop_area())
    n = geom.n_sites
    H = np.zeros((n, n), dtype=complex)
    for j, i in geom.edges:
        theta = hop_phase(geom.positions[j - 1], geom.positions[i - 1], field)
        t_ij = -gamma * np.exp(-1j * theta)
        H[i - 1, j - 1] = t_ij
        H[j - 1, i - 1] = np.conj(t_ij)
    return H


def add_static_scatterers(H: np.ndarray, sites: Iterable[int | str], v_s: float) -> np.ndarray:
    """Return a copy of ``H`` with on-site energy ``v_s`` added at ``sites``.

    Entries of ``sites`` are 1-based indices or branch aliases such as ``"3'"``.
    """
    out = np.array(H, dtype=complex, copy=True)
    n = out.shape[0]
    for s in sites:
        j = branch_site(s) if isinstance(s, str) else int(s)
        if not 1 <= j <= n:
            raise ValueError(f"site index {s!r} out of range 1..{n}")
        out[j - 1, j - 1] += float(v_s)
    return out


def loop_phase(H: np.ndarray, path: Sequence[int] = LOOP_PATH) -> float:
    """Phase of the product of hop factors ``H[next, cur]`` along a closed path.

    Returned in (-pi, pi]. Hops carry magnitude-normalised factors so the
    sign of the hopping energy drops out.
    """
    prod = 1.0 + 0j
    for cur, nxt in zip(path[:-1], path[1:]):
        t = H[nxt - 1, cur - 1]
        if t == 0:
            raise ValueError(f"sites {cur} and {nxt} are not bonded")
        prod *= -t / abs(t)
    return float(np.angle(prod))
