"""Monte Carlo solver for the stochastic heat equation with Robin boundaries.

Scheme: semi-implicit Euler-Maruyama.  The linear part (1/2) d^2/dx^2 with
Robin ghost points is treated by Crank-Nicolson; the Ito term adds
Z_j eta_j sqrt(dt/dx) per cell and step with independent standard Gaussians
(the space-time white noise discretization).  Paths that lose positivity
are flagged and excluded from statistics, never clamped.

Determinism: noise streams are derived from (seed, chunk index) with a
fixed chunk size of paths, so results are bit-identical for a given seed
regardless of how many workers aggregate them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from openkpz.kernels import CrankNicolson, robin_laplacian

RNG_CHUNK = 512  # paths per independent noise stream


@dataclass
class GridField:
    """Values on the uniform grid x_j = j dx, j = 0..n, at one time."""

    values: np.ndarray
    dx: float
    time_stamp: float = 0.0

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        n = round(1.0 / self.dx)
        if abs(n * self.dx - 1.0) > 1e-12:
            raise ValueError("dx must divide 1 exactly")
        if self.values.shape[-1] != n + 1:
            raise ValueError(
                f"expected {n + 1} grid values for dx={self.dx}, "
                f"got {self.values.shape[-1]}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    @property
    def n(self) -> int:
        return self.values.shape[-1] - 1

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.values.shape[-1])


@dataclass(frozen=True)
class BoundaryParams:
    """Boundary slopes (u, v) and the derived transformed-equation data."""

    u: float
    v: float
    a: float = 0.0  # boundary constant from kernels.constant_a; mollifier-dependent

    @property
    def robin_left(self) -> float:
        return self.u - 0.5

    @property
    def robin_right(self) -> float:
        return self.v - 0.5

    def a1(self, x):
        return 2.0 * (-2.0 * (self.v + self.a) * np.asarray(x) + self.u + self.a)

    def a2(self, x):
        lin = -2.0 * (self.v + self.a) * np.asarray(x) + self.u + self.a
        return 0.5 * (lin**2 - self.v - self.a)

    @property
    def c_uv(self) -> float:
        """Laplace-transform domain constant C_{u,v}."""
        if self.u <= 0 or self.u >= 1:
            return 2.0
        return 2.0 * self.u


@dataclass(frozen=True)
class SimConfig:
    dx: float = 1.0 / 64
    dt: float | None = None
    t_final: float = 1.0
    n_paths: int = 100
    seed: int = 0
    noise: bool = True
    save_times: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.dt is None:
            object.__setattr__(self, "dt", 0.5 * self.dx**2)
        if self.dt > 0.5 * self.dx**2 + 1e-15:
            raise ValueError(
                f"dt={self.dt} violates the stability budget dt <= dx^2/2"
            )
        if self.t_final <= 0 or self.n_paths < 1:
            raise ValueError("t_final must be positive and n_paths >= 1")

    @property
    def n(self) -> int:
        n = round(1.0 / self.dx)
        if abs(n * self.dx - 1.0) > 1e-12:
            raise ValueError("dx must divide 1 exactly")
        return n

    @property
    def n_steps(self) -> int:
        steps = round(self.t_final / self.dt)
        if abs(steps * self.dt - self.t_final) > 1e-9:
            raise ValueError("t_final must be an integer multiple of dt")
        return steps

    def save_step_indices(self) -> Dict[int, float]:
        times = self.save_times or (self.t_final,)
        out = {}
        for t in times:
            k = round(t / self.dt)
            if abs(k * self.dt - t) > 1e-9 or not 0 <= k <= self.n_steps:
                raise ValueError(f"save time {t} is not on the time grid")
            out[k] = t
        return out


@dataclass
class SheResult:
    """Snapshots (n_paths, n+1) at requested times, plus positivity flags."""

    snapshots: Dict[float, np.ndarray]
    positivity_lost: np.ndarray
    config: SimConfig
    params: BoundaryParams

    @property
    def exclusion_rate(self) -> float:
        return float(np.mean(self.positivity_lost))

    def valid(self, t: float) -> np.ndarray:
        """Snapshot rows from paths that kept positivity throughout."""
        return self.snapshots[t][~self.positivity_lost]


def _noise_stream(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, chunk]))


def simulate_she(
    z0: GridField | np.ndarray,
    params: BoundaryParams,
    cfg: SimConfig,
    paired_z0: np.ndarray | None = None,
) -> SheResult | Tuple[SheResult, SheResult]:
    """Evolve n_paths copies of the SHE from z0 under independent noise.

    If ``paired_z0`` is given, a second solution is evolved from it with the
    identical noise realization (one-force coupling) and both results are
    returned.
    """
    if isinstance(z0, GridField):
        z0 = z0.values
    z0 = np.asarray(z0, dtype=float)
    n = cfg.n
    if z0.ndim == 1:
        z0 = np.broadcast_to(z0, (cfg.n_paths, n + 1))
    if z0.shape != (cfg.n_paths, n + 1):
        raise ValueError(f"initial data must have shape ({cfg.n_paths}, {n + 1})")
    if np.any(z0 <= 0):
        raise ValueError("initial data must be strictly positive")
    coupled = paired_z0 is not None
    if coupled:
        paired_z0 = np.asarray(paired_z0, dtype=float)
        if paired_z0.shape != z0.shape or np.any(paired_z0 <= 0):
            raise ValueError("paired initial data must match shape and be positive")

    cn = CrankNicolson(robin_laplacian(n, params.u, params.v), cfg.dt)
    noise_scale = np.sqrt(cfg.dt / cfg.dx)
    saves = cfg.save_step_indices()

    def run_chunk(chunk_idx: int, z_chunk: np.ndarray, z_pair):
        rng = _noise_stream(cfg.seed, chunk_idx)
        lost = np.zeros(z_chunk.shape[0], dtype=bool)
        lost_pair = np.zeros(z_chunk.shape[0], dtype=bool)
        snaps: Dict[float, np.ndarray] = {}
        snaps_pair: Dict[float, np.ndarray] = {}
        if 0 in saves:
            snaps[saves[0]] = z_chunk.copy()
            if z_pair is not None:
                snaps_pair[saves[0]] = z_pair.copy()
        for k in range(1, cfg.n_steps + 1):
            if cfg.noise:
                eta = rng.standard_normal(z_chunk.shape)
                forcing = (z_chunk * eta * noise_scale).T
                z_chunk = cn.step_with_forcing(z_chunk.T, forcing).T
            else:
                eta = None
                z_chunk = cn.step(z_chunk.T).T
            lost |= np.any(z_chunk <= 0, axis=1)
            if z_pair is not None:
                if eta is not None:
                    forcing_pair = (z_pair * eta * noise_scale).T
                    z_pair = cn.step_with_forcing(z_pair.T, forcing_pair).T
                else:
                    z_pair = cn.step(z_pair.T).T
                lost_pair |= np.any(z_pair <= 0, axis=1)
            if k in saves:
                snaps[saves[k]] = z_chunk.copy()
                if z_pair is not None:
                    snaps_pair[saves[k]] = z_pair.copy()
        return snaps, lost, snaps_pair, lost_pair

    all_snaps: Dict[float, List[np.ndarray]] = {t: [] for t in saves.values()}
    all_snaps_pair: Dict[float, List[np.ndarray]] = {t: [] for t in saves.values()}
    lost_parts, lost_pair_parts = [], []
    for chunk_idx, start in enumerate(range(0, cfg.n_paths, RNG_CHUNK)):
        stop = min(start + RNG_CHUNK, cfg.n_paths)
        pair = paired_z0[start:stop].copy() if coupled else None
        snaps, lost, snaps_pair, lost_pair = run_chunk(
            chunk_idx, z0[start:stop].copy(), pair
        )
        for t, arr in snaps.items():
            all_snaps[t].append(arr)
        for t, arr in snaps_pair.items():
            all_snaps_pair[t].append(arr)
        lost_parts.append(lost)
        lost_pair_parts.append(lost_pair)

    result = SheResult(
        snapshots={t: np.concatenate(parts) for t, parts in all_snaps.items()},
        positivity_lost=np.concatenate(lost_parts),
        config=cfg,
        params=params,
    )
    if not coupled:
        return result
    result_pair = SheResult(
        snapshots={t: np.concatenate(parts) for t, parts in all_snaps_pair.items()},
        positivity_lost=np.concatenate(lost_pair_parts),
        config=cfg,
        params=params,
    )
    return result, result_pair


def robin_semigroup_apply(
    z0: np.ndarray, params: BoundaryParams, dx: float, t: float, dt: float | None = None
) -> np.ndarray:
    """Deterministic oracle: the noise-free scheme applied to z0."""
    n = round(1.0 / dx)
    if dt is None:
        dt = 0.5 * dx**2
    steps = round(t / dt)
    if abs(steps * dt - t) > 1e-9:
        raise ValueError("t must be an integer multiple of dt")
    cn = CrankNicolson(robin_laplacian(n, params.u, params.v), dt)
    return cn.advance(np.asarray(z0, dtype=float), steps)


def hopf_cole(z: GridField | np.ndarray) -> np.ndarray:
    """h = log Z pointwise; errors name the first nonpositive grid index."""
    values = z.values if isinstance(z, GridField) else np.asarray(z, dtype=float)
    if np.any(values <= 0):
        idx = np.argwhere(values <= 0)[0]
        raise ValueError(f"nonpositive value at grid index {tuple(idx)}")
    return np.log(values)


def burgers_field(h: np.ndarray, dx: float) -> np.ndarray:
    """Cell-centered forward differences (h_{j+1} - h_j) / dx."""
    h = np.asarray(h, dtype=float)
    return np.diff(h, axis=-1) / dx


def boundary_residuals(h: np.ndarray, dx: float, params: BoundaryParams):
    """|du/dx residuals| at the two boundaries of the derived Burgers field."""
    u_field = burgers_field(h, dx)
    return np.abs(u_field[..., 0] - params.u), np.abs(u_field[..., -1] + params.v)


def anchor(h: np.ndarray) -> np.ndarray:
    """Subtract h(0): the anchored field x -> h(x) - h(0)."""
    h = np.asarray(h, dtype=float)
    return h - h[..., :1]
