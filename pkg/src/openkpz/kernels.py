"""Heat kernels on the line and on [0,1], and the boundary constant `a`.

Convention: all kernels solve d/dt = (1/2) d^2/dx^2, so the whole-line
kernel is (2*pi*t)^(-1/2) exp(-x^2/(2t)).  The Neumann kernel on [0,1] is
the image sum; the Robin kernel is computed as a discrete semigroup
(Crank-Nicolson with centered ghost points).  The constant `a` is a
quadrature of the mollifier autocorrelation against an explicit bracket
built from the error function and the whole-line kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import sparse
from scipy.linalg import solve_banded
from scipy.sparse.linalg import splu
from scipy.special import erf


@dataclass(frozen=True)
class KernelConvention:
    """Diffusion coefficient of the generator c * d^2/dx^2."""

    diffusion_coefficient: float = 0.5

    def __post_init__(self) -> None:
        if self.diffusion_coefficient <= 0:
            raise ValueError("diffusion coefficient must be positive")


CONVENTION = KernelConvention()


def gauss_kernel(t, x):
    """Whole-line heat kernel (2*pi*t)^(-1/2) exp(-x^2/(2t)) for t > 0."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("gauss_kernel requires t > 0")
    x = np.asarray(x, dtype=float)
    return np.exp(-x * x / (2.0 * t)) / np.sqrt(2.0 * np.pi * t)


def neumann_tail_bound(t: float, M: int) -> float:
    """Bound on the image-sum truncation error at level M."""
    return 2.0 * math.exp(-((2 * M - 2) ** 2) / (2.0 * t))


def neumann_kernel(t, x, y, M: int = 20) -> Tuple[np.ndarray, float]:
    """Neumann heat kernel on [0,1] by the method of images.

    Returns (value, tail_bound); the sum runs over images |m| <= M.
    """
    if np.any(np.asarray(t) <= 0):
        raise ValueError("neumann_kernel requires t > 0")
    if M < 1:
        raise ValueError("image truncation M must be >= 1")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    total = np.zeros(np.broadcast(x, y).shape, dtype=float)
    for m in range(-M, M + 1):
        total = total + gauss_kernel(t, x + y + 2 * m) + gauss_kernel(t, x - y + 2 * m)
    return total, neumann_tail_bound(float(np.min(t)), M)


def neumann_kernel_spectral(t, x, y, kmax: int = 200) -> np.ndarray:
    """Eigenfunction-expansion oracle: 1 + 2 sum e^{-k^2 pi^2 t/2} cos cos."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    total = np.ones(np.broadcast(x, y).shape, dtype=float)
    for k in range(1, kmax + 1):
        lam = math.exp(-(k * k) * math.pi * math.pi * t / 2.0)
        if lam == 0.0:
            break
        total = total + 2.0 * lam * np.cos(k * math.pi * x) * np.cos(k * math.pi * y)
    return total


def robin_laplacian(n: int, u: float, v: float) -> sparse.csr_matrix:
    """Discrete (1/2) d^2/dx^2 on n+1 points of [0,1] with Robin ghost points.

    Ghost elimination: Z_{-1} = Z_1 - 2 dx (u - 1/2) Z_0 and
    Z_{n+1} = Z_{n-1} - 2 dx (v - 1/2) Z_n.
    """
    dx = 1.0 / n
    main = np.full(n + 1, -2.0)
    lower = np.ones(n)
    upper = np.ones(n)
    main[0] -= 2.0 * dx * (u - 0.5)
    main[-1] -= 2.0 * dx * (v - 0.5)
    upper[0] = 2.0
    lower[-1] = 2.0
    L = sparse.diags([lower, main, upper], offsets=[-1, 0, 1], format="csr")
    return (0.5 / dx**2) * L


class CrankNicolson:
    """Propagator of dZ/dt = L Z by (I - dt/2 L) Z' = (I + dt/2 L) Z."""

    def __init__(self, L: sparse.spmatrix, dt: float):
        if dt <= 0:
            raise ValueError("time step must be positive")
        self.dt = dt
        n = L.shape[0]
        eye = sparse.identity(n, format="csc")
        self._solver = splu((eye - 0.5 * dt * L).tocsc())
        self._explicit = (eye + 0.5 * dt * L).tocsr()

    def step(self, z: np.ndarray) -> np.ndarray:
        return self._solver.solve(self._explicit @ z)

    def step_with_forcing(self, z: np.ndarray, forcing: np.ndarray) -> np.ndarray:
        """(I - dt/2 L) z' = (I + dt/2 L) z + forcing."""
        return self._solver.solve(self._explicit @ z + forcing)

    def advance(self, z: np.ndarray, n_steps: int) -> np.ndarray:
        for _ in range(n_steps):
            z = self.step(z)
        return z


class RannacherPropagator:
    """Crank-Nicolson with an implicit-Euler startup (Rannacher smoothing).

    The first two CN steps are each replaced by two implicit-Euler
    half-steps, damping the high modes of rough (delta-like) initial data
    that plain Crank-Nicolson leaves oscillating; overall accuracy stays
    second order.
    """

    def __init__(self, L: sparse.spmatrix, dt: float, startup_steps: int = 2):
        self.cn = CrankNicolson(L, dt)
        self.startup_steps = startup_steps
        n = L.shape[0]
        eye = sparse.identity(n, format="csc")
        self._implicit_half = splu((eye - 0.5 * dt * L).tocsc())

    def advance(self, z: np.ndarray, n_steps: int) -> np.ndarray:
        startup = min(self.startup_steps, n_steps)
        for _ in range(startup):
            z = self._implicit_half.solve(self._implicit_half.solve(z))
        return self.cn.advance(z, n_steps - startup)


def robin_kernel(
    t: float, u: float, v: float, n: int = 256, dt: float | None = None
) -> np.ndarray:
    """Robin heat kernel matrix K[i, j] ~ P_t(x_i, y_j) on the n+1 grid.

    The semigroup acts through trapezoid weights: (P_t f)(x_i) =
    sum_j w_j K[i, j] f(x_j).  Second-order accurate in dt and dx.
    """
    if t <= 0:
        raise ValueError("robin_kernel requires t > 0")
    if dt is None:
        dt = t / max(64, int(round(t * 8 * n)))
    n_steps = int(round(t / dt))
    if abs(n_steps * dt - t) > 1e-12 * max(1.0, t) or n_steps < 1:
        raise ValueError("t must be an integer multiple of dt")
    weights = np.full(n + 1, 1.0 / n)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    prop = RannacherPropagator(robin_laplacian(n, u, v), dt)
    return prop.advance(np.diag(1.0 / weights), n_steps)


# --- the boundary constant a ------------------------------------------------


@dataclass(frozen=True)
class Mollifier:
    """Separable even bump rho(s, y) = b(s / rt) b(y / rs) / (rt * rs).

    b(z) = (35/32) (1 - z^2)^3 on [-1, 1], a probability density, so rho
    integrates to 1 for any radii.
    """

    time_radius: float = 1.0
    space_radius: float = 1.0

    def __post_init__(self) -> None:
        if self.time_radius <= 0 or self.space_radius <= 0:
            raise ValueError("mollifier radii must be positive")

    @staticmethod
    def bump(z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        inside = np.clip(1.0 - z * z, 0.0, None)
        return (35.0 / 32.0) * inside**3

    def __call__(self, s, y):
        return (
            self.bump(np.asarray(s) / self.time_radius)
            * self.bump(np.asarray(y) / self.space_radius)
            / (self.time_radius * self.space_radius)
        )

    def mass(self, n: int = 2048) -> float:
        """Midpoint quadrature of the total mass (should be 1)."""
        return _midpoint_mass(self, n)


def _midpoint_mass(rho: Mollifier, n: int) -> float:
    s, ws = _midpoint_grid(rho.time_radius, n)
    y, wy = _midpoint_grid(rho.space_radius, n)
    vals_s = rho.bump(s / rho.time_radius) / rho.time_radius
    vals_y = rho.bump(y / rho.space_radius) / rho.space_radius
    return float(np.sum(vals_s * ws) * np.sum(vals_y * wy))


def _midpoint_grid(radius: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Midpoint nodes/weights on [-radius, radius]; even n keeps 0 on a cell edge."""
    if n % 2:
        raise ValueError("use an even number of midpoint cells")
    edges = np.linspace(-radius, radius, n + 1)
    nodes = 0.5 * (edges[:-1] + edges[1:])
    weights = np.full(n, 2.0 * radius / n)
    return nodes, weights


def _bump_autocorrelation(z: np.ndarray, radius: float) -> np.ndarray:
    """A(z) = integral b_r(w - z) b_r(w) dw for the scaled bump b_r.

    The integrand is a polynomial of degree 12 on the overlap interval, so
    13-point Gauss-Legendre integrates it exactly.
    """
    z = np.asarray(z, dtype=float) / radius
    lo = np.maximum(-1.0, z - 1.0)
    hi = np.minimum(1.0, z + 1.0)
    nodes, weights = np.polynomial.legendre.leggauss(13)
    mid = 0.5 * (lo + hi)
    half = np.clip(0.5 * (hi - lo), 0.0, None)
    w = mid[:, None] + half[:, None] * nodes[None, :]
    vals = Mollifier.bump(w - z[:, None]) * Mollifier.bump(w)
    return (vals @ weights) * half / radius


def _bracket(s: np.ndarray, y: np.ndarray) -> np.ndarray:
    """1/2 - (1/2) Erf(|y| / sqrt(2|s|)) - 2 |y| N(s, y), with N the heat kernel.

    Continuous off s = 0 and bounded; the s = 0 limit is 0 for y != 0 and
    1/2 on the axis.
    """
    s, y = np.broadcast_arrays(
        np.abs(np.asarray(s, dtype=float)), np.abs(np.asarray(y, dtype=float))
    )
    out = np.zeros(s.shape, dtype=float)
    pos = s > 0
    sp, yp = s[pos], y[pos]
    out[pos] = (
        0.5
        - 0.5 * erf(yp / np.sqrt(2.0 * sp))
        - 2.0 * yp * gauss_kernel(sp, yp)
    )
    out[~pos] = np.where(y[~pos] == 0.0, 0.5, 0.0)
    return out


def _constant_a_single(rho: Mollifier, n: int) -> float:
    """One quadrature pass with n outer cells.

    The bracket is discontinuous at the space-time origin (it is constant
    along parabolas y ~ c sqrt(s)), which ruins plain tensor quadrature.
    Substituting u = y / sqrt(2 s) makes the inner integral smooth:

        G(s) = int A_y(y) F(s, y) dy
             = 2 sqrt(2 s) int_0^inf A_y(sqrt(2 s) u) g(u) du,
        g(u) = (1 - Erf(u)) / 2 - (2 / sqrt(pi)) u exp(-u^2),

    and s = sigma^2 absorbs the remaining sqrt(s) factor, so both loops
    converge at full order.
    """
    # inner rule: Gauss-Legendre in u over [0, ucut]; g decays like exp(-u^2)
    ucut = 10.0
    un, uw = np.polynomial.legendre.leggauss(96)
    u = 0.5 * ucut * (un + 1.0)
    uw = 0.5 * ucut * uw
    g = 0.5 * (1.0 - erf(u)) - (2.0 / math.sqrt(math.pi)) * u * np.exp(-u * u)

    # outer rule: midpoint in sigma = sqrt(s) over (0, sqrt(2 rt)]
    smax = math.sqrt(2.0 * rho.time_radius)
    edges = np.linspace(0.0, smax, n + 1)
    sigma = 0.5 * (edges[:-1] + edges[1:])
    wsigma = smax / n
    s = sigma**2
    corr_s = _bump_autocorrelation(s, rho.time_radius)

    y = np.sqrt(2.0 * s)[:, None] * u[None, :]
    corr_y = _bump_autocorrelation(y.ravel(), rho.space_radius).reshape(y.shape)
    inner = 2.0 * np.sqrt(2.0 * s) * (corr_y @ (uw * g))
    # a = 2 int_0^smax A_t(sigma^2) G(sigma^2) 2 sigma dsigma
    return float(np.sum(2.0 * corr_s * inner * 2.0 * sigma) * wsigma)


def constant_a(rho: Mollifier | None = None, n: int = 256) -> Tuple[float, float]:
    """Boundary constant a = integral (rho_bar * rho)(s,y) bracket(s,y) ds dy.

    Tensor-product midpoint quadrature at n and 2n cells with Richardson
    extrapolation; returns (value, error_estimate).
    """
    if rho is None:
        rho = Mollifier()
    mass = _midpoint_mass(rho, 2048)
    if abs(mass - 1.0) > 1e-10:
        raise ValueError(f"mollifier is not normalized: mass = {mass!r}")
    coarse = _constant_a_single(rho, n)
    fine = _constant_a_single(rho, 2 * n)
    value = (4.0 * fine - coarse) / 3.0
    return value, abs(fine - coarse) / 3.0
