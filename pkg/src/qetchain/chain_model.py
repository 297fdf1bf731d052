"""Ground state of the periodic harmonic chain.

The chain Hamiltonian is

    H = (1/2) sum_j (p_j^2 + q_j^2 - alpha q_j q_{j-1}),   j = 0..N-1 (periodic)

with even N and coupling 0 <= alpha < 1; alpha -> 1 is the critical
(massless) limit, regularized in practice by a small cutoff such as
alpha = 1 - 1e-7.  Normal modes have frequencies
omega_k = sqrt(1 - alpha cos(2 pi k / N)), and the translation-invariant
ground-state correlators

    g_r = <q_i q_{i+r}> = (1/N) sum_k cos(r theta_k) / (2 omega_k)
    h_r = <p_i p_{i+r}> = (1/N) sum_k (omega_k / 2) cos(r theta_k)

assemble into circulant matrices G and H with G H = (1/4) I.  The per-site
energy offset epsilon is fixed so each site has zero energy in the ground
state, which forces the virial identity h_0 = g_0 - alpha g_1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian_state import CovarianceMatrix


@dataclass(frozen=True)
class ChainParams:
    """Chain size, coupling, and the measurement oscillator frequency."""

    n_sites: int
    alpha: float
    omega: float = 1.0

    def __post_init__(self):
        if self.n_sites < 4 or self.n_sites % 2 != 0:
            raise ValueError(f"n_sites must be even and >= 4, got {self.n_sites}")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.omega <= 0.0:
            raise ValueError(f"omega must be positive, got {self.omega}")


@dataclass(frozen=True)
class Correlations:
    """Correlator vectors g, h (length n_sites) and the site-energy offset."""

    g: np.ndarray
    h: np.ndarray
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "g", np.asarray(self.g, dtype=float))
        object.__setattr__(self, "h", np.asarray(self.h, dtype=float))
        if self.g.shape != self.h.shape or self.g.ndim != 1:
            raise ValueError("g and h must be vectors of equal length")

    @property
    def n_sites(self) -> int:
        return self.g.size


def mode_frequencies(n_sites: int, alpha: float) -> np.ndarray:
    """All N normal-mode frequencies sqrt(1 - alpha cos(2 pi k / N))."""
    theta = 2.0 * np.pi * np.arange(n_sites) / n_sites
    return np.sqrt(1.0 - alpha * np.cos(theta))


def dispersion(params: ChainParams, k: int) -> float:
    """Frequency of normal mode k, 0 <= k < n_sites."""
    if not 0 <= k < params.n_sites:
        raise ValueError(f"mode index {k} out of range for N={params.n_sites}")
    return float(np.sqrt(1.0 - params.alpha * np.cos(2.0 * np.pi * k / params.n_sites)))


def correlation_vectors(n_sites: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Correlator vectors (g, h) for any even ring size >= 2.

    Direct O(N) mode sum per separation r (no FFT; N stays small here).
    Accepts n_sites = 2 so that exact two-oscillator cross-checks can reuse
    the same sums that ChainParams-based code does.
    """
    if n_sites < 2 or n_sites % 2 != 0:
        raise ValueError(f"ring size must be even and >= 2, got {n_sites}")
    w = mode_frequencies(n_sites, alpha)
    theta = 2.0 * np.pi * np.arange(n_sites) / n_sites
    cos_table = np.cos(np.outer(np.arange(n_sites), theta))
    g = cos_table @ (1.0 / (2.0 * w)) / n_sites
    h = cos_table @ (w / 2.0) / n_sites
    return g, h


def build_correlations(params: ChainParams) -> Correlations:
    """Ground-state correlators and the zero-point energy offset for the chain."""
    g, h = correlation_vectors(params.n_sites, params.alpha)
    epsilon = float(h[0] + g[0] - params.alpha * g[1])
    return Correlations(g=g, h=h, epsilon=epsilon)


def _distance_table(row_sites, col_sites, n_sites: int) -> np.ndarray:
    rows = np.asarray(list(row_sites), dtype=int)
    cols = np.asarray(list(col_sites), dtype=int)
    for s in np.concatenate([rows, cols]):
        if not 0 <= s < n_sites:
            raise ValueError(f"site index {s} out of range for N={n_sites}")
    # g and h are periodic-symmetric, so the mod-N index difference suffices.
    return (rows[:, None] - cols[None, :]) % n_sites


def correlation_submatrices(params: ChainParams, row_sites, col_sites) -> tuple[np.ndarray, np.ndarray]:
    """Blocks of the position and momentum correlation matrices.

    Returns (G_block, H_block) with G_block[a, b] = g at the periodic
    separation of row_sites[a] and col_sites[b], and likewise for h.
    """
    corr = build_correlations(params)
    dist = _distance_table(row_sites, col_sites, params.n_sites)
    return corr.g[dist], corr.h[dist]


def ground_covariance(params: ChainParams) -> CovarianceMatrix:
    """Full-chain ground-state covariance in interleaved (q, p) ordering.

    Position and momentum sectors are uncorrelated; the ground state is
    pure, so every symplectic eigenvalue equals 1/2.
    """
    corr = build_correlations(params)
    n = params.n_sites
    dist = _distance_table(range(n), range(n), n)
    m = np.zeros((2 * n, 2 * n))
    m[0::2, 0::2] = corr.g[dist]
    m[1::2, 1::2] = corr.h[dist]
    return CovarianceMatrix(m)
