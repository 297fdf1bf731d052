"""Coherent-state measurement of a site group and its back-action.

Measuring a group A of sites with the coherent-state POVM of frequency
omega projects each measured site onto a coherent state (position variance
1/(2 omega), momentum variance omega/2) and leaves the remaining sites in
a pure Gaussian state whose momentum block is the Schur complement

    M = H_u - K^T (L + (omega/2) I)^{-1} K

of the ground-state momentum correlations (L: measured block, H_u:
unmeasured block, K: cross block).  The position block is (1/4) M^{-1},
so the unmeasured sector stays pure, and none of the second moments
depend on the measurement outcome.  The outcome pair (X, P) itself is
drawn from two independent zero-mean Gaussians with covariances
C + (1/(2 omega)) I and L + (omega/2) I.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .chain_model import ChainParams, correlation_submatrices
from .gaussian_state import CovarianceMatrix


@dataclass(frozen=True)
class MeasurementSpec:
    """Sites hit by the coherent-state POVM, plus its oscillator frequency."""

    measured_sites: tuple[int, ...]
    omega: float = 1.0

    def __post_init__(self):
        sites = tuple(int(s) for s in self.measured_sites)
        if not sites:
            raise ValueError("measured_sites must be non-empty")
        if len(set(sites)) != len(sites):
            raise ValueError(f"measured_sites contains duplicates: {sites}")
        if self.omega <= 0.0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        object.__setattr__(self, "measured_sites", sites)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Zero-mean Gaussian law of the measured (X, P) amplitude vectors."""

    x_covariance: np.ndarray
    p_covariance: np.ndarray
    mean_x: np.ndarray
    mean_p: np.ndarray


@dataclass(frozen=True)
class PostMeasurementState:
    """Outcome-independent covariance of the whole chain after measurement."""

    covariance: CovarianceMatrix
    m_matrix: np.ndarray


def unmeasured_sites(params: ChainParams, spec: MeasurementSpec) -> tuple[int, ...]:
    """Complement of the measured set, ascending; orders the rows of M."""
    measured = set(spec.measured_sites)
    for s in measured:
        if not 0 <= s < params.n_sites:
            raise ValueError(f"measured site {s} out of range for N={params.n_sites}")
    rest = tuple(s for s in range(params.n_sites) if s not in measured)
    if not rest:
        raise ValueError("at least one site must stay unmeasured")
    return rest


def build_m_matrix(params: ChainParams, spec: MeasurementSpec) -> np.ndarray:
    """Schur complement of the momentum correlations over the unmeasured sites.

    Symmetric positive definite of size N - |A|; the SPD solve against
    L + (omega/2) I raises LinAlgError if the inputs are not physical.
    """
    meas = list(spec.measured_sites)
    rest = list(unmeasured_sites(params, spec))
    _, l_block = correlation_submatrices(params, meas, meas)
    _, k_block = correlation_submatrices(params, meas, rest)
    _, h_block = correlation_submatrices(params, rest, rest)
    noisy = l_block + (spec.omega / 2.0) * np.eye(len(meas))
    m = h_block - k_block.T @ cho_solve(cho_factor(noisy), k_block)
    return (m + m.T) / 2


def post_measurement_covariance(params: ChainParams, spec: MeasurementSpec) -> PostMeasurementState:
    """Assemble the full post-measurement covariance in canonical ordering.

    Measured sites carry the coherent-state blocks diag(1/(2 omega),
    omega/2); unmeasured sites carry (1/4) M^{-1} and M; every cross block
    between the two groups vanishes identically.
    """
    m = build_m_matrix(params, spec)
    m_inv = cho_solve(cho_factor(m), np.eye(m.shape[0]))
    m_inv = (m_inv + m_inv.T) / 2
    n = params.n_sites
    v = np.zeros((2 * n, 2 * n))
    for s in spec.measured_sites:
        v[2 * s, 2 * s] = 1.0 / (2.0 * spec.omega)
        v[2 * s + 1, 2 * s + 1] = spec.omega / 2.0
    rest = np.array(unmeasured_sites(params, spec), dtype=int)
    v[np.ix_(2 * rest, 2 * rest)] = m_inv / 4.0
    v[np.ix_(2 * rest + 1, 2 * rest + 1)] = m
    return PostMeasurementState(covariance=CovarianceMatrix(v), m_matrix=m)


def outcome_distribution(params: ChainParams, spec: MeasurementSpec) -> OutcomeDistribution:
    """Gaussian law of the measured amplitudes: ground correlations plus detector noise."""
    meas = list(spec.measured_sites)
    unmeasured_sites(params, spec)  # validates the site range
    c_block, l_block = correlation_submatrices(params, meas, meas)
    eye = np.eye(len(meas))
    return OutcomeDistribution(
        x_covariance=c_block + eye / (2.0 * spec.omega),
        p_covariance=l_block + (spec.omega / 2.0) * eye,
        mean_x=np.zeros(len(meas)),
        mean_p=np.zeros(len(meas)),
    )


def sample_outcomes(dist: OutcomeDistribution, seed: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw outcome vectors; rows of the returned (count, |A|) arrays pair up as (X, P).

    Deterministic for a given seed: standard normals are multiplied by the
    Cholesky factors of the two covariances, X stream first.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    m = dist.mean_x.size
    xs = rng.standard_normal((count, m)) @ np.linalg.cholesky(dist.x_covariance).T
    ps = rng.standard_normal((count, m)) @ np.linalg.cholesky(dist.p_covariance).T
    return xs + dist.mean_x, ps + dist.mean_p
