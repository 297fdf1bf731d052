"""Covariance-matrix algebra for Gaussian states.

All states are carried as real symmetric covariance matrices over the
canonical variables in interleaved ordering (q0, p0, q1, p1, ...), with
entries V[j, k] = (1/2)<x_j x_k + x_k x_j> - <x_j><x_k>.  Physical states
have every symplectic eigenvalue >= 1/2 (vacuum units, hbar = 1).

Entanglement bookkeeping follows the usual continuous-variable recipe:
logarithmic negativity from the partially transposed covariance matrix in
log base 2, von Neumann entropy in natural-log units.  The mixed bases are
deliberate and are kept throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-12
# Tolerance for discarding tiny negative eigenvalues of -(Omega V)^2.
SPECTRUM_TOL = 1e-9
# A symplectic eigenvalue this far below 1/2 means the state is unphysical.
PHYSICALITY_TOL = 1e-6


class NumericsError(RuntimeError):
    """A linear-algebra result fell outside its validity tolerance."""


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric 2n x 2n second-moment matrix in interleaved (q, p) ordering."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2 != 0:
            raise ValueError(f"covariance matrix must be square with even size, got {m.shape}")
        if np.abs(m - m.T).max() > SYMMETRY_TOL:
            raise ValueError("covariance matrix is not symmetric within 1e-12")
        object.__setattr__(self, "matrix", (m + m.T) / 2)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2


@dataclass(frozen=True)
class SymplecticSpectrum:
    """Symplectic eigenvalues of a covariance matrix, sorted ascending."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or np.any(v < 0):
            raise ValueError("spectrum must be a vector of non-negative reals")
        object.__setattr__(self, "values", np.sort(v))

    @property
    def n_modes(self) -> int:
        return self.values.size


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form with 2x2 blocks [[0, 1], [-1, 0]]."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    idx = np.arange(n_modes)
    omega[2 * idx, 2 * idx + 1] = 1.0
    omega[2 * idx + 1, 2 * idx] = -1.0
    return omega


def _mode_indices(sites, n_modes: int) -> np.ndarray:
    sites = list(sites)
    if len(set(sites)) != len(sites):
        raise ValueError(f"duplicate mode indices in {sites}")
    for s in sites:
        if not 0 <= s < n_modes:
            raise ValueError(f"mode index {s} out of range for {n_modes} modes")
    return np.array([j for s in sites for j in (2 * s, 2 * s + 1)], dtype=int)


def symplectic_eigenvalues(V: CovarianceMatrix) -> SymplecticSpectrum:
    """Symplectic spectrum of a covariance matrix.

    Computed as the positive square roots of the eigenvalues of
    -(Omega V)^2, which come in coincident pairs; adjacent sorted pairs are
    averaged to defeat round-off splitting.  Eigenvalues with real part
    below -1e-9 signal an invalid input and are rejected.
    """
    m = V.matrix
    a = symplectic_form(V.n_modes) @ m
    ev = np.linalg.eigvals(-(a @ a))
    ev = ev.real if np.iscomplexobj(ev) else ev
    if ev.min() < -SPECTRUM_TOL:
        raise NumericsError(f"eigenvalue {ev.min():.3e} of -(Omega V)^2 is negative beyond tolerance")
    nu = np.sqrt(np.clip(np.sort(ev), 0.0, None))
    return SymplecticSpectrum((nu[0::2] + nu[1::2]) / 2)


def reduce(V: CovarianceMatrix, sites) -> CovarianceMatrix:
    """Principal submatrix on the given modes, their (q, p) rows kept in order."""
    sites = list(sites)
    if not sites:
        raise ValueError("cannot reduce to an empty mode subset")
    idx = _mode_indices(sites, V.n_modes)
    return CovarianceMatrix(V.matrix[np.ix_(idx, idx)])


def partial_transpose(V: CovarianceMatrix, b_sites) -> CovarianceMatrix:
    """Flip the sign of the momentum rows/columns of the given modes.

    Phase-space transcription of transposing party B; an involution.
    """
    b_sites = list(b_sites)
    _mode_indices(b_sites, V.n_modes)
    m = V.matrix.copy()
    p_rows = [2 * s + 1 for s in b_sites]
    m[p_rows, :] *= -1.0
    m[:, p_rows] *= -1.0
    return CovarianceMatrix(m)


def log_negativity(V: CovarianceMatrix, b_sites) -> float:
    """Logarithmic negativity -sum_n min(0, log2(2 nu_n)) of the partial transpose.

    Zero whenever the partially transposed spectrum stays at or above 1/2,
    which is the separability test for this bipartition.
    """
    nu = symplectic_eigenvalues(partial_transpose(V, b_sites)).values
    return float(-np.sum(np.minimum(0.0, np.log2(2.0 * nu)))) + 0.0  # avoid -0.0


def _entropy_terms(nu: np.ndarray) -> np.ndarray:
    # (x + 1/2) ln(x + 1/2) - (x - 1/2) ln(x - 1/2), with the removable
    # singularity at x = 1/2 evaluated as 0.
    x = np.clip(nu, 0.5, None)
    upper = (x + 0.5) * np.log(x + 0.5)
    t = x - 0.5
    lower = np.where(t < 1e-12, 0.0, t * np.log(np.where(t < 1e-12, 1.0, t)))
    return upper - lower


def von_neumann_entropy(V: CovarianceMatrix) -> float:
    """Entropy (natural-log units) of a Gaussian state from its symplectic spectrum."""
    nu = symplectic_eigenvalues(V).values
    if nu.min() < 0.5 - PHYSICALITY_TOL:
        raise NumericsError(f"symplectic eigenvalue {nu.min():.6g} < 1/2: unphysical state")
    return float(np.sum(_entropy_terms(nu)))


def mutual_information(V: CovarianceMatrix, a_sites, b_sites) -> float:
    """S(A) + S(B) - S(A+B) for disjoint mode subsets A and B."""
    a_sites, b_sites = list(a_sites), list(b_sites)
    if set(a_sites) & set(b_sites):
        raise ValueError(f"subsets overlap: {sorted(set(a_sites) & set(b_sites))}")
    s_a = von_neumann_entropy(reduce(V, a_sites))
    s_b = von_neumann_entropy(reduce(V, b_sites))
    s_ab = von_neumann_entropy(reduce(V, a_sites + b_sites))
    return s_a + s_b - s_ab
