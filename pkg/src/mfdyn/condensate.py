"""Projector-weight distribution w_k = <Psi, P_k Psi> and the functionals
alpha = <Psi, m(dGamma(q)/...)> and beta, computed from moments of the
excitation-number operator dGamma(q).

dGamma(q) with q a projector has spectrum in {0, ..., N}, so the weights
solve an (N+1)-node Vandermonde system with known integer nodes. A Lagrange
filter-polynomial path cross-checks every call.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalFailure
from .fock import ManyBodyState, second_quantize_onebody
from .onebody import Orbital, condensate_projectors

WEIGHT_SUM_TOL = 1e-8
WEIGHT_NEG_TOL = 1e-7
CROSS_CHECK_TOL = 1e-6
MAX_N = 12


@dataclass(frozen=True)
class WeightDistribution:
    """(w_0, ..., w_N): spectral weights of Psi on the P_k sectors."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise NumericalFailure(f"weights sum to {w.sum()}, not 1")
        if w.min() < -WEIGHT_NEG_TOL:
            raise NumericalFailure(
                f"weight {w.min()} is negative beyond the roundoff allowance"
            )
        object.__setattr__(self, "weights", np.clip(w, 0.0, None))

    @property
    def n_particles(self) -> int:
        return self.weights.shape[0] - 1


def weight_function_m(N: int) -> np.ndarray:
    return np.arange(N + 1) / N


def weight_function_n(N: int) -> np.ndarray:
    return np.sqrt(np.arange(N + 1) / N)


def occupation_weights(psi: ManyBodyState, phi: Orbital) -> WeightDistribution:
    """Weights from moments of dGamma(q), q = 1 - |phi><phi|, with a
    Lagrange-filter cross-check."""
    N = psi.basis.particles
    if N > MAX_N:
        raise ConfigError(
            f"occupation weights are capped at N <= {MAX_N} for conditioning, got {N}"
        )
    _, q = condensate_projectors(phi)
    A = second_quantize_onebody(q, psi.basis)

    # moment path: mu_j = <Psi, A^j Psi>, Vandermonde nodes 0..N
    vecs = [psi.amps]
    for _ in range(N):
        vecs.append(A @ vecs[-1])
    mu = np.array([np.real(np.vdot(psi.amps, v)) for v in vecs])
    nodes = np.arange(N + 1, dtype=float)
    V = nodes[None, :] ** np.arange(N + 1)[:, None]
    V[0] = 1.0  # 0^0 = 1
    w_mom = np.linalg.solve(V, mu)

    # Lagrange path: w_k = <Psi, prod_{l != k} (A - l)/(k - l) Psi>
    w_lag = np.empty(N + 1)
    for k in range(N + 1):
        v = psi.amps.copy()
        for l in range(N + 1):
            if l == k:
                continue
            v = (A @ v - l * v) / (k - l)
        w_lag[k] = np.real(np.vdot(psi.amps, v))

    if np.max(np.abs(w_mom - w_lag)) > CROSS_CHECK_TOL:
        raise NumericalFailure(
            "moment and Lagrange weight paths disagree by "
            f"{np.max(np.abs(w_mom - w_lag))}; N may be too large for this method"
        )
    return WeightDistribution(w_mom)


def alpha_of(wd: WeightDistribution) -> float:
    """sum_k (k/N) w_k = <Psi, q_1 Psi> = E^(1)."""
    return float(weight_function_m(wd.n_particles) @ wd.weights)


def beta_of(wd: WeightDistribution) -> float:
    """sum_k sqrt(k/N) w_k; alpha <= beta <= sqrt(alpha)."""
    return float(weight_function_n(wd.n_particles) @ wd.weights)


# ---------------------------------------------------------------------------
# First-quantized sector projectors (tests only)
# ---------------------------------------------------------------------------

def tensor_sector_projectors(phi: Orbital, N: int) -> list[np.ndarray]:
    """P_k on the (C^M)^(x)N tensor space: multiply out (p+q)^(x)N and
    collect the summands with exactly k factors q."""
    p, q = condensate_projectors(phi)
    M = phi.grid.sites
    Pk = [np.zeros((M**N, M**N), dtype=complex) for _ in range(N + 1)]
    for bits in itertools.product((0, 1), repeat=N):
        term = np.eye(1, dtype=complex)
        for b in bits:
            term = np.kron(term, q if b else p)
        Pk[sum(bits)] += term
    return Pk


def tensor_hat_f(f: np.ndarray, phi: Orbital, N: int) -> np.ndarray:
    """f-hat = sum_k f(k) P_k on the tensor space."""
    Pk = tensor_sector_projectors(phi, N)
    return sum(f[k] * Pk[k] for k in range(N + 1))
