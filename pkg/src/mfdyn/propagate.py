"""Unitary time evolution of a many-body state and expectation values."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import ConfigError, NumericalFailure
from .fock import ManyBodyState

DENSE_EIG_CAP = 3000


@dataclass(frozen=True)
class PropagatorConfig:
    dt: float
    steps: int
    method: str = "krylov"  # "krylov" | "dense-eig"
    krylov_maxdim: int = 40
    krylov_tol: float = 1e-10
    unitarity_tol: float = 1e-8

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.steps < 0:
            raise ConfigError(f"steps must be nonnegative, got {self.steps}")
        if self.method not in ("krylov", "dense-eig"):
            raise ConfigError(f"unknown propagator method {self.method!r}")


def expectation(psi: ManyBodyState, A) -> complex:
    """<psi, A psi> for a sparse or dense operator on the same basis."""
    if A.shape != (psi.basis.dim, psi.basis.dim):
        raise ConfigError("operator and state dimensions do not match")
    return complex(np.vdot(psi.amps, A @ psi.amps))


def lanczos_expm_apply(H, v: np.ndarray, dt: float, maxdim: int, tol: float) -> np.ndarray:
    """exp(-i dt H) v for Hermitian H via an adaptive Lanczos subspace.

    Stops when the standard residual estimate beta_{j+1} |y_j| drops below
    tol, or on happy breakdown; raises if maxdim is reached unconverged.
    """
    nrm = np.linalg.norm(v)
    if nrm == 0:
        return v.copy()
    V = np.empty((maxdim, v.shape[0]), dtype=complex)
    alpha = np.zeros(maxdim)
    beta = np.zeros(maxdim)
    V[0] = v / nrm
    w = H @ V[0]
    alpha[0] = np.real(np.vdot(V[0], w))
    w = w - alpha[0] * V[0]
    for j in range(1, maxdim + 1):
        b = np.linalg.norm(w)
        T = np.diag(alpha[:j]) + np.diag(beta[1:j], 1) + np.diag(beta[1:j], -1)
        y = scipy.linalg.expm(-1j * dt * T)[:, 0]
        if b < 1e-14 or b * abs(y[-1]) * abs(dt) < tol:
            return nrm * (y @ V[:j])
        if j == maxdim:
            break
        beta[j] = b
        V[j] = w / b
        w = H @ V[j] - beta[j] * V[j - 1]
        alpha[j] = np.real(np.vdot(V[j], w))
        w = w - alpha[j] * V[j]
        # full reorthogonalization; cheap at desk-scale subspace sizes
        w = w - (V[: j + 1].conj() @ w) @ V[: j + 1]
    raise NumericalFailure(
        f"Lanczos exponential did not converge within maxdim={maxdim}"
    )


class DenseEigPropagator:
    """Exact propagation from a one-time dense eigendecomposition."""

    def __init__(self, H):
        dim = H.shape[0]
        if dim > DENSE_EIG_CAP:
            raise ConfigError(
                f"dense-eig method allowed only for dim <= {DENSE_EIG_CAP}, got {dim}"
            )
        Hd = H.toarray() if sp.issparse(H) else np.asarray(H)
        self.evals, self.evecs = np.linalg.eigh(Hd)

    def apply(self, v: np.ndarray, dt: float) -> np.ndarray:
        c = self.evecs.conj().T @ v
        return self.evecs @ (np.exp(-1j * dt * self.evals) * c)


class NBodyStepper:
    """One exp(-i dt H) step, method per PropagatorConfig."""

    def __init__(self, H, cfg: PropagatorConfig):
        self.H = H
        self.cfg = cfg
        self._dense = DenseEigPropagator(H) if cfg.method == "dense-eig" else None

    def step(self, amps: np.ndarray) -> np.ndarray:
        if self._dense is not None:
            out = self._dense.apply(amps, self.cfg.dt)
        else:
            out = lanczos_expm_apply(
                self.H, amps, self.cfg.dt, self.cfg.krylov_maxdim, self.cfg.krylov_tol
            )
        if not np.all(np.isfinite(out)):
            raise NumericalFailure("propagation produced nonfinite amplitudes")
        if abs(np.linalg.norm(out) - 1.0) > self.cfg.unitarity_tol:
            raise NumericalFailure(
                f"norm drifted to {np.linalg.norm(out)} beyond the unitarity tolerance"
            )
        return out


def evolve_nbody(H, psi0: ManyBodyState, cfg: PropagatorConfig) -> list[ManyBodyState]:
    """States at t = 0, dt, ..., steps*dt."""
    stepper = NBodyStepper(H, cfg)
    out = [psi0]
    amps = psi0.amps
    for _ in range(cfg.steps):
        amps = stepper.step(amps)
        out.append(ManyBodyState(psi0.basis, amps))
    return out
