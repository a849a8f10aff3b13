"""End-to-end driver: co-evolve the exact N-body state and the Hartree
orbital on one time grid, emit indicator/bound records, run N-sweeps with
rate fits, and produce the eta(p) curve."""
from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass, fields, replace
from fractions import Fraction

import numpy as np

from .bounds import (
    beta_bound_envelope,
    conjugate_q,
    energies,
    eta_of,
    fitted_K,
    gronwall_alpha_bound,
    p0_of,
    phi_envelope_integral,
    phi_tilde_integral,
    wnorm_upper_bound,
)
from .condensate import alpha_of, beta_of, occupation_weights
from .errors import ConfigError
from .fock import ManyBodyState, build_HN, enumerate_basis, product_state
from .lattice import Grid, LatticeField, sample_interaction
from .onebody import (
    Orbital,
    build_h,
    evolve_hartree,
    gaussian_orbital,
    ground_state,
    harmonic_potential,
)
from .propagate import NBodyStepper, PropagatorConfig
from .reduce import E_k, R_k, gamma1, gamma2

CSV_HEADER = "t,N,M,alpha,beta,E1,E2,R1,R2,EPsi,Ephi,phi_t,alpha_bound,beta_bound,slack_alpha"


@dataclass(frozen=True)
class RunConfig:
    sites: int = 8
    particles: int = 4
    particles_list: tuple = ()
    dx: float = 1.0
    tfinal: float = 1.0
    dt: float = 1e-3
    stride: int = 10
    potential: str = "none"
    interaction: str = "gaussian:1,1"
    initial: str = ""  # default: gaussian at L/2 with sigma 1
    p1: float = math.inf
    p2: float = math.inf
    p: str = "3/2"
    dim: int = 3
    K: float = 1.0
    method: str = "krylov"
    out: str = ""
    seed: int = 0

    def __post_init__(self):
        for name in ("sites", "particles", "dx", "tfinal", "dt", "stride"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.particles_list and list(self.particles_list) != sorted(
            set(self.particles_list)
        ):
            raise ConfigError("particles-list must be strictly increasing")
        if not (2 <= self.p1 <= self.p2):
            raise ConfigError(f"need 2 <= p1 <= p2, got p1={self.p1}, p2={self.p2}")
        if self.K <= 0:
            raise ConfigError(f"K must be positive, got {self.K}")
        eta_of(Fraction(self.p), self.dim)  # validates p against (p0, 2]
        if self.method not in ("krylov", "dense"):
            raise ConfigError(f"unknown method {self.method!r}")

    @property
    def steps(self) -> int:
        n = round(self.tfinal / self.dt)
        if abs(n * self.dt - self.tfinal) > 1e-9 * max(1.0, self.tfinal):
            raise ConfigError("tfinal must be an integer multiple of dt")
        return int(n)

    @property
    def eta(self) -> Fraction:
        return eta_of(Fraction(self.p), self.dim)


_CONFIG_KEYS = {f.name for f in fields(RunConfig)}


def make_config(**kwargs) -> RunConfig:
    unknown = set(kwargs) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    return RunConfig(**kwargs)


def parse_config_file(path: str) -> dict:
    """Plain-text `key = value` configuration; unknown keys are errors."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value
    return out


def _parse_spec(spec: str, kinds: dict, what: str):
    """Parse 'kind:a,b' against {kind: (param names...)}."""
    name, _, rest = spec.partition(":")
    if name not in kinds:
        raise ConfigError(f"unknown {what} {name!r}; choose from {sorted(kinds)}")
    names = kinds[name]
    parts = [s for s in rest.split(",") if s] if rest else []
    if len(parts) != len(names):
        raise ConfigError(
            f"{what} {name!r} takes {len(names)} parameter(s) {names}, got {parts}"
        )
    return name, dict(zip(names, (float(s) for s in parts)))


def potential_field(cfg: RunConfig, grid: Grid):
    name, params = _parse_spec(
        cfg.potential, {"none": (), "harmonic": ("omega",)}, "potential"
    )
    if name == "none":
        return None
    return harmonic_potential(grid, params["omega"])


def interaction_field(cfg: RunConfig, grid: Grid) -> LatticeField:
    name, params = _parse_spec(
        cfg.interaction,
        {
            "constant": ("c",),
            "gaussian": ("lam", "sigma"),
            "softcoulomb": ("lam", "eps"),
            "invsquare": ("lam",),
            "random": (),
        },
        "interaction",
    )
    if name == "random":
        return sample_interaction(grid, "random", seed=cfg.seed)
    return sample_interaction(grid, name, **params)


def initial_orbital(cfg: RunConfig, grid: Grid, h: np.ndarray) -> Orbital:
    spec = cfg.initial or f"gaussian:{grid.length / 2.0},1"
    name, params = _parse_spec(
        spec, {"gaussian": ("x0", "sigma"), "groundstate": ()}, "initial orbital"
    )
    if name == "groundstate":
        return ground_state(h, grid)
    return gaussian_orbital(grid, params["x0"], params["sigma"])


@dataclass(frozen=True)
class TimeRecord:
    t: float
    N: int
    M: int
    alpha: float
    beta: float
    E1: float
    E2: float
    R1: float
    R2: float
    EPsi: float
    Ephi: float
    phi_t: float
    alpha_bound: float
    beta_bound: float
    slack_alpha: float

    def csv_row(self) -> str:
        vals = []
        for f in fields(self):
            v = getattr(self, f.name)
            vals.append(str(int(v)) if f.name in ("N", "M") else repr(float(v)))
        return ",".join(vals)


@dataclass
class RunResult:
    config: RunConfig
    records: list
    phi_tildes: np.ndarray
    beta0: float
    gap: float

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def fitted_K(self) -> float:
        return fitted_K(
            self.times,
            np.array([r.beta for r in self.records]),
            self.phi_tildes,
            self.beta0,
            self.gap,
            self.config.particles,
            float(self.config.eta),
        )


def default_cutoffs(w: LatticeField) -> list[float]:
    absw = np.abs(w.values)
    qs = np.quantile(absw, [0.25, 0.5, 0.75])
    return sorted(set([0.0, *(float(q) for q in qs), float(absw.max())]))


def run_simulation(cfg: RunConfig) -> RunResult:
    """Co-evolve Psi (exact) and phi (Hartree); one record per stride."""
    grid = Grid(cfg.sites, cfg.dx)
    v = potential_field(cfg, grid)
    w = interaction_field(cfg, grid)
    h = build_h(grid, v)
    phi0 = initial_orbital(cfg, grid, h)
    N = cfg.particles
    basis = enumerate_basis(cfg.sites, N)
    H = build_HN(h, w, basis)
    steps = cfg.steps

    traj = evolve_hartree(grid, v, w, phi0, cfg.dt, steps)

    w_bound = wnorm_upper_bound(w, cfg.p1, cfg.p2, default_cutoffs(w))
    q1, q2 = conjugate_q(cfg.p1), conjugate_q(cfg.p2)
    eta = float(cfg.eta)

    pcfg = PropagatorConfig(
        dt=cfg.dt,
        steps=steps,
        method="dense-eig" if cfg.method == "dense" else "krylov",
        krylov_tol=1e-12,
    )
    stepper = NBodyStepper(H, pcfg)

    record_steps = sorted(set(list(range(0, steps + 1, cfg.stride)) + [steps]))
    psi = product_state(phi0, basis)
    records: list[TimeRecord] = []
    phi_tildes: list[float] = []
    alpha0 = beta0 = gap = 0.0

    amps = psi.amps
    next_idx = 0
    for k in range(steps + 1):
        if k == record_steps[next_idx]:
            t = k * cfg.dt
            state = ManyBodyState(basis, amps)
            phi_t = traj.orbitals[k]
            g1 = gamma1(state)
            e1 = E_k(g1, phi_t)
            r1 = R_k(g1, phi_t)
            if N >= 2:
                g2 = gamma2(state)
                e2 = E_k(g2, phi_t)
                r2 = R_k(g2, phi_t)
            else:
                e2 = r2 = 0.0
            wd = occupation_weights(state, phi_t)
            alpha = alpha_of(wd)
            beta = beta_of(wd)
            e_psi, e_phi = energies(state, H, phi_t, h, w)
            if k == 0:
                alpha0, beta0, gap = alpha, beta, e_psi - e_phi
            phi_env = phi_envelope_integral(traj, w_bound, q1, q2, t)
            a_bound = gronwall_alpha_bound(alpha0, N, phi_env)
            ptil = phi_tilde_integral(traj, h, t)
            b_bound = beta_bound_envelope(beta0, gap, N, eta, cfg.K, ptil)
            records.append(
                TimeRecord(
                    t=t, N=N, M=cfg.sites,
                    alpha=alpha, beta=beta,
                    E1=e1, E2=e2, R1=r1, R2=r2,
                    EPsi=e_psi, Ephi=e_phi,
                    phi_t=phi_env, alpha_bound=a_bound,
                    beta_bound=b_bound, slack_alpha=a_bound - alpha,
                )
            )
            phi_tildes.append(ptil)
            next_idx += 1
            if next_idx == len(record_steps):
                break
        amps = stepper.step(amps)
    return RunResult(cfg, records, np.array(phi_tildes), beta0, gap)


@dataclass
class SweepResult:
    records: list
    runs: dict  # N -> RunResult
    e_slope: float | None
    r_slope: float | None
    degenerate: bool

    def fitted_Ks(self) -> dict:
        return {N: run.fitted_K() for N, run in self.runs.items()}


def sweep_N(cfg: RunConfig) -> SweepResult:
    """Run each N concurrently, merge records by (N, t), fit log-log slopes
    of the final-time indicators against N."""
    Ns = list(cfg.particles_list)
    if len(Ns) < 3:
        raise ConfigError("a sweep needs at least 3 values of N")
    jobs = {N: replace(cfg, particles=N, particles_list=()) for N in Ns}
    with concurrent.futures.ThreadPoolExecutor(max_workers=min(4, len(Ns))) as pool:
        futures = {N: pool.submit(run_simulation, job) for N, job in jobs.items()}
        runs = {N: futures[N].result() for N in Ns}

    records = [r for N in Ns for r in runs[N].records]
    records.sort(key=lambda r: (r.N, r.t))

    e_final = np.array([runs[N].records[-1].E1 for N in Ns])
    r_final = np.array([runs[N].records[-1].R1 for N in Ns])
    if np.max(e_final) < 1e-12:
        return SweepResult(records, runs, None, None, True)
    logN = np.log(np.array(Ns, dtype=float))
    e_slope = float(np.polyfit(logN, np.log(e_final), 1)[0])
    r_slope = float(np.polyfit(logN, np.log(r_final), 1)[0])
    return SweepResult(records, runs, e_slope, r_slope, False)


def eta_curve(d: int, p_values: list[Fraction]):
    """(p, eta) rows, exact rationals; out-of-range p values are skipped."""
    p0 = p0_of(d)
    rows, skipped = [], []
    for p in p_values:
        p = Fraction(p)
        if not (p0 < p <= 2):
            skipped.append(p)
            continue
        rows.append((p, eta_of(p, d)))
    return rows, skipped


def write_csv(records: list, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in records:
            fh.write(r.csv_row() + "\n")


def records_csv(records: list) -> str:
    return "\n".join([CSV_HEADER, *(r.csv_row() for r in records)]) + "\n"
