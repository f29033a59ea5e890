"""Time evolution of the chain-mapped interaction-picture Hamiltonian.

Every two-site term couples the system to one chain mode, so a step carries
the system site down the chain with swap gates. Going right, each mode ``k``
gets ``exp(-i dt/2 h_k)`` and is swapped past the system; at the turnaround
the system evolves under ``exp(-i dt H_sys)``; coming back the mode gates are
applied in reverse order. The resulting symmetric product is second order, and
all couplings are frozen at the step midpoint.

Times in this module are in ps and energies in meV unless ``hbar`` says
otherwise (use ``hbar=1`` for dimensionless models).
"""
from __future__ import annotations

import time as _time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .chainmap import ChainMapping
from .errors import DimensionError, InvalidParameterError, NumericalFailureError
from .model import SKIP_TOL, InteractionHamiltonian, OpenSystemModel, annihilation, map_model
from .mps import DENSE_LIMIT, MPSState, entropy_from_singular_values, product_state, svd, truncation_rank
from .units import HBAR_MEV_PS

EIGH_LIMIT = 1024


@dataclass
class EvolutionConfig:
    """Integrator and truncation settings (times in ps)."""

    dt: float = 0.25e-3
    t_final: float = 0.4
    svd_cutoff: float = 1e-4
    max_bond: int | None = 64
    d_bath: int = 12
    measure_every: int = 1
    mapping: str = "lanczos_z"
    hbar: float = HBAR_MEV_PS
    skip_tol: float = SKIP_TOL

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidParameterError(f"dt must be positive, got {self.dt}")
        if not self.t_final >= 0:
            raise InvalidParameterError(f"t_final must be non-negative, got {self.t_final}")
        if self.d_bath < 2:
            raise InvalidParameterError(f"d_bath must be at least 2, got {self.d_bath}")
        if self.measure_every < 1:
            raise InvalidParameterError("measure_every must be at least 1")
        if self.max_bond is not None and self.max_bond < 1:
            raise InvalidParameterError("max_bond must be positive")
        if self.svd_cutoff < 0:
            raise InvalidParameterError("svd_cutoff must be non-negative")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass
class Trajectory:
    """Measured observables; row ``i`` of every array belongs to ``times[i]``."""

    times: np.ndarray
    populations: np.ndarray
    entropies: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    bond_dims: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=int))
    discarded_weight: np.ndarray = field(default_factory=lambda: np.zeros(0))
    wall_time: np.ndarray = field(default_factory=lambda: np.zeros(0))
    basis: tuple = ()

    def population(self, state: int = 0) -> np.ndarray:
        return self.populations[:, state]

    def entropy_crossing_times(self, threshold: float = 0.05) -> np.ndarray:
        """First time each bond's entropy exceeds ``threshold`` (nan if never)."""
        out = np.full(self.entropies.shape[1], np.nan)
        for b in range(self.entropies.shape[1]):
            hit = np.nonzero(self.entropies[:, b] > threshold)[0]
            if hit.size:
                out[b] = self.times[hit[0]]
        return out


def _expm_hermitian(h, tau):
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * tau * w)) @ v.conj().T


def _mode_hamiltonian(ham: InteractionHamiltonian, c_k, d_bath):
    b = annihilation(d_bath)
    ds = ham.model.system_dim
    h = np.zeros((ds * d_bath, ds * d_bath), dtype=complex)
    for ch, amp in zip(ham.model.channels, c_k):
        if amp != 0:
            h += np.kron(ch.operator, np.conj(amp) * b.T + amp * b)
    return h


def _split(theta, left_shape, right_shape, cfg, center_left):
    """SVD a two-site block, truncate, renormalise; returns tensors and weights."""
    chi_l, d1 = left_shape
    d2, chi_r = right_shape
    mat = theta.reshape(chi_l * d1, d2 * chi_r)
    if not np.all(np.isfinite(mat)):
        raise NumericalFailureError("non-finite entries in two-site tensor")
    try:
        u, s, vh = svd(mat)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"SVD failed: {exc}") from exc
    rank = truncation_rank(s, cfg.svd_cutoff, cfg.max_bond)
    total = float(np.sum(s**2))
    discarded = float(np.sum(s[rank:] ** 2)) / total
    u, s, vh = u[:, :rank], s[:rank], vh[:rank]
    s = s / np.linalg.norm(s)
    if center_left:
        left = (u * s).reshape(chi_l, d1, rank)
        right = vh.reshape(rank, d2, chi_r)
    else:
        left = u.reshape(chi_l, d1, rank)
        right = (s[:, None] * vh).reshape(rank, d2, chi_r)
    return left, right, s, discarded


def step(state: MPSState, ham: InteractionHamiltonian, t: float, dt: float,
         cfg: EvolutionConfig) -> MPSState:
    """Advance ``state`` (system on site 0, center on site 0) from ``t`` to ``t + dt``.

    The state is updated in place and returned.
    """
    if state.center != 0:
        state.move_center(0)
    ds = ham.model.system_dim
    d = cfg.d_bath
    tau = dt / cfg.hbar
    c, k_max = ham.active_modes((t + 0.5 * dt) / cfg.hbar, cfg.skip_tol)
    gates = [
        _expm_hermitian(_mode_hamiltonian(ham, c[:, k], d), 0.5 * tau).reshape(ds, d, ds, d)
        for k in range(k_max + 1)
    ]
    u_sys = _expm_hermitian(np.asarray(ham.model.h_sys, dtype=complex), tau)
    ts = state.tensors

    # system walks right: (sys, mode k) -> (mode k, sys)
    for k in range(k_max + 1):
        a, b = ts[k], ts[k + 1]
        theta = np.tensordot(a, b, axes=(2, 0))  # l, s, n, r
        theta = np.tensordot(theta, gates[k], axes=([1, 2], [2, 3]))  # l, r, s', n'
        theta = theta.transpose(0, 3, 2, 1)  # l, n', s', r
        left, right, s, disc = _split(theta, (a.shape[0], d), (ds, b.shape[2]), cfg, False)
        ts[k], ts[k + 1] = left, right
        state.schmidt[k] = s
        state.discarded_weight += disc

    p = k_max + 1
    ts[p] = np.einsum("st,ltr->lsr", u_sys, ts[p])

    # system walks back: (mode k, sys) -> (sys, mode k)
    for k in range(k_max, -1, -1):
        a, b = ts[k], ts[k + 1]
        theta = np.tensordot(a, b, axes=(2, 0))  # l, n, s, r
        theta = np.tensordot(theta, gates[k], axes=([2, 1], [2, 3]))  # l, r, s', n'
        theta = theta.transpose(0, 2, 3, 1)  # l, s', n', r
        left, right, s, disc = _split(theta, (a.shape[0], ds), (d, b.shape[2]), cfg, True)
        ts[k], ts[k + 1] = left, right
        state.schmidt[k] = s
        state.discarded_weight += disc

    state.center = 0
    if not np.all(np.isfinite(ts[0])):
        raise NumericalFailureError(f"non-finite state after step at t = {t}")
    return state


def initial_state(model: OpenSystemModel, d_bath: int, system_state: int = 0) -> MPSState:
    """System in basis state ``system_state``, every mode in its vacuum."""
    n = model.bath.n_modes
    return product_state([model.system_dim] + [d_bath] * n, [system_state] + [0] * n)


def _measure(state: MPSState):
    t0 = state.tensors[0]
    rho = np.einsum("lsr,ltr->st", t0, t0.conj())
    pops = np.real(np.diag(rho)) / np.real(np.trace(rho))
    ent = []
    for b, s in enumerate(state.schmidt):
        if s is None:
            s = state.copy().singular_values(b)
        ent.append(entropy_from_singular_values(s))
    return pops, np.array(ent), np.array(state.bond_dims)


def run_trajectory(model: OpenSystemModel, mapping, initial: MPSState | None,
                   cfg: EvolutionConfig, progress=None) -> Trajectory:
    """Propagate and measure every ``cfg.measure_every`` steps.

    ``mapping`` is a :class:`ChainMapping` or a kind name understood by
    :func:`chainbath.model.map_model`. ``progress``, if given, is called as
    ``progress(step_index, n_steps)``.
    """
    if not isinstance(mapping, ChainMapping):
        mapping = map_model(model, mapping)
    ham = InteractionHamiltonian(model, mapping)
    state = initial_state(model, cfg.d_bath) if initial is None else initial.copy()
    expected = [model.system_dim] + [cfg.d_bath] * model.bath.n_modes
    if state.local_dims != expected:
        raise DimensionError(f"initial state dims {state.local_dims} != {expected}")
    state.move_center(0)

    times, pops, ents, dims, disc, wall = [], [], [], [], [], []

    def record(t, elapsed):
        p, e, b = _measure(state)
        times.append(t)
        pops.append(p)
        ents.append(e)
        dims.append(b)
        disc.append(state.discarded_weight)
        wall.append(elapsed)

    record(0.0, 0.0)
    n_steps = cfg.n_steps
    for i in range(n_steps):
        t = i * cfg.dt
        t0 = _time.perf_counter()
        try:
            step(state, ham, t, cfg.dt, cfg)
        except NumericalFailureError as exc:
            raise NumericalFailureError(f"step {i} (t = {t:.6g}): {exc}") from exc
        elapsed = _time.perf_counter() - t0
        if (i + 1) % cfg.measure_every == 0 or i + 1 == n_steps:
            record((i + 1) * cfg.dt, elapsed)
        if progress is not None:
            progress(i + 1, n_steps)
    return Trajectory(
        times=np.array(times),
        populations=np.array(pops),
        entropies=np.array(ents),
        bond_dims=np.array(dims, dtype=int),
        discarded_weight=np.array(disc),
        wall_time=np.array(wall),
        basis=model.basis,
    )


def star_hamiltonian(model: OpenSystemModel, d_bath: int) -> sp.csr_matrix:
    """Sparse Schroedinger-picture Hamiltonian on the truncated star space."""
    n = model.bath.n_modes
    dims = [model.system_dim] + [d_bath] * n
    total = int(np.prod(dims))
    if total > DENSE_LIMIT:
        raise DimensionError(f"Hilbert space dimension {total} exceeds {DENSE_LIMIT}")
    b = sp.csr_matrix(annihilation(d_bath))
    num = sp.csr_matrix(np.diag(np.arange(d_bath, dtype=float)))

    def embed(op_sys, mode=None, op_mode=None):
        mats = [sp.csr_matrix(op_sys) if op_sys is not None else sp.identity(dims[0])]
        for j in range(n):
            mats.append(op_mode if j == mode else sp.identity(d_bath))
        out = mats[0]
        for m in mats[1:]:
            out = sp.kron(out, m, format="csr")
        return out

    h = embed(np.asarray(model.h_sys, dtype=complex))
    x = b + b.T
    for j, w in enumerate(model.frequencies):
        h = h + w * embed(None, j, num)
        for ch in model.channels:
            if ch.couplings[j] != 0:
                h = h + ch.couplings[j] * embed(np.asarray(ch.operator, dtype=complex), j, x)
    return h.tocsr()


def ed_reference(model: OpenSystemModel, t_grid, d_bath: int, system_state: int = 0,
                 hbar: float = HBAR_MEV_PS) -> Trajectory:
    """Exact propagation of the undisplaced star Hamiltonian on a truncated space.

    No chain mapping is involved. Dimensions up to 1024 use a full
    eigendecomposition; larger ones (up to 2**14) use Krylov exponentials.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    h = star_hamiltonian(model, d_bath)
    total = h.shape[0]
    ds = model.system_dim
    psi0 = np.zeros(total, dtype=complex)
    psi0[system_state * (total // ds)] = 1.0

    def pops_of(psi):
        amp = np.abs(psi.reshape(ds, -1)) ** 2
        return amp.sum(axis=1)

    pops = []
    if total <= EIGH_LIMIT:
        e, v = np.linalg.eigh(h.toarray())
        coeff = v.conj().T @ psi0
        for t in t_grid:
            pops.append(pops_of(v @ (np.exp(-1j * e * t / hbar) * coeff)))
    else:
        psi, t_prev = psi0, 0.0
        hm = (-1j / hbar) * h
        for t in t_grid:
            if t != t_prev:
                psi = expm_multiply(hm * (t - t_prev), psi)
            t_prev = t
            pops.append(pops_of(psi))
    return Trajectory(times=t_grid.copy(), populations=np.array(pops), basis=model.basis)


def two_level_population(h_sys, times, hbar: float = HBAR_MEV_PS, initial: int = 0):
    """Closed-form probability of remaining in basis state ``initial``.

    For ``H = e0 + b . sigma`` with ``|b| = W`` this is
    ``cos^2(W t) + (b_z / W)^2 sin^2(W t)`` (``t`` in units of ``hbar``).
    """
    h = np.asarray(h_sys, dtype=complex)
    if h.shape != (2, 2):
        raise DimensionError("two_level_population needs a 2x2 Hamiltonian")
    bz = 0.5 * (h[0, 0] - h[1, 1]).real
    bperp2 = abs(h[0, 1]) ** 2
    omega = np.sqrt(bz**2 + bperp2)
    arg = omega * np.asarray(times, dtype=float) / hbar
    if omega == 0:
        return np.ones_like(arg)
    return np.cos(arg) ** 2 + (bz / omega) ** 2 * np.sin(arg) ** 2
