"""Open-system models and their chain-mapped interaction-picture terms.

A model is a small system Hamiltonian plus a list of channels. Each channel
couples a Hermitian system operator ``A_c`` to one linear combination of the
shared bath modes,

    H = H_sys + sum_c A_c (x) sum_i c_i (a_i^+ + a_i) + sum_i w_i a_i^+ a_i.

After an orthogonal mode mapping ``T`` and the interaction picture with
respect to the bath, channel ``c`` couples to new mode ``k`` through
``A_c (x) (conj(c_k(t)) b_k^+ + c_k(t) b_k)``. Sites are ordered as in the
MPS: the system is site 0 and mode ``k`` sits on site ``k + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chainmap import (
    ChainMapping,
    MappingKind,
    TimeDependentCouplings,
    block_lanczos_map,
    lanczos_map,
)
from .errors import DegenerateSeedError, InvalidParameterError
from .spectral import DiscretizedBath

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])

SKIP_TOL = 1e-10
HERMITIAN_TOL = 1e-12


def _hermitian(name, mat, dim=None):
    mat = np.array(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidParameterError(f"{name} must be a square matrix")
    if dim is not None and mat.shape[0] != dim:
        raise InvalidParameterError(f"{name} has dimension {mat.shape[0]}, expected {dim}")
    if np.max(np.abs(mat - mat.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise InvalidParameterError(f"{name} is not Hermitian")
    if not np.any(mat.imag):
        mat = mat.real
    mat.setflags(write=False)
    return mat


@dataclass(frozen=True)
class Channel:
    label: str
    operator: np.ndarray
    couplings: np.ndarray


@dataclass(frozen=True)
class OpenSystemModel:
    """System Hamiltonian, channels and the bath they share.

    ``basis`` names the system basis states, e.g. ``("S1", "TT")``.
    """

    h_sys: np.ndarray
    channels: tuple
    bath: DiscretizedBath
    basis: tuple = ()
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        h = _hermitian("H_sys", self.h_sys)
        object.__setattr__(self, "h_sys", h)
        chans = []
        for ch in self.channels:
            op = _hermitian(f"operator of channel {ch.label!r}", ch.operator, h.shape[0])
            c = np.array(ch.couplings, dtype=float)
            if c.shape != (self.bath.n_modes,):
                raise InvalidParameterError(
                    f"channel {ch.label!r} has {c.size} couplings, bath has "
                    f"{self.bath.n_modes} modes"
                )
            c.setflags(write=False)
            chans.append(Channel(ch.label, op, c))
        labels = [c.label for c in chans]
        if len(set(labels)) != len(labels):
            raise InvalidParameterError(f"duplicate channel labels {labels}")
        object.__setattr__(self, "channels", tuple(chans))
        if not self.basis:
            object.__setattr__(self, "basis", tuple(str(i) for i in range(h.shape[0])))

    @property
    def system_dim(self) -> int:
        return self.h_sys.shape[0]

    @property
    def frequencies(self) -> np.ndarray:
        return self.bath.frequencies

    def channel(self, label: str) -> Channel:
        for ch in self.channels:
            if ch.label == label:
                return ch
        raise KeyError(f"unknown channel {label!r}")


def build_spin_boson(delta_x, delta_z, bath: DiscretizedBath,
                     channel_ops=None) -> OpenSystemModel:
    """Two-level system ``delta_x sx + delta_z sz`` with ``x`` and ``z`` channels.

    ``channel_ops`` maps bath channel labels to system operators and defaults
    to ``{"x": SIGMA_X, "z": SIGMA_Z}``.
    """
    if channel_ops is None:
        channel_ops = {"x": SIGMA_X, "z": SIGMA_Z}
    channels = tuple(
        Channel(label, op, bath.couplings(label)) for label, op in channel_ops.items()
    )
    h = delta_x * SIGMA_X + delta_z * SIGMA_Z
    return OpenSystemModel(h, channels, bath, basis=("up", "down"), name="spin_boson",
                           params={"delta_x": delta_x, "delta_z": delta_z})


@dataclass(frozen=True)
class SingletFissionParams:
    """Singlet-fission parameters, energies in meV.

    Reorganisation-type strengths default to the multiples of the vibrational
    energies listed with the model (0.7 and 1.4 of ``omega_diag``, 0.1 of
    ``omega_od``); pass explicit values to override.
    """

    delta_z: float = 100.0
    delta_x: float = 20.0
    omega_diag: float = 80.0
    omega_od: float = 60.0
    gamma_ps: float = 1.0
    lambda_s1: float | None = None
    lambda_tt: float | None = None
    lambda_od: float | None = None
    n_modes: int = 300
    cutoff: float = 800.0 / 8.065544

    def resolved(self) -> "SingletFissionParams":
        from dataclasses import replace

        return replace(
            self,
            lambda_s1=0.7 * self.omega_diag if self.lambda_s1 is None else self.lambda_s1,
            lambda_tt=1.4 * self.omega_diag if self.lambda_tt is None else self.lambda_tt,
            lambda_od=0.1 * self.omega_od if self.lambda_od is None else self.lambda_od,
        )

    def bath(self) -> DiscretizedBath:
        from .spectral import discretize_shared, singlet_fission_densities

        dens = singlet_fission_densities(self.omega_diag, self.omega_od,
                                         self.gamma_ps, self.cutoff)
        return discretize_shared(dens, self.n_modes)


def build_singlet_fission(params: SingletFissionParams,
                          bath: DiscretizedBath | None = None) -> OpenSystemModel:
    """Two-state ``|S1>, |TT>`` model with diagonal and off-diagonal channels.

    The diagonal channel ``"z"`` couples ``sqrt(l_S1)|S1><S1| + sqrt(l_TT)|TT><TT|``
    to the couplings from the diagonal density; the off-diagonal channel ``"x"``
    couples ``sqrt(l_od)(|S1><TT| + h.c.)``. Channels whose operator vanishes
    are omitted.
    """
    p = params.resolved()
    for name in ("lambda_s1", "lambda_tt", "lambda_od"):
        if getattr(p, name) < 0:
            raise InvalidParameterError(f"{name} must be non-negative")
    if bath is None:
        bath = p.bath()
    h = p.delta_x * SIGMA_X + np.diag([p.delta_z, 0.0])
    diag_op = np.diag([np.sqrt(p.lambda_s1), np.sqrt(p.lambda_tt)])
    od_op = np.sqrt(p.lambda_od) * SIGMA_X
    channels = []
    if np.any(diag_op):
        channels.append(Channel("z", diag_op, bath.couplings("z")))
    if np.any(od_op):
        channels.append(Channel("x", od_op, bath.couplings("x")))
    return OpenSystemModel(h, tuple(channels), bath, basis=("S1", "TT"),
                           name="singlet_fission", params=p.__dict__.copy())


def map_model(model: OpenSystemModel, kind: str) -> ChainMapping:
    """Build the mapping named ``lanczos_x``, ``lanczos_z`` or ``block_lanczos``.

    Block Lanczos is seeded with the ``z`` channel first.
    """
    w = model.frequencies
    if kind.startswith("lanczos_"):
        label = kind.split("_", 1)[1]
        try:
            seed = model.channel(label).couplings
        except KeyError:
            # an inactive channel still defines a valid mode basis
            seed = model.bath.couplings(label)
        return lanczos_map(w, seed)
    if kind == "block_lanczos":
        labels = [c.label for c in model.channels]
        if len(labels) < 2:
            raise DegenerateSeedError(
                f"block Lanczos needs two active channels, model has {labels}"
            )
        order = sorted(labels, key=lambda lab: (lab != "z", lab))
        return block_lanczos_map(w, model.channel(order[0]).couplings,
                                 model.channel(order[1]).couplings)
    raise InvalidParameterError(f"unknown mapping kind {kind!r}")


@dataclass(frozen=True)
class Term:
    """One Hamiltonian term at a fixed time.

    A one-site term has ``sites == (0,)`` and ``amplitude is None``. A
    two-site term on ``(0, k + 1)`` is ``operator (x) (conj(a) b^+ + a b)``
    with ``a == amplitude``.
    """

    sites: tuple
    operator: np.ndarray
    amplitude: complex | None = None
    channel: str | None = None

    @property
    def mode(self) -> int | None:
        return None if len(self.sites) == 1 else self.sites[1] - 1

    def matrix(self, d_bath: int) -> np.ndarray:
        if self.amplitude is None:
            return np.asarray(self.operator, dtype=complex)
        b = annihilation(d_bath)
        bath_op = np.conj(self.amplitude) * b.T + self.amplitude * b
        return np.kron(self.operator, bath_op)


def annihilation(d: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, d, dtype=float)), 1)


class InteractionHamiltonian:
    """Chain-mapped interaction-picture Hamiltonian of a model.

    Times passed to :meth:`terms_at` and :meth:`couplings` are in units of
    hbar per model energy unit.
    """

    def __init__(self, model: OpenSystemModel, mapping: ChainMapping):
        if mapping.n_modes != model.bath.n_modes:
            raise InvalidParameterError("mapping and bath sizes differ")
        if not np.array_equal(mapping.frequencies, model.frequencies):
            raise InvalidParameterError("mapping was built for different frequencies")
        self.model = model
        self.mapping = mapping
        self.tdc = TimeDependentCouplings(
            mapping, {ch.label: ch.couplings for ch in model.channels}
        )

    @property
    def n_modes(self) -> int:
        return self.mapping.n_modes

    def couplings(self, t: float) -> np.ndarray:
        """Array ``(n_channels, n_modes)`` of ``c_k(t)`` in channel order."""
        if not self.model.channels:
            return np.zeros((0, self.n_modes), dtype=complex)
        return np.vstack([self.tdc.at(ch.label, t) for ch in self.model.channels])

    def active_modes(self, t: float, skip_tol: float = SKIP_TOL):
        """Couplings at ``t`` and the index of the last mode above the skip threshold."""
        c = self.couplings(t)
        if c.size == 0:
            return c, -1
        mag = np.abs(c)
        active = np.any(mag > skip_tol * mag.max(axis=1, keepdims=True), axis=0)
        keep = np.nonzero(active)[0]
        return c, int(keep[-1]) if keep.size else -1

    def terms_at(self, t: float, skip_tol: float = SKIP_TOL) -> list:
        if not np.isfinite(t):
            raise InvalidParameterError(f"time must be finite, got {t}")
        terms = [Term((0,), self.model.h_sys)]
        c = self.couplings(t)
        if c.size == 0:
            return terms
        for i, ch in enumerate(self.model.channels):
            mag = np.abs(c[i])
            for k in np.nonzero(mag > skip_tol * mag.max())[0]:
                terms.append(Term((0, int(k) + 1), ch.operator, complex(c[i, k]), ch.label))
        return terms


def terms_at(ham: InteractionHamiltonian, t: float) -> list:
    return ham.terms_at(t)


def dense_from_terms(terms: Sequence[Term], n_sites: int, local_dims) -> np.ndarray:
    """Embed a term list into the full product space (small instances only)."""
    dims = list(local_dims)
    total = int(np.prod(dims))
    out = np.zeros((total, total), dtype=complex)
    for term in terms:
        ops = [np.eye(d) for d in dims]
        ops[0] = np.asarray(term.operator, dtype=complex)
        if term.amplitude is not None:
            d = dims[term.sites[1]]
            b = annihilation(d)
            ops[term.sites[1]] = np.conj(term.amplitude) * b.T + term.amplitude * b
        full = ops[0]
        for op in ops[1:]:
            full = np.kron(full, op)
        out += full
    return out
