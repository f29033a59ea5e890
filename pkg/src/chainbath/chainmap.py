"""Orthogonal chain mappings of a discretised bath.

Given bath frequencies ``w`` and a coupling vector, the Lanczos mapping finds
an orthogonal ``P`` whose first column is the normalised coupling vector and
for which ``P.T @ diag(w) @ P`` is tridiagonal. The block-Lanczos mapping
takes two coupling vectors, keeps both inside the span of the first two
columns of ``Q`` and makes ``Q.T @ diag(w) @ Q`` pentadiagonal.

In the interaction picture each channel's couplings to the new modes are

    c_k(t) = sum_j T[j, k] c_j exp(-i w_j t),

with ``t`` measured in units of hbar / energy.
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DegenerateSeedError, InvalidParameterError, LanczosBreakdownError

BREAKDOWN_TOL = 1e-12
DEGENERACY_TOL = 1e-8


class MappingKind(enum.Enum):
    LANCZOS = "lanczos"
    BLOCK_LANCZOS = "block_lanczos"

    @property
    def bandwidth(self) -> int:
        return 1 if self is MappingKind.LANCZOS else 2


@dataclass(frozen=True)
class ChainMapping:
    """Orthogonal transform of bath modes and its banded bath matrix.

    Attributes
    ----------
    transform : ndarray, shape (n, n)
        Column ``k`` expresses new mode ``k`` in the original modes.
    alpha : ndarray
        On-site energies of the new modes.
    beta : ndarray
        ``beta[k]`` couples modes ``k - 1`` and ``k`` (``beta[0] = 0``).
    kappa : ndarray
        ``kappa[k]`` couples modes ``k - 2`` and ``k`` (zero for Lanczos).
    """

    kind: MappingKind
    transform: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    kappa: np.ndarray
    frequencies: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.frequencies.size

    def band_matrix(self) -> np.ndarray:
        """Dense ``T.T @ diag(w) @ T``."""
        t = self.transform
        return t.T @ (self.frequencies[:, None] * t)

    def orthogonality_residual(self) -> float:
        t = self.transform
        return float(np.max(np.abs(t.T @ t - np.eye(self.n_modes))))

    def band_residual(self) -> float:
        """Largest entry outside the band, relative to ``max|w|``."""
        band = self.band_matrix()
        i, j = np.indices(band.shape)
        outside = np.abs(i - j) > self.kind.bandwidth
        if not outside.any():
            return 0.0
        return float(np.max(np.abs(band[outside])) / np.max(np.abs(self.frequencies)))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "alpha_meV", "beta_meV", "kappa_meV"])
            for k in range(self.n_modes):
                writer.writerow([k] + [format(float(v[k]), ".17g")
                                       for v in (self.alpha, self.beta, self.kappa)])


def _validate(frequencies, *seeds):
    w = np.asarray(frequencies, dtype=float)
    if w.ndim != 1 or w.size == 0 or not np.all(np.isfinite(w)):
        raise InvalidParameterError("frequencies must be a finite non-empty vector")
    if np.unique(w).size != w.size:
        raise InvalidParameterError("bath frequencies must be distinct")
    out = []
    for s in seeds:
        s = np.asarray(s, dtype=float)
        if s.shape != w.shape:
            raise InvalidParameterError(
                f"seed has shape {s.shape}, expected {w.shape}"
            )
        if not np.all(np.isfinite(s)) or not np.any(s):
            raise InvalidParameterError("seed vector must be finite and non-zero")
        out.append(s)
    return w, out


def _orthogonalize(v, basis):
    # two passes of classical Gram-Schmidt are enough for full reorthogonalisation
    for _ in range(2):
        v = v - basis @ (basis.T @ v)
    return v


def _finish(kind, w, q):
    band = q.T @ (w[:, None] * q)
    n = w.size
    alpha = np.diag(band).copy()
    beta = np.zeros(n)
    kappa = np.zeros(n)
    beta[1:] = np.diag(band, 1)
    if kind is MappingKind.BLOCK_LANCZOS and n > 2:
        kappa[2:] = np.diag(band, 2)
    for arr in (q, alpha, beta, kappa):
        arr.setflags(write=False)
    w = w.copy()
    w.setflags(write=False)
    return ChainMapping(kind, q, alpha, beta, kappa, w)


def lanczos_map(frequencies, seed) -> ChainMapping:
    """Tridiagonalise ``diag(frequencies)`` starting from ``seed``.

    Raises
    ------
    LanczosBreakdownError
        If a residual norm drops below ``1e-12 * max|w|`` before all
        ``n`` columns are built.
    """
    w, (seed,) = _validate(frequencies, seed)
    n = w.size
    scale = np.max(np.abs(w))
    q = np.zeros((n, n))
    q[:, 0] = seed / np.linalg.norm(seed)
    for k in range(n - 1):
        v = w * q[:, k]
        v = _orthogonalize(v, q[:, : k + 1])
        b = np.linalg.norm(v)
        if b < BREAKDOWN_TOL * scale:
            raise LanczosBreakdownError(k + 1, b)
        q[:, k + 1] = v / b
    return _finish(MappingKind.LANCZOS, w, q)


def block_lanczos_map(frequencies, seed_a, seed_b) -> ChainMapping:
    """Block-Lanczos (block size 2) mapping seeded by two coupling vectors.

    Column 0 is ``seed_a`` normalised and column 1 the normalised part of
    ``seed_b`` orthogonal to it. Each further column ``k + 2`` is the
    normalised residual of ``w * q_k`` against all previous columns, which
    is the block recursion with its 2x2 coupling blocks in triangular form.
    """
    w, (a, b) = _validate(frequencies, seed_a, seed_b)
    n = w.size
    if n < 2:
        raise DegenerateSeedError("block Lanczos needs at least two bath modes")
    scale = np.max(np.abs(w))
    q = np.zeros((n, n))
    q[:, 0] = a / np.linalg.norm(a)
    r = _orthogonalize(b, q[:, :1])
    sin_angle = np.linalg.norm(r) / np.linalg.norm(b)
    if sin_angle < DEGENERACY_TOL:
        raise DegenerateSeedError(
            f"seed vectors are parallel (sin angle {sin_angle:.2e}); "
            "the two channels share one chain, use lanczos_map instead"
        )
    q[:, 1] = r / np.linalg.norm(r)
    for k in range(n - 2):
        v = w * q[:, k]
        v = _orthogonalize(v, q[:, : k + 2])
        nrm = np.linalg.norm(v)
        if nrm < BREAKDOWN_TOL * scale:
            raise LanczosBreakdownError(k + 2, nrm)
        q[:, k + 2] = v / nrm
    return _finish(MappingKind.BLOCK_LANCZOS, w, q)


@dataclass(frozen=True)
class TimeDependentCouplings:
    """Interaction-picture couplings of every channel to the mapped modes."""

    mapping: ChainMapping
    sources: Mapping[str, np.ndarray]
    _projected: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.mapping.n_modes
        proj = {}
        for label, c in self.sources.items():
            c = np.asarray(c, dtype=float)
            if c.shape != (n,):
                raise InvalidParameterError(
                    f"channel {label!r} has {c.size} couplings for {n} modes"
                )
            # T[j, k] * c_j, so that c_k(t) = phases @ projected
            proj[label] = self.mapping.transform * c[:, None]
        object.__setattr__(self, "_projected", proj)

    @property
    def channels(self):
        return tuple(self.sources)

    def at(self, channel: str, t: float) -> np.ndarray:
        """Complex couplings ``c_k(t)`` of ``channel`` to every new mode."""
        try:
            proj = self._projected[channel]
        except KeyError:
            raise KeyError(f"unknown channel {channel!r}") from None
        if not np.isfinite(t):
            raise InvalidParameterError(f"time must be finite, got {t}")
        phases = np.exp(-1j * self.mapping.frequencies * t)
        return phases @ proj

    def grid(self, channel: str, times) -> np.ndarray:
        """``|c_k(t)|`` with one row per time."""
        times = np.asarray(times, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise InvalidParameterError("time grid must be a non-empty vector")
        if not np.all(np.isfinite(times)) or np.any(np.diff(times) < 0):
            raise InvalidParameterError("time grid must be finite and ascending")
        return np.vstack([np.abs(self.at(channel, t)) for t in times])


def couplings_at(tc: TimeDependentCouplings, channel: str, t: float) -> np.ndarray:
    return tc.at(channel, t)


def coupling_wave_grid(tc: TimeDependentCouplings, channel: str, t_grid) -> np.ndarray:
    return tc.grid(channel, t_grid)


def front_index(abs_couplings, mass=0.99) -> np.ndarray:
    """Smallest ``k`` per row holding ``mass`` of the cumulative ``|c_k|**2``."""
    a = np.atleast_2d(abs_couplings) ** 2
    cum = np.cumsum(a, axis=1)
    target = mass * cum[:, -1:]
    return np.argmax(cum >= target, axis=1)


def write_wave_csv(path, tc: TimeDependentCouplings, times, time_scale=1.0,
                   channels=None):
    """Long-format ``t, mode, channel, abs_coupling`` rows.

    ``time_scale`` converts the internal times into the written time unit.
    """
    channels = tc.channels if channels is None else channels
    grids = {ch: tc.grid(ch, times) for ch in channels}
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_ps", "mode", "channel", "abs_coupling"])
        for i, t in enumerate(times):
            ts = format(float(t) * time_scale, ".17g")
            for ch in channels:
                for k, v in enumerate(grids[ch][i]):
                    writer.writerow([ts, k, ch, format(float(v), ".17g")])
