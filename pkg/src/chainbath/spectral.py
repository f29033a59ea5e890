"""Spectral densities and their Gauss-Legendre discretisation.

A spectral density ``J(w)`` is discretised onto ``n`` bath modes as

    J(w) = pi * sum_i c_i**2 * delta(w - w_i),

with ``w_i`` the Gauss-Legendre nodes mapped onto the support interval and
``c_i = sqrt(J(w_i) * weight_i * (w_max - w_min) / (2 pi))``. Several channels
share one set of nodes so that they couple to the same bath.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import InvalidParameterError
from .units import HBAR_MEV_PS

MAX_NODES = 4096


class DensityKind(enum.Enum):
    LORENTZIAN_SUM = "lorentzian_sum"
    OHMIC_EXPONENTIAL = "ohmic_exponential"


def _check_finite(name, *values):
    for v in values:
        if not np.isfinite(v):
            raise InvalidParameterError(f"{name}: parameter {v!r} is not finite")


@dataclass(frozen=True)
class SpectralDensity:
    """Parametric spectral density on a closed support interval.

    Use the :meth:`lorentzian_sum`, :meth:`ohmic_exponential` or
    :meth:`singlet_fission` constructors rather than the raw fields.

    Lorentzian terms are triples ``(center, width, strength)`` evaluating to
    ``2 strength center**2 width w / ((w**2 - center**2)**2 + width**2 w**2)``.
    The Ohmic form is ``strength * w * exp(-w / cutoff)``.
    """

    kind: DensityKind
    lorentzians: tuple = ()
    ohmic: tuple = ()
    support: tuple = (0.0, 1.0)

    def __post_init__(self):
        lo, hi = self.support
        _check_finite("support", lo, hi)
        if not 0.0 <= lo < hi:
            raise InvalidParameterError(f"invalid support interval {self.support}")
        if self.kind is DensityKind.LORENTZIAN_SUM:
            if not self.lorentzians:
                raise InvalidParameterError("a Lorentzian sum needs at least one term")
            for center, width, strength in self.lorentzians:
                _check_finite("lorentzian", center, width, strength)
                if center <= 0 or width <= 0 or strength < 0:
                    raise InvalidParameterError(
                        "Lorentzian needs center > 0, width > 0, strength >= 0; "
                        f"got {(center, width, strength)}"
                    )
        else:
            strength, cutoff = self.ohmic
            _check_finite("ohmic", strength, cutoff)
            if strength < 0 or cutoff <= 0:
                raise InvalidParameterError(
                    f"Ohmic density needs strength >= 0 and cutoff > 0; got {self.ohmic}"
                )

    @classmethod
    def lorentzian_sum(cls, terms: Sequence[tuple], support) -> "SpectralDensity":
        terms = tuple(tuple(float(x) for x in term) for term in terms)
        return cls(DensityKind.LORENTZIAN_SUM, lorentzians=terms,
                   support=tuple(float(x) for x in support))

    @classmethod
    def ohmic_exponential(cls, strength, cutoff, support) -> "SpectralDensity":
        return cls(DensityKind.OHMIC_EXPONENTIAL,
                   ohmic=(float(strength), float(cutoff)),
                   support=tuple(float(x) for x in support))

    @classmethod
    def singlet_fission(cls, center, gamma, support) -> "SpectralDensity":
        """Dimensionless Lorentzian ``4 g W^2 w / ((w^2 - W^2)^2 + 4 g^2 w^2)``.

        ``center`` and ``gamma`` must be in the same energy unit (for a
        relaxation rate in ps^-1 multiply by hbar first).
        """
        return cls.lorentzian_sum([(center, 2.0 * gamma, 1.0)], support)

    def __call__(self, omega):
        w = np.asarray(omega, dtype=float)
        if self.kind is DensityKind.LORENTZIAN_SUM:
            out = np.zeros_like(w)
            for center, width, strength in self.lorentzians:
                c2 = center * center
                out = out + 2.0 * strength * c2 * width * w / (
                    (w * w - c2) ** 2 + width * width * w * w
                )
        else:
            strength, cutoff = self.ohmic
            out = strength * w * np.exp(-w / cutoff)
        lo, hi = self.support
        out = np.where((w >= lo) & (w <= hi), out, 0.0)
        return out if out.ndim else float(out)

    def peaks(self):
        """Frequencies worth flagging to an adaptive integrator."""
        lo, hi = self.support
        if self.kind is DensityKind.LORENTZIAN_SUM:
            pts = [c for c, _, _ in self.lorentzians]
        else:
            pts = [self.ohmic[1]]
        return sorted(p for p in pts if lo < p < hi)

    def integral(self) -> float:
        """``(1/pi) * integral of J over the support`` by adaptive quadrature."""
        lo, hi = self.support
        val, _ = quad(self, lo, hi, points=self.peaks() or None, limit=1000,
                      epsabs=0.0, epsrel=1e-13)
        return val / math.pi


def eval_density(density: SpectralDensity, omega):
    """Evaluate ``density`` at ``omega`` (zero outside its support)."""
    return density(omega)


def gauss_legendre_nodes(n_modes: int, interval):
    """Nodes and weights of the ``n_modes``-point rule on ``interval``."""
    if not 1 <= n_modes <= MAX_NODES:
        raise InvalidParameterError(
            f"number of modes must be in [1, {MAX_NODES}], got {n_modes}"
        )
    lo, hi = (float(x) for x in interval)
    if not (np.isfinite(lo) and np.isfinite(hi)) or not 0.0 <= lo < hi:
        raise InvalidParameterError(f"degenerate or invalid interval {interval}")
    x, w = np.polynomial.legendre.leggauss(n_modes)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), w * half


def discretize(density: SpectralDensity, n_modes: int, interval=None):
    """Discretise one density onto ``n_modes`` Gauss-Legendre nodes.

    Returns
    -------
    frequencies, couplings : ndarray
        Nodes in increasing order and the non-negative couplings ``c_i``.
    """
    interval = density.support if interval is None else interval
    nodes, weights = gauss_legendre_nodes(n_modes, interval)
    jw = np.clip(density(nodes), 0.0, None)
    return nodes, np.sqrt(jw * weights / math.pi)


@dataclass(frozen=True)
class DiscretizedBath:
    """Shared bath frequencies with one coupling vector per channel."""

    frequencies: np.ndarray
    channels: Mapping[str, np.ndarray]
    densities: Mapping[str, SpectralDensity] = field(default_factory=dict)

    def __post_init__(self):
        freqs = np.asarray(self.frequencies, dtype=float)
        if freqs.ndim != 1 or freqs.size == 0:
            raise InvalidParameterError("frequencies must be a non-empty vector")
        if np.any(np.diff(freqs) <= 0):
            raise InvalidParameterError("frequencies must be strictly increasing")
        freqs.setflags(write=False)
        object.__setattr__(self, "frequencies", freqs)
        chans = {}
        for label, vec in self.channels.items():
            vec = np.array(vec, dtype=float)
            if vec.shape != freqs.shape:
                raise InvalidParameterError(
                    f"channel {label!r} has {vec.size} couplings for {freqs.size} modes"
                )
            vec.setflags(write=False)
            chans[label] = vec
        object.__setattr__(self, "channels", chans)

    @property
    def n_modes(self) -> int:
        return self.frequencies.size

    def couplings(self, label: str) -> np.ndarray:
        try:
            return self.channels[label]
        except KeyError:
            raise KeyError(f"unknown channel {label!r}") from None

    def quadrature_error(self, label: str) -> float:
        """Relative mismatch between ``sum c_i**2`` and ``(1/pi) int J``."""
        exact = self.densities[label].integral()
        total = float(np.sum(self.channels[label] ** 2))
        if exact == 0.0:
            return abs(total)
        return abs(total - exact) / exact

    def to_csv(self, path, labels=None):
        """Write ``index, omega_meV, coupling_<label>_meV...`` rows."""
        labels = list(self.channels) if labels is None else list(labels)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "omega_meV"] + [f"coupling_{lab}_meV" for lab in labels])
            for i, w in enumerate(self.frequencies):
                writer.writerow([i, format(w, ".17g")]
                                + [format(self.channels[lab][i], ".17g") for lab in labels])


def discretize_shared(densities: Mapping[str, SpectralDensity], n_modes: int,
                      interval=None) -> DiscretizedBath:
    """Discretise several channels on one common set of nodes."""
    if not densities:
        raise InvalidParameterError("at least one channel density is required")
    supports = {d.support for d in densities.values()}
    if interval is None:
        if len(supports) != 1:
            raise InvalidParameterError(f"channel supports differ: {sorted(supports)}")
        interval = supports.pop()
    elif any(tuple(map(float, interval)) != s for s in supports):
        raise InvalidParameterError(
            f"channel supports {sorted(supports)} do not match interval {tuple(interval)}"
        )
    freqs = None
    chans = {}
    for label, dens in densities.items():
        freqs, chans[label] = discretize(dens, n_modes, interval)
    return DiscretizedBath(freqs, chans, dict(densities))


def singlet_fission_densities(omega_diag, omega_od, gamma_ps=1.0,
                              cutoff=800.0 / 8.065544):
    """Diagonal (``"z"``) and off-diagonal (``"x"``) densities in meV.

    ``gamma_ps`` is the vibrational relaxation rate in ps^-1.
    """
    gamma = gamma_ps * HBAR_MEV_PS
    support = (0.0, cutoff)
    return {
        "z": SpectralDensity.singlet_fission(omega_diag, gamma, support),
        "x": SpectralDensity.singlet_fission(omega_od, gamma, support),
    }


def wave_demo_densities(support=(0.0, 20.0)):
    """The three-Lorentzian ``z`` and Ohmic ``x`` pair used for coupling-wave plots."""
    return {
        "z": SpectralDensity.lorentzian_sum(
            [(2.0, 1.5, 1.0), (5.0, 1.5, 1.0), (10.0, 1.5, 1.0)], support
        ),
        "x": SpectralDensity.ohmic_exponential(2.0, 5.0, support),
    }
