"""Matrix product states for a system site followed by a chain of bath modes.

Site tensors have shape ``(left_bond, physical, right_bond)``. Bond ``b``
sits between sites ``b`` and ``b + 1``, so bond 0 separates the system from
the first bath mode.
"""
from __future__ import annotations

import struct
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionError, InvalidParameterError

DENSE_LIMIT = 2**14

_MAGIC = b"CBMPS\x00"
_VERSION = 1


def svd(mat):
    try:
        return np.linalg.svd(mat, full_matrices=False)
    except np.linalg.LinAlgError:
        return scipy.linalg.svd(mat, full_matrices=False, lapack_driver="gesvd")


def truncation_rank(s, cutoff: float, max_bond: int | None) -> int:
    """Smallest rank whose discarded ``sum s**2`` is at most ``cutoff * sum s**2``.

    ``s`` must be sorted in decreasing order.
    """
    s2 = np.asarray(s) ** 2
    total = s2.sum()
    if total == 0.0:
        return 1
    # tail[r] = weight discarded when keeping r values
    tail = np.concatenate([np.cumsum(s2[::-1])[::-1], [0.0]])
    rank = int(np.argmax(tail <= cutoff * total))
    rank = max(rank, 1)
    if max_bond is not None:
        rank = min(rank, max_bond)
    return rank


def truncated_svd(mat, cutoff: float = 0.0, max_bond: int | None = None):
    """SVD keeping the rank chosen by :func:`truncation_rank`.

    Returns ``u, s, vh, discarded`` where ``discarded`` is the dropped fraction
    of ``sum s**2``; the kept ``s`` are not renormalised.
    """
    u, s, vh = svd(mat)
    rank = truncation_rank(s, cutoff, max_bond)
    total = float(np.sum(s**2))
    discarded = float(np.sum(s[rank:] ** 2)) / total if total > 0 else 0.0
    return u[:, :rank], s[:rank], vh[:rank], discarded


def entropy_from_singular_values(s) -> float:
    """Von Neumann entropy (natural log) of the normalised Schmidt spectrum."""
    p = np.asarray(s, dtype=float) ** 2
    total = p.sum()
    if total == 0.0:
        return 0.0
    p = p[p > 0] / total
    return float(max(-np.sum(p * np.log(p)), 0.0))


class MPSState:
    """Tensor train with a tracked orthogonality center.

    ``center`` is only a promise: tensors left of it are left-orthogonal and
    those right of it right-orthogonal. :meth:`canonicalize` re-establishes it
    from scratch.
    """

    def __init__(self, tensors: Sequence[np.ndarray], center: int | None = None,
                 discarded_weight: float = 0.0):
        tensors = [np.asarray(t, dtype=complex) for t in tensors]
        if not tensors:
            raise DimensionError("an MPS needs at least one site")
        for i, t in enumerate(tensors):
            if t.ndim != 3:
                raise DimensionError(f"site {i} tensor must have 3 legs, got {t.ndim}")
        for i in range(len(tensors) - 1):
            if tensors[i].shape[2] != tensors[i + 1].shape[0]:
                raise DimensionError(f"bond {i} dimensions do not match")
        if tensors[0].shape[0] != 1 or tensors[-1].shape[2] != 1:
            raise DimensionError("boundary bonds must have dimension 1")
        self.tensors = tensors
        self.center = center
        self.discarded_weight = float(discarded_weight)
        # last known Schmidt values per bond, filled in by sweeping algorithms
        self.schmidt: list = [None] * (len(tensors) - 1)

    @property
    def n_sites(self) -> int:
        return len(self.tensors)

    @property
    def local_dims(self) -> list:
        return [t.shape[1] for t in self.tensors]

    @property
    def bond_dims(self) -> list:
        return [t.shape[2] for t in self.tensors[:-1]]

    def copy(self) -> "MPSState":
        new = MPSState([t.copy() for t in self.tensors], self.center, self.discarded_weight)
        new.schmidt = [None if s is None else s.copy() for s in self.schmidt]
        return new

    def _check_site(self, i):
        if not 0 <= i < self.n_sites:
            raise InvalidParameterError(f"site {i} out of range for {self.n_sites} sites")

    # --- gauge -----------------------------------------------------------

    def _left_orthogonalize(self, i):
        t = self.tensors[i]
        dl, d, dr = t.shape
        q, r = np.linalg.qr(t.reshape(dl * d, dr))
        self.tensors[i] = q.reshape(dl, d, -1)
        self.tensors[i + 1] = np.tensordot(r, self.tensors[i + 1], axes=(1, 0))

    def _right_orthogonalize(self, i):
        t = self.tensors[i]
        dl, d, dr = t.shape
        q, r = np.linalg.qr(t.reshape(dl, d * dr).T)
        self.tensors[i] = q.T.reshape(-1, d, dr)
        self.tensors[i - 1] = np.tensordot(self.tensors[i - 1], r.T, axes=(2, 0))

    def canonicalize(self, center: int) -> "MPSState":
        """Bring the state to mixed-canonical form around ``center``."""
        self._check_site(center)
        for i in range(center):
            self._left_orthogonalize(i)
        for i in range(self.n_sites - 1, center, -1):
            self._right_orthogonalize(i)
        self.center = center
        return self

    def move_center(self, target: int) -> "MPSState":
        """Shift an existing orthogonality center to ``target``."""
        self._check_site(target)
        if self.center is None:
            return self.canonicalize(target)
        while self.center < target:
            self._left_orthogonalize(self.center)
            self.center += 1
        while self.center > target:
            self._right_orthogonalize(self.center)
            self.center -= 1
        return self

    def norm(self) -> float:
        if self.center is not None:
            return float(np.linalg.norm(self.tensors[self.center]))
        return float(np.sqrt(abs(self.overlap(self))))

    def normalize(self) -> "MPSState":
        nrm = self.norm()
        if nrm == 0.0:
            raise InvalidParameterError("cannot normalise a zero state")
        idx = 0 if self.center is None else self.center
        self.tensors[idx] = self.tensors[idx] / nrm
        return self

    def isometry_residual(self) -> float:
        """Largest deviation from the canonical-form isometry conditions."""
        if self.center is None:
            raise InvalidParameterError("state has no orthogonality center")
        worst = 0.0
        for i, t in enumerate(self.tensors):
            dl, d, dr = t.shape
            if i < self.center:
                m = t.reshape(dl * d, dr)
                worst = max(worst, np.max(np.abs(m.conj().T @ m - np.eye(dr))))
            elif i > self.center:
                m = t.reshape(dl, d * dr)
                worst = max(worst, np.max(np.abs(m @ m.conj().T - np.eye(dl))))
        return float(worst)

    # --- truncation and entanglement -------------------------------------

    def truncate_bond(self, bond: int, svd_cutoff: float = 0.0,
                      max_bond: int | None = None) -> "MPSState":
        """SVD-truncate ``bond`` and renormalise.

        The center must be on ``bond`` or ``bond + 1`` and stays there.
        """
        if not 0 <= bond < self.n_sites - 1:
            raise InvalidParameterError(f"bond {bond} out of range")
        if self.center not in (bond, bond + 1):
            raise InvalidParameterError(
                f"center {self.center} is not adjacent to bond {bond}"
            )
        a, b = self.tensors[bond], self.tensors[bond + 1]
        dl, d1, _ = a.shape
        _, d2, dr = b.shape
        theta = np.tensordot(a, b, axes=(2, 0)).reshape(dl * d1, d2 * dr)
        u, s, vh, discarded = truncated_svd(theta, svd_cutoff, max_bond)
        s = s / np.linalg.norm(s)
        if self.center == bond:
            self.tensors[bond] = (u * s).reshape(dl, d1, -1)
            self.tensors[bond + 1] = vh.reshape(-1, d2, dr)
        else:
            self.tensors[bond] = u.reshape(dl, d1, -1)
            self.tensors[bond + 1] = (s[:, None] * vh).reshape(-1, d2, dr)
        self.discarded_weight += discarded
        self.schmidt[bond] = s
        return self

    def singular_values(self, bond: int) -> np.ndarray:
        """Schmidt values across ``bond`` (moves the center onto ``bond``)."""
        if not 0 <= bond < self.n_sites - 1:
            raise InvalidParameterError(f"bond {bond} out of range")
        self.move_center(bond)
        t = self.tensors[bond]
        dl, d, dr = t.shape
        s = np.linalg.svd(t.reshape(dl * d, dr), compute_uv=False)
        return s / np.linalg.norm(s)

    def bond_entropy(self, bond: int) -> float:
        return entropy_from_singular_values(self.singular_values(bond))

    # --- measurement -----------------------------------------------------

    def overlap(self, other: "MPSState") -> complex:
        """``<self|other>``."""
        if self.local_dims != other.local_dims:
            raise DimensionError("states live on different spaces")
        env = np.ones((1, 1), dtype=complex)
        for a, b in zip(self.tensors, other.tensors):
            env = np.tensordot(env, b, axes=(1, 0))
            env = np.tensordot(a.conj(), env, axes=([0, 1], [0, 1]))
        return complex(env[0, 0])

    def expectation(self, site_ops: Mapping[int, np.ndarray]):
        """``<psi| prod_i op_i |psi>``; sites without an operator get the identity."""
        ops = {}
        for site, op in site_ops.items():
            self._check_site(site)
            op = np.asarray(op)
            d = self.tensors[site].shape[1]
            if op.shape != (d, d):
                raise DimensionError(
                    f"operator on site {site} has shape {op.shape}, local dim is {d}"
                )
            ops[site] = op
        env = np.ones((1, 1), dtype=complex)
        for i, t in enumerate(self.tensors):
            ket = t if i not in ops else np.einsum("st,ltr->lsr", ops[i], t)
            env = np.tensordot(env, ket, axes=(1, 0))
            env = np.tensordot(t.conj(), env, axes=([0, 1], [0, 1]))
        val = complex(env[0, 0])
        if all(np.allclose(op, op.conj().T) for op in ops.values()) and abs(val.imag) <= 1e-10:
            return val.real
        return val

    def site_density_matrix(self, site: int) -> np.ndarray:
        """Reduced density matrix of one site (moves the center there)."""
        self.move_center(site)
        t = self.tensors[site]
        return np.einsum("lsr,ltr->st", t, t.conj())

    # --- dense bridge ----------------------------------------------------

    def to_dense(self) -> np.ndarray:
        total = int(np.prod(self.local_dims))
        if total > DENSE_LIMIT:
            raise DimensionError(f"dense dimension {total} exceeds {DENSE_LIMIT}")
        psi = self.tensors[0]
        for t in self.tensors[1:]:
            psi = np.tensordot(psi, t, axes=(psi.ndim - 1, 0))
        return psi.reshape(total)

    @classmethod
    def from_dense(cls, psi, local_dims, max_bond: int | None = None) -> "MPSState":
        """Exact (or bond-capped) decomposition of a state vector; center at 0."""
        dims = list(local_dims)
        psi = np.asarray(psi, dtype=complex)
        if psi.size != int(np.prod(dims)):
            raise DimensionError("vector length does not match local dims")
        tensors = []
        rest = psi.reshape(1, -1)
        discarded = 0.0
        for d in dims[:-1]:
            chi = rest.shape[0]
            mat = rest.reshape(chi * d, -1)
            u, s, vh, disc = truncated_svd(mat, 0.0, max_bond)
            discarded += disc
            tensors.append(u.reshape(chi, d, -1))
            rest = s[:, None] * vh
        tensors.append(rest.reshape(rest.shape[0], dims[-1], 1))
        state = cls(tensors, center=len(dims) - 1, discarded_weight=discarded)
        return state.move_center(0)

    # --- checkpoint ------------------------------------------------------

    def save(self, path) -> None:
        """Binary checkpoint: header, dims table, little-endian float64 data."""
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            center = -1 if self.center is None else self.center
            fh.write(struct.pack("<IIid", _VERSION, self.n_sites, center,
                                 self.discarded_weight))
            for t in self.tensors:
                fh.write(struct.pack("<III", *t.shape))
            for t in self.tensors:
                data = np.stack([t.real, t.imag], axis=-1).astype("<f8")
                fh.write(data.tobytes(order="C"))

    @classmethod
    def load(cls, path) -> "MPSState":
        with open(path, "rb") as fh:
            if fh.read(len(_MAGIC)) != _MAGIC:
                raise InvalidParameterError(f"{path} is not an MPS checkpoint")
            version, n, center, discarded = struct.unpack("<IIid", fh.read(20))
            if version != _VERSION:
                raise InvalidParameterError(f"unsupported checkpoint version {version}")
            shapes = [struct.unpack("<III", fh.read(12)) for _ in range(n)]
            tensors = []
            for shape in shapes:
                count = int(np.prod(shape)) * 2
                raw = np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(*shape, 2)
                tensors.append(raw[..., 0] + 1j * raw[..., 1])
        return cls(tensors, None if center < 0 else center, discarded)


def product_state(local_dims: Sequence[int], occupations: Sequence[int]) -> MPSState:
    """Basis product state ``|n_0 n_1 ...>`` with all bond dimensions 1."""
    if len(local_dims) != len(occupations):
        raise DimensionError("need one occupation per site")
    tensors = []
    for d, n in zip(local_dims, occupations):
        if not 0 <= n < d:
            raise InvalidParameterError(f"occupation {n} out of range for local dim {d}")
        t = np.zeros((1, d, 1), dtype=complex)
        t[0, n, 0] = 1.0
        tensors.append(t)
    state = MPSState(tensors, center=0)
    state.schmidt = [np.ones(1) for _ in range(len(tensors) - 1)]
    return state


def random_state(local_dims: Sequence[int], bond_dim: int, rng=None) -> MPSState:
    """Normalised random MPS, canonical at site 0."""
    rng = np.random.default_rng(rng)
    n = len(local_dims)
    bonds = [1]
    for i in range(1, n):
        left = int(np.prod(local_dims[:i]))
        right = int(np.prod(local_dims[i:]))
        bonds.append(min(bond_dim, left, right))
    bonds.append(1)
    tensors = [
        rng.normal(size=(bonds[i], d, bonds[i + 1]))
        + 1j * rng.normal(size=(bonds[i], d, bonds[i + 1]))
        for i, d in enumerate(local_dims)
    ]
    return MPSState(tensors).canonicalize(0).normalize()


def canonicalize(state: MPSState, center: int) -> MPSState:
    return state.canonicalize(center)


def truncate_bond(state: MPSState, bond: int, svd_cutoff: float,
                  max_bond: int | None) -> MPSState:
    return state.truncate_bond(bond, svd_cutoff, max_bond)


def bond_entropy(state: MPSState, bond: int) -> float:
    return state.bond_entropy(bond)


def expectation(state: MPSState, site_ops: Mapping[int, np.ndarray]):
    return state.expectation(site_ops)
