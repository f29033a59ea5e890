import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chainbath.errors import DimensionError, InvalidParameterError
from chainbath.mps import (
    MPSState,
    bond_entropy,
    canonicalize,
    expectation,
    product_state,
    random_state,
    truncate_bond,
    truncation_rank,
)

from oracles import reduced_density_entropy

S1 = np.diag([1.0, 0.0])


def sf_initial(n_modes=5, d=4):
    return product_state([2] + [d] * n_modes, [0] + [0] * n_modes)


class TestProductState:
    def test_initial_state(self):
        psi = sf_initial()
        assert psi.norm() == pytest.approx(1.0)
        assert psi.bond_dims == [1] * 5
        assert expectation(psi, {0: S1}) == pytest.approx(1.0)
        assert expectation(psi, {}) == pytest.approx(1.0)

    def test_entropies_zero(self):
        psi = product_state([2, 3, 3, 3], [1, 2, 0, 1])
        for b in range(3):
            assert bond_entropy(psi, b) == pytest.approx(0.0, abs=1e-14)

    def test_bad_occupation(self):
        with pytest.raises(InvalidParameterError):
            product_state([2, 3], [0, 3])


class TestCanonical:
    def test_product_unchanged(self):
        psi = sf_initial()
        before = [t.copy() for t in psi.tensors]
        canonicalize(psi, 0)
        for a, b in zip(before, psi.tensors):
            np.testing.assert_allclose(np.abs(a), np.abs(b), atol=1e-15)

    def test_sweep_preserves_state(self):
        psi = random_state([2, 3, 3, 3, 3, 3], 6, rng=0)
        ref = psi.to_dense()
        for c in list(range(psi.n_sites)) + list(range(psi.n_sites - 1, -1, -1)):
            canonicalize(psi, c)
            assert psi.isometry_residual() <= 1e-10
        assert abs(np.vdot(ref, psi.to_dense())) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("center", [0, 2, 5])
    def test_isometries(self, center):
        psi = MPSState(random_state([2, 4, 4, 4, 4, 4], 8, rng=1).tensors)
        canonicalize(psi, center)
        assert psi.isometry_residual() <= 1e-10


class TestTruncate:
    def test_no_truncation(self):
        psi = random_state([2, 3, 3, 3], 4, rng=2)
        ref = psi.to_dense()
        truncate_bond(psi, 0, 0.0, None)
        assert psi.discarded_weight == 0.0
        assert abs(np.vdot(ref, psi.to_dense())) == pytest.approx(1.0, abs=1e-12)

    def test_two_site_instance(self):
        s = np.array([math.sqrt(0.999), math.sqrt(0.001)])
        vec = np.zeros(4)
        vec[0], vec[3] = s
        psi = MPSState.from_dense(vec, [2, 2])
        assert psi.bond_dims == [2]
        truncate_bond(psi, 0, 1e-2, None)
        assert psi.bond_dims == [1]
        assert psi.discarded_weight == pytest.approx(0.001, rel=1e-12)
        assert psi.norm() == pytest.approx(1.0, abs=1e-12)

    def test_matches_dense_svd(self):
        dims = [2, 3, 3, 3, 3, 3]
        psi = random_state(dims, 9, rng=3)
        dense = psi.to_dense()
        for bond in range(len(dims) - 1):
            left = int(np.prod(dims[: bond + 1]))
            ref = np.linalg.svd(dense.reshape(left, -1), compute_uv=False)
            cutoff, keep = 1e-2, truncation_rank(ref, 1e-2, 4)
            state = psi.copy().move_center(bond)
            truncate_bond(state, bond, cutoff, 4)
            got = state.singular_values(bond)
            np.testing.assert_allclose(got, ref[:keep] / np.linalg.norm(ref[:keep]), atol=1e-10)

    def test_center_must_be_adjacent(self):
        psi = random_state([2, 2, 2, 2], 2, rng=0)
        with pytest.raises(InvalidParameterError):
            truncate_bond(psi, 2, 0.0, None)

    @given(st.floats(0, 0.5), st.floats(0, 0.5), st.integers(0, 1000))
    @settings(max_examples=50)
    def test_monotone_in_cutoff(self, c1, c2, seed):
        s = np.sort(np.random.default_rng(seed).random(12))[::-1]
        lo, hi = sorted((c1, c2))
        assert truncation_rank(s, hi, None) <= truncation_rank(s, lo, None)

    def test_discarded_weight_nondecreasing(self):
        psi = random_state([2, 3, 3, 3, 3], 9, rng=5)
        history = [psi.discarded_weight]
        for bond in range(4):
            psi.move_center(bond)
            truncate_bond(psi, bond, 0.05, 3)
            history.append(psi.discarded_weight)
        assert np.all(np.diff(history) >= 0)
        assert history[-1] > 0


class TestEntropy:
    def test_bell_pair(self):
        vec = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2)
        psi = MPSState.from_dense(vec, [2, 2])
        assert bond_entropy(psi, 0) == pytest.approx(math.log(2), abs=1e-14)

    @pytest.mark.parametrize("seed", range(4))
    def test_against_reduced_density_matrix(self, seed):
        dims = [2, 4, 4, 4, 4, 2]  # total dim 4096
        psi = random_state(dims, 16, rng=seed)
        dense = psi.to_dense()
        for bond in range(len(dims) - 1):
            assert bond_entropy(psi, bond) == pytest.approx(
                reduced_density_entropy(dense, dims, bond), abs=1e-10)


class TestExpectation:
    def test_number_operator(self):
        # 0.6|S1,1,0,0> + 0.8|S1,0,0,1>
        dims = [2, 3, 3, 3]
        vec = np.zeros(int(np.prod(dims)), dtype=complex)
        vec[np.ravel_multi_index((0, 1, 0, 0), dims)] = 0.6
        vec[np.ravel_multi_index((0, 0, 0, 1), dims)] = 0.8j
        psi = MPSState.from_dense(vec, dims)
        n = np.diag([0.0, 1.0, 2.0])
        assert expectation(psi, {1: n}) == pytest.approx(0.36, abs=1e-12)
        assert expectation(psi, {3: n}) == pytest.approx(0.64, abs=1e-12)
        assert expectation(psi, {2: n}) == pytest.approx(0.0, abs=1e-12)

    def test_real_for_hermitian(self):
        psi = random_state([2, 3, 3], 3, rng=8)
        sx = np.array([[0, 1], [1, 0]])
        val = expectation(psi, {0: sx})
        assert isinstance(val, float)
        dense = psi.to_dense().reshape(2, 9)
        assert val == pytest.approx(np.real(np.vdot(dense, sx @ dense)), abs=1e-12)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionError):
            expectation(sf_initial(), {0: np.eye(3)})


class TestDenseBridgeAndCheckpoint:
    def test_round_trip(self):
        rng = np.random.default_rng(0)
        dims = [2, 3, 4, 2]
        vec = rng.normal(size=48) + 1j * rng.normal(size=48)
        vec /= np.linalg.norm(vec)
        psi = MPSState.from_dense(vec, dims)
        np.testing.assert_allclose(psi.to_dense(), vec, atol=1e-12)

    def test_checkpoint(self, tmp_path):
        psi = random_state([2, 3, 3, 3], 5, rng=6)
        psi.discarded_weight = 1.5e-6
        path = tmp_path / "state.bin"
        psi.save(path)
        back = MPSState.load(path)
        assert back.center == psi.center
        assert back.discarded_weight == psi.discarded_weight
        for a, b in zip(psi.tensors, back.tensors):
            np.testing.assert_array_equal(a, b)
        raw = path.read_bytes()
        assert raw.startswith(b"CBMPS")

    def test_checkpoint_rejects_garbage(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"not a checkpoint")
        with pytest.raises(InvalidParameterError):
            MPSState.load(path)
