import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snntune.connectivity import (
    Pattern,
    Sign,
    SynapseMatrix,
    Wiring,
    dense_matrix,
    ei_assembly,
    hollow_matrix,
    identity_matrix,
    propagate,
    sparse_random,
)
from snntune.exceptions import ConfigurationError, InputDomainError


def scalar_gated_sum(weights, spikes):
    """Independent oracle: the per-element gated sum, accumulated in pre order."""
    n_pre, n_post = weights.shape
    out = [0.0] * n_post
    for i in range(n_pre):
        if spikes[i] == 1:
            for k in range(n_post):
                out[k] += float(weights[i][k])
    return np.array(out)


class TestIdentity:
    def test_diagonal(self):
        m = identity_matrix(3, 2.0)
        np.testing.assert_array_equal(m.weights, np.diag([2.0, 2.0, 2.0]))
        assert m.pattern is Pattern.IDENTITY and m.sign is Sign.EXCITATORY

    def test_identity_action(self):
        m = identity_matrix(5, 1.5)
        s = np.array([1, 0, 1, 1, 0])
        np.testing.assert_array_equal(propagate(m, s), 1.5 * s)

    def test_negative_weight_is_inhibitory(self):
        m = identity_matrix(1, -1.0)
        np.testing.assert_array_equal(m.weights, [[-1.0]])
        assert m.sign is Sign.INHIBITORY

    def test_rejects_empty(self):
        with pytest.raises(ConfigurationError):
            identity_matrix(0, 1.0)


class TestHollow:
    def test_two_by_two(self):
        m = hollow_matrix(2, 0.7)
        np.testing.assert_array_equal(m.weights, [[0.0, 0.7], [0.7, 0.0]])

    def test_row_sums(self):
        n, w = 6, 0.3
        m = hollow_matrix(n, w)
        np.testing.assert_allclose(m.weights.sum(axis=1), (n - 1) * w)

    def test_single_spike_reaches_everyone_but_self(self):
        n, w = 5, 0.9
        m = hollow_matrix(n, w)
        s = np.zeros(n, dtype=int)
        s[2] = 1
        out = propagate(m, s)
        assert out[2] == 0.0
        np.testing.assert_array_equal(np.delete(out, 2), np.full(n - 1, w))

    def test_rejects_below_two(self):
        with pytest.raises(ConfigurationError):
            hollow_matrix(1, 1.0)


class TestSparseRandom:
    def test_density_zero_is_empty(self):
        m = sparse_random(10, 10, 0.0, 1.0, np.random.default_rng(0))
        assert (m.weights == 0).all()

    def test_density_one_is_full(self):
        m = sparse_random(10, 10, 1.0, 1.0, np.random.default_rng(0))
        assert (m.weights != 0).all()

    def test_realized_density_in_binomial_ci(self):
        # 99% CI at 1e4 entries, p=0.8: 0.8 +- 2.576*sqrt(0.8*0.2/1e4) ~ +-0.0103
        m = sparse_random(100, 100, 0.8, 1.0, np.random.default_rng(1))
        frac = (m.weights != 0).mean()
        assert abs(frac - 0.8) < 0.02

    def test_negative_weight_gives_inhibitory(self):
        m = sparse_random(20, 20, 0.5, -0.4, np.random.default_rng(2))
        assert m.sign is Sign.INHIBITORY
        assert (m.weights <= 0).all()

    def test_magnitudes_in_half_open_interval(self):
        m = sparse_random(50, 50, 0.7, 0.25, np.random.default_rng(3))
        nz = m.weights[m.weights != 0]
        assert (nz > 0).all() and (nz <= 0.25).all()

    def test_invalid_density(self):
        with pytest.raises(InputDomainError):
            sparse_random(5, 5, 1.5, 1.0, np.random.default_rng(0))

    def test_seed_reproducibility(self):
        a = sparse_random(30, 30, 0.8, 0.5, np.random.default_rng(9))
        b = sparse_random(30, 30, 0.8, 0.5, np.random.default_rng(9))
        assert np.array_equal(a.weights, b.weights)


class TestPropagate:
    def test_no_spikes_no_current(self):
        m = dense_matrix(4, 3, 0.5)
        np.testing.assert_array_equal(propagate(m, np.zeros(4, dtype=int)), np.zeros(3))

    def test_one_hot_selects_row(self):
        rng = np.random.default_rng(4)
        m = SynapseMatrix(rng.uniform(0, 1, (6, 4)), Sign.EXCITATORY, Pattern.DENSE)
        s = np.zeros(6, dtype=int)
        s[3] = 1
        np.testing.assert_array_equal(propagate(m, s), m.weights[3])

    def test_matches_scalar_oracle_exactly(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            n_pre = int(rng.integers(1, 40))
            n_post = int(rng.integers(1, 20))
            w = rng.standard_normal((n_pre, n_post)) * 10.0 ** float(rng.integers(-6, 7))
            m = SynapseMatrix(np.abs(w), Sign.EXCITATORY, Pattern.DENSE)
            s = rng.integers(0, 2, n_pre)
            got = propagate(m, s)
            want = scalar_gated_sum(m.weights, s)
            assert np.array_equal(got, want)

    def test_shape_mismatch(self):
        m = dense_matrix(4, 3, 0.5)
        with pytest.raises(ConfigurationError):
            propagate(m, np.zeros(5, dtype=int))

    def test_non_binary_rejected(self):
        m = dense_matrix(2, 2, 0.5)
        with pytest.raises(InputDomainError):
            propagate(m, np.array([0.5, 1.0]))

    @given(st.integers(2, 20), st.integers(0, 2**31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_disjoint_support_additivity(self, n, seed):
        # disjoint spike sets: summed responses equal the response of the
        # union; exact for integer weights, tight for floats
        rng = np.random.default_rng(seed)
        m = SynapseMatrix(
            rng.integers(0, 5, (n, n)).astype(float), Sign.EXCITATORY, Pattern.DENSE
        )
        support = rng.permutation(n)
        a = np.zeros(n, dtype=int)
        b = np.zeros(n, dtype=int)
        a[support[: n // 2]] = 1
        b[support[n // 2 :]] = rng.integers(0, 2, n - n // 2)
        union = a | b
        np.testing.assert_array_equal(propagate(m, a) + propagate(m, b), propagate(m, union))


class TestSignDiscipline:
    def test_excitatory_rejects_negative(self):
        with pytest.raises(ConfigurationError):
            SynapseMatrix(np.array([[-0.1]]), Sign.EXCITATORY, Pattern.DENSE)

    def test_inhibitory_rejects_positive(self):
        with pytest.raises(ConfigurationError):
            SynapseMatrix(np.array([[0.1]]), Sign.INHIBITORY, Pattern.DENSE)

    def test_hollow_diagonal_enforced(self):
        with pytest.raises(ConfigurationError):
            SynapseMatrix(np.ones((3, 3)), Sign.EXCITATORY, Pattern.HOLLOW)

    def test_identity_offdiagonal_enforced(self):
        with pytest.raises(ConfigurationError):
            SynapseMatrix(np.ones((3, 3)), Sign.EXCITATORY, Pattern.IDENTITY)


class TestEIAssembly:
    def test_one_to_one_one_to_many(self):
        fwd, back = ei_assembly(3, 3, Wiring.ONE_TO_ONE_ONE_TO_MANY, 1.0, -0.5)
        assert fwd.pattern is Pattern.IDENTITY and back.pattern is Pattern.HOLLOW
        assert fwd.sign is Sign.EXCITATORY and back.sign is Sign.INHIBITORY

    def test_one_to_many_one_to_one(self):
        fwd, back = ei_assembly(3, 3, Wiring.ONE_TO_MANY_ONE_TO_ONE, 1.0, -0.5)
        assert fwd.pattern is Pattern.HOLLOW and back.pattern is Pattern.IDENTITY

    def test_sparse_80_20(self):
        fwd, back = ei_assembly(
            80, 20, Wiring.SPARSE_80_20, 1.0, -0.5, np.random.default_rng(6)
        )
        assert fwd.weights.shape == (80, 20) and back.weights.shape == (20, 80)
        assert (back.weights <= 0).all() and (fwd.weights >= 0).all()
        assert fwd.pattern is Pattern.SPARSE_RANDOM

    def test_size_mismatch_rejected(self):
        with pytest.raises(ConfigurationError):
            ei_assembly(4, 3, Wiring.ONE_TO_ONE_ONE_TO_MANY, 1.0, -0.5)

    def test_wrong_signs_rejected(self):
        with pytest.raises(InputDomainError):
            ei_assembly(3, 3, Wiring.ONE_TO_ONE_ONE_TO_MANY, -1.0, -0.5)
        with pytest.raises(InputDomainError):
            ei_assembly(3, 3, Wiring.ONE_TO_ONE_ONE_TO_MANY, 1.0, 0.5)

    def test_hollow_never_feeds_own_spike_back(self):
        _, back = ei_assembly(5, 5, Wiring.ONE_TO_ONE_ONE_TO_MANY, 1.0, -1.0)
        for i in range(5):
            s = np.zeros(5, dtype=int)
            s[i] = 1
            assert propagate(back, s)[i] == 0.0
