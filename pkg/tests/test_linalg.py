import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from aeflann.errors import DomainError, ShapeError
from aeflann.linalg import (
    Activation,
    SeededRng,
    activation_prime_from_output,
    apply_activation,
    as_matrix,
    derive_seed,
    matmul,
    sigmoid_prime_from_output,
    uniform_init,
)

small_matrices = hnp.arrays(
    np.float64,
    st.tuples(st.integers(1, 5), st.integers(1, 5)),
    elements=st.floats(-1.0, 1.0),
)


class TestMatmul:
    def test_scalar_product(self):
        assert matmul(np.array([[2.0]]), np.array([[3.0]]))[0, 0] == 6.0

    def test_identity(self, rng):
        m = rng.normal(size=(3, 4))
        np.testing.assert_array_equal(matmul(np.eye(3), m), m)

    def test_hand_expansion(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        b = np.array([[1.0], [1.0]])
        np.testing.assert_array_equal(matmul(a, b), [[3.0], [7.0]])

    def test_mismatch_names_both_shapes(self):
        with pytest.raises(ShapeError, match=r"\(2, 3\).*\(2, 2\)"):
            matmul(np.zeros((2, 3)), np.zeros((2, 2)))

    @given(
        a=hnp.arrays(np.float64, (3, 4), elements=st.floats(-1, 1)),
        b=hnp.arrays(np.float64, (4, 2), elements=st.floats(-1, 1)),
        c=hnp.arrays(np.float64, (2, 5), elements=st.floats(-1, 1)),
    )
    def test_associative(self, a, b, c):
        left = matmul(matmul(a, b), c)
        right = matmul(a, matmul(b, c))
        np.testing.assert_allclose(left, right, atol=1e-10)


class TestActivations:
    def test_sigmoid_at_zero(self):
        assert apply_activation(np.zeros((1, 1)), Activation.SIGMOID)[0, 0] == 0.5

    def test_tanh_at_zero(self):
        assert apply_activation(np.zeros((1, 1)), Activation.TANH)[0, 0] == 0.0

    def test_identity_exact(self, rng):
        m = rng.normal(size=(2, 3))
        np.testing.assert_array_equal(apply_activation(m, Activation.IDENTITY), m)

    def test_relu(self):
        m = np.array([[-1.0, 0.0, 2.5]])
        np.testing.assert_array_equal(apply_activation(m, Activation.RELU), [[0.0, 0.0, 2.5]])

    def test_shape_preserved(self, rng):
        m = rng.normal(size=(4, 7))
        for kind in Activation:
            assert apply_activation(m, kind).shape == m.shape

    @given(hnp.arrays(np.float64, (3, 3), elements=st.floats(-1e300, 1e300)))
    def test_sigmoid_strictly_inside_unit_interval(self, m):
        out = apply_activation(m, Activation.SIGMOID)
        assert np.all(out > 0.0) and np.all(out < 1.0)

    @given(hnp.arrays(np.float64, (3, 3), elements=st.floats(-1e300, 1e300)))
    def test_tanh_strictly_inside_open_interval(self, m):
        out = apply_activation(m, Activation.TANH)
        assert np.all(out > -1.0) and np.all(out < 1.0)


class TestSigmoidPrime:
    def test_analytic_values(self):
        assert sigmoid_prime_from_output(np.array([[0.5]]))[0, 0] == 0.25
        np.testing.assert_allclose(sigmoid_prime_from_output(np.array([[0.9]]))[0, 0], 0.09)

    def test_elementwise(self):
        out = sigmoid_prime_from_output(np.array([0.5, 0.9]))
        np.testing.assert_allclose(out, [0.25, 0.09])

    def test_domain_error(self):
        with pytest.raises(DomainError):
            sigmoid_prime_from_output(np.array([1.5]))
        with pytest.raises(DomainError):
            sigmoid_prime_from_output(np.array([-0.1]))
        with pytest.raises(DomainError):
            sigmoid_prime_from_output(np.array([np.nan]))

    def test_matches_finite_difference_of_sigmoid(self):
        x = np.linspace(-5.0, 5.0, 201)
        y = apply_activation(x.reshape(1, -1), Activation.SIGMOID)
        analytic = sigmoid_prime_from_output(y)
        h = 1e-6
        fd = (
            apply_activation((x + h).reshape(1, -1), Activation.SIGMOID)
            - apply_activation((x - h).reshape(1, -1), Activation.SIGMOID)
        ) / (2 * h)
        np.testing.assert_allclose(analytic, fd, atol=1e-6)


class TestActivationPrime:
    @pytest.mark.parametrize("kind", list(Activation))
    def test_matches_finite_difference(self, kind, rng):
        z = rng.uniform(-3, 3, size=(1, 50))
        y = apply_activation(z, kind)
        analytic = activation_prime_from_output(y, kind)
        h = 1e-6
        fd = (apply_activation(z + h, kind) - apply_activation(z - h, kind)) / (2 * h)
        mask = np.abs(z) > 1e-3 if kind is Activation.RELU else np.ones_like(z, bool)
        np.testing.assert_allclose(analytic[mask], fd[mask], atol=1e-5)


class TestSeededRandomness:
    def test_uniform_init_deterministic(self):
        a = uniform_init(2, 2, 0.5, SeededRng(7))
        b = uniform_init(2, 2, 0.5, SeededRng(7))
        np.testing.assert_array_equal(a, b)

    def test_uniform_init_range(self):
        m = uniform_init(100, 100, 0.5, SeededRng(1))
        assert np.all(m >= -0.5) and np.all(m <= 0.5)

    def test_different_seeds_differ(self):
        a = uniform_init(3, 3, 0.5, SeededRng(7))
        b = uniform_init(3, 3, 0.5, SeededRng(8))
        assert not np.array_equal(a, b)

    def test_zero_dims_rejected(self):
        with pytest.raises(ShapeError):
            uniform_init(0, 3, 0.5, SeededRng(1))

    def test_bad_scale_rejected(self):
        with pytest.raises(DomainError):
            uniform_init(2, 2, 0.0, SeededRng(1))

    def test_seed_must_be_u64(self):
        with pytest.raises(DomainError):
            SeededRng(-1)
        with pytest.raises(DomainError):
            SeededRng(2**64)

    def test_permutation_deterministic(self):
        np.testing.assert_array_equal(SeededRng(3).permutation(20), SeededRng(3).permutation(20))

    def test_derive_seed_stable_and_distinct(self):
        assert derive_seed(5, 1, 2) == derive_seed(5, 1, 2)
        assert derive_seed(5, 1, 2) != derive_seed(5, 1, 3)
        assert 0 <= derive_seed(5, 1, 2) < 2**64


class TestAsMatrix:
    def test_rejects_wrong_ndim(self):
        with pytest.raises(ShapeError):
            as_matrix(np.zeros(3))

    def test_row_major_float64(self):
        m = as_matrix([[1, 2], [3, 4]])
        assert m.dtype == np.float64 and m.flags["C_CONTIGUOUS"]
