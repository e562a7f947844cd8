import numpy as np
import pytest

from comspect.spectral import (
    EigenSequence,
    abs_operator,
    direct_sum,
    eigenvalue_sequence,
    hermitian_split,
    pencil,
    singular_sequence,
)


def _random_matrix(rng, n):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def _char_poly_coeffs(m: np.ndarray) -> np.ndarray:
    """Faddeev-LeVerrier characteristic polynomial, independent of eigvals."""
    n = m.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    mk = np.zeros_like(m)
    for k in range(1, n + 1):
        mk = m @ mk + coeffs[k - 1] * np.eye(n)
        coeffs[k] = -np.trace(m @ mk) / k
    return coeffs


class TestEigenvalueSequence:
    def test_diagonal_example(self):
        eig = eigenvalue_sequence(np.diag([1.0, 3.0, -2.0j]))
        assert np.allclose(eig.values, [3.0, -2.0j, 1.0])

    def test_jordan_block_multiplicity(self):
        eig = eigenvalue_sequence(np.array([[0.0, 1.0], [0.0, 0.0]]))
        assert np.allclose(eig.values, [0.0, 0.0])
        assert eig.logical_length == 2

    def test_matches_char_poly_roots(self, rng):
        # independent oracle: Faddeev-LeVerrier coefficients + companion roots
        for _ in range(20):
            m = _random_matrix(rng, 6)
            eig = eigenvalue_sequence(m)
            roots = np.roots(_char_poly_coeffs(m))
            assert np.allclose(
                np.sort_complex(eig.values), np.sort_complex(roots), atol=1e-8
            )

    def test_ordering_is_canonical(self, rng):
        vals = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        a = EigenSequence.from_values(vals)
        b = EigenSequence.from_values(vals[rng.permutation(8)])
        assert np.array_equal(a.values, b.values)

    def test_tie_break_by_argument(self):
        eig = EigenSequence.from_values([-1.0, 1.0, 1.0j, -1.0j])
        # equal moduli: argument ascending in [0, 2*pi)
        assert np.allclose(eig.values, [1.0, 1.0j, -1.0, -1.0j])

    def test_moduli_nonincreasing_enforced(self):
        with pytest.raises(ValueError):
            EigenSequence(np.array([1.0, 2.0], dtype=complex), 2)


class TestSingularSequence:
    def test_diagonal_example(self):
        s = singular_sequence(np.diag([1.0, 3.0, -2.0j]))
        assert np.allclose(s.prefix, [3.0, 2.0, 1.0])

    def test_nilpotent(self):
        s = singular_sequence(np.array([[0.0, 1.0], [0.0, 0.0]]))
        assert np.allclose(s.prefix, [1.0, 0.0])

    def test_matches_gram_eigensolver(self, rng):
        # independent oracle: hermitian eigendecomposition of M*M
        for _ in range(20):
            m = _random_matrix(rng, 7)
            s = singular_sequence(m).prefix
            w = np.linalg.eigh(m.conj().T @ m)[0]
            ref = np.sqrt(np.clip(w, 0, None))[::-1]
            assert np.allclose(s, ref, atol=1e-8)


class TestHermitianSplit:
    def test_hermitian_input(self, rng):
        m = _random_matrix(rng, 5)
        h0 = (m + m.conj().T) / 2
        h, k = hermitian_split(h0)
        assert np.allclose(h, h0)
        assert np.allclose(k, 0)

    def test_explicit_two_by_two(self):
        h, k = hermitian_split(np.array([[0.0, 1.0], [0.0, 0.0]]))
        assert np.allclose(h, [[0, 0.5], [0.5, 0]])
        assert np.allclose(k, [[0, -0.5j], [0.5j, 0]])

    def test_reconstruction(self, rng):
        for _ in range(25):
            m = _random_matrix(rng, 6)
            h, k = hermitian_split(m)
            assert np.allclose(h, h.conj().T, atol=1e-14)
            assert np.allclose(k, k.conj().T, atol=1e-14)
            assert np.linalg.norm(h + 1j * k - m) <= 1e-14 * np.linalg.norm(m)


class TestPencil:
    def test_endpoints(self, rng):
        m = _random_matrix(rng, 4)
        h, k = hermitian_split(m)
        assert np.allclose(pencil(m, 1.0), h)
        assert np.allclose(pencil(m, -1.0), 1j * k)
        assert np.allclose(pencil(m, 0.0), m / 2)

    def test_circle_identity(self, rng):
        # F(e^{i theta}) = ((1+e^{i theta})/2) H + i ((1-e^{i theta})/2) K
        m = _random_matrix(rng, 5)
        h, k = hermitian_split(m)
        for theta in np.linspace(0, 2 * np.pi, 17):
            w = np.exp(1j * theta)
            lhs = pencil(m, w)
            rhs = (1 + w) / 2 * h + 1j * (1 - w) / 2 * k
            assert np.allclose(lhs, rhs, atol=1e-14 * np.linalg.norm(m))


class TestAbsOperator:
    def test_diagonal(self):
        assert np.allclose(abs_operator(np.diag([-2.0, 1.0j])), np.diag([2.0, 1.0]))

    def test_unitary_gives_identity(self, rng):
        q, _ = np.linalg.qr(_random_matrix(rng, 5))
        assert np.allclose(abs_operator(q), np.eye(5), atol=1e-12)

    def test_square_recovers_gram(self, rng):
        for _ in range(15):
            m = _random_matrix(rng, 6)
            a = abs_operator(m)
            assert np.allclose(a @ a, m.conj().T @ m, atol=1e-10)
            w = np.linalg.eigvalsh(a)
            assert np.all(w >= -1e-13)


class TestDirectSum:
    def test_block_layout(self):
        out = direct_sum(np.array([[1.0]]), np.array([[2.0]]))
        assert np.allclose(out, np.diag([1.0, 2.0]))

    def test_eigenvalues_merge_by_modulus(self, rng):
        for _ in range(10):
            a = _random_matrix(rng, 4)
            b = _random_matrix(rng, 3)
            merged = eigenvalue_sequence(direct_sum(a, b))
            separate = np.concatenate(
                [eigenvalue_sequence(a).values, eigenvalue_sequence(b).values]
            )
            ref = EigenSequence.from_values(separate)
            assert np.allclose(
                np.sort_complex(merged.values), np.sort_complex(ref.values), atol=1e-8
            )

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            eigenvalue_sequence(np.zeros((2, 3)))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            eigenvalue_sequence(np.array([[np.nan, 0], [0, 1]]))
