import math

import numpy as np
import pytest

from magnoncat.hilbert import (
    DensityMatrix,
    InvariantViolationError,
    SpaceDims,
    TruncationWarning,
    cat_state,
    coherent_state,
    displacement_op,
    fock,
    kron,
    mode_operators,
    partial_trace,
    partial_transpose,
    thermal_density,
)

RNG = np.random.default_rng(7)


def series_coherent(alpha, dim):
    """Independent factorial-series oracle for coherent amplitudes."""
    amps = np.array(
        [alpha**n * math.exp(-abs(alpha) ** 2 / 2) / math.sqrt(math.factorial(n)) for n in range(dim)]
    )
    return amps / np.linalg.norm(amps)


def random_density(dim, rng=RNG):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def loop_kron(A, B):
    """Brute-force index-expansion oracle for the Kronecker product."""
    ra, ca = A.shape
    rb, cb = B.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k, j * cb + l] = A[i, j] * B[k, l]
    return out


class TestModeOperators:
    def test_single_excitation(self):
        a, _, _, _ = mode_operators(2)
        assert np.allclose(a @ fock(1, 2), fock(0, 2))

    def test_ladder_element(self):
        a = mode_operators(4).annihilate
        assert a[2, 3] == pytest.approx(math.sqrt(3))

    def test_truncated_commutator(self):
        for dim in (2, 5, 9):
            a = mode_operators(dim).annihilate
            comm = a @ a.conj().T - a.conj().T @ a
            expected = np.eye(dim, dtype=complex)
            expected[dim - 1, dim - 1] = 1 - dim
            assert np.allclose(comm, expected, atol=1e-13)

    def test_number_and_parity_diagonals(self):
        ops = mode_operators(5)
        assert np.allclose(np.diag(ops.number), np.arange(5))
        assert np.allclose(np.diag(ops.parity), [1, -1, 1, -1, 1])
        assert np.allclose(ops.identity, np.eye(5))


class TestKron:
    def test_identities(self):
        assert np.allclose(kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_mixed_product_property(self):
        A, C = (RNG.standard_normal((2, 2)) + 1j * RNG.standard_normal((2, 2)) for _ in range(2))
        B, D = (RNG.standard_normal((3, 3)) + 1j * RNG.standard_normal((3, 3)) for _ in range(2))
        assert np.allclose(kron(A, B) @ kron(C, D), kron(A @ C, B @ D), atol=1e-12)

    def test_against_loop_oracle(self):
        A = RNG.standard_normal((2, 3)) + 1j * RNG.standard_normal((2, 3))
        B = RNG.standard_normal((3, 2)) + 1j * RNG.standard_normal((3, 2))
        assert np.allclose(kron(A, B), loop_kron(A, B))

    def test_trace_multiplicative(self):
        A = RNG.standard_normal((3, 3)) + 1j * RNG.standard_normal((3, 3))
        B = RNG.standard_normal((4, 4)) + 1j * RNG.standard_normal((4, 4))
        assert np.trace(kron(A, B)) == pytest.approx(np.trace(A) * np.trace(B))


class TestCoherentState:
    def test_vacuum(self):
        assert np.allclose(coherent_state(0.0, 8), fock(0, 8))

    def test_vacuum_overlap(self):
        # |<0|alpha=1>| = e^{-1/2} = 0.6065...
        v = coherent_state(1.0, 20)
        assert abs(v[0]) == pytest.approx(0.6065306597126334, abs=1e-4)

    def test_mean_occupation(self):
        v = coherent_state(2.0, 60)
        n = np.arange(60)
        assert float(n @ (np.abs(v) ** 2)) == pytest.approx(4.0, rel=1e-3)

    def test_matches_series_oracle(self):
        for alpha in (0.5, 1.5 + 0.7j, -2.0j):
            assert np.allclose(coherent_state(alpha, 40), series_coherent(alpha, 40), atol=1e-12)

    def test_warns_past_truncation_trust(self):
        with pytest.warns(TruncationWarning):
            coherent_state(4.0, 20)


class TestCatState:
    def test_beta_zero_even_is_vacuum(self):
        assert np.allclose(cat_state(0.0, 0.0, +1, 12), fock(0, 12))

    def test_beta_zero_odd_is_null(self):
        with pytest.raises(ValueError):
            cat_state(0.0, 0.0, -1, 12)

    def test_unit_norm(self):
        v = cat_state(3.0, 0.7, +1, 60)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)

    def test_matches_direct_summation(self):
        beta, theta = 2.0 + 1.0j, 0.3
        raw = series_coherent(0.0, 50) + np.exp(1j * theta) * series_coherent(beta, 50)
        raw /= np.linalg.norm(raw)
        assert np.allclose(cat_state(beta, theta, +1, 50), raw, atol=1e-10)

    def test_even_cat_displaced_has_even_support(self):
        beta = 3.0
        v = cat_state(beta, 0.0, +1, 60)
        shifted = displacement_op(-beta / 2, 60) @ v
        assert np.max(np.abs(shifted[1::2])) < 1e-10


class TestThermalDensity:
    def test_zero_occupation(self):
        rho = thermal_density(0.0, 10)
        assert np.allclose(rho.data, np.outer(fock(0, 10), fock(0, 10)))

    def test_ground_population(self):
        rho = thermal_density(0.1, 40)
        assert rho.data[0, 0].real == pytest.approx(1 / 1.1, abs=1e-6)

    def test_mean_occupation(self):
        rho = thermal_density(0.4, 60)
        n = np.arange(60)
        assert float(n @ np.real(np.diag(rho.data))) == pytest.approx(0.4, abs=1e-6)

    def test_unit_trace(self):
        rho = thermal_density(0.37, 25)
        assert rho.trace().real == pytest.approx(1.0, abs=1e-12)


class TestDisplacementOp:
    def test_identity_at_zero(self):
        assert np.allclose(displacement_op(0.0, 12), np.eye(12), atol=1e-12)

    def test_inverse(self):
        alpha = 1.0 + 0.5j
        D = displacement_op(alpha, 40)
        Dm = displacement_op(-alpha, 40)
        assert np.max(np.abs(D @ Dm - np.eye(40))) < 1e-8

    def test_generates_coherent_state(self):
        psi = displacement_op(1.0, 40) @ fock(0, 40)
        overlap = abs(np.vdot(psi, coherent_state(1.0, 40)))
        assert overlap >= 1 - 1e-8

    def test_unitary(self):
        D = displacement_op(0.8 - 1.1j, 30)
        assert np.max(np.abs(D.conj().T @ D - np.eye(30))) < 1e-12

    def test_composition_phase(self):
        # compare on the trusted low-Fock subspace; edge columns feel the cutoff
        a, b = 0.7 + 0.2j, -0.3 + 0.9j
        dim = 50
        lhs = displacement_op(a, dim) @ displacement_op(b, dim)
        rhs = np.exp(1j * np.imag(a * np.conj(b))) * displacement_op(a + b, dim)
        assert np.max(np.abs(lhs[:, :10] - rhs[:, :10])) < 1e-6

    def test_parity_expectation_of_coherent(self):
        # <alpha|P|alpha> = e^{-2|alpha|^2}; 0.13534 at alpha = 1
        dim = 40
        v = coherent_state(1.0, dim)
        parity = mode_operators(dim).parity
        val = np.vdot(v, parity @ v).real
        assert val == pytest.approx(0.1353352832366127, abs=1e-6)


class TestPartialTrace:
    def test_product_state_recovers_factor(self):
        rq = random_density(3)
        rm = random_density(5)
        joint = kron(rq, rm)
        assert np.allclose(partial_trace(joint, (3, 5), keep=1), rm, atol=1e-12)
        assert np.allclose(partial_trace(joint, (3, 5), keep=0), rq, atol=1e-12)

    def test_bell_state(self):
        bell = (kron(fock(0, 2), fock(0, 2)) + kron(fock(1, 2), fock(1, 2))) / math.sqrt(2)
        rho = np.outer(bell, bell.conj())
        assert np.allclose(partial_trace(rho, (2, 2), keep=0), np.eye(2) / 2, atol=1e-12)

    def test_trace_preserved_on_random_states(self):
        for _ in range(5):
            rho = random_density(12)
            red = partial_trace(rho, (3, 4), keep=1)
            assert np.trace(red).real == pytest.approx(1.0, abs=1e-12)

    def test_kron_consistency(self):
        A = random_density(2)
        B = random_density(6)
        got = partial_trace(kron(A, B), (2, 6), keep=1)
        assert np.allclose(got, B * np.trace(A), atol=1e-12)


class TestPartialTranspose:
    def test_product_state_stays_positive(self):
        rho = kron(random_density(2), random_density(4))
        pt = partial_transpose(rho, (2, 4), 1)
        assert np.allclose(pt, pt.conj().T, atol=1e-12)
        assert np.linalg.eigvalsh(pt)[0] > -1e-12

    def test_bell_minimum_eigenvalue(self):
        bell = (kron(fock(0, 2), fock(0, 2)) + kron(fock(1, 2), fock(1, 2))) / math.sqrt(2)
        rho = np.outer(bell, bell.conj())
        assert np.linalg.eigvalsh(partial_transpose(rho, (2, 2), 1))[0] == pytest.approx(
            -0.5, abs=1e-12
        )

    def test_involution(self):
        rho = random_density(12)
        pt2 = partial_transpose(partial_transpose(rho, (4, 3), 0), (4, 3), 0)
        assert np.array_equal(pt2, rho)


class TestDensityMatrix:
    def test_valid_state_passes(self):
        DensityMatrix(np.eye(4) / 4, (2, 2)).validate()

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.eye(3), (2, 2))

    def test_rejects_bad_trace(self):
        with pytest.raises(InvariantViolationError):
            DensityMatrix(np.eye(4) / 2, (2, 2)).validate()

    def test_rejects_nonhermitian(self):
        m = np.eye(3, dtype=complex) / 3
        m[0, 1] = 0.1
        with pytest.raises(InvariantViolationError):
            DensityMatrix(m, (3,)).validate()

    def test_rejects_negative_eigenvalue(self):
        m = np.diag([1.2, -0.2, 0.0]).astype(complex)
        with pytest.raises(InvariantViolationError):
            DensityMatrix(m, (3,)).validate()

    def test_truncation_flag(self):
        v = np.zeros(10)
        v[-1] = 0.01
        v[0] = 0.99
        rho = DensityMatrix(np.diag(v).astype(complex), (10,))
        assert rho.truncation_suspect()
        assert not thermal_density(0.05, 30).truncation_suspect()

    def test_from_state(self):
        psi = coherent_state(1.0, 15)
        rho = DensityMatrix.from_state(psi, (15,))
        rho.validate()
        assert rho.data[0, 0].real == pytest.approx(abs(psi[0]) ** 2)


class TestSpaceDims:
    def test_defaults(self):
        d = SpaceDims()
        assert d.as_tuple() == (3, 140)
        assert d.total == 420

    def test_rejects_tiny(self):
        with pytest.raises(ValueError):
            SpaceDims(1, 10)
