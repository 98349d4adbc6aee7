"""Test per il modulo operators."""

import numpy as np
import pytest

from errors import DimensionMismatch, NegativeEigenvalue, ValidationError
from operators import (
    DensityOperator,
    HermitianOperator,
    Povm,
    StateEnsemble,
    density_from_ket,
    expm_hermitian,
    intersection_basis,
    intersection_projector,
    kron,
    log_on_support,
    matrix_fn_on_support,
    maximally_mixed,
    partial_trace,
    power_on_support,
    random_density,
    random_ket,
    random_probability,
    random_unit_trace_hermitian,
    random_unitary,
    schatten_norm,
    support_contained,
    support_projector,
    tensor_power,
    validate_priors,
)


class TestHermitianOperator:
    """Test per la classe HermitianOperator."""

    def test_symmetrizes_small_deviation(self):
        """Verifica che piccole asimmetrie vengano simmetrizzate."""
        m = np.array([[1.0, 1e-12], [0.0, 2.0]])
        h = HermitianOperator(m)
        assert np.allclose(h.entries, h.entries.conj().T, atol=0)

    def test_rejects_non_hermitian(self):
        """Verifica il rifiuto di matrici non hermitiane."""
        with pytest.raises(ValidationError):
            HermitianOperator(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_rejects_non_square(self):
        """Verifica il rifiuto di matrici non quadrate."""
        with pytest.raises(DimensionMismatch):
            HermitianOperator(np.zeros((2, 3)))

    def test_entries_read_only(self):
        """Verifica che la matrice non sia modificabile."""
        h = HermitianOperator.identity(2)
        with pytest.raises(ValueError):
            h.entries[0, 0] = 5

    def test_arithmetic(self):
        """Verifica somma, differenza e prodotto per scalare."""
        a = HermitianOperator(np.diag([1.0, 2.0]))
        b = HermitianOperator.identity(2)
        assert (a + b).allclose(np.diag([2.0, 3.0]))
        assert (a - b).allclose(np.diag([0.0, 1.0]))
        assert (a * 2).allclose(np.diag([2.0, 4.0]))
        assert (-a).trace == pytest.approx(-3.0)

    def test_dict_roundtrip_complex(self, rng):
        """Verifica la codifica JSON con parte immaginaria."""
        rho = random_density(3, rng)
        data = rho.to_dict()
        assert "im" in data
        assert DensityOperator.from_dict(data).allclose(rho, atol=1e-15)


class TestDensityOperator:
    """Test per gli stati quantistici."""

    def test_trace_one_required(self):
        """Verifica il vincolo di traccia unitaria."""
        with pytest.raises(ValidationError):
            DensityOperator(np.diag([0.5, 0.4]))

    def test_negative_eigenvalue(self):
        """Verifica il rifiuto di autovalori negativi."""
        with pytest.raises(NegativeEigenvalue):
            DensityOperator(np.diag([1.5, -0.5]))

    def test_density_from_ket_normalizes(self):
        """Verifica che il ket venga normalizzato."""
        rho = density_from_ket([3, 4])
        assert rho.trace == pytest.approx(1.0)
        assert np.allclose(rho.entries, np.outer([0.6, 0.8], [0.6, 0.8]))


class TestSupports:
    """Test per supporti e funzioni di matrice."""

    def test_projector_of_zero(self):
        """Verifica che il proiettore di 0 sia 0."""
        assert support_projector(np.zeros((2, 2))).is_zero()

    def test_projector_idempotent(self, rng):
        """Verifica che il proiettore sia idempotente."""
        rho = random_density(4, rng, rank=2)
        p = support_projector(rho).entries
        assert np.allclose(p @ p, p, atol=1e-10)
        assert np.real(np.trace(p)) == pytest.approx(2.0)

    def test_inverse_power_on_support(self):
        """Verifica che le potenze negative ignorino il nucleo."""
        h = power_on_support(np.diag([0.25, 0.0]), -0.5)
        assert np.allclose(h.entries, np.diag([2.0, 0.0]))

    def test_square_root_roundtrip(self, rng):
        """Verifica che la radice sul supporto torni all'operatore al quadrato."""
        rho = random_density(3, rng).entries
        root = matrix_fn_on_support(rho, np.sqrt, requires_positive=True).entries
        assert np.allclose(root @ root, rho, atol=1e-8)

    def test_exp_of_log(self, rng):
        """Verifica che exp(ln ρ) = ρ per stati di rango pieno."""
        rho = random_density(3, rng)
        assert expm_hermitian(log_on_support(rho)).allclose(rho, atol=1e-10)

    def test_log_requires_psd(self):
        """Verifica che il logaritmo rifiuti operatori non PSD."""
        with pytest.raises(NegativeEigenvalue):
            log_on_support(np.diag([1.0, -1.0]))

    def test_support_contained(self):
        """Verifica il contenimento dei supporti."""
        assert support_contained(np.diag([1.0, 0.0]), np.eye(2))
        assert not support_contained(np.eye(2), np.diag([1.0, 0.0]))

    def test_intersection_of_different_pure_states(self):
        """Verifica che stati puri diversi abbiano intersezione banale."""
        zero = density_from_ket([1, 0])
        plus = density_from_ket([1, 1])
        assert intersection_basis([zero, plus]).shape[1] == 0

    def test_intersection_of_full_rank(self, rng):
        """Verifica che stati di rango pieno abbiano intersezione piena."""
        states = [random_density(3, rng) for _ in range(3)]
        assert intersection_basis(states).shape[1] == 3

    def test_intersection_projector(self):
        """Verifica il proiettore sull'intersezione di supporti diagonali."""
        p = intersection_projector([np.diag([1.0, 1.0, 0.0]), np.diag([0.0, 1.0, 1.0])])
        assert np.allclose(p.entries, np.diag([0.0, 1.0, 0.0]), atol=1e-10)


class TestRandomOperators:
    """Test per i generatori casuali."""

    def test_unitary(self, rng):
        """Verifica che U†U = I."""
        u = random_unitary(4, rng)
        assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12)

    def test_ket_normalized(self, rng):
        """Verifica la norma unitaria dei ket."""
        assert np.linalg.norm(random_ket(5, rng)) == pytest.approx(1.0)

    def test_unit_trace_hermitian(self, rng):
        """Verifica la traccia unitaria."""
        h = random_unit_trace_hermitian(3, rng)
        assert np.real(np.trace(h.entries)) == pytest.approx(1.0)

    def test_probability(self, rng):
        """Verifica che il vettore sia una distribuzione a supporto pieno."""
        p = random_probability(4, rng)
        assert p.sum() == pytest.approx(1.0)
        assert np.all(p > 0)


class TestSchattenNorm:
    """Test per le norme di Schatten."""

    def test_values(self):
        """Verifica le norme 1, 2 e infinito."""
        h = np.diag([3.0, -4.0])
        assert schatten_norm(h, 1) == pytest.approx(7.0)
        assert schatten_norm(h, 2) == pytest.approx(5.0)
        assert schatten_norm(h, float("inf")) == pytest.approx(4.0)

    def test_alpha_below_one(self):
        """Verifica il rifiuto di alpha < 1."""
        with pytest.raises(ValidationError):
            schatten_norm(np.eye(2), 0.5)


class TestTensorAlgebra:
    """Test per prodotti tensoriali e tracce parziali."""

    def test_partial_trace_of_product(self, rng):
        """Verifica Tr_B[ρ ⊗ σ] = ρ."""
        rho, sigma = random_density(2, rng), random_density(3, rng)
        joint = kron(rho, sigma)
        assert partial_trace(joint, [2, 3], 1).allclose(rho)
        assert partial_trace(joint, [2, 3], 0).allclose(sigma)

    def test_tensor_power_dimension(self):
        """Verifica la dimensione della potenza tensoriale."""
        assert tensor_power(maximally_mixed(2), 3).dim == 8

    def test_partial_trace_bad_dims(self):
        """Verifica il controllo delle dimensioni."""
        with pytest.raises(DimensionMismatch):
            partial_trace(np.eye(4), [2, 3], 0)


class TestPovm:
    """Test per le misure."""

    def test_must_sum_to_identity(self):
        """Verifica il vincolo di completezza."""
        with pytest.raises(ValidationError):
            Povm((np.diag([1.0, 0.0]), np.diag([0.0, 0.5])))

    def test_polished_repairs_sum(self):
        """Verifica che la rinormalizzazione produca una POVM valida."""
        povm = Povm.polished([np.diag([1.0, 1e-9]), np.diag([-1e-9, 1.0])])
        total = sum(e.entries for e in povm.elements)
        assert np.allclose(total, np.eye(2), atol=1e-10)

    def test_deterministic(self):
        """Verifica la POVM deterministica."""
        povm = Povm.deterministic(2, 3, outcome=1)
        assert len(povm) == 3
        assert povm.elements[1].allclose(np.eye(2))


class TestStateEnsemble:
    """Test per gli ensemble di stati."""

    def test_priors_validation(self):
        """Verifica il rifiuto di prior non validi."""
        with pytest.raises(ValidationError):
            validate_priors([0.5, 0.6])
        with pytest.raises(ValidationError):
            validate_priors([1.0, 0.0])

    def test_dimension_mismatch(self):
        """Verifica che gli stati debbano avere la stessa dimensione."""
        with pytest.raises(DimensionMismatch):
            StateEnsemble.uniform([maximally_mixed(2), maximally_mixed(3)])

    def test_cq_operator(self, classical_pair):
        """Verifica lo stato classico-quantistico."""
        cq = classical_pair.cq_operator()
        assert cq.dim == 4
        assert cq.trace == pytest.approx(1.0)
        assert np.allclose(cq.entries[:2, :2], 0.5 * np.diag([0.9, 0.1]))

    def test_fraction_priors_from_dict(self):
        """Verifica la lettura di prior come frazioni."""
        data = {"priors": ["1/3", "2/3"], "states": [maximally_mixed(2).to_dict()] * 2}
        e = StateEnsemble.from_dict(data)
        assert e.priors[0] == pytest.approx(1 / 3)

    def test_kets_from_dict(self):
        """Verifica la lettura di stati puri."""
        e = StateEnsemble.from_dict({"kets": [{"re": [1, 0]}, {"re": [0, 1]}]})
        assert e.r == 2
        assert e.is_classical()

    def test_tensor_power(self, classical_pair):
        """Verifica l'ensemble n-fold."""
        e2 = classical_pair.tensor_power(2)
        assert e2.dim == 4
        assert np.allclose(np.diag(e2.states[0].entries).real, [0.81, 0.09, 0.09, 0.01])
