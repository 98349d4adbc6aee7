"""Test per il modulo divergences."""

import math

import numpy as np
import pytest
from scipy import linalg

from channels import random_channel
from divergences import (
    DivergenceValue,
    belavkin_staszewski,
    dmax_lower,
    geometric_renyi,
    hypothesis_testing_extended,
    max_extended,
    petz_lautum,
    petz_lautum_regularized,
    petz_renyi,
    sandwiched_extended,
    sandwiched_quasi,
    sandwiched_quasi_direct_sum,
    umegaki,
    upsilon,
)
from errors import ValidationError, ZeroOperator
from operators import kron, maximally_mixed, random_density, random_unit_trace_hermitian, random_unitary

P = np.array([0.7, 0.2, 0.1])
Q = np.array([0.3, 0.3, 0.4])


def classical_renyi(p, q, alpha):
    return math.log(float(np.sum(p ** alpha * q ** (1 - alpha)))) / (alpha - 1)


class TestDivergenceValue:
    """Test per il reale esteso delle divergenze."""

    def test_infinite(self):
        """Verifica il valore infinito con violazione di supporto."""
        value = DivergenceValue.infinite()
        assert math.isinf(value.value)
        assert value.support_violation
        assert not value.is_finite

    def test_violation_requires_infinity(self):
        """Verifica che una violazione richieda valore infinito."""
        with pytest.raises(ValueError):
            DivergenceValue(1.0, support_violation=True)


class TestUmegaki:
    """Test per la divergenza di Umegaki."""

    def test_same_state(self, rng):
        """Verifica D(ρ‖ρ) = 0."""
        rho = random_density(3, rng)
        assert umegaki(rho, rho).value == pytest.approx(0.0, abs=1e-10)

    def test_classical(self):
        """Verifica l'accordo con la divergenza di Kullback-Leibler."""
        expected = float(np.sum(P * np.log(P / Q)))
        assert umegaki(np.diag(P), np.diag(Q)).value == pytest.approx(expected, abs=1e-10)

    def test_support_violation(self):
        """Verifica +∞ quando supp ρ ⊄ supp σ."""
        value = umegaki(np.eye(2) / 2, np.diag([1.0, 0.0]))
        assert math.isinf(value.value)
        assert value.support_violation


class TestSandwichedExtended:
    """Test per la sandwiched di Rényi estesa."""

    def test_classical(self):
        """Verifica l'accordo con la Rényi classica."""
        value = sandwiched_extended(np.diag(P), np.diag(Q), 2.0).value
        assert value == pytest.approx(classical_renyi(P, Q, 2.0), abs=1e-10)

    def test_non_psd_first_argument(self):
        """Verifica il caso di primo argomento non PSD."""
        gamma = np.diag([1.5, -0.5])
        sigma = np.eye(2) / 2
        alpha = 2.0
        expected = math.log(float(np.sum(np.abs([1.5, -0.5]) ** alpha * 0.5 ** (1 - alpha)))) / (alpha - 1)
        assert sandwiched_extended(gamma, sigma, alpha).value == pytest.approx(expected, abs=1e-10)

    def test_zero_operator(self):
        """Verifica il rifiuto del primo argomento nullo."""
        with pytest.raises(ZeroOperator):
            sandwiched_extended(np.zeros((2, 2)), np.eye(2) / 2, 2.0)

    def test_alpha_not_above_one(self):
        """Verifica il rifiuto di alpha ≤ 1."""
        with pytest.raises(ValidationError):
            sandwiched_extended(np.eye(2) / 2, np.eye(2) / 2, 1.0)

    def test_unitary_invariance(self, rng):
        """Verifica l'invarianza per coniugazione unitaria con γ non PSD."""
        gamma, sigma = random_unit_trace_hermitian(3, rng).entries, random_density(3, rng).entries
        u = random_unitary(3, rng)
        rotated = sandwiched_extended(u @ gamma @ u.conj().T, u @ sigma @ u.conj().T, 1.5).value
        assert rotated == pytest.approx(sandwiched_extended(gamma, sigma, 1.5).value, abs=1e-8)

    def test_direct_sum(self, rng):
        """Verifica la fattorizzazione di Q̃_α sulle somme dirette."""
        gammas = [random_density(2, rng).entries for _ in range(2)]
        sigmas = [random_density(2, rng).entries for _ in range(2)]
        p, q = [0.3, 0.7], [0.6, 0.4]
        block_g = linalg.block_diag(p[0] * gammas[0], p[1] * gammas[1])
        block_s = linalg.block_diag(q[0] * sigmas[0], q[1] * sigmas[1])
        expected = sandwiched_quasi(block_g, block_s, 2.0)
        assert sandwiched_quasi_direct_sum(gammas, sigmas, p, q, 2.0) == pytest.approx(expected, rel=1e-9)

    def test_below_geometric(self, rng):
        """Verifica D̃_α ≤ Ĝ_α su stati casuali."""
        for _ in range(5):
            rho, sigma = random_density(3, rng), random_density(3, rng)
            assert sandwiched_extended(rho, sigma, 1.5).value <= geometric_renyi(rho, sigma, 1.5).value + 1e-8


class TestGeometric:
    """Test per le divergenze geometriche."""

    def test_classical(self):
        """Verifica che nel caso commutativo coincida con la Rényi classica."""
        assert geometric_renyi(np.diag(P), np.diag(Q), 1.5).value == pytest.approx(
            classical_renyi(P, Q, 1.5), abs=1e-10
        )

    def test_alpha_range(self):
        """Verifica il rifiuto di alpha > 2."""
        with pytest.raises(ValidationError):
            geometric_renyi(np.eye(2) / 2, np.eye(2) / 2, 2.5)

    def test_below_one_compresses_onto_support(self):
        """Verifica che per α < 1 conti solo la compressione di ρ su supp σ."""
        rho = np.array([[0.5, 0.5], [0.5, 0.5]])
        sigma = np.diag([1.0, 0.0])
        value = geometric_renyi(rho, sigma, 0.5)
        assert value.value == pytest.approx(math.log(2), abs=1e-10)
        assert not value.support_violation
        assert value.value == pytest.approx(geometric_renyi(np.diag([0.5, 0.0]), sigma, 0.5).value, abs=1e-12)

    def test_belavkin_above_umegaki(self, rng):
        """Verifica D ≤ Ĝ su stati casuali."""
        for _ in range(5):
            rho, sigma = random_density(2, rng), random_density(2, rng)
            assert umegaki(rho, sigma).value <= belavkin_staszewski(rho, sigma).value + 1e-9


class TestMaxDivergences:
    """Test per le max-divergenze."""

    def test_classical(self):
        """Verifica D_max = ln max p/q nel caso commutativo."""
        expected = math.log(float(np.max(P / Q)))
        assert max_extended(np.diag(P), np.diag(Q)).value == pytest.approx(expected, abs=1e-10)

    def test_lower_equals_max_for_states(self, rng):
        """Verifica D′_max = D_max per primo argomento PSD."""
        rho, sigma = random_density(3, rng), random_density(3, rng)
        assert dmax_lower(rho, sigma).value == pytest.approx(max_extended(rho, sigma).value, abs=1e-8)

    def test_lower_with_negative_part(self):
        """Verifica D′_max ≤ D_max quando γ ha autovalori negativi."""
        gamma = np.diag([0.8, -0.3])
        sigma = np.eye(2) / 2
        assert dmax_lower(gamma, sigma).value == pytest.approx(math.log(1.6), abs=1e-10)
        assert dmax_lower(gamma, sigma).value <= max_extended(gamma, sigma).value + 1e-12

    def test_lower_outside_support(self):
        """Verifica +∞ quando γ ha parte positiva fuori da supp σ."""
        assert math.isinf(dmax_lower(np.eye(2) / 2, np.diag([1.0, 0.0])).value)


class TestHypothesisTesting:
    """Test per la divergenza di test d'ipotesi estesa."""

    def test_same_state(self, rng):
        """Verifica D_H^ε(ρ‖ρ) = −ln(1 − ε)."""
        rho = random_density(2, rng)
        value = hypothesis_testing_extended(rho, rho, 0.5).value
        assert value == pytest.approx(math.log(2.0), abs=1e-6)

    def test_eps_one(self, rng):
        """Verifica +∞ per ε = 1."""
        rho = random_density(2, rng)
        assert math.isinf(hypothesis_testing_extended(rho, rho, 1.0).value)

    def test_trace_required(self):
        """Verifica il vincolo di traccia unitaria su τ."""
        with pytest.raises(ValidationError):
            hypothesis_testing_extended(np.eye(2), np.eye(2) / 2, 0.1)


class TestPetz:
    """Test per Petz-Rényi e lautum information."""

    def test_classical(self):
        """Verifica la Petz-Rényi nel caso commutativo."""
        assert petz_renyi(np.diag(P), np.diag(Q), 0.5).value == pytest.approx(
            classical_renyi(P, Q, 0.5), abs=1e-10
        )

    def test_upsilon_at_least_three(self, rng):
        """Verifica Υ ≥ 3."""
        rho, sigma = random_density(2, rng), random_density(2, rng)
        assert upsilon(rho, sigma) >= 3.0 - 1e-12

    def test_lautum_product_state(self, rng):
        """Verifica che uno stato prodotto abbia lautum nulla con minimizzatore τ."""
        sigma, tau = random_density(2, rng), random_density(3, rng)
        value, minimizer = petz_lautum(kron(sigma, tau), sigma, 1.5, (2, 3))
        assert value.value == pytest.approx(0.0, abs=1e-9)
        assert minimizer.allclose(tau, atol=1e-8)

    def test_lautum_regularized_limit(self, rng):
        """Verifica la convergenza della versione regolarizzata."""
        rho_ab = random_density(4, rng)
        sigma = maximally_mixed(2)
        exact, _ = petz_lautum(rho_ab, sigma, 2.0, (2, 2))
        approx = petz_lautum_regularized(rho_ab, sigma, 2.0, (2, 2), 1e-10)
        assert approx == pytest.approx(exact.value, abs=1e-6)


def absolute_value(gamma):
    w, u = linalg.eigh(gamma)
    return (u * np.abs(w)) @ u.conj().T


class TestSandwichedProperties:
    """Test delle proprietà della sandwiched estesa su istanze casuali con γ non PSD."""

    ALPHAS = (1.2, 1.5, 2.0, 3.0)

    def test_data_processing(self, rng):
        """Verifica la disuguaglianza di elaborazione dati su 200 terne (γ, σ, N)."""
        for k in range(200):
            d_out = 2 + k % 2
            gamma = random_unit_trace_hermitian(2, rng)
            sigma = random_density(2, rng)
            channel = random_channel(2, d_out, rng)
            alpha = self.ALPHAS[k % len(self.ALPHAS)]
            before = sandwiched_extended(gamma, sigma, alpha).value
            after = sandwiched_extended(channel.apply(gamma), channel.apply(sigma), alpha).value
            assert after <= before + 1e-8

    def test_additivity(self, rng):
        """Verifica l'additività sui prodotti tensoriali."""
        for alpha in self.ALPHAS:
            g1, g2 = random_unit_trace_hermitian(2, rng), random_unit_trace_hermitian(3, rng)
            s1, s2 = random_density(2, rng), random_density(3, rng)
            joint = sandwiched_extended(kron(g1, g2), kron(s1, s2), alpha).value
            separate = sandwiched_extended(g1, s1, alpha).value + sandwiched_extended(g2, s2, alpha).value
            assert joint == pytest.approx(separate, abs=1e-8)

    def test_joint_quasiconvexity(self, rng):
        """Verifica D̃_α(Σ p γ‖Σ p σ) ≤ max D̃_α(γ_x‖σ_x)."""
        for k in range(50):
            r = 2 + k % 3
            gammas = [random_unit_trace_hermitian(2, rng).entries for _ in range(r)]
            sigmas = [random_density(2, rng).entries for _ in range(r)]
            p = rng.dirichlet(np.ones(r))
            alpha = self.ALPHAS[k % len(self.ALPHAS)]
            mixed = sandwiched_extended(
                sum(px * g for px, g in zip(p, gammas)), sum(px * s for px, s in zip(p, sigmas)), alpha
            ).value
            worst = max(sandwiched_extended(g, s, alpha).value for g, s in zip(gammas, sigmas))
            assert mixed <= worst + 1e-8

    def test_second_argument_monotonicity(self, rng):
        """Verifica D̃_α(γ‖σ + σ′) ≤ D̃_α(γ‖σ)."""
        for k in range(50):
            gamma = random_unit_trace_hermitian(3, rng)
            sigma = random_density(3, rng).entries
            extra = random_density(3, rng, rank=1 + k % 3).entries * rng.uniform(0.1, 2.0)
            alpha = self.ALPHAS[k % len(self.ALPHAS)]
            assert sandwiched_extended(gamma, sigma + extra, alpha).value <= (
                sandwiched_extended(gamma, sigma, alpha).value + 1e-8
            )

    def test_monotone_in_alpha(self, rng):
        """Verifica la monotonia in α della versione normalizzata da ‖γ‖₁."""
        gamma = random_unit_trace_hermitian(3, rng)
        sigma = random_density(3, rng)
        norm = float(np.sum(np.abs(linalg.eigvalsh(gamma.entries))))
        values = [
            sandwiched_extended(gamma, sigma, a).value - a / (a - 1) * math.log(norm)
            for a in (1.1, 1.5, 2.0, 4.0, 8.0)
        ]
        assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))

    def test_limit_at_one(self, rng):
        """Verifica il limite α↘1 verso Umegaki di |γ|/‖γ‖₁."""
        for _ in range(10):
            gamma = random_unit_trace_hermitian(2, rng).entries
            sigma = random_density(2, rng)
            norm = float(np.sum(np.abs(linalg.eigvalsh(gamma))))
            alpha = 1 + 1e-5
            shifted = sandwiched_extended(gamma, sigma, alpha).value - alpha / (alpha - 1) * math.log(norm)
            expected = umegaki(absolute_value(gamma) / norm, sigma).value
            assert shifted == pytest.approx(expected, abs=1e-3)

    def test_hypothesis_testing_bound(self, rng):
        """Verifica D_H^ε(τ‖σ) ≤ D̃_α(τ‖σ) + (α/(α−1)) ln(1/(1−ε))."""
        for k in range(8):
            tau = random_unit_trace_hermitian(2, rng)
            sigma = random_density(2, rng)
            eps = (0.1, 0.5)[k % 2]
            alpha = (1.5, 2.0)[(k // 2) % 2]
            bound = sandwiched_extended(tau, sigma, alpha).value + alpha / (alpha - 1) * math.log(1 / (1 - eps))
            assert hypothesis_testing_extended(tau, sigma, eps).value <= bound + 1e-6
