"""Test per il modulo channels."""

import math

import numpy as np
import pytest

from channels import (
    ChannelEnsemble,
    ClassicalChannel,
    QuantumChannel,
    belavkin_channel_divergence,
    belavkin_channel_radius,
    channel_from_dict,
    channel_to_dict,
    choi_from_kraus,
    classical_channel_to_quantum,
    cq_channel,
    cq_outputs,
    cq_radius_reduction,
    depolarizing_channel,
    geometric_channel_divergence,
    geometric_channel_radius_sdp,
    identity_channel,
    random_channel,
    replacer_channel,
)
from divergences import belavkin_staszewski, geometric_renyi
from errors import DimensionMismatch, ValidationError
from operators import maximally_mixed, random_density
from radii import classical_chernoff, log_euclidean_chernoff

AMPLITUDE_DAMPING = [
    np.array([[1.0, 0.0], [0.0, math.sqrt(0.7)]]),
    np.array([[0.0, math.sqrt(0.3)], [0.0, 0.0]]),
]


class TestClassicalChannel:
    """Test per i canali classici."""

    def test_columns_must_sum_to_one(self):
        """Verifica il rifiuto di colonne non normalizzate."""
        with pytest.raises(ValidationError):
            ClassicalChannel(np.array([[0.5, 0.5], [0.6, 0.5]]))

    def test_quantum_lift(self, classical_channels):
        """Verifica che il sollevamento agisca come la matrice stocastica."""
        channel = classical_channels.channels[0]
        out = channel.to_quantum().apply(np.diag([0.0, 1.0]))
        assert np.allclose(out.entries, np.diag([0.6, 0.4]))


class TestQuantumChannel:
    """Test per i canali quantistici."""

    def test_kraus_and_choi_agree(self, rng):
        """Verifica che Kraus e Choi producano la stessa uscita."""
        kraus = choi_from_kraus(AMPLITUDE_DAMPING)
        choi = QuantumChannel.from_choi(kraus.choi, 2, 2)
        rho = random_density(2, rng)
        assert kraus.apply(rho).allclose(choi.apply(rho), atol=1e-12)

    def test_choi_marginal(self):
        """Verifica Tr_B[J] = I_A."""
        channel = choi_from_kraus(AMPLITUDE_DAMPING)
        assert np.allclose(channel.input_marginal(), np.eye(2))

    def test_not_trace_preserving(self):
        """Verifica il rifiuto di mappe che non preservano la traccia."""
        with pytest.raises(ValidationError):
            choi_from_kraus([0.5 * np.eye(2)])

    def test_cp_only_allowed(self):
        """Verifica che le mappe solo CP siano accettate su richiesta."""
        channel = choi_from_kraus([0.5 * np.eye(2)], tp_enforced=False)
        assert channel.choi.trace == pytest.approx(0.5)

    def test_kraus_shapes(self):
        """Verifica il controllo delle forme degli operatori di Kraus."""
        with pytest.raises(DimensionMismatch):
            choi_from_kraus([np.eye(2), np.eye(3)])

    def test_apply_with_reference(self, rng):
        """Verifica (id ⊗ N) sull'entangled massimo: restituisce J/d."""
        channel = choi_from_kraus(AMPLITUDE_DAMPING)
        omega = np.eye(2).reshape(-1)
        out = channel.apply(np.outer(omega, omega) / 2, d_ref=2)
        assert out.allclose(channel.choi.entries / 2, atol=1e-12)

    def test_apply_dimension_check(self):
        """Verifica il rifiuto di ingressi di dimensione errata."""
        with pytest.raises(DimensionMismatch):
            identity_channel(2).apply(np.eye(3) / 3)


class TestStandardChannels:
    """Test per i canali predefiniti."""

    def test_replacer(self, rng):
        """Verifica che il canale di rimpiazzo restituisca σ."""
        sigma = random_density(3, rng)
        out = replacer_channel(sigma, 2).apply(random_density(2, rng))
        assert out.allclose(sigma, atol=1e-12)

    def test_depolarizing(self):
        """Verifica l'azione del canale depolarizzante."""
        out = depolarizing_channel(2, 0.5).apply(np.diag([1.0, 0.0]))
        assert np.allclose(out.entries, np.diag([0.75, 0.25]))

    def test_depolarizing_range(self):
        """Verifica il rifiuto di p fuori da [0, 1]."""
        with pytest.raises(ValidationError):
            depolarizing_channel(2, 1.5)

    def test_cq_outputs(self, rng):
        """Verifica l'estrazione delle colonne di un canale cq."""
        states = [random_density(2, rng) for _ in range(3)]
        columns = cq_outputs(cq_channel(states))
        assert all(np.allclose(c, s.entries, atol=1e-12) for c, s in zip(columns, states))

    def test_classical_lift(self):
        """Verifica che il sollevamento diagonale agisca come la matrice stocastica."""
        w = ClassicalChannel(np.array([[0.9, 0.6], [0.1, 0.4]]))
        lifted = classical_channel_to_quantum(w)
        assert np.allclose(lifted.apply(np.diag([0.25, 0.75])).entries, np.diag([0.675, 0.325]))
        assert all(np.allclose(np.diag(c), w.column(y)) for y, c in enumerate(cq_outputs(lifted)))

    def test_cq_outputs_rejects_coherent(self):
        """Verifica il rifiuto di canali non classico-quantistici."""
        with pytest.raises(ValidationError):
            cq_outputs(identity_channel(2))


class TestChannelCodec:
    """Test per la codifica JSON dei canali."""

    def test_classical_format(self, classical_channels):
        """Verifica il formato del canale classico."""
        data = channel_to_dict(classical_channels.channels[0])
        assert data["kind"] == "classical"
        assert data["matrix"] == [[0.9, 0.6], [0.1, 0.4]]

    def test_kraus_decoded(self):
        """Verifica la lettura di un canale da operatori di Kraus."""
        data = channel_to_dict(choi_from_kraus(AMPLITUDE_DAMPING))
        channel = channel_from_dict(data)
        assert data["kind"] == "kraus"
        assert channel.choi.allclose(choi_from_kraus(AMPLITUDE_DAMPING).choi, atol=1e-12)

    def test_unknown_kind(self):
        """Verifica il rifiuto di tipi sconosciuti."""
        with pytest.raises(ValidationError):
            channel_from_dict({"kind": "unitary"})

    def test_inconsistent_dimensions(self):
        """Verifica il controllo di d_in e d_out dichiarati."""
        data = {"kind": "classical", "d_in": 3, "d_out": 2, "matrix": [[1.0, 0.0], [0.0, 1.0]]}
        with pytest.raises(DimensionMismatch):
            channel_from_dict(data)

    def test_ensemble_uniform_default(self, classical_channels):
        """Verifica il prior uniforme in assenza del campo priors."""
        data = classical_channels.to_dict()
        del data["priors"]
        ensemble = ChannelEnsemble.from_dict(data)
        assert np.allclose(ensemble.priors, [0.5, 0.5])
        assert ensemble.is_classical()

    def test_ensemble_shapes(self):
        """Verifica il rifiuto di canali con dimensioni diverse."""
        with pytest.raises(DimensionMismatch):
            ChannelEnsemble.uniform([identity_channel(2), identity_channel(3)])


class TestChannelDivergences:
    """Test per le divergenze tra canali."""

    def test_identical_channels(self):
        """Verifica divergenze nulle tra canali uguali."""
        channel = depolarizing_channel(2, 0.3)
        assert geometric_channel_divergence(channel, channel, 1.5).value == pytest.approx(0.0, abs=1e-9)
        assert belavkin_channel_divergence(channel, channel).value == pytest.approx(0.0, abs=1e-9)

    def test_replacers_reduce_to_states(self, rng):
        """Verifica che per canali di rimpiazzo si ottengano le divergenze tra stati."""
        rho, sigma = random_density(2, rng), random_density(2, rng)
        n, m = replacer_channel(rho, 2), replacer_channel(sigma, 2)
        assert geometric_channel_divergence(n, m, 2.0).value == pytest.approx(
            geometric_renyi(rho, sigma, 2.0).value, abs=1e-8
        )
        assert belavkin_channel_divergence(n, m).value == pytest.approx(
            belavkin_staszewski(rho, sigma).value, abs=1e-8
        )

    def test_support_violation(self):
        """Verifica +∞ quando supp J_N ⊄ supp J_M."""
        value = belavkin_channel_divergence(depolarizing_channel(2, 0.5), identity_channel(2))
        assert math.isinf(value.value)

    def test_alpha_range(self):
        """Verifica il rifiuto di alpha fuori da (1, 2]."""
        with pytest.raises(ValidationError):
            geometric_channel_divergence(identity_channel(2), identity_channel(2), 3.0)

    def test_dominates_state_divergence(self, rng):
        """Verifica Ĝ_α(N‖M) ≥ Ĝ_α(N[ρ_RA]‖M[ρ_RA]) su ingressi casuali."""
        for k in range(20):
            n, m = random_channel(2, 2, rng), random_channel(2, 2, rng)
            alpha = (1.5, 2.0)[k % 2]
            rho = random_density(4, rng)
            bound = geometric_channel_divergence(n, m, alpha).value
            assert geometric_renyi(n.apply(rho, d_ref=2), m.apply(rho, d_ref=2), alpha).value <= bound + 1e-7

    def test_belavkin_limit(self, rng):
        """Verifica il limite α↘1 della divergenza geometrica di canale."""
        for _ in range(5):
            n, m = random_channel(2, 2, rng), random_channel(2, 2, rng)
            near_one = geometric_channel_divergence(n, m, 1 + 1e-5).value
            assert near_one == pytest.approx(belavkin_channel_divergence(n, m).value, abs=1e-3)


class TestChannelRadius:
    """Test per i raggi di canale."""

    def test_identical_channels(self):
        """Verifica raggio nullo per canali identici."""
        channel = depolarizing_channel(2, 0.4)
        result = geometric_channel_radius_sdp([channel, channel], 1)
        assert result.value == pytest.approx(0.0, abs=1e-6)

    def test_ell_range(self, depolarizing_pair):
        """Verifica il rifiuto di ell negativi."""
        with pytest.raises(ValidationError):
            geometric_channel_radius_sdp(depolarizing_pair.channels, -1)

    def test_radius_decreases_with_ell(self, depolarizing_pair):
        """Verifica che il raggio non cresca al crescere di ell."""
        values = [geometric_channel_radius_sdp(depolarizing_pair.channels, ell).value for ell in range(3)]
        assert values[1] <= values[0] + 1e-6
        assert values[2] <= values[1] + 1e-6

    def test_radius_nonincreasing_on_random_pairs(self, rng):
        """Verifica la monotonia in ell per ell = 0, ..., 10 su coppie casuali."""
        for _ in range(3):
            channels = [random_channel(2, 2, rng), random_channel(2, 2, rng)]
            values = [geometric_channel_radius_sdp(channels, ell).value for ell in range(11)]
            assert all(b <= a + 1e-6 for a, b in zip(values, values[1:]))

    def test_replacers_dominate_cflat(self, qubit_pair):
        """Verifica che il raggio geometrico di rimpiazzi domini C♭."""
        channels = [replacer_channel(s, 1) for s in qubit_pair.states]
        result = geometric_channel_radius_sdp(channels, 2)
        assert result.value >= log_euclidean_chernoff(qubit_pair.states).value - 1e-6
        assert result.optimal_weights.weights.sum() == pytest.approx(1.0)

    def test_belavkin_classical(self, classical_channels):
        """Verifica che il raggio di canali classici sia max_y C(p_[r],y)."""
        result = belavkin_channel_radius(classical_channels.channels, tol=5e-5)
        expected = max(
            classical_chernoff([c.column(y) for c in classical_channels.channels]).value for y in range(2)
        )
        assert result.details["converged"]
        assert result.value == pytest.approx(expected, abs=2e-4)

    def test_belavkin_tolerance_floor(self, classical_channels):
        """Verifica il rifiuto di tolleranze sotto 1e-6."""
        with pytest.raises(ValidationError):
            belavkin_channel_radius(classical_channels.channels, tol=1e-8)

    def test_cq_reduction(self, classical_channels):
        """Verifica la riduzione colonna per colonna dei canali cq."""
        result, best_y = cq_radius_reduction(classical_channels.channels)
        per_column = [
            classical_chernoff([c.column(y) for c in classical_channels.channels]).value for y in range(2)
        ]
        assert best_y == int(np.argmax(per_column))
        assert result.value == pytest.approx(max(per_column), abs=1e-7)

    def test_trivial_intersection(self):
        """Verifica raggio infinito per canali con Choi a supporti disgiunti."""
        channels = [replacer_channel(np.diag([1.0, 0.0]), 1), replacer_channel(np.diag([0.0, 1.0]), 1)]
        assert math.isinf(geometric_channel_radius_sdp(channels, 0).value)


def test_maximally_mixed_replacer_is_channel():
    """Verifica che il rimpiazzo con I/d sia un canale CPTP."""
    channel = replacer_channel(maximally_mixed(2), 3)
    assert np.allclose(channel.input_marginal(), np.eye(3))
