"""Test per il modulo bound_ladder."""

import math

import numpy as np
import pytest

from bound_ladder import (
    BoundEntry,
    BoundReport,
    channel_report,
    channel_upsilon_max,
    closed_form_petz_bound,
    closed_form_petz_bound_regularized,
    corrected_cflat_bound,
    corrected_cflat_bound_at_alpha,
    optimal_alpha,
    state_report,
    upsilon_max,
)
from channels import ChannelEnsemble, replacer_channel
from errors import ValidationError
from exclusion_tasks import state_exclusion_error
from operators import maximally_mixed
from radii import log_euclidean_chernoff


class TestPetzBound:
    """Test per il limite di Petz in forma chiusa."""

    def test_identical_states(self, identical_ensemble):
        """Verifica il valore (α/(α−1)) ln 3 per stati identici."""
        assert closed_form_petz_bound(identical_ensemble, 2.0) == pytest.approx(2 * math.log(3), abs=1e-9)
        assert closed_form_petz_bound(identical_ensemble, 1.5) == pytest.approx(3 * math.log(3), abs=1e-9)

    def test_alpha_above_one(self, identical_ensemble):
        """Verifica il rifiuto di alpha ≤ 1."""
        with pytest.raises(ValidationError):
            closed_form_petz_bound(identical_ensemble, 1.0)

    def test_dominates_one_shot(self, qubit_triple):
        """Verifica −ln P_err ≤ limite di Petz."""
        one_shot = -math.log(state_exclusion_error(qubit_triple)[0])
        for alpha in (1.25, 1.5, 2.0, 3.0):
            assert one_shot <= closed_form_petz_bound(qubit_triple, alpha) + 1e-6

    def test_regularized_limit(self, classical_pair):
        """Verifica la convergenza della versione regolarizzata."""
        exact = closed_form_petz_bound(classical_pair, 2.0)
        assert closed_form_petz_bound_regularized(classical_pair, 2.0, 1e-10) == pytest.approx(exact, abs=1e-6)

    def test_regularized_eps_positive(self, classical_pair):
        """Verifica il rifiuto di ε non positivi."""
        with pytest.raises(ValidationError):
            closed_form_petz_bound_regularized(classical_pair, 2.0, 0.0)


class TestUpsilon:
    """Test per i termini del secondo ordine."""

    def test_maximally_mixed(self):
        """Verifica Υ_max = 1 + 3√2 per I/2."""
        ups, restricted = upsilon_max([maximally_mixed(2)] * 2)
        assert ups == pytest.approx(1 + 3 * math.sqrt(2))
        assert not restricted

    def test_at_least_three(self, qubit_triple):
        """Verifica Υ_max ≥ 3."""
        assert upsilon_max(qubit_triple.states)[0] >= 3.0

    def test_restricted_supports(self, pure_pair):
        """Verifica il segnale di supporti diversi."""
        assert upsilon_max(pure_pair.states)[1]

    def test_channel_replacer(self):
        """Verifica Υ̂_max = 10 per rimpiazzi con I/2 su un qubit."""
        ne = ChannelEnsemble.uniform([replacer_channel(maximally_mixed(2), 2)] * 2)
        assert channel_upsilon_max(ne) == pytest.approx(10.0)


class TestCorrectedBounds:
    """Test per i limiti non asintotici."""

    def test_above_cflat_and_decreasing(self, classical_pair):
        """Verifica che il limite corretto superi C♭ e decresca con n."""
        cflat = log_euclidean_chernoff(classical_pair.states).value
        values = [corrected_cflat_bound(classical_pair, n, cflat) for n in (1, 4, 16)]
        assert all(v > cflat for v in values)
        assert values[0] > values[1] > values[2]

    def test_n_positive(self, classical_pair):
        """Verifica il rifiuto di n non positivi."""
        with pytest.raises(ValidationError):
            corrected_cflat_bound(classical_pair, 0)

    def test_optimal_alpha_in_range(self, qubit_pair):
        """Verifica che α⋆ sia ammissibile e dia un limite sopra C♭."""
        alpha = optimal_alpha(qubit_pair, 10)
        cflat = log_euclidean_chernoff(qubit_pair.states).value
        assert alpha > 1
        assert corrected_cflat_bound_at_alpha(qubit_pair, 10, alpha, cflat) > cflat

    def test_alpha_out_of_range(self, qubit_pair):
        """Verifica il rifiuto di alpha troppo grandi."""
        with pytest.raises(ValidationError):
            corrected_cflat_bound_at_alpha(qubit_pair, 10, 3.0)


class TestBoundReport:
    """Test per la struttura del report."""

    def test_tightest_ignores_auxiliary(self):
        """Verifica che la voce più stretta sia un limite finito sull'esponente."""
        report = BoundReport("state", entries=[
            BoundEntry("a", 0.5, "x"),
            BoundEntry("b", math.inf, "x"),
            BoundEntry("c", 0.1, "x", kind="auxiliary"),
            BoundEntry("d", None, "x", error="fallito"),
        ])
        assert report.tightest.name == "a"

    def test_ordering_skipped_without_values(self):
        """Verifica che i confronti con voci mancanti siano ignorati."""
        report = BoundReport("state", entries=[BoundEntry("a", 0.5, "x")])
        report.add_ordering("a", "missing")
        assert report.orderings == []

    def test_ordering_tolerance(self):
        """Verifica la tolleranza 1e-6 nei confronti."""
        report = BoundReport("state", entries=[BoundEntry("a", 1.0 + 5e-7, "x"), BoundEntry("b", 1.0, "x")])
        report.add_ordering("a", "b")
        assert report.all_orderings_satisfied

    def test_dict_roundtrip(self):
        """Verifica la serializzazione con valori infiniti e falliti."""
        report = BoundReport("state", entries=[
            BoundEntry("a", math.inf, "x", parameters={"alpha": 2.0}),
            BoundEntry("b", None, "y", error="fallito"),
        ])
        report.add_ordering("b", "a", 0.3, math.inf)
        data = report.to_dict()
        restored = BoundReport.from_dict(data)
        assert math.isinf(restored.get("a"))
        assert restored.entries[1].error == "fallito"
        assert restored.orderings[0].satisfied
        assert data["tightest"] is None


class TestStateReport:
    """Test per il report su ensemble di stati."""

    def test_classical_pair(self, classical_pair, isolated_cache):
        """Verifica voci e confronti per una coppia classica."""
        report = state_report(classical_pair, n_max=3)
        names = [e.name for e in report.entries]
        for name in ("cflat", "neg_log_kappa", "one_shot", "quantum_chernoff", "classical_chernoff",
                     "petz_closed_form[alpha=1.5]", "corrected_cflat"):
            assert name in names
        assert report.get("one_shot") == pytest.approx(-math.log(0.2), abs=1e-6)
        assert report.get("cflat") == pytest.approx(report.get("classical_chernoff"), abs=1e-7)
        assert report.metadata["n_empirical"] == 3
        assert report.all_orderings_satisfied

    def test_trivial_intersection(self, pure_pair, isolated_cache):
        """Verifica C♭ infinito e segnale di supporti ristretti."""
        report = state_report(pure_pair, n_max=2)
        assert math.isinf(report.get("cflat"))
        assert report.metadata["support_restricted"]

    def test_failed_entry_recorded(self, classical_pair, isolated_cache, mocker):
        """Verifica che un errore su una voce non interrompa il report."""
        mocker.patch("bound_ladder.closed_form_petz_bound", side_effect=ValidationError("guasto"))
        report = state_report(classical_pair, n_max=2, alphas=(2.0,))
        entry = next(e for e in report.entries if e.name == "petz_closed_form[alpha=2]")
        assert entry.value is None
        assert "guasto" in entry.error
        assert report.get("cflat") is not None

    def test_n_max_positive(self, classical_pair):
        """Verifica il rifiuto di n_max < 1."""
        with pytest.raises(ValidationError):
            state_report(classical_pair, n_max=0)


class TestChannelReport:
    """Test per il report su ensemble di canali."""

    def test_classical_channels(self, classical_channels):
        """Verifica raggio, esponente esatto e confronti per canali classici."""
        report = channel_report(classical_channels, n_max=3)
        assert report.subject == "channel"
        assert report.metadata["best_input"] in (0, 1)
        assert report.metadata["classical_gap"] < 1e-3
        assert report.empirical is not None
        assert report.all_orderings_satisfied
        radius = next(e for e in report.entries if e.name == "belavkin_radius")
        assert radius.parameters["converged"]

    def test_quantum_channels(self, depolarizing_pair):
        """Verifica che per canali quantistici manchi la parte classica."""
        report = channel_report(depolarizing_pair, n_max=2)
        assert report.get("classical_exponent") is None
        assert report.empirical is None
        assert np.isfinite(report.get("corrected_channel_bound"))
