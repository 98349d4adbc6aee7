"""Fixtures condivise per i test."""

from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from channels import ChannelEnsemble, ClassicalChannel, depolarizing_channel
from operators import StateEnsemble, density_from_ket, random_density

FIXTURES_DIR = Path(__file__).parent.parent / "fixtures"


@pytest.fixture
def rng():
    """Generatore casuale con seme fisso."""
    return np.random.default_rng(42)


@pytest.fixture
def isolated_cache(tmp_path):
    """Sposta la cache su disco in una directory temporanea."""
    with patch("config.Config.CACHE_DIR", tmp_path):
        yield tmp_path


@pytest.fixture
def fixtures_dir():
    return FIXTURES_DIR


@pytest.fixture
def identical_ensemble():
    """Tre copie dello stesso stato diagonale, equiprobabili."""
    rho = np.diag([0.7, 0.3]).astype(complex)
    return StateEnsemble.uniform([rho, rho, rho])


@pytest.fixture
def classical_pair():
    """Coppia di stati diagonali di qubit con prior uniforme."""
    return StateEnsemble.uniform([np.diag([0.9, 0.1]), np.diag([0.3, 0.7])])


@pytest.fixture
def classical_triple():
    """Tre distribuzioni su un alfabeto ternario."""
    return StateEnsemble(
        np.array([0.5, 0.3, 0.2]),
        (np.diag([0.6, 0.3, 0.1]), np.diag([0.2, 0.5, 0.3]), np.diag([0.1, 0.2, 0.7])),
    )


@pytest.fixture
def qubit_pair(rng):
    """Due stati di qubit casuali di rango pieno."""
    return StateEnsemble.uniform([random_density(2, rng), random_density(2, rng)])


@pytest.fixture
def qubit_triple(rng):
    """Tre stati di qubit casuali di rango pieno, prior non uniformi."""
    return StateEnsemble(
        np.array([0.5, 0.3, 0.2]),
        tuple(random_density(2, rng) for _ in range(3)),
    )


@pytest.fixture
def pure_pair():
    """|0⟩ e |+⟩: supporti con intersezione banale."""
    return StateEnsemble.uniform([
        density_from_ket([1, 0]),
        density_from_ket(np.array([1, 1]) / np.sqrt(2)),
    ])


@pytest.fixture
def classical_channels():
    """Due canali classici binari."""
    return ChannelEnsemble.uniform([
        ClassicalChannel(np.array([[0.9, 0.6], [0.1, 0.4]])),
        ClassicalChannel(np.array([[0.2, 0.5], [0.8, 0.5]])),
    ])


@pytest.fixture
def depolarizing_pair():
    """Due canali depolarizzanti di qubit con Choi di rango pieno."""
    return ChannelEnsemble.uniform([depolarizing_channel(2, 0.2), depolarizing_channel(2, 0.6)])
