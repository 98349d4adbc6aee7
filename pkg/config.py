"""
Modulo di configurazione per PEXC.

Gestisce il caricamento delle variabili d'ambiente, le tolleranze
numeriche e i parametri di configurazione globali.
"""

import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

# Carica variabili d'ambiente dal file .env
load_dotenv()


class Config:
    """
    Classe di configurazione centralizzata.

    Raccoglie le tolleranze numeriche usate da tutti i moduli, i parametri
    dei solutori, il caching e il logging.

    Attributes:
        HERM_TOL: Tolleranza sull'hermitianità delle matrici.
        TRACE_TOL: Tolleranza sulla traccia unitaria degli stati.
        PSD_TOL: Tolleranza sugli autovalori negativi degli stati.
        POVM_TOL: Tolleranza sulla somma degli elementi di una POVM.
        RANK_REL_TOL: Soglia relativa per gli autovalori nulli.
        RANK_ABS_FLOOR: Soglia assoluta per gli autovalori nulli.
        SUPPORT_TOL: Tolleranza per il contenimento dei supporti.
        SDP_GAP_TOL: Gap di dualità relativo accettato.
        SDP_MAX_ITERS: Numero massimo di iterazioni del solutore conico.
        ZERO_PROB: Sotto questa soglia una probabilità d'errore è nulla.
        THREADS: Numero massimo di thread (variabile PEXC_THREADS).
        SEED: Seme di default per la generazione casuale.
        LOG_LEVEL: Livello di logging (DEBUG, INFO, WARNING, ERROR).
        LOG_FILE: Path del file di log (opzionale).

    Example:
        >>> from config import Config
        >>> Config.SDP_GAP_TOL
        1e-07
    """

    # Algebra lineare
    HERM_TOL: float = 1e-10
    TRACE_TOL: float = 1e-9
    PSD_TOL: float = 1e-9
    POVM_TOL: float = 1e-8
    RANK_REL_TOL: float = 1e-10
    RANK_ABS_FLOOR: float = 1e-14
    SUPPORT_TOL: float = 1e-8
    INTERSECTION_TOL: float = 1e-9
    CLASSICAL_ZERO: float = 1e-15

    # Solutore conico
    SDP_GAP_TOL: float = 1e-7
    SDP_FEAS_TOL: float = 1e-7
    SDP_MAX_ITERS: int = 200
    SDP_INTERNAL_ABSTOL: float = 1e-10
    SDP_INTERNAL_RELTOL: float = 1e-9
    SDP_INTERNAL_FEASTOL: float = 1e-10
    MAX_SDP_DIM: int = 256
    DUALITY_CHECK_TOL: float = 1e-6

    # Compiti di esclusione
    ZERO_PROB: float = 1e-12
    CHARACTERIZATION_TOL: float = 1e-5

    # Ascesa sul simplesso
    SIMPLEX_GRAD_TOL: float = 1e-9
    SIMPLEX_MAX_ITERS: int = 5000
    SIMPLEX_RESTARTS: int = 5

    # Raggio di canale
    ELL_MAX: int = 12
    CHANNEL_TOL: float = 1e-8

    # Concorrenza e casualità
    THREADS: int = int(os.getenv("PEXC_THREADS", str(os.cpu_count() or 1)))
    SEED: int = int(os.getenv("PEXC_SEED", "42"))

    # Cache Configuration
    CACHE_DIR: Path = Path(os.getenv("CACHE_DIR", ".cache"))
    CACHE_EXPIRY_HOURS: int = int(os.getenv("CACHE_EXPIRY_HOURS", "24"))

    # Output
    PRINT_DIGITS: int = 9

    # Logging Configuration
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE: Optional[str] = os.getenv("LOG_FILE")

    @classmethod
    def validate(cls) -> bool:
        """
        Valida la configurazione corrente.

        Returns:
            bool: True se la configurazione è valida.

        Raises:
            ValueError: Se il numero di thread o la scadenza della cache
                non sono validi.

        Example:
            >>> Config.validate()
            True
        """
        if cls.THREADS < 1:
            raise ValueError(
                "PEXC_THREADS deve essere un intero positivo "
                f"(trovato {cls.THREADS})"
            )
        if cls.CACHE_EXPIRY_HOURS < 0:
            raise ValueError("CACHE_EXPIRY_HOURS non può essere negativo")
        if cls.ELL_MAX > 12:
            raise ValueError("ELL_MAX oltre 12 amplifica il rumore del solutore")
        return True

    @classmethod
    def get_cache_path(cls, cache_name: str) -> Path:
        """
        Restituisce il path completo per un file di cache.

        Args:
            cache_name: Nome del file di cache.

        Returns:
            Path: Path completo del file di cache.

        Example:
            >>> Config.get_cache_path("perr_cache.json")
            PosixPath('.cache/perr_cache.json')
        """
        cls.CACHE_DIR.mkdir(parents=True, exist_ok=True)
        return cls.CACHE_DIR / cache_name


# Costanti per messaggi
MESSAGES = {
    "file_not_found": "File non trovato: {path}",
    "invalid_json": "JSON non valido in {path} (riga {line}): {error}",
    "invalid_input": "Input non valido: {error}",
    "numerical_failure": "Errore numerico: {error}",
    "verify_ok": "Verifica completata: {passed}/{total} controlli superati.",
    "verify_failed": "Verifica fallita: {failed} controlli non superati.",
    "report_written": "Report salvato in {path}",
}
