"""
Modulo di utilità per PEXC.

Contiene funzioni di supporto per logging, caching, esecuzione parallela
e serializzazione dei reali estesi.
"""

import hashlib
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timedelta
from threading import Lock
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, TypeVar

import numpy as np

from config import Config

T = TypeVar("T")
R = TypeVar("R")

LOGGER_NAME = "pexc"
CACHE_FORMAT_VERSION = 1

_LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def setup_logging(verbose: bool = False, log_file: Optional[str] = None) -> logging.Logger:
    """
    Configura il logger ``pexc`` e restituiscilo.

    I moduli scrivono su logger figli (``pexc.radii``, ``pexc.conic_sdp``, ...).
    Anche i RuntimeWarning di numpy e scipy (overflow nei logaritmi di
    matrice, ecc.) finiscono negli stessi handler.

    Args:
        verbose: Se True, livello DEBUG; altrimenti Config.LOG_LEVEL.
        log_file: File di log opzionale (default Config.LOG_FILE).

    Example:
        >>> logger = setup_logging(verbose=True)
        >>> logging.getLogger("pexc.radii").debug("C♭ = 0.31")
        2024-01-15 10:30:00 - pexc.radii - DEBUG - C♭ = 0.31
    """
    level = logging.DEBUG if verbose else getattr(logging, Config.LOG_LEVEL, logging.INFO)
    formatter = logging.Formatter(_LOG_FORMAT, _DATE_FORMAT)

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    target = log_file or Config.LOG_FILE
    if target:
        handlers.append(logging.FileHandler(target, encoding="utf-8"))
    for handler in handlers:
        handler.setLevel(level)
        handler.setFormatter(formatter)

    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(level)
    logger.handlers = handlers
    logger.propagate = False

    logging.captureWarnings(True)
    warnings_logger = logging.getLogger("py.warnings")
    warnings_logger.handlers = handlers
    warnings_logger.propagate = False
    return logger


class Cache:
    """
    Cache su disco dei risultati numerici, con scadenza.

    Le chiavi sono payload JSON (ensemble serializzato, n, ...) ridotti a
    un hash md5 della loro forma canonica; i valori sono reali estesi,
    quindi anche P_err = 0 e gli esponenti infiniti sopravvivono al
    passaggio su disco. Un file con versione diversa viene ignorato.

    Example:
        >>> cache = Cache("perr_cache.json")
        >>> cache.set({"ensemble": e.to_dict(), "n": 3}, 0.0125)
        >>> cache.get({"ensemble": e.to_dict(), "n": 3})
        0.0125
    """

    def __init__(self, cache_name: str = "perr_cache.json", expiry_hours: Optional[int] = None):
        self.cache_file = Config.get_cache_path(cache_name)
        self.expiry = timedelta(hours=expiry_hours or Config.CACHE_EXPIRY_HOURS)
        self._entries: Dict[str, Dict[str, Any]] = {}
        self._lock = Lock()
        self._load()

    def __len__(self) -> int:
        return len(self._entries)

    @staticmethod
    def key(payload: Mapping[str, Any]) -> str:
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.md5(canonical.encode("utf-8")).hexdigest()

    def _load(self) -> None:
        if not self.cache_file.exists():
            return
        try:
            with open(self.cache_file, "r", encoding="utf-8") as f:
                stored = json.load(f)
        except (json.JSONDecodeError, OSError) as exc:
            logging.getLogger(LOGGER_NAME).warning(f"Cache illeggibile, ignorata: {exc}")
            return
        if isinstance(stored, dict) and stored.get("version") == CACHE_FORMAT_VERSION:
            self._entries = dict(stored.get("entries", {}))

    def _save(self) -> None:
        try:
            with open(self.cache_file, "w", encoding="utf-8") as f:
                json.dump({"version": CACHE_FORMAT_VERSION, "entries": self._entries}, f, indent=2)
        except OSError as exc:
            logging.getLogger(LOGGER_NAME).warning(f"Impossibile salvare la cache: {exc}")

    def _expired(self, entry: Mapping[str, Any]) -> bool:
        return datetime.now() - datetime.fromisoformat(entry["timestamp"]) > self.expiry

    def get(self, payload: Mapping[str, Any]) -> Optional[float]:
        """Valore associato a ``payload``, o None se assente o scaduto."""
        with self._lock:
            k = self.key(payload)
            entry = self._entries.get(k)
            if entry is None:
                return None
            if self._expired(entry):
                del self._entries[k]
                self._save()
                return None
            return decode_extended(entry["value"])

    def set(self, payload: Mapping[str, Any], value: float) -> None:
        with self._lock:
            self._entries[self.key(payload)] = {
                "value": encode_extended(value),
                "timestamp": datetime.now().isoformat(),
            }
            self._save()

    def clear(self) -> None:
        with self._lock:
            self._entries = {}
            self._save()

    def cleanup_expired(self) -> int:
        """Rimuove le voci scadute e ne restituisce il numero."""
        with self._lock:
            stale = [k for k, entry in self._entries.items() if self._expired(entry)]
            for k in stale:
                del self._entries[k]
            if stale:
                self._save()
            return len(stale)


def parallel_map(
    fn: Callable[[T], R],
    items: Iterable[T],
    max_workers: Optional[int] = None
) -> List[R]:
    """
    Applica ``fn`` agli elementi in parallelo, preservando l'ordine.

    Il numero di thread è limitato da ``Config.THREADS`` (PEXC_THREADS).
    Con un solo elemento o un solo worker l'esecuzione è sequenziale.

    Args:
        fn: Funzione pura da applicare.
        items: Elementi indipendenti.
        max_workers: Limite esplicito di thread.

    Returns:
        List: Risultati nello stesso ordine degli input.
    """
    items = list(items)
    workers = min(max_workers or Config.THREADS, len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    """Generatore casuale riproducibile (seme di default da Config)."""
    return np.random.default_rng(Config.SEED if seed is None else seed)


def encode_extended(value: float) -> Dict[str, Any]:
    """
    Serializza un reale esteso.

    Example:
        >>> encode_extended(0.5)
        {'finite': 0.5}
        >>> encode_extended(float("inf"))
        {'inf': True}
    """
    if math.isinf(value):
        if value < 0:
            return {"inf": True, "negative": True}
        return {"inf": True}
    return {"finite": float(value)}


def decode_extended(data: Dict[str, Any]) -> float:
    """Inverso di :func:`encode_extended`."""
    if data.get("inf"):
        return -math.inf if data.get("negative") else math.inf
    if "finite" not in data:
        raise ValueError(f"Reale esteso non valido: {data}")
    return float(data["finite"])


def format_number(value: Optional[float], digits: Optional[int] = None) -> str:
    """
    Formatta un numero con cifre significative; gli infiniti come inf/-inf.

    Example:
        >>> format_number(1 / 3)
        '0.333333333'
        >>> format_number(float("inf"))
        'inf'
    """
    if value is None:
        return "n/d"
    if math.isinf(value):
        return "-inf" if value < 0 else "inf"
    digits = digits or Config.PRINT_DIGITS
    return f"{value:.{digits}g}"


def format_duration(seconds: float) -> str:
    """
    Formatta una durata in secondi in formato leggibile.

    Example:
        >>> format_duration(150.5)
        '2m 30s'
    """
    minutes, secs = divmod(int(seconds), 60)
    if minutes > 0:
        return f"{minutes}m {secs}s"
    return f"{secs}s"
