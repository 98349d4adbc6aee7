"""
Eccezioni del dominio PEXC.

Gli errori di validazione derivano da ValueError, quelli numerici da
RuntimeError: la CLI li traduce rispettivamente nei codici d'uscita 2 e 3.
"""

from typing import Any, Dict, Optional


class ValidationError(ValueError):
    """Input non valido (matrici, ensemble, parametri)."""


class DimensionMismatch(ValidationError):
    """Dimensioni incompatibili tra operatori o sistemi."""


class NegativeEigenvalue(ValidationError):
    """Funzione che richiede positività applicata a un operatore non PSD."""


class ZeroOperator(ValidationError):
    """Operatore nullo dove serve un operatore non nullo."""


class NotApplicable(ValidationError):
    """La quantità richiesta non è definita per questo input."""


class Unsupported(ValidationError):
    """Combinazione di divergenza e modalità non implementata."""


class TooLarge(ValidationError):
    """Il problema supera il limite di dimensione degli SDP."""


class Degenerate(ValidationError):
    """Input degenere (ad esempio due vettori coincidenti)."""


class NumericalFailure(RuntimeError):
    """
    Fallimento numerico generico.

    Attributes:
        residuals: Residui dell'ultima iterata, se disponibili.
    """

    def __init__(self, message: str, residuals: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.residuals = residuals or {}


class SdpFailure(NumericalFailure):
    """Il solutore conico non ha certificato una soluzione ottima."""


class NonConvergence(NumericalFailure):
    """
    Una procedura iterativa non è arrivata a convergenza.

    Attributes:
        last_value: Ultimo valore calcolato.
    """

    def __init__(self, message: str, last_value: Any = None):
        super().__init__(message)
        self.last_value = last_value
