"""
Algebra lineare hermitiana densa.

Fornisce gli operatori hermitiani immutabili usati da tutti i moduli
(stati, POVM, ensemble), le funzioni di matrice ristrette al supporto,
le norme di Schatten e l'algebra tensoriale con traccia parziale.

Convenzione: un autovalore è nullo quando |λ| ≤ 1e-10·max|λ|, con soglia
assoluta 1e-14. Ogni funzione di matrice restituisce (h + h†)/2.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from config import Config
from errors import DimensionMismatch, NegativeEigenvalue, ValidationError

logger = logging.getLogger("pexc.operators")

ArrayLike = Union["HermitianOperator", np.ndarray]


def as_array(h: ArrayLike) -> np.ndarray:
    """Restituisce la matrice complessa sottostante."""
    if isinstance(h, HermitianOperator):
        return h.entries
    return np.asarray(h, dtype=complex)


def hermitize(m: np.ndarray) -> np.ndarray:
    """Simmetrizza (m + m†)/2."""
    return (m + m.conj().T) / 2


def eigenvalue_threshold(eigenvalues: np.ndarray, rank_tol: Optional[float] = None) -> float:
    """Soglia sotto cui un autovalore è considerato nullo."""
    if eigenvalues.size == 0:
        return Config.RANK_ABS_FLOOR
    scale = float(np.max(np.abs(eigenvalues)))
    rel = Config.RANK_REL_TOL if rank_tol is None else rank_tol
    return max(rel * scale, Config.RANK_ABS_FLOOR)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """
    Matrice complessa hermitiana immutabile.

    L'input viene verificato (max |h_ij − conj(h_ji)| ≤ herm_tol) e poi
    simmetrizzato, così gli autovalori sono reali per costruzione.

    Attributes:
        entries: Matrice dim×dim (copia in sola lettura).
        herm_tol: Tolleranza sull'hermitianità.

    Example:
        >>> h = HermitianOperator(np.diag([1.0, -1.0]))
        >>> h.trace
        0.0
    """

    entries: np.ndarray
    herm_tol: float = Config.HERM_TOL

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DimensionMismatch(f"Matrice non quadrata: forma {m.shape}")
        deviation = float(np.max(np.abs(m - m.conj().T)))
        if deviation > self.herm_tol:
            raise ValidationError(
                f"Matrice non hermitiana (deviazione {deviation:.3e} > {self.herm_tol:.1e})"
            )
        m = hermitize(m)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @cached_property
    def spectrum(self) -> Tuple[np.ndarray, np.ndarray]:
        """Autovalori crescenti e autovettori (colonne)."""
        w, v = linalg.eigh(self.entries)
        return w, v

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    def is_psd(self, tol: float = Config.PSD_TOL) -> bool:
        return bool(self.eigenvalues[0] >= -tol)

    def is_zero(self) -> bool:
        return bool(np.max(np.abs(self.entries)) <= Config.RANK_ABS_FLOOR)

    def is_diagonal(self, tol: float = Config.HERM_TOL) -> bool:
        off = self.entries - np.diag(np.diag(self.entries))
        return bool(np.max(np.abs(off)) <= tol)

    def allclose(self, other: ArrayLike, atol: float = 1e-9) -> bool:
        return bool(np.allclose(self.entries, as_array(other), atol=atol, rtol=0))

    def __add__(self, other: ArrayLike) -> "HermitianOperator":
        return HermitianOperator(self.entries + as_array(other))

    def __sub__(self, other: ArrayLike) -> "HermitianOperator":
        return HermitianOperator(self.entries - as_array(other))

    def __neg__(self) -> "HermitianOperator":
        return HermitianOperator(-self.entries)

    def __mul__(self, scalar: float) -> "HermitianOperator":
        return HermitianOperator(float(scalar) * self.entries)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "HermitianOperator":
        return HermitianOperator(self.entries / float(scalar))

    def compress(self, isometry: np.ndarray) -> "HermitianOperator":
        """V† h V per un'isometria V."""
        return HermitianOperator(hermitize(isometry.conj().T @ self.entries @ isometry))

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def zeros(cls, dim: int) -> "HermitianOperator":
        return cls(np.zeros((dim, dim), dtype=complex))

    def to_dict(self) -> Dict[str, Any]:
        """Codifica JSON {"dim", "re", "im"}; "im" omesso se reale."""
        data: Dict[str, Any] = {"dim": self.dim, "re": np.real(self.entries).tolist()}
        if np.any(np.imag(self.entries) != 0):
            data["im"] = np.imag(self.entries).tolist()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "HermitianOperator":
        return cls(_matrix_from_dict(data))


@dataclass(frozen=True, eq=False)
class DensityOperator(HermitianOperator):
    """
    Stato quantistico: PSD entro 1e-9 e traccia unitaria entro trace_tol.

    Example:
        >>> DensityOperator(np.eye(2) / 2).trace
        1.0
    """

    trace_tol: float = Config.TRACE_TOL

    def __post_init__(self) -> None:
        super().__post_init__()
        if abs(self.trace - 1.0) > self.trace_tol:
            raise ValidationError(f"Traccia dello stato diversa da 1: {self.trace:.12g}")
        if self.eigenvalues[0] < -Config.PSD_TOL:
            raise NegativeEigenvalue(
                f"Stato con autovalore negativo: {self.eigenvalues[0]:.3e}"
            )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DensityOperator":
        return cls(_matrix_from_dict(data))


def _matrix_from_dict(data: Dict[str, Any]) -> np.ndarray:
    try:
        re = np.asarray(data["re"], dtype=float)
    except KeyError as e:
        raise ValidationError("Matrice JSON senza campo 're'") from e
    im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape or re.ndim != 2:
        raise DimensionMismatch(f"Parti reale/immaginaria incompatibili: {re.shape} vs {im.shape}")
    dim = int(data.get("dim", re.shape[0]))
    if re.shape != (dim, dim):
        raise DimensionMismatch(f"Campo dim={dim} incoerente con forma {re.shape}")
    return re + 1j * im


def density_from_ket(ket: Sequence[complex]) -> DensityOperator:
    """Proiettore |ψ⟩⟨ψ| di un vettore (normalizzato)."""
    v = np.asarray(ket, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValidationError("Vettore nullo")
    v = v / norm
    return DensityOperator(np.outer(v, v.conj()))


def maximally_mixed(dim: int) -> DensityOperator:
    return DensityOperator(np.eye(dim, dtype=complex) / dim)


# ---------------------------------------------------------------------------
# Supporti e funzioni di matrice
# ---------------------------------------------------------------------------


def support_basis(h: ArrayLike, rank_tol: Optional[float] = None) -> np.ndarray:
    """Isometria (colonne ortonormali) sul supporto di h."""
    if isinstance(h, HermitianOperator):
        w, v = h.spectrum
    else:
        w, v = linalg.eigh(hermitize(as_array(h)))
    mask = np.abs(w) > eigenvalue_threshold(w, rank_tol)
    return v[:, mask]


def support_projector(h: ArrayLike, rank_tol: Optional[float] = None) -> HermitianOperator:
    """
    Proiettore ortogonale sul supporto di h.

    Args:
        h: Operatore hermitiano.
        rank_tol: Soglia relativa (default Config.RANK_REL_TOL).

    Returns:
        HermitianOperator: Proiettore idempotente; zero per h = 0.

    Example:
        >>> support_projector(np.diag([1.0, 0.0])).entries.real
        array([[1., 0.],
               [0., 0.]])
    """
    basis = support_basis(h, rank_tol)
    return HermitianOperator(hermitize(basis @ basis.conj().T))


def matrix_fn(h: ArrayLike, fn: Callable[[np.ndarray], np.ndarray]) -> HermitianOperator:
    """Applica fn a tutti gli autovalori (anche quelli nulli)."""
    if isinstance(h, HermitianOperator):
        w, v = h.spectrum
    else:
        w, v = linalg.eigh(hermitize(as_array(h)))
    return HermitianOperator(hermitize((v * fn(w)) @ v.conj().T))


def matrix_fn_on_support(
    h: ArrayLike,
    fn: Callable[[np.ndarray], np.ndarray],
    requires_positive: bool = False,
) -> HermitianOperator:
    """
    Applica fn agli autovalori non nulli; quelli nulli vanno in 0.

    Args:
        h: Operatore hermitiano.
        fn: Funzione scalare vettorizzata.
        requires_positive: Se True (log, potenze negative) h deve essere PSD.

    Raises:
        NegativeEigenvalue: Se requires_positive e min autovalore < −soglia.
    """
    if isinstance(h, HermitianOperator):
        w, v = h.spectrum
    else:
        w, v = linalg.eigh(hermitize(as_array(h)))
    threshold = eigenvalue_threshold(w)
    if requires_positive and w.size and w[0] < -threshold:
        raise NegativeEigenvalue(f"Autovalore negativo {w[0]:.3e} per una funzione su PSD")
    mask = np.abs(w) > threshold
    if requires_positive:
        mask &= w > 0
    values = np.zeros_like(w)
    values[mask] = fn(w[mask])
    return HermitianOperator(hermitize((v * values) @ v.conj().T))


def power_on_support(h: ArrayLike, exponent: float) -> HermitianOperator:
    """h^p sul supporto; per p non intero positivo h deve essere PSD."""
    integral = float(exponent).is_integer() and exponent > 0
    return matrix_fn_on_support(h, lambda w: np.power(w, exponent), requires_positive=not integral)


def log_on_support(h: ArrayLike) -> HermitianOperator:
    return matrix_fn_on_support(h, np.log, requires_positive=True)


def expm_hermitian(h: ArrayLike) -> HermitianOperator:
    return matrix_fn(h, np.exp)


def support_contained(inner: ArrayLike, outer: ArrayLike) -> bool:
    """
    supp(inner) ⊆ supp(outer) se ‖(I − Π_outer) Π_inner‖_∞ ≤ 1e-8.
    """
    p_in = support_projector(inner).entries
    p_out = support_projector(outer).entries
    residual = (np.eye(p_out.shape[0]) - p_out) @ p_in
    return bool(np.linalg.norm(residual, 2) <= Config.SUPPORT_TOL)


def intersection_basis(ops: Iterable[ArrayLike]) -> np.ndarray:
    """
    Isometria sull'intersezione dei supporti.

    Calcolata spettralmente come nucleo di Σ_x (I − Π_x): autovalori sotto
    Config.INTERSECTION_TOL definiscono l'intersezione.
    """
    ops = list(ops)
    dim = as_array(ops[0]).shape[0]
    total = np.zeros((dim, dim), dtype=complex)
    for op in ops:
        total += np.eye(dim) - support_projector(op).entries
    w, v = linalg.eigh(hermitize(total))
    return v[:, w < Config.INTERSECTION_TOL]


def intersection_projector(ops: Iterable[ArrayLike]) -> HermitianOperator:
    basis = intersection_basis(ops)
    return HermitianOperator(hermitize(basis @ basis.conj().T))


def schatten_norm(g: ArrayLike, alpha: float) -> float:
    """
    Norma di Schatten (Σ|λ_i|^α)^{1/α}; α = inf restituisce max|λ_i|.

    Raises:
        ValidationError: Se alpha < 1.
    """
    if alpha < 1:
        raise ValidationError(f"La norma di Schatten richiede alpha ≥ 1 (trovato {alpha})")
    w = g.eigenvalues if isinstance(g, HermitianOperator) else linalg.eigvalsh(hermitize(as_array(g)))
    absolute = np.abs(w)
    if math.isinf(alpha):
        return float(np.max(absolute))
    return float(np.sum(absolute ** alpha) ** (1.0 / alpha))


# ---------------------------------------------------------------------------
# Algebra tensoriale
# ---------------------------------------------------------------------------


def kron(*ops: ArrayLike) -> HermitianOperator:
    """Prodotto tensoriale di uno o più operatori."""
    if not ops:
        raise DimensionMismatch("kron richiede almeno un operatore")
    return HermitianOperator(reduce(np.kron, (as_array(op) for op in ops)))


def tensor_power(h: ArrayLike, n: int) -> HermitianOperator:
    if n < 1:
        raise DimensionMismatch(f"Potenza tensoriale non valida: {n}")
    return kron(*([h] * n))


def partial_trace_array(m: np.ndarray, dims: Sequence[int], which: Union[int, Sequence[int]]) -> np.ndarray:
    """Traccia parziale su array (anche non hermitiani)."""
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise DimensionMismatch(f"Dimensioni {dims} incompatibili con forma {m.shape}")
    traced = sorted({which} if isinstance(which, int) else set(which), reverse=True)
    if any(k < 0 or k >= len(dims) for k in traced):
        raise DimensionMismatch(f"Sottosistema da tracciare non valido: {which}")
    n = len(dims)
    t = m.reshape(dims + dims)
    for k in traced:
        t = np.trace(t, axis1=k, axis2=k + n)
        n -= 1
    kept = int(np.prod([d for i, d in enumerate(dims) if i not in traced]))
    return t.reshape(kept, kept)


def partial_trace(h: ArrayLike, dims: Sequence[int], which: Union[int, Sequence[int]]) -> HermitianOperator:
    """
    Traccia parziale sui sottosistemi ``which``.

    Example:
        >>> rho, sigma = maximally_mixed(2), maximally_mixed(3)
        >>> partial_trace(kron(rho, sigma), [2, 3], 1).allclose(rho)
        True
    """
    return HermitianOperator(hermitize(partial_trace_array(as_array(h), dims, which)))


# ---------------------------------------------------------------------------
# POVM ed ensemble
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Povm:
    """
    Misura: elementi PSD (entro −1e-9) che sommano all'identità (entro 1e-8).
    """

    elements: Tuple[HermitianOperator, ...]

    def __post_init__(self) -> None:
        elements = tuple(
            e if isinstance(e, HermitianOperator) else HermitianOperator(e) for e in self.elements
        )
        if not elements:
            raise ValidationError("POVM vuota")
        dim = elements[0].dim
        if any(e.dim != dim for e in elements):
            raise DimensionMismatch("Elementi POVM di dimensioni diverse")
        for k, e in enumerate(elements):
            if e.eigenvalues[0] < -Config.PSD_TOL:
                raise NegativeEigenvalue(f"Elemento POVM {k} non PSD ({e.eigenvalues[0]:.3e})")
        total = sum(e.entries for e in elements)
        if np.max(np.abs(total - np.eye(dim))) > Config.POVM_TOL:
            raise ValidationError("Gli elementi della POVM non sommano all'identità")
        object.__setattr__(self, "elements", elements)

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    def __len__(self) -> int:
        return len(self.elements)

    @classmethod
    def polished(cls, elements: Sequence[np.ndarray]) -> "Povm":
        """
        Costruisce una POVM da un'iterata numerica.

        Taglia gli autovalori negativi e rinormalizza con S^{-1/2} Λ_x S^{-1/2},
        S = Σ_x Λ_x.
        """
        clipped = [matrix_fn(e, lambda w: np.clip(w, 0.0, None)).entries for e in elements]
        inv_sqrt = power_on_support(sum(clipped), -0.5).entries
        return cls(tuple(HermitianOperator(hermitize(inv_sqrt @ e @ inv_sqrt)) for e in clipped))

    @classmethod
    def deterministic(cls, dim: int, r: int, outcome: int = 0) -> "Povm":
        """POVM che restituisce sempre lo stesso esito."""
        return cls(tuple(
            HermitianOperator.identity(dim) if k == outcome else HermitianOperator.zeros(dim)
            for k in range(r)
        ))

    def to_dict(self) -> Dict[str, Any]:
        return {"elements": [e.to_dict() for e in self.elements]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Povm":
        return cls(tuple(HermitianOperator.from_dict(e) for e in data["elements"]))


def parse_probability(value: Any) -> float:
    """Accetta numeri o frazioni in stringa ("1/7")."""
    if isinstance(value, str):
        return float(Fraction(value))
    return float(value)


def validate_priors(priors: Sequence[float]) -> np.ndarray:
    """Distribuzione a priori strettamente interna, somma 1 entro 1e-12."""
    p = np.asarray(priors, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise ValidationError("Servono almeno due ipotesi")
    if np.any(p <= 0) or np.any(p >= 1):
        raise ValidationError("Le probabilità a priori devono stare in (0, 1)")
    if abs(float(np.sum(p)) - 1.0) > 1e-12:
        raise ValidationError(f"Le probabilità a priori sommano a {np.sum(p):.15g}")
    p = p.copy()
    p.setflags(write=False)
    return p


@dataclass(frozen=True, eq=False)
class StateEnsemble:
    """
    Ensemble (p_[r], ρ_[r]) di un compito di esclusione.

    Attributes:
        priors: Probabilità a priori, ciascuna in (0, 1).
        states: Stati della stessa dimensione.
    """

    priors: np.ndarray
    states: Tuple[DensityOperator, ...]

    def __post_init__(self) -> None:
        priors = validate_priors(self.priors)
        states = tuple(
            s if isinstance(s, DensityOperator) else DensityOperator(as_array(s)) for s in self.states
        )
        if len(states) != priors.size:
            raise DimensionMismatch(f"{priors.size} probabilità ma {len(states)} stati")
        if any(s.dim != states[0].dim for s in states):
            raise DimensionMismatch("Gli stati dell'ensemble hanno dimensioni diverse")
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "states", states)

    @property
    def r(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    @property
    def p_min(self) -> float:
        return float(np.min(self.priors))

    @classmethod
    def uniform(cls, states: Sequence[ArrayLike]) -> "StateEnsemble":
        r = len(states)
        return cls(np.full(r, 1.0 / r), tuple(states))

    def weighted_states(self) -> List[np.ndarray]:
        """Operatori p_x ρ_x."""
        return [p * s.entries for p, s in zip(self.priors, self.states)]

    def tensor_power(self, n: int) -> "StateEnsemble":
        """Ensemble n-fold (p_[r], ρ_[r]^{⊗n})."""
        if n == 1:
            return self
        return StateEnsemble(
            self.priors,
            tuple(DensityOperator(tensor_power(s, n).entries) for s in self.states),
        )

    def cq_operator(self) -> HermitianOperator:
        """ρ̂_XA = Σ_x p_x |x⟩⟨x| ⊗ ρ_x."""
        d = self.dim
        out = np.zeros((self.r * d, self.r * d), dtype=complex)
        for x, weighted in enumerate(self.weighted_states()):
            out[x * d:(x + 1) * d, x * d:(x + 1) * d] = weighted
        return HermitianOperator(out)

    def is_classical(self) -> bool:
        return all(s.is_diagonal() for s in self.states)

    def diagonals(self) -> np.ndarray:
        """Matrice r×d delle distribuzioni diagonali."""
        return np.array([np.real(np.diag(s.entries)) for s in self.states])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "priors": [float(p) for p in self.priors],
            "states": [s.to_dict() for s in self.states],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StateEnsemble":
        """
        Legge {"priors": [...], "states": [matrix...]}.

        Sono accettati anche "kets" (vettori {"re", "im"}) per stati puri e
        "uniform": true al posto delle probabilità.
        """
        if "states" in data:
            states = tuple(DensityOperator.from_dict(m) for m in data["states"])
        elif "kets" in data:
            states = tuple(
                density_from_ket(np.asarray(k["re"], float) + 1j * np.asarray(k.get("im", np.zeros(len(k["re"]))), float))
                for k in data["kets"]
            )
        else:
            raise ValidationError("Ensemble senza 'states' né 'kets'")
        if data.get("uniform") or "priors" not in data:
            return cls.uniform(states)
        return cls(np.array([parse_probability(p) for p in data["priors"]]), states)


# ---------------------------------------------------------------------------
# Generazione casuale
# ---------------------------------------------------------------------------


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Unitaria di Haar tramite QR di una matrice di Ginibre."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_density(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> DensityOperator:
    """Stato casuale (Ginibre) di rango dato, pieno per default."""
    k = rank or dim
    g = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    m = g @ g.conj().T
    return DensityOperator(hermitize(m / np.real(np.trace(m))))


def random_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_hermitian(dim: int, rng: np.random.Generator) -> HermitianOperator:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianOperator(hermitize(g))


def random_unit_trace_hermitian(dim: int, rng: np.random.Generator) -> HermitianOperator:
    """Hermitiano a traccia unitaria, in generale non PSD."""
    h = random_hermitian(dim, rng).entries
    h = h - np.trace(h) / dim * np.eye(dim)
    return HermitianOperator(h / 2 + np.eye(dim) / dim)


def random_probability(size: int, rng: np.random.Generator) -> np.ndarray:
    p = rng.dirichlet(np.ones(size))
    p = np.clip(p, 1e-3, None)
    return p / p.sum()
