"""
Compiti operativi di esclusione e discriminazione.

Contiene le probabilità d'errore one-shot e n-fold (via SDP, o via
programma lineare per ensemble classici), le caratterizzazioni tramite
divergenza di test d'ipotesi e D′_max, i criteri per terne di stati puri,
la valutazione in avanti di strategie adattive e la stima empirica degli
esponenti d'errore.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from channels import ChannelEnsemble, ClassicalChannel, QuantumChannel, choi_from_kraus
from config import Config
from conic_sdp import SdpBuilder, solve
from divergences import dmax_lower, hypothesis_testing_extended
from errors import Degenerate, DimensionMismatch, NumericalFailure, TooLarge, ValidationError
from operators import (
    ArrayLike,
    DensityOperator,
    HermitianOperator,
    Povm,
    StateEnsemble,
    as_array,
    density_from_ket,
    hermitize,
    partial_trace_array,
)
from radii import classical_chernoff
from utils import Cache, decode_extended, encode_extended, parallel_map

logger = logging.getLogger("pexc.exclusion")

# Sotto questa dimensione l'SDP primale sulle POVM viene risolto come controllo
PRIMAL_CHECK_MAX_DIM = 32


# ---------------------------------------------------------------------------
# Esclusione e discriminazione one-shot
# ---------------------------------------------------------------------------


def _exclusion_dual(weighted: Sequence[np.ndarray], discrimination: bool = False) -> Tuple[float, np.ndarray, List[np.ndarray]]:
    """
    Esclusione: sup Tr γ con γ ⪯ p_x ρ_x.
    Discriminazione: inf Tr γ con γ ⪰ p_x ρ_x.

    I moltiplicatori dei blocchi formano una POVM (Σ_x Λ_x = I).
    """
    dim = weighted[0].shape[0]
    builder = SdpBuilder()
    gamma = builder.hermitian(dim, "gamma")
    sign = 1.0 if discrimination else -1.0
    for x, w in enumerate(weighted):
        builder.add_lmi([(gamma, lambda m, s=sign: s * m)], -sign * w, f"x={x}")
    builder.add_objective(gamma, np.eye(dim))
    context = "discriminazione" if discrimination else "esclusione"
    solution = solve(builder.build(maximize=not discrimination)).require_optimal(context)
    return solution.primal_value, gamma.value(solution.x), solution.block_duals


def _primal_povm_value(weighted: Sequence[np.ndarray], discrimination: bool) -> float:
    """min (o max) Σ_x Tr[Λ_x p_x ρ_x] sulle POVM."""
    dim = weighted[0].shape[0]
    builder = SdpBuilder()
    elements = [builder.hermitian(dim, f"Lambda_{x}") for x in range(len(weighted))]
    for x, var in enumerate(elements):
        builder.add_lmi([(var, lambda m: m)], np.zeros((dim, dim)), f"Lambda_{x}>=0")
        builder.add_objective(var, weighted[x])
    builder.add_equality([(var, lambda m: m) for var in elements], np.eye(dim))
    return solve(builder.build(maximize=discrimination)).require_optimal("POVM primale").primal_value


def _povm_value(povm: Povm, weighted: Sequence[np.ndarray]) -> float:
    return float(sum(np.real(np.trace(e.entries @ w)) for e, w in zip(povm.elements, weighted)))


def state_exclusion_error(
    e: StateEnsemble,
    cross_check: Optional[bool] = None,
) -> Tuple[float, HermitianOperator, Povm]:
    """
    P_err(E) = inf_Λ Σ_x p_x Tr[Λ_x ρ_x].

    Risolve il duale sup{Tr γ : γ ⪯ p_x ρ_x}; i suoi moltiplicatori
    danno la POVM ottima. Per dimensioni piccole (o con ``cross_check``)
    risolve anche il primale sulle POVM e ne verifica l'accordo entro 1e-6.

    Returns:
        Tuple: (P_err, γ⋆, POVM ottima). Valori sotto 1e-12 sono zeri esatti.

    Raises:
        SdpFailure: Se uno dei due SDP non è certificato.
        NumericalFailure: Se primale e duale non concordano.

    Example:
        >>> e = StateEnsemble.uniform([maximally_mixed(2)] * 3)
        >>> round(state_exclusion_error(e)[0], 6)
        0.333333
    """
    weighted = e.weighted_states()
    value, gamma, duals = _exclusion_dual(weighted)
    povm = Povm.polished(duals)
    attained = _povm_value(povm, weighted)
    if cross_check is None:
        cross_check = e.dim * e.r <= PRIMAL_CHECK_MAX_DIM
    if cross_check:
        primal = _primal_povm_value(weighted, discrimination=False)
        if abs(primal - value) > Config.DUALITY_CHECK_TOL:
            raise NumericalFailure(
                f"Primale {primal:.10g} e duale {value:.10g} dell'esclusione non concordano",
                {"primal": primal, "dual": value},
            )
    if abs(attained - value) > Config.DUALITY_CHECK_TOL:
        logger.warning(f"POVM ricostruita: valore {attained:.10g} contro duale {value:.10g}")
    p_err = 0.0 if value <= Config.ZERO_PROB else min(value, 1.0)
    logger.debug(f"P_err di esclusione (r={e.r}, d={e.dim}): {p_err:.10g}")
    return p_err, HermitianOperator(gamma), povm


def state_discrimination_error(e: StateEnsemble, cross_check: Optional[bool] = None) -> float:
    """
    P_err^SD(E) = 1 − sup_Λ Σ_x p_x Tr[Λ_x ρ_x] = 1 − inf{Tr γ : γ ⪰ p_x ρ_x}.

    La caratterizzazione con D_H^{1/r} viene verificata in τ⋆ = γ⋆/Tr γ⋆
    quando ``cross_check`` è attivo (di default per dimensioni piccole).
    """
    weighted = e.weighted_states()
    success, gamma, _ = _exclusion_dual(weighted, discrimination=True)
    p_err = max(0.0, 1.0 - success)
    if cross_check is None:
        cross_check = e.dim * e.r <= PRIMAL_CHECK_MAX_DIM
    if cross_check:
        primal = _primal_povm_value(weighted, discrimination=True)
        if abs(primal - success) > Config.DUALITY_CHECK_TOL:
            raise NumericalFailure(
                f"Primale {primal:.10g} e duale {success:.10g} della discriminazione non concordano",
                {"primal": primal, "dual": success},
            )
        if p_err > Config.ZERO_PROB:
            tau = gamma / success
            d_h = hypothesis_testing_extended(_pi_tensor(tau, e.r), e.cq_operator(), 1.0 / e.r).value
            if abs(d_h + math.log(p_err)) > Config.CHARACTERIZATION_TOL:
                raise NumericalFailure(
                    f"Caratterizzazione D_H della discriminazione: {d_h:.8g} contro {-math.log(p_err):.8g}"
                )
    return 0.0 if p_err <= Config.ZERO_PROB else p_err


def _pi_tensor(tau: np.ndarray, r: int) -> np.ndarray:
    """π_X ⊗ τ con π_X = I/r."""
    return np.kron(np.eye(r) / r, tau)


def hypothesis_testing_characterization(e: StateEnsemble) -> float:
    """
    −ln P_err(E) = inf_{τ ∈ aff} D_H^{1−1/r}(π_X ⊗ τ ‖ ρ̂_XA).

    L'infimo è valutato in τ⋆ = γ⋆/Tr γ⋆ ricavato dal duale
    dell'esclusione e confrontato con −ln P_err entro 1e-5.

    Returns:
        float: Il valore, +∞ per esclusione perfetta.
    """
    p_err, gamma, _ = state_exclusion_error(e)
    if p_err <= Config.ZERO_PROB or gamma.trace <= Config.ZERO_PROB:
        return math.inf
    tau = gamma.entries / gamma.trace
    value = hypothesis_testing_extended(_pi_tensor(tau, e.r), e.cq_operator(), 1.0 - 1.0 / e.r).value
    if abs(value + math.log(p_err)) > Config.CHARACTERIZATION_TOL:
        raise NumericalFailure(
            f"D_H in τ⋆ vale {value:.8g} ma −ln P_err vale {-math.log(p_err):.8g}",
            {"d_h": value, "neg_log_perr": -math.log(p_err)},
        )
    return value


def dmax_characterization(e: StateEnsemble) -> Tuple[float, Optional[HermitianOperator]]:
    """
    −ln P_err(E) = inf_{τ ∈ aff} max_x D′_max(τ ‖ p_x ρ_x), valutato in τ⋆.

    Returns:
        Tuple: (valore, τ⋆); (+∞, None) per esclusione perfetta.
    """
    p_err, gamma, _ = state_exclusion_error(e)
    if p_err <= Config.ZERO_PROB:
        return math.inf, None
    tau = gamma.entries / gamma.trace
    value = max(dmax_lower(tau, w).value for w in e.weighted_states())
    return value, HermitianOperator(tau)


# ---------------------------------------------------------------------------
# Casi classici e n-fold
# ---------------------------------------------------------------------------


def _as_distributions(priors: Sequence[float], dists: Sequence[Sequence[float]]) -> Tuple[np.ndarray, np.ndarray]:
    p = np.asarray(priors, dtype=float)
    d = np.asarray(dists, dtype=float)
    if d.ndim != 2 or d.shape[0] != p.size:
        raise DimensionMismatch(f"{p.size} probabilità a priori per distribuzioni di forma {d.shape}")
    return p, d


def classical_exclusion_error(priors: Sequence[float], dists: Sequence[Sequence[float]]) -> float:
    """
    Programma lineare dell'esclusione classica: Σ_y min_x p_x P_x(y).

    Example:
        >>> classical_exclusion_error([0.5, 0.5], [[1, 0], [0, 1]])
        0.0
    """
    p, d = _as_distributions(priors, dists)
    value = float(np.sum(np.min(p[:, None] * d, axis=0)))
    return 0.0 if value <= Config.ZERO_PROB else value


def classical_discrimination_error(priors: Sequence[float], dists: Sequence[Sequence[float]]) -> float:
    """1 − Σ_y max_x p_x P_x(y)."""
    p, d = _as_distributions(priors, dists)
    return max(0.0, 1.0 - float(np.sum(np.max(p[:, None] * d, axis=0))))


def product_distributions(dists: Sequence[Sequence[float]], n: int) -> np.ndarray:
    """Distribuzioni prodotto P_x^{⊗n} sull'alfabeto prodotto."""
    d = np.asarray(dists, dtype=float)
    out = d
    for _ in range(n - 1):
        out = np.array([np.kron(row, base) for row, base in zip(out, d)])
    return out


def n_fold_exclusion(e: StateEnsemble, n: int, classical_fast_path: bool = True) -> float:
    """
    P_err(E^n) con E^n = (p_[r], ρ_[r]^{⊗n}).

    Raises:
        TooLarge: Se d^n supera Config.MAX_SDP_DIM sul percorso SDP.
    """
    if n < 1:
        raise ValidationError(f"n deve essere positivo (trovato {n})")
    if classical_fast_path and e.is_classical():
        return classical_exclusion_error(e.priors, product_distributions(e.diagonals(), n))
    if e.dim ** n > Config.MAX_SDP_DIM:
        raise TooLarge(f"Dimensione {e.dim}^{n} oltre il limite {Config.MAX_SDP_DIM}")
    return state_exclusion_error(e.tensor_power(n))[0]


@dataclass
class ExponentEstimate:
    """
    Stima empirica dell'esponente d'errore.

    Attributes:
        per_n: Valori −(1/n) ln P_err(E^n) per n = 1, 2, ...
        errors: Probabilità d'errore corrispondenti.
        slope: Pendenza ai minimi quadrati di −ln P_err contro n sulla
            metà superiore dell'intervallo (+∞ se l'esclusione diventa perfetta).
        n_max: Ultimo n calcolato.
        residual: Somma dei residui quadratici del fit.
        perfect_at: Primo n con esclusione perfetta, se raggiunto.
    """
    per_n: List[float]
    errors: List[float]
    slope: float
    n_max: int
    residual: float = 0.0
    perfect_at: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "per_n": [encode_extended(v) for v in self.per_n],
            "errors": list(self.errors),
            "slope": encode_extended(self.slope),
            "n_max": self.n_max,
            "residual": self.residual,
            "perfect_at": self.perfect_at,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExponentEstimate":
        return cls(
            per_n=[decode_extended(v) for v in data["per_n"]],
            errors=[float(p) for p in data["errors"]],
            slope=decode_extended(data["slope"]),
            n_max=int(data["n_max"]),
            residual=float(data.get("residual", 0.0)),
            perfect_at=data.get("perfect_at"),
        )


def _fit_slope(errors: Sequence[float]) -> Tuple[float, float]:
    ns = np.arange(1, len(errors) + 1, dtype=float)
    y = -np.log(np.asarray(errors, dtype=float))
    if len(errors) == 1:
        return float(y[0]), 0.0
    start = len(errors) // 2 if len(errors) >= 4 else 0
    coeffs, residuals, *_ = np.polyfit(ns[start:], y[start:], 1, full=True)
    residual = float(residuals[0]) if len(residuals) else 0.0
    return float(coeffs[0]), residual


def empirical_exponent(
    e: StateEnsemble,
    n_max: int,
    use_cache: bool = True,
) -> ExponentEstimate:
    """
    Sequenza −(1/n) ln P_err(E^n) per n = 1..n_max e pendenza stimata.

    Gli ensemble classici usano il programma lineare sull'alfabeto
    prodotto; gli altri l'SDP sulle potenze tensoriali. I valori già
    calcolati sono letti dalla cache su disco.

    Raises:
        TooLarge: Se n_max supera il limite SDP per ensemble non classici.
    """
    if n_max < 1:
        raise ValidationError(f"n_max deve essere ≥ 1 (trovato {n_max})")
    if not e.is_classical() and e.dim ** n_max > Config.MAX_SDP_DIM:
        raise TooLarge(f"Dimensione {e.dim}^{n_max} oltre il limite {Config.MAX_SDP_DIM}")
    cache = Cache() if use_cache else None
    ensemble = e.to_dict()

    def compute(n: int) -> float:
        key = {"task": "exclusion", "ensemble": ensemble, "n": n}
        if cache is not None:
            cached = cache.get(key)
            if cached is not None:
                return cached
        value = n_fold_exclusion(e, n)
        if cache is not None:
            cache.set(key, value)
        return value

    errors = parallel_map(compute, range(1, n_max + 1))
    return exponent_from_errors(errors)


def exponent_from_errors(errors: Sequence[float]) -> ExponentEstimate:
    """
    ExponentEstimate da una sequenza P_err(n), n = 1, 2, ...

    La sequenza è troncata al primo zero (esclusione perfetta), che rende
    l'esponente +∞.
    """
    errors = [float(p) for p in errors]
    perfect_at = next((n for n, p in enumerate(errors, start=1) if p <= Config.ZERO_PROB), None)
    if perfect_at is not None:
        logger.info(f"Esclusione perfetta raggiunta con n={perfect_at}")
        kept = errors[:perfect_at - 1]
        per_n = [-math.log(p) / n for n, p in enumerate(kept, start=1)] + [math.inf]
        return ExponentEstimate(per_n, errors[:perfect_at], math.inf, perfect_at, 0.0, perfect_at)
    per_n = [-math.log(p) / n for n, p in enumerate(errors, start=1)]
    slope, residual = _fit_slope(errors)
    return ExponentEstimate(per_n, errors, slope, len(errors), residual)


# ---------------------------------------------------------------------------
# Terne di stati puri
# ---------------------------------------------------------------------------


def _unit(psi: Sequence[complex]) -> np.ndarray:
    v = np.asarray(psi, dtype=complex).ravel()
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ValidationError(f"Vettore non normalizzato (norma {np.linalg.norm(v):.12g})")
    return v


def _overlaps(psi1: Sequence[complex], psi2: Sequence[complex], psi3: Sequence[complex]) -> Tuple[float, float, float]:
    v1, v2, v3 = _unit(psi1), _unit(psi2), _unit(psi3)
    if not v1.size == v2.size == v3.size:
        raise DimensionMismatch("Vettori di dimensioni diverse")
    a = float(abs(np.vdot(v1, v2)) ** 2)
    b = float(abs(np.vdot(v2, v3)) ** 2)
    c = float(abs(np.vdot(v3, v1)) ** 2)
    return a, b, c


def _triple_criterion(a: float, b: float, c: float) -> bool:
    total = a + b + c
    return total < 1 and (total - 1) ** 2 >= 4 * a * b * c


def pure_triple_antidistinguishable(
    psi1: Sequence[complex], psi2: Sequence[complex], psi3: Sequence[complex]
) -> Tuple[bool, float, float, float]:
    """
    Criterio di antidistinguibilità per tre stati puri tramite misura
    proiettiva ortogonale di rango 1: a + b + c < 1 e (a + b + c − 1)² ≥ 4abc,
    con a, b, c i moduli quadri delle sovrapposizioni a coppie.
    """
    a, b, c = _overlaps(psi1, psi2, psi3)
    return _triple_criterion(a, b, c), a, b, c


def min_copies_perfect_exclusion(
    psi1: Sequence[complex], psi2: Sequence[complex], psi3: Sequence[complex]
) -> int:
    """
    Minimo n per cui le potenze tensoriali soddisfano il criterio.

    Il risultato non supera ceil(ln 4 / (−ln m)), m = max(a, b, c).

    Raises:
        Degenerate: Se due vettori coincidono a meno di una fase.
    """
    a, b, c = _overlaps(psi1, psi2, psi3)
    m = max(a, b, c)
    if m >= 1 - 1e-12:
        raise Degenerate("Due stati della terna coincidono")
    cap = 1 if m == 0 else max(1, math.ceil(math.log(4) / -math.log(m)))
    for n in range(1, cap + 1):
        if _triple_criterion(a ** n, b ** n, c ** n):
            return n
    return cap


# ---------------------------------------------------------------------------
# Canali: strategie ed esponenti
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AdaptiveStrategy:
    """
    Strategia adattiva con n invocazioni del canale.

    Attributes:
        initial_state: Stato su R_1 ⊗ A_1.
        ref_dims: Dimensioni d_{R_1}, ..., d_{R_n} dei registri di riferimento.
        adaptors: n−1 canali R_i B_i → R_{i+1} A_{i+1}.
        final_povm: POVM con r esiti su R_n ⊗ B_n.
    """

    initial_state: DensityOperator
    ref_dims: Tuple[int, ...]
    adaptors: Tuple[QuantumChannel, ...]
    final_povm: Povm

    @property
    def n(self) -> int:
        return len(self.ref_dims)

    def validate(self, ne: ChannelEnsemble) -> None:
        """Controlla la catena delle dimensioni contro l'ensemble."""
        d_in, d_out = ne.d_in, ne.d_out
        if len(self.adaptors) != self.n - 1:
            raise DimensionMismatch(f"{len(self.adaptors)} adattatori per {self.n} invocazioni")
        if self.initial_state.dim != self.ref_dims[0] * d_in:
            raise DimensionMismatch("Stato iniziale incompatibile con R_1 ⊗ A")
        for i, adaptor in enumerate(self.adaptors):
            expected = (self.ref_dims[i] * d_out, self.ref_dims[i + 1] * d_in)
            if (adaptor.d_in, adaptor.d_out) != expected:
                raise DimensionMismatch(
                    f"Adattatore {i}: {adaptor.d_in}→{adaptor.d_out}, atteso {expected[0]}→{expected[1]}"
                )
        if self.final_povm.dim != self.ref_dims[-1] * d_out or len(self.final_povm) != ne.r:
            raise DimensionMismatch("POVM finale incompatibile con R_n ⊗ B e con r")


def _final_state(channel: QuantumChannel, s: AdaptiveStrategy) -> np.ndarray:
    state = s.initial_state.entries
    for i in range(s.n):
        state = channel.apply(state, s.ref_dims[i]).entries
        if i < s.n - 1:
            state = s.adaptors[i].apply(state).entries
    return state


def evaluate_adaptive_strategy(ne: ChannelEnsemble, s: AdaptiveStrategy) -> float:
    """
    Probabilità d'errore Σ_x p_x Tr[Λ_x ρ′_{x,n}] di una strategia data.

    Simula in avanti ρ_{x,1} → N_x → A_1 → ... → N_x per ogni ipotesi x.
    """
    s.validate(ne)
    finals = parallel_map(lambda c: _final_state(c, s), ne.quantum_channels())
    value = sum(
        p * float(np.real(np.trace(povm_element.entries @ state)))
        for p, povm_element, state in zip(ne.priors, s.final_povm.elements, finals)
    )
    return max(0.0, float(value))


def _append_state_channel(d_keep: int, sigma: np.ndarray) -> QuantumChannel:
    """X ↦ X ⊗ σ come canale d_keep → d_keep·d_σ."""
    w, v = np.linalg.eigh(hermitize(sigma))
    kraus = [
        np.kron(np.eye(d_keep), math.sqrt(max(wk, 0.0)) * v[:, [k]])
        for k, wk in enumerate(w) if wk > Config.RANK_ABS_FLOOR
    ]
    return choi_from_kraus(kraus)


def nonadaptive_strategy(
    ne: ChannelEnsemble,
    inputs: Sequence[ArrayLike],
    povm: Povm,
) -> AdaptiveStrategy:
    """
    Strategia non adattiva: invia gli stati ``inputs`` e conserva ogni
    uscita nel registro di riferimento.

    La POVM finale agisce su B^{⊗n}, con le uscite nell'ordine d'invocazione.
    """
    n = len(inputs)
    if n < 1:
        raise ValidationError("Serve almeno uno stato d'ingresso")
    states = [as_array(i) for i in inputs]
    if any(st.shape != (ne.d_in, ne.d_in) for st in states):
        raise DimensionMismatch("Stati d'ingresso incompatibili con d_in")
    ref_dims = tuple(ne.d_out ** i for i in range(n))
    adaptors = tuple(_append_state_channel(ref_dims[i] * ne.d_out, states[i + 1]) for i in range(n - 1))
    return AdaptiveStrategy(DensityOperator(states[0]), ref_dims, adaptors, povm)


def classical_channel_exponent(pe: Union[ChannelEnsemble, Sequence[ClassicalChannel]]) -> Tuple[float, int]:
    """
    max_y C(ϱ_{[r],y}): esponente esatto per canali classici.

    Returns:
        Tuple: (esponente, ingresso y⋆ che realizza il massimo).
    """
    channels = list(pe.channels if isinstance(pe, ChannelEnsemble) else pe)
    if not all(isinstance(c, ClassicalChannel) for c in channels):
        raise ValidationError("classical_channel_exponent richiede canali classici")
    if len({(c.d_in, c.d_out) for c in channels}) != 1:
        raise DimensionMismatch("I canali non condividono gli alfabeti")
    values = [
        classical_chernoff([c.column(y) for c in channels]).value for y in range(channels[0].d_in)
    ]
    best = int(np.argmax(values))
    return values[best], best


def best_input_strategy(ne: ChannelEnsemble, n: int) -> Tuple[AdaptiveStrategy, float]:
    """
    Strategia non adattiva ottima per canali classici: ingresso y⋆ ripetuto
    e POVM di esclusione ottima sulle uscite prodotto.

    Returns:
        Tuple: (strategia, errore del programma lineare sulle uscite prodotto).
    """
    if not ne.is_classical():
        raise ValidationError("best_input_strategy richiede canali classici")
    _, y_star = classical_channel_exponent(ne)
    columns = product_distributions([c.column(y_star) for c in ne.channels], n)
    weighted = ne.priors[:, None] * columns
    choice = np.argmin(weighted, axis=0)
    elements = [np.diag((choice == x).astype(float)) for x in range(ne.r)]
    ket = np.zeros(ne.d_in)
    ket[y_star] = 1.0
    inputs = [density_from_ket(ket).entries] * n
    strategy = nonadaptive_strategy(ne, inputs, Povm(tuple(HermitianOperator(m) for m in elements)))
    return strategy, classical_exclusion_error(ne.priors, columns)


def channel_outputs_ensemble(ne: ChannelEnsemble, rho: ArrayLike, d_ref: int = 1) -> StateEnsemble:
    """Ensemble degli stati d'uscita (id_R ⊗ N_x)(ρ)."""
    return StateEnsemble(
        ne.priors,
        tuple(DensityOperator(c.apply(rho, d_ref).entries) for c in ne.quantum_channels()),
    )


# ---------------------------------------------------------------------------
# Ensemble di esempio a sette stati
# ---------------------------------------------------------------------------


def seven_state_ensemble() -> StateEnsemble:
    """
    Sette stati di qubit equiprobabili: tre copie di |0⟩⟨0| e quattro di
    |+⟩⟨+|. Non sono perfettamente antidistinguibili, ma l'intersezione
    dei supporti è banale.
    """
    zero = density_from_ket([1, 0])
    plus = density_from_ket(np.array([1, 1]) / math.sqrt(2))
    return StateEnsemble.uniform([zero] * 3 + [plus] * 4)


def seven_state_witness() -> Tuple[HermitianOperator, Dict[str, bool]]:
    """
    Testimone Λ̂⋆ = Σ_{x<3} |x⟩⟨x| ⊗ |1⟩⟨1| + Σ_{x≥3} |x⟩⟨x| ⊗ |−⟩⟨−|.

    Mostra che restringere τ agli stati nella caratterizzazione D_H dà +∞.

    Returns:
        Tuple: (Λ̂⋆, esiti dei controlli 0 ⪯ Λ̂⋆ ⪯ I, Tr[Λ̂⋆ ρ̂] = 0, Tr_X Λ̂⋆ ⪰ I).
    """
    e = seven_state_ensemble()
    one = density_from_ket([0, 1]).entries
    minus = density_from_ket(np.array([1, -1]) / math.sqrt(2)).entries
    blocks = [one] * 3 + [minus] * 4
    witness = np.zeros((14, 14), dtype=complex)
    for x, b in enumerate(blocks):
        witness[2 * x:2 * x + 2, 2 * x:2 * x + 2] = b
    w = np.linalg.eigvalsh(witness)
    marginal = partial_trace_array(witness, [7, 2], 0)
    checks = {
        "between_zero_and_identity": bool(w[0] >= -1e-12 and w[-1] <= 1 + 1e-12),
        "orthogonal_to_cq_state": bool(abs(np.trace(witness @ e.cq_operator().entries)) <= 1e-12),
        "marginal_dominates_identity": bool(np.linalg.eigvalsh(marginal - np.eye(2))[0] >= -1e-12),
    }
    return HermitianOperator(witness), checks


