"""
Raggi baricentrici di divergenza.

Calcola la divergenza di Chernoff classica multivariata, la Chernoff
log-euclidea C♭ (raggio sinistro di Umegaki), il raggio κ via SDP e la
valutazione generica del minimax sinistro nelle due modalità
(centro prima, pesi prima).

Le massimizzazioni sul simplesso usano ascesa del gradiente proiettato
con backtracking di Armijo, partendo dal baricentro e da punti interni
casuali riproducibili.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, optimize
from scipy.special import logsumexp, softmax

from config import Config
from conic_sdp import SdpBuilder, hermitian_basis, hermitian_coordinates, solve
from divergences import (
    geometric_renyi,
    max_extended,
    sandwiched_extended,
    umegaki,
)
from errors import DimensionMismatch, Unsupported, ValidationError
from operators import (
    ArrayLike,
    DensityOperator,
    HermitianOperator,
    StateEnsemble,
    as_array,
    hermitize,
    intersection_basis,
    log_on_support,
    support_basis,
)
from utils import make_rng, parallel_map

logger = logging.getLogger("pexc.radii")

ObjectiveWithGradient = Callable[[np.ndarray], Tuple[float, np.ndarray]]


class DivergenceKind(Enum):
    """Divergenze bivariate ammesse nel minimax sinistro."""
    UMEGAKI = "umegaki"
    SANDWICHED = "sandwiched"
    GEOMETRIC = "geometric"
    MAX = "max"


class RadiusMode(Enum):
    """Ordine di inf sul centro e sup sui pesi."""
    CENTER_FIRST = "center_first"
    WEIGHTS_FIRST = "weights_first"


class RadiusMethod(Enum):
    CLOSED_FORM = "closed_form"
    SIMPLEX_ASCENT = "simplex_ascent"
    SDP = "sdp"
    CENTER_SEARCH = "center_search"


@dataclass(frozen=True)
class SimplexPoint:
    """Pesi s_[r] ≥ 0 con somma 1 entro 1e-12."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or np.any(w < -1e-12) or abs(float(w.sum()) - 1) > 1e-12:
            raise ValidationError(f"Punto non appartenente al simplesso: {w}")
        w = np.clip(w, 0.0, None)
        w = w / w.sum()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def barycenter(cls, r: int) -> "SimplexPoint":
        return cls(np.full(r, 1.0 / r))


@dataclass
class RadiusResult:
    """
    Esito di un calcolo di raggio.

    Attributes:
        value: Reale esteso (math.inf ammesso).
        optimal_weights: Pesi ottimi (punto terminale dell'ascesa).
        optimal_center: Centro ottimo, se disponibile.
        method: Procedura usata.
        details: Parametri e diagnostica (α, ℓ, iterazioni, ...).
    """
    value: float
    optimal_weights: SimplexPoint
    optimal_center: Optional[HermitianOperator]
    method: RadiusMethod
    details: Dict[str, Any] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Ascesa sul simplesso
# ---------------------------------------------------------------------------


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Proiezione euclidea sul simplesso (algoritmo con ordinamento)."""
    n = v.size
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, n + 1)
    cond = u - css / ind > 0
    rho = ind[cond][-1]
    theta = css[cond][-1] / rho
    return np.maximum(v - theta, 0.0)


def _ascend(
    fn: ObjectiveWithGradient,
    start: np.ndarray,
    max_iters: int,
    grad_tol: float,
) -> Tuple[float, np.ndarray, int]:
    s = project_to_simplex(start)
    value, grad = fn(s)
    step = 1.0
    iterations = 0
    for iterations in range(1, max_iters + 1):
        if np.linalg.norm(project_to_simplex(s + grad) - s) <= grad_tol:
            break
        while True:
            candidate = project_to_simplex(s + step * grad)
            new_value, new_grad = fn(candidate)
            if new_value >= value + 1e-4 * float(grad @ (candidate - s)):
                break
            step /= 2
            if step < 1e-16:
                return value, s, iterations
        if np.linalg.norm(candidate - s) <= 1e-15:
            break
        s, value, grad = candidate, new_value, new_grad
        step = min(step * 2, 1e6)
    return value, s, iterations


def maximize_on_simplex(
    fn: ObjectiveWithGradient,
    r: int,
    seed: Optional[int] = None,
    restarts: Optional[int] = None,
    max_iters: Optional[int] = None,
    grad_tol: Optional[float] = None,
    extra_starts: Sequence[np.ndarray] = (),
) -> Tuple[float, np.ndarray]:
    """
    Massimizza una funzione concava sul simplesso.

    Args:
        fn: Restituisce (valore, gradiente) in un punto del simplesso.
        r: Dimensione del simplesso.
        seed: Seme per i punti di partenza casuali.
        restarts: Numero di partenze casuali oltre al baricentro.
        max_iters: Iterazioni massime per partenza.
        grad_tol: Soglia sulla norma del gradiente proiettato.
        extra_starts: Ulteriori punti iniziali.

    Returns:
        Tuple: (valore massimo, pesi ottimi).
    """
    restarts = Config.SIMPLEX_RESTARTS if restarts is None else restarts
    max_iters = max_iters or Config.SIMPLEX_MAX_ITERS
    grad_tol = Config.SIMPLEX_GRAD_TOL if grad_tol is None else grad_tol
    rng = make_rng(seed)
    starts = [np.full(r, 1.0 / r)] + list(extra_starts)
    starts += [rng.dirichlet(np.ones(r)) for _ in range(restarts)]

    results = parallel_map(lambda s0: _ascend(fn, s0, max_iters, grad_tol), starts)
    best_value, best_s, best_iters = max(results, key=lambda item: item[0])
    logger.debug(f"Ascesa sul simplesso: valore={best_value:.12g}, iterazioni={best_iters}")
    return best_value, best_s


# ---------------------------------------------------------------------------
# Chernoff classica e log-euclidea
# ---------------------------------------------------------------------------


def classical_chernoff(dists: Sequence[Sequence[float]], seed: Optional[int] = None) -> RadiusResult:
    """
    C(p_[r]) = sup_s −ln Σ_y Π_x p_{y|x}^{s_x}.

    La somma è ristretta all'intersezione dei supporti; valori sotto
    1e-15 sono zeri esatti. Intersezione vuota → +∞.

    Example:
        >>> classical_chernoff([[0.5, 0.5], [0.5, 0.5]]).value
        0.0
    """
    p = np.asarray(dists, dtype=float)
    if p.ndim != 2 or p.shape[0] < 1:
        raise DimensionMismatch(f"Distribuzioni di forma {p.shape}")
    if np.any(p < -Config.CLASSICAL_ZERO):
        raise ValidationError("Distribuzioni con valori negativi")
    r = p.shape[0]
    p = np.where(p < Config.CLASSICAL_ZERO, 0.0, p)
    common = np.all(p > 0, axis=0)
    if not np.any(common):
        return RadiusResult(math.inf, SimplexPoint.barycenter(r), None, RadiusMethod.CLOSED_FORM,
                            {"empty_support": True})
    logs = np.log(p[:, common])

    def objective(s: np.ndarray) -> Tuple[float, np.ndarray]:
        exponents = s @ logs
        weights = softmax(exponents)
        return -float(logsumexp(exponents)), -(logs @ weights)

    value, s = maximize_on_simplex(objective, r, seed)
    return RadiusResult(max(value, 0.0) if value > -1e-9 else value, SimplexPoint(s), None,
                        RadiusMethod.SIMPLEX_ASCENT)


def _compressed_logs(states: Sequence[ArrayLike], basis: np.ndarray) -> List[np.ndarray]:
    """Π (ln ρ_x) Π espressi nella base dell'intersezione."""
    return [hermitize(basis.conj().T @ log_on_support(s).entries @ basis) for s in states]


def log_euclidean_objective(logs: Sequence[np.ndarray]) -> ObjectiveWithGradient:
    """s ↦ (−ln Tr exp(Σ s_x L_x), gradiente esatto −Tr[τ_s L_x])."""

    def objective(s: np.ndarray) -> Tuple[float, np.ndarray]:
        h = sum(sx * lx for sx, lx in zip(s, logs))
        w, u = linalg.eigh(hermitize(h))
        lse = float(logsumexp(w))
        tau = (u * np.exp(w - lse)) @ u.conj().T
        grad = np.array([-float(np.real(np.sum(tau * lx.T))) for lx in logs])
        return -lse, grad

    return objective


def log_euclidean_center(states: Sequence[ArrayLike], weights: np.ndarray) -> Optional[DensityOperator]:
    """τ_s = exp(Σ s_x Π ln ρ_x Π)/Tr[...] immerso nello spazio intero."""
    basis = intersection_basis(states)
    if basis.shape[1] == 0:
        return None
    h = sum(sx * lx for sx, lx in zip(weights, _compressed_logs(states, basis)))
    w, u = linalg.eigh(hermitize(h))
    tau = (u * np.exp(w - logsumexp(w))) @ u.conj().T
    return DensityOperator(hermitize(basis @ tau @ basis.conj().T))


def log_euclidean_chernoff(states: Sequence[ArrayLike], seed: Optional[int] = None) -> RadiusResult:
    """
    C♭(ρ_[r]) = sup_s −ln Tr[Π exp(Σ_x s_x Π(ln ρ_x)Π)].

    Returns:
        RadiusResult: +∞ quando l'intersezione dei supporti è banale; il
        centro ottimo è exp(Σ s_x Π ln ρ_x Π)/Tr[...].
    """
    r = len(states)
    dims = {as_array(s).shape for s in states}
    if len(dims) != 1:
        raise DimensionMismatch("Stati di dimensioni diverse")
    basis = intersection_basis(states)
    if basis.shape[1] == 0:
        return RadiusResult(math.inf, SimplexPoint.barycenter(r), None, RadiusMethod.CLOSED_FORM,
                            {"intersection_rank": 0})
    logs = _compressed_logs(states, basis)
    value, s = maximize_on_simplex(log_euclidean_objective(logs), r, seed)
    center = log_euclidean_center(states, s)
    return RadiusResult(value, SimplexPoint(s), center, RadiusMethod.SIMPLEX_ASCENT,
                        {"intersection_rank": int(basis.shape[1])})


def quantum_chernoff(rho: ArrayLike, sigma: ArrayLike) -> RadiusResult:
    """
    −ln min_{s∈[0,1]} Tr[ρ^s σ^{1−s}], esponente esatto del caso binario.

    Le potenze sono prese sui supporti (ρ^0 è il proiettore sul supporto).
    """
    w_r, u_r = linalg.eigh(hermitize(as_array(rho)))
    w_s, u_s = linalg.eigh(hermitize(as_array(sigma)))
    overlaps = np.abs(u_r.conj().T @ u_s) ** 2
    keep_r = w_r > Config.RANK_ABS_FLOOR * 100
    keep_s = w_s > Config.RANK_ABS_FLOOR * 100

    def quasi(s: float) -> float:
        a = np.where(keep_r, np.power(np.clip(w_r, 1e-300, None), s), 0.0)
        b = np.where(keep_s, np.power(np.clip(w_s, 1e-300, None), 1 - s), 0.0)
        return float(a @ overlaps @ b)

    if quasi(0.5) <= Config.ZERO_PROB:
        return RadiusResult(math.inf, SimplexPoint(np.array([0.5, 0.5])), None, RadiusMethod.CLOSED_FORM)
    res = optimize.minimize_scalar(quasi, bounds=(0.0, 1.0), method="bounded",
                                   options={"xatol": 1e-10})
    s = float(np.clip(res.x, 0.0, 1.0))
    return RadiusResult(-math.log(quasi(s)), SimplexPoint(np.array([s, 1 - s])), None,
                        RadiusMethod.SIMPLEX_ASCENT)


# ---------------------------------------------------------------------------
# Raggio κ
# ---------------------------------------------------------------------------


def _kappa_solution(states: Sequence[ArrayLike]) -> Tuple[float, Optional[np.ndarray], np.ndarray]:
    """
    Risolve sup Tr γ con −ρ_x ⪯ γ ⪯ ρ_x.

    γ vive nell'intersezione dei supporti; ogni vincolo è compresso sul
    supporto di ρ_x. Restituisce (κ, γ ottimo, pesi duali normalizzati).
    """
    r = len(states)
    basis = intersection_basis(states)
    k = basis.shape[1]
    if k == 0:
        return 0.0, None, np.full(r, 1.0 / r)
    builder = SdpBuilder()
    g = builder.hermitian(k, "gamma")
    compressed = []
    for x, state in enumerate(states):
        w_x = support_basis(state)
        rho_x = hermitize(w_x.conj().T @ as_array(state) @ w_x)
        lift = w_x.conj().T @ basis
        compressed.append(rho_x)
        builder.add_lmi([(g, lambda m, lift=lift: -hermitize(lift @ m @ lift.conj().T))], rho_x, f"rho_{x}-gamma")
        builder.add_lmi([(g, lambda m, lift=lift: hermitize(lift @ m @ lift.conj().T))], rho_x, f"rho_{x}+gamma")
    builder.add_objective(g, np.eye(k))
    solution = solve(builder.build(maximize=True)).require_optimal("kappa")
    kappa = float(np.clip(solution.primal_value, 0.0, 1.0))
    gamma = basis @ g.value(solution.x) @ basis.conj().T
    weights = np.array([
        float(np.real(np.trace(compressed[x] @ (solution.block_duals[2 * x] + solution.block_duals[2 * x + 1]))))
        for x in range(r)
    ])
    weights = np.clip(weights, 0.0, None)
    weights = weights / weights.sum() if weights.sum() > 0 else np.full(r, 1.0 / r)
    return kappa, hermitize(gamma), weights


def kappa_sdp(states: Sequence[ArrayLike]) -> Tuple[float, float]:
    """
    κ = sup Tr γ con −ρ_x ⪯ γ ⪯ ρ_x per ogni x.

    Returns:
        Tuple: (κ ∈ [0, 1], −ln κ, +∞ quando κ ≤ 1e-12).
    """
    if len(states) < 2:
        raise ValidationError("Il raggio κ richiede almeno due stati")
    kappa, _, _ = _kappa_solution(states)
    neg_log = math.inf if kappa <= Config.ZERO_PROB else -math.log(kappa)
    return kappa, neg_log


def dmax_prior_bound(ensemble: StateEnsemble) -> float:
    """−ln P_err ≤ −ln κ(ρ_[r]) + ln(1/p_min)."""
    _, neg_log = kappa_sdp(ensemble.states)
    return neg_log - math.log(ensemble.p_min)


# ---------------------------------------------------------------------------
# Minimax sinistro generico
# ---------------------------------------------------------------------------


def _divergence_fn(kind: DivergenceKind, alpha: Optional[float]) -> Callable[[ArrayLike, ArrayLike], float]:
    if kind is DivergenceKind.UMEGAKI:
        return lambda t, s: umegaki(t, s).value
    if alpha is None:
        raise ValidationError(f"La divergenza {kind.value} richiede alpha")
    if kind is DivergenceKind.SANDWICHED:
        return lambda t, s: sandwiched_extended(t, s, alpha).value
    if kind is DivergenceKind.GEOMETRIC:
        return lambda t, s: geometric_renyi(t, s, alpha).value
    raise Unsupported(f"Nessun passo interno per {kind.value}")


def _state_from_coords(theta: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """τ = V exp(H(θ)) V† / Tr, con H hermitiano k×k di coordinate θ."""
    k = basis.shape[1]
    h = np.tensordot(theta, hermitian_basis(k), axes=1)
    w, u = linalg.eigh(hermitize(h))
    tau = (u * np.exp(w - logsumexp(w))) @ u.conj().T
    return hermitize(basis @ tau @ basis.conj().T)


def _coords_from_state(tau: np.ndarray, basis: np.ndarray) -> np.ndarray:
    compressed = hermitize(basis.conj().T @ tau @ basis)
    return hermitian_coordinates(log_on_support(compressed).entries)


def _center_first_smooth(
    states: Sequence[ArrayLike],
    divergence: Callable[[ArrayLike, ArrayLike], float],
    basis: np.ndarray,
    start: np.ndarray,
) -> Tuple[float, np.ndarray]:
    """inf_τ max_x D(τ‖ρ_x) in forma epigrafica (SLSQP)."""
    theta0 = _coords_from_state(start, basis)

    def values(theta: np.ndarray) -> np.ndarray:
        tau = _state_from_coords(theta, basis)
        return np.array([divergence(tau, s) for s in states])

    t0 = float(np.max(values(theta0)))
    z0 = np.concatenate([theta0, [t0]])
    constraints = [{"type": "ineq", "fun": lambda z: z[-1] - values(z[:-1])}]
    res = optimize.minimize(lambda z: z[-1], z0, method="SLSQP", constraints=constraints,
                            options={"ftol": 1e-12, "maxiter": 500})
    theta = res.x[:-1] if np.all(np.isfinite(res.x)) else theta0
    final = float(np.max(values(theta)))
    if final > t0:
        theta, final = theta0, t0
    logger.debug(f"Ricerca del centro: {res.message} (valore {final:.10g})")
    return final, _state_from_coords(theta, basis)


def _weights_first_smooth(
    states: Sequence[ArrayLike],
    divergence: Callable[[ArrayLike, ArrayLike], float],
    basis: np.ndarray,
    start: np.ndarray,
    seed: Optional[int],
) -> Tuple[float, np.ndarray, np.ndarray]:
    """sup_s inf_τ Σ s_x D(τ‖ρ_x) con gradiente di Danskin."""
    warm = {"theta": _coords_from_state(start, basis)}

    def objective(s: np.ndarray) -> Tuple[float, np.ndarray]:
        def inner(theta: np.ndarray) -> float:
            tau = _state_from_coords(theta, basis)
            return float(sum(sx * divergence(tau, st) for sx, st in zip(s, states) if sx > 0))

        res = optimize.minimize(inner, warm["theta"], method="L-BFGS-B",
                                options={"ftol": 1e-14, "gtol": 1e-10, "maxiter": 500})
        warm["theta"] = res.x
        tau = _state_from_coords(res.x, basis)
        return float(res.fun), np.array([divergence(tau, st) for st in states])

    value, s = maximize_on_simplex(objective, len(states), seed, restarts=0, max_iters=200, grad_tol=1e-7)
    return value, s, _state_from_coords(warm["theta"], basis)


def _max_weights_first(states: Sequence[ArrayLike]) -> Tuple[float, np.ndarray, Optional[np.ndarray], Dict[str, Any]]:
    """
    sup_s inf_{τ∈aff} Σ_x s_x D_max(τ‖ρ_x), pari a −ln κ.

    Il valore viene dall'SDP κ; i pesi sono i moltiplicatori duali
    normalizzati e τ = γ⋆/κ è il centro che realizza l'inf. Nei dettagli
    il valore della somma pesata in τ, che non supera −ln κ.
    """
    kappa, gamma, weights = _kappa_solution(states)
    if gamma is None or kappa <= Config.ZERO_PROB:
        return math.inf, weights, None, {"kappa": kappa}
    tau = hermitize(gamma / kappa)
    value = -math.log(kappa)
    at_center = float(sum(s * max_extended(tau, st).value for s, st in zip(weights, states) if s > 0))
    logger.debug(f"D_max pesi prima: κ={kappa:.10g}, valore={value:.10g}, in τ={at_center:.10g}")
    return value, weights, tau, {"kappa": kappa, "weighted_at_center": at_center}


def left_radius_minimax(
    divergence: DivergenceKind,
    states: Sequence[ArrayLike],
    mode: RadiusMode,
    alpha: Optional[float] = None,
    seed: Optional[int] = None,
) -> RadiusResult:
    """
    Raggio sinistro di una divergenza bivariata.

    CENTER_FIRST valuta inf_τ max_x D(τ‖ρ_x); WEIGHTS_FIRST valuta
    sup_s inf_τ Σ_x s_x D(τ‖ρ_x). Per D_max il centro varia
    nell'inviluppo affine degli stati.

    Args:
        divergence: Divergenza di base.
        states: Tupla di stati della stessa dimensione.
        mode: Ordine di ottimizzazione.
        alpha: Ordine per SANDWICHED (α > 1) e GEOMETRIC (α ∈ (1, 2]).
        seed: Seme per le partenze casuali.

    Raises:
        Unsupported: Per divergenze senza passo interno implementato.
    """
    r = len(states)
    if not isinstance(divergence, DivergenceKind):
        raise Unsupported(f"Divergenza non supportata: {divergence}")
    if divergence is DivergenceKind.SANDWICHED and (alpha is None or alpha <= 1):
        raise ValidationError("SANDWICHED richiede alpha > 1")
    if divergence is DivergenceKind.GEOMETRIC and (alpha is None or not 1 < alpha <= 2):
        raise ValidationError("GEOMETRIC richiede alpha in (1, 2]")
    params: Dict[str, Any] = {"divergence": divergence.value, "mode": mode.value, "alpha": alpha}

    basis = intersection_basis(states)
    if basis.shape[1] == 0:
        return RadiusResult(math.inf, SimplexPoint.barycenter(r), None, RadiusMethod.CLOSED_FORM, params)

    if divergence is DivergenceKind.MAX:
        if mode is RadiusMode.CENTER_FIRST:
            kappa, gamma, weights = _kappa_solution(states)
            value = math.inf if kappa <= Config.ZERO_PROB else -math.log(kappa)
            center = HermitianOperator(gamma / kappa) if gamma is not None and kappa > Config.ZERO_PROB else None
            return RadiusResult(value, SimplexPoint(weights), center, RadiusMethod.SDP, params)
        value, weights, tau, extra = _max_weights_first(states)
        params.update(extra)
        center = HermitianOperator(tau) if tau is not None else None
        return RadiusResult(value, SimplexPoint(weights), center, RadiusMethod.SDP, params)

    if divergence is DivergenceKind.UMEGAKI and mode is RadiusMode.WEIGHTS_FIRST:
        result = log_euclidean_chernoff(states, seed)
        result.method = RadiusMethod.CLOSED_FORM
        result.details.update(params)
        return result

    if (
        divergence is DivergenceKind.GEOMETRIC
        and mode is RadiusMode.CENTER_FIRST
        and alpha is not None
        and _dyadic_level(alpha) is not None
    ):
        from channels import geometric_channel_radius_sdp, replacer_channel

        ell = _dyadic_level(alpha)
        channels = [replacer_channel(s, 1) for s in states]
        result = geometric_channel_radius_sdp(channels, ell)
        result.details.update(params)
        return result

    fn = _divergence_fn(divergence, alpha)
    start_weights = log_euclidean_chernoff(states, seed).optimal_weights.weights
    start = log_euclidean_center(states, start_weights)
    start_entries = start.entries if start is not None else np.eye(as_array(states[0]).shape[0])
    if mode is RadiusMode.CENTER_FIRST:
        value, tau = _center_first_smooth(states, fn, basis, start_entries)
        return RadiusResult(value, SimplexPoint.barycenter(r), HermitianOperator(tau),
                            RadiusMethod.CENTER_SEARCH, params)
    value, s, tau = _weights_first_smooth(states, fn, basis, start_entries, seed)
    return RadiusResult(value, SimplexPoint(s), HermitianOperator(tau), RadiusMethod.SIMPLEX_ASCENT, params)


def _dyadic_level(alpha: float) -> Optional[int]:
    """ℓ tale che α = 1 + 2^{−ℓ}, se esiste con ℓ ≤ ELL_MAX."""
    for ell in range(0, Config.ELL_MAX + 1):
        if abs(alpha - (1 + 2.0 ** -ell)) <= 1e-12:
            return ell
    return None
