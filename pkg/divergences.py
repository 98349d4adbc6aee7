"""
Divergenze bivariate tra operatori.

Include Umegaki, sandwiched di Rényi estesa (primo argomento hermitiano
qualunque), geometrica di Rényi, Belavkin–Staszewski, max-divergenza
estesa con la sua variante D′_max, divergenza di test d'ipotesi estesa
(via SDP), Petz–Rényi e la lautum information di Petz in forma chiusa.

Tutte le inverse, i logaritmi e le potenze negative sono presi sul
supporto. Quando il supporto del primo argomento non è contenuto in quello
del secondo il valore è +∞ esplicito, con ``support_violation`` attivo.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from config import Config
from conic_sdp import SdpBuilder, solve
from errors import DimensionMismatch, NotApplicable, ValidationError, ZeroOperator
from operators import (
    ArrayLike,
    eigenvalue_threshold,
    DensityOperator,
    as_array,
    hermitize,
    log_on_support,
    partial_trace_array,
    power_on_support,
    support_basis,
    support_contained,
)

logger = logging.getLogger("pexc.divergences")


@dataclass(frozen=True)
class DivergenceValue:
    """
    Reale esteso restituito da ogni divergenza.

    Attributes:
        value: Valore finito oppure math.inf.
        support_violation: True nel ramo "altrimenti +∞".
    """

    value: float
    support_violation: bool = False

    def __post_init__(self) -> None:
        if self.support_violation and not math.isinf(self.value):
            raise ValueError("Una violazione di supporto implica valore +∞")

    @classmethod
    def infinite(cls, support_violation: bool = True) -> "DivergenceValue":
        return cls(math.inf, support_violation)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    def __float__(self) -> float:
        return self.value


def _require_alpha(alpha: float, low: float, high: float, name: str) -> None:
    if not (low < alpha <= high) or alpha == 1:
        raise ValidationError(f"{name}: alpha={alpha} fuori dall'intervallo ammesso")


def _compressed_pair(rho: ArrayLike, sigma: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """Restringe entrambi gli operatori al supporto di sigma."""
    v = support_basis(sigma)
    s = hermitize(v.conj().T @ as_array(sigma) @ v)
    r = hermitize(v.conj().T @ as_array(rho) @ v)
    return r, s


def umegaki(rho: ArrayLike, sigma: ArrayLike) -> DivergenceValue:
    """
    D(ρ‖σ) = Tr[ρ(ln ρ − ln σ)], +∞ se supp ρ ⊄ supp σ.

    Example:
        >>> umegaki(np.diag([0.5, 0.5]), np.diag([0.5, 0.5])).value
        0.0
    """
    if not support_contained(rho, sigma):
        return DivergenceValue.infinite()
    r = as_array(rho)
    value = np.trace(r @ log_on_support(rho).entries) - np.trace(r @ log_on_support(sigma).entries)
    return DivergenceValue(float(np.real(value)))


def sandwiched_quasi(gamma: ArrayLike, sigma: ArrayLike, alpha: float) -> float:
    """Q̃_α(γ‖σ) = ‖σ^{(1−α)/2α} γ σ^{(1−α)/2α}‖_α^α, calcolata sui supporti."""
    s = power_on_support(sigma, (1 - alpha) / (2 * alpha)).entries
    w = linalg.eigvalsh(hermitize(s @ as_array(gamma) @ s))
    return float(np.sum(np.abs(w) ** alpha))


def sandwiched_quasi_direct_sum(
    gammas: Sequence[ArrayLike],
    sigmas: Sequence[ArrayLike],
    p: Sequence[float],
    q: Sequence[float],
    alpha: float,
) -> float:
    """Q̃_α di somme dirette: Σ_x p_x^α q_x^{1−α} Q̃_α(γ_x‖σ_x)."""
    return float(sum(
        (px ** alpha) * (qx ** (1 - alpha)) * sandwiched_quasi(g, s, alpha)
        for g, s, px, qx in zip(gammas, sigmas, p, q)
    ))


def sandwiched_extended(gamma: ArrayLike, sigma: ArrayLike, alpha: float) -> DivergenceValue:
    """
    Divergenza sandwiched di Rényi estesa, α > 1.

    Args:
        gamma: Hermitiano non nullo (anche non PSD).
        sigma: PSD.
        alpha: Ordine > 1.

    Raises:
        ZeroOperator: Se gamma = 0.
    """
    if alpha <= 1:
        raise ValidationError(f"La sandwiched estesa richiede alpha > 1 (trovato {alpha})")
    g = as_array(gamma)
    if np.max(np.abs(g)) <= Config.RANK_ABS_FLOOR:
        raise ZeroOperator("Il primo argomento della divergenza è nullo")
    if not support_contained(gamma, sigma):
        return DivergenceValue.infinite()
    quasi = sandwiched_quasi(gamma, sigma, alpha)
    if quasi <= 0:
        return DivergenceValue.infinite()
    return DivergenceValue(math.log(quasi) / (alpha - 1))


def geometric_renyi(rho: ArrayLike, sigma: ArrayLike, alpha: float) -> DivergenceValue:
    """
    Ĝ_α(ρ‖σ) = (1/(α−1)) ln Tr[σ(σ^{−1/2} ρ σ^{−1/2})^α], α ∈ (0,1)∪(1,2].

    Per α < 1 la formula è valutata sul supporto di σ: ρ viene compresso
    su supp σ e la parte fuori supporto è ignorata, senza segnalazione.
    """
    _require_alpha(alpha, 0.0, 2.0, "geometric_renyi")
    if alpha > 1 and not support_contained(rho, sigma):
        return DivergenceValue.infinite()
    r, s = _compressed_pair(rho, sigma)
    if s.size == 0:
        return DivergenceValue.infinite(support_violation=alpha > 1)
    s_half = power_on_support(s, 0.5).entries
    s_inv_half = power_on_support(s, -0.5).entries
    inner = power_on_support(hermitize(s_inv_half @ r @ s_inv_half), alpha).entries
    quasi = float(np.real(np.trace(s_half @ inner @ s_half)))
    if quasi <= 0:
        return DivergenceValue.infinite(support_violation=False)
    return DivergenceValue(math.log(quasi) / (alpha - 1))


def belavkin_staszewski(rho: ArrayLike, sigma: ArrayLike) -> DivergenceValue:
    """Ĝ(ρ‖σ) = Tr[ρ ln(ρ^{1/2} σ^{−1} ρ^{1/2})], +∞ se supp ρ ⊄ supp σ."""
    if not support_contained(rho, sigma):
        return DivergenceValue.infinite()
    r, s = _compressed_pair(rho, sigma)
    r_half = power_on_support(r, 0.5).entries
    s_inv = power_on_support(s, -1.0).entries
    inner = log_on_support(hermitize(r_half @ s_inv @ r_half)).entries
    return DivergenceValue(float(np.real(np.trace(r @ inner))))


def max_extended(gamma: ArrayLike, sigma: ArrayLike) -> DivergenceValue:
    """
    D_max(γ‖σ) = ln ‖σ^{−1/2} γ σ^{−1/2}‖_∞ sui supporti.

    Raises:
        ZeroOperator: Se gamma = 0.
    """
    if not support_contained(gamma, sigma):
        return DivergenceValue.infinite()
    g, s = _compressed_pair(gamma, sigma)
    s_inv_half = power_on_support(s, -0.5).entries
    w = linalg.eigvalsh(hermitize(s_inv_half @ g @ s_inv_half))
    norm = float(np.max(np.abs(w)))
    if norm <= Config.RANK_ABS_FLOOR:
        raise ZeroOperator("D_max con primo argomento nullo")
    return DivergenceValue(math.log(norm))


def dmax_lower(gamma: ArrayLike, sigma: ArrayLike) -> DivergenceValue:
    """
    D′_max(γ‖σ) = inf{ln λ : γ ⪯ λσ}.

    La parte di γ fuori da supp σ deve essere ⪯ 0; il suo complemento di
    Schur si somma al blocco sul supporto. Per γ con supporto in supp σ
    coincide con il massimo autovalore di σ^{−1/2}γσ^{−1/2}.

    Raises:
        NotApplicable: Se il valore ottimo di λ non è positivo.
    """
    g = as_array(gamma)
    w, u = linalg.eigh(hermitize(as_array(sigma)))
    mask = np.abs(w) > eigenvalue_threshold(w)
    v, outside = u[:, mask], u[:, ~mask]
    if v.shape[1] == 0:
        return DivergenceValue.infinite()
    block = hermitize(v.conj().T @ g @ v)
    if outside.shape[1]:
        tol = Config.SUPPORT_TOL * max(1.0, float(np.max(np.abs(g))))
        g_oo = hermitize(outside.conj().T @ g @ outside)
        g_so = v.conj().T @ g @ outside
        if linalg.eigvalsh(g_oo)[-1] > tol:
            return DivergenceValue.infinite()
        neg = -g_oo
        range_basis = support_basis(neg)
        residual = g_so - g_so @ range_basis @ range_basis.conj().T
        if residual.size and np.max(np.abs(residual)) > tol:
            return DivergenceValue.infinite()
        block = hermitize(block + g_so @ power_on_support(neg, -1.0).entries @ g_so.conj().T)
    s_inv_half = np.diag(w[mask] ** -0.5)
    top = float(linalg.eigvalsh(hermitize(s_inv_half @ block @ s_inv_half))[-1])
    if top <= 0:
        raise NotApplicable("D′_max non definita: γ ⪯ 0 relativamente a σ")
    return DivergenceValue(math.log(top))


def hypothesis_testing_sdp(tau: ArrayLike, sigma: ArrayLike, eps: float) -> Tuple[float, Optional[np.ndarray]]:
    """
    min Tr[Λσ] con 0 ⪯ Λ ⪯ I e Tr[Λτ] ≥ 1 − ε.

    Returns:
        Tuple: (valore ottimo, Λ ottimo).
    """
    t, s = as_array(tau), as_array(sigma)
    if t.shape != s.shape:
        raise DimensionMismatch(f"Dimensioni diverse: {t.shape} e {s.shape}")
    dim = t.shape[0]
    builder = SdpBuilder()
    lam = builder.hermitian(dim, "Lambda")
    builder.add_lmi([(lam, lambda m: m)], np.zeros((dim, dim)), "Lambda>=0")
    builder.add_lmi([(lam, lambda m: -m)], np.eye(dim), "Lambda<=I")
    builder.add_lmi(
        [(lam, lambda m: np.array([[np.real(np.trace(m @ t))]]))],
        np.array([[-(1.0 - eps)]]),
        "Tr[Lambda tau]>=1-eps",
    )
    builder.add_objective(lam, s)
    solution = solve(builder.build(maximize=False)).require_optimal("test d'ipotesi")
    return max(solution.primal_value, 0.0), lam.value(solution.x)


def hypothesis_testing_extended(tau: ArrayLike, sigma: ArrayLike, eps: float) -> DivergenceValue:
    """
    D_H^ε(τ‖σ) = −ln min{Tr[Λσ] : 0 ⪯ Λ ⪯ I, Tr[Λτ] ≥ 1−ε}.

    Args:
        tau: Hermitiano a traccia unitaria (anche non PSD).
        sigma: PSD.
        eps: In [0, 1].

    Returns:
        DivergenceValue: +∞ se l'ottimo è ≤ 1e-12.
    """
    if not 0 <= eps <= 1:
        raise ValidationError(f"eps deve stare in [0, 1] (trovato {eps})")
    if abs(float(np.real(np.trace(as_array(tau)))) - 1) > Config.TRACE_TOL:
        raise ValidationError("τ deve avere traccia unitaria")
    if eps >= 1:
        return DivergenceValue.infinite(support_violation=False)
    optimum, _ = hypothesis_testing_sdp(tau, sigma, eps)
    if optimum <= Config.ZERO_PROB:
        return DivergenceValue.infinite(support_violation=False)
    return DivergenceValue(-math.log(optimum))


def petz_quasi(rho: ArrayLike, sigma: ArrayLike, alpha: float) -> float:
    """Tr[ρ^α σ^{1−α}] con potenze sui supporti."""
    a = power_on_support(rho, alpha).entries
    b = power_on_support(sigma, 1 - alpha).entries
    return float(np.real(np.trace(a @ b)))


def petz_renyi(rho: ArrayLike, sigma: ArrayLike, alpha: float) -> DivergenceValue:
    """
    D_α(ρ‖σ) = (1/(α−1)) ln Tr[ρ^α σ^{1−α}], α ∈ (0,1)∪(1,∞).

    Per α > 1 il contenimento dei supporti è richiesto.
    """
    if alpha <= 0 or alpha == 1:
        raise ValidationError(f"petz_renyi: alpha={alpha} non ammesso")
    if alpha > 1 and not support_contained(rho, sigma):
        return DivergenceValue.infinite()
    quasi = petz_quasi(rho, sigma, alpha)
    if quasi <= 0:
        return DivergenceValue.infinite(support_violation=False)
    return DivergenceValue(math.log(quasi) / (alpha - 1))


def upsilon(rho: ArrayLike, sigma: ArrayLike) -> float:
    """
    Υ(ρ‖σ) = 1 + exp(−½ D_{1/2}(ρ‖σ)) + exp(½ D_{3/2}(ρ‖σ)), sempre ≥ 3.

    Controlla il termine del secondo ordine: per α ∈ (1, 1 + ln3/(4 ln Υ)]
    vale D_α ≤ D + 4(α−1)(ln Υ)².
    """
    low = petz_renyi(rho, sigma, 0.5).value
    high = petz_renyi(rho, sigma, 1.5).value
    if math.isinf(high):
        return math.inf
    return 1.0 + math.exp(-0.5 * low) + math.exp(0.5 * high)


def _lautum_projector_basis(rho_ab: np.ndarray, sigma_a: np.ndarray, dims: Tuple[int, int]) -> np.ndarray:
    """
    Base di {ψ : φ⊗ψ ∈ supp ρ_AB per ogni φ ∈ supp σ_A}.
    """
    d_a, d_b = dims
    p = support_basis(rho_ab)
    complement = np.eye(d_a * d_b) - p @ p.conj().T
    phis = support_basis(sigma_a)
    rows = [complement @ np.kron(phis[:, [j]], np.eye(d_b)) for j in range(phis.shape[1])]
    stacked = np.vstack(rows) if rows else np.zeros((1, d_b))
    return linalg.null_space(stacked, rcond=Config.INTERSECTION_TOL)


def _lautum_operator(rho_ab: np.ndarray, sigma_a: np.ndarray, alpha: float, dims: Tuple[int, int]) -> np.ndarray:
    """Tr_A[σ_A^α ρ_AB^{1−α}]."""
    d_b = dims[1]
    left = np.kron(power_on_support(sigma_a, alpha).entries, np.eye(d_b))
    right = power_on_support(rho_ab, 1 - alpha).entries
    return hermitize(partial_trace_array(left @ right, list(dims), 0))


def petz_lautum(
    rho_ab: ArrayLike,
    sigma_a: ArrayLike,
    alpha: float,
    dims: Tuple[int, int],
) -> Tuple[DivergenceValue, Optional[DensityOperator]]:
    """
    Lautum information di Petz: min_τ D_α(σ_A ⊗ τ_B ‖ ρ_AB) in forma chiusa.

    Il valore è −ln Tr[(Π_B Tr_A[σ^α ρ^{1−α}] Π_B)^{1/(1−α)}], con Π_B = I per
    α < 1; il minimizzatore è l'operatore normalizzato.

    Args:
        rho_ab: PSD bipartito su A⊗B.
        sigma_a: Stato su A.
        alpha: Ordine in (0,1)∪(1,∞).
        dims: (d_A, d_B).

    Returns:
        Tuple: (valore, minimizzatore o None se Π_B = 0).
    """
    d_a, d_b = dims
    r, s = as_array(rho_ab), as_array(sigma_a)
    if r.shape != (d_a * d_b, d_a * d_b) or s.shape != (d_a, d_a):
        raise DimensionMismatch(f"Dimensioni {dims} incompatibili con {r.shape} e {s.shape}")
    if alpha <= 0 or alpha == 1:
        raise ValidationError(f"petz_lautum: alpha={alpha} non ammesso")
    x = _lautum_operator(r, s, alpha, dims)
    if alpha > 1:
        basis = _lautum_projector_basis(r, s, dims)
        if basis.shape[1] == 0:
            logger.debug("Proiettore della lautum nullo: valore +∞")
            return DivergenceValue.infinite(), None
        y = hermitize(basis.conj().T @ x @ basis)
        powered = basis @ power_on_support(y, 1 / (1 - alpha)).entries @ basis.conj().T
    else:
        powered = power_on_support(x, 1 / (1 - alpha)).entries
    total = float(np.real(np.trace(powered)))
    if total <= 0:
        return DivergenceValue.infinite(support_violation=False), None
    return DivergenceValue(-math.log(total)), DensityOperator(hermitize(powered / total))


def petz_lautum_regularized(
    rho_ab: ArrayLike,
    sigma_a: ArrayLike,
    alpha: float,
    dims: Tuple[int, int],
    eps: float,
) -> float:
    """−ln Tr[(Tr_A[σ_A^α (ρ_AB + εI)^{1−α}])^{1/(1−α)}]."""
    r = as_array(rho_ab)
    x = _lautum_operator(r + eps * np.eye(r.shape[0]), as_array(sigma_a), alpha, dims)
    return -math.log(float(np.real(np.trace(power_on_support(x, 1 / (1 - alpha)).entries))))
