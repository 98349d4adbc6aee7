"""
Scala dei limiti inversi sull'esponente d'errore.

Raccoglie in un BoundReport tutti i limiti applicabili a un ensemble di
stati o di canali: C♭, −ln κ, il limite di Petz in forma chiusa, i limiti
non asintotici corretti al secondo ordine, il raggio di Belavkin–Staszewski
dei canali e l'esponente empirico, insieme ai confronti d'ordine tra loro.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from channels import ChannelEnsemble, belavkin_channel_radius
from config import Config
from divergences import petz_lautum, petz_lautum_regularized
from errors import NumericalFailure, ValidationError
from exclusion_tasks import (
    ExponentEstimate,
    classical_channel_exponent,
    classical_exclusion_error,
    empirical_exponent,
    exponent_from_errors,
    product_distributions,
    state_exclusion_error,
)
from operators import (
    ArrayLike,
    StateEnsemble,
    intersection_basis,
    partial_trace_array,
    power_on_support,
    support_basis,
)
from radii import (
    classical_chernoff,
    dmax_prior_bound,
    kappa_sdp,
    log_euclidean_chernoff,
    quantum_chernoff,
)
from utils import decode_extended, encode_extended, parallel_map

logger = logging.getLogger("pexc.bounds")

ORDERING_TOL = 1e-6
LN3 = math.log(3.0)


# ---------------------------------------------------------------------------
# Limiti in forma chiusa
# ---------------------------------------------------------------------------


def closed_form_petz_bound(e: StateEnsemble, alpha: float) -> float:
    """
    −ln Tr[(Σ_x Π (p_x ρ_x)^{1−α} Π)^{1/(1−α)}] ≥ −ln P_err(E).

    Π proietta sull'intersezione dei supporti. Si ottiene come lautum
    information di Petz dello stato cq rispetto a π_X, più (α/(α−1)) ln r.

    Example:
        >>> e = StateEnsemble.uniform([maximally_mixed(2)] * 3)
        >>> round(closed_form_petz_bound(e, 2.0), 9) == round(2 * math.log(3), 9)
        True
    """
    if alpha <= 1:
        raise ValidationError(f"Il limite di Petz richiede alpha > 1 (trovato {alpha})")
    pi_x = np.eye(e.r) / e.r
    value, _ = petz_lautum(e.cq_operator(), pi_x, alpha, (e.r, e.dim))
    return value.value + alpha / (alpha - 1) * math.log(e.r)


def closed_form_petz_bound_regularized(e: StateEnsemble, alpha: float, eps: float) -> float:
    """−ln Tr[(Σ_x (p_x ρ_x + εI)^{1−α})^{1/(1−α)}], che tende al limite di Petz per ε ↘ 0."""
    if alpha <= 1 or eps <= 0:
        raise ValidationError(f"Parametri non validi: alpha={alpha}, eps={eps}")
    pi_x = np.eye(e.r) / e.r
    value = petz_lautum_regularized(e.cq_operator(), pi_x, alpha, (e.r, e.dim), eps)
    return value + alpha / (alpha - 1) * math.log(e.r)


def upsilon_max(states: Sequence[ArrayLike]) -> Tuple[float, bool]:
    """
    Υ_max = 1 + max_x (Tr[ρ_x^{1/2}] + Tr[ρ_x^{−1/2}]), con la radice
    inversa presa sul supporto.

    Returns:
        Tuple: (Υ_max, True se i supporti differiscono tra gli stati).
    """
    best = 0.0
    for state in states:
        half = power_on_support(state, 0.5).trace
        inv_half = power_on_support(state, -0.5).trace
        best = max(best, half + inv_half)
    ranks = {support_basis(s).shape[1] for s in states}
    common = intersection_basis(states).shape[1]
    restricted = len(ranks) != 1 or common != ranks.pop()
    return 1.0 + best, restricted


def _second_order(log_upsilon: float, n: int, p_min: float) -> float:
    return log_upsilon * (LN3 + (5.0 / LN3) * math.log(1.0 / p_min)) / math.sqrt(n)


def corrected_cflat_bound(e: StateEnsemble, n: int, cflat: Optional[float] = None) -> float:
    """
    C♭ + (1/√n)(ln Υ_max)(ln 3 + (5/ln 3) ln(1/p_min)) ≥ −(1/n) ln P_err(E^n).
    """
    if n < 1:
        raise ValidationError(f"n deve essere positivo (trovato {n})")
    cflat = log_euclidean_chernoff(e.states).value if cflat is None else cflat
    ups, _ = upsilon_max(e.states)
    return cflat + _second_order(math.log(ups), n, e.p_min)


def corrected_cflat_bound_at_alpha(
    e: StateEnsemble, n: int, alpha: float, cflat: Optional[float] = None
) -> float:
    """
    C♭ + 4(α−1)(ln Υ_max)² + α/(n(α−1)) ln(1/p_min), per
    α ∈ (1, 1 + ln 3/(4 ln Υ_max)].
    """
    ups, _ = upsilon_max(e.states)
    log_ups = math.log(ups)
    if not 1 < alpha <= 1 + LN3 / (4 * log_ups):
        raise ValidationError(f"alpha={alpha} fuori da (1, {1 + LN3 / (4 * log_ups):.6g}]")
    cflat = log_euclidean_chernoff(e.states).value if cflat is None else cflat
    return (
        cflat
        + 4 * (alpha - 1) * log_ups ** 2
        + alpha / (n * (alpha - 1)) * math.log(1.0 / e.p_min)
    )


def optimal_alpha(e: StateEnsemble, n: int) -> float:
    """α⋆ = 1 + ln 3/(4 ln Υ_max √n)."""
    ups, _ = upsilon_max(e.states)
    return 1 + LN3 / (4 * math.log(ups) * math.sqrt(n))


def channel_upsilon_max(ne: ChannelEnsemble) -> float:
    """Υ̂_max = 2 + d_A^{3/2} max_x ‖Tr_B[J_{N_x}^{−1/2}]‖_∞."""
    best = 0.0
    for channel in ne.quantum_channels():
        inv_half = power_on_support(channel.choi, -0.5).entries
        reduced = partial_trace_array(inv_half, [channel.d_in, channel.d_out], 1)
        best = max(best, float(np.max(np.abs(linalg.eigvalsh(reduced)))))
    return 2.0 + ne.d_in ** 1.5 * best


def corrected_channel_bound(
    ne: ChannelEnsemble, n: int, radius: Optional[float] = None, tol: float = 1e-4
) -> float:
    """R^Ĝ(N_[r]) + (1/√n)(ln Υ̂_max)(ln 3 + (5/ln 3) ln(1/p_min))."""
    if n < 1:
        raise ValidationError(f"n deve essere positivo (trovato {n})")
    if radius is None:
        radius = belavkin_channel_radius(ne.quantum_channels(), tol).value
    return radius + _second_order(math.log(channel_upsilon_max(ne)), n, ne.p_min)


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


@dataclass
class BoundEntry:
    """
    Voce del report.

    Attributes:
        name: Identificativo della voce.
        value: Reale esteso, None se il calcolo è fallito.
        anchor: Risultato da cui proviene il limite.
        kind: "exponent" (limite sull'esponente), "one_shot" o "auxiliary".
        parameters: Parametri usati (α, ℓ, n, tolleranze).
        error: Messaggio d'errore del calcolo, se fallito.
    """
    name: str
    value: Optional[float]
    anchor: str
    kind: str = "exponent"
    parameters: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "value": None if self.value is None else encode_extended(self.value),
            "anchor": self.anchor,
            "kind": self.kind,
            "parameters": self.parameters,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BoundEntry":
        value = data.get("value")
        return cls(
            name=data["name"],
            value=None if value is None else decode_extended(value),
            anchor=data.get("anchor", ""),
            kind=data.get("kind", "exponent"),
            parameters=dict(data.get("parameters", {})),
            error=data.get("error"),
        )


@dataclass
class OrderingCheck:
    """Confronto lhs ≤ rhs + 1e-6."""
    lhs: str
    rhs: str
    lhs_value: float
    rhs_value: float
    satisfied: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "lhs_value": encode_extended(self.lhs_value),
            "rhs_value": encode_extended(self.rhs_value),
            "satisfied": self.satisfied,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OrderingCheck":
        return cls(
            data["lhs"],
            data["rhs"],
            decode_extended(data["lhs_value"]),
            decode_extended(data["rhs_value"]),
            bool(data["satisfied"]),
        )


@dataclass
class BoundReport:
    """
    Scala di limiti per un ensemble.

    Attributes:
        subject: "state" o "channel".
        entries: Voci in ordine deterministico.
        empirical: Stima empirica dell'esponente, se calcolata.
        orderings: Confronti d'ordine verificati.
        metadata: Dimensioni, r, p_min, seme e avvisi.
    """
    subject: str
    entries: List[BoundEntry] = field(default_factory=list)
    empirical: Optional[ExponentEstimate] = None
    orderings: List[OrderingCheck] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def get(self, name: str) -> Optional[float]:
        for entry in self.entries:
            if entry.name == name:
                return entry.value
        return None

    @property
    def tightest(self) -> Optional[BoundEntry]:
        """Voce finita minima tra i limiti sull'esponente."""
        finite = [
            e for e in self.entries
            if e.kind == "exponent" and e.value is not None and math.isfinite(e.value)
        ]
        return min(finite, key=lambda e: e.value) if finite else None

    def add_ordering(self, lhs: str, rhs: str, lhs_value: Optional[float] = None,
                     rhs_value: Optional[float] = None) -> None:
        """Registra lhs ≤ rhs, leggendo i valori dalle voci se non forniti."""
        left = self.get(lhs) if lhs_value is None else lhs_value
        right = self.get(rhs) if rhs_value is None else rhs_value
        if left is None or right is None:
            return
        self.orderings.append(OrderingCheck(lhs, rhs, left, right, left <= right + ORDERING_TOL))

    @property
    def all_orderings_satisfied(self) -> bool:
        return all(o.satisfied for o in self.orderings)

    def to_dict(self) -> Dict[str, Any]:
        tightest = self.tightest
        return {
            "subject": self.subject,
            "entries": [e.to_dict() for e in self.entries],
            "empirical": self.empirical.to_dict() if self.empirical else None,
            "orderings": [o.to_dict() for o in self.orderings],
            "metadata": self.metadata,
            "tightest": tightest.name if tightest else None,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BoundReport":
        empirical = data.get("empirical")
        return cls(
            subject=data["subject"],
            entries=[BoundEntry.from_dict(e) for e in data.get("entries", [])],
            empirical=ExponentEstimate.from_dict(empirical) if empirical else None,
            orderings=[OrderingCheck.from_dict(o) for o in data.get("orderings", [])],
            metadata=dict(data.get("metadata", {})),
        )


EntrySpec = Tuple[str, str, str, Dict[str, Any], Callable[[], float]]


def _evaluate(spec: EntrySpec) -> BoundEntry:
    name, anchor, kind, params, fn = spec
    try:
        return BoundEntry(name, float(fn()), anchor, kind, params)
    except (ValidationError, NumericalFailure) as e:
        logger.warning(f"Voce '{name}' non calcolata: {e}")
        return BoundEntry(name, None, anchor, kind, params, error=str(e))


def _feasible_n_max(e: StateEnsemble, n_max: int) -> int:
    if e.is_classical():
        return n_max
    limit = int(math.floor(math.log(Config.MAX_SDP_DIM) / math.log(e.dim) + 1e-12))
    return max(1, min(n_max, limit))


def state_report(
    e: StateEnsemble,
    n_max: int = 4,
    alphas: Sequence[float] = (1.5, 2.0),
    seed: Optional[int] = None,
    use_cache: bool = True,
) -> BoundReport:
    """
    Report completo per un ensemble di stati.

    Le voci sono calcolate in parallelo; un errore su una voce viene
    registrato senza interrompere il report.
    """
    if n_max < 1:
        raise ValidationError(f"n_max deve essere ≥ 1 (trovato {n_max})")
    states = e.states
    cflat_result: Dict[str, float] = {}

    def cflat() -> float:
        cflat_result["value"] = log_euclidean_chernoff(states, seed).value
        return cflat_result["value"]

    specs: List[EntrySpec] = [
        ("cflat", "limite log-euclideo sull'esponente", "exponent", {"seed": seed}, cflat),
        ("neg_log_kappa", "confronto con il raggio κ", "exponent", {}, lambda: kappa_sdp(states)[1]),
        ("one_shot", "probabilità d'errore esatta", "one_shot", {},
         lambda: _neg_log(state_exclusion_error(e)[0])),
        ("dmax_prior_bound", "limite one-shot da D′_max", "one_shot", {}, lambda: dmax_prior_bound(e)),
        ("upsilon_max", "termine del secondo ordine", "auxiliary", {}, lambda: upsilon_max(states)[0]),
    ]
    for alpha in alphas:
        specs.append((
            f"petz_closed_form[alpha={alpha:g}]", "limite di Petz in forma chiusa", "one_shot",
            {"alpha": alpha}, lambda a=alpha: closed_form_petz_bound(e, a),
        ))
    if e.r == 2:
        specs.append(("quantum_chernoff", "esponente di Chernoff quantistico (r = 2)", "auxiliary", {},
                      lambda: quantum_chernoff(states[0], states[1]).value))
    if e.is_classical():
        specs.append(("classical_chernoff", "Chernoff classica multivariata", "auxiliary", {"seed": seed},
                      lambda: classical_chernoff(e.diagonals(), seed).value))

    report = BoundReport("state", metadata={
        "r": e.r, "dim": e.dim, "p_min": e.p_min, "n_max": n_max, "seed": seed,
    })
    report.entries = parallel_map(_evaluate, specs)

    cflat_value = report.get("cflat")
    if cflat_value is not None:
        n_eff = _feasible_n_max(e, n_max)
        report.entries.append(_evaluate((
            "corrected_cflat", "limite non asintotico log-euclideo", "exponent", {"n": n_eff},
            lambda: corrected_cflat_bound(e, n_eff, cflat_value),
        )))
        _, restricted = upsilon_max(states)
        if restricted:
            report.metadata["support_restricted"] = True
    try:
        n_eff = _feasible_n_max(e, n_max)
        report.empirical = empirical_exponent(e, n_eff, use_cache=use_cache)
        report.metadata["n_empirical"] = n_eff
    except (ValidationError, NumericalFailure) as exc:
        logger.warning(f"Esponente empirico non calcolato: {exc}")
        report.metadata["empirical_error"] = str(exc)

    report.add_ordering("cflat", "neg_log_kappa")
    for alpha in alphas:
        report.add_ordering("one_shot", f"petz_closed_form[alpha={alpha:g}]")
    report.add_ordering("one_shot", "dmax_prior_bound")
    report.add_ordering("quantum_chernoff", "cflat")
    report.add_ordering("classical_chernoff", "cflat")
    if report.empirical is not None and cflat_value is not None:
        for n, value in enumerate(report.empirical.per_n, start=1):
            report.add_ordering(f"empirical[n={n}]", f"corrected_cflat[n={n}]",
                                value, corrected_cflat_bound(e, n, cflat_value))
    _log_summary(report)
    return report


def channel_report(
    ne: ChannelEnsemble,
    n_max: int = 6,
    tol: float = 1e-4,
) -> BoundReport:
    """
    Report per un ensemble di canali: raggio di Belavkin–Staszewski, limite
    corretto e, per canali classici, esponente esatto e sequenza empirica
    della strategia non adattiva ottima.
    """
    channels = ne.quantum_channels()
    radius_details: Dict[str, Any] = {}

    def radius() -> float:
        result = belavkin_channel_radius(channels, tol)
        radius_details.update(ell=result.details.get("ell"), converged=result.details.get("converged"))
        return result.value

    specs: List[EntrySpec] = [
        ("belavkin_radius", "raggio sinistro di Belavkin–Staszewski", "exponent", {"tol": tol}, radius),
        ("channel_upsilon_max", "termine del secondo ordine per canali", "auxiliary", {},
         lambda: channel_upsilon_max(ne)),
    ]
    if ne.is_classical():
        specs.append(("classical_exponent", "esponente esatto per canali classici", "auxiliary", {},
                      lambda: classical_channel_exponent(ne)[0]))

    report = BoundReport("channel", metadata={
        "r": ne.r, "d_in": ne.d_in, "d_out": ne.d_out, "p_min": ne.p_min, "n_max": n_max,
    })
    report.entries = parallel_map(_evaluate, specs)
    for entry in report.entries:
        if entry.name == "belavkin_radius":
            entry.parameters.update(radius_details)

    radius_value = report.get("belavkin_radius")
    if radius_value is not None:
        report.entries.append(_evaluate((
            "corrected_channel_bound", "limite non asintotico per canali", "exponent", {"n": n_max},
            lambda: corrected_channel_bound(ne, n_max, radius_value),
        )))

    if ne.is_classical():
        _, y_star = classical_channel_exponent(ne)
        columns = [c.column(y_star) for c in ne.channels]
        errors = [
            classical_exclusion_error(ne.priors, product_distributions(columns, n))
            for n in range(1, n_max + 1)
        ]
        report.empirical = exponent_from_errors(errors)
        report.metadata["best_input"] = y_star
        report.add_ordering("classical_exponent", "belavkin_radius")
        exact = report.get("classical_exponent")
        if exact is not None and radius_value is not None:
            report.metadata["classical_gap"] = abs(radius_value - exact)

    if report.empirical is not None and radius_value is not None:
        for n, value in enumerate(report.empirical.per_n, start=1):
            report.add_ordering(f"empirical[n={n}]", f"corrected_channel_bound[n={n}]",
                                value, corrected_channel_bound(ne, n, radius_value))
    _log_summary(report)
    return report


def _neg_log(p: float) -> float:
    return math.inf if p <= Config.ZERO_PROB else -math.log(p)


def _log_summary(report: BoundReport) -> None:
    failed = [o for o in report.orderings if not o.satisfied]
    tightest = report.tightest
    logger.info(
        f"Report {report.subject}: {len(report.entries)} voci, "
        f"{len(report.orderings)} confronti ({len(failed)} violati), "
        f"limite più stretto: {tightest.name if tightest else 'nessuno'}"
    )
    for o in failed:
        logger.warning(f"Confronto violato: {o.lhs}={o.lhs_value:.9g} > {o.rhs}={o.rhs_value:.9g}")
