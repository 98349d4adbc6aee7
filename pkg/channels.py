"""
Canali quantistici e loro divergenze.

Un canale è memorizzato tramite operatori di Kraus (quando disponibili) o
tramite l'operatore di Choi J = Σ_ij |i⟩⟨j|_A ⊗ N(|i⟩⟨j|)_B, con il
sistema d'ingresso per primo; la preservazione della traccia equivale a
Tr_B[J] = I_A.

Le divergenze geometrica e di Belavkin–Staszewski tra canali usano le
forme chiuse sugli operatori di Choi; il raggio geometrico sinistro per
α = 1 + 2^{−ℓ} è calcolato con un SDP basato su medie geometriche
iterate.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from config import Config
from conic_sdp import SdpBuilder, place_block, scaled_identity, solve
from divergences import DivergenceValue
from errors import DimensionMismatch, NonConvergence, ValidationError
from operators import (
    ArrayLike,
    DensityOperator,
    HermitianOperator,
    as_array,
    hermitize,
    intersection_basis,
    log_on_support,
    parse_probability,
    partial_trace_array,
    power_on_support,
    support_basis,
    support_contained,
    validate_priors,
)
from radii import (
    DivergenceKind,
    RadiusMethod,
    RadiusMode,
    RadiusResult,
    SimplexPoint,
    left_radius_minimax,
)

logger = logging.getLogger("pexc.channels")


def _encode_matrix(m: np.ndarray) -> Dict[str, Any]:
    data: Dict[str, Any] = {"re": np.real(m).tolist()}
    if np.any(np.imag(m) != 0):
        data["im"] = np.imag(m).tolist()
    return data


def _decode_matrix(data: Dict[str, Any]) -> np.ndarray:
    re = np.asarray(data["re"], dtype=float)
    im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape or re.ndim != 2:
        raise DimensionMismatch(f"Matrice JSON di forma non valida: {re.shape}")
    return re + 1j * im


@dataclass(frozen=True)
class ClassicalChannel:
    """
    Canale classico p_{z|y}: matrice stocastica con colonne indicizzate
    dall'ingresso y.

    Example:
        >>> ClassicalChannel(np.array([[0.9, 0.2], [0.1, 0.8]])).column(1)
        array([0.2, 0.8])
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2:
            raise DimensionMismatch(f"Matrice stocastica di forma {m.shape}")
        if np.any(m < 0):
            raise ValidationError("Matrice stocastica con valori negativi")
        if np.any(np.abs(m.sum(axis=0) - 1.0) > 1e-12):
            raise ValidationError(f"Colonne non normalizzate: {m.sum(axis=0)}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def d_in(self) -> int:
        return self.matrix.shape[1]

    @property
    def d_out(self) -> int:
        return self.matrix.shape[0]

    def column(self, y: int) -> np.ndarray:
        return np.array(self.matrix[:, y])

    def to_quantum(self) -> "QuantumChannel":
        return classical_channel_to_quantum(self)


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """
    Mappa completamente positiva A → B.

    Attributes:
        d_in: Dimensione d'ingresso.
        d_out: Dimensione d'uscita.
        kraus: Operatori di Kraus d_out×d_in (tupla vuota se assenti).
        choi_matrix: Operatore di Choi esplicito, se noto.
        tp_enforced: False per mappe solo CP (ad esempio I_{A→B}).
        cp_tol: Tolleranza sulla positività di J.
        tp_tol: Tolleranza su Tr_B[J] = I_A.
    """

    d_in: int
    d_out: int
    kraus: Tuple[np.ndarray, ...] = ()
    choi_matrix: Optional[np.ndarray] = None
    tp_enforced: bool = True
    cp_tol: float = Config.CHANNEL_TOL
    tp_tol: float = Config.CHANNEL_TOL

    def __post_init__(self) -> None:
        if self.d_in < 1 or self.d_out < 1:
            raise DimensionMismatch(f"Dimensioni del canale non valide: {self.d_in}→{self.d_out}")
        if not self.kraus and self.choi_matrix is None:
            raise ValidationError("Canale senza operatori di Kraus né operatore di Choi")
        kraus = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        for k in kraus:
            if k.shape != (self.d_out, self.d_in):
                raise DimensionMismatch(
                    f"Operatore di Kraus di forma {k.shape}, atteso {(self.d_out, self.d_in)}"
                )
        object.__setattr__(self, "kraus", kraus)
        if self.choi_matrix is not None:
            choi = hermitize(np.asarray(self.choi_matrix, dtype=complex))
            size = self.d_in * self.d_out
            if choi.shape != (size, size):
                raise DimensionMismatch(f"Choi di forma {choi.shape}, attesa {(size, size)}")
            if linalg.eigvalsh(choi)[0] < -self.cp_tol:
                raise ValidationError("Operatore di Choi non PSD: la mappa non è CP")
            object.__setattr__(self, "choi_matrix", choi)
        if self.tp_enforced:
            defect = np.max(np.abs(self.input_marginal() - np.eye(self.d_in)))
            if defect > self.tp_tol:
                raise ValidationError(f"Il canale non preserva la traccia (scarto {defect:.3e})")

    @classmethod
    def from_kraus(cls, kraus: Sequence[np.ndarray], tp_enforced: bool = True) -> "QuantumChannel":
        return choi_from_kraus(kraus, tp_enforced)

    @classmethod
    def from_choi(
        cls, choi: ArrayLike, d_in: int, d_out: int, tp_enforced: bool = True
    ) -> "QuantumChannel":
        return cls(d_in, d_out, choi_matrix=as_array(choi), tp_enforced=tp_enforced)

    @cached_property
    def choi(self) -> HermitianOperator:
        if self.choi_matrix is not None:
            return HermitianOperator(self.choi_matrix)
        size = self.d_in * self.d_out
        j = np.zeros((size, size), dtype=complex)
        for k in self.kraus:
            v = k.T.reshape(-1)
            j += np.outer(v, v.conj())
        return HermitianOperator(hermitize(j))

    def input_marginal(self) -> np.ndarray:
        """Tr_B[J], uguale a Σ_k (K_k†K_k)^T."""
        if self.kraus and self.choi_matrix is None:
            return sum(k.conj().T @ k for k in self.kraus).T
        return partial_trace_array(self.choi_matrix, [self.d_in, self.d_out], 1)

    def apply(self, rho: ArrayLike, d_ref: int = 1) -> HermitianOperator:
        """
        (id_R ⊗ N)(ρ_RA), con R di dimensione d_ref (1 per ρ su A soltanto).

        Raises:
            DimensionMismatch: Se ρ non vive su R⊗A.
        """
        m = as_array(rho)
        if m.shape != (d_ref * self.d_in, d_ref * self.d_in):
            raise DimensionMismatch(
                f"Ingresso di forma {m.shape} per un canale con d_in={self.d_in} e d_ref={d_ref}"
            )
        if self.kraus and self.choi_matrix is None:
            out = np.zeros((d_ref * self.d_out, d_ref * self.d_out), dtype=complex)
            for k in self.kraus:
                lifted = np.kron(np.eye(d_ref), k)
                out += lifted @ m @ lifted.conj().T
            return HermitianOperator(hermitize(out))
        t = m.reshape(d_ref, self.d_in, d_ref, self.d_in)
        j = self.choi.entries.reshape(self.d_in, self.d_out, self.d_in, self.d_out)
        out = np.einsum("risj,ibjc->rbsc", t, j)
        return HermitianOperator(hermitize(out.reshape(d_ref * self.d_out, d_ref * self.d_out)))

    def to_dict(self) -> Dict[str, Any]:
        return channel_to_dict(self)


AnyChannel = Union[QuantumChannel, ClassicalChannel]


def _as_quantum(channel: AnyChannel) -> QuantumChannel:
    return channel.to_quantum() if isinstance(channel, ClassicalChannel) else channel


def choi_from_kraus(kraus: Sequence[np.ndarray], tp_enforced: bool = True) -> QuantumChannel:
    """
    Canale dai suoi operatori di Kraus; l'operatore di Choi è calcolato
    solo quando richiesto.

    Example:
        >>> choi_from_kraus([np.eye(2)]).choi.trace
        2.0
    """
    kraus = [np.atleast_2d(np.asarray(k, dtype=complex)) for k in kraus]
    if not kraus:
        raise ValidationError("Lista di operatori di Kraus vuota")
    shapes = {k.shape for k in kraus}
    if len(shapes) != 1:
        raise DimensionMismatch(f"Operatori di Kraus di forme diverse: {sorted(shapes)}")
    d_out, d_in = kraus[0].shape
    return QuantumChannel(d_in, d_out, kraus=tuple(kraus), tp_enforced=tp_enforced)


def apply(channel: AnyChannel, rho: ArrayLike, d_ref: int = 1) -> HermitianOperator:
    return _as_quantum(channel).apply(rho, d_ref)


def identity_channel(dim: int) -> QuantumChannel:
    return choi_from_kraus([np.eye(dim)])


def replacer_channel(sigma: ArrayLike, d_in: int) -> QuantumChannel:
    """ρ ↦ Tr[ρ] σ, con Choi I_A ⊗ σ."""
    s = as_array(sigma)
    return QuantumChannel.from_choi(np.kron(np.eye(d_in), s), d_in, s.shape[0])


def depolarizing_channel(dim: int, p: float) -> QuantumChannel:
    """ρ ↦ (1 − p) ρ + p Tr[ρ] I/d, con p ∈ [0, 1]."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"Parametro di depolarizzazione fuori da [0, 1]: {p}")
    omega = np.eye(dim).reshape(-1)
    choi = (1 - p) * np.outer(omega, omega) + p * np.eye(dim * dim) / dim
    return QuantumChannel.from_choi(choi, dim, dim)


def random_channel(
    d_in: int, d_out: int, rng: np.random.Generator, n_kraus: Optional[int] = None
) -> QuantumChannel:
    """
    Canale CPTP casuale da un'isometria di Stinespring V: A → B⊗E.

    Gli operatori di Kraus sono i blocchi d_out×d_in di V; il numero di
    default d_in·d_out dà un Choi di rango pieno.
    """
    k = n_kraus or d_in * d_out
    if k * d_out < d_in:
        raise DimensionMismatch(f"{k} operatori di Kraus non bastano per un'isometria {d_in}→{d_out}")
    g = rng.standard_normal((k * d_out, d_in)) + 1j * rng.standard_normal((k * d_out, d_in))
    v, _ = np.linalg.qr(g)
    return choi_from_kraus([v[i * d_out:(i + 1) * d_out, :] for i in range(k)])


def cq_channel(states: Sequence[ArrayLike]) -> QuantumChannel:
    """ρ ↦ Σ_y ⟨y|ρ|y⟩ ν_y, con Choi Σ_y |y⟩⟨y| ⊗ ν_y."""
    blocks = [as_array(s) for s in states]
    if len({b.shape for b in blocks}) != 1:
        raise DimensionMismatch("Stati d'uscita di dimensioni diverse")
    return QuantumChannel.from_choi(linalg.block_diag(*blocks), len(blocks), blocks[0].shape[0])


def classical_channel_to_quantum(channel: ClassicalChannel) -> QuantumChannel:
    """Sollevamento diagonale di un canale classico."""
    return cq_channel([np.diag(channel.column(y)) for y in range(channel.d_in)])


def cq_outputs(channel: AnyChannel) -> List[np.ndarray]:
    """
    Colonne ν_y di un canale classico-quantistico.

    Raises:
        ValidationError: Se J ha blocchi fuori diagonale sull'ingresso.
    """
    if isinstance(channel, ClassicalChannel):
        return [np.diag(channel.column(y)) for y in range(channel.d_in)]
    j = channel.choi.entries.reshape(channel.d_in, channel.d_out, channel.d_in, channel.d_out)
    for y in range(channel.d_in):
        for z in range(channel.d_in):
            if y != z and np.max(np.abs(j[y, :, z, :])) > channel.tp_tol:
                raise ValidationError("Il canale non è classico-quantistico")
    return [hermitize(j[y, :, y, :]) for y in range(channel.d_in)]


# ---------------------------------------------------------------------------
# Ensemble e codifica JSON
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ChannelEnsemble:
    """Ensemble (p_[r], N_[r]) di canali con le stesse dimensioni."""

    priors: np.ndarray
    channels: Tuple[AnyChannel, ...]

    def __post_init__(self) -> None:
        priors = validate_priors(self.priors)
        channels = tuple(self.channels)
        if len(channels) != priors.size:
            raise DimensionMismatch(f"{priors.size} probabilità ma {len(channels)} canali")
        shapes = {(c.d_in, c.d_out) for c in channels}
        if len(shapes) != 1:
            raise DimensionMismatch(f"Canali con dimensioni diverse: {sorted(shapes)}")
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "channels", channels)

    @property
    def r(self) -> int:
        return len(self.channels)

    @property
    def d_in(self) -> int:
        return self.channels[0].d_in

    @property
    def d_out(self) -> int:
        return self.channels[0].d_out

    @property
    def p_min(self) -> float:
        return float(np.min(self.priors))

    def is_classical(self) -> bool:
        return all(isinstance(c, ClassicalChannel) for c in self.channels)

    def quantum_channels(self) -> List[QuantumChannel]:
        return [_as_quantum(c) for c in self.channels]

    @classmethod
    def uniform(cls, channels: Sequence[AnyChannel]) -> "ChannelEnsemble":
        return cls(np.full(len(channels), 1.0 / len(channels)), tuple(channels))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "priors": [float(p) for p in self.priors],
            "channels": [channel_to_dict(c) for c in self.channels],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ChannelEnsemble":
        if "channels" not in data:
            raise ValidationError("Ensemble di canali senza campo 'channels'")
        channels = tuple(channel_from_dict(c) for c in data["channels"])
        if data.get("uniform") or "priors" not in data:
            return cls.uniform(channels)
        return cls(np.array([parse_probability(p) for p in data["priors"]]), channels)


def channel_to_dict(channel: AnyChannel) -> Dict[str, Any]:
    """Codifica {"d_in", "d_out", "kind", payload}."""
    if isinstance(channel, ClassicalChannel):
        return {"d_in": channel.d_in, "d_out": channel.d_out, "kind": "classical",
                "matrix": channel.matrix.tolist()}
    data: Dict[str, Any] = {"d_in": channel.d_in, "d_out": channel.d_out}
    if channel.kraus and channel.choi_matrix is None:
        data.update(kind="kraus", kraus=[_encode_matrix(k) for k in channel.kraus])
    else:
        data.update(kind="choi", choi=channel.choi.to_dict())
    if not channel.tp_enforced:
        data["tp_enforced"] = False
    return data


def channel_from_dict(data: Dict[str, Any]) -> AnyChannel:
    """Inverso di :func:`channel_to_dict`."""
    kind = data.get("kind")
    try:
        if kind == "classical":
            channel: AnyChannel = ClassicalChannel(np.asarray(data["matrix"], dtype=float))
        elif kind == "kraus":
            channel = choi_from_kraus([_decode_matrix(k) for k in data["kraus"]],
                                      data.get("tp_enforced", True))
        elif kind == "choi":
            channel = QuantumChannel.from_choi(
                HermitianOperator.from_dict(data["choi"]),
                int(data["d_in"]), int(data["d_out"]), data.get("tp_enforced", True),
            )
        else:
            raise ValidationError(f"Tipo di canale sconosciuto: {kind}")
    except KeyError as e:
        raise ValidationError(f"Campo mancante nel canale: {e}") from e
    for key in ("d_in", "d_out"):
        if key in data and int(data[key]) != getattr(channel, key):
            raise DimensionMismatch(f"Campo {key}={data[key]} incoerente con il contenuto")
    return channel


# ---------------------------------------------------------------------------
# Divergenze tra canali
# ---------------------------------------------------------------------------


def _check_pair(n: QuantumChannel, m: QuantumChannel) -> None:
    if (n.d_in, n.d_out) != (m.d_in, m.d_out):
        raise DimensionMismatch(
            f"Canali incompatibili: {n.d_in}→{n.d_out} e {m.d_in}→{m.d_out}"
        )


def _lift_and_reduce(channel: QuantumChannel, v: np.ndarray, compressed: np.ndarray) -> float:
    """λ_max(Tr_B[V X V†])."""
    full = hermitize(v @ compressed @ v.conj().T)
    reduced = hermitize(partial_trace_array(full, [channel.d_in, channel.d_out], 1))
    return float(linalg.eigvalsh(reduced)[-1])


def geometric_channel_divergence(n: AnyChannel, m: AnyChannel, alpha: float) -> DivergenceValue:
    """
    Ĝ_α(N‖M) = (1/(α−1)) ln ‖Tr_B[J_M^{1/2}(J_M^{−1/2} J_N J_M^{−1/2})^α J_M^{1/2}]‖_∞.

    Args:
        n: Canale CPTP.
        m: Mappa CP.
        alpha: Ordine in (1, 2].
    """
    if not 1 < alpha <= 2:
        raise ValidationError(f"Divergenza geometrica di canale: alpha={alpha} fuori da (1, 2]")
    n, m = _as_quantum(n), _as_quantum(m)
    _check_pair(n, m)
    j_n, j_m = n.choi.entries, m.choi.entries
    if not support_contained(j_n, j_m):
        return DivergenceValue.infinite()
    v = support_basis(j_m)
    s = hermitize(v.conj().T @ j_m @ v)
    r = hermitize(v.conj().T @ j_n @ v)
    s_half = power_on_support(s, 0.5).entries
    s_inv_half = power_on_support(s, -0.5).entries
    inner = power_on_support(hermitize(s_inv_half @ r @ s_inv_half), alpha).entries
    norm = _lift_and_reduce(n, v, s_half @ inner @ s_half)
    if norm <= 0:
        return DivergenceValue.infinite(support_violation=False)
    return DivergenceValue(math.log(norm) / (alpha - 1))


def belavkin_channel_divergence(n: AnyChannel, m: AnyChannel) -> DivergenceValue:
    """
    Ĝ(N‖M) = ‖Tr_B[J_N^{1/2} ln(J_N^{1/2} J_M^{−1} J_N^{1/2}) J_N^{1/2}]‖_∞.

    La norma è presa come autovalore massimo, non negativo per canali CPTP.
    """
    n, m = _as_quantum(n), _as_quantum(m)
    _check_pair(n, m)
    j_n, j_m = n.choi.entries, m.choi.entries
    if not support_contained(j_n, j_m):
        return DivergenceValue.infinite()
    v = support_basis(j_m)
    s = hermitize(v.conj().T @ j_m @ v)
    r = hermitize(v.conj().T @ j_n @ v)
    r_half = power_on_support(r, 0.5).entries
    s_inv = power_on_support(s, -1.0).entries
    inner = log_on_support(hermitize(r_half @ s_inv @ r_half)).entries
    return DivergenceValue(_lift_and_reduce(n, v, r_half @ inner @ r_half))


# ---------------------------------------------------------------------------
# Raggi di canale
# ---------------------------------------------------------------------------


def _common_shape(channels: Sequence[QuantumChannel]) -> Tuple[int, int]:
    shapes = {(c.d_in, c.d_out) for c in channels}
    if len(shapes) != 1:
        raise DimensionMismatch(f"Canali con dimensioni diverse: {sorted(shapes)}")
    return shapes.pop()


def geometric_channel_radius_sdp(channels: Sequence[AnyChannel], ell: int) -> RadiusResult:
    """
    Raggio sinistro geometrico R^{Ĝ_α}(N_[r]) per α = 1 + 2^{−ℓ}.

    Minimizza λ su (T CPTP, λ, M_x, N_{i,x}) con
    [[M_x, J_T], [J_T, N_{ℓ+1,x}]] ⪰ 0, [[J_T, N_{i+1,x}], [N_{i+1,x}, N_{i,x}]] ⪰ 0
    per i = 1, ..., ℓ, N_{1,x} = J_{N_x} e λ I_A ⪰ Tr_B[M_x]; il raggio è
    2^ℓ ln λ. La catena di medie geometriche produce
    N_{ℓ+1,x} ⪯ J_{N_x} #_{1−2^{−ℓ}} J_T.

    Args:
        channels: Canali della stessa forma.
        ell: Indice ℓ in [0, Config.ELL_MAX].

    Returns:
        RadiusResult: Valore, Choi ottimo di T e pesi dai moltiplicatori
        dei vincoli su λ.

    Raises:
        SdpFailure: Se il solutore non certifica l'ottimo.
    """
    if not 0 <= ell <= Config.ELL_MAX or int(ell) != ell:
        raise ValidationError(f"ell deve essere un intero in [0, {Config.ELL_MAX}] (trovato {ell})")
    quantum = [_as_quantum(c) for c in channels]
    if len(quantum) < 1:
        raise ValidationError("Servono almeno un canale")
    d_in, d_out = _common_shape(quantum)
    r = len(quantum)
    alpha = 1 + 2.0 ** -ell
    details: Dict[str, Any] = {"ell": int(ell), "alpha": alpha}
    chois = [c.choi.entries for c in quantum]
    if intersection_basis(chois).shape[1] == 0:
        return RadiusResult(math.inf, SimplexPoint.barycenter(r), None, RadiusMethod.SDP, details)

    d = d_in * d_out
    sizes = [d, d]
    builder = SdpBuilder()
    t_var = builder.hermitian(d, "J_T")
    lam = builder.scalar("lambda")
    m_vars = [builder.hermitian(d, f"M_{x}") for x in range(r)]
    chains = [[builder.hermitian(d, f"N_{i + 1}_{x}") for i in range(1, ell + 1)] for x in range(r)]
    trace_out = (lambda m: partial_trace_array(m, [d_in, d_out], 1))

    builder.add_lmi([(t_var, lambda m: m)], np.zeros((d, d)), "J_T")
    builder.add_equality([(t_var, trace_out)], np.eye(d_in))
    lambda_blocks = []
    for x in range(r):
        top = chains[x][-1] if ell > 0 else None
        terms = [(m_vars[x], place_block(sizes, 0, 0)), (t_var, place_block(sizes, 0, 1))]
        constant = np.zeros((2 * d, 2 * d), dtype=complex)
        if top is None:
            constant[d:, d:] = chois[x]
        else:
            terms.append((top, place_block(sizes, 1, 1)))
        builder.add_lmi(terms, constant, f"M_{x}")
        for i in range(ell):
            terms = [(t_var, place_block(sizes, 0, 0)), (chains[x][i], place_block(sizes, 0, 1))]
            constant = np.zeros((2 * d, 2 * d), dtype=complex)
            if i == 0:
                constant[d:, d:] = chois[x]
            else:
                terms.append((chains[x][i - 1], place_block(sizes, 1, 1)))
            builder.add_lmi(terms, constant, f"mean_{i + 1}_{x}")
        lambda_blocks.append(builder.n_blocks)
        builder.add_lmi(
            [(lam, scaled_identity(d_in)), (m_vars[x], lambda m: -trace_out(m))],
            np.zeros((d_in, d_in)),
            f"lambda_{x}",
        )
    builder.add_objective(lam, 1.0)

    solution = solve(builder.build()).require_optimal(f"raggio geometrico di canale (ell={ell})")
    lam_value = float(lam.value(solution.x)[0, 0].real)
    if lam_value <= 0:
        raise NonConvergence(f"λ non positivo nel raggio di canale: {lam_value:.3e}", lam_value)
    value = max((2.0 ** ell) * math.log(lam_value), 0.0)
    weights = np.array([
        max(float(np.real(np.trace(solution.block_duals[k]))), 0.0) for k in lambda_blocks
    ])
    weights = weights / weights.sum() if weights.sum() > 0 else np.full(r, 1.0 / r)
    details.update(lambda_value=lam_value, iterations=solution.iterations)
    logger.debug(f"Raggio geometrico di canale: ell={ell}, valore={value:.10g}")
    return RadiusResult(value, SimplexPoint(weights), HermitianOperator(t_var.value(solution.x)),
                        RadiusMethod.SDP, details)


def belavkin_channel_radius(
    channels: Sequence[AnyChannel],
    tol: float = 1e-4,
    strict: bool = False,
) -> RadiusResult:
    """
    Raggio sinistro di Belavkin–Staszewski R^Ĝ(N_[r]).

    Risolve l'SDP geometrico per ℓ = 0, 1, ... finché due valori
    consecutivi differiscono al più di ``tol``. I valori decrescono verso
    il limite con scarto proporzionale a 2^{−ℓ}; l'estrapolazione
    2 v_ℓ − v_{ℓ−1} è riportata nei dettagli.

    Args:
        channels: Canali della stessa forma.
        tol: Tolleranza sulla differenza tra valori consecutivi (≥ 1e-6).
        strict: Se True la mancata convergenza solleva un'eccezione.

    Raises:
        NonConvergence: Con ``strict`` se ℓ supera Config.ELL_MAX.
    """
    if tol < 1e-6:
        raise ValidationError(f"Tolleranza troppo piccola per il raggio di canale: {tol}")
    previous: Optional[RadiusResult] = None
    history: List[float] = []
    for ell in range(Config.ELL_MAX + 1):
        current = geometric_channel_radius_sdp(channels, ell)
        history.append(current.value)
        if math.isinf(current.value):
            current.details.update(converged=True, history=history)
            return current
        if previous is not None and abs(previous.value - current.value) <= tol:
            current.details.update(
                converged=True,
                history=history,
                extrapolated=2 * current.value - previous.value,
            )
            return current
        previous = current
    assert previous is not None
    message = f"Raggio di Belavkin–Staszewski non convergente entro ell={Config.ELL_MAX}"
    if strict:
        raise NonConvergence(message, previous.value)
    logger.warning(message)
    previous.details.update(converged=False, history=history)
    return previous


def cq_radius_reduction(
    cq_channels: Sequence[AnyChannel],
    divergence: DivergenceKind = DivergenceKind.UMEGAKI,
    mode: RadiusMode = RadiusMode.WEIGHTS_FIRST,
    alpha: Optional[float] = None,
    seed: Optional[int] = None,
) -> Tuple[RadiusResult, int]:
    """
    R^D(N_[r]) = max_y R^D(ν_[r],y) per canali classico-quantistici.

    Returns:
        Tuple: (raggio della colonna peggiore, indice y che realizza il massimo).
    """
    columns = [cq_outputs(c) for c in cq_channels]
    n_inputs = {len(col) for col in columns}
    if len(n_inputs) != 1:
        raise DimensionMismatch("I canali non condividono l'alfabeto d'ingresso")
    best: Optional[RadiusResult] = None
    best_y = 0
    for y in range(n_inputs.pop()):
        states = [DensityOperator(col[y]) for col in columns]
        result = left_radius_minimax(divergence, states, mode, alpha=alpha, seed=seed)
        if best is None or result.value > best.value:
            best, best_y = result, y
    assert best is not None
    best.details["best_input"] = best_y
    return best, best_y
