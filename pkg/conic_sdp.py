"""
Strato SDP: problemi in forma standard con blocchi LMI hermitiani.

Un problema ottimizza c·x soggetto a Σ_i x_i A_{k,i} ⪰ B_k per ogni
blocco k e ad a·x = b. I blocchi complessi vengono portati in forma reale
simmetrica con l'immersione [[Re h, −Im h], [Im h, Re h]] e risolti con il
metodo primale-duale a punto interno di cvxopt (scaling di Nesterov–Todd).

Le variabili sono coordinate reali in una base hermitiana, quindi gli
obiettivi Re Tr[W X] non richiedono correzioni per il raddoppio degli
autovalori dell'immersione. I moltiplicatori duali complessi dei blocchi
vengono ricostruiti dalle matrici duali reali.

Example:
    >>> builder = SdpBuilder()
    >>> t = builder.scalar("t")
    >>> builder.add_lmi([(t, scaled_identity(2, -1.0))], np.diag([1.0, 2.0]))
    >>> builder.add_objective(t, 1.0)
    >>> solve(builder.build(maximize=True)).primal_value
    1.0000000...
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from cvxopt import matrix, solvers, spmatrix

from config import Config
from errors import DimensionMismatch, NumericalFailure, SdpFailure, ValidationError
from operators import HermitianOperator, as_array, hermitize

logger = logging.getLogger("pexc.conic_sdp")

LinearMap = Callable[[np.ndarray], np.ndarray]


class SdpStatus(Enum):
    """Esito del solutore."""
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    MAX_ITER = "max_iter"


def complex_to_real_embedding(h: Union[HermitianOperator, np.ndarray]) -> np.ndarray:
    """
    Immersione reale simmetrica 2d×2d di un hermitiano d×d.

    Lo spettro dell'immersione è quello di h con molteplicità raddoppiata.

    Example:
        >>> complex_to_real_embedding(np.array([[0, -1j], [1j, 0]])).shape
        (4, 4)
    """
    m = as_array(h)
    re, im = np.real(m), np.imag(m)
    return np.block([[re, -im], [im, re]])


def real_to_complex_dual(z: np.ndarray) -> np.ndarray:
    """
    Hermitiano Λ con Tr[emb(A) Z] = Tr[A Λ] per ogni hermitiano A.

    Λ = (Z11 + Z22) + i(Z21 − Z12).
    """
    n = z.shape[0] // 2
    z11, z12 = z[:n, :n], z[:n, n:]
    z21, z22 = z[n:, :n], z[n:, n:]
    return hermitize((z11 + z22) + 1j * (z21 - z12))


def hermitian_basis(dim: int) -> np.ndarray:
    """
    Base reale degli hermitiani dim×dim (dim² elementi).

    Ordine: E_jj, poi per j<k le coppie (E_jk + E_kj, iE_jk − iE_kj).
    """
    basis = np.zeros((dim * dim, dim, dim), dtype=complex)
    idx = 0
    for j in range(dim):
        basis[idx, j, j] = 1.0
        idx += 1
    for j in range(dim):
        for k in range(j + 1, dim):
            basis[idx, j, k] = basis[idx, k, j] = 1.0
            basis[idx + 1, j, k] = 1j
            basis[idx + 1, k, j] = -1j
            idx += 2
    return basis


def hermitian_coordinates(m: np.ndarray) -> np.ndarray:
    """Coordinate di un hermitiano nella base di :func:`hermitian_basis`."""
    dim = m.shape[0]
    coords = [float(np.real(m[j, j])) for j in range(dim)]
    for j in range(dim):
        for k in range(j + 1, dim):
            coords.extend([float(np.real(m[j, k])), float(np.imag(m[j, k]))])
    return np.array(coords)


# ---------------------------------------------------------------------------
# Problema e soluzione
# ---------------------------------------------------------------------------


@dataclass
class LmiBlock:
    """
    Blocco Σ_i x_i A_{k,i} ⪰ B_k; i coefficienti nulli sono omessi.
    """
    constant: np.ndarray
    coefficients: Dict[int, np.ndarray]
    label: str = ""

    @property
    def dim(self) -> int:
        return int(self.constant.shape[0])

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Σ_i x_i A_{k,i} − B_k."""
        total = -self.constant.astype(complex)
        for i, coeff in self.coefficients.items():
            total = total + x[i] * coeff
        return hermitize(total)


@dataclass
class SdpProblem:
    """
    Problema conico in forma standard.

    Attributes:
        n_vars: Numero di variabili scalari reali.
        objective: Vettore c dell'obiettivo.
        blocks: Vincoli LMI hermitiani.
        equalities: Vincoli (a, b) con a·x = b.
        maximize: Verso dell'ottimizzazione.
    """
    n_vars: int
    objective: np.ndarray
    blocks: List[LmiBlock]
    equalities: List[Tuple[np.ndarray, float]] = field(default_factory=list)
    maximize: bool = False

    def validate(self) -> None:
        if self.objective.shape != (self.n_vars,):
            raise DimensionMismatch(
                f"Obiettivo di lunghezza {self.objective.shape} per {self.n_vars} variabili"
            )
        if not self.blocks:
            raise ValidationError("Problema SDP senza blocchi LMI")
        for k, block in enumerate(self.blocks):
            n = block.dim
            for i, coeff in block.coefficients.items():
                if not 0 <= i < self.n_vars:
                    raise DimensionMismatch(f"Blocco {k}: indice di variabile {i} fuori range")
                if coeff.shape != (n, n):
                    raise DimensionMismatch(f"Blocco {k}: coefficiente {i} di forma {coeff.shape}")
                if np.max(np.abs(coeff - coeff.conj().T)) > Config.HERM_TOL:
                    raise ValidationError(f"Blocco {k}: coefficiente {i} non hermitiano")
        for a, _ in self.equalities:
            if a.shape != (self.n_vars,):
                raise DimensionMismatch("Vincolo di uguaglianza di lunghezza errata")

    def to_dict(self) -> Dict[str, Any]:
        """Dump JSON per confronti con solutori esterni."""
        def enc(m: np.ndarray) -> Dict[str, Any]:
            return {"dim": int(m.shape[0]), "re": np.real(m).tolist(), "im": np.imag(m).tolist()}

        return {
            "n_vars": self.n_vars,
            "maximize": self.maximize,
            "objective": self.objective.tolist(),
            "blocks": [
                {
                    "label": b.label,
                    "constant": enc(b.constant),
                    "coefficients": {str(i): enc(c) for i, c in b.coefficients.items()},
                }
                for b in self.blocks
            ],
            "equalities": [{"a": a.tolist(), "b": float(b)} for a, b in self.equalities],
        }


@dataclass
class SdpSolution:
    """
    Soluzione di un SdpProblem.

    Attributes:
        x: Ottimo primale (None se non disponibile).
        primal_value: Valore dell'obiettivo del problema dato.
        dual_value: Valore del duale (≥ primale se si massimizza).
        gap: |primal_value − dual_value|.
        status: Esito.
        block_duals: Moltiplicatori hermitiani PSD, uno per blocco.
        iterations: Iterazioni del punto interno.
        max_violation: Massimo di −λ_min sui blocchi LMI all'iterato finale.
        residuals: Residui del solutore, riportati anche negli errori.
    """
    x: Optional[np.ndarray]
    primal_value: float
    dual_value: float
    gap: float
    status: SdpStatus
    block_duals: List[np.ndarray] = field(default_factory=list)
    iterations: int = 0
    max_violation: float = 0.0
    residuals: Dict[str, Any] = field(default_factory=dict)

    def require_optimal(self, context: str = "") -> "SdpSolution":
        if self.status is not SdpStatus.OPTIMAL:
            raise SdpFailure(f"SDP {context} non risolto: stato {self.status.value}", self.residuals)
        return self


# ---------------------------------------------------------------------------
# Costruzione dei problemi
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HermitianVar:
    """Variabile hermitiana dim×dim: occupa dim² coordinate da offset."""
    offset: int
    dim: int
    name: str = ""

    @property
    def size(self) -> int:
        return self.dim * self.dim

    def value(self, x: np.ndarray) -> np.ndarray:
        coords = x[self.offset:self.offset + self.size]
        return hermitize(np.tensordot(coords, hermitian_basis(self.dim), axes=1))


def scaled_identity(dim: int, scale: float = 1.0) -> LinearMap:
    """Mappa scalare s ↦ scale·s·I_dim (per variabili 1×1)."""
    return lambda m: scale * np.real(m[0, 0]) * np.eye(dim, dtype=complex)


def place_block(sizes: Sequence[int], row: int, col: int, scale: float = 1.0) -> LinearMap:
    """
    Mappa X ↦ matrice a blocchi con X in (row, col) e X† in (col, row).
    """
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])

    def apply(m: np.ndarray) -> np.ndarray:
        out = np.zeros((total, total), dtype=complex)
        r0, c0 = offsets[row], offsets[col]
        out[r0:r0 + sizes[row], c0:c0 + sizes[col]] += scale * m
        if row != col:
            out[c0:c0 + sizes[col], r0:r0 + sizes[row]] += scale * m.conj().T
        return out

    return apply


class SdpBuilder:
    """
    Costruttore di SdpProblem a partire da variabili hermitiane.

    I vincoli si esprimono come somme di mappe lineari applicate alle
    variabili: Σ f(X) + C ⪰ 0 oppure Σ f(X) = R (uguaglianza hermitiana,
    imposta componente per componente sulla base hermitiana).
    """

    def __init__(self) -> None:
        self.n_vars = 0
        self._objective: Dict[int, float] = {}
        self._blocks: List[LmiBlock] = []
        self._equalities: List[Tuple[np.ndarray, float]] = []
        self._basis_cache: Dict[int, np.ndarray] = {}

    def _basis(self, dim: int) -> np.ndarray:
        if dim not in self._basis_cache:
            self._basis_cache[dim] = hermitian_basis(dim)
        return self._basis_cache[dim]

    def hermitian(self, dim: int, name: str = "") -> HermitianVar:
        var = HermitianVar(self.n_vars, dim, name)
        self.n_vars += var.size
        return var

    def scalar(self, name: str = "") -> HermitianVar:
        return self.hermitian(1, name)

    @property
    def n_blocks(self) -> int:
        return len(self._blocks)

    def add_objective(self, var: HermitianVar, weight: Union[float, np.ndarray]) -> None:
        """Aggiunge Re Tr[W X] (o w·x per gli scalari) all'obiettivo."""
        w = np.array([[weight]], dtype=complex) if np.isscalar(weight) else np.asarray(weight, dtype=complex)
        for j, b in enumerate(self._basis(var.dim)):
            coeff = float(np.real(np.trace(w @ b)))
            if coeff != 0.0:
                self._objective[var.offset + j] = self._objective.get(var.offset + j, 0.0) + coeff

    def _expand(self, terms: Sequence[Tuple[HermitianVar, LinearMap]]) -> Dict[int, np.ndarray]:
        coefficients: Dict[int, np.ndarray] = {}
        for var, fn in terms:
            for j, b in enumerate(self._basis(var.dim)):
                image = np.asarray(fn(b), dtype=complex)
                if np.max(np.abs(image)) == 0.0:
                    continue
                idx = var.offset + j
                coefficients[idx] = coefficients[idx] + image if idx in coefficients else image
        return coefficients

    def add_lmi(
        self,
        terms: Sequence[Tuple[HermitianVar, LinearMap]],
        constant: np.ndarray,
        label: str = "",
    ) -> None:
        """Vincolo Σ f(X) + constant ⪰ 0."""
        constant = np.asarray(constant, dtype=complex)
        self._blocks.append(LmiBlock(-constant, self._expand(terms), label))

    def add_equality(
        self,
        terms: Sequence[Tuple[HermitianVar, LinearMap]],
        rhs: np.ndarray,
    ) -> None:
        """Vincolo hermitiano Σ f(X) = rhs."""
        rhs = np.atleast_2d(np.asarray(rhs, dtype=complex))
        out_basis = self._basis(rhs.shape[0])
        coefficients = self._expand(terms)
        for b in out_basis:
            a = np.zeros(self.n_vars)
            for idx, image in coefficients.items():
                a[idx] = float(np.real(np.trace(b @ image)))
            self._equalities.append((a, float(np.real(np.trace(b @ rhs)))))

    def build(self, maximize: bool = False) -> SdpProblem:
        c = np.zeros(self.n_vars)
        for idx, coeff in self._objective.items():
            c[idx] = coeff
        # le uguaglianze costruite prima di nuove variabili vanno estese
        equalities = [
            (np.concatenate([a, np.zeros(self.n_vars - a.size)]), b) for a, b in self._equalities
        ]
        problem = SdpProblem(self.n_vars, c, list(self._blocks), equalities, maximize)
        problem.validate()
        return problem


# ---------------------------------------------------------------------------
# Risoluzione
# ---------------------------------------------------------------------------


def _to_cvxopt(problem: SdpProblem) -> Dict[str, Any]:
    n = problem.n_vars
    gs, hs = [], []
    for block in problem.blocks:
        size = 2 * block.dim
        rows: List[int] = []
        cols: List[int] = []
        vals: List[float] = []
        for i, coeff in block.coefficients.items():
            column = -complex_to_real_embedding(coeff).ravel(order="F")
            nz = np.flatnonzero(column)
            rows.extend(nz.tolist())
            cols.extend([i] * nz.size)
            vals.extend(column[nz].tolist())
        gs.append(spmatrix(vals, rows, cols, (size * size, n), "d"))
        hs.append(matrix(np.ascontiguousarray(-complex_to_real_embedding(block.constant))))
    c = -problem.objective if problem.maximize else problem.objective
    args: Dict[str, Any] = {"c": matrix(np.ascontiguousarray(c, dtype=float)), "Gs": gs, "hs": hs}
    if problem.equalities:
        a = np.array([eq[0] for eq in problem.equalities], dtype=float)
        b = np.array([eq[1] for eq in problem.equalities], dtype=float)
        args["A"] = matrix(np.ascontiguousarray(a))
        args["b"] = matrix(np.ascontiguousarray(b))
    return args


def solve(problem: SdpProblem, gap_tol: Optional[float] = None) -> SdpSolution:
    """
    Risolve un SdpProblem.

    Args:
        problem: Problema in forma standard.
        gap_tol: Gap di dualità relativo accettato (default Config.SDP_GAP_TOL).

    Returns:
        SdpSolution: OPTIMAL solo con gap relativo ≤ gap_tol e vincoli
        soddisfatti entro Config.SDP_FEAS_TOL; altrimenti MAX_ITER con i
        residui dell'ultimo iterato.

    Raises:
        NumericalFailure: Se il solutore non restituisce alcun iterato.
    """
    gap_tol = Config.SDP_GAP_TOL if gap_tol is None else gap_tol
    problem.validate()
    args = _to_cvxopt(problem)
    options = {
        "show_progress": False,
        "maxiters": Config.SDP_MAX_ITERS,
        "abstol": Config.SDP_INTERNAL_ABSTOL,
        "reltol": Config.SDP_INTERNAL_RELTOL,
        "feastol": Config.SDP_INTERNAL_FEASTOL,
    }
    try:
        sol = solvers.sdp(options=options, **args)
    except (ValueError, ArithmeticError) as e:
        raise NumericalFailure(f"Il solutore conico ha rifiutato il problema: {e}") from e

    status_text = sol["status"]
    iterations = int(sol.get("iterations", 0) or 0)
    logger.debug(f"cvxopt: stato={status_text}, iterazioni={iterations}")

    if status_text == "primal infeasible":
        value = -np.inf if problem.maximize else np.inf
        return SdpSolution(None, value, value, 0.0, SdpStatus.INFEASIBLE, iterations=iterations)
    if status_text == "dual infeasible":
        value = np.inf if problem.maximize else -np.inf
        return SdpSolution(None, value, value, 0.0, SdpStatus.UNBOUNDED, iterations=iterations)

    sign = -1.0 if problem.maximize else 1.0
    primal = sign * float(sol["primal objective"]) if sol["primal objective"] is not None else np.nan
    dual = sign * float(sol["dual objective"]) if sol["dual objective"] is not None else np.nan
    gap = abs(primal - dual)
    residuals: Dict[str, Any] = {
        "solver_status": status_text,
        "primal_infeasibility": sol.get("primal infeasibility"),
        "dual_infeasibility": sol.get("dual infeasibility"),
        "gap": gap,
        "iterations": iterations,
    }
    if sol["x"] is None or sol["zs"] is None:
        raise NumericalFailure(
            f"Il solutore conico si è arrestato senza iterato (stato {status_text})", residuals
        )

    x = np.array(sol["x"]).ravel()
    duals = [real_to_complex_dual(np.array(z)) for z in sol["zs"]]
    violation = 0.0
    for block in problem.blocks:
        w = np.linalg.eigvalsh(block.evaluate(x))
        violation = max(violation, float(-w[0]) if w.size else 0.0)
    residuals["max_violation"] = violation

    scale = 1.0 + max(float(np.max(np.abs(b.constant))) for b in problem.blocks)
    problems: List[str] = []
    if not gap <= gap_tol * (1.0 + abs(primal)):
        problems.append(f"gap di dualità {gap:.3e} oltre {gap_tol:.1e}")
    if violation > Config.SDP_FEAS_TOL * scale:
        problems.append(f"violazione dei vincoli LMI {violation:.3e}")
    if status_text != "optimal":
        pres, dres = residuals["primal_infeasibility"], residuals["dual_infeasibility"]
        if pres is None or dres is None or max(pres, dres) > Config.SDP_FEAS_TOL:
            problems.append(f"residui {pres}/{dres} senza certificato (stato {status_text})")

    status = SdpStatus.OPTIMAL
    if problems:
        status = SdpStatus.MAX_ITER
        logger.warning(f"SDP non certificato: {'; '.join(problems)}")

    return SdpSolution(
        x=x,
        primal_value=primal,
        dual_value=dual,
        gap=gap,
        status=status,
        block_duals=duals,
        iterations=iterations,
        max_violation=violation,
        residuals=residuals,
    )
