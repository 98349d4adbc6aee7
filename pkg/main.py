#!/usr/bin/env python3
"""
PEXC - Esclusione di stati e canali quantistici.

Entry point dell'applicazione con interfaccia a linea di comando.
Calcola probabilità d'errore di esclusione, esponenti empirici e la scala
dei limiti inversi (C♭, κ, Petz, raggi di canale) a partire da file JSON.

Example:
    $ python main.py exclude --input fixtures/identical3.json
    $ python main.py cflat --input fixtures/seven-state.json
    $ python main.py report --input fixtures/classical-pair.json --format csv
    $ python main.py verify --seed 42
"""

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

from bound_ladder import (
    BoundReport,
    channel_report,
    closed_form_petz_bound,
    state_report,
)
from channels import ChannelEnsemble, belavkin_channel_radius, geometric_channel_radius_sdp
from config import MESSAGES, Config
from errors import NotApplicable, ValidationError
from exclusion_tasks import (
    classical_channel_exponent,
    empirical_exponent,
    seven_state_witness,
    state_discrimination_error,
    state_exclusion_error,
)
from operators import StateEnsemble
from radii import classical_chernoff, kappa_sdp, log_euclidean_chernoff
from report_exporter import ExportFormat, ReportExporter
from utils import Cache, format_duration, format_number, setup_logging

FIXTURES_DIR = Path(__file__).parent / "fixtures"

COMMANDS = (
    "exclude", "exponent", "cflat", "kappa", "petz-bound",
    "channel-radius", "classical-exponent", "report", "verify",
)

Ensemble = Union[StateEnsemble, ChannelEnsemble]


def tolerance(value: str) -> float:
    """Tipo argparse per --tol, vincolato a [1e-10, 1e-2]."""
    tol = float(value)
    if not 1e-10 <= tol <= 1e-2:
        raise argparse.ArgumentTypeError(f"tol deve stare in [1e-10, 1e-2] (trovato {value})")
    return tol


def positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"atteso un intero ≥ 1 (trovato {value})")
    return n


def build_parser() -> argparse.ArgumentParser:
    """
    Costruisce il parser della linea di comando.

    Returns:
        argparse.ArgumentParser: Parser con un sottocomando per compito.
    """
    parser = argparse.ArgumentParser(
        prog="pexc",
        description="Esclusione di stati e canali quantistici: errori, esponenti e limiti inversi.",
        epilog="Esempio: python main.py report --input fixtures/classical-pair.json",
        formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument(
        "command",
        choices=COMMANDS,
        help="Compito da eseguire"
    )
    parser.add_argument(
        "-i", "--input",
        type=Path,
        help="File JSON con l'ensemble di stati o di canali"
    )
    parser.add_argument(
        "-o", "--output",
        type=Path,
        help="Salva il risultato su file invece di stamparlo"
    )
    parser.add_argument(
        "--format",
        choices=["json", "csv"],
        help="Formato dell'output (default: testo leggibile)"
    )

    # Parametri numerici
    parser.add_argument(
        "--alpha",
        type=float,
        nargs="+",
        default=[1.5, 2.0],
        help="Ordini α per il limite di Petz (default: 1.5 2.0)"
    )
    parser.add_argument(
        "--ell",
        type=int,
        help="Livello ℓ dell'SDP geometrico (α = 1 + 2^-ℓ); senza, raggio di Belavkin–Staszewski"
    )
    parser.add_argument(
        "--n-max",
        type=positive_int,
        default=4,
        help="Numero massimo di copie per l'esponente empirico (default: 4)"
    )
    parser.add_argument(
        "--tol",
        type=tolerance,
        default=1e-4,
        help="Tolleranza di convergenza dei raggi di canale (default: 1e-4)"
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=Config.SEED,
        help=f"Seme per le ripartenze casuali (default: {Config.SEED})"
    )
    parser.add_argument(
        "--discrimination",
        action="store_true",
        help="Con 'exclude', riporta anche l'errore di discriminazione"
    )

    # Behavior options
    parser.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="Mostra informazioni dettagliate durante l'esecuzione"
    )
    parser.add_argument(
        "--no-cache",
        action="store_true",
        help="Ignora la cache delle probabilità d'errore n-fold"
    )
    parser.add_argument(
        "--clear-cache",
        action="store_true",
        help="Svuota la cache prima dell'esecuzione"
    )
    return parser


def load_input(path: Optional[Path]) -> Ensemble:
    """
    Legge un ensemble di stati ({"states"|"kets"}) o di canali ({"channels"}).

    Raises:
        ValidationError: File mancante, JSON malformato (con la riga) o
            contenuto non valido.
    """
    if path is None:
        raise ValidationError("Serve --input con un file JSON")
    if not path.exists():
        raise ValidationError(MESSAGES["file_not_found"].format(path=path))
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValidationError(
            MESSAGES["invalid_json"].format(path=path, line=e.lineno, error=e.msg)
        ) from e
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: atteso un oggetto JSON")
    try:
        if "channels" in data:
            return ChannelEnsemble.from_dict(data)
        return StateEnsemble.from_dict(data)
    except (KeyError, TypeError) as e:
        raise ValidationError(f"{path}: campo mancante o di tipo errato ({e})") from e


def require_states(ensemble: Ensemble, command: str) -> StateEnsemble:
    if not isinstance(ensemble, StateEnsemble):
        raise NotApplicable(f"Il comando '{command}' richiede un ensemble di stati")
    return ensemble


def require_channels(ensemble: Ensemble, command: str) -> ChannelEnsemble:
    if not isinstance(ensemble, ChannelEnsemble):
        raise NotApplicable(f"Il comando '{command}' richiede un ensemble di canali")
    return ensemble


# ---------------------------------------------------------------------------
# Comandi
# ---------------------------------------------------------------------------


def run_exclude(args: argparse.Namespace) -> Dict[str, Any]:
    e = require_states(load_input(args.input), "exclude")
    p_err, gamma, povm = state_exclusion_error(e)
    result: Dict[str, Any] = {
        "p_err": p_err,
        "neg_log_p_err": math.inf if p_err == 0 else -math.log(p_err),
        "dual_trace": gamma.trace,
    }
    if args.format == "json":
        result["dual_operator"] = gamma.to_dict()
        result["povm"] = povm.to_dict()
    if args.discrimination:
        result["p_err_discrimination"] = state_discrimination_error(e)
    return result


def run_exponent(args: argparse.Namespace) -> Dict[str, Any]:
    e = require_states(load_input(args.input), "exponent")
    estimate = empirical_exponent(e, args.n_max, use_cache=not args.no_cache)
    result: Dict[str, Any] = {f"exponent[n={n}]": v for n, v in enumerate(estimate.per_n, start=1)}
    result["slope"] = estimate.slope
    if estimate.perfect_at is not None:
        result["perfect_at"] = estimate.perfect_at
    return result


def run_cflat(args: argparse.Namespace) -> Dict[str, Any]:
    e = require_states(load_input(args.input), "cflat")
    radius = log_euclidean_chernoff(e.states, args.seed)
    return {"cflat": radius.value, "weights": radius.optimal_weights.weights.tolist()}


def run_kappa(args: argparse.Namespace) -> Dict[str, Any]:
    e = require_states(load_input(args.input), "kappa")
    kappa, neg_log = kappa_sdp(e.states)
    return {"kappa": kappa, "neg_log_kappa": neg_log}


def run_petz_bound(args: argparse.Namespace) -> Dict[str, Any]:
    e = require_states(load_input(args.input), "petz-bound")
    return {f"petz[alpha={a:g}]": closed_form_petz_bound(e, a) for a in args.alpha}


def run_channel_radius(args: argparse.Namespace) -> Dict[str, Any]:
    ne = require_channels(load_input(args.input), "channel-radius")
    if args.ell is not None:
        radius = geometric_channel_radius_sdp(ne.quantum_channels(), args.ell)
        return {"radius": radius.value, "ell": args.ell, "alpha": radius.details.get("alpha")}
    radius = belavkin_channel_radius(ne.quantum_channels(), args.tol)
    return {
        "radius": radius.value,
        "ell": radius.details.get("ell"),
        "converged": radius.details.get("converged"),
        "extrapolated": radius.details.get("extrapolated"),
    }


def run_classical_exponent(args: argparse.Namespace) -> Dict[str, Any]:
    ensemble = load_input(args.input)
    if isinstance(ensemble, ChannelEnsemble):
        value, best_y = classical_channel_exponent(ensemble)
        return {"exponent": value, "best_input": best_y}
    if not ensemble.is_classical():
        raise NotApplicable("L'ensemble non è diagonale: usare 'cflat'")
    radius = classical_chernoff(ensemble.diagonals(), args.seed)
    return {"exponent": radius.value, "weights": radius.optimal_weights.weights.tolist()}


def run_report(args: argparse.Namespace) -> BoundReport:
    ensemble = load_input(args.input)
    if isinstance(ensemble, ChannelEnsemble):
        return channel_report(ensemble, args.n_max, args.tol)
    return state_report(ensemble, args.n_max, args.alpha, args.seed, use_cache=not args.no_cache)


# ---------------------------------------------------------------------------
# Verifica sui fixture
# ---------------------------------------------------------------------------


def verification_checks(seed: int, fixtures: Path = FIXTURES_DIR) -> List[Tuple[str, Callable[[], bool]]]:
    """Controlli deterministici sui file in ``fixtures``."""

    def states(name: str) -> StateEnsemble:
        return require_states(load_input(fixtures / name), "verify")

    def identical_error() -> bool:
        return abs(state_exclusion_error(states("identical3.json"))[0] - 1 / 3) <= 1e-6

    def identical_cflat() -> bool:
        return abs(log_euclidean_chernoff(states("identical3.json").states, seed).value) <= 1e-7

    def seven_state_error() -> bool:
        return state_exclusion_error(states("seven-state.json"))[0] > 0

    def seven_state_cflat() -> bool:
        return math.isinf(log_euclidean_chernoff(states("seven-state.json").states, seed).value)

    def seven_state_witness_checks() -> bool:
        return all(seven_state_witness()[1].values())

    def classical_cflat() -> bool:
        e = states("classical-pair.json")
        chernoff = classical_chernoff(e.diagonals(), seed).value
        return abs(chernoff - log_euclidean_chernoff(e.states, seed).value) <= 1e-6

    def classical_kappa() -> bool:
        e = states("classical-pair.json")
        return log_euclidean_chernoff(e.states, seed).value <= kappa_sdp(e.states)[1] + 1e-6

    def classical_petz() -> bool:
        e = states("classical-pair.json")
        one_shot = -math.log(state_exclusion_error(e)[0])
        return closed_form_petz_bound(e, 2.0) >= one_shot - 1e-6

    def classical_report() -> bool:
        report = state_report(states("classical-pair.json"), 6, seed=seed, use_cache=False)
        return report.all_orderings_satisfied

    def classical_channels() -> bool:
        ne = require_channels(load_input(fixtures / "classical-channels.json"), "verify")
        exact, _ = classical_channel_exponent(ne)
        radius = belavkin_channel_radius(ne.quantum_channels(), 5e-5).value
        return abs(radius - exact) <= 2e-4

    return [
        ("identical3: P_err = 1/3", identical_error),
        ("identical3: C♭ = 0", identical_cflat),
        ("seven-state: P_err > 0", seven_state_error),
        ("seven-state: C♭ = inf", seven_state_cflat),
        ("seven-state: testimone valido", seven_state_witness_checks),
        ("classical-pair: Chernoff classica = C♭", classical_cflat),
        ("classical-pair: C♭ ≤ −ln κ", classical_kappa),
        ("classical-pair: Petz ≥ −ln P_err", classical_petz),
        ("classical-pair: confronti del report", classical_report),
        ("classical-channels: R^Ĝ = max_y C", classical_channels),
    ]


def run_verify(args: argparse.Namespace) -> Tuple[int, int]:
    """
    Esegue i controlli e stampa l'esito di ciascuno.

    Returns:
        Tuple: (controlli superati, totale).
    """
    logger = logging.getLogger("pexc")
    checks = verification_checks(args.seed)
    passed = 0
    for name, check in checks:
        try:
            ok = bool(check())
        except (ValueError, RuntimeError) as e:
            logger.error(f"Controllo '{name}' interrotto: {e}")
            ok = False
        passed += ok
        print(f"{'✓' if ok else '✗'} {name}")
    return passed, len(checks)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _plain(value: Any) -> Any:
    if isinstance(value, float) and math.isinf(value):
        return format_number(value)
    return value


def render_result(result: Dict[str, Any], fmt: Optional[str]) -> str:
    """Rende il dizionario di un comando come testo, JSON o CSV."""
    if fmt == "json":
        return json.dumps({k: _plain(v) for k, v in result.items()}, ensure_ascii=False, indent=2) + "\n"
    rows = [(k, format_number(v) if isinstance(v, float) else json.dumps(v))
            for k, v in result.items() if v is not None]
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["name", "value"])
        writer.writerows(rows)
        return buffer.getvalue()
    width = max((len(k) for k, _ in rows), default=0)
    return "".join(f"{k.ljust(width)} = {v}\n" for k, v in rows)


def emit(text: str, output: Optional[Path]) -> None:
    if output is None:
        print(text, end="")
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text, encoding="utf-8")
    print(MESSAGES["report_written"].format(path=output))


HANDLERS: Dict[str, Callable[[argparse.Namespace], Dict[str, Any]]] = {
    "exclude": run_exclude,
    "exponent": run_exponent,
    "cflat": run_cflat,
    "kappa": run_kappa,
    "petz-bound": run_petz_bound,
    "channel-radius": run_channel_radius,
    "classical-exponent": run_classical_exponent,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Funzione principale dell'applicazione.

    Returns:
        int: Exit code (0 successo, 1 verifica fallita, 2 input non valido,
        3 errore numerico).
    """
    args = build_parser().parse_args(argv)

    logger = setup_logging(verbose=args.verbose)
    logger.info(f"Avvio PEXC: {args.command}")
    start_time = time.time()

    try:
        Config.validate()
    except ValueError as e:
        print(f"Errore configurazione: {e}", file=sys.stderr)
        return 2

    cache = Cache()
    if args.clear_cache:
        cache.clear()
        logger.info("Cache svuotata")
    else:
        removed = cache.cleanup_expired()
        if removed:
            logger.info(f"Rimosse {removed} voci scadute dalla cache")

    try:
        if args.command == "verify":
            passed, total = run_verify(args)
            if passed < total:
                print(MESSAGES["verify_failed"].format(failed=total - passed))
                return 1
            print(MESSAGES["verify_ok"].format(passed=passed, total=total))
        elif args.command == "report":
            report = run_report(args)
            fmt = ExportFormat(args.format) if args.format else ExportFormat.TXT
            emit(ReportExporter().render(report, fmt), args.output)
        else:
            emit(render_result(HANDLERS[args.command](args), args.format), args.output)
    except ValueError as e:
        print(MESSAGES["invalid_input"].format(error=e), file=sys.stderr)
        return 2
    except RuntimeError as e:
        print(MESSAGES["numerical_failure"].format(error=e), file=sys.stderr)
        return 3

    logger.info(f"Tempo di esecuzione: {format_duration(time.time() - start_time)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
