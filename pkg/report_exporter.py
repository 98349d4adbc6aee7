"""
Modulo per l'export dei BoundReport in vari formati.

Supporta:
- JSON (strutturato, rileggibile con read_report)
- CSV (una riga per voce, per spreadsheet)
- TXT (testo semplice per il terminale)
- Markdown (per documentazione)
"""

import csv
import io
import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional

from bound_ladder import BoundEntry, BoundReport
from errors import ValidationError
from utils import format_number


class ExportFormat(Enum):
    """Formati di export supportati."""
    JSON = "json"
    CSV = "csv"
    TXT = "txt"
    MARKDOWN = "md"


@dataclass
class ExportOptions:
    """
    Opzioni per l'export.

    Attributes:
        include_parameters: Include i parametri di ogni voce.
        include_orderings: Include i confronti d'ordine.
        include_empirical: Include la sequenza empirica.
        sort_by: Campo per l'ordinamento delle voci ("value", "name" o "none").
        digits: Cifre significative nei formati testuali.
    """
    include_parameters: bool = True
    include_orderings: bool = True
    include_empirical: bool = True
    sort_by: str = "none"
    digits: Optional[int] = None


class ReportExporter:
    """
    Esportatore di BoundReport.

    Example:
        >>> exporter = ReportExporter()
        >>> exporter.export(report, Path("ladder.json"), ExportFormat.JSON)
        >>> print(exporter.render(report, ExportFormat.TXT))
    """

    def __init__(self) -> None:
        self.logger = logging.getLogger("pexc.exporter")

    def render(
        self,
        report: BoundReport,
        format: ExportFormat,
        options: Optional[ExportOptions] = None
    ) -> str:
        """
        Rende il report come stringa nel formato richiesto.

        Raises:
            ValidationError: Per formati non supportati.
        """
        options = options or ExportOptions()
        renderers: Dict[ExportFormat, Callable[[BoundReport, List[BoundEntry], ExportOptions], str]] = {
            ExportFormat.JSON: self._render_json,
            ExportFormat.CSV: self._render_csv,
            ExportFormat.TXT: self._render_txt,
            ExportFormat.MARKDOWN: self._render_markdown,
        }
        renderer = renderers.get(format)
        if not renderer:
            raise ValidationError(f"Formato non supportato: {format}")
        return renderer(report, self._sort_entries(report.entries, options), options)

    def export(
        self,
        report: BoundReport,
        path: Path,
        format: ExportFormat,
        options: Optional[ExportOptions] = None
    ) -> Path:
        """
        Scrive il report su file, correggendo l'estensione.

        Returns:
            Path: Percorso del file creato.
        """
        path = self._ensure_extension(path, format)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(self.render(report, format, options))
        self.logger.info(f"Report esportato in {path}")
        return path

    def _sort_entries(self, entries: List[BoundEntry], options: ExportOptions) -> List[BoundEntry]:
        if options.sort_by == "value":
            return sorted(entries, key=lambda e: math.inf if e.value is None else e.value)
        if options.sort_by == "name":
            return sorted(entries, key=lambda e: e.name)
        return list(entries)

    def _ensure_extension(self, path: Path, format: ExportFormat) -> Path:
        ext = f".{format.value}"
        if path.suffix.lower() != ext:
            return path.with_suffix(ext)
        return path

    # --- Renderer ---

    def _render_json(self, report: BoundReport, entries: List[BoundEntry], options: ExportOptions) -> str:
        data = report.to_dict()
        data["entries"] = [e.to_dict() for e in entries]
        if not options.include_parameters:
            for entry in data["entries"]:
                entry.pop("parameters", None)
        if not options.include_orderings:
            data["orderings"] = []
        if not options.include_empirical:
            data["empirical"] = None
        return json.dumps(data, ensure_ascii=False, indent=2)

    def _render_csv(self, report: BoundReport, entries: List[BoundEntry], options: ExportOptions) -> str:
        fieldnames = ["section", "name", "value", "kind", "anchor"]
        if options.include_parameters:
            fieldnames.append("parameters")
        fieldnames.append("error")

        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for entry in entries:
            row = {
                "section": "entry",
                "name": entry.name,
                "value": format_number(entry.value, options.digits),
                "kind": entry.kind,
                "anchor": entry.anchor,
                "error": entry.error or "",
            }
            if options.include_parameters:
                row["parameters"] = json.dumps(entry.parameters, sort_keys=True)
            writer.writerow(row)

        if options.include_empirical and report.empirical is not None:
            for n, value in enumerate(report.empirical.per_n, start=1):
                writer.writerow({"section": "empirical", "name": f"n={n}",
                                 "value": format_number(value, options.digits), "kind": "exponent"})

        if options.include_orderings:
            for o in report.orderings:
                writer.writerow({
                    "section": "ordering",
                    "name": f"{o.lhs} <= {o.rhs}",
                    "value": "ok" if o.satisfied else "violated",
                })
        return buffer.getvalue()

    def _render_txt(self, report: BoundReport, entries: List[BoundEntry], options: ExportOptions) -> str:
        lines = [f"Report ({report.subject})", "=" * 40]
        for key, value in report.metadata.items():
            lines.append(f"{key}: {value}")
        lines.append("")

        width = max((len(e.name) for e in entries), default=10)
        for entry in entries:
            value = format_number(entry.value, options.digits)
            suffix = f"  [errore: {entry.error}]" if entry.error else ""
            lines.append(f"{entry.name.ljust(width)}  {value}{suffix}")

        tightest = report.tightest
        if tightest:
            lines.append("")
            lines.append(f"Limite più stretto: {tightest.name} = {format_number(tightest.value, options.digits)}")

        if options.include_empirical and report.empirical is not None:
            lines.append("")
            lines.append("Esponente empirico:")
            for n, value in enumerate(report.empirical.per_n, start=1):
                lines.append(f"  n={n}: {format_number(value, options.digits)}")
            lines.append(f"  pendenza: {format_number(report.empirical.slope, options.digits)}")

        if options.include_orderings and report.orderings:
            lines.append("")
            lines.append("Confronti:")
            for o in report.orderings:
                mark = "✓" if o.satisfied else "✗"
                lines.append(f"  {mark} {o.lhs} ≤ {o.rhs}")
        return "\n".join(lines) + "\n"

    def _render_markdown(self, report: BoundReport, entries: List[BoundEntry], options: ExportOptions) -> str:
        lines = [f"# Report ({report.subject})", ""]
        for key, value in report.metadata.items():
            lines.append(f"- **{key}**: {value}")
        lines.extend(["", "| Voce | Valore | Tipo | Origine |", "|------|--------|------|---------|"])
        for entry in entries:
            value = format_number(entry.value, options.digits)
            lines.append(f"| `{entry.name}` | {value} | {entry.kind} | {entry.anchor} |")

        if options.include_orderings and report.orderings:
            lines.extend(["", "## Confronti", ""])
            for o in report.orderings:
                state = "ok" if o.satisfied else "**violato**"
                lines.append(f"- `{o.lhs}` ≤ `{o.rhs}`: {state}")
        return "\n".join(lines) + "\n"

    def get_supported_formats(self) -> List[str]:
        return [f.value for f in ExportFormat]


def read_report(path: Path) -> BoundReport:
    """
    Rilegge un report esportato in JSON.

    Raises:
        ValidationError: Se il file non è un report JSON valido.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        return BoundReport.from_dict(data)
    except json.JSONDecodeError as e:
        raise ValidationError(f"JSON non valido in {path} (riga {e.lineno}): {e.msg}") from e
    except (KeyError, TypeError) as e:
        raise ValidationError(f"Report non valido in {path}: {e}") from e
