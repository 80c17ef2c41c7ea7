"""Text and machine renderings of command results, and atomic output."""

import os
import sys
import tempfile
from typing import Any, List, Optional

from app.core.models import AuditReport, SpectrumReport, SteadyStateResult
from app.core.schemas import EvolveFile, OracleRecord, ReportFile, SpectrumRecord, to_jsonable

MACHINE = "machine"
TEXT = "text"


def fmt(value: Any) -> str:
    """Shortest round-trip text for numbers, so text and machine output agree."""
    value = to_jsonable(value)
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, list) and len(value) == 2 and all(isinstance(v, float) for v in value):
        re, im = value
        return f"{re!r}{'+' if im >= 0 else '-'}{abs(im)!r}i"
    return repr(value) if isinstance(value, float) else str(value)


def _scalar_evidence(evidence: dict) -> str:
    parts = []
    for key, value in evidence.items():
        if isinstance(value, (bool, int, float)) or value is None:
            parts.append(f"{key}={fmt(value)}")
    return " ".join(parts)


def _matrix_lines(matrix, indent: str = "    ") -> List[str]:
    return [indent + "  ".join(fmt(z) for z in row) for row in matrix]


def render_steady_lines(result: SteadyStateResult) -> List[str]:
    lines = [
        f"multiplicity: {result.multiplicity}",
        f"gap: {fmt(result.gap)}",
        f"margin: {fmt(result.margin)}",
    ]
    if result.extraction_error:
        lines.append(f"extraction error: {result.extraction_error}")
    for k, state in enumerate(result.states, start=1):
        lines.append(f"state {k}:")
        lines.extend(_matrix_lines(state))
    return lines


def render_audit(report: AuditReport, output_format: str) -> str:
    if output_format == MACHINE:
        return ReportFile.from_report(report).model_dump_json(indent=2) + "\n"

    summary = report.model_summary
    lines = [
        f"model: {summary.get('name') or '-'} (d={summary['dim']}, channels={summary['channels']}, "
        f"layout={summary['layout']})",
        f"tol: {fmt(report.tol)}  seed: {report.seed}  search draws: {report.search_draws}",
        "",
        f"{'criterion':<12} {'applicable':<10} {'passed':<7} {'borderline':<10} evidence",
    ]
    for v in report.verdicts:
        lines.append(
            f"{v.criterion.value:<12} {fmt(v.applicable):<10} {fmt(v.passed):<7} "
            f"{fmt(v.borderline):<10} {_scalar_evidence(v.evidence)}"
        )
        if v.notes:
            lines.append(f"{'':<12} {v.notes}")
    lines.append("")
    if report.oracle is not None:
        lines.extend(render_steady_lines(report.oracle))
    if report.spectrum is not None:
        lines.append(f"pure-imaginary eigenvalues: {report.spectrum.pure_imaginary_count}")
    lines.append(f"consistency: {fmt(report.consistency)}")
    lines.append("flags: " + " ".join(f"{k}={fmt(v)}" for k, v in report.flags.items()))
    lines.extend(f"note: {note}" for note in report.notes)
    return "\n".join(lines) + "\n"


def render_steady(result: SteadyStateResult, output_format: str) -> str:
    if output_format == MACHINE:
        return OracleRecord.from_result(result).model_dump_json(indent=2) + "\n"
    return "\n".join(render_steady_lines(result)) + "\n"


def render_spectrum(report: SpectrumReport, output_format: str) -> str:
    if output_format == MACHINE:
        return SpectrumRecord.from_report(report).model_dump_json(indent=2) + "\n"
    lines = ["eigenvalues (real part descending):"]
    lines.extend(f"  {fmt(value)}" for value in report.eigenvalues)
    lines.append(f"gap: {fmt(report.gap)}")
    lines.append(f"near-kernel eigenvalues: {report.kernel_count}")
    lines.append(f"pure-imaginary eigenvalues: {report.pure_imaginary_count}")
    lines.append(f"max real part: {fmt(report.max_real)}")
    return "\n".join(lines) + "\n"


def render_evolve(table: EvolveFile, output_format: str) -> str:
    if output_format == MACHINE:
        return table.model_dump_json(indent=2) + "\n"
    d = len(table.rows[0].populations) if table.rows else 0
    header = ["sample", "t", "distance", "trace_residual", "min_eigenvalue"]
    header += [f"p{k}" for k in range(1, d + 1)]
    lines = ["\t".join(header)]
    for row in table.rows:
        cells = [str(row.sample), fmt(row.t), fmt(row.distance), fmt(row.trace_residual)]
        cells.append(fmt(row.min_eigenvalue))
        cells.extend(fmt(p) for p in row.populations)
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def write_output(text: str, out: Optional[str] = None) -> None:
    """Write to standard output, or atomically replace `out`."""
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".lgks-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp_path, out)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
