"""
Rendering of results as human tables, CSV and JSON.

CSV and JSON carry every float at 6 significant digits so that repeated
runs produce byte-identical files. Table mode follows the familiar report
layout: minutes to 2 decimals, λ to 1 decimal.
"""

import io
import json
import math
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import pandas as pd

from ..analysis.occupancy_sim import SimResult
from ..analysis.sensitivity import SweepRow
from ..model.capacity import CapacityReport
from ..model.pairwise import PairTable


FLOAT_FORMAT = "%.6g"


def round_sig(value: float) -> float:
    return float(FLOAT_FORMAT % value)


def json_tree(value: Any) -> Any:
    """Copy of a JSON-compatible tree with floats cut to 6 significant digits."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return None
        return round_sig(value)
    if isinstance(value, Mapping):
        return {str(key): json_tree(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_tree(item) for item in value]
    return value


def render_json(value: Any) -> str:
    return json.dumps(json_tree(value), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def render_csv(rows: Iterable[Dict[str, Any]], columns: Sequence[str]) -> str:
    frame = pd.DataFrame(list(rows), columns=list(columns))
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


def _table(headers: Sequence[str], rows: List[Sequence[str]]) -> str:
    widths = [max(len(str(cell)) for cell in column) for column in zip(headers, *rows)]
    lines = ["  ".join(str(cell).rjust(width) for cell, width in zip(headers, widths))]
    lines.append("  ".join("-" * width for width in widths))
    for row in rows:
        lines.append("  ".join(str(cell).rjust(width) for cell, width in zip(row, widths)))
    return "\n".join(lines) + "\n"


def _minutes(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.2f}"


def _count(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.1f}"


def capacity_table(reports: Sequence[CapacityReport], floor: bool = False) -> str:
    headers = ["Runway", "D_temp (min)", "T̄_thr (min)", "λ"]
    if floor:
        headers.append("⌊λ⌋")
    rows = []
    for report in reports:
        row = [report.runway_id, _minutes(report.d_temp), _minutes(report.t_bar_thr), _count(report.lambda_rwy)]
        if floor:
            row.append(str(report.lambda_floor))
        rows.append(row)
    text = _table(headers, rows)
    for report in reports:
        text += f"\n{report.runway_id} paths by mean flight time:\n"
        text += _table(
            ["Path", "ρ", "t̄_tot (min)"],
            [[entry.path, f"{entry.proportion:.2f}", _minutes(entry.mean_time)]
             for entry in report.per_path_mean_times],
        )
    return text


def pairs_table(table: PairTable) -> str:
    rows = [
        [row["lead_path"], row["lead_class"], row["trail_path"], row["trail_class"],
         f"{row['probability']:.4f}", _minutes(row["t0_min"]), _minutes(row["delta_t_min"]), row["binding"]]
        for row in table.to_rows()
    ]
    return _table(["Lead", "Class", "Trail", "Class", "P", "t0* (min)", "ΔT (min)", "Binding"], rows)


def sweep_table(rows: Sequence[SweepRow]) -> str:
    body = [
        [f"{row.regime[0]:g}/{row.regime[1]:g}", f"{row.speed_scale:+.2f}", _minutes(row.d_temp),
         _minutes(row.t_bar_thr), _count(row.lambda_rwy), "✓" if row.ok else f"✗ {row.status}"]
        for row in rows
    ]
    return _table(["S/S_thr (NM)", "Speed", "D_temp (min)", "T̄_thr (min)", "λ", "Status"], body)


def simulation_table(result: SimResult, analytic_lambda: float) -> str:
    deviation = (result.time_avg_occupancy - analytic_lambda) / analytic_lambda
    lines = [
        f"Aircraft simulated:        {result.n_aircraft} (seed {result.rng_seed})",
        f"Window:                    {result.window[0]:.2f} – {result.window[1]:.2f} min",
        f"Time-averaged occupancy:   {result.time_avg_occupancy:.3f}",
        f"Analytic λ:                {analytic_lambda:.3f} ({deviation:+.2%})",
        f"Mean occupancy at landing: {result.mean_occupancy:.3f}",
        f"Max occupancy:             {result.max_occupancy}",
        f"Mean threshold spacing:    {result.realized_mean_thr_spacing:.3f} min",
    ]
    return "\n".join(lines) + "\n"


def violations_text(name: str, violations: Sequence[str]) -> str:
    if not violations:
        return f"✓ {name}: no violations\n"
    lines = [f"✗ {name}: {len(violations)} violation(s)"]
    lines.extend(f"  - {violation}" for violation in violations)
    return "\n".join(lines) + "\n"
