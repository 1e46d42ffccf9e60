"""
Command results and their rendering as single values, CSV or JSON.
"""

import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

import pandas as pd


@dataclass
class CommandResult:
    """Outcome of one command: ordered scalar fields and an optional table"""

    command: str
    fields: Dict[str, Any] = field(default_factory=dict)
    table: Optional[pd.DataFrame] = None
    primary: Optional[str] = None
    text: Optional[str] = None
    ok: bool = True


def _is_missing(value: Any) -> bool:
    return value is None or (isinstance(value, float) and math.isnan(value))


def format_value(value: Any, precision: int) -> str:
    """Render one value with `precision` significant digits"""
    if _is_missing(value):
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float, Fraction)) or hasattr(value, "__float__"):
        v = float(value)
        if math.isnan(v):
            return ""
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        text = f"{v:.{precision}g}"
        return "0" if text == "-0" else text
    return str(value)


def json_value(value: Any, precision: int) -> Any:
    """JSON counterpart of format_value: same rounding, inf as a string"""
    text = format_value(value, precision)
    if _is_missing(value) or text == "":
        return None
    if isinstance(value, bool) or isinstance(value, str):
        return value
    if text in ("inf", "-inf"):
        return text
    try:
        return float(text)
    except ValueError:
        return text


def _formatted_table(table: pd.DataFrame, precision: int) -> pd.DataFrame:
    out = table.copy()
    for column in out.columns:
        out[column] = [format_value(v, precision) for v in out[column]]
    return out


def render_text(result: CommandResult, precision: int) -> str:
    """Single value, key,value CSV, table CSV or preformatted text"""
    if result.text is not None:
        return result.text.rstrip("\n") + "\n"
    parts: List[str] = []
    if result.primary is not None:
        parts.append(format_value(result.fields[result.primary], precision))
    elif result.fields:
        buf = io.StringIO()
        row = {k: format_value(v, precision) for k, v in result.fields.items()}
        pd.DataFrame([row]).to_csv(buf, index=False)
        parts.append(buf.getvalue().rstrip("\n"))
    if result.table is not None:
        buf = io.StringIO()
        _formatted_table(result.table, precision).to_csv(buf, index=False)
        parts.append(buf.getvalue().rstrip("\n"))
    return "\n".join(parts) + "\n"


def render_json(result: CommandResult, precision: int) -> str:
    payload: Dict[str, Any] = {"command": result.command, "ok": result.ok}
    for key, value in result.fields.items():
        payload[key] = json_value(value, precision)
    if result.table is not None:
        payload["table"] = [
            {str(k): json_value(v, precision) for k, v in record.items()}
            for record in result.table.to_dict(orient="records")
        ]
    return json.dumps(payload, indent=2)
