"""
PassIngest.py

Reads and writes pass catalogs. The CSV layout is one pass per row:

    sat,site,t_start,t_max,t_end,el_start,el_max,el_end,az_start,az_max,az_end

with ISO-8601 UTC times. JSON input is either a list of records with the same
keys or an object {"site_id": ..., "window": [...], "passes": [records]}.
"""

import io
import json
import re
from pathlib import Path
from typing import Any, BinaryIO, Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd
from pydantic import ValidationError

from iotscheduler.controllers.logging_utils import get_logger
from iotscheduler.core.Exceptions import ConfigurationError, PassValidationError
from iotscheduler.core.ScheduleModel import Instant, PassCatalog, SatellitePass

log = get_logger("PassIngest")

CSV_COLUMNS = (
    "sat", "site", "t_start", "t_max", "t_end",
    "el_start", "el_max", "el_end", "az_start", "az_max", "az_end",
)

# CSV column -> SatellitePass field
_FIELD_OF = {
    "sat": "satellite_id",
    "site": "site_id",
    "t_start": "t_start",
    "t_max": "t_max",
    "t_end": "t_end",
    "el_start": "theta_start",
    "el_max": "theta_max",
    "el_end": "theta_end",
    "az_start": "phi_start",
    "az_max": "phi_max",
    "az_end": "phi_end",
}

Source = Union[str, Path, bytes, BinaryIO]


def _read_bytes(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, (str, Path)):
        return Path(source).read_bytes()
    return source.read()


def _guess_format(source: Source) -> str:
    if isinstance(source, (str, Path)) and str(source).lower().endswith(".json"):
        return "json"
    return "csv"


def _record_to_pass(record: Dict[str, Any], locator: str) -> SatellitePass:
    missing = [c for c in CSV_COLUMNS if c not in record or record[c] in ("", None)]
    if missing:
        raise PassValidationError(f"missing field(s) {', '.join(missing)}", locator=locator)

    label = f"{record['sat']}@{record['t_start']}"
    values: Dict[str, Any] = {}
    for column, field in _FIELD_OF.items():
        raw = record[column]
        try:
            if column.startswith("t_"):
                values[field] = Instant.from_iso(str(raw))
            elif column in ("sat", "site"):
                values[field] = str(raw).strip()
            else:
                values[field] = float(raw)
        except ValueError as e:
            raise PassValidationError(f"cannot parse {column}={raw!r}: {e}",
                                      locator=locator, pass_label=label) from e

    try:
        return SatellitePass(**values)
    except ValidationError as e:
        # first error only; it names the violated invariant
        err = e.errors()[0]
        msg = err["msg"].removeprefix("Value error, ")
        field = ".".join(map(str, err["loc"]))
        if field:
            msg = f"{field}: {msg}"
        raise PassValidationError(msg, locator=locator, pass_label=label) from e


def _csv_line(message: str) -> str:
    """Locator of a pandas tokenizer message: "line N", or "document" if it names no line."""
    match = re.search(r"line (\d+)", message)
    return f"line {match.group(1)}" if match else "document"


def _records_from_csv(raw: bytes) -> List[Tuple[str, Dict[str, Any]]]:
    if not raw.strip():
        return []
    try:
        frame = pd.read_csv(io.BytesIO(raw), dtype=str, keep_default_na=False,
                            skipinitialspace=True, encoding="utf-8")
    except UnicodeDecodeError as e:
        raise PassValidationError(f"not UTF-8 text: {e.reason} at byte {e.start}", locator="document") from e
    except pd.errors.ParserError as e:
        raise PassValidationError(f"malformed CSV: {e}", locator=_csv_line(str(e))) from e
    frame.columns = [c.strip() for c in frame.columns]
    missing = [c for c in CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise PassValidationError(f"CSV header lacks column(s) {', '.join(missing)}",
                                  locator="line 1")
    # header is line 1
    return [(f"line {i + 2}", row) for i, row in enumerate(frame.to_dict(orient="records"))]


def _records_from_json(raw: bytes) -> Tuple[List[Tuple[str, Dict[str, Any]]], Dict[str, Any]]:
    if not raw.strip():
        return [], {}
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise PassValidationError(f"invalid JSON: {e}", locator="document") from e

    header: Dict[str, Any] = {}
    if isinstance(doc, dict):
        header = {k: doc[k] for k in ("site_id", "window") if k in doc}
        doc = doc.get("passes", [])
    if not isinstance(doc, list):
        raise PassValidationError("expected a list of pass records", locator="document")

    records = []
    for i, rec in enumerate(doc):
        if not isinstance(rec, dict):
            raise PassValidationError("record is not an object", locator=f"record {i}")
        records.append((f"record {i}", rec))
    return records, header


def load_passes(source: Source, fmt: Optional[str] = None,
                site_id: Optional[str] = None,
                window: Optional[Tuple[Instant, Instant]] = None) -> PassCatalog:
    """
    Parse a pass file into a validated PassCatalog.

    :param source: path, raw bytes or binary stream
    :param fmt: "csv" or "json"; guessed from the file suffix when omitted
    :param site_id: expected site; defaults to the site of the first pass
    :param window: catalog window; defaults to [first rise, last set]
    :raises PassValidationError: on parse errors or pass invariant violations
    """
    fmt = (fmt or _guess_format(source)).lower()
    if fmt not in ("csv", "json"):
        raise ConfigurationError(f"unknown pass format {fmt!r} (expected csv or json)")

    raw = _read_bytes(source)
    header: Dict[str, Any] = {}
    if fmt == "csv":
        records = _records_from_csv(raw)
    else:
        records, header = _records_from_json(raw)

    passes = [_record_to_pass(rec, locator) for locator, rec in records]
    site_id = site_id or header.get("site_id") or (passes[0].site_id if passes else "")
    for p in passes:
        if p.site_id != site_id:
            raise PassValidationError(f"site {p.site_id!r} differs from catalog site {site_id!r}",
                                      pass_label=p.label)

    if window is None and "window" in header:
        window = tuple(header["window"])  # coerced to Instants by PassCatalog
    if window is None:
        if passes:
            window = (min(p.t_start for p in passes), max(p.t_end for p in passes))
        else:
            window = (Instant(0), Instant(0))

    if not passes:
        log.warning("Pass source is empty, returning an empty catalog")
    else:
        log.info(f"Loaded {len(passes)} passes for site {site_id} "
                 f"({len({p.satellite_id for p in passes})} satellites)")

    passes.sort(key=lambda p: (int(p.t_start), p.satellite_id))
    return PassCatalog(site_id=site_id, window=window, passes=tuple(passes))


def catalog_frame(catalog: PassCatalog) -> pd.DataFrame:
    """One row per pass, CSV column names, ISO times."""
    rows = []
    for p in catalog.passes:
        rows.append({
            "sat": p.satellite_id,
            "site": p.site_id,
            "t_start": p.t_start.to_iso(),
            "t_max": p.t_max.to_iso(),
            "t_end": p.t_end.to_iso(),
            "el_start": p.theta_start,
            "el_max": p.theta_max,
            "el_end": p.theta_end,
            "az_start": p.phi_start,
            "az_max": p.phi_max,
            "az_end": p.phi_end,
        })
    return pd.DataFrame(rows, columns=list(CSV_COLUMNS))


def write_passes(catalog: PassCatalog, path: Union[str, Path], fmt: Optional[str] = None) -> Path:
    """Write a catalog as CSV (default) or JSON; output is byte-stable for equal catalogs."""
    path = Path(path)
    fmt = (fmt or _guess_format(path)).lower()
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = catalog_frame(catalog)
    if fmt == "json":
        doc = {
            "site_id": catalog.site_id,
            "window": [catalog.window[0].to_iso(), catalog.window[1].to_iso()],
            "passes": frame.to_dict(orient="records"),
        }
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    else:
        frame.to_csv(path, index=False, float_format="%.3f", lineterminator="\n")
    log.info(f"Wrote {len(catalog)} passes to {path}")
    return path


def passes_per_satellite(catalog: PassCatalog,
                         edge_deg: float = 5.0) -> Sequence[Tuple[str, int, int]]:
    """(satellite, passes, passes with both edges <= edge_deg) for console summaries."""
    rows = []
    for sat, passes in catalog.by_satellite().items():
        low = sum(1 for p in passes if p.theta_start <= edge_deg and p.theta_end <= edge_deg)
        rows.append((sat, len(passes), low))
    return rows
