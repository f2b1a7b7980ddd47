"""Verdict records, JSON and CSV report writers, ordered result merging.

JSON output is deterministic: keys are sorted and everything that varies
between identical runs (start time and wall time) lives in `timestamps`.
"""
import csv
import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Iterable, Literal, Optional, TypeVar

from pydantic import BaseModel, ConfigDict, Field

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

T = TypeVar("T")


# =============================================================================
# RECORD MODELS
# =============================================================================

class Timestamps(BaseModel):
    """Run-dependent fields, isolated so the rest of a record is reproducible."""
    started: str
    wall_time: float


class VerdictRecord(BaseModel):
    """One finite-scale verdict as written to disk."""
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(SCHEMA_VERSION, alias="schema")
    property: str
    group: str
    k: Optional[int] = None
    bound: dict[str, int] = Field(default_factory=dict)
    outcome: Literal["holds-up-to-bound", "counterexample", "error"]
    quantifier: str = ""
    witness: Optional[dict[str, Any]] = None
    search_stats: dict[str, Any] = Field(default_factory=dict)
    timestamps: Optional[Timestamps] = None

    @classmethod
    def from_verdict(cls, verdict, group: str, wall_time: float = 0.0,
                     started: Optional[datetime] = None) -> "VerdictRecord":
        """Build a record from any object exposing `to_dict()` like properties.Verdict."""
        data = verdict.to_dict()
        started = started or datetime.now(timezone.utc)
        return cls(
            property=data["property"],
            group=group,
            k=data.get("k"),
            bound=data.get("bound", {}),
            outcome=data["outcome"],
            quantifier=data.get("quantifier", ""),
            witness=data.get("witness"),
            search_stats=data.get("stats", {}),
            timestamps=Timestamps(started=started.isoformat(), wall_time=round(wall_time, 6)),
        )


# =============================================================================
# WRITERS
# =============================================================================

def _dump(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_payload(payload: Any, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_dump(payload), encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def record_json(record: VerdictRecord) -> str:
    return _dump(record.model_dump(mode="json", by_alias=True))


def write_json(record: VerdictRecord, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(record_json(record), encoding="utf-8")
    logger.info(f"Wrote verdict {record.property}/{record.group} -> {path}")
    return path


def load_json(path) -> VerdictRecord:
    with open(path, encoding="utf-8") as f:
        return VerdictRecord.model_validate(json.load(f))


CSV_COLUMNS = ["property", "group", "k", "bound", "outcome", "quantifier", "witness"]


def write_csv(records: Iterable[VerdictRecord], path) -> Path:
    """Summary table for batch runs, one row per record."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = 0
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for record in records:
            bound = " ".join(f"{k}={v}" for k, v in sorted(record.bound.items()))
            witness = ""
            if record.witness:
                witness = " ".join(f"{k}={v}" for k, v in sorted(record.witness.items()))
            writer.writerow([
                record.property, record.group,
                "" if record.k is None else record.k,
                bound, record.outcome, record.quantifier, witness,
            ])
            rows += 1
    logger.info(f"Wrote {rows} summary rows -> {path}")
    return path


# =============================================================================
# MERGING
# =============================================================================

def ordered_merge(results: Iterable[Optional[T]], key: Callable[[T], Any]) -> Optional[T]:
    """Least non-empty result by key, independent of completion order."""
    best = None
    for result in results:
        if result is None:
            continue
        if best is None or key(result) < key(best):
            best = result
    return best
