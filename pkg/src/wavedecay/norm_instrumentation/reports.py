"""CSV / JSON report channel shared by measurements and inequality checks.

CSV columns are ``kind,T,R_or_U,word,value``; empty cells mean "not
applicable".  Floats are written with ``repr`` so reports are byte-stable.
The JSON summary is a single object::

    {"schema": "wavedecay-report/1",
     "source": <trajectory or config description>,
     "rows": <number of CSV rows>,
     "fits": {name: {"slope", "intercept", "residual", "n"}},
     "checks": {kind: {"ratios": [...], "spread": max/min, "passed": bool}},
     "extra": {...}}
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

SCHEMA = "wavedecay-report/1"
CSV_HEADER = ("kind", "T", "R_or_U", "word", "value")


@dataclass(frozen=True)
class ReportRow:
    kind: str
    T: Optional[float]
    scale: Optional[float]
    word: str
    value: float

    def cells(self) -> List[str]:
        return [self.kind, _num(self.T), _num(self.scale), self.word, _num(self.value)]


def _num(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def rows_to_csv(rows: Iterable[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow(row.cells())
    return buf.getvalue()


def write_csv(rows: Iterable[ReportRow], path) -> str:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(rows_to_csv(rows))
    return os.fspath(path)


def read_csv(path) -> List[ReportRow]:
    with open(path, encoding="ascii", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        out = []
        for kind, T, s, word, v in reader:
            out.append(ReportRow(kind, float(T) if T else None, float(s) if s else None,
                                 word, float(v)))
    return out


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def summary_document(source: str, rows: Sequence[ReportRow], fits: Optional[Dict] = None,
                     checks: Optional[Dict] = None, extra: Optional[Dict] = None) -> Dict:
    return _clean({"schema": SCHEMA, "source": source, "rows": len(rows),
                   "fits": fits or {}, "checks": checks or {}, "extra": extra or {}})


def write_json(doc: Dict, path) -> str:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return os.fspath(path)


def write_two_column(samples: Sequence[Tuple[float, float]], path, header: str) -> str:
    """Plot-ready text: a ``#`` header line, then ``x y`` pairs."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"# {header}\n")
        for x, y in samples:
            fh.write(f"{_num(x)} {_num(y)}\n")
    return os.fspath(path)


def read_two_column(path) -> List[Tuple[float, float]]:
    out = []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            x, y = line.split()
            out.append((float(x), float(y)))
    return out
