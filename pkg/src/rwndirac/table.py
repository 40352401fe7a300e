"""Eigenvalue records and their CSV/JSON serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, Optional

CSV_HEADER = (
    "Z",
    "k",
    "N",
    "n",
    "epsilon",
    "oracle_epsilon",
    "delta",
    "bracket_width",
    "iterations",
    "status",
)


@dataclass(frozen=True)
class EigenvalueRecord:
    """One cell of a spectral table.

    ``status`` is ``ok``, ``undecided``, ``absent`` or ``error``; for the last
    two ``eps`` is nan and ``message`` explains why.
    """

    k: int
    N: int
    n: int
    eps: float
    bracket_width: float
    iterations: int
    oracle_eps: Optional[float] = None
    status: str = "ok"
    z: Optional[float] = None
    eps_lo: float = math.nan
    eps_hi: float = math.nan
    orbits: int = 0
    message: str = ""

    @property
    def delta(self) -> Optional[float]:
        if self.oracle_eps is None or not math.isfinite(self.eps):
            return None
        return self.eps - self.oracle_eps

    @property
    def found(self) -> bool:
        return self.status in ("ok", "undecided")

    @classmethod
    def absent(cls, k: int, N: int, z: float, message: str) -> "EigenvalueRecord":
        return cls(k, N, N + abs(k), math.nan, math.nan, 0, None, "absent", z, message=message)

    @classmethod
    def failed(cls, k: int, N: int, z: float, message: str) -> "EigenvalueRecord":
        return cls(k, N, N + abs(k), math.nan, math.nan, 0, None, "error", z, message=message)

    def key(self) -> tuple:
        return (self.z if self.z is not None else math.nan, self.k, self.N)

    def row(self) -> dict:
        """Public row with the table's field names."""
        return {
            "Z": self.z,
            "k": self.k,
            "N": self.N,
            "n": self.n,
            "epsilon": _num(self.eps),
            "oracle_epsilon": _num(self.oracle_eps),
            "delta": _num(self.delta),
            "bracket_width": _num(self.bracket_width),
            "iterations": self.iterations,
            "status": self.status,
        }

    def to_state(self) -> dict:
        """Full internal state, used for resume checkpoints."""
        d = asdict(self)
        return {key: (None if isinstance(v, float) and math.isnan(v) else v) for key, v in d.items()}

    @classmethod
    def from_state(cls, d: dict) -> "EigenvalueRecord":
        names = {f.name for f in fields(cls)}
        kw = {key: v for key, v in d.items() if key in names}
        for key in ("eps", "bracket_width", "eps_lo", "eps_hi"):
            if kw.get(key) is None:
                kw[key] = math.nan
        return cls(**kw)


def _num(x: Optional[float]) -> Optional[float]:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return float(x)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _sort_key(r: EigenvalueRecord) -> tuple:
    z = r.z if r.z is not None else -math.inf
    return (z, -1 if r.k < 0 else 1, abs(r.k), r.N)


@dataclass
class SpectralTable:
    records: list[EigenvalueRecord]

    @classmethod
    def sorted(cls, records: Iterable[EigenvalueRecord]) -> "SpectralTable":
        return cls(sorted(records, key=_sort_key))

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def curve(self, k: int, N: int) -> list[EigenvalueRecord]:
        return [r for r in self.records if r.k == k and r.N == N]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.records:
            row = r.row()
            w.writerow([_fmt(row[h]) for h in CSV_HEADER])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps([r.row() for r in self.records], indent=1) + "\n"

    def write(self, path: str | Path, fmt: Optional[str] = None) -> None:
        path = Path(path)
        fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
        text = self.to_json() if fmt == "json" else self.to_csv()
        path.write_text(text, encoding="utf-8")

    @classmethod
    def from_csv(cls, text: str) -> "SpectralTable":
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls([_record_from_row(row) for row in rows])

    @classmethod
    def from_json(cls, text: str) -> "SpectralTable":
        return cls([_record_from_row(row) for row in json.loads(text)])


def _record_from_row(row: dict) -> EigenvalueRecord:
    def fl(v) -> Optional[float]:
        if v is None or v == "":
            return None
        return float(v)

    eps = fl(row["epsilon"])
    bw = fl(row["bracket_width"])
    return EigenvalueRecord(
        k=int(row["k"]),
        N=int(row["N"]),
        n=int(row["n"]),
        eps=math.nan if eps is None else eps,
        bracket_width=math.nan if bw is None else bw,
        iterations=int(row["iterations"]),
        oracle_eps=fl(row["oracle_epsilon"]),
        status=str(row["status"]),
        z=fl(row["Z"]),
    )
