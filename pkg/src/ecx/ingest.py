"""Raw-data ingestion: firm records, sales aggregation, macro indicators.

``firms.csv`` rows are firm-level observations (``firm_id,region_code,
sector_code,annual_sales,employees``).  Rows missing sales or employees
are rejected — the source data keeps only active firms for which both
are reported — while zero-sales rows are accepted (they contribute
nothing) and counted.  Aggregation sums sales into a region x sector
matrix in a fixed sorted order so the result is independent of input
row order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .catalogs import PathOrStream, RegionCatalog, SectorCatalog, _open_text
from .errors import InputDataError

FIRMS_HEADER = ("firm_id", "region_code", "sector_code", "annual_sales", "employees")
MACRO_HEADER = ("region_code", "population", "gross_product", "income_per_person")


@dataclass(frozen=True)
class FirmRecord:
    firm_id: str
    region_code: str
    sector_code: str
    annual_sales: float
    employees: int


@dataclass(frozen=True)
class Rejection:
    line: int
    reason: str


@dataclass
class FirmParseResult:
    records: List[FirmRecord]
    rejections: List[Rejection]
    zero_sales_count: int = 0


@dataclass(frozen=True)
class SalesMatrix:
    """Aggregated annual sales w[p][s] over non-excluded sectors."""

    values: np.ndarray           # (P, S) float64, entries >= 0
    regions: RegionCatalog
    sectors: SectorCatalog       # excluded sectors already removed

    def __post_init__(self):
        if self.values.shape != (len(self.regions), len(self.sectors)):
            raise InputDataError("sales matrix shape does not match catalogs")
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise InputDataError("sales entries must be finite and >= 0")


@dataclass
class MacroIndicators:
    """Per-region macro variables; missing regions carry NaN."""

    regions: RegionCatalog
    population: np.ndarray
    gross_product: np.ndarray
    income_per_person: np.ndarray
    gpp_per_capita: np.ndarray
    rejections: List[Rejection] = field(default_factory=list)

    @property
    def present(self) -> np.ndarray:
        return np.isfinite(self.population)

    def column(self, name: str) -> np.ndarray:
        try:
            return getattr(self, name)
        except AttributeError:
            raise InputDataError(f"unknown macro indicator {name!r}") from None


def _split_csv_line(line: str) -> List[str]:
    # plain split is much faster than csv.reader on million-row files;
    # fall back to csv only for lines with quoted fields.
    if '"' in line:
        return next(csv.reader([line]))
    return line.rstrip("\r\n").split(",")


def parse_firms(source: PathOrStream, regions: RegionCatalog,
                sectors: SectorCatalog) -> FirmParseResult:
    """Parse firm rows, validating codes against the catalogs.

    Returns all well-formed records plus a rejection report of
    (line number, reason) for every row that was dropped.
    """
    stream = _open_text(source)
    close = stream is not source
    try:
        header_line = stream.readline()
        if not header_line:
            raise InputDataError("firms table: empty file")
        header = tuple(h.strip() for h in _split_csv_line(header_line))
        if header != FIRMS_HEADER:
            raise InputDataError(
                "firms table: expected header "
                f"{','.join(FIRMS_HEADER)}, got {','.join(header)}"
            )
        records: List[FirmRecord] = []
        rejections: List[Rejection] = []
        zero_sales = 0
        for lineno, line in enumerate(stream, start=2):
            if not line.strip():
                continue
            fields = _split_csv_line(line)
            if len(fields) != 5:
                rejections.append(Rejection(lineno, "malformed row"))
                continue
            firm_id, rcode, scode, sales_s, emp_s = (f.strip() for f in fields)
            if rcode not in regions:
                rejections.append(Rejection(lineno, f"unknown region code {rcode!r}"))
                continue
            if scode not in sectors:
                rejections.append(Rejection(lineno, f"unknown sector code {scode!r}"))
                continue
            if not sales_s:
                rejections.append(Rejection(lineno, "missing sales"))
                continue
            if not emp_s:
                rejections.append(Rejection(lineno, "missing employees"))
                continue
            try:
                sales = float(sales_s)
            except ValueError:
                rejections.append(Rejection(lineno, "invalid sales"))
                continue
            if not np.isfinite(sales) or sales < 0:
                rejections.append(Rejection(lineno, "negative sales"))
                continue
            try:
                employees = int(emp_s)
            except ValueError:
                rejections.append(Rejection(lineno, "invalid employees"))
                continue
            if employees < 0:
                rejections.append(Rejection(lineno, "negative employees"))
                continue
            if sales == 0.0:
                zero_sales += 1
            records.append(FirmRecord(firm_id, rcode, scode, sales, employees))
        return FirmParseResult(records, rejections, zero_sales)
    finally:
        if close:
            stream.close()


def aggregate_sales(records: Sequence[FirmRecord], regions: RegionCatalog,
                    sectors: SectorCatalog) -> SalesMatrix:
    """Sum sales into w[p][s]; excluded-sector records contribute nothing.

    Contributions are added in sorted (region, sector, sales, firm_id)
    order, so any permutation of the input records yields a bit-identical
    matrix.
    """
    if not records:
        raise InputDataError("no data: cannot aggregate an empty record list")
    kept = sectors.kept()
    col_of = {s.code: s.sector_id for s in kept}
    keyed = []
    for rec in records:
        sid = col_of.get(rec.sector_code)
        if sid is None:          # excluded sector
            continue
        keyed.append((regions[rec.region_code].region_id, sid,
                      rec.annual_sales, rec.firm_id))
    keyed.sort()
    values = np.zeros((len(regions), len(kept)))
    for rid, sid, sales, _ in keyed:
        values[rid, sid] += sales
    return SalesMatrix(values, regions, kept)


def parse_macro(source: PathOrStream, regions: RegionCatalog) -> MacroIndicators:
    """Parse the macro-indicator table; absent regions are NaN."""
    stream = _open_text(source)
    close = stream is not source
    try:
        reader = csv.DictReader(stream)
        header = tuple(reader.fieldnames or ())
        missing = [c for c in MACRO_HEADER if c not in header]
        if missing:
            raise InputDataError(
                f"macro table: missing required column(s) {', '.join(missing)}"
            )
        n = len(regions)
        pop = np.full(n, np.nan)
        gp = np.full(n, np.nan)
        inc = np.full(n, np.nan)
        rejections: List[Rejection] = []
        seen = set()
        for lineno, row in enumerate(reader, start=2):
            code = (row["region_code"] or "").strip()
            if code in seen:
                raise InputDataError(f"macro table: duplicate region {code!r}")
            if code not in regions:
                rejections.append(Rejection(lineno, f"unknown region code {code!r}"))
                continue
            seen.add(code)
            try:
                p = float(row["population"])
                g = float(row["gross_product"])
                i = float(row["income_per_person"])
            except (TypeError, ValueError):
                rejections.append(Rejection(lineno, "invalid numeric field"))
                continue
            if not (np.isfinite(p) and np.isfinite(g) and np.isfinite(i)):
                rejections.append(Rejection(lineno, "invalid numeric field"))
                continue
            if p <= 0:
                rejections.append(Rejection(lineno, "nonpositive population"))
                continue
            rid = regions[code].region_id
            pop[rid], gp[rid], inc[rid] = p, g, i
        return MacroIndicators(regions, pop, gp, inc, gp / pop, rejections)
    finally:
        if close:
            stream.close()
