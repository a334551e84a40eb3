"""Deterministic synthetic economies for tests and demos.

Given a target occupancy pattern (``nested``, ``modular`` or ``random``),
the generator invents firm-level sales whose aggregation reproduces that
pattern, a macro table whose per-capita indicators rise strictly with
the region index, and matching catalogs.  Everything is drawn from a
single seeded PCG64 generator in a fixed order, so one (shape, p, s,
fill, seed) tuple always produces byte-identical CSV files; the bundled
nested 47x91 fixture is exactly the output of seed 7.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

import numpy as np

from .catalogs import DIVISIONS, SUPER_REGIONS, RegionCatalog, SectorCatalog
from .errors import InputDataError
from .matrixio import fmt_float, write_csv

SHAPES = ("nested", "modular", "random")

#: average sales assigned to one occupied region x sector cell
CELL_SCALE = 1.0e6


@dataclass(frozen=True)
class SyntheticEconomy:
    matrix: np.ndarray           # the 0/1 pattern the firms aggregate to
    firm_rows: Tuple[tuple, ...]  # rows of firms.csv
    macro_rows: Tuple[tuple, ...]
    regions: RegionCatalog
    sectors: SectorCatalog
    shape: str
    seed: int


def nested_matrix(p: int, s: int) -> np.ndarray:
    """Staircase 0/1 matrix: row i keeps the first ceil(s·(p-i)/p) columns.

    Row 0 is fully diversified, the last row keeps at least one column,
    and for s >= p every row is strictly less diversified than the one
    above it.
    """
    if p < 1 or s < 1:
        raise InputDataError("matrix dimensions must be >= 1")
    counts = [-(-s * (p - i) // p) for i in range(p)]
    m = np.zeros((p, s), dtype=np.int64)
    for i, c in enumerate(counts):
        m[i, :c] = 1
    return m


def _modular_matrix(p: int, s: int, fill: float, rng) -> np.ndarray:
    blocks = min(3, p, s)
    bi = np.arange(p) * blocks // p
    bj = np.arange(s) * blocks // s
    in_ring = (bj[None, :] == bi[:, None]) | (bj[None, :] == (bi[:, None] + 1) % blocks)
    draws = rng.random((p, s))
    return (in_ring & (draws < fill)).astype(np.int64)


def _pattern(shape: str, p: int, s: int, fill: float, rng) -> np.ndarray:
    if shape == "nested":
        return nested_matrix(p, s)
    if shape == "modular":
        return _modular_matrix(p, s, fill, rng)
    if shape == "random":
        return (rng.random((p, s)) < fill).astype(np.int64)
    raise InputDataError(f"unknown shape {shape!r}; pick one of {', '.join(SHAPES)}")


def _code(prefix: str, i: int, n: int) -> str:
    return f"{prefix}{i + 1:0{max(2, len(str(n)))}d}"


def generate_synthetic(p: int, s: int, shape: str = "nested",
                       fill: float = 0.35, seed: int = 0) -> SyntheticEconomy:
    """Build a full synthetic input set (firms, macro, catalogs).

    Each occupied cell's sales total is scattered over one to three
    firms so the firm file is non-trivial to aggregate; totals carry a
    +-20% jitter, which keeps RCA values off exact ties.
    """
    if p < 1 or s < 1:
        raise InputDataError("matrix dimensions must be >= 1")
    if not (0 < fill <= 1):
        raise InputDataError(f"fill must be in (0, 1], got {fill}")
    if seed < 0:
        raise InputDataError(f"seed must be a non-negative integer, got {seed}")
    rng = np.random.default_rng(seed)
    m = _pattern(shape, p, s, fill, rng)

    rcodes = [_code("R", i, p) for i in range(p)]
    scodes = [_code("S", j, s) for j in range(s)]
    regions = RegionCatalog.from_rows(
        (rcodes[i], f"Region {rcodes[i][1:]}", SUPER_REGIONS[i % len(SUPER_REGIONS)])
        for i in range(p)
    )
    sectors = SectorCatalog.from_rows(
        (scodes[j], f"Sector {scodes[j][1:]}", DIVISIONS[j % len(DIVISIONS)], 0)
        for j in range(s)
    )

    firm_rows: List[tuple] = []
    firm_no = 0
    for i in range(p):
        for j in range(s):
            if not m[i, j]:
                continue
            total = CELL_SCALE * (1.0 + 0.2 * rng.random())
            k = int(rng.integers(1, 4))
            weights = rng.dirichlet(np.ones(k)) if k > 1 else np.array([1.0])
            employees = rng.integers(1, 501, size=k)
            for t in range(k):
                firm_no += 1
                firm_rows.append((
                    f"F{firm_no:07d}", rcodes[i], scodes[j],
                    fmt_float(total * weights[t]), int(employees[t]),
                ))

    population = rng.integers(200_000, 5_000_001, size=p)
    macro_rows = []
    for i in range(p):
        gpp_per_capita = 2.0e6 * 1.02 ** i
        income = 2.4e6 * 1.015 ** i
        macro_rows.append((
            rcodes[i], int(population[i]),
            fmt_float(gpp_per_capita * population[i]), fmt_float(income),
        ))

    return SyntheticEconomy(m, tuple(firm_rows), tuple(macro_rows),
                            regions, sectors, shape, seed)


def write_synthetic(econ: SyntheticEconomy, out_dir) -> List[str]:
    """Write firms/macro/regions/sectors CSVs; returns the file names."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "firms.csv",
              ("firm_id", "region_code", "sector_code", "annual_sales",
               "employees"), econ.firm_rows)
    write_csv(out / "macro.csv",
              ("region_code", "population", "gross_product",
               "income_per_person"), econ.macro_rows)
    rows = iter(econ.regions.to_csv_rows())
    write_csv(out / "regions.csv", next(rows), rows)
    rows = iter(econ.sectors.to_csv_rows())
    write_csv(out / "sectors.csv", next(rows), rows)
    return ["firms.csv", "macro.csv", "regions.csv", "sectors.csv"]
