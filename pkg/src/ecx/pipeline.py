"""Pipeline stages and the end-to-end runner.

Every stage is a standalone function that reads its inputs from the
output directory and writes its products plus a ``<stage>_report.json``
sidecar there.  ``run_pipeline`` simply executes the stages in order,
so a chain of CLI subcommands and one ``run`` invocation produce
identical bytes.  Reports never contain absolute paths or timestamps:
two runs over the same inputs give a byte-identical ``report.json`` no
matter where the output directories live.

The final report's ``manifest`` lists the pipeline's data products —
eleven files for a default run:

    sales.csv, rca.csv, m.csv, eci.csv, pci.csv, fitness.csv,
    complexity.csv, trace.csv, mst_region.dot, correlations.json,
    report.json

Normalized snapshots of the inputs (``catalog_regions.csv``,
``catalog_sectors.csv``, ``macro.csv``) are also written so later
stages can run in isolation, but they are carried under the report's
``intermediates`` key, not the manifest.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import eci as eci_mod
from . import fitness as fit_mod
from .catalogs import RegionCatalog, SectorCatalog
from .errors import EcxError, InputDataError
from .ingest import (MACRO_HEADER, MacroIndicators, aggregate_sales,
                     parse_firms, parse_macro)
from .ingest import SalesMatrix
from .matrixio import (dump_json, fmt_float, read_json, read_matrix_csv,
                       write_csv, write_json, write_matrix_csv)
from .projections import export_tree, max_similarity_tree, project, similarity
from .rca import BinaryBipartiteMatrix, binarize, compute_rca, degree_profile
from .stats import (fit_exponential, fit_power, pearson, quadrants,
                    rank_of, region_averages)

STAGES = ("ingest", "matrix", "eci", "fitness", "mst", "correlate", "report")

#: CLI spelling -> macro table column
INDICATORS = {
    "gpp_per_capita": "gpp_per_capita",
    "income": "income_per_person",
}


@dataclass
class RunConfig:
    """Everything a run needs; stages after ingest only use out_dir
    plus their own numeric knobs, so the input paths may stay None."""

    out_dir: Path
    firms: Optional[Path] = None
    regions: Optional[Path] = None
    sectors: Optional[Path] = None
    macro: Optional[Path] = None
    rca_threshold: float = 1.0
    eci_tol: float = eci_mod.DEFAULT_TOL
    eci_max_iter: int = eci_mod.DEFAULT_MAX_ITER
    fitness_tol: float = fit_mod.DEFAULT_TOL
    fitness_max_iter: int = fit_mod.DEFAULT_MAX_ITER

    def __post_init__(self):
        self.out_dir = Path(self.out_dir)
        for name in ("firms", "regions", "sectors", "macro"):
            value = getattr(self, name)
            if value is not None:
                setattr(self, name, Path(value))

    def validate(self) -> None:
        for label in ("firms", "regions", "sectors"):
            if getattr(self, label) is None:
                raise InputDataError(f"{label} file not specified")
        for label in ("firms", "regions", "sectors", "macro"):
            path = getattr(self, label)
            if path is not None and not path.is_file():
                raise InputDataError(f"{label} file not found: {path}")


def _digest(path: Optional[Path]) -> Optional[str]:
    if path is None:
        return None
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _report_path(out_dir, stage: str) -> Path:
    return Path(out_dir) / f"{stage}_report.json"


def _load_stage_report(out_dir, stage: str) -> dict:
    path = _report_path(out_dir, stage)
    if not path.is_file():
        raise InputDataError(
            f"missing {path.name}: run the '{stage}' stage first"
        )
    return read_json(path)


def _need(out_dir, name: str, stage: str) -> Path:
    """Path of an intermediate, or a pointer at the stage that writes it."""
    path = Path(out_dir) / name
    if not path.is_file():
        raise InputDataError(f"missing {name}: run the '{stage}' stage first")
    return path


def _load_catalogs(out_dir) -> tuple:
    regions = RegionCatalog.from_csv(_need(out_dir, "catalog_regions.csv", "ingest"))
    sectors = SectorCatalog.from_csv(_need(out_dir, "catalog_sectors.csv", "ingest"))
    return regions, sectors


def _load_macro(out_dir, regions: RegionCatalog) -> MacroIndicators:
    return parse_macro(_need(out_dir, "macro.csv", "ingest"), regions)


def _subset_by_codes(catalog, codes, what: str):
    index = {c: i for i, c in enumerate(catalog.codes)}
    try:
        keep = [index[c] for c in codes]
    except KeyError as exc:
        raise InputDataError(f"{what} {exc.args[0]!r} not in catalog") from None
    return catalog.subset(keep)


def _load_binary(out_dir) -> BinaryBipartiteMatrix:
    values, rcodes, scodes = read_matrix_csv(_need(out_dir, "m.csv", "matrix"))
    ints = values.astype(np.int64)
    if not np.array_equal(ints, values) or np.any((ints != 0) & (ints != 1)):
        raise InputDataError("m.csv must contain only 0/1 entries")
    regions, sectors = _load_catalogs(out_dir)
    return BinaryBipartiteMatrix(
        ints,
        _subset_by_codes(regions, rcodes, "region"),
        _subset_by_codes(sectors.kept(), scodes, "sector"),
    )


def _read_indexed(path, value_col: int = 1) -> Dict[str, float]:
    values: Dict[str, float] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            values[row[0]] = float(row[value_col])
    return values


def stage_ingest(cfg: RunConfig) -> dict:
    cfg.validate()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    regions = RegionCatalog.from_csv(cfg.regions)
    sectors = SectorCatalog.from_csv(cfg.sectors)
    parsed = parse_firms(cfg.firms, regions, sectors)
    sales = aggregate_sales(parsed.records, regions, sectors)

    write_matrix_csv(out / "sales.csv", sales.values, sales.regions.codes,
                     sales.sectors.codes)
    rows = iter(regions.to_csv_rows())
    write_csv(out / "catalog_regions.csv", next(rows), rows)
    rows = iter(sectors.to_csv_rows())
    write_csv(out / "catalog_sectors.csv", next(rows), rows)

    macro_rejections: List[dict] = []
    macro_rows: List[tuple] = []
    if cfg.macro is not None:
        macro = parse_macro(cfg.macro, regions)
        for r in regions:
            i = r.region_id
            if np.isfinite(macro.population[i]):
                macro_rows.append((r.code, fmt_float(macro.population[i]),
                                   fmt_float(macro.gross_product[i]),
                                   fmt_float(macro.income_per_person[i])))
        macro_rejections = [{"line": x.line, "reason": x.reason}
                            for x in macro.rejections]
    write_csv(out / "macro.csv", MACRO_HEADER, macro_rows)

    report = {
        "files": ["sales.csv"],
        "intermediates": ["catalog_regions.csv", "catalog_sectors.csv",
                          "macro.csv"],
        "input_digests": {
            "firms": _digest(cfg.firms),
            "macro": _digest(cfg.macro),
            "regions": _digest(cfg.regions),
            "sectors": _digest(cfg.sectors),
        },
        "records": len(parsed.records),
        "rejections": [{"line": x.line, "reason": x.reason}
                       for x in parsed.rejections[:100]],
        "rejection_count": len(parsed.rejections),
        "zero_sales_rows": parsed.zero_sales_count,
        "macro_rejections": macro_rejections,
        "macro_rows": len(macro_rows),
        "regions": len(regions),
        "sectors_total": len(sectors),
        "sectors_kept": len(sales.sectors),
    }
    write_json(_report_path(out, "ingest"), report)
    return report


def stage_matrix(cfg: RunConfig) -> dict:
    out = Path(cfg.out_dir)
    values, rcodes, scodes = read_matrix_csv(_need(out, "sales.csv", "ingest"))
    regions, sectors = _load_catalogs(out)
    sales = SalesMatrix(values,
                        _subset_by_codes(regions, rcodes, "region"),
                        _subset_by_codes(sectors.kept(), scodes, "sector"))
    rca = compute_rca(sales)
    m = binarize(rca, cfg.rca_threshold)

    write_matrix_csv(out / "rca.csv", rca.values, rca.regions.codes,
                     rca.sectors.codes)
    write_matrix_csv(out / "m.csv", m.values, m.regions.codes,
                     m.sectors.codes, integer=True)
    ones = int(m.values.sum())
    report = {
        "files": ["rca.csv", "m.csv"],
        "threshold": cfg.rca_threshold,
        "dropped": m.dropped.as_dict(),
        "shape": [int(m.shape[0]), int(m.shape[1])],
        "ones": ones,
        "density": ones / (m.shape[0] * m.shape[1]),
    }
    write_json(_report_path(out, "matrix"), report)
    return report


def _write_ranked(path, corner: str, value_name: str, codes, values) -> None:
    ranks = rank_of(values, codes)
    write_csv(path, (corner, value_name, "rank"),
              ((c, fmt_float(v), ranks[c]) for c, v in zip(codes, values)))


def stage_eci(cfg: RunConfig) -> dict:
    out = Path(cfg.out_dir)
    m = _load_binary(out)
    idx = eci_mod.compute_indices(m, cfg.eci_tol, cfg.eci_max_iter)
    _write_ranked(out / "eci.csv", "region_code", "eci",
                  idx.region_codes, idx.eci)
    _write_ranked(out / "pci.csv", "sector_code", "pci",
                  idx.sector_codes, idx.pci)
    report = {
        "files": ["eci.csv", "pci.csv"],
        "lambda2_region": idx.region_pair.eigenvalue,
        "lambda2_sector": idx.sector_pair.eigenvalue,
        "spectral_gap": idx.spectral_gap,
        "residual_region": idx.region_pair.residual_norm,
        "residual_sector": idx.sector_pair.residual_norm,
        "method_region": idx.method_region,
        "method_sector": idx.method_sector,
        "tol": cfg.eci_tol,
    }
    write_json(_report_path(out, "eci"), report)
    return report


def write_ordered_matrix(out_dir, view) -> List[str]:
    """Ordered 0/1 matrix as CSV plus a PBM ("P1") bitmap."""
    out = Path(out_dir)
    write_matrix_csv(out / "ordered_matrix.csv", view.matrix,
                     view.row_codes, view.col_codes, integer=True)
    h, w = view.matrix.shape
    lines = [f"P1\n{w} {h}\n"]
    lines += [" ".join(str(int(v)) for v in row) + "\n" for row in view.matrix]
    (out / "ordered_matrix.pbm").write_text("".join(lines), encoding="ascii")
    return ["ordered_matrix.csv", "ordered_matrix.pbm"]


def stage_fitness(cfg: RunConfig, ordered: bool = False) -> dict:
    out = Path(cfg.out_dir)
    m = _load_binary(out)
    res = fit_mod.fitness_complexity(m, cfg.fitness_tol, cfg.fitness_max_iter)
    _write_ranked(out / "fitness.csv", "region_code", "fitness",
                  res.region_codes, res.fitness)
    _write_ranked(out / "complexity.csv", "sector_code", "complexity",
                  res.sector_codes, res.complexity)
    header, rows = fit_mod.convergence_report(res)
    write_csv(out / "trace.csv", header,
              ([r[0], *(fmt_float(v) for v in r[1:])] for r in rows))
    view = fit_mod.order_by_rank(m, res)
    files = ["fitness.csv", "complexity.csv", "trace.csv"]
    if ordered:
        files += write_ordered_matrix(out, view)
    report = {
        "files": files,
        "iterations": res.iterations,
        "converged": res.converged,
        "tol": res.tol,
        "min_fitness": res.min_fitness,
        "diagonal_clearance": view.diagonal_clearance,
    }
    write_json(_report_path(out, "fitness"), report)
    return report


def stage_mst(cfg: RunConfig, entity: str = "region",
              format: str = "dot") -> dict:
    out = Path(cfg.out_dir)
    m = _load_binary(out)
    tree = max_similarity_tree(similarity(project(m, entity)))
    if entity == "region":
        catalog, grouping = m.regions, "super_region"
    else:
        catalog, grouping = m.sectors, "division"
    data = export_tree(tree, catalog, grouping, format)
    name = f"mst_{entity}.{format}"
    (out / name).write_bytes(data)
    report = {
        "files": [name],
        "entity": entity,
        "format": format,
        "nodes": tree.n,
        "edges": len(tree.edges),
        "total_weight": tree.total_weight,
    }
    write_json(_report_path(out, "mst"), report)
    return report


def stage_correlate(cfg: RunConfig, indicators=None, indices=None,
                    fit: Optional[str] = None) -> dict:
    """Correlate each complexity index against each macro indicator.

    By default all four combinations are computed, with an exponential
    fit for ECI pairs and a power-law fit for fitness pairs (indicator
    versus index, as the scatter plots draw them).  Passing ``fit`` also
    writes a ``fit_<index>_<indicator>.csv`` table per combination using
    that model.
    """
    out = Path(cfg.out_dir)
    indicators = list(indicators or INDICATORS)
    indices = list(indices or ("eci", "fitness"))
    for name in indicators:
        if name not in INDICATORS:
            raise InputDataError(f"unknown macro indicator {name!r}")

    regions, _ = _load_catalogs(out)
    macro = _load_macro(out, regions)
    index_values = {}
    for index in indices:
        stage = "eci" if index == "eci" else "fitness"
        table = _read_indexed(_need(out, f"{index}.csv", stage))
        codes = tuple(table)
        index_values[index] = (codes, np.array([table[c] for c in codes]))

    correlations = []
    fits = {}
    files = ["correlations.json"]
    for index in indices:
        codes, x = index_values[index]
        macro_rows = np.array([regions[c].region_id for c in codes])
        for name in indicators:
            column = INDICATORS[name]
            y = macro.column(column)[macro_rows]
            corr = pearson(x, y)
            correlations.append({
                "x_name": index, "y_name": column,
                "r": corr.r, "p": corr.p_value, "n": corr.n,
            })
            model = fit or ("exp" if index == "eci" else "power")
            keep = np.isfinite(x) & np.isfinite(y)
            fit_fn = fit_exponential if model == "exp" else fit_power
            result = fit_fn(x[keep], y[keep])
            fits[f"{index}_vs_{column}"] = {
                "model": result.model, "a": result.a, "b": result.b,
                "rmse_log": result.rmse_log, "n": int(keep.sum()),
            }
            if fit is not None:
                kept_codes = [c for c, k in zip(codes, keep) if k]
                expected = result.expected(x[keep])
                fname = f"fit_{index}_{name}.csv"
                write_csv(out / fname,
                          ("label", "x", "y", "expected_y", "residual"),
                          ((c, fmt_float(xv), fmt_float(yv), fmt_float(ev),
                            fmt_float(rv))
                           for c, xv, yv, ev, rv in zip(
                               kept_codes, x[keep], y[keep], expected,
                               result.residuals)))
                files.append(fname)

    correlations.sort(key=lambda e: (e["x_name"], e["y_name"]))
    write_json(out / "correlations.json", correlations)
    report = {"files": files, "correlations": correlations, "fits": fits}
    write_json(_report_path(out, "correlate"), report)
    return report


def write_summary_tables(cfg: RunConfig,
                         highlight: Optional[str] = None) -> List[str]:
    """quadrants.csv and the regions.csv group-average summary."""
    out = Path(cfg.out_dir)
    m = _load_binary(out)
    prof = degree_profile(m)
    quads = quadrants(prof, m.regions.codes)
    write_csv(out / "quadrants.csv",
              ("region_code", "k_p0", "k_p1", "quadrant"),
              ((c, fmt_float(prof.k_p0[i]), fmt_float(prof.k_p1[i]),
                quads.quadrants[i])
               for i, c in enumerate(quads.codes)))

    regions, _ = _load_catalogs(out)
    macro = _load_macro(out, regions)
    table = _read_indexed(_need(out, "eci.csv", "eci"))
    codes = tuple(table)
    summary = region_averages(np.array([table[c] for c in codes]), codes,
                              macro, regions, highlight=highlight)
    write_csv(out / "regions.csv",
              ("group", "count", "mean_eci", "mean_gpp_per_capita",
               "mean_income_per_person"),
              ((g.name, g.count, fmt_float(g.mean_eci),
                fmt_float(g.mean_gpp_per_capita),
                fmt_float(g.mean_income_per_person))
               for g in summary.groups))
    return ["quadrants.csv", "regions.csv"]


def stage_report(cfg: RunConfig, summary: bool = False,
                 highlight: Optional[str] = None) -> dict:
    out = Path(cfg.out_dir)
    ingest = _load_stage_report(out, "ingest")
    matrix = _load_stage_report(out, "matrix")
    eci = _load_stage_report(out, "eci")
    fitness = _load_stage_report(out, "fitness")
    mst = _load_stage_report(out, "mst")
    correlate = _load_stage_report(out, "correlate")

    files = ["report.json"]
    if summary:
        files += write_summary_tables(cfg, highlight)
    manifest = sorted(
        set(files)
        | set(ingest["files"]) | set(matrix["files"]) | set(eci["files"])
        | set(fitness["files"]) | set(mst["files"]) | set(correlate["files"])
    )

    def strip(d: dict) -> dict:
        return {k: v for k, v in d.items() if k not in ("files", "intermediates")}

    report = {
        "input_digests": ingest["input_digests"],
        "ingest": {k: v for k, v in strip(ingest).items()
                   if k != "input_digests"},
        "dropped": matrix["dropped"],
        "matrix": strip(matrix),
        "eci": strip(eci),
        "fitness": strip(fitness),
        "mst": strip(mst),
        "correlations": correlate["correlations"],
        "fits": correlate["fits"],
        "intermediates": ingest["intermediates"],
        "manifest": manifest,
    }
    write_json(out / "report.json", report)
    return report


def run_pipeline(cfg: RunConfig) -> dict:
    """ingest -> matrix -> eci -> fitness -> mst -> correlate -> report.

    Any stage failure aborts the run with the stage name prefixed to
    the diagnostic; the exception class (and thus the exit code) is
    preserved.
    """
    cfg.validate()
    steps = (
        ("ingest", lambda: stage_ingest(cfg)),
        ("matrix", lambda: stage_matrix(cfg)),
        ("eci", lambda: stage_eci(cfg)),
        ("fitness", lambda: stage_fitness(cfg)),
        ("mst", lambda: stage_mst(cfg)),
        ("correlate", lambda: stage_correlate(cfg)),
        ("report", lambda: stage_report(cfg)),
    )
    result: dict = {}
    for name, step in steps:
        try:
            result = step()
        except EcxError as exc:
            raise type(exc)(f"stage '{name}': {exc}") from exc
        except OSError as exc:
            raise OSError(f"stage '{name}': {exc}") from exc
    return result
