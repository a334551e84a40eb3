"""Shared helpers for building small test matrices and catalogs."""

from __future__ import annotations

import numpy as np

from ecx import BinaryBipartiteMatrix, RegionCatalog, SectorCatalog


def region_codes(n):
    return [f"R{i + 1:02d}" for i in range(n)]


def sector_codes(n):
    return [f"S{j + 1:02d}" for j in range(n)]


def make_region_catalog(n, groups=("Kanto", "Kansai")):
    return RegionCatalog.from_rows(
        (c, f"Region {c[1:]}", groups[i % len(groups)])
        for i, c in enumerate(region_codes(n))
    )


def make_sector_catalog(n, divisions=("Goods", "Services", "Public")):
    return SectorCatalog.from_rows(
        (c, f"Sector {c[1:]}", divisions[j % len(divisions)], 0)
        for j, c in enumerate(sector_codes(n))
    )


def binary(values) -> BinaryBipartiteMatrix:
    """Wrap a 0/1 array in a BinaryBipartiteMatrix with generated labels."""
    values = np.asarray(values, dtype=np.int64)
    p, s = values.shape
    return BinaryBipartiteMatrix(values, make_region_catalog(p),
                                 make_sector_catalog(s))


def fat_nested(n: int) -> np.ndarray:
    """Square staircase whose thinnest row still has two entries.

    Row i carries ones in columns 0..min(n-1, n-i), giving row degrees
    (n, n, n-1, ..., 2): perfectly nested, and inside the regime where
    the fitness iteration settles on a strictly positive fixed point
    (a staircase with a degree-1 row instead drains that row's fitness
    toward zero and never meets a sup-norm stopping rule).
    """
    m = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        m[i, : min(n, n - i + 1)] = 1
    return m
