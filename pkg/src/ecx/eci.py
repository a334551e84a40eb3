"""Spectral complexity indices from the bipartite matrix.

The region transition matrix T[p][p'] = sum_s M[p][s]·M[p'][s] /
(k_p0[p]·k_s0[s]) is row-stochastic: its leading eigenpair is (1,
uniform) and carries no information.  The index is the eigenvector of
the second-largest eigenvalue, standardized to mean 0 and population
standard deviation 1 (ECI on the region side, PCI on the sector side).

T is similar to a symmetric positive-semidefinite matrix, so its
spectrum is real and nonnegative; the solver still refuses to pick a
direction when the second eigenvalue is complex beyond rounding or not
isolated from its neighbours ("degenerate spectrum").

Two solver paths: a full dense eigendecomposition for n <= 64 and, for
larger matrices, power iteration on the deflated matrix
B = T - (1/n)·ones·onesᵀ (Wielandt deflation of the known leading
eigenpair), started from the deterministic alternating vector
(+1, -1, ...) orthogonalized against the uniform vector.  B's spectrum
is {0} ∪ {λ2, λ3, ...}; its dominant eigenvector w recovers the true
second eigenvector as v = w + (onesᵀw / (n·(λ2-1)))·ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSpectrumError,
    InputDataError,
    NonConvergenceError,
    NumericalError,
)
from .rca import BinaryBipartiteMatrix, degree_profile, validate_nondegenerate

DENSE_LIMIT = 64
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000


@dataclass(frozen=True)
class TransitionMatrix:
    values: np.ndarray          # square, row-stochastic
    kind: str                   # "region" | "sector"
    codes: tuple


@dataclass(frozen=True)
class EigenPair:
    eigenvalue: float
    eigenvector: np.ndarray     # unit Euclidean norm, canonical sign
    residual_norm: float


@dataclass(frozen=True)
class ComplexityIndices:
    eci: np.ndarray
    pci: np.ndarray
    region_codes: tuple
    sector_codes: tuple
    region_pair: EigenPair
    sector_pair: EigenPair
    method_region: str          # "dense" | "power"
    method_sector: str

    @property
    def second_eigenvalue_region(self) -> float:
        return self.region_pair.eigenvalue

    @property
    def second_eigenvalue_sector(self) -> float:
        return self.sector_pair.eigenvalue

    @property
    def spectral_gap(self) -> float:
        """1 - λ2 of the region transition matrix."""
        return 1.0 - self.region_pair.eigenvalue


def build_transition(m: BinaryBipartiteMatrix, kind: str) -> TransitionMatrix:
    """Row-stochastic co-occurrence transition matrix of the given kind."""
    validate_nondegenerate(m)
    values = m.values.astype(float)
    k_p0 = values.sum(axis=1)
    k_s0 = values.sum(axis=0)
    for deg, codes, what in ((k_p0, m.regions.codes, "region"),
                             (k_s0, m.sectors.codes, "sector")):
        if np.any(deg == 0):
            label = codes[int(np.argmax(deg == 0))]
            raise InputDataError(f"zero degree for {what} {label!r}")
    if kind == "region":
        t = (values / k_p0[:, None]) @ (values / k_s0[None, :]).T
        codes = m.regions.codes
    elif kind == "sector":
        t = (values / k_s0[None, :]).T @ (values / k_p0[:, None])
        codes = m.sectors.codes
    else:
        raise InputDataError(f"unknown transition kind {kind!r}")
    return TransitionMatrix(t, kind, codes)


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    return -v if v[int(np.argmax(np.abs(v)))] < 0 else v


def _check_gap(lam_hi: float, lam_lo: float, tol: float, which: str) -> None:
    lam_hi, lam_lo = float(lam_hi), float(lam_lo)
    if abs(lam_hi - lam_lo) < tol:
        raise DegenerateSpectrumError(
            f"degenerate spectrum: {which} eigenvalues "
            f"{lam_hi!r} and {lam_lo!r} differ by less than tol={tol!r}"
        )


def _second_eigenpair_dense(t: TransitionMatrix, tol: float) -> EigenPair:
    vals, vecs = np.linalg.eig(t.values)
    order = np.argsort(-vals.real, kind="stable")
    n = len(vals)
    l1, l2 = vals[order[0]], vals[order[1]]
    _check_gap(l1.real, l2.real, tol, "first and second")
    if n >= 3:
        _check_gap(l2.real, vals[order[2]].real, tol, "second and third")
    if abs(l2.imag) >= 1e-10:
        raise DegenerateSpectrumError(
            f"degenerate spectrum: second eigenvalue {complex(l2)!r} is not real"
        )
    v = vecs[:, order[1]]
    # a real eigenvector may come back with an arbitrary complex phase
    k = int(np.argmax(np.abs(v)))
    v = (v / (v[k] / abs(v[k]))).real
    v /= np.linalg.norm(v)
    v = _canonical_sign(v)
    lam = float(l2.real)
    residual = float(np.max(np.abs(t.values @ v - lam * v)))
    if residual > max(tol, 1e-9):
        raise NonConvergenceError(
            f"eigenpair residual {residual!r} exceeds tolerance"
        )
    return EigenPair(lam, v, residual)


def _alternating_start(n: int, shift: int = 0) -> np.ndarray:
    x = np.where((np.arange(n) + shift) % 2 == 0, 1.0, -1.0)
    x -= x.mean()
    return x / np.linalg.norm(x)


def _power_dominant(mul, start: np.ndarray, tol: float, max_iter: int):
    """Dominant eigenpair of the linear map `mul` by power iteration.

    Returns (lam, x, residual, converged); never raises, callers decide
    how strict to be.
    """
    x = start
    lam = 0.0
    residual = np.inf
    for _ in range(max_iter):
        z = mul(x)
        lam = float(x @ z)
        residual = float(np.max(np.abs(z - lam * x)))
        if residual < tol:
            return lam, x, residual, True
        nz = np.linalg.norm(z)
        if nz < 1e-250:
            # the map annihilates everything reachable: spectrum ~ 0
            return 0.0, x, 0.0, True
        x = z / nz
    return lam, x, residual, False


def _second_eigenpair_power(t: TransitionMatrix, tol: float,
                            max_iter: int) -> EigenPair:
    a = t.values
    n = a.shape[0]

    def mul_b(x):                      # B x = T x - (mean x)·ones
        return a @ x - x.mean()

    lam2, w, resid_b, ok = _power_dominant(
        mul_b, _alternating_start(n), tol, max_iter
    )
    if not ok:
        raise NonConvergenceError(
            f"power iteration did not converge in {max_iter} iterations "
            f"(residual {resid_b!r})"
        )
    _check_gap(1.0, lam2, tol, "first and second")

    def mul_c(x):                      # deflate λ2 as well
        return mul_b(x) - lam2 * (w @ x) * w

    start3 = _alternating_start(n, shift=1)
    start3 -= (w @ start3) * w
    n3 = np.linalg.norm(start3)
    if n3 > 1e-12:
        start3 /= n3
    else:
        e = np.zeros(n)
        e[0] = 1.0
        e -= e.mean()
        e -= (w @ e) * w
        start3 = e / np.linalg.norm(e)
    # estimate only: used for the spectral-gap guard, so a capped
    # iteration count without convergence is acceptable here.
    lam3, _, _, _ = _power_dominant(mul_c, start3, tol, max_iter)
    _check_gap(lam2, lam3, tol, "second and third")

    v = w + (w.sum() / (n * (lam2 - 1.0))) * np.ones(n)
    v /= np.linalg.norm(v)
    v = _canonical_sign(v)
    residual = float(np.max(np.abs(a @ v - lam2 * v)))
    if residual > max(tol, 1e-9):
        raise NonConvergenceError(
            f"eigenpair residual {residual!r} exceeds tolerance after recovery"
        )
    return EigenPair(float(lam2), v, residual)


def second_eigenpair(t: TransitionMatrix, tol: float = DEFAULT_TOL,
                     max_iter: int = DEFAULT_MAX_ITER) -> EigenPair:
    """Eigenpair of the second-largest (by real part) eigenvalue of T."""
    if not (tol > 0):
        raise InputDataError(f"tol must be positive, got {tol}")
    n = t.values.shape[0]
    if n < 2:
        raise InputDataError("transition matrix must be at least 2x2")
    if n <= DENSE_LIMIT:
        return _second_eigenpair_dense(t, tol)
    return _second_eigenpair_power(t, tol, max_iter)


def _standardize_oriented(v: np.ndarray, anchor: np.ndarray,
                          orient: int) -> np.ndarray:
    """Mean-0 / population-std-1 scaling with a deterministic sign.

    The sign is chosen so the Pearson correlation with ``orient*anchor``
    is >= 0; an exactly-zero correlation falls back to making the first
    nonzero component positive.
    """
    std = v.std()
    if std == 0:
        raise NumericalError("cannot standardize a constant eigenvector")
    z = (v - v.mean()) / std
    cov = float(z @ (anchor - anchor.mean()))
    if orient * cov < 0:
        z = -z
    elif cov == 0:
        nz = np.flatnonzero(z)
        if nz.size and z[nz[0]] < 0:
            z = -z
    return z


def compute_indices(m: BinaryBipartiteMatrix, tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER) -> ComplexityIndices:
    """ECI per region and PCI per sector.

    ECI is oriented to correlate non-negatively with diversification
    k_p0; PCI to correlate non-negatively with -k_s0 (complex sectors
    are the less ubiquitous ones).
    """
    prof = degree_profile(m)
    t_region = build_transition(m, "region")
    t_sector = build_transition(m, "sector")
    pair_r = second_eigenpair(t_region, tol, max_iter)
    pair_s = second_eigenpair(t_sector, tol, max_iter)
    eci = _standardize_oriented(pair_r.eigenvector, prof.k_p0.astype(float), +1)
    pci = _standardize_oriented(pair_s.eigenvector, prof.k_s0.astype(float), -1)
    return ComplexityIndices(
        eci=eci,
        pci=pci,
        region_codes=m.regions.codes,
        sector_codes=m.sectors.codes,
        region_pair=pair_r,
        sector_pair=pair_s,
        method_region="dense" if len(m.regions) <= DENSE_LIMIT else "power",
        method_sector="dense" if len(m.sectors) <= DENSE_LIMIT else "power",
    )
