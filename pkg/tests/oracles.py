"""Independent reference implementations the tests check against.

Everything here deliberately avoids the code paths (and where possible
the libraries) used by the package itself: eigenpairs come from a
hand-rolled cyclic Jacobi rotation solver instead of LAPACK, spanning
trees from exhaustive Prüfer-sequence enumeration, p-values from
adaptive quadrature of the Student-t density at 40 significant digits,
line fits from the textbook normal-equation formulas, and the fitness
map from an extended-precision mpmath iteration.
"""

from __future__ import annotations

import heapq
import itertools
import math
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np


# ---------------------------------------------------------------- eigen

def jacobi_eigh(sym: np.ndarray, sweep_tol: float = 1e-14,
                max_sweeps: int = 60) -> Tuple[np.ndarray, np.ndarray]:
    """All eigenpairs of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors-as-columns) sorted by descending
    eigenvalue.  O(n^4)-ish and proud of it; only meant for the small
    matrices the tests use.
    """
    a = np.array(sym, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.abs(a).max() or 1.0
    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        # sum the off-diagonal squares directly: the subtraction
        # (a**2).sum() - (diag**2).sum() cancels catastrophically and
        # can report zero while the true norm is still ~sqrt(eps)*|A|
        off = math.sqrt(float((a[off_mask] ** 2).sum()))
        if off <= sweep_tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:      # theta**2 would overflow
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (
                        abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    vals = np.diag(a).copy()
    order = np.argsort(-vals, kind="stable")
    return vals[order], v[:, order]


def region_spectrum(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of the region transition matrix, via its symmetric twin.

    T = Kp^-1 M Ks^-1 M^T is similar to the symmetric C C^T with
    C = Kp^-1/2 M Ks^-1/2; if C C^T u = λ u then T (Kp^-1/2 u) = λ ·
    (Kp^-1/2 u).  Eigenvalues come back sorted descending; eigenvectors
    are columns (of T's eigenbasis, not normalized).
    """
    m = np.asarray(m, dtype=float)
    kp = m.sum(axis=1)
    ks = m.sum(axis=0)
    c = m / np.sqrt(kp)[:, None] / np.sqrt(ks)[None, :]
    vals, u = jacobi_eigh(c @ c.T)
    return vals, u / np.sqrt(kp)[:, None]


def eci_oracle(m: np.ndarray) -> Tuple[float, np.ndarray]:
    """(λ₂, standardized second eigenvector) for the region matrix.

    The sign is arbitrary — compare callers' vectors up to sign.
    """
    vals, vecs = region_spectrum(m)
    v = vecs[:, 1]
    return float(vals[1]), (v - v.mean()) / v.std()


# ----------------------------------------------------- spanning trees

def _prufer_to_edges(seq: Sequence[int], n: int) -> List[Tuple[int, int]]:
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    leaves = [i for i in range(n) if degree[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    a = heapq.heappop(leaves)
    b = heapq.heappop(leaves)
    edges.append((a, b))
    return edges


@lru_cache(maxsize=None)
def all_labeled_trees(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Edge endpoints of every labeled tree on n nodes (Cayley: n^(n-2)).

    Returns (U, V), each of shape (n^(n-2), n-1), so that tree t has
    edges (U[t,k], V[t,k]).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    trees = [
        _prufer_to_edges(seq, n)
        for seq in itertools.product(range(n), repeat=n - 2)
    ]
    arr = np.array(trees, dtype=np.int64)          # (count, n-1, 2)
    return arr[:, :, 0], arr[:, :, 1]


def best_tree_weight(weights: np.ndarray) -> float:
    """Maximum total weight over all labeled spanning trees (brute force)."""
    n = weights.shape[0]
    u, v = all_labeled_trees(n)
    return float(weights[u, v].sum(axis=1).max())


# ----------------------------------------------------------- p-values

def p_two_sided(r: float, n: int, dps: int = 40) -> float:
    """Two-sided Pearson p-value by quadrature of the t density."""
    from mpmath import mp

    with mp.workdps(dps):
        df = mp.mpf(n - 2)
        rr = mp.mpf(repr(r))
        t = abs(rr) * mp.sqrt(df / (1 - rr * rr))
        c = mp.gamma((df + 1) / 2) / (mp.sqrt(df * mp.pi) * mp.gamma(df / 2))

        def density(x):
            return c * (1 + x * x / df) ** (-(df + 1) / 2)

        tail = mp.quad(density, [t, mp.inf])
        return float(2 * tail)


# ------------------------------------------------------------- fitting

def ols_line(u: Sequence[float], w: Sequence[float]) -> Tuple[float, float]:
    """(slope, intercept) of w on u from the raw normal equations."""
    n = len(u)
    su = math.fsum(u)
    sw = math.fsum(w)
    suu = math.fsum(x * x for x in u)
    suw = math.fsum(x * y for x, y in zip(u, w))
    slope = (n * suw - su * sw) / (n * suu - su * su)
    return slope, (sw - slope * su) / n


def exp_fit_oracle(x, y) -> Tuple[float, float]:
    """(a, b) of y = a·e^(bx) by least squares on (x, ln y)."""
    b, loga = ols_line(list(x), [math.log(v) for v in y])
    return math.exp(loga), b


def power_fit_oracle(x, y) -> Tuple[float, float]:
    """(a, b) of y = a·x^b by least squares on (ln x, ln y)."""
    b, loga = ols_line([math.log(v) for v in x], [math.log(v) for v in y])
    return math.exp(loga), b


# ------------------------------------------------------------- fitness

def fitness_reference(m: np.ndarray, tol: str = "1e-30",
                      max_iter: int = 5000, dps: int = 60):
    """Extended-precision fitness/complexity iteration.

    Runs the same (Jacobi-style, mean-1 normalized) map in mpmath
    arithmetic until the sup-norm change drops below ``tol`` and
    returns (F, Q, iterations) as float lists.
    """
    from mpmath import mp

    with mp.workdps(dps):
        rows, cols = m.shape
        mm = [[mp.mpf(int(m[i, j])) for j in range(cols)] for i in range(rows)]
        f = [mp.mpf(1)] * rows
        q = [mp.mpf(1)] * cols
        eps = mp.mpf(tol)
        its = 0
        for its in range(1, max_iter + 1):
            f_new = [mp.fsum(mm[i][j] * q[j] for j in range(cols))
                     for i in range(rows)]
            q_new = []
            for j in range(cols):
                denom = mp.fsum(mm[i][j] / f[i] for i in range(rows))
                q_new.append(1 / denom)
            mean_f = mp.fsum(f_new) / rows
            mean_q = mp.fsum(q_new) / cols
            f_new = [v / mean_f for v in f_new]
            q_new = [v / mean_q for v in q_new]
            delta = max(
                max(abs(a - b) for a, b in zip(f_new, f)),
                max(abs(a - b) for a, b in zip(q_new, q)),
            )
            f, q = f_new, q_new
            if delta < eps:
                break
        return [float(v) for v in f], [float(v) for v in q], its
