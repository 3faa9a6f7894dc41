"""Best N-term approximation in H^q and Jackson/Bernstein ratio checks.

Because the level-weighted coefficient system is a Riesz basis of H^q, the
best N-term approximant keeps the N rescaled coefficients of largest
modulus; no combinatorial search is involved.  Ties are broken by
lexicographic index order so results are deterministic across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientPoints
from .seqnorms import NormParams, besov_hybrid_norm, sobolev_norm_hyper
from .tensorbasis import HYPERBOLIC, CoeffVector, HyperIndex, IsoIndex

__all__ = [
    "NTermResult",
    "best_nterm",
    "error_curve",
    "fit_rate",
    "jackson_bernstein_ratios",
]


def _index_key(u: CoeffVector, i: int):
    pos = tuple(int(x) for x in u.positions[i])
    if u.system == HYPERBOLIC:
        return HyperIndex(tuple(int(x) for x in u.levels[i]), pos)
    return IsoIndex(int(u.levels[i]), tuple(int(x) for x in u.etypes[i]), pos)


@dataclass(frozen=True)
class NTermResult:
    """Support of the largest requested truncation and the error curve.

    ``errors`` maps N to E_N, the l^2 norm of the discarded rescaled
    coefficients; E_N is nonincreasing, E_0 is the full weighted norm and
    E_N vanishes once N reaches the number of nonzeros.
    """

    support: tuple
    errors: dict[int, float]
    q: float


def _weights_and_order(u: CoeffVector, q: float) -> tuple[np.ndarray, np.ndarray]:
    """H^q moduli 2^{q level_inf} |u| and their descending sort order."""
    w = 2.0 ** (q * u.level_linf()) * np.abs(u.values)
    keys = [u.positions[:, i] for i in range(u.n - 1, -1, -1)]
    if u.system == HYPERBOLIC:
        keys += [u.levels[:, i] for i in range(u.n - 1, -1, -1)]
    else:
        keys += [u.etypes[:, i] for i in range(u.n - 1, -1, -1)]
        keys += [u.levels]
    keys.append(-w)
    return w, np.lexsort(keys)


def _tail_errors(w_sorted: np.ndarray) -> np.ndarray:
    """tail[k] = sqrt(sum_{i >= k} w_i^2), accumulated from the small end."""
    tail2 = np.concatenate([np.cumsum((w_sorted ** 2)[::-1])[::-1], [0.0]])
    return np.sqrt(tail2)


def error_curve(u: CoeffVector, q: float, n_list) -> NTermResult:
    """E_N for every N in the ascending grid, from a single sort."""
    n_list = [int(n) for n in n_list]
    if any(b < a for a, b in zip(n_list, n_list[1:])):
        raise InsufficientPoints("N grid must be ascending")
    if any(n < 0 for n in n_list):
        raise InsufficientPoints("N must be nonnegative")
    w, order = _weights_and_order(u, q)
    tail = _tail_errors(w[order])
    total = u.num_entries
    errors = {n: float(tail[min(n, total)]) for n in n_list}
    n_sup = min(max(n_list, default=0), total)
    support = tuple(_index_key(u, i) for i in order[:n_sup])
    return NTermResult(support=support, errors=errors, q=q)


def best_nterm(u: CoeffVector, q: float, n: int) -> NTermResult:
    """Best N-term truncation in the H^q metric for a single N."""
    return error_curve(u, q, [n])


def fit_rate(curve: NTermResult, n_min: int, n_max: int) -> float:
    """Exponent of the least-squares power-law fit E_N ~ N^{-s_hat}.

    Uses the curve points with n_min <= N <= n_max, N >= 1 and E_N > 0;
    raises InsufficientPoints when fewer than three remain.
    """
    pts = [
        (np.log(n), np.log(e))
        for n, e in sorted(curve.errors.items())
        if n_min <= n <= n_max and n >= 1 and e > 0
    ]
    if len(pts) < 3:
        raise InsufficientPoints(
            f"rate fit needs at least 3 positive points in [{n_min}, {n_max}]"
        )
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    slope = np.polyfit(x, y, 1)[0]
    return float(-slope)


def _nested_truncation(u: CoeffVector, order: np.ndarray, n: int) -> CoeffVector:
    keep = order[:n]
    et = u.etypes[keep] if u.etypes is not None else None
    return CoeffVector(
        u.system, u.n, u.p_norm, u.max_level, u.basis,
        u.levels[keep], u.positions[keep], u.values[keep], etypes=et,
    )


def jackson_bernstein_ratios(u: CoeffVector, q: float, r: float) -> tuple[float, float]:
    """Empirical constants of the direct and inverse estimates.

    With 1/tau = r + 1/2: the Jackson ratio is sup_N max(N,1)^r E_N divided
    by the hybrid Besov norm with parameters (q, r, tau, tau); the
    Bernstein ratio maximizes, over the nested greedy truncations u_N, the
    same Besov norm against N^r times the H^q quantity of u_N.  The
    truncation family is a necessary-condition check: the inverse estimate
    quantifies over all N-term vectors.
    """
    tau = 1.0 / (r + 0.5)
    params = NormParams(q=q, s=r, p=tau, tau=tau)
    denom = besov_hybrid_norm(u, params)
    if denom == 0.0:
        raise ZeroDivisionError("Jackson ratio undefined for the zero vector")
    total = u.num_entries
    w, order = _weights_and_order(u, q)
    tail = _tail_errors(w[order])
    jackson = max(
        max(n, 1) ** r * float(tail[n]) / denom for n in range(total + 1)
    )
    bernstein = 0.0
    for n in range(1, total + 1):
        u_n = _nested_truncation(u, order, n)
        h_norm = sobolev_norm_hyper(u_n, q)
        if h_norm == 0.0:
            raise ZeroDivisionError("Bernstein ratio undefined: truncation vanishes")
        bernstein = max(
            bernstein, besov_hybrid_norm(u_n, params) / (n ** r * h_norm)
        )
    return jackson, bernstein
