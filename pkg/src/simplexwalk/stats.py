"""Goodness-of-fit machinery: KS tests, simplex chi-square, moments, TV.

Critical values are fixed constants (1.63/sqrt(n) at alpha=0.01, 1.95/sqrt(n)
at alpha=0.001; the two-sample version uses the effective-n formula), so
reports carry explicit thresholds rather than p-values.  The chi-square over
the simplex bins samples through the stick-breaking pullback, where the cell
probabilities of a Dirichlet law factor exactly into products of 1-D Beta
increments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import chi2 as _chi2

from . import geometry
from .distributions import DirichletParams, dirichlet_moments, stick_beta_params
from .errors import DomainError, InvalidParameterError
from .special import betainc_reg

__all__ = [
    "GofReport",
    "KS_CRITICAL",
    "ks_critical",
    "ks_two_sample_critical",
    "ks_one_sample",
    "ks_two_sample",
    "ks_report",
    "chi_square_simplex",
    "moment_compare",
    "tv_histogram",
]

#: Fixed one-sample KS critical constants c(alpha); threshold is c/sqrt(n).
KS_CRITICAL = {0.01: 1.63, 0.001: 1.95}


@dataclass
class GofReport:
    kind: str
    statistic: float
    threshold: float
    n: int
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "n": self.n,
            "passed": self.passed,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


def ks_critical(n: int, alpha: float = 0.01) -> float:
    if alpha not in KS_CRITICAL:
        raise InvalidParameterError(f"no critical constant tabulated for alpha={alpha}")
    return KS_CRITICAL[alpha] / np.sqrt(n)


def ks_two_sample_critical(n1: int, n2: int, alpha: float = 0.01) -> float:
    if alpha not in KS_CRITICAL:
        raise InvalidParameterError(f"no critical constant tabulated for alpha={alpha}")
    return KS_CRITICAL[alpha] * np.sqrt((n1 + n2) / (n1 * n2))


def ks_one_sample(sample, cdf: Callable) -> float:
    """D = sup |ECDF - F| over the sample points."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.shape[0]
    if n == 0:
        raise DomainError("empty sample")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_two_sample(a, b) -> float:
    """D = sup |ECDF_a - ECDF_b|."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise DomainError("empty sample")
    allv = np.concatenate([a, b])
    fa = np.searchsorted(a, allv, side="right") / a.size
    fb = np.searchsorted(b, allv, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_report(sample, cdf: Callable, alpha: float, kind: str = "ks_one_sample") -> GofReport:
    n = len(sample)
    stat = ks_one_sample(sample, cdf)
    thr = ks_critical(n, alpha)
    return GofReport(kind=kind, statistic=stat, threshold=thr, n=n, passed=stat < thr,
                     detail={"alpha": alpha})


def chi_square_simplex(
    samples,
    params: DirichletParams,
    bins_per_axis: int = 10,
    *,
    alpha: float = 0.001,
    min_expected: float = 5.0,
) -> GofReport:
    """Chi-square of simplex samples against a Dirichlet law.

    Cells are preimages under the stick-breaking map of an equal-subdivision
    grid of the cube; their exact probabilities are products of per-axis Beta
    increments.  Bins are coarsened (halved) until every expected count
    reaches ``min_expected``; the final resolution is recorded.
    """
    z = np.asarray(samples, dtype=float)
    n, d = z.shape
    x = geometry.inverse_T(z)
    pairs = stick_beta_params(params)

    m = bins_per_axis
    while True:
        edges = np.linspace(0.0, 1.0, m + 1)
        axis_probs = [np.diff(betainc_reg(a, b, edges)) for a, b in pairs]
        expected = np.full([m] * d, float(n))
        for axis, p in enumerate(axis_probs):
            shape = [1] * d
            shape[axis] = m
            expected = expected * p.reshape(shape)
        if expected.min() >= min_expected or m == 1:
            break
        m = max(1, m // 2)

    counts, _ = np.histogramdd(x, bins=[np.linspace(0.0, 1.0, m + 1)] * d)
    stat = float(((counts - expected) ** 2 / expected).sum())
    dof = expected.size - 1
    thr = float(_chi2.ppf(1.0 - alpha, dof)) if dof > 0 else np.inf
    return GofReport(
        kind="chi_square_simplex",
        statistic=stat,
        threshold=thr,
        n=n,
        passed=stat < thr,
        detail={
            "bins_per_axis": m,
            "requested_bins_per_axis": bins_per_axis,
            "coarsened": m != bins_per_axis,
            "dof": dof,
            "alpha": alpha,
            "cell_prob_sum": float(expected.sum() / n),
        },
    )


def moment_compare(samples, params: DirichletParams) -> float:
    """Max standardized deviation of sample means from the exact means."""
    z = np.asarray(samples, dtype=float)
    n = z.shape[0]
    mean, cov = dirichlet_moments(params)
    sd = np.sqrt(np.diag(cov))
    return float(np.max(np.abs(z.mean(axis=0) - mean) * np.sqrt(n) / sd))


def tv_histogram(samples, pdf: Callable, bins: int = 20) -> float:
    """Histogram estimate of total-variation distance to a density on S_d.

    Bins the stick-breaking pullback on an equal grid of the cube and compares
    empirical cell masses against cell integrals of the pushforward density
    (3-point Gauss-Legendre per axis).  Diagnostic only — the estimate carries
    binning bias and is reported, not thresholded.
    """
    z = np.asarray(samples, dtype=float)
    n, d = z.shape
    x = geometry.inverse_T(z)
    edges = np.linspace(0.0, 1.0, bins + 1)
    counts, _ = np.histogramdd(x, bins=[edges] * d)

    nodes, weights = np.polynomial.legendre.leggauss(3)
    nodes = 0.5 * (nodes + 1.0)  # to [0,1]
    weights = 0.5 * weights
    h = 1.0 / bins

    # tensor grid of quadrature nodes across all cells, one axis at a time
    axis_nodes = (edges[:-1][:, None] + h * nodes[None, :]).ravel()  # bins*3
    grids = np.meshgrid(*([axis_nodes] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    zpts = geometry.forward_T(pts, validate=False)
    # |det DT| = prod_l (1 - x_l)^{l-1} in 1-based coordinate order
    jac = np.prod(
        (1.0 - pts) ** np.arange(d), axis=-1
    )
    vals = np.asarray(pdf(zpts), dtype=float) * jac

    w_axis = np.tile(weights, bins) * h  # node weights including cell width
    wgrids = np.meshgrid(*([w_axis] * d), indexing="ij")
    wts = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    cell_shape = []
    for _ in range(d):
        cell_shape.extend([bins, 3])
    contrib = (vals * wts).reshape(cell_shape)
    # sum out the node axes (odd positions)
    probs = contrib.sum(axis=tuple(range(1, 2 * d, 2)))
    return float(0.5 * np.abs(counts / n - probs).sum())
