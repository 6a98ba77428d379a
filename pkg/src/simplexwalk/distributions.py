"""Jump laws and Dirichlet machinery.

Jump laws (the step-size variable of the walk) come in three variants: Beta,
Uniform (identical to Beta(1,1) in every evaluation), and PointMass for exact
degenerate tests.  Dirichlet densities are evaluated in log space; sampling
uses normalized Gamma variates so the variate-consumption order is explicit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidParameterError
from .special import betainc_inv, betainc_reg, log_gamma

__all__ = [
    "JumpLaw",
    "BetaJump",
    "UniformJump",
    "PointMassJump",
    "beta_params",
    "sample_jump",
    "jump_pdf",
    "jump_cdf",
    "jump_tail",
    "jump_ppf",
    "DirichletParams",
    "dirichlet_logpdf",
    "dirichlet_pdf",
    "sample_dirichlet",
    "dirichlet_moments",
    "dirichlet_marginal",
    "stick_beta_params",
    "arcsine_cdf",
    "arcsine_pdf",
]


@dataclass(frozen=True)
class JumpLaw:
    """Base class; use one of the concrete variants below."""


@dataclass(frozen=True)
class BetaJump(JumpLaw):
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0.0 and self.b > 0.0):
            raise InvalidParameterError("Beta shapes must be strictly positive")


@dataclass(frozen=True)
class UniformJump(JumpLaw):
    """Uniform on [0,1]; equivalent to Beta(1,1) everywhere."""


@dataclass(frozen=True)
class PointMassJump(JumpLaw):
    v: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.v <= 1.0:
            raise InvalidParameterError("point-mass value must lie in [0,1]")


def beta_params(law: JumpLaw) -> tuple[float, float] | None:
    """(a, b) for laws with a Beta density, None for PointMass."""
    if isinstance(law, BetaJump):
        return law.a, law.b
    if isinstance(law, UniformJump):
        return 1.0, 1.0
    return None


def sample_jump(law: JumpLaw, rng: np.random.Generator, size=None):
    """Draw variates; Beta (and Uniform) via the two-Gamma construction."""
    if isinstance(law, PointMassJump):
        return law.v if size is None else np.full(size, law.v)
    a, b = beta_params(law)
    ga = rng.standard_gamma(a, size=size)
    gb = rng.standard_gamma(b, size=size)
    return ga / (ga + gb)


def _beta_logpdf(a: float, b: float, x: np.ndarray) -> np.ndarray:
    ln_norm = log_gamma(a + b) - log_gamma(a) - log_gamma(b)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = ln_norm + (a - 1.0) * np.log(x) + (b - 1.0) * np.log1p(-x)
    # endpoint limits: exponent 0 contributes nothing even where log blows up
    if a == 1.0:
        val = np.where(x == 0.0, ln_norm, val)
    if b == 1.0:
        val = np.where(x == 1.0, ln_norm, val)
    return val


def jump_pdf(law: JumpLaw, x):
    """Density on [0,1]; infinite at an endpoint when its exponent is < 0."""
    if isinstance(law, PointMassJump):
        raise DomainError("a point mass has no density")
    a, b = beta_params(law)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("jump values live in [0,1]")
    out = np.exp(_beta_logpdf(a, b, arr))
    return float(out) if out.ndim == 0 else out


def jump_cdf(law: JumpLaw, x):
    """P(xi <= x)."""
    arr = np.asarray(x, dtype=float)
    if isinstance(law, PointMassJump):
        out = (arr >= law.v).astype(float)
        return float(out) if out.ndim == 0 else out
    a, b = beta_params(law)
    return betainc_reg(a, b, np.clip(arr, 0.0, 1.0))


def jump_tail(law: JumpLaw, x):
    """P(xi >= x), computed from the complementary incomplete beta."""
    arr = np.asarray(x, dtype=float)
    if isinstance(law, PointMassJump):
        out = (law.v >= arr).astype(float)
        return float(out) if out.ndim == 0 else out
    a, b = beta_params(law)
    return betainc_reg(b, a, np.clip(1.0 - arr, 0.0, 1.0))


def jump_ppf(law: JumpLaw, q: float) -> float:
    """Quantile function (bisection on the CDF for Beta laws)."""
    if isinstance(law, PointMassJump):
        return law.v
    a, b = beta_params(law)
    if (a, b) == (1.0, 1.0):
        return float(q)
    return betainc_inv(a, b, q)


# ---------------------------------------------------------------------------
# Dirichlet


@dataclass(frozen=True)
class DirichletParams:
    """Concentration vector (alpha_1, ..., alpha_{d+1}); the final entry is
    attached to the implied zeroth barycentric coordinate."""

    alpha: tuple[float, ...]

    def __post_init__(self) -> None:
        alpha = tuple(float(a) for a in np.atleast_1d(np.asarray(self.alpha, dtype=float)))
        if len(alpha) < 2 or any(a <= 0.0 for a in alpha):
            raise InvalidParameterError("need at least two strictly positive concentrations")
        object.__setattr__(self, "alpha", alpha)

    @property
    def d(self) -> int:
        return len(self.alpha) - 1

    @property
    def total(self) -> float:
        return float(sum(self.alpha))


def dirichlet_logpdf(params: DirichletParams, z) -> np.ndarray | float:
    """Log-density at z (free coordinates, last axis of length d)."""
    alpha = np.asarray(params.alpha)
    d = params.d
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != d:
        raise DomainError(f"expected {d} coordinates, got {z.shape[-1]}")
    z0 = 1.0 - z.sum(axis=-1, keepdims=True)
    bary = np.concatenate([z, z0], axis=-1)  # ordered to match alpha
    if np.any(bary < 0.0):
        raise DomainError("point outside the simplex")
    expo = alpha - 1.0
    if np.any((bary == 0.0) & (expo < 0.0)):
        raise DomainError("density unbounded at this boundary point")
    ln_norm = log_gamma(alpha.sum()) - log_gamma(alpha).sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(expo == 0.0, 0.0, expo * np.log(bary))
    out = ln_norm + terms.sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def dirichlet_pdf(params: DirichletParams, z) -> np.ndarray | float:
    return np.exp(dirichlet_logpdf(params, z))


def sample_dirichlet(
    params: DirichletParams, rng: np.random.Generator, size: int | None = None
) -> np.ndarray:
    """Samples as free coordinates, shape (d,) or (size, d)."""
    alpha = np.asarray(params.alpha)
    shape = alpha.shape if size is None else (size, alpha.shape[0])
    g = rng.standard_gamma(alpha, size=shape)
    z = g / g.sum(axis=-1, keepdims=True)
    return z[..., : params.d]


def dirichlet_moments(params: DirichletParams) -> tuple[np.ndarray, np.ndarray]:
    """(mean, covariance) of the d free coordinates."""
    alpha = np.asarray(params.alpha)
    total = alpha.sum()
    m = alpha[:-1] / total
    cov = (np.diag(m) - np.outer(m, m)) / (total + 1.0)
    return m, cov


def dirichlet_marginal(params: DirichletParams, i: int) -> BetaJump:
    """The i-th free coordinate (1-based) aggregates to a Beta law."""
    if not 1 <= i <= params.d:
        raise IndexError(f"coordinate index {i} outside 1..{params.d}")
    a = params.alpha[i - 1]
    return BetaJump(a, params.total - a)


def stick_beta_params(params: DirichletParams) -> list[tuple[float, float]]:
    """Beta parameters of the independent stick coordinates.

    Under Dirichlet(alpha), the stick coordinates x_j = z_j / (1 - sum_{l>j} z_l)
    are independent with x_j ~ Beta(alpha_j, alpha_{d+1} + sum_{l<j} alpha_l).
    """
    alpha = params.alpha
    d = params.d
    out = []
    acc = alpha[d]  # the zeroth-coordinate concentration
    for j in range(1, d + 1):
        out.append((alpha[j - 1], acc + sum(alpha[: j - 1])))
    return out


# ---------------------------------------------------------------------------
# Arcsine law (Beta(1/2, 1/2))


def arcsine_cdf(x) -> np.ndarray | float:
    """(2/pi) * arcsin(sqrt(x)), the Beta(1/2,1/2) CDF."""
    arr = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    out = (2.0 / np.pi) * np.arcsin(np.sqrt(arr))
    return float(out) if out.ndim == 0 else out


def arcsine_pdf(x) -> np.ndarray | float:
    arr = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = 1.0 / (np.pi * np.sqrt(arr * (1.0 - arr)))
    return float(out) if out.ndim == 0 else out
