"""Verification of the stationary integral equation.

A density ``f`` on the simplex is stationary for the walk exactly when it
solves ``f(z) = sum_{j=0}^d T_j(z)``, where each ``T_j`` is a one-dimensional
integral transporting mass that arrived by a jump toward vertex j.  This
module evaluates the ``T_j`` by singularity-aware quadrature, forms the
relative residual of the fixed-point equation on interior grids, checks the
beta-type integral identity that underlies the closed-form Dirichlet
solution, and provides the one-step distributional-fixed-point sampler.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .chain import ChoiceFunction, ConstantChoice, choice_probs
from .distributions import (
    DirichletParams,
    JumpLaw,
    beta_params,
    dirichlet_pdf,
    jump_pdf,
    sample_dirichlet,
    sample_jump,
)
from .errors import DomainError, InvalidParameterError
from .quadrature import integrate_interval

__all__ = [
    "DensityCandidate",
    "dirichlet_candidate",
    "uniform_candidate",
    "operator_Tj",
    "residual",
    "residual_grid",
    "interior_grid_1d",
    "interior_grid_2d",
    "beta_integral_identity",
    "sethuraman_onestep",
]


@dataclass(frozen=True)
class DensityCandidate:
    """A candidate stationary density on the simplex.

    ``vertex_exponents`` (alpha_1, ..., alpha_d, alpha_{d+1}), when known,
    give the power behavior of f at each barycentric face; they let the
    quadrature smooth the endpoint singularity of each T_j exactly.  Unknown
    exponents fall back to plain adaptive quadrature.
    """

    func: Callable[[np.ndarray], float]
    label: str
    vertex_exponents: tuple[float, ...] | None = None

    def __call__(self, z: np.ndarray) -> float:
        return float(self.func(z))


def dirichlet_candidate(params: DirichletParams) -> DensityCandidate:
    return DensityCandidate(
        func=lambda z: float(dirichlet_pdf(params, z)),
        label=f"dirichlet{tuple(round(a, 6) for a in params.alpha)}",
        vertex_exponents=params.alpha,
    )


def uniform_candidate(d: int) -> DensityCandidate:
    """The uniform density on S_d (value d! everywhere)."""
    return dirichlet_candidate(DirichletParams((1.0,) * (d + 1)))


def _bary_min(w: np.ndarray) -> float:
    return float(min(w.min(), 1.0 - w.sum()))


def operator_Tj(
    j: int,
    f: DensityCandidate,
    cf: ChoiceFunction,
    g: JumpLaw,
    z,
    *,
    fail_tol: float = 1e-9,
) -> float:
    """The j-th fixed-point operator at an interior point z.

    ``T_0(z)`` integrates ``u^{-d} f(z/u) p_0(z/u) g(1-u)`` for u from
    ``sum(z)`` to 1; for j >= 1 the lower limit is ``1 - z_j`` and the j-th
    argument coordinate is ``(z_j - 1 + u)/u``.
    """
    gp = beta_params(g)
    if gp is None:
        raise DomainError("the jump law must have a density")
    ga, gb = gp
    z = np.asarray(z, dtype=float)
    d = z.shape[-1]
    if z.ndim != 1:
        raise DomainError("operator_Tj evaluates one point at a time")
    if not 0 <= j <= d:
        raise IndexError(f"vertex index {j} outside 0..{d}")
    total = float(z.sum())
    if np.any(z <= 0.0) or total >= 1.0:
        raise DomainError("z must be interior")

    if j == 0:
        a = total
    else:
        a = 1.0 - float(z[j - 1])

    def integrand(u: float) -> float:
        if u <= a or u > 1.0:
            return 0.0
        w = z / u
        if j >= 1:
            w = w.copy()
            w[j - 1] = (z[j - 1] - 1.0 + u) / u
        if _bary_min(w) <= 0.0:
            return 0.0  # float-degenerate endpoint hit; measure zero
        p = choice_probs(cf, w)[j]
        return u ** (-d) * f(w) * p * jump_pdf(g, 1.0 - u)

    if f.vertex_exponents is not None:
        lower = f.vertex_exponents[d] if j == 0 else f.vertex_exponents[j - 1]
    else:
        lower = None
    return integrate_interval(
        integrand, a, 1.0, lower_power=lower, upper_power=ga, fail_tol=fail_tol
    )


def residual(f: DensityCandidate, cf: ChoiceFunction, g: JumpLaw, z) -> float:
    """Relative fixed-point residual ``|sum_j T_j(z) - f(z)| / f(z)``."""
    z = np.asarray(z, dtype=float)
    fz = f(z)
    if not fz > 0.0:
        raise DomainError("candidate density must be positive at z")
    total = sum(operator_Tj(j, f, cf, g, z) for j in range(z.shape[-1] + 1))
    return abs(total - fz) / fz


def residual_grid(
    f: DensityCandidate, cf: ChoiceFunction, g: JumpLaw, points
) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    return np.array([residual(f, cf, g, p) for p in pts])


def interior_grid_1d(n: int = 99, margin: float = 0.05) -> np.ndarray:
    """n equally spaced interior points of [margin, 1-margin], shape (n, 1)."""
    return np.linspace(margin, 1.0 - margin, n)[:, None]


def interior_grid_2d(n: int = 50, margin: float = 0.05) -> np.ndarray:
    """Admissible points of an n-by-n grid of [margin, 1-margin]^2 with
    z_1 + z_2 <= 1 - margin, shape (m, 2)."""
    g = np.linspace(margin, 1.0 - margin, n)
    zz = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
    return zz[zz.sum(axis=1) <= 1.0 - margin]


def beta_integral_identity(a: float, b: float, z: float) -> tuple[float, float]:
    """Quadrature check of ``int_z^1 u^{-b-1}(u-z)^{a-1}[au - b(u-z)] du = (1-z)^a``.

    Returns (lhs by quadrature, rhs in closed form).  The integrand changes
    sign once when a < b; splitting there keeps the two lobes separately
    well-estimated.
    """
    if not a > 0.0:
        raise InvalidParameterError("need a > 0 for an integrable endpoint")
    if not 0.0 <= z < 1.0:
        raise DomainError("need z in [0, 1)")

    # Substituting t = u - z keeps the singular factor t^{a-1} free of the
    # cancellation that recomputing u - z near u = z would otherwise cause.
    def integrand(t: float) -> float:
        return (t + z) ** (-b - 1.0) * t ** (a - 1.0) * (a * z + (a - b) * t)

    rhs = (1.0 - z) ** a
    top = 1.0 - z
    # the bracket a*z + (a-b)*t vanishes at t = a z/(b-a)
    tstar = a * z / (b - a) if b > a else None
    if tstar is not None and 0.0 < tstar < top:
        lhs = integrate_interval(integrand, 0.0, tstar, lower_power=a) + integrate_interval(
            integrand, tstar, top
        )
    else:
        lhs = integrate_interval(integrand, 0.0, top, lower_power=a)
    return lhs, rhs


def sethuraman_onestep(
    params: DirichletParams,
    p: Sequence[float],
    gamma: float,
    rng: np.random.Generator,
    size: int | None = None,
    jump: JumpLaw | None = None,
) -> np.ndarray:
    """One step of the distributional fixed point ``(1-xi) Z + xi Theta``.

    Z is drawn exactly from Dirichlet(params) with constant vertex
    probabilities p and jump Beta(1, gamma) (overridable, e.g. by a point
    mass for degenerate checks).  ``params`` must equal
    ``(p_1 gamma, ..., p_d gamma, p_0 gamma)``.
    """
    from .distributions import BetaJump  # local to avoid import clutter at top

    p = tuple(float(v) for v in p)
    d = len(p)
    p0 = 1.0 - sum(p)
    want = tuple(v * gamma for v in (*p, p0))
    if len(params.alpha) != d + 1 or any(
        abs(x - y) > 1e-9 for x, y in zip(params.alpha, want)
    ):
        raise InvalidParameterError(
            f"params.alpha must equal (p*gamma, p0*gamma) = {want}"
        )
    law = BetaJump(1.0, gamma) if jump is None else jump
    n = 1 if size is None else size
    Z = sample_dirichlet(params, rng, n)
    probs = choice_probs(ConstantChoice(p), Z)
    u = rng.random(n)
    v = np.minimum((u[:, None] >= np.cumsum(probs, axis=1)).sum(axis=1), d)
    xi = np.asarray(sample_jump(law, rng, n), dtype=float)
    out = (1.0 - xi)[:, None] * Z
    mask = v >= 1
    out[mask, v[mask] - 1] += xi[mask]
    return out[0] if size is None else out
