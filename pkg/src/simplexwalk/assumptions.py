"""Numerical certification of the ergodicity conditions.

Three constants must be certified positive for a given (d, delta, s, t,
jump law, choice function):

* ``eta``  — mass the jump law puts at ``[1 - delta, 1]`` (exact, closed form);
* ``epsilon`` — infimum, over every proper vertex subset J and every position
  in the corresponding boundary slab, of the summed choice probabilities;
* ``c``    — lower bound for the jump density on two explicit subintervals of
  (0,1) whose endpoints are ``s(1-t)^{d-1}-delta``, ``t``, ``(1-t)^d-delta``
  and ``1-s``.

The module also verifies, by mass sampling, the two chart inclusions that make
the vertex slabs communicate with the compact core ``K = T([s,t]^d)``.

Grid infima are approximations.  For affine choice functions the slab is a
polytope and the infimum is attained at one of its finitely many extreme
points, so the result is exact; everything else is reported with an estimated
grid modulus and a "certified" verdict only when the margin clears twice that
modulus.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chain import ChoiceFunction, ConstantChoice, LinearChoice, choice_probs
from .distributions import JumpLaw, PointMassJump, jump_pdf, jump_tail
from .errors import DomainError, InvalidParameterError
from .geometry import (
    admissible_params,
    forward_T,
    invert_G,
    inverse_T,
    require_admissible,
    rotate_R,
    sample_K,
    sample_V,
    target_box_origin,
    target_box_vertex,
)
from .rng import make_stream

__all__ = [
    "SubsetInfimum",
    "ChoiceInfCheck",
    "DensityCheck",
    "InclusionPart",
    "InclusionReport",
    "AssumptionReport",
    "check_tail",
    "check_choice_inf",
    "check_density_lower",
    "verify_inclusions",
    "certify",
    "search_admissible",
]

#: Multiplicative slack turning the observed density minimum into a bound
#: compatible with the strict inequality it certifies.
DENSITY_MARGIN = 1e-6

#: A sampled inclusion margin below this counts as a violation (anything less
#: negative than accumulated rounding would).
VIOLATION_TOL = 1e-12


def check_tail(jump: JumpLaw, delta: float) -> float:
    """Exact value of ``P(xi >= 1 - delta)``; positive means the condition holds."""
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError("delta must lie in (0,1)")
    return float(jump_tail(jump, 1.0 - delta))


# ---------------------------------------------------------------------------
# Boundary choice-probability infimum


@dataclass(frozen=True)
class SubsetInfimum:
    """Sampled infimum of ``sum_{j in J} p_j(z)`` over one boundary slab."""

    indices: tuple[int, ...]
    value: float
    argmin: tuple[float, ...]


@dataclass(frozen=True)
class ChoiceInfCheck:
    epsilon: float
    worst: SubsetInfimum
    exact: bool
    modulus: float
    certified: bool
    resolution: int
    note: str | None = None

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "worst_subset": list(self.worst.indices),
            "argmin": list(self.worst.argmin),
            "exact": self.exact,
            "modulus": self.modulus,
            "certified": self.certified,
            "resolution": self.resolution,
            "note": self.note,
        }


def _slab_extremes(d: int, indices: Sequence[int], delta: float) -> np.ndarray:
    """Extreme points (as free coordinates) of ``simplex ∩ {sum_J bary <= delta}``.

    The polytope's vertices are the simplex vertices outside J together with
    the points ``delta*e_j + (1-delta)*e_i`` for j in J, i outside J.  An
    affine objective attains its infimum on this finite set.
    """
    comp = [i for i in range(d + 1) if i not in indices]
    rows = []
    for i in comp:
        e = np.zeros(d + 1)
        e[i] = 1.0
        rows.append(e)
    for j in indices:
        for i in comp:
            e = np.zeros(d + 1)
            e[j] = delta
            e[i] = 1.0 - delta
            rows.append(e)
    return np.asarray(rows)[:, 1:]


def _sample_slab(
    rng: np.random.Generator, d: int, indices: Sequence[int], delta: float, n: int
) -> np.ndarray:
    """Random points of the slab: J-mass uniform in [0, delta], spread uniformly."""
    comp = [i for i in range(d + 1) if i not in indices]
    mass = delta * rng.random(n)
    bary = np.zeros((n, d + 1))
    gj = rng.standard_gamma(1.0, (n, len(indices)))
    gc = rng.standard_gamma(1.0, (n, len(comp)))
    bary[:, list(indices)] = mass[:, None] * gj / gj.sum(axis=1, keepdims=True)
    bary[:, comp] = (1.0 - mass)[:, None] * gc / gc.sum(axis=1, keepdims=True)
    return bary[:, 1:]


def check_choice_inf(
    cf: ChoiceFunction,
    delta: float,
    grid_resolution: int = 200,
    rng: np.random.Generator | None = None,
) -> ChoiceInfCheck:
    """Infimum of the summed choice probabilities over every boundary slab.

    For each nonempty proper subset J of the vertex indices, the slab is
    ``{z : sum_{j in J} bary_j(z) <= delta}`` and the objective is
    ``sum_{j in J} p_j(z)``.  Affine choice functions are minimized exactly
    over the slab's extreme points; otherwise the slab is swept by a grid
    (d=1) plus random cloud and the verdict carries an estimated modulus.
    """
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError("delta must lie in (0,1)")
    d = cf.d
    rng = rng if rng is not None else make_stream(0)
    exact = isinstance(cf, (ConstantChoice, LinearChoice))
    n_rand = max(10 * grid_resolution, 100)

    worst: SubsetInfimum | None = None
    modulus = 0.0
    for k in range(1, d + 1):
        for subset in itertools.combinations(range(d + 1), k):
            pts = [_slab_extremes(d, subset, delta)]
            if not exact:
                pts.append(_sample_slab(rng, d, subset, delta, n_rand))
                if d == 1:
                    j = subset[0]
                    grid = np.linspace(0.0, delta, grid_resolution)
                    z_grid = grid if j == 1 else 1.0 - grid
                    pts.append(z_grid[:, None])
            z = np.concatenate(pts, axis=0)
            vals = choice_probs(cf, z)[:, list(subset)].sum(axis=1)
            if not exact:
                if d == 1:
                    g = vals[-grid_resolution:]
                    modulus = max(modulus, float(np.abs(np.diff(g)).max()))
                else:
                    cloud = z[-n_rand:]
                    f = vals[-n_rand:]
                    half = n_rand // 2
                    dz = np.abs(cloud[:half] - cloud[half : 2 * half]).max(axis=1)
                    df = np.abs(f[:half] - f[half : 2 * half])
                    lip = float((df / np.maximum(dz, 1e-12)).max())
                    modulus = max(modulus, lip * delta * n_rand ** (-1.0 / d))
            i = int(vals.argmin())
            if worst is None or vals[i] < worst.value:
                worst = SubsetInfimum(subset, float(vals[i]), tuple(float(v) for v in z[i]))

    assert worst is not None
    eps = worst.value
    certified = eps > 0.0 if exact else eps > 2.0 * modulus
    note = None if exact else (
        "sampled infimum; grid certification is not exhaustive for "
        "non-affine choice functions"
    )
    return ChoiceInfCheck(
        epsilon=eps,
        worst=worst,
        exact=exact,
        modulus=modulus,
        certified=certified,
        resolution=grid_resolution,
        note=note,
    )


# ---------------------------------------------------------------------------
# Jump-density lower bound


@dataclass(frozen=True)
class DensityCheck:
    c: float | None
    vacuous: bool
    intervals: tuple[tuple[float, float], ...]
    min_pdf: float | None
    argmin: float | None
    certified: bool
    resolution: int

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "vacuous": self.vacuous,
            "intervals": [list(iv) for iv in self.intervals],
            "min_pdf": self.min_pdf,
            "argmin": self.argmin,
            "certified": self.certified,
            "resolution": self.resolution,
        }


def check_density_lower(
    jump: JumpLaw, d: int, delta: float, s: float, t: float, grid_resolution: int = 200
) -> DensityCheck:
    """Grid minimum of the jump density over the two certification intervals.

    The intervals are ``[s(1-t)^{d-1} - delta, t]`` and ``[(1-t)^d - delta,
    1-s]`` (they may overlap; the minimum over the union is what matters).
    Degenerate pieces (left endpoint at or past the right one) are dropped; if
    nothing remains the check passes vacuously.  Admissibility of (delta, s, t)
    is deliberately not required here — even s >= t is accepted — since the
    degenerate branch only arises without it.
    """
    if isinstance(jump, PointMassJump):
        raise DomainError("a point mass has no density to bound")
    if not (0.0 < delta < 1.0 and 0.0 < s < 1.0 and 0.0 < t < 1.0):
        raise InvalidParameterError("need delta, s, t in (0,1)")
    raw = (
        (s * (1.0 - t) ** (d - 1) - delta, t),
        ((1.0 - t) ** d - delta, 1.0 - s),
    )
    kept = tuple((max(lo, 0.0), hi) for lo, hi in raw if lo < hi)
    if not kept:
        return DensityCheck(
            c=None, vacuous=True, intervals=(), min_pdf=None, argmin=None,
            certified=True, resolution=grid_resolution,
        )
    grids = [np.linspace(lo, hi, grid_resolution) for lo, hi in kept]
    xs = np.concatenate(grids)
    pdf = jump_pdf(jump, xs)
    i = int(pdf.argmin())
    m = float(pdf[i])
    return DensityCheck(
        c=(1.0 - DENSITY_MARGIN) * m,
        vacuous=False,
        intervals=kept,
        min_pdf=m,
        argmin=float(xs[i]),
        certified=bool(m > 0.0 and np.isfinite(m)),
        resolution=grid_resolution,
    )


# ---------------------------------------------------------------------------
# Chart inclusions


@dataclass(frozen=True)
class InclusionPart:
    label: str
    k: int | None
    n: int
    violations: int
    worst_margin: float

    def to_dict(self) -> dict:
        return {
            "part": self.label,
            "k": self.k,
            "n": self.n,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
        }


@dataclass(frozen=True)
class InclusionReport:
    d: int
    delta: float
    s: float
    t: float
    n_samples: int
    target_shrink: float
    parts: tuple[InclusionPart, ...]

    @property
    def violations(self) -> int:
        return sum(p.violations for p in self.parts)

    @property
    def worst_margin(self) -> float:
        return min(p.worst_margin for p in self.parts)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "delta": self.delta,
            "s": self.s,
            "t": self.t,
            "n_samples": self.n_samples,
            "target_shrink": self.target_shrink,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "passed": self.passed,
            "parts": [p.to_dict() for p in self.parts],
        }


def _box_margins(x: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    lo, hi = bounds[:, 0], bounds[:, 1]
    return np.minimum(x - lo, hi - x).min(axis=-1)


def verify_inclusions(
    d: int,
    delta: float,
    s: float,
    t: float,
    n_samples: int,
    rng: np.random.Generator | None = None,
    target_shrink: float = 0.0,
) -> InclusionReport:
    """Sampled membership check for both chart inclusions.

    Part "a": for z in the origin slab and u in K, the pullback
    ``T^{-1}(G_z^{-1}(u))`` must land in the box with sides
    ``[s(1-t)^{d-1}-delta, t]``.  Part "b" (one check per vertex k): for z in
    the k-th vertex slab, ``T^{-1}(G_{R_k(z)}^{-1}(R_k(u)))`` must land in the
    box whose first side widens to ``[(1-t)^d - delta, 1-s]``.

    ``target_shrink`` subtracts from t in the *target boxes only*, which is
    how the discriminativity control breaks the inclusion on purpose.
    """
    require_admissible(d, delta, s, t)
    rng = rng if rng is not None else make_stream(0)
    t_target = t - target_shrink
    box_a = target_box_origin(d, delta, s, t_target)
    box_b = target_box_vertex(d, delta, s, t_target)

    parts: list[InclusionPart] = []
    u = sample_K(rng, d, s, t, n_samples)
    z = sample_V(rng, d, 0, delta, n_samples)
    margins = _box_margins(inverse_T(invert_G(z, u)), box_a)
    parts.append(
        InclusionPart(
            label="a", k=None, n=n_samples,
            violations=int((margins < -VIOLATION_TOL).sum()),
            worst_margin=float(margins.min()),
        )
    )
    for k in range(1, d + 1):
        u = sample_K(rng, d, s, t, n_samples)
        z = sample_V(rng, d, k, delta, n_samples)
        image = inverse_T(invert_G(rotate_R(k, z), rotate_R(k, u)))
        margins = _box_margins(image, box_b)
        parts.append(
            InclusionPart(
                label=f"b:k={k}", k=k, n=n_samples,
                violations=int((margins < -VIOLATION_TOL).sum()),
                worst_margin=float(margins.min()),
            )
        )
    return InclusionReport(
        d=d, delta=delta, s=s, t=t, n_samples=n_samples,
        target_shrink=target_shrink, parts=tuple(parts),
    )


# ---------------------------------------------------------------------------
# Assembled report and parameter search


@dataclass
class AssumptionReport:
    eta: float
    epsilon: float
    c: float | None
    admissible: bool
    witnesses: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.admissible and not self.witnesses

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "epsilon": self.epsilon,
            "c": self.c,
            "admissible": self.admissible,
            "certified": self.certified,
            "witnesses": self.witnesses,
            "details": self.details,
        }


def certify(
    jump: JumpLaw,
    cf: ChoiceFunction,
    delta: float,
    s: float,
    t: float,
    grid_resolution: int = 200,
    rng: np.random.Generator | None = None,
) -> AssumptionReport:
    """Run all three condition checks and collect failure witnesses."""
    d = cf.d
    admissible = admissible_params(d, delta, s, t)
    witnesses: list[dict] = []
    if not admissible:
        witnesses.append(
            {"check": "admissible", "params": {"d": d, "delta": delta, "s": s, "t": t}}
        )

    eta = check_tail(jump, delta)
    if not eta > 0.0:
        witnesses.append({"check": "tail", "eta": eta, "delta": delta})

    choice = check_choice_inf(cf, delta, grid_resolution, rng)
    if not choice.certified:
        witnesses.append(
            {
                "check": "choice_inf",
                "subset": list(choice.worst.indices),
                "z": list(choice.worst.argmin),
                "value": choice.worst.value,
                "modulus": choice.modulus,
            }
        )

    try:
        density = check_density_lower(jump, d, delta, s, t, grid_resolution)
    except DomainError:
        density = None
        witnesses.append({"check": "density", "reason": "jump law has no density"})
    if density is not None and not density.certified:
        witnesses.append(
            {"check": "density", "min_pdf": density.min_pdf, "argmin": density.argmin}
        )

    return AssumptionReport(
        eta=eta,
        epsilon=choice.epsilon,
        c=None if density is None else density.c,
        admissible=admissible,
        witnesses=witnesses,
        details={
            "choice": choice.to_dict(),
            "density": None if density is None else density.to_dict(),
            "params": {"d": d, "delta": delta, "s": s, "t": t},
        },
    )


def search_admissible(
    jump: JumpLaw,
    cf: ChoiceFunction,
    max_scale: int = 4,
    grid_resolution: int = 50,
    rng: np.random.Generator | None = None,
) -> AssumptionReport | None:
    """First fully certified report over ``delta in {10^-1, ..., 10^-max_scale}``
    and a coarse (s, t) grid, or None when nothing certifies."""
    d = cf.d
    grid = np.round(np.arange(0.05, 1.0, 0.05), 10)
    for k in range(1, max_scale + 1):
        delta = 10.0 ** (-k)
        for s in grid:
            for t in grid:
                if not admissible_params(d, delta, float(s), float(t)):
                    continue
                report = certify(jump, cf, delta, float(s), float(t), grid_resolution, rng)
                if report.certified:
                    return report
    return None
