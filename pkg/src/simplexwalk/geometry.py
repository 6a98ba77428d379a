"""Geometry of the standard orthogonal simplex.

The simplex ``S_d`` is the set of points ``z`` in R^d with nonnegative
coordinates summing to at most 1; the implied zeroth barycentric coordinate is
``z_0 = 1 - sum(z)``.  This module provides the stick-breaking chart ``T`` from
the open unit cube onto the open simplex, the vertex-anchored affine maps
``G_z`` with their inverses and Jacobian determinants, the coordinate
rotations ``R_j``, membership tests for the regions used by the certification
suite (vertex slabs, face slabs, the chart image ``K`` and its padded variant),
and samplers for those regions.

All maps accept a single point (shape ``(d,)``) or a batch (shape ``(n, d)``)
and operate on the last axis.  Everything is pure and safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidParameterError, SingularityError

#: Boundary tolerance for membership tests and singularity guards.  Chosen at
#: the scale where double-precision round-off dominates.
TOL = 1e-12

__all__ = [
    "TOL",
    "SimplexPoint",
    "CubePoint",
    "RegionSpec",
    "forward_T",
    "inverse_T",
    "apply_G",
    "invert_G",
    "rotate_R",
    "rotate_R_inv",
    "jacobian_det_Ginv",
    "jacobian_det_Tinv",
    "tail_sums",
    "implied_z0",
    "in_region",
    "region_V",
    "region_U",
    "region_K",
    "region_K0",
    "region_box",
    "admissible_params",
    "require_admissible",
    "target_box_origin",
    "target_box_vertex",
    "sample_simplex",
    "sample_cube_box",
    "sample_K",
    "sample_V",
]


@dataclass(frozen=True)
class SimplexPoint:
    """A validated point of ``S_d`` stored by its d free coordinates."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        arr = np.atleast_1d(np.asarray(self.coords, dtype=float))
        if arr.ndim != 1:
            raise DomainError("a point must be a flat coordinate vector")
        if np.any(arr < -TOL) or float(arr.sum()) > 1.0 + TOL:
            raise DomainError(
                "coordinates must be nonnegative and sum to at most 1 "
                f"(got sum {float(arr.sum())!r})"
            )
        object.__setattr__(self, "coords", arr)

    @property
    def d(self) -> int:
        return self.coords.shape[0]

    @property
    def z0(self) -> float:
        """The implied zeroth barycentric coordinate ``1 - sum(coords)``."""
        return 1.0 - float(self.coords.sum())

    def __array__(self, dtype=None, copy=None) -> np.ndarray:
        return np.asarray(self.coords, dtype=dtype)


@dataclass(frozen=True)
class CubePoint:
    """A validated point of the open unit cube ``(0,1)^d``."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        arr = np.atleast_1d(np.asarray(self.coords, dtype=float))
        if arr.ndim != 1:
            raise DomainError("a point must be a flat coordinate vector")
        if np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise DomainError("cube coordinates must lie strictly inside (0,1)")
        object.__setattr__(self, "coords", arr)

    @property
    def d(self) -> int:
        return self.coords.shape[0]

    def __array__(self, dtype=None, copy=None) -> np.ndarray:
        return np.asarray(self.coords, dtype=dtype)


def _arr(p) -> np.ndarray:
    return np.asarray(p, dtype=float)


def implied_z0(z) -> np.ndarray | float:
    """``1 - sum(z)`` along the last axis."""
    return 1.0 - _arr(z).sum(axis=-1)


def tail_sums(z) -> np.ndarray:
    """``out[..., j] = sum_{l > j} z_l`` (strict tail sums, last entry 0)."""
    z = _arr(z)
    rev = np.cumsum(z[..., ::-1], axis=-1)[..., ::-1]
    return np.concatenate([rev[..., 1:], np.zeros_like(z[..., :1])], axis=-1)


def forward_T(x, *, validate: bool = True) -> np.ndarray:
    """Stick-breaking map: ``T(x)_j = x_j * prod_{l > j} (1 - x_l)``.

    Maps the open cube homeomorphically onto the open simplex.  At d=1 it is
    the identity.
    """
    x = _arr(x)
    if validate and (np.any(x <= 0.0) or np.any(x >= 1.0)):
        raise DomainError("stick coordinates must lie strictly inside (0,1)")
    rest = np.cumprod((1.0 - x)[..., ::-1], axis=-1)[..., ::-1]
    # rest[..., j] = prod_{l >= j} (1 - x_l); shift left to exclude l = j.
    excl = np.concatenate([rest[..., 1:], np.ones_like(x[..., :1])], axis=-1)
    return x * excl


def inverse_T(z) -> np.ndarray:
    """Inverse stick-breaking map: ``x_j = z_j / (1 - sum_{l > j} z_l)``.

    Defined on the open simplex only; the guard also covers ``sum(z) = 1``
    (the zeroth tail, i.e. ``z_0``), where the map degenerates.
    """
    z = _arr(z)
    denom = 1.0 - tail_sums(z)
    if np.any(denom <= TOL) or np.any(np.asarray(implied_z0(z)) <= TOL):
        raise SingularityError("a tail-sum denominator vanishes (point on the far boundary)")
    return z / denom


def apply_G(z, u) -> np.ndarray:
    """Vertex-anchored affine map ``G_z(u)_j = u_0 * z_j + u_j``."""
    z, u = _arr(z), _arr(u)
    u0 = 1.0 - u.sum(axis=-1, keepdims=True)
    return u0 * z + u


def invert_G(z, u) -> np.ndarray:
    """Inverse of ``G_z``: coordinate j is ``u_j - z_j * u_0 / z_0``."""
    z, u = _arr(z), _arr(u)
    z0 = 1.0 - z.sum(axis=-1, keepdims=True)
    if np.any(z0 <= TOL):
        raise SingularityError("G_z is not invertible when z_0 vanishes")
    u0 = 1.0 - u.sum(axis=-1, keepdims=True)
    return u - z * (u0 / z0)


def _augmented(u: np.ndarray) -> np.ndarray:
    """Barycentric tuple ``(u_0, u_1, ..., u_d)`` along the last axis."""
    u0 = 1.0 - u.sum(axis=-1, keepdims=True)
    return np.concatenate([u0, u], axis=-1)


def rotate_R(j: int, u) -> np.ndarray:
    """Coordinate rotation: drop one entry of ``(u_0, ..., u_d)``.

    For ``j >= 1`` the output is ``(u_0, u_1, ..., u_{j-1}, u_{j+1}, ..., u_d)``;
    for ``j = 0`` it is ``(u_0, u_1, ..., u_{d-1})``.  Both are points of S_d
    again (the omitted entry becomes the implied zeroth coordinate).
    """
    u = _arr(u)
    d = u.shape[-1]
    if not 0 <= j <= d:
        raise IndexError(f"vertex index {j} outside 0..{d}")
    drop = d if j == 0 else j
    return np.delete(_augmented(u), drop, axis=-1)


def rotate_R_inv(j: int, w) -> np.ndarray:
    """Inverse of :func:`rotate_R`: reinsert the omitted coordinate.

    The omitted entry is recovered as 1 minus the sum of the rest.
    """
    w = _arr(w)
    d = w.shape[-1]
    if not 0 <= j <= d:
        raise IndexError(f"vertex index {j} outside 0..{d}")
    slot = d if j == 0 else j
    w0 = 1.0 - w.sum(axis=-1)
    aug = np.insert(w, slot, w0, axis=-1)  # (u_0, u_1, ..., u_d)
    return aug[..., 1:]


def jacobian_det_Ginv(z) -> np.ndarray | float:
    """``|det D(G_z^{-1})| = 1 / z_0``, which is always >= 1 on S_d."""
    z0 = implied_z0(z)
    if np.any(np.asarray(z0) <= TOL):
        raise SingularityError("G_z is not invertible when z_0 vanishes")
    return 1.0 / z0


def jacobian_det_Tinv(v) -> np.ndarray | float:
    """``|det D(T^{-1})| = prod_j (1 - sum_{l>j} v_l)^{-1}``, always >= 1."""
    denom = 1.0 - tail_sums(v)
    if np.any(denom <= TOL):
        raise SingularityError("a tail-sum denominator vanishes")
    return 1.0 / denom.prod(axis=-1)


# ---------------------------------------------------------------------------
# Regions


def admissible_params(d: int, delta: float, s: float, t: float) -> bool:
    """Whether (delta, s, t) satisfy the slab/chart compatibility constraints.

    Requires ``0 < delta < 2^{-d}`` and ``delta^{1/d} < s < t < 1 - delta^{1/d}``.
    These imply that both padded target boxes have strictly positive lower
    endpoints.
    """
    if not (d >= 1 and 0.0 < delta < 2.0 ** (-d)):
        return False
    root = delta ** (1.0 / d)
    return root < s < t < 1.0 - root


def require_admissible(d: int, delta: float, s: float, t: float) -> None:
    if not admissible_params(d, delta, s, t):
        raise InvalidParameterError(
            f"(delta={delta}, s={s}, t={t}) inadmissible for d={d}: need "
            f"0 < delta < 2^-d and delta^(1/d) < s < t < 1 - delta^(1/d)"
        )


@dataclass(frozen=True)
class RegionSpec:
    """A region of S_d: vertex slab V_j, face slab U_J, chart image K, padded
    chart image K_0, or the image under T of an explicit coordinate box."""

    kind: str  # "V" | "U" | "K" | "K0" | "Box"
    d: int
    delta: float | None = None
    s: float | None = None
    t: float | None = None
    index: int | None = None
    indices: tuple[int, ...] | None = None
    bounds: np.ndarray | None = None  # shape (d, 2) for Box / K0


def region_V(d: int, j: int, delta: float) -> RegionSpec:
    """Vertex slab: ``V_0 = {sum(z) <= delta}``; ``V_j = {z_j >= 1 - delta}``."""
    if not 0 <= j <= d:
        raise IndexError(f"vertex index {j} outside 0..{d}")
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError("delta must lie in (0,1)")
    return RegionSpec(kind="V", d=d, delta=delta, index=j)


def region_U(d: int, indices, delta: float) -> RegionSpec:
    """Face slab: the barycentric coordinates named by ``indices`` (subset of
    0..d) have sum at most delta."""
    idx = tuple(sorted(set(int(i) for i in indices)))
    if not idx or any(i < 0 or i > d for i in idx) or len(idx) > d:
        raise IndexError(f"index set {idx!r} must be a nonempty proper subset of 0..{d}")
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError("delta must lie in (0,1)")
    return RegionSpec(kind="U", d=d, delta=delta, indices=idx)


def region_K(d: int, s: float, t: float) -> RegionSpec:
    """Chart image ``K = T([s,t]^d)``: all stick coordinates within [s, t]."""
    if not 0.0 < s < t < 1.0:
        raise InvalidParameterError("need 0 < s < t < 1")
    return RegionSpec(kind="K", d=d, s=s, t=t)


def region_K0(d: int, delta: float, s: float, t: float) -> RegionSpec:
    """Padded chart image: stick coordinates within ``[s(1-t)^{d-1}-delta, t]``."""
    require_admissible(d, delta, s, t)
    return RegionSpec(
        kind="K0", d=d, delta=delta, s=s, t=t, bounds=target_box_origin(d, delta, s, t)
    )


def region_box(d: int, bounds) -> RegionSpec:
    """Image under T of an explicit per-coordinate box in stick space."""
    b = np.asarray(bounds, dtype=float)
    if b.shape != (d, 2) or np.any(b[:, 0] > b[:, 1]):
        raise InvalidParameterError("bounds must be a (d, 2) array of nonempty intervals")
    return RegionSpec(kind="Box", d=d, bounds=b)


def target_box_origin(d: int, delta: float, s: float, t: float) -> np.ndarray:
    """Stick-space box ``[s(1-t)^{d-1} - delta, t]^d`` as a (d, 2) array.

    This is the box that the pullback of K under ``T^{-1} o G_z^{-1}`` stays
    inside for every z in the origin slab V_0.
    """
    lo = s * (1.0 - t) ** (d - 1) - delta
    return np.array([[lo, t]] * d, dtype=float)


def target_box_vertex(d: int, delta: float, s: float, t: float) -> np.ndarray:
    """Stick-space box ``[(1-t)^d - delta, 1-s] x [s(1-t)^{d-1} - delta, t]^{d-1}``.

    The first coordinate carries the wide interval; this is the box that the
    pullback of K under ``T^{-1} o G_{R_k(z)}^{-1} o R_k`` stays inside for
    every z in a vertex slab V_k, k >= 1.
    """
    lo1 = (1.0 - t) ** d - delta
    lo = s * (1.0 - t) ** (d - 1) - delta
    return np.array([[lo1, 1.0 - s]] + [[lo, t]] * (d - 1), dtype=float)


def _in_simplex(z: np.ndarray) -> np.ndarray:
    return np.logical_and(
        np.all(z >= -TOL, axis=-1), z.sum(axis=-1) <= 1.0 + TOL
    )


def in_region(r: RegionSpec, z) -> np.ndarray | bool:
    """Membership test with closed inequalities and ``TOL`` slack at bounds."""
    z = _arr(z)
    ok = _in_simplex(z)
    if r.kind == "V":
        if r.index == 0:
            ok &= z.sum(axis=-1) <= r.delta + TOL
        else:
            ok &= z[..., r.index - 1] >= 1.0 - r.delta - TOL
    elif r.kind == "U":
        bary = _augmented(z)
        ok &= bary[..., list(r.indices)].sum(axis=-1) <= r.delta + TOL
    elif r.kind == "K":
        ok &= _sticks_in_box(z, np.array([[r.s, r.t]] * r.d))
    elif r.kind in ("K0", "Box"):
        ok &= _sticks_in_box(z, r.bounds)
    else:  # pragma: no cover - constructors prevent this
        raise InvalidParameterError(f"unknown region kind {r.kind!r}")
    return ok if ok.shape else bool(ok)


def _sticks_in_box(z: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    denom = 1.0 - tail_sums(z)
    safe = np.all(denom > TOL, axis=-1)
    x = np.where(denom > TOL, z / np.where(denom > TOL, denom, 1.0), np.inf)
    inside = np.all(
        np.logical_and(x >= bounds[:, 0] - TOL, x <= bounds[:, 1] + TOL), axis=-1
    )
    return safe & inside


# ---------------------------------------------------------------------------
# Samplers (used by property tests and the certification suite)


def sample_simplex(rng: np.random.Generator, d: int, n: int) -> np.ndarray:
    """``n`` points uniform on S_d, via normalized exponential spacings."""
    g = rng.standard_gamma(1.0, size=(n, d + 1))
    return g[:, :d] / g.sum(axis=1, keepdims=True)


def sample_cube_box(rng: np.random.Generator, bounds, n: int) -> np.ndarray:
    """``n`` points uniform in a product box given as a (d, 2) array."""
    b = np.asarray(bounds, dtype=float)
    return b[:, 0] + (b[:, 1] - b[:, 0]) * rng.random((n, b.shape[0]))


def sample_K(rng: np.random.Generator, d: int, s: float, t: float, n: int) -> np.ndarray:
    """``n`` points of ``K = T([s,t]^d)`` via the box preimage (no rejection)."""
    return forward_T(sample_cube_box(rng, [[s, t]] * d, n))


def sample_V(rng: np.random.Generator, d: int, j: int, delta: float, n: int) -> np.ndarray:
    """``n`` points of the vertex slab ``V_j``.

    For ``V_0`` the scaled simplex ``delta * S_d`` is sampled uniformly.  For
    ``V_k`` the anchored coordinate is ``1 - delta*w`` with ``w`` uniform and
    the remaining barycentric mass is spread uniformly.
    """
    if not 0 <= j <= d:
        raise IndexError(f"vertex index {j} outside 0..{d}")
    if j == 0:
        return delta * sample_simplex(rng, d, n)
    w = rng.random(n)
    anchored = 1.0 - delta * w
    mass = delta * w
    g = rng.standard_gamma(1.0, size=(n, d))  # slots: z_0 and z_l for l != j
    parts = mass[:, None] * g / g.sum(axis=1, keepdims=True)
    z = np.empty((n, d))
    others = [l for l in range(1, d + 1) if l != j]
    z[:, [l - 1 for l in others]] = parts[:, 1:]
    z[:, j - 1] = anchored
    return z
