"""History-dependent urn walk on [0,1] and its coupling apparatus.

The state is a position ``z`` plus two accumulated quantities L and R.  With
probability ``zeta = L/(L+R)`` the walk moves left: L grows by z and the new
position is uniform on (0, z).  Otherwise R grows by 1-z and the position is
uniform on (z, 1).  Ball counts are real-valued throughout and L, R only ever
increase; ``eps = 1/(L+R)`` shrinks to zero.

Drift machinery: ``lyapunov_W`` is the supermartingale diagnostic, and the
one-step conditional drift of W has an exact rational form

    eps * [r_0 + r_1 eps + ... + r_5 eps^5]
    -------------------------------------------
    6 (eps z + 1)^2 (1 + eps (1 - z))^2

with the six polynomials in (zeta, z) hard-coded below.  ``drift_oracle``
recomputes the same quantity from first principles (exact branch averages of a
quadratic under a uniform jump — closed antiderivatives, no quadrature), which
pins every polynomial coefficient independently.  The printed source for the
eps^5 coefficient is corrupt (a factor is missing its argument); the form
frozen here, -6 z^4 (1-z)^2, was recovered by polynomial interpolation of the
oracle and is covered by the oracle-agreement tests.

Coupling: two companion walks driven by the *same* uniforms as the main walk,
with direction thresholds frozen at 1/2 -+ eps_band after a warm-up step N0.
While the main walk's zeta stays inside the band, the three walks are provably
ordered pathwise; both facts (band event, exact sandwich) are recorded.
"""

from __future__ import annotations

from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import InvalidParameterError
from .rng import make_stream

__all__ = [
    "URN_BLOCK",
    "UrnState",
    "CouplingConfig",
    "CouplingResult",
    "UrnEnsembleResult",
    "urn_step",
    "lyapunov_W",
    "drift_polynomials",
    "drift_closed_form",
    "drift_oracle",
    "run_urn",
    "run_urn_ensemble",
    "coupled_run",
    "run_frozen_walk",
    "TRAJECTORY_COLUMNS",
    "COUPLING_COLUMNS",
]

#: Steps per pre-drawn variate block (each step consumes one (direction, jump)
#: row, in that order, so blocked and one-at-a-time driving agree exactly).
URN_BLOCK = 2048

TRAJECTORY_COLUMNS = ("n", "z", "L", "R", "zeta", "W")
COUPLING_COLUMNS = TRAJECTORY_COLUMNS + ("z_tilde", "z_hat", "sandwich_ok")


@dataclass(frozen=True)
class UrnState:
    z: float
    L: float = 1.0
    R: float = 1.0
    n: int = 1

    def __post_init__(self) -> None:
        if not 0.0 <= self.z <= 1.0:
            raise InvalidParameterError("position must lie in [0,1]")
        if self.L <= 0.0 or self.R <= 0.0:
            raise InvalidParameterError("ball quantities must be positive")

    @property
    def zeta(self) -> float:
        return self.L / (self.L + self.R)

    @property
    def eps(self) -> float:
        return 1.0 / (self.L + self.R)


@dataclass(frozen=True)
class CouplingConfig:
    n_total: int
    N0: int
    eps_band: float
    seed: int = 0
    record_every: int = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.eps_band < 0.5:
            raise InvalidParameterError("eps_band must lie in (0, 1/2)")
        if not 0 < self.N0 < self.n_total:
            raise InvalidParameterError("need 0 < N0 < n_total")
        if self.record_every < 1:
            raise InvalidParameterError("record_every must be >= 1")


def urn_step(state: UrnState, rng: np.random.Generator) -> UrnState:
    """One transition; consumes exactly two uniforms (direction, then jump).

    The right move is evaluated as ``z*(1-xi) + xi`` rather than the
    equivalent ``z + xi*(1-z)``: with z appearing exactly once, every float
    operation is a correctly-rounded monotone function of z, so two walks
    driven by the same variates can never swap order through rounding.  The
    coupling sandwich below relies on this.
    """
    u = rng.random()
    xi = rng.random()
    if u < state.zeta:
        return UrnState(z=xi * state.z, L=state.L + state.z, R=state.R, n=state.n + 1)
    return UrnState(
        z=state.z * (1.0 - xi) + xi, L=state.L, R=state.R + (1.0 - state.z),
        n=state.n + 1,
    )


def lyapunov_W(state: UrnState) -> float:
    """``(1/2 - (L+z)/(L+R))^2 + 1/(L+R)``."""
    s = state.L + state.R
    return (0.5 - (state.L + state.z) / s) ** 2 + 1.0 / s


# ---------------------------------------------------------------------------
# Drift expansion


def drift_polynomials(zeta, z):
    """The six drift-expansion polynomials, stacked along the last axis.

    The constant term is evaluated from both its expanded and factored
    printings and the two must agree to 1e-12 everywhere (transcription
    guard); the factored value is the one returned.
    """
    c = np.asarray(zeta, dtype=float)
    z = np.asarray(z, dtype=float)
    c, z = np.broadcast_arrays(c, z)

    r0_expanded = (
        -24 * z * c**3 + 36 * z * c**2 + 12 * c**3 - 18 * z * c
        - 24 * c**2 + 3 * z + 15 * c - 3
    )
    r0 = -3.0 * (2 * c - 1) ** 2 * (c * z + (1 - z) * (1 - c))
    if np.max(np.abs(r0_expanded - r0)) > 1e-12:
        raise ArithmeticError("the two printings of the constant term disagree")

    r1 = (
        -30 * z**2 * c**2 - 12 * z * c**3 + 30 * z**2 * c + 24 * z * c**2
        + 6 * c**3 - 7 * z**2 - 38 * z * c - 12 * c**2 + 14 * z + 13 * c - 7
    )
    r2 = (
        10 * z**3 * c - 12 * z**2 * c**2 - 5 * z**3 - 9 * z**2 * c
        + 7 * z**2 - 19 * z * c + 4 * z + 6 * c - 6
    )
    r3 = -z * (
        6 * z**3 * c**2 - 6 * z**3 * c - 12 * z**2 * c**2 - 17 * z**3
        - 12 * z**2 * c + 6 * z * c**2 + 28 * z**2 + 30 * z * c
        - 23 * z - 6 * c + 12
    )
    r4 = -6 * z**2 * (1 - z) * (z**2 + 2 * z * c * (1 - z) + 1)
    r5 = -6 * z**4 * (1 - z) ** 2
    return np.stack(
        [r0, r1, r2, r3, r4, np.broadcast_to(r5, r0.shape)], axis=-1
    )


def drift_closed_form(zeta, z, eps):
    """``E(W_{n+1} - W_n | state)`` via the rational drift expansion."""
    c = np.asarray(zeta, dtype=float)
    z = np.asarray(z, dtype=float)
    e = np.asarray(eps, dtype=float)
    if np.any(e <= 0.0) or np.any(e > 0.5):
        raise InvalidParameterError("eps = 1/(L+R) lies in (0, 1/2]")
    r = drift_polynomials(c, z)
    series = r[..., 5]
    for i in range(4, -1, -1):
        series = series * e + r[..., i]
    out = e * series / (6.0 * (e * z + 1.0) ** 2 * (1.0 + e * (1.0 - z)) ** 2)
    return float(out) if out.ndim == 0 else out


def drift_oracle(zeta, z, eps):
    """``E(W_{n+1} - W_n | state)`` from first principles.

    Branch averages of the post-move W over the uniform jump are quadratic
    integrals with closed antiderivatives:

      left  (prob zeta):   new position uniform on (0, z), L grows by z;
      right (prob 1-zeta): new position uniform on (z, 1), R grows by 1-z.

    Degenerate z in {0, 1} needs no special casing — the corresponding
    branch's average collapses to the current W, contributing zero drift.
    """
    c = np.asarray(zeta, dtype=float)
    z = np.asarray(z, dtype=float)
    e = np.asarray(eps, dtype=float)
    if np.any(e <= 0.0) or np.any(e > 0.5):
        raise InvalidParameterError("eps = 1/(L+R) lies in (0, 1/2]")
    if np.any(c <= 0.0) or np.any(c >= 1.0):
        raise InvalidParameterError("zeta must lie strictly inside (0,1)")
    L = c / e
    R = (1.0 - c) / e

    # E[(A - u/S)^2 + 1/S] for u uniform on (0, z), with S = L + R + z and
    # A = 1/2 - (L+z)/S.
    S = L + R + z
    A = 0.5 - (L + z) / S
    left = A**2 - A * z / S + z**2 / (3.0 * S**2) + 1.0 / S

    # Right branch: u uniform on (z, 1), S' = L + R + 1 - z, B = 1/2 - L/S'.
    Sp = L + R + 1.0 - z
    B = 0.5 - L / Sp
    right = (
        B**2 - B * (1.0 + z) / Sp + (1.0 + z + z**2) / (3.0 * Sp**2) + 1.0 / Sp
    )

    w_now = (0.5 - (L + z) / (L + R)) ** 2 + e
    out = c * left + (1.0 - c) * right - w_now
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Trajectory engines


def _record_indices(n_steps: int, record_every: int) -> np.ndarray:
    idx = np.arange(0, n_steps + 1, record_every)
    if idx[-1] != n_steps:
        idx = np.append(idx, n_steps)
    return idx


def run_urn(
    n_steps: int,
    seed: int,
    record_every: int = 1,
    z_init: float = 0.5,
    stream: int = 0,
) -> np.ndarray:
    """Single trajectory; rows are (n, z, L, R, zeta, W) at the recorded steps.

    Step counting starts at the initial state n=1 (L=R=1); ``n_steps``
    transitions follow.  Recording keeps every ``record_every``-th state
    (counted in transitions) plus the initial and terminal ones.
    """
    if n_steps < 1:
        raise InvalidParameterError("need at least one step")
    if record_every < 1:
        raise InvalidParameterError("record_every must be >= 1")
    rng = make_stream(seed, stream)
    z, L, R = float(z_init), 1.0, 1.0
    keep = set(_record_indices(n_steps, record_every).tolist())
    rows = [(1, z, L, R, 0.5, (0.5 - (L + z) / (L + R)) ** 2 + 0.5)]
    done = 0
    while done < n_steps:
        chunk = min(URN_BLOCK, n_steps - done)
        draws = rng.random((chunk, 2))
        for b in range(chunk):
            u, xi = draws[b, 0], draws[b, 1]
            if u < L / (L + R):
                L += z
                z = xi * z
            else:
                R += 1.0 - z
                z = z * (1.0 - xi) + xi
            done += 1
            if done in keep:
                s = L + R
                rows.append((done + 1, z, L, R, L / s, (0.5 - (L + z) / s) ** 2 + 1.0 / s))
    return np.asarray(rows, dtype=float)


@dataclass(frozen=True)
class UrnEnsembleResult:
    terminal: np.ndarray  # (n_runs, 3): z, L, R after n_steps transitions
    snapshots: dict[int, np.ndarray]  # same layout at requested step counts

    def zeta(self, at: int | None = None) -> np.ndarray:
        a = self.terminal if at is None else self.snapshots[at]
        return a[:, 1] / (a[:, 1] + a[:, 2])


def _urn_slice(
    n_steps: int, seed: int, lo: int, hi: int, snaps: tuple[int, ...]
) -> tuple[np.ndarray, dict[int, np.ndarray]]:
    n = hi - lo
    streams = [make_stream(seed, i) for i in range(lo, hi)]
    z = np.full(n, 0.5)
    L = np.ones(n)
    R = np.ones(n)
    taken: dict[int, np.ndarray] = {}
    done = 0
    while done < n_steps:
        chunk = min(URN_BLOCK, n_steps - done)
        draws = np.empty((n, chunk, 2))
        for i, s in enumerate(streams):
            draws[i] = s.random((chunk, 2))
        for b in range(chunk):
            left = draws[:, b, 0] < L / (L + R)
            xi = draws[:, b, 1]
            L[left] += z[left]
            z[left] *= xi[left]
            rt = ~left
            R[rt] += 1.0 - z[rt]
            z[rt] = z[rt] * (1.0 - xi[rt]) + xi[rt]
            done += 1
            if done in snaps:
                taken[done] = np.column_stack([z, L, R]).copy()
    return np.column_stack([z, L, R]), taken


def run_urn_ensemble(
    n_runs: int,
    n_steps: int,
    seed: int,
    snapshots: tuple[int, ...] = (),
    n_threads: int = 1,
) -> UrnEnsembleResult:
    """Independent runs in lockstep, one random stream per run.

    The thread count only partitions runs across workers; results are
    identical for any value.
    """
    if n_runs < 1 or n_steps < 1:
        raise InvalidParameterError("need at least one run and one step")
    snaps = tuple(sorted(set(int(s) for s in snapshots)))
    if any(s < 1 or s > n_steps for s in snaps):
        raise InvalidParameterError("snapshots must lie in 1..n_steps")
    cuts = np.linspace(0, n_runs, max(1, min(n_threads, n_runs)) + 1).astype(int)
    jobs = [(int(a), int(b)) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]
    if len(jobs) == 1:
        term, taken = _urn_slice(n_steps, seed, 0, n_runs, snaps)
        return UrnEnsembleResult(terminal=term, snapshots=taken)
    with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
        parts = list(
            pool.map(lambda ab: _urn_slice(n_steps, seed, ab[0], ab[1], snaps), jobs)
        )
    term = np.concatenate([p[0] for p in parts], axis=0)
    merged = {
        s: np.concatenate([p[1][s] for p in parts], axis=0) for s in snaps
    }
    return UrnEnsembleResult(terminal=term, snapshots=merged)


# ---------------------------------------------------------------------------
# Coupling


@dataclass(frozen=True)
class CouplingResult:
    records: np.ndarray  # columns per COUPLING_COLUMNS
    event_A: bool        # zeta stayed inside [1/2-eps_band, 1/2+eps_band] at
                         # every step at or past N0 (checked per step, not per record)
    sandwich_violations: int  # steps past N0 with not (z_hat <= z <= z_tilde)

    @property
    def sandwich_exact(self) -> bool:
        return self.sandwich_violations == 0


def coupled_run(config: CouplingConfig, stream: int = 0) -> CouplingResult:
    """Main walk plus frozen-threshold companions on shared uniforms.

    Up to step N0 the companions copy the main walk exactly.  Past N0, the
    tilde walk turns left only when U < 1/2 - eps_band and the hat walk when
    U < 1/2 + eps_band, both keeping the main walk's jump variate.  The band
    event and the pathwise sandwich are evaluated at every step; records are
    thinned by ``record_every``.
    """
    rng = make_stream(config.seed, stream)
    z = zt = zh = 0.5
    L, R = 1.0, 1.0
    lo_thr = 0.5 - config.eps_band
    hi_thr = 0.5 + config.eps_band
    in_band = True
    violations = 0
    keep = set(_record_indices(config.n_total, config.record_every).tolist())
    rows = [(1, z, L, R, 0.5, lyapunov_W(UrnState(z=z)), zt, zh, 1.0)]
    done = 0
    while done < config.n_total:
        chunk = min(URN_BLOCK, config.n_total - done)
        draws = rng.random((chunk, 2))
        for b in range(chunk):
            u, xi = draws[b, 0], draws[b, 1]
            zeta = L / (L + R)
            if u < zeta:
                L += z
                z = xi * z
            else:
                R += 1.0 - z
                z = z * (1.0 - xi) + xi
            done += 1
            if done <= config.N0:
                zt = zh = z
            else:
                zt = xi * zt if u < lo_thr else zt * (1.0 - xi) + xi
                zh = xi * zh if u < hi_thr else zh * (1.0 - xi) + xi
            if done >= config.N0 - 1:
                zeta_now = L / (L + R)
                if not lo_thr <= zeta_now <= hi_thr:
                    in_band = False
            if done >= config.N0:
                if not zh <= z <= zt:
                    violations += 1
            if done in keep:
                s = L + R
                w = (0.5 - (L + z) / s) ** 2 + 1.0 / s
                ok = float(zh <= z <= zt)
                rows.append((done + 1, z, L, R, L / s, w, zt, zh, ok))
    return CouplingResult(
        records=np.asarray(rows, dtype=float),
        event_A=in_band,
        sandwich_violations=violations,
    )


def run_frozen_walk(
    eps_band: float, n_steps: int, n_chains: int, seed: int
) -> np.ndarray:
    """Terminal positions of the tilde walk run from step 0 with its threshold
    frozen at ``1/2 - eps_band`` throughout; one stream per chain."""
    if not 0.0 <= eps_band < 0.5:
        raise InvalidParameterError("eps_band must lie in [0, 1/2)")
    if n_steps < 1 or n_chains < 1:
        raise InvalidParameterError("need at least one chain and one step")
    thr = 0.5 - eps_band
    streams = [make_stream(seed, i) for i in range(n_chains)]
    z = np.full(n_chains, 0.5)
    done = 0
    while done < n_steps:
        chunk = min(URN_BLOCK, n_steps - done)
        draws = np.empty((n_chains, chunk, 2))
        for i, s in enumerate(streams):
            draws[i] = s.random((chunk, 2))
        for b in range(chunk):
            left = draws[:, b, 0] < thr
            xi = draws[:, b, 1]
            z[left] *= xi[left]
            rt = ~left
            z[rt] = z[rt] * (1.0 - xi[rt]) + xi[rt]
            done += 1
    return z
