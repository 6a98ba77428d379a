"""The walk engine.

One step from position ``z``: pick a vertex of the simplex (the origin ``E_0``
or a unit vertex ``E_j``) with place-dependent probabilities ``p(z)``, draw a
jump fraction ``xi``, and move to ``(1 - xi) z + xi E_vertex``.  Trajectories
are strictly sequential; ensembles run many independent chains in lockstep,
each on its own random stream, so results never depend on how the chains are
scheduled across threads.

Variate budget: one uniform (vertex, by cumulative-sum inversion) and one jump
draw per step.  The blocked drivers pre-draw per chain, per block of
``BLOCK`` steps, first the jump variates and then the uniforms; a one-chain
ensemble therefore reproduces ``run_chain`` exactly.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .distributions import JumpLaw, sample_jump
from .errors import DomainError, InvalidParameterError
from .rng import make_stream

__all__ = [
    "BLOCK",
    "ChoiceFunction",
    "ConstantChoice",
    "LinearChoice",
    "Piecewise1DChoice",
    "CustomChoice",
    "choice_probs",
    "ChainState",
    "ChainConfig",
    "step",
    "run_chain",
    "run_ensemble",
]

#: Steps per pre-drawn variate block.
BLOCK = 1024

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class ChoiceFunction:
    """Base class for vertex-choice probability functions."""

    def free_probs(self, z: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantChoice(ChoiceFunction):
    """Fixed probabilities (p_1, ..., p_d); p_0 is the remainder."""

    p: tuple[float, ...]

    def __post_init__(self) -> None:
        p = tuple(float(v) for v in np.atleast_1d(np.asarray(self.p, dtype=float)))
        if any(v < 0.0 for v in p) or sum(p) > 1.0 + _PROB_TOL:
            raise InvalidParameterError("probabilities must be nonnegative with sum <= 1")
        object.__setattr__(self, "p", p)

    @property
    def d(self) -> int:
        return len(self.p)

    def free_probs(self, z: np.ndarray) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.p), z.shape).copy()


@dataclass(frozen=True)
class LinearChoice(ChoiceFunction):
    """Affine choice ``p_k(z) = beta_k (1 - z_k) + (1 - sum(beta) + beta_k) z_k``.

    Parameters (beta_1, ..., beta_{d+1}) must be strictly positive with
    ``sum(beta) - beta_k < 1`` for every k; this guarantees the full vector
    stays inside the open probability simplex for every z.
    """

    beta: tuple[float, ...]

    def __post_init__(self) -> None:
        beta = tuple(float(v) for v in np.atleast_1d(np.asarray(self.beta, dtype=float)))
        if len(beta) < 2:
            raise InvalidParameterError("need at least (beta_1, beta_2)")
        total = sum(beta)
        if any(v <= 0.0 for v in beta) or any(total - v >= 1.0 for v in beta):
            raise InvalidParameterError(
                "need beta_k > 0 and sum(beta) - beta_k < 1 for every k"
            )
        object.__setattr__(self, "beta", beta)

    @property
    def d(self) -> int:
        return len(self.beta) - 1

    def free_probs(self, z: np.ndarray) -> np.ndarray:
        b = np.asarray(self.beta[:-1])
        total = sum(self.beta)
        return b * (1.0 - z) + (1.0 - total + b) * z


@dataclass(frozen=True)
class Piecewise1DChoice(ChoiceFunction):
    """Piecewise-constant p_1 on [0,1] (d=1 only).

    ``values[i]`` applies on [breakpoints[i-1], breakpoints[i]) with implicit
    outer breakpoints 0 and 1.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        bp = tuple(float(v) for v in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        if len(vals) != len(bp) + 1:
            raise InvalidParameterError("need exactly len(breakpoints)+1 values")
        if any(not 0.0 < v < 1.0 for v in bp) or list(bp) != sorted(set(bp)):
            raise InvalidParameterError("breakpoints must be strictly increasing in (0,1)")
        if any(not 0.0 <= v <= 1.0 for v in vals):
            raise InvalidParameterError("piece values are probabilities")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @property
    def d(self) -> int:
        return 1

    def free_probs(self, z: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(np.asarray(self.breakpoints), z[..., 0], side="right")
        return np.asarray(self.values)[idx][..., None]


@dataclass(frozen=True)
class CustomChoice(ChoiceFunction):
    """User-supplied map z -> (p_1, ..., p_d), batched over the last axis."""

    func: Callable[[np.ndarray], np.ndarray]
    d: int

    def free_probs(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(z), dtype=float)


def choice_probs(cf: ChoiceFunction, z) -> np.ndarray:
    """Full probability vector (p_0, p_1, ..., p_d) at z; validated."""
    z = np.asarray(z, dtype=float)
    free = cf.free_probs(z)
    p0 = 1.0 - free.sum(axis=-1, keepdims=True)
    full = np.concatenate([p0, free], axis=-1)
    if np.any(full < -_PROB_TOL) or np.any(full > 1.0 + _PROB_TOL):
        raise InvalidParameterError(
            "choice function left the probability simplex by more than 1e-12"
        )
    return full


@dataclass(frozen=True)
class ChainState:
    z: np.ndarray
    n: int
    last_vertex: int | None = None


@dataclass(frozen=True)
class ChainConfig:
    d: int
    choice: ChoiceFunction
    jump: JumpLaw
    steps: int
    initial: Sequence[float] | None = None
    burn_in: int | None = None
    thinning: int = 1
    ensemble: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.d < 1:
            raise InvalidParameterError("dimension must be >= 1")
        if self.steps < 0 or self.ensemble < 1 or self.thinning < 1:
            raise InvalidParameterError("steps >= 0, ensemble >= 1, thinning >= 1")
        init = self.initial_point()
        if init.shape != (self.d,):
            raise InvalidParameterError(f"initial point must have {self.d} coordinates")
        if np.any(init < 0.0) or init.sum() > 1.0 + _PROB_TOL:
            raise DomainError("initial point outside the simplex")
        bi = self.effective_burn_in()
        if self.steps > 0 and not 0 <= bi < self.steps:
            raise InvalidParameterError("need 0 <= burn_in < steps")

    def initial_point(self) -> np.ndarray:
        if self.initial is None:
            return np.full(self.d, 1.0 / (self.d + 1))
        return np.asarray(self.initial, dtype=float)

    def effective_burn_in(self) -> int:
        return self.steps // 2 if self.burn_in is None else self.burn_in


def _invert_cumsum_scalar(p: np.ndarray, u: float) -> int:
    cum = np.cumsum(p)
    return int(min(np.searchsorted(cum, u, side="right"), p.shape[0] - 1))


def step(state: ChainState, cf: ChoiceFunction, jump: JumpLaw, rng: np.random.Generator) -> ChainState:
    """One transition; consumes the vertex uniform first, then the jump draw."""
    p = choice_probs(cf, state.z)
    v = _invert_cumsum_scalar(p, rng.random())
    xi = float(sample_jump(jump, rng))
    z = (1.0 - xi) * np.asarray(state.z, dtype=float)
    if v >= 1:
        z[v - 1] += xi
    return ChainState(z=z, n=state.n + 1, last_vertex=v)


def _draw_block(jump: JumpLaw, rng: np.random.Generator, m: int):
    xis = np.asarray(sample_jump(jump, rng, m), dtype=float)
    us = rng.random(m)
    return xis, us


def run_chain(config: ChainConfig) -> list[ChainState]:
    """One trajectory on stream 0; records step 0, every thinning-th step, and
    always the terminal step."""
    if config.ensemble != 1:
        raise InvalidParameterError("run_chain requires ensemble = 1")
    rng = make_stream(config.seed, 0)
    z = config.initial_point().copy()
    out = [ChainState(z=z.copy(), n=0, last_vertex=None)]
    done = 0
    while done < config.steps:
        m = min(BLOCK, config.steps - done)
        xis, us = _draw_block(config.jump, rng, m)
        for i in range(m):
            p = choice_probs(config.choice, z)
            v = _invert_cumsum_scalar(p, us[i])
            xi = xis[i]
            z *= 1.0 - xi
            if v >= 1:
                z[v - 1] += xi
            n = done + i + 1
            if n % config.thinning == 0 or n == config.steps:
                out.append(ChainState(z=z.copy(), n=n, last_vertex=v))
        done += m
    return out


def _ensemble_slice(config: ChainConfig, lo: int, hi: int) -> np.ndarray:
    rngs = [make_stream(config.seed, i) for i in range(lo, hi)]
    nc = hi - lo
    Z = np.tile(config.initial_point(), (nc, 1))
    done = 0
    while done < config.steps:
        m = min(BLOCK, config.steps - done)
        drawn = [_draw_block(config.jump, r, m) for r in rngs]
        xis = np.stack([a for a, _ in drawn])
        us = np.stack([b for _, b in drawn])
        for b in range(m):
            P = choice_probs(config.choice, Z)
            cum = np.cumsum(P, axis=1)
            v = np.minimum((us[:, b : b + 1] >= cum).sum(axis=1), config.d)
            xi = xis[:, b]
            Z *= (1.0 - xi)[:, None]
            mask = v >= 1
            Z[mask, v[mask] - 1] += xi[mask]
        done += m
    return Z


def run_ensemble(config: ChainConfig, n_threads: int = 1) -> np.ndarray:
    """Terminal states of ``ensemble`` independent chains, shape (ensemble, d).

    Chain i always uses stream i; the output is ordered by chain index and is
    identical for every ``n_threads``.
    """
    n = config.ensemble
    if n_threads <= 1 or n == 1:
        return _ensemble_slice(config, 0, n)
    cuts = np.linspace(0, n, min(n_threads, n) + 1).astype(int)
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        parts = list(
            pool.map(lambda ab: _ensemble_slice(config, ab[0], ab[1]), zip(cuts[:-1], cuts[1:]))
        )
    return np.concatenate(parts, axis=0)
