"""Particle swarm search over loss weights on the probability simplex.

Positions are kept feasible by Euclidean projection after every move.
Each particle draws from its own seeded substream, so results do not
depend on the order in which fitness evaluations finish.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError
from .weights import N_WEIGHTS, LossWeights

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SwarmConfig:
    particle_num: int = 20
    iterations: int = 30
    w: float = 0.729
    c1: float = 1.494
    c2: float = 1.494
    stagnation_K: int = 3
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        for name in ("particle_num", "iterations", "stagnation_K", "workers"):
            if getattr(self, name) < 1:
                raise ContractError(f"{name} must be >= 1")
        for name in ("w", "c1", "c2"):
            if getattr(self, name) < 0:
                raise ContractError(f"{name} must be >= 0")


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_fitness: float
    rng: np.random.Generator = field(repr=False)
    fitness: float = -math.inf


@dataclass
class PSOResult:
    best: LossWeights
    best_fitness: float
    history: list


def project_simplex(v):
    """Euclidean projection of ``v`` onto ``{x >= 0, sum(x) = 1}``.

    Sort-based: find the largest ``rho`` with ``u_rho > (cumsum_rho - 1) / rho``
    on the descending sort ``u`` and shift by that threshold.
    """
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise ContractError("cannot project an empty vector")
    if not np.all(np.isfinite(v)):
        raise ContractError(f"non-finite input {v}")
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    x = np.maximum(v - theta, 0.0)
    # absorb rounding so the sum is 1 to machine precision
    x /= x.sum()
    return x


def _substreams(seed, n):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def init_swarm(cfg, incumbent=None):
    """Dirichlet(1) positions, zero velocities; particle 0 may start at ``incumbent``."""
    rngs = _substreams(cfg.seed, cfg.particle_num)
    swarm = []
    for i, rng in enumerate(rngs):
        pos = rng.dirichlet(np.ones(N_WEIGHTS))
        if i == 0 and incumbent is not None:
            pos = incumbent.as_array() if isinstance(incumbent, LossWeights) else np.asarray(incumbent, float)
            pos = project_simplex(pos)
        swarm.append(Particle(pos, np.zeros(N_WEIGHTS), pos.copy(), -math.inf, rng))
    return swarm


def _evaluate(swarm, fitness, workers):
    weights = [LossWeights.from_array(p.position) for p in swarm]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(fitness, weights))
    else:
        values = [fitness(w) for w in weights]
    for p, val in zip(swarm, values):
        val = float(val)
        if math.isnan(val):
            raise ContractError("fitness returned NaN")
        p.fitness = val


def _update_bests(swarm, global_best):
    best_pos, best_fit = global_best
    for p in swarm:
        if p.fitness > p.best_fitness:
            p.best_fitness = p.fitness
            p.best_position = p.position.copy()
        if p.fitness > best_fit:
            best_fit = p.fitness
            best_pos = p.position.copy()
    return best_pos, best_fit


def evaluate_swarm(swarm, fitness, cfg, global_best=None):
    """Evaluate current positions and fold them into the bests."""
    _evaluate(swarm, fitness, cfg.workers)
    if global_best is None:
        global_best = (swarm[0].position.copy(), -math.inf)
    return _update_bests(swarm, global_best)


def swarm_step(swarm, global_best, fitness, cfg):
    """One velocity/position update followed by re-evaluation."""
    gpos = global_best[0]
    for p in swarm:
        r1 = p.rng.random(N_WEIGHTS)
        r2 = p.rng.random(N_WEIGHTS)
        p.velocity = (
            cfg.w * p.velocity
            + cfg.c1 * r1 * (p.best_position - p.position)
            + cfg.c2 * r2 * (gpos - p.position)
        )
        p.position = project_simplex(p.position + p.velocity)
    return swarm, evaluate_swarm(swarm, fitness, cfg, global_best)


def optimize_weights(fitness, cfg, incumbent=None):
    """Maximize ``fitness`` over the simplex.

    ``history[i]`` is the global best fitness after iteration ``i + 1``.
    """
    swarm = init_swarm(cfg, incumbent)
    gbest = evaluate_swarm(swarm, fitness, cfg)
    history = []
    for it in range(cfg.iterations):
        swarm, gbest = swarm_step(swarm, gbest, fitness, cfg)
        history.append(gbest[1])
        logger.debug("pso iteration %d best %.6g", it + 1, gbest[1])
    return PSOResult(LossWeights.from_array(gbest[0]), gbest[1], history)


def stagnation_gate(recent_scores, s_best, K):
    """True iff the last ``K`` scores are all strictly below ``s_best``."""
    if K < 1:
        raise ContractError("K must be >= 1")
    if len(recent_scores) < K:
        return False
    return all(s < s_best for s in list(recent_scores)[-K:])


def replay_triggers(scores, K):
    """Epochs (1-based) at which the gate fires when replaying a score trace.

    The running best includes the current epoch, and only epochs after the
    previous trigger count toward the next one.
    """
    triggers = []
    best = -math.inf
    since = 0
    for epoch, s in enumerate(scores, start=1):
        best = max(best, s)
        if stagnation_gate(scores[since:epoch], best, K):
            triggers.append(epoch)
            since = epoch
    return triggers
