"""ADMM completion solvers on the tensor-ring format.

Two models over the same splitting scheme:

  olrf (overlapped): each core carries three auxiliary tensors M_ni, one per
      unfolding, each pushed toward low rank by SVT.
  llrf (latent): each core is the sum of three latent tensors W_ni, each
      low-rank in one unfolding, with a single multiplier per core.

Per iteration, in order: sweep the cores n = 1..N (Gauss-Seidel, each update
sees the cores already refreshed this sweep), update the auxiliary/latent
tensors by SVT, refill the missing entries of x from the reconstruction,
step the multipliers, grow mu. Stops when the relative change of x drops
below tol.

The core sweep reuses partial chain products: suffix chains of the not yet
updated cores are built once per sweep, the prefix chain of refreshed cores
is extended as the sweep advances, so each subchain costs one merge.
"""

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .tensors import gamma_unfold, gamma_fold
from .ring import TRCores, TRRank, _merge, _trace_contract
from .prox import svt, core_update_olrf, core_update_llrf


class DivergenceError(RuntimeError):
    """Raised when the iteration blows up instead of converging."""


@dataclass
class SolverConfig:
    tr_rank: TRRank
    lam: float = 10.0
    mu0: float = 1.0
    mu_max: float = 100.0
    rho: float = 1.01
    tol: float = 1e-6
    max_iters: int = 500
    seed: int = 0
    # take mu <- max(rho*mu, mu_max) literally instead of capping: mu jumps
    # to mu_max at once and then grows without bound. Kept as a switch.
    mu_literal_max: bool = False

    def __post_init__(self):
        if not isinstance(self.tr_rank, TRRank):
            self.tr_rank = TRRank(tuple(self.tr_rank))
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.mu0 <= 0 or self.mu_max <= 0 or self.mu0 > self.mu_max:
            raise ValueError("need 0 < mu0 <= mu_max")
        if self.rho < 1:
            raise ValueError("rho must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class OlrfState:
    x: np.ndarray
    cores: list
    aux: list        # aux[n][i], shaped like core n
    multipliers: list
    mu: float
    iter: int = 0


@dataclass
class LlrfState:
    x: np.ndarray
    cores: list
    latent: list     # latent[n][i], shaped like core n
    multipliers: list
    mu: float
    iter: int = 0


@dataclass
class SolveReport:
    iterations: int
    converged: bool
    rel_change_history: list
    rse_history: Optional[list]
    final_x: np.ndarray
    final_cores: TRCores
    wall_time: float
    iter_times: list = field(default_factory=list)
    consistency_history: list = field(default_factory=list)
    mu_history: list = field(default_factory=list)


def rse(estimate, truth, scope="all", mask=None):
    """Relative error norm(estimate - truth) / norm(truth) on a scope.

    scope "all" compares every entry; "missing" compares only entries where
    mask is False (mask required).
    """
    estimate = np.asarray(estimate)
    truth = np.asarray(truth)
    if estimate.shape != truth.shape:
        raise ValueError("shape mismatch")
    if scope == "all":
        e, t = estimate, truth
    elif scope == "missing":
        if mask is None:
            raise ValueError("missing scope needs the observation mask")
        sel = ~np.asarray(mask, dtype=bool)
        e, t = estimate[sel], truth[sel]
    else:
        raise ValueError(f"unknown scope {scope!r}")
    denom = np.linalg.norm(t)
    if denom == 0.0:
        raise ValueError("truth has zero norm on the requested scope")
    return float(np.linalg.norm(e - t) / denom)


def _validate(observed, mask, cfg):
    observed = np.asarray(observed, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != observed.shape:
        raise ValueError("mask shape does not match tensor shape")
    if not mask.any():
        raise ValueError("observation mask is empty")
    if not np.isfinite(observed[mask]).all():
        raise ValueError("observed entries must be finite")
    if len(cfg.tr_rank) != observed.ndim:
        raise ValueError(
            f"rank vector of length {len(cfg.tr_rank)} incompatible with order-{observed.ndim} tensor"
        )
    return observed, mask


def init_state(observed, mask, cfg, model="olrf"):
    """Initial solver state: N(0,1) cores, zero auxiliaries and multipliers,
    x = observed with missing entries set to zero."""
    observed, mask = _validate(observed, mask, cfg)
    shape = observed.shape
    ranks = cfg.tr_rank.ranks
    n_modes = len(shape)
    rng = np.random.default_rng(cfg.seed)
    cores = [
        rng.standard_normal((ranks[i], shape[i], ranks[(i + 1) % n_modes]))
        for i in range(n_modes)
    ]
    x0 = np.where(mask, observed, 0.0)
    zeros3 = lambda c: [np.zeros_like(c) for _ in range(3)]
    if model == "olrf":
        return OlrfState(
            x=x0,
            cores=cores,
            aux=[zeros3(c) for c in cores],
            multipliers=[zeros3(c) for c in cores],
            mu=cfg.mu0,
        )
    if model == "llrf":
        return LlrfState(
            x=x0,
            cores=cores,
            latent=[zeros3(c) for c in cores],
            multipliers=[np.zeros_like(c) for c in cores],
            mu=cfg.mu0,
        )
    raise ValueError(f"unknown model {model!r}")


def _suffix_chains(cores):
    # sfx[i] merges cores[i:], sfx[N] is None
    n = len(cores)
    sfx = [None] * (n + 1)
    sfx[n - 1] = cores[n - 1]
    for i in range(n - 2, 0, -1):
        sfx[i] = _merge(cores[i], sfx[i + 1])
    return sfx


def _combine(sfx, pfx):
    if pfx is None:
        return sfx
    if sfx is None:
        return pfx
    return _merge(sfx, pfx)


def _solve(model, observed, mask, cfg, truth=None):
    observed, mask = _validate(observed, mask, cfg)
    shape = observed.shape
    n_modes = observed.ndim
    state = init_state(observed, mask, cfg, model)
    cores = state.cores
    x = state.x
    mu = state.mu
    lam = cfg.lam

    obs = np.where(mask, observed, 0.0)
    obs_norm = np.linalg.norm(obs)
    if obs_norm == 0.0:
        raise ValueError("observed entries are all zero")
    scope = "missing" if not mask.all() else "all"

    rel_hist, rse_hist, cons_hist, iter_times, mu_hist = [], [], [], [], []
    converged = False
    blowups = 0
    t_start = time.perf_counter()
    it = 0
    for it in range(1, cfg.max_iters + 1):
        t_iter = time.perf_counter()
        mu_hist.append(mu)
        try:
            sfx = _suffix_chains(cores)
            prefix = None
            for n in range(1, n_modes + 1):
                chain = _combine(sfx[n], prefix)
                if model == "olrf":
                    g = core_update_olrf(
                        x, cores, state.aux[n - 1], state.multipliers[n - 1],
                        n, lam, mu, chain=chain,
                    )
                else:
                    g = core_update_llrf(
                        x, cores, state.latent[n - 1], state.multipliers[n - 1],
                        n, lam, mu, chain=chain,
                    )
                cores[n - 1] = g
                if n < n_modes:
                    prefix = g if prefix is None else _merge(prefix, g)

            beta = 1.0 / mu
            if model == "olrf":
                for n in range(n_modes):
                    g = cores[n]
                    for i in range(3):
                        target = g - state.multipliers[n][i] / mu
                        hit = svt(gamma_unfold(target, i + 1), beta).matrix
                        state.aux[n][i] = gamma_fold(hit, i + 1, g.shape)
            else:
                # Gauss-Seidel over the three latent tensors, freshest first
                for n in range(n_modes):
                    g = cores[n]
                    y = state.multipliers[n]
                    for i in range(3):
                        others = sum(state.latent[n][j] for j in range(3) if j != i)
                        target = g - y / mu - others
                        hit = svt(gamma_unfold(target, i + 1), beta).matrix
                        state.latent[n][i] = gamma_fold(hit, i + 1, g.shape)

            z = _trace_contract(prefix, cores[-1]).reshape(shape, order="F")
        except np.linalg.LinAlgError as e:
            raise DivergenceError(f"{model} iterate became non-finite at iteration {it}: {e}") from e

        x_new = np.where(mask, obs, z)
        rel = float(np.linalg.norm(x_new - x) / obs_norm)
        x = x_new

        if model == "olrf":
            cons = 0.0
            for n in range(n_modes):
                g = cores[n]
                gn = np.linalg.norm(g) or 1.0
                for i in range(3):
                    state.multipliers[n][i] += mu * (state.aux[n][i] - g)
                    cons = max(cons, np.linalg.norm(state.aux[n][i] - g) / gn)
        else:
            cons = 0.0
            for n in range(n_modes):
                g = cores[n]
                gn = np.linalg.norm(g) or 1.0
                wsum = sum(state.latent[n])
                state.multipliers[n] += mu * (wsum - g)
                cons = max(cons, np.linalg.norm(wsum - g) / gn)

        if cfg.mu_literal_max:
            mu = max(cfg.rho * mu, cfg.mu_max)
        else:
            mu = min(cfg.rho * mu, cfg.mu_max)

        rel_hist.append(rel)
        cons_hist.append(float(cons))
        if truth is not None:
            rse_hist.append(rse(x, truth, scope, mask))
        iter_times.append(time.perf_counter() - t_iter)

        if not np.isfinite(rel) or rel > 1e3:
            blowups += 1
            if blowups >= 10:
                raise DivergenceError(
                    f"{model} relative change above 1e3 for 10 consecutive iterations (iteration {it})"
                )
        else:
            blowups = 0

        if rel < cfg.tol:
            converged = True
            break

    state.x = x
    state.mu = mu
    state.iter = it
    return SolveReport(
        iterations=it,
        converged=converged,
        rel_change_history=rel_hist,
        rse_history=rse_hist if truth is not None else None,
        final_x=x,
        final_cores=TRCores(tuple(cores)),
        wall_time=time.perf_counter() - t_start,
        iter_times=iter_times,
        consistency_history=cons_hist,
        mu_history=mu_hist,
    )


def solve_olrf(observed, mask, cfg, truth=None):
    """Complete a partially observed tensor with the overlapped model."""
    return _solve("olrf", observed, mask, cfg, truth)


def solve_llrf(observed, mask, cfg, truth=None):
    """Complete a partially observed tensor with the latent model."""
    return _solve("llrf", observed, mask, cfg, truth)
