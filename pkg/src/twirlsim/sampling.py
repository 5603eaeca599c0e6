"""Randomized channel estimation by sampling evolution times.

The Gaussian-twirl sampler draws a time s from a truncated centered normal
(variance t, window [-S, S]), applies exp(-iHs), and discards s. With
S = sqrt(2 t ln(4/eps)) the truncated law is within eps/2 of the full
Gaussian in total variation, so the sampled channel is within eps of
exp(tL) in diamond norm while each shot costs at most S of simulated time.

Reproducibility: every shot owns a counter-based stream derived from
(seed, shot_index), shots are reduced in fixed chunks combined in index
order, and per-shot costs are totaled with exact summation. Results are
therefore bit-identical across repeated runs and across worker counts.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .distributions import BaseLaw, CompoundPoisson, sample_law
from .linalg import HermitianOperator, vec

CHUNK_SHOTS = 4096
TV_EXACT_NODES = 128
_MAX_EPSILON = 4.0  # cutoff is real and positive only for epsilon below 4


def derived_rng(seed: int, index: int) -> np.random.Generator:
    """Independent reproducible stream number `index` under a 64-bit seed.

    Uses a counter-based generator: the key is the seed, the counter starts
    at a disjoint 2^192-sized block per index, so streams never overlap and
    can be created in any order.
    """
    key = int(seed) % (1 << 64)
    return np.random.Generator(np.random.Philox(key=key, counter=int(index) << 192))


def cutoff(t: float, epsilon: float) -> float:
    """Truncation window S = sqrt(2 t ln(4/epsilon)).

    Accepts any epsilon in (0, 4), the range where S is real and positive;
    the sampler itself (ShotPlan) restricts epsilon to (0, 1).
    """
    t = float(t)
    epsilon = float(epsilon)
    if not t > 0.0:
        raise ValueError(f"t must be > 0, got {t}")
    if not 0.0 < epsilon < _MAX_EPSILON:
        raise ValueError(f"epsilon must be in (0, {_MAX_EPSILON}), got {epsilon}")
    return math.sqrt(2.0 * t * math.log(4.0 / epsilon))


def tv_bound(t: float, s_cut: float) -> float:
    """Tail bound sqrt(2/pi) (sqrt(t)/S) exp(-S^2/2t) on the truncation error.

    This is the Mill's-ratio bound on the mass outside [-S, S]; the returned
    value is clipped to 1 since a total variation distance cannot exceed 1.
    """
    t = float(t)
    s_cut = float(s_cut)
    if not (t > 0.0 and s_cut > 0.0):
        raise ValueError(f"need t > 0 and S > 0, got t={t}, S={s_cut}")
    value = math.sqrt(2.0 / math.pi) * (math.sqrt(t) / s_cut) * math.exp(-s_cut ** 2 / (2.0 * t))
    return min(value, 1.0)


_tv_nodes, _tv_weights = leggauss(TV_EXACT_NODES)


def tv_exact(t: float, s_cut: float) -> float:
    """Exact truncation error 1 - Z where Z is the N(0, t) mass of [-S, S].

    Z is computed by Gauss-Legendre quadrature of the density over the window.
    """
    t = float(t)
    s_cut = float(s_cut)
    if not (t > 0.0 and s_cut > 0.0):
        raise ValueError(f"need t > 0 and S > 0, got t={t}, S={s_cut}")
    s = _tv_nodes * s_cut
    density = np.exp(-0.5 * s ** 2 / t) / math.sqrt(2.0 * math.pi * t)
    mass = float((_tv_weights * density).sum() * s_cut)
    return max(0.0, 1.0 - mass)


def sample_truncated_normal(t: float, s_cut: float, rng: np.random.Generator,
                            size: int | None = None):
    """Rejection sampling of N(0, t) conditioned on [-S, S].

    The proposal is the untruncated normal, so the expected acceptance rate is
    the window mass Z (at the derived cutoff, at least 1 - eps/2). Every
    returned value satisfies |s| <= S.
    """
    t = float(t)
    s_cut = float(s_cut)
    if not (t > 0.0 and s_cut > 0.0):
        raise ValueError(f"need t > 0 and S > 0, got t={t}, S={s_cut}")
    sigma = math.sqrt(t)
    if size is None:
        while True:
            s = rng.normal(0.0, sigma)
            if abs(s) <= s_cut:
                return float(s)
    out = rng.normal(0.0, sigma, size=size)
    bad = np.abs(out) > s_cut
    while bad.any():
        out[bad] = rng.normal(0.0, sigma, size=int(bad.sum()))
        bad = np.abs(out) > s_cut
    return out


@dataclass(frozen=True)
class ShotPlan:
    """Sampling plan: time, target accuracy, truncation window, shots, seed."""

    t: float
    epsilon: float
    cutoff: float
    shots: int
    seed: int

    def __post_init__(self):
        if not self.t > 0.0:
            raise ValueError(f"t must be > 0, got {self.t}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if not self.cutoff > 0.0:
            raise ValueError(f"cutoff must be > 0, got {self.cutoff}")
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")

    @classmethod
    def with_derived_cutoff(cls, t: float, epsilon: float, shots: int, seed: int) -> "ShotPlan":
        return cls(t=float(t), epsilon=float(epsilon), cutoff=cutoff(t, epsilon),
                   shots=int(shots), seed=int(seed))


@dataclass(frozen=True)
class CostLedger:
    """Per-shot simulated-time costs and their exact total.

    total_time is the exactly rounded sum (math.fsum) of per_shot_times, so it
    does not depend on how shots were partitioned across workers. worst_case
    is the a-priori per-shot bound when one exists (the truncation window),
    otherwise the realized maximum.
    """

    per_shot_times: np.ndarray
    total_time: float
    worst_case: float
    shots: int


@dataclass(frozen=True)
class EmpiricalChannel:
    """Mean Choi matrix of the sampled unitary conjugations."""

    dim: int
    choi: np.ndarray
    shots: int


def _unitary_choi_vector(op: HermitianOperator, s: float) -> np.ndarray:
    # Choi of conjugation by U_s is w w^dag with w = vec(U_s^T)
    return vec(op.unitary_at(s).T)


def run_shot(h, rho, plan: ShotPlan, shot_index: int,
             s: float | None = None) -> tuple[np.ndarray, float]:
    """One shot: draw s from the plan's stream, return (U_s rho U_s^dag, s).

    Passing s explicitly skips sampling (test instrumentation; s=0 must give
    back the input state).
    """
    op = h if isinstance(h, HermitianOperator) else HermitianOperator(h)
    if s is None:
        rng = derived_rng(plan.seed, shot_index)
        s = sample_truncated_normal(plan.t, plan.cutoff, rng)
    u = op.unitary_at(s)
    return u @ np.asarray(rho, dtype=np.complex128) @ u.conj().T, float(s)


def _accumulate_chunks(shots: int, threads: int, chunk_fn: Callable[[int, int], np.ndarray],
                       d2: int) -> np.ndarray:
    """Run chunk_fn over fixed [start, stop) chunks and sum results in chunk order.

    The chunk partition never depends on the worker count, so the reduction is
    bit-identical whether chunks run serially or on a thread pool.
    """
    bounds = [(start, min(start + CHUNK_SHOTS, shots))
              for start in range(0, shots, CHUNK_SHOTS)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(lambda b: chunk_fn(*b), bounds))
    else:
        partials = [chunk_fn(*b) for b in bounds]
    total = np.zeros((d2, d2), dtype=np.complex128)
    for partial in partials:
        total += partial
    return total


def estimate_channel(h, plan: ShotPlan, threads: int = 1,
                     sample_hook: Callable[[int], float] | None = None,
                     ) -> tuple[EmpiricalChannel, CostLedger]:
    """Estimate the Gaussian twirl channel from plan.shots sampled unitaries.

    Returns the mean Choi matrix (an unbiased estimate of the truncated
    twirl's Choi matrix) and the cost ledger of |s| per shot. sample_hook, if
    given, maps shot_index -> s and replaces sampling (test instrumentation).
    """
    op = h if isinstance(h, HermitianOperator) else HermitianOperator(h)
    d = op.dim
    times = np.zeros(plan.shots, dtype=np.float64)

    def chunk_fn(start: int, stop: int) -> np.ndarray:
        partial = np.zeros((d * d, d * d), dtype=np.complex128)
        for i in range(start, stop):
            if sample_hook is not None:
                s = float(sample_hook(i))
            else:
                rng = derived_rng(plan.seed, i)
                s = sample_truncated_normal(plan.t, plan.cutoff, rng)
            w = _unitary_choi_vector(op, s)
            partial += np.outer(w, w.conj())
            times[i] = abs(s)
        return partial

    total = _accumulate_chunks(plan.shots, threads, chunk_fn, d * d)
    ledger = CostLedger(per_shot_times=times, total_time=math.fsum(times),
                        worst_case=plan.cutoff, shots=plan.shots)
    return EmpiricalChannel(dim=d, choi=total / plan.shots, shots=plan.shots), ledger


# ---------------------------------------------------------------------------
# compound Poisson sampling
# ---------------------------------------------------------------------------

def poisson_by_inversion(rate: float, rng: np.random.Generator) -> int:
    """Poisson draw by inversion with sequential search.

    Exact and branch-free of library differences; intended for the moderate
    rates used here (exp(-rate) must not underflow).
    """
    rate = float(rate)
    if not rate >= 0.0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    if rate > 700.0:
        raise ValueError(f"rate {rate} too large for inversion sampling")
    u = rng.random()
    k = 0
    p = math.exp(-rate)
    cum = p
    while u > cum:
        k += 1
        p *= rate / k
        cum += p
    return k


def compound_poisson_kicks(rate_time: float, base: BaseLaw,
                           rng: np.random.Generator) -> np.ndarray:
    """The individual jumps of one compound Poisson draw."""
    CompoundPoisson(rate=rate_time, base=base)  # validates rate and base
    n = poisson_by_inversion(rate_time, rng)
    if n == 0:
        return np.zeros(0, dtype=np.float64)
    return np.asarray(sample_law(base, rng, size=n), dtype=np.float64)


def sample_compound_poisson(rate_time: float, base: BaseLaw,
                            rng: np.random.Generator) -> float:
    """Total time s = sum of Poisson(rate_time)-many draws from the base law."""
    return float(compound_poisson_kicks(rate_time, base, rng).sum())


def estimate_compound_channel(h, base: BaseLaw, t: float, shots: int, seed: int,
                              threads: int = 1) -> tuple[EmpiricalChannel, CostLedger]:
    """Estimate the compound Poisson twirl at time t from sampled total kicks.

    Each shot applies exp(-iHs) with s the summed jumps of one compound
    Poisson draw. The ledger records the summed jump magnitudes sum_j |X_j|
    per shot (the simulated time if each jump is applied as its own
    evolution), whose expectation is t * E|X_1| for every base law.
    """
    t = float(t)
    if not t >= 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    CompoundPoisson(rate=t, base=base)
    op = h if isinstance(h, HermitianOperator) else HermitianOperator(h)
    d = op.dim
    shots = int(shots)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    times = np.zeros(shots, dtype=np.float64)

    def chunk_fn(start: int, stop: int) -> np.ndarray:
        partial = np.zeros((d * d, d * d), dtype=np.complex128)
        for i in range(start, stop):
            rng = derived_rng(seed, i)
            kicks = compound_poisson_kicks(t, base, rng)
            w = _unitary_choi_vector(op, float(kicks.sum()))
            partial += np.outer(w, w.conj())
            times[i] = float(np.abs(kicks).sum())
        return partial

    total = _accumulate_chunks(shots, threads, chunk_fn, d * d)
    worst = float(times.max()) if shots else 0.0
    ledger = CostLedger(per_shot_times=times, total_time=math.fsum(times),
                        worst_case=worst, shots=shots)
    return EmpiricalChannel(dim=d, choi=total / shots, shots=shots), ledger


# ---------------------------------------------------------------------------
# scaling diagnostics
# ---------------------------------------------------------------------------

def scaling_table(ts, epsilon: float) -> list[tuple[float, float, float]]:
    """Rows (t, S, S/sqrt(t)) for the derived cutoff at fixed epsilon.

    The last column is constant in t: the window grows exactly as sqrt(t).
    """
    rows = []
    for t in ts:
        s_cut = cutoff(t, epsilon)
        rows.append((float(t), s_cut, s_cut / math.sqrt(t)))
    return rows


def mean_sampled_cost(t: float, epsilon: float, draws: int, seed: int) -> float:
    """Mean |s| over draws from the truncated law (one derived stream)."""
    rng = derived_rng(seed, 0)
    samples = sample_truncated_normal(t, cutoff(t, epsilon), rng, size=int(draws))
    return float(np.abs(samples).mean())
