"""Monte Carlo scoring of states and decision candidates.

A state's estimate for a seat is the fraction of seeded uniform-random
playouts that seat wins (shared wins count in full).  Candidate scoring
applies each legal decision and estimates the successor for the acting
seat; the best candidates, the max-min spread, and the spread-threshold
criticality flag come out of the same pass.

All rollout seeds derive deterministically from the caller's seed, so
every number here is reproducible and independent of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import speed
from .engine import Decision, GameState, apply, is_terminal, legal_decisions
from .rng import derive


@dataclass(frozen=True)
class Estimate:
    """Winning-rate estimate for one seat: wins/n_sims over seeded rollouts."""

    wins: int
    n_sims: int
    deciding_seat: int

    @property
    def value(self) -> float:
        return self.wins / self.n_sims


@dataclass(frozen=True)
class CandidateEvaluation:
    candidates: tuple[Decision, ...]
    estimates: tuple[Estimate, ...]
    optimal_set: tuple[int, ...]
    spread: float
    critical: bool

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(e.value for e in self.estimates)


def rollout(state: GameState, seed: int) -> frozenset[int]:
    """One uniform-random playout to termination; returns the winner set."""
    return speed.rollout_winners(state, seed)


def estimate(state: GameState, deciding_seat: int, n_sims: int, seed: int) -> Estimate:
    """Winning-rate of `deciding_seat` over n_sims rollouts from `state`."""
    counts = speed.simulate_wins(state, n_sims, seed)
    return Estimate(wins=counts[deciding_seat], n_sims=n_sims, deciding_seat=deciding_seat)


def estimate_all_seats(state: GameState, n_sims: int, seed: int) -> list[Estimate]:
    """Every seat's estimate from one shared rollout set.

    Equals per-seat `estimate` calls exactly: the rollout stream depends
    only on (state, n_sims, seed), the seat only selects what is counted.
    """
    counts = speed.simulate_wins(state, n_sims, seed)
    return [Estimate(wins=c, n_sims=n_sims, deciding_seat=s) for s, c in enumerate(counts)]


def spread_and_critical(values: list[float], p: float) -> tuple[float, bool]:
    """Max-min spread and whether it reaches the criticality threshold p."""
    spread = max(values) - min(values)
    return spread, spread >= p


def evaluate_candidates(
    state: GameState,
    p: float,
    n_sims: int,
    seed: int,
    crn: bool = False,
) -> CandidateEvaluation:
    """Score every legal decision of the acting seat by successor estimate.

    Candidate seeds derive from (seed, candidate index); with crn=True all
    candidates share `seed` (common random numbers, lower comparison
    variance).  Ties for the best estimate all land in optimal_set.
    """
    if is_terminal(state):
        raise ValueError("cannot evaluate candidates of a terminal state")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"threshold p must be in [0,1], got {p}")
    seat = state.current_seat
    candidates = legal_decisions(state)
    estimates = []
    for j, decision in enumerate(candidates):
        cand_seed = seed if crn else derive(seed, j)
        estimates.append(estimate(apply(state, decision), seat, n_sims, cand_seed))
    best = max(e.wins for e in estimates)
    optimal = tuple(j for j, e in enumerate(estimates) if e.wins == best)
    spread, critical = spread_and_critical([e.value for e in estimates], p)
    return CandidateEvaluation(
        candidates=tuple(candidates),
        estimates=tuple(estimates),
        optimal_set=optimal,
        spread=spread,
        critical=critical,
    )


def fractional_rank(values: list[float], chosen: int) -> float:
    """Rank of values[chosen] by descending value; ties share the mean rank."""
    if not values:
        raise ValueError("empty value list")
    if not 0 <= chosen < len(values):
        raise ValueError(f"chosen index {chosen} out of range")
    target = values[chosen]
    greater = sum(1 for v in values if v > target)
    equal = sum(1 for v in values if v == target)
    return greater + (equal + 1) / 2


def winrate_points(
    states: list[GameState], n_sims: int, seed: int
) -> list[tuple[int, int, float]]:
    """(turn_index, seat, estimate) rows for a sequence of positions."""
    rows = []
    for state in states:
        for est in estimate_all_seats(state, n_sims, derive(seed, state.turn_index)):
            rows.append((state.turn_index, est.deciding_seat, est.value))
    return rows


def winrate_trace(log, n_sims: int, seed: int) -> list[tuple[int, int, float]]:
    """Per-turn winning-rate series of a logged game.

    Replays the game and, after every applied decision, estimates every
    seat's winning rate from the resulting position.  Returns
    (turn_index, seat, estimate) rows, seats nested within turns.
    """
    from .arena import replay_states  # local import; arena owns the log format

    states = replay_states(log)
    return winrate_points(states[1:], n_sims, seed)
