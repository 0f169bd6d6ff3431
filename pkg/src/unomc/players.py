"""Player abstraction: observations, bindings, and the non-LLM players.

An Observation carries only public information plus the acting seat's own
hand; LLM players never see more.  The greedy player is the one
deliberately omniscient baseline: it scores candidates with the Monte
Carlo oracle on the true state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cards import Card, Color
from .engine import (
    Decision,
    GameState,
    Phase,
    decision_token,
    legal_decisions,
)
from .oracle import evaluate_candidates
from .rng import Rng, derive

# Stream tags partition a game seed into independent sub-streams.
STREAM_PLAYER = 1
STREAM_ORACLE = 2
STREAM_FALLBACK = 3
STREAM_GREEDY = 4


@dataclass(frozen=True)
class Observation:
    """Public view for the acting seat at one decision point."""

    my_seat: int
    n_seats: int
    phase: Phase
    my_hand: tuple[Card, ...]
    top_card: Card
    active_color: Color
    direction: int
    hand_counts: tuple[int, ...]
    draw_pile_size: int
    history: tuple[tuple[int | None, Card], ...]  # (actor, card) in play order
    wd4_offender: int | None
    candidates: tuple[Decision, ...]
    turn_index: int


def observe(state: GameState, seat: int) -> Observation:
    """The public game view for `seat`, plus that seat's own hand."""
    ctx = state.challenge
    return Observation(
        my_seat=seat,
        n_seats=state.n_seats,
        phase=state.phase,
        my_hand=state.hands[seat],
        top_card=state.top_card,
        active_color=state.active_color,
        direction=state.direction,
        hand_counts=state.hand_sizes(),
        draw_pile_size=len(state.draw_pile),
        history=tuple(zip(state.discard_actors, state.discard_pile)),
        wd4_offender=ctx.offender if ctx is not None and state.phase is Phase.SELECT_CHALLENGE else None,
        candidates=tuple(legal_decisions(state)),
        turn_index=state.turn_index,
    )


@dataclass(frozen=True)
class BackendConfig:
    """Chat backend wiring; kind 'http' or 'scripted'."""

    kind: str
    url: str | None = None
    model: str | None = None
    api_key_env: str | None = None
    timeout: float = 60.0
    transport_retries: int = 2
    params: tuple[tuple[str, object], ...] = ()
    script: tuple = ()
    script_default: str | None = None
    script_path: str | None = None


@dataclass(frozen=True)
class PlayerBinding:
    """Declarative player description; one per seat.

    kind: 'random' | 'greedy' | 'llm' | 'reflect'.  `seed` overrides the
    arena's per-seat stream (random player only).  Reflection stages can
    be toggled off individually for ablations.
    """

    kind: str
    label: str
    seed: int | None = None
    n_sims: int = 1000
    crn: bool = False
    backend: BackendConfig | None = None
    strategies: tuple[str, ...] | None = None
    history_stage: bool = True
    strategy_stage: bool = True
    retries: int = 2

    def describe(self) -> dict:
        out = {"kind": self.kind, "label": self.label}
        if self.kind == "greedy":
            out["n_sims"] = self.n_sims
        if self.kind == "reflect":
            out["history_stage"] = self.history_stage
            out["strategy_stage"] = self.strategy_stage
        return out


@dataclass
class Move:
    """A player's answer at one decision point, with bookkeeping."""

    decision: Decision
    transcript: list[dict] = field(default_factory=list)
    stage_actions: list[int | None] = field(default_factory=list)
    fallback: bool = False
    invalid_replies: int = 0


def random_decide(candidates, rng: Rng) -> Decision:
    """Uniform choice from the player's own stream."""
    if not candidates:
        raise ValueError("no candidates to choose from")
    return candidates[rng.below(len(candidates))]


def greedy_decide(state: GameState, n_sims: int, seed: int, crn: bool = False) -> Decision:
    """Best candidate by Monte Carlo estimate; ties break to the lowest index."""
    ev = evaluate_candidates(state, p=0.0, n_sims=n_sims, seed=seed, crn=crn)
    return ev.candidates[ev.optimal_set[0]]


class RandomPlayer:
    def __init__(self, seed: int):
        self.rng = Rng(seed)

    def choose(self, state: GameState, obs: Observation) -> Move:
        return Move(decision=random_decide(obs.candidates, self.rng))


class GreedyPlayer:
    """Omniscient Monte-Carlo-greedy baseline (sees the full state)."""

    def __init__(self, n_sims: int, seed: int, crn: bool = False):
        self.n_sims = n_sims
        self.seed = seed
        self.crn = crn

    def choose(self, state: GameState, obs: Observation) -> Move:
        turn_seed = derive(self.seed, state.turn_index)
        return Move(decision=greedy_decide(state, self.n_sims, turn_seed, self.crn))


def build_player(binding: PlayerBinding, game_seed: int, seat: int):
    """Instantiate the runtime player for one seat of one game."""
    stream_seed = binding.seed if binding.seed is not None else derive(
        derive(game_seed, STREAM_PLAYER), seat
    )
    if binding.kind == "random":
        return RandomPlayer(stream_seed)
    if binding.kind == "greedy":
        return GreedyPlayer(binding.n_sims, derive(stream_seed, STREAM_GREEDY), binding.crn)
    if binding.kind in ("llm", "reflect"):
        from .agents import build_llm_player

        return build_llm_player(binding, stream_seed)
    raise ValueError(f"unknown player kind {binding.kind!r}")


def decide(player, state: GameState, observation: Observation) -> Decision:
    """Uniform dispatch: whatever the player returns must be a candidate."""
    move = player.choose(state, observation)
    if move.decision not in observation.candidates:
        raise ValueError(
            f"player returned illegal decision {decision_token(move.decision)}"
        )
    return move.decision
