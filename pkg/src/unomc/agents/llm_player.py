"""The single-shot LLM player and the three-turn reflection player.

Both run one conversation per decision point.  The single-shot player may
re-ask after an invalid reply (each retry appended to the transcript and
flagged); the reflection player never re-asks, so its transcript holds
exactly one exchange per enabled stage: opening decision, game-history
reflection, game-strategy reflection.  An invalid stage keeps the
previous stage's action; if no stage ever parsed, the move falls back to
a seeded random legal candidate and is flagged.
"""

from __future__ import annotations

from ..engine import GameState
from ..players import Move, Observation, PlayerBinding, STREAM_FALLBACK
from ..rng import Rng, derive
from .backend import BackendError, ChatBackend, build_backend
from .parsing import parse_reply
from .prompts import (
    DEFAULT_STRATEGIES,
    history_reflection_prompt,
    history_summary,
    render_prompt,
    strategy_reflection_prompt,
)

RETRY_SUFFIX = (
    "Your previous reply could not be used (missing JSON or an action that "
    "is not one of the listed option indexes). Answer again. "
)


class VanillaLLMPlayer:
    def __init__(self, backend: ChatBackend, retries: int, fallback_seed: int):
        self.backend = backend
        self.retries = retries
        self.fallback_rng = Rng(fallback_seed)

    def choose(self, state: GameState, obs: Observation) -> Move:
        messages = [{"role": "user", "content": render_prompt(obs)}]
        invalid = 0
        for attempt in range(self.retries + 1):
            try:
                text = self.backend.complete(messages)
            except BackendError:
                break
            messages.append({"role": "assistant", "content": text})
            reply = parse_reply(text, list(obs.candidates))
            if reply.valid:
                return Move(
                    decision=obs.candidates[reply.action_index],
                    transcript=messages,
                    stage_actions=[reply.action_index],
                    invalid_replies=invalid,
                )
            invalid += 1
            if attempt < self.retries:
                messages.append({"role": "user", "content": RETRY_SUFFIX})
        choice = self.fallback_rng.below(len(obs.candidates))
        return Move(
            decision=obs.candidates[choice],
            transcript=messages,
            stage_actions=[None],
            fallback=True,
            invalid_replies=invalid,
        )


class ReflectPlayer:
    """Conversational pipeline: decide, reflect on history, reflect on strategy."""

    def __init__(
        self,
        backend: ChatBackend,
        fallback_seed: int,
        strategies: tuple[str, ...] = DEFAULT_STRATEGIES,
        history_stage: bool = True,
        strategy_stage: bool = True,
    ):
        self.backend = backend
        self.fallback_rng = Rng(fallback_seed)
        self.strategies = strategies
        self.history_stage = history_stage
        self.strategy_stage = strategy_stage

    def stage_prompts(self, obs: Observation) -> list[str]:
        prompts = [render_prompt(obs)]
        if self.history_stage:
            prompts.append(history_reflection_prompt(history_summary(obs)))
        if self.strategy_stage:
            prompts.append(strategy_reflection_prompt(self.strategies))
        return prompts

    def choose(self, state: GameState, obs: Observation) -> Move:
        messages: list[dict] = []
        stage_actions: list[int | None] = []
        current: int | None = None
        invalid = 0
        for prompt in self.stage_prompts(obs):
            messages.append({"role": "user", "content": prompt})
            try:
                text = self.backend.complete(messages)
            except BackendError:
                stage_actions.append(None)
                invalid += 1
                continue
            messages.append({"role": "assistant", "content": text})
            reply = parse_reply(text, list(obs.candidates))
            stage_actions.append(reply.action_index)
            if reply.valid:
                current = reply.action_index
            else:
                invalid += 1
        if current is None:
            current = self.fallback_rng.below(len(obs.candidates))
            return Move(
                decision=obs.candidates[current],
                transcript=messages,
                stage_actions=stage_actions,
                fallback=True,
                invalid_replies=invalid,
            )
        return Move(
            decision=obs.candidates[current],
            transcript=messages,
            stage_actions=stage_actions,
            invalid_replies=invalid,
        )


def build_llm_player(binding: PlayerBinding, stream_seed: int):
    backend = build_backend(binding.backend)
    fallback_seed = derive(stream_seed, STREAM_FALLBACK)
    if binding.kind == "llm":
        return VanillaLLMPlayer(backend, retries=binding.retries, fallback_seed=fallback_seed)
    strategies = binding.strategies if binding.strategies is not None else DEFAULT_STRATEGIES
    return ReflectPlayer(
        backend,
        fallback_seed=fallback_seed,
        strategies=tuple(strategies),
        history_stage=binding.history_stage,
        strategy_stage=binding.strategy_stage,
    )
