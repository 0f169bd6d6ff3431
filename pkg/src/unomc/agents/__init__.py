"""LLM-backed players: chat backends, prompt rendering, reply parsing."""

from .backend import BackendError, ChatBackend, HttpChatBackend, ScriptedBackend, build_backend
from .llm_player import ReflectPlayer, VanillaLLMPlayer, build_llm_player
from .parsing import AgentReply, parse_reply
from .prompts import (
    DEFAULT_STRATEGIES,
    HistorySummary,
    history_reflection_prompt,
    history_summary,
    render_prompt,
    strategy_reflection_prompt,
)

__all__ = [
    "AgentReply",
    "BackendError",
    "ChatBackend",
    "DEFAULT_STRATEGIES",
    "HistorySummary",
    "HttpChatBackend",
    "ReflectPlayer",
    "ScriptedBackend",
    "VanillaLLMPlayer",
    "build_backend",
    "build_llm_player",
    "history_reflection_prompt",
    "history_summary",
    "parse_reply",
    "render_prompt",
    "strategy_reflection_prompt",
]
