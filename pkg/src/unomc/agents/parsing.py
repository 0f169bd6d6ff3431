"""Tolerant extraction of {action, reasoning} replies from LLM text."""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..engine import Decision, decision_token


@dataclass(frozen=True)
class AgentReply:
    action_index: int | None
    reasoning: str
    raw: str
    valid: bool


def _first_json_object(text: str) -> dict | None:
    """The first parseable {...} in the text, fences and prose tolerated."""
    depth = 0
    start = None
    in_string = False
    escape = False
    for i, ch in enumerate(text):
        if in_string:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}" and depth > 0:
            depth -= 1
            if depth == 0:
                try:
                    obj = json.loads(text[start : i + 1])
                except json.JSONDecodeError:
                    start = None
                    continue
                if isinstance(obj, dict):
                    return obj
                start = None
    return None


def _resolve_action(value, candidates: list[Decision]) -> int | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return value if 0 <= value < len(candidates) else None
    if isinstance(value, str):
        text = value.strip()
        if text.lstrip("-").isdigit():
            idx = int(text)
            return idx if 0 <= idx < len(candidates) else None
        lowered = text.lower()
        for i, d in enumerate(candidates):
            if decision_token(d).lower() == lowered:
                return i
    return None


def parse_reply(text: str, candidates: list[Decision]) -> AgentReply:
    """Never raises: malformed or out-of-range replies come back invalid.

    The action is accepted as a candidate index or as the exact decision
    token (case-insensitive), e.g. "R5", "Draw", "Blue", "Challenge".
    """
    obj = _first_json_object(text or "")
    if obj is None or "action" not in obj:
        return AgentReply(action_index=None, reasoning="", raw=text, valid=False)
    reasoning = obj.get("reasoning")
    reasoning = reasoning if isinstance(reasoning, str) else ""
    idx = _resolve_action(obj["action"], candidates)
    return AgentReply(action_index=idx, reasoning=reasoning, raw=text, valid=idx is not None)
