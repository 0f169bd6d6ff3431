"""Prompt rendering for the three decision kinds, plus history statistics.

Prompts are pure functions of the observation: identical observations
render byte-identical text.  Every prompt carries the rules digest, the
public state, the indexed candidate list, and the JSON output contract.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..cards import Color, Kind, card_name, new_deck
from ..engine import Phase, decision_token
from ..players import Observation

RULES_DIGEST = """\
Game rules in brief: each turn you either play one card that matches the \
active color, or the top card's number or symbol, or play a wild card; \
if you cannot play you draw one card and your turn ends. Skip makes the \
next player miss a turn; Reverse flips the play direction; Draw Two makes \
the next player draw two and miss a turn. Wild lets you pick the next \
color. Wild Draw Four picks the color and makes the next player draw four \
unless they win a challenge: a Wild Draw Four was illegal if its player \
still held a colored card matching the active color, and a caught player \
draws four instead; a failed challenge costs six. First player with no \
cards left wins; if the draw pile runs out, the smallest hand wins."""

OUTPUT_CONTRACT = """\
Respond with a JSON object containing the fields "action" and "reasoning", \
for example {"action": 0, "reasoning": "why"}. "action" must be the index \
of your chosen option."""

DEFAULT_STRATEGIES = (
    "Hold wild cards as long as you can; they are playable in any situation.",
    "Prefer a play that keeps several colors in your hand, so you stay flexible.",
    "Spend Skip and Draw Two when the next player is close to emptying their hand.",
)

_PHASE_TASK = {
    Phase.SELECT_CARD: "Choose which card to play, or draw.",
    Phase.SELECT_COLOR: "You played a wild card. Choose the next color to match.",
    Phase.SELECT_CHALLENGE: "Decide whether to challenge the Wild Draw Four just played against you.",
}

_DIRECTION_NAMES = {1: "clockwise", -1: "counterclockwise"}


@dataclass(frozen=True)
class HistorySummary:
    """Counts over the cards players have discarded, all public.

    The setup flip sits on the pile but was not played by anyone; it is
    excluded from the play counts yet still visible, so it does count
    against the unseen pool.
    """

    played_total: int
    played_by_color: dict[Color, int]
    played_wild: int
    played_by_kind: dict[Kind, int]
    played_by_seat: tuple[int, ...]
    unseen_total: int
    unseen_by_color: dict[Color, int]
    unseen_wild: int


def history_summary(obs: Observation) -> HistorySummary:
    played = [(actor, card) for actor, card in obs.history if actor is not None]
    by_color = {c: 0 for c in Color}
    by_kind = {k: 0 for k in Kind}
    by_seat = [0] * obs.n_seats
    wild = 0
    for actor, card in played:
        by_kind[card.kind] += 1
        by_seat[actor] += 1
        if card.is_wild:
            wild += 1
        else:
            by_color[card.color] += 1

    unseen = {c: 0 for c in Color}
    unseen_wild = 0
    seen = [card for _, card in obs.history] + list(obs.my_hand)
    pool = new_deck()
    for card in seen:
        pool.remove(card)
    for card in pool:
        if card.is_wild:
            unseen_wild += 1
        else:
            unseen[card.color] += 1

    return HistorySummary(
        played_total=len(played),
        played_by_color=by_color,
        played_wild=wild,
        played_by_kind=by_kind,
        played_by_seat=tuple(by_seat),
        unseen_total=len(pool),
        unseen_by_color=unseen,
        unseen_wild=unseen_wild,
    )


def _candidate_block(obs: Observation) -> str:
    lines = [f"  [{i}] {decision_token(d)}" for i, d in enumerate(obs.candidates)]
    return "Your options:\n" + "\n".join(lines)


def _history_line(obs: Observation) -> str:
    if not obs.history:
        return "none"
    parts = []
    for actor, card in obs.history:
        who = "flip" if actor is None else f"P{actor}"
        parts.append(f"{who}:{card_name(card)}")
    return " ".join(parts)


def render_prompt(obs: Observation) -> str:
    """The opening prompt for any decision kind."""
    counts = " ".join(
        f"P{s}={n}" for s, n in enumerate(obs.hand_counts)
    )
    state_block = "\n".join([
        f"You are player P{obs.my_seat} in a {obs.n_seats}-player UNO game.",
        f"Top of discard: {card_name(obs.top_card)}; active color: {obs.active_color.name.title()}.",
        f"Play direction: {_DIRECTION_NAMES[obs.direction]}.",
        f"Cards per hand: {counts}; draw pile: {obs.draw_pile_size} cards.",
        f"Your hand: {' '.join(card_name(c) for c in obs.my_hand)}.",
        f"Cards played so far: {_history_line(obs)}.",
    ])
    if obs.wd4_offender is not None:
        state_block += f"\nPlayer P{obs.wd4_offender} just played the Wild Draw Four."
    return "\n\n".join([
        RULES_DIGEST,
        state_block,
        _PHASE_TASK[obs.phase],
        _candidate_block(obs),
        OUTPUT_CONTRACT,
    ])


def _format_summary(summary: HistorySummary) -> str:
    colors = ", ".join(
        f"{c.name.title()}: {summary.played_by_color[c]}" for c in Color
    )
    kinds = ", ".join(
        f"{k.name.replace('_', ' ').title()}: {summary.played_by_kind[k]}" for k in Kind
    )
    seats = ", ".join(f"P{s}: {n}" for s, n in enumerate(summary.played_by_seat))
    unseen = ", ".join(
        f"{c.name.title()}: {summary.unseen_by_color[c]}" for c in Color
    )
    return "\n".join([
        f"Cards played by color ({summary.played_total} total, wilds: {summary.played_wild}): {colors}.",
        f"Cards played by kind: {kinds}.",
        f"Cards played per player: {seats}.",
        f"Unseen cards ({summary.unseen_total} in opponents' hands or the pile, wilds: {summary.unseen_wild}): {unseen}.",
    ])


def history_reflection_prompt(summary: HistorySummary) -> str:
    return "\n\n".join([
        "Here are statistics of the game so far:",
        _format_summary(summary),
        "Reconsider the option you just picked in light of these numbers "
        "(for example, a color that has been played a lot is less likely to "
        "come back at you). You may keep your choice or change it.",
        OUTPUT_CONTRACT,
    ])


def strategy_reflection_prompt(strategies: tuple[str, ...]) -> str:
    numbered = "\n".join(f"  {i + 1}. {s}" for i, s in enumerate(strategies))
    return "\n\n".join([
        "Here are proven strategies for this game:",
        numbered,
        "Reconsider the option you just picked against these strategies. "
        "You may keep your choice or change it; this is your final answer.",
        OUTPUT_CONTRACT,
    ])
