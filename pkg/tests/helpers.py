"""Shared test fixtures: state builders and independent oracles.

`exact_win_probability` enumerates every equiprobable decision sequence
with Fractions; it shares only the transition function with the code it
checks, never the sampling path.  `reference_rollout` replays the uniform
random policy through the public engine API so kernel results can be
compared draw for draw.
"""

from __future__ import annotations

from fractions import Fraction

from unomc.cards import Card, Color, new_deck, parse_card
from unomc.engine import (
    ChallengeContext,
    GameState,
    Phase,
    apply,
    is_terminal,
    legal_decisions,
    parse_hand,
    winners,
)
from unomc.rng import Rng

COLORS = {"R": Color.RED, "Y": Color.YELLOW, "G": Color.GREEN, "B": Color.BLUE}


def make_state(
    hands: list[str],
    pile: str = "",
    top: str = "R5",
    active: str | None = None,
    phase: Phase = Phase.SELECT_CARD,
    current: int = 0,
    direction: int = 1,
    offender: int | None = None,
    illegal: bool = False,
    discard: str | None = None,
) -> GameState:
    """Small hand-built position; conservation is deliberately not enforced."""
    top_card = parse_card(top)
    if active is None:
        if top_card.is_wild:
            raise ValueError("wild top card needs an explicit active color")
        active_color = top_card.color
    else:
        active_color = COLORS[active]
    discard_cards = tuple(parse_card(t) for t in discard.split()) if discard else (top_card,)
    ctx = ChallengeContext(offender, illegal) if offender is not None else None
    return GameState(
        n_seats=len(hands),
        hands=tuple(parse_hand(h) for h in hands),
        draw_pile=tuple(parse_card(t) for t in pile.split()),
        discard_pile=discard_cards,
        discard_actors=(None,) * len(discard_cards),
        current_seat=current,
        direction=direction,
        active_color=active_color,
        phase=phase,
        challenge=ctx,
        turn_index=0,
    )


def exact_win_probability(state: GameState, seat: int) -> Fraction:
    """Exact win probability under uniform random play, by full enumeration."""
    memo: dict[GameState, Fraction] = {}

    def go(s: GameState) -> Fraction:
        if is_terminal(s):
            return Fraction(1 if seat in winners(s) else 0)
        cached = memo.get(s)
        if cached is not None:
            return cached
        cands = legal_decisions(s)
        total = Fraction(0)
        for d in cands:
            total += go(apply(s, d))
        result = total / len(cands)
        memo[s] = result
        return result

    return go(state)


def reference_rollout(state: GameState, seed: int) -> frozenset[int]:
    """Uniform random playout via the public engine API (no kernel)."""
    rng = Rng(seed)
    while not is_terminal(state):
        cands = legal_decisions(state)
        state = apply(state, cands[rng.below(len(cands))])
    return winners(state)


def deck_with_prefix(prefix: str) -> list[Card]:
    """A full deck whose first cards are `prefix` (names, space separated)."""
    wanted = [parse_card(t) for t in prefix.split()]
    rest = new_deck()
    for card in wanted:
        rest.remove(card)
    return wanted + rest


def random_midgame_states(
    n_states: int, seed: int, seats: int = 2, max_steps: int = 40
) -> list[GameState]:
    """Positions sampled from random play, for parity and property tests."""
    from unomc.engine import setup_game, shuffle_deck

    rng = Rng(seed)
    states = []
    game_idx = 0
    while len(states) < n_states:
        deck = shuffle_deck(new_deck(), rng.next_u64())
        state = setup_game(deck, seats)
        steps = rng.below(max_steps)
        ok = True
        for _ in range(steps):
            if is_terminal(state):
                ok = False
                break
            cands = legal_decisions(state)
            state = apply(state, cands[rng.below(len(cands))])
        if ok and not is_terminal(state):
            states.append(state)
        game_idx += 1
        if game_idx > 20 * n_states:
            raise RuntimeError("state sampling is stuck")
    return states
