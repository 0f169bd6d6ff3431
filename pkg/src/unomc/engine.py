"""Rules engine: deterministic, pure state transitions for modified UNO.

The variant implemented here:

* 108-card deck, 7-card deal, first number card flipped starts the discard.
* A turn is exactly one decision.  When a play exists, drawing is not
  offered; when no play exists, the player draws one card and the turn
  ends (the drawn card is never played in the same turn).
* Skip / Reverse / DrawTwo as printed; Reverse acts as Skip with 2 seats.
* Wild and WildDrawFour trigger a color declaration by the same player.
  A WD4 additionally sends the next player into a challenge decision:
  challenging an illegal WD4 costs the offender 4 cards and the challenger
  keeps a normal turn; challenging a legal one costs the challenger 6 and
  their turn; declining costs the challenger 4 and their turn.  The WD4
  and its declared color stand in every branch.
* No UNO call, no stacking, no discard reshuffle.  The game ends the
  moment a hand empties or the draw pile runs out (penalty draws truncate
  there); on exhaustion every smallest hand wins.

A play that empties the actor's hand ends the game immediately: pending
color declarations, penalties, and direction flips are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum

from .cards import (
    Card,
    Color,
    DECK_SIZE,
    Kind,
    card_name,
    parse_card,
    type_id,
)
from .rng import Rng


class RuleError(Exception):
    """Illegal use of the engine API."""


class IllegalDecision(RuleError):
    """Decision not legal in the given state."""


class Phase(IntEnum):
    SELECT_CARD = 0
    SELECT_COLOR = 1
    SELECT_CHALLENGE = 2


@dataclass(frozen=True)
class PlayCard:
    card: Card


@dataclass(frozen=True)
class DrawCard:
    pass


@dataclass(frozen=True)
class ChooseColor:
    color: Color


@dataclass(frozen=True)
class Challenge:
    flag: bool


Decision = PlayCard | DrawCard | ChooseColor | Challenge


def decision_token(decision: Decision) -> str:
    """Stable text token for logs and LLM prompts."""
    if isinstance(decision, PlayCard):
        return card_name(decision.card)
    if isinstance(decision, DrawCard):
        return "Draw"
    if isinstance(decision, ChooseColor):
        return ("Red", "Yellow", "Green", "Blue")[decision.color]
    return "Challenge" if decision.flag else "NoChallenge"


def parse_decision(token: str) -> Decision:
    if token == "Draw":
        return DrawCard()
    if token == "Challenge":
        return Challenge(True)
    if token == "NoChallenge":
        return Challenge(False)
    colors = {"Red": Color.RED, "Yellow": Color.YELLOW, "Green": Color.GREEN, "Blue": Color.BLUE}
    if token in colors:
        return ChooseColor(colors[token])
    return PlayCard(parse_card(token))


@dataclass(frozen=True)
class ChallengeContext:
    """Set when a WD4 is played; lives until the challenge resolves."""

    offender: int
    illegal: bool


@dataclass(frozen=True)
class GameState:
    """Full omniscient position.  Treat as immutable; apply() returns successors.

    draw_pile[0] is the next card drawn; discard_pile[-1] is the top card.
    discard_actors parallels discard_pile (None for the setup flip).
    """

    n_seats: int
    hands: tuple[tuple[Card, ...], ...]
    draw_pile: tuple[Card, ...]
    discard_pile: tuple[Card, ...]
    discard_actors: tuple[int | None, ...]
    current_seat: int
    direction: int  # +1 clockwise, -1 counterclockwise
    active_color: Color
    phase: Phase
    challenge: ChallengeContext | None
    turn_index: int

    @property
    def top_card(self) -> Card:
        return self.discard_pile[-1]

    def hand_sizes(self) -> tuple[int, ...]:
        return tuple(len(h) for h in self.hands)

    def next_seat(self, seat: int) -> int:
        return (seat + self.direction) % self.n_seats


def shuffle_deck(deck: list[Card], seed: int) -> list[Card]:
    """Seeded permutation of a full deck."""
    if len(deck) != DECK_SIZE:
        raise ValueError(f"deck must have {DECK_SIZE} cards, got {len(deck)}")
    shuffled = list(deck)
    Rng(seed).shuffle(shuffled)
    return shuffled


def _sorted_hand(cards: list[Card]) -> tuple[Card, ...]:
    return tuple(sorted(cards, key=type_id))


def setup_game(deck: list[Card], seats: int) -> GameState:
    """Deal 7 cards round-robin from seat 0, then flip until a number card.

    Non-number flips go to the bottom of the draw pile in flip order; the
    first number card becomes the discard top and sets the active color.
    """
    if not 2 <= seats <= 10:
        raise ValueError(f"seats must be 2-10, got {seats}")
    if len(deck) != DECK_SIZE:
        raise ValueError(f"deck must have {DECK_SIZE} cards, got {len(deck)}")

    hands: list[list[Card]] = [[] for _ in range(seats)]
    pos = 0
    for _ in range(7):
        for seat in range(seats):
            hands[seat].append(deck[pos])
            pos += 1

    pile = list(deck[pos:])
    rejected: list[Card] = []
    while pile[0].kind is not Kind.NUMBER:
        rejected.append(pile.pop(0))
    first = pile.pop(0)
    pile.extend(rejected)

    return GameState(
        n_seats=seats,
        hands=tuple(_sorted_hand(h) for h in hands),
        draw_pile=tuple(pile),
        discard_pile=(first,),
        discard_actors=(None,),
        current_seat=0,
        direction=1,
        active_color=first.color,
        phase=Phase.SELECT_CARD,
        challenge=None,
        turn_index=0,
    )


def is_terminal(state: GameState) -> bool:
    return not state.draw_pile or any(not h for h in state.hands)


def winners(state: GameState) -> frozenset[int]:
    """Winner set of a terminal state: the emptied hand, or every smallest one."""
    if not is_terminal(state):
        raise RuleError("winners() on a non-terminal state")
    sizes = state.hand_sizes()
    for seat, size in enumerate(sizes):
        if size == 0:
            return frozenset({seat})
    smallest = min(sizes)
    return frozenset(seat for seat, size in enumerate(sizes) if size == smallest)


def _playable(card: Card, top: Card, active: Color) -> bool:
    if card.is_wild:
        return True
    if card.color == active:
        return True
    if card.kind is Kind.NUMBER:
        return top.kind is Kind.NUMBER and card.digit == top.digit
    return card.kind is top.kind


def legal_decisions(state: GameState) -> list[Decision]:
    """Ordered candidates for the acting seat.

    SELECT_CARD: distinct playable cards in canonical card order, or the
    lone DrawCard when nothing plays (drawing is never offered alongside a
    play).  SELECT_COLOR: the four colors R, Y, G, B.  SELECT_CHALLENGE:
    challenge then decline.
    """
    if is_terminal(state):
        raise RuleError("legal_decisions() on a terminal state")
    if state.phase is Phase.SELECT_COLOR:
        return [ChooseColor(c) for c in Color]
    if state.phase is Phase.SELECT_CHALLENGE:
        return [Challenge(True), Challenge(False)]

    hand = state.hands[state.current_seat]
    top = state.top_card
    seen: set[int] = set()
    plays: list[tuple[int, Decision]] = []
    for card in hand:
        tid = type_id(card)
        if tid in seen:
            continue
        seen.add(tid)
        if _playable(card, top, state.active_color):
            plays.append((tid, PlayCard(card)))
    if plays:
        plays.sort(key=lambda pair: pair[0])
        return [d for _, d in plays]
    return [DrawCard()]


def wd4_was_illegal(state: GameState, seat: int) -> bool:
    """Whether a WD4 played by `seat` from `state` would be illegal.

    Judged at play time against the pre-play active color: illegal iff the
    hand minus one WD4 still holds a non-wild card of that color.
    """
    removed = False
    for card in state.hands[seat]:
        if not removed and card.kind is Kind.WILD_DRAW_FOUR:
            removed = True
            continue
        if not card.is_wild and card.color == state.active_color:
            return True
    return False


def _remove_one(hand: tuple[Card, ...], card: Card) -> tuple[Card, ...]:
    out = list(hand)
    out.remove(card)
    return tuple(out)


def _draw(
    hands: list[tuple[Card, ...]], pile: list[Card], seat: int, count: int
) -> None:
    """Move up to `count` cards from the pile top into a hand; truncates dry."""
    taken = list(hands[seat])
    for _ in range(count):
        if not pile:
            break
        taken.append(pile.pop(0))
    hands[seat] = _sorted_hand(taken)


def apply(state: GameState, decision: Decision) -> GameState:
    """The transfer function: successor of (state, decision).

    Raises IllegalDecision unless `decision` is one of legal_decisions(state).
    """
    if is_terminal(state):
        raise IllegalDecision("apply() on a terminal state")
    if decision not in legal_decisions(state):
        raise IllegalDecision(
            f"{decision_token(decision)} not legal in phase {state.phase.name}"
        )

    seat = state.current_seat
    hands = list(state.hands)
    pile = list(state.draw_pile)
    turn = state.turn_index + 1

    if isinstance(decision, PlayCard):
        card = decision.card
        illegal_wd4 = (
            card.kind is Kind.WILD_DRAW_FOUR and wd4_was_illegal(state, seat)
        )
        hands[seat] = _remove_one(hands[seat], card)
        discard = state.discard_pile + (card,)
        actors = state.discard_actors + (seat,)

        if not hands[seat]:
            # Hand emptied: the game is over; the card's effect never fires.
            color = state.active_color if card.is_wild else card.color
            return replace(
                state,
                hands=tuple(hands),
                discard_pile=discard,
                discard_actors=actors,
                active_color=color,
                challenge=None,
                turn_index=turn,
            )

        if card.kind is Kind.WILD:
            return replace(
                state,
                hands=tuple(hands),
                discard_pile=discard,
                discard_actors=actors,
                phase=Phase.SELECT_COLOR,
                challenge=None,
                turn_index=turn,
            )
        if card.kind is Kind.WILD_DRAW_FOUR:
            return replace(
                state,
                hands=tuple(hands),
                discard_pile=discard,
                discard_actors=actors,
                phase=Phase.SELECT_COLOR,
                challenge=ChallengeContext(offender=seat, illegal=illegal_wd4),
                turn_index=turn,
            )

        direction = state.direction
        if card.kind is Kind.REVERSE:
            direction = -direction
        nxt = (seat + direction) % state.n_seats
        if card.kind is Kind.SKIP:
            current = (nxt + direction) % state.n_seats
        elif card.kind is Kind.REVERSE and state.n_seats == 2:
            current = (nxt + direction) % state.n_seats  # acts as Skip
        elif card.kind is Kind.DRAW_TWO:
            _draw(hands, pile, nxt, 2)
            current = (nxt + direction) % state.n_seats
        else:
            current = nxt
        return replace(
            state,
            hands=tuple(hands),
            draw_pile=tuple(pile),
            discard_pile=discard,
            discard_actors=actors,
            current_seat=current,
            direction=direction,
            active_color=card.color,
            turn_index=turn,
        )

    if isinstance(decision, DrawCard):
        _draw(hands, pile, seat, 1)
        return replace(
            state,
            hands=tuple(hands),
            draw_pile=tuple(pile),
            current_seat=state.next_seat(seat),
            turn_index=turn,
        )

    if isinstance(decision, ChooseColor):
        if state.challenge is None:
            # Plain Wild: play proceeds to the next seat.
            return replace(
                state,
                active_color=decision.color,
                phase=Phase.SELECT_CARD,
                current_seat=state.next_seat(seat),
                turn_index=turn,
            )
        # WD4: the next seat must first settle the challenge.
        return replace(
            state,
            active_color=decision.color,
            phase=Phase.SELECT_CHALLENGE,
            current_seat=state.next_seat(seat),
            turn_index=turn,
        )

    assert isinstance(decision, Challenge)
    ctx = state.challenge
    assert ctx is not None
    if decision.flag and ctx.illegal:
        # Offender caught: draws 4, challenger takes an ordinary turn.
        _draw(hands, pile, ctx.offender, 4)
        current = seat
    elif decision.flag:
        # Failed challenge: challenger draws 6 and misses the round.
        _draw(hands, pile, seat, 6)
        current = state.next_seat(seat)
    else:
        # Unchallenged WD4: challenger draws 4 and misses the round.
        _draw(hands, pile, seat, 4)
        current = state.next_seat(seat)
    return replace(
        state,
        hands=tuple(hands),
        draw_pile=tuple(pile),
        phase=Phase.SELECT_CARD,
        current_seat=current,
        challenge=None,
        turn_index=turn,
    )


def parse_hand(text: str) -> tuple[Card, ...]:
    """Space-separated card names -> sorted hand; convenience for tests/CLI."""
    return _sorted_hand([parse_card(tok) for tok in text.split()])
