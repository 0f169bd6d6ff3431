"""UNO cards: the 108-card deck, a compact type encoding, and log names.

Card *types* (54 of them) collapse identical physical cards: four colors
times (ten digits + Skip/Reverse/DrawTwo) plus the two wild kinds.  The
type id doubles as the canonical ordering used everywhere candidates or
hands need a deterministic order:

    id = color * 13 + rank   (rank 0-9 digits, 10 Skip, 11 Reverse, 12 DrawTwo)
    id = 52 Wild, 53 WildDrawFour

Log names are short and unambiguous: "R5", "GSkip", "YRev", "BD2", "W",
"WD4".
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum


class Color(IntEnum):
    RED = 0
    YELLOW = 1
    GREEN = 2
    BLUE = 3


class Kind(IntEnum):
    NUMBER = 0
    SKIP = 1
    REVERSE = 2
    DRAW_TWO = 3
    WILD = 4
    WILD_DRAW_FOUR = 5


COLOR_LETTERS = "RYGB"
COLOR_NAMES = ("Red", "Yellow", "Green", "Blue")

N_TYPES = 54
WILD_TYPE = 52
WD4_TYPE = 53

_FUNC_RANKS = {Kind.SKIP: 10, Kind.REVERSE: 11, Kind.DRAW_TWO: 12}
_RANK_KINDS = {10: Kind.SKIP, 11: Kind.REVERSE, 12: Kind.DRAW_TWO}
_FUNC_SUFFIX = {Kind.SKIP: "Skip", Kind.REVERSE: "Rev", Kind.DRAW_TWO: "D2"}


@dataclass(frozen=True, order=True)
class Card:
    """One card value.  Wild kinds carry no color; numbers carry a digit."""

    # Field order makes dataclass ordering match the canonical type order
    # within each kind group; type_id() is the authoritative sort key.
    kind: Kind
    color: Color | None = None
    digit: int | None = None

    def __post_init__(self):
        if self.kind in (Kind.WILD, Kind.WILD_DRAW_FOUR):
            if self.color is not None or self.digit is not None:
                raise ValueError("wild cards carry no color or digit")
        elif self.color is None:
            raise ValueError(f"{self.kind.name} card needs a color")
        elif self.kind is Kind.NUMBER:
            if self.digit is None or not 0 <= self.digit <= 9:
                raise ValueError("number card needs digit 0-9")
        elif self.digit is not None:
            raise ValueError("function cards carry no digit")

    @property
    def is_wild(self) -> bool:
        return self.kind in (Kind.WILD, Kind.WILD_DRAW_FOUR)

    def __str__(self) -> str:
        return card_name(self)

    def __repr__(self) -> str:
        return f"Card({card_name(self)!r})"


def type_id(card: Card) -> int:
    """Canonical 0-53 id of a card value."""
    if card.kind is Kind.WILD:
        return WILD_TYPE
    if card.kind is Kind.WILD_DRAW_FOUR:
        return WD4_TYPE
    rank = card.digit if card.kind is Kind.NUMBER else _FUNC_RANKS[card.kind]
    return card.color * 13 + rank


def from_type_id(tid: int) -> Card:
    if tid == WILD_TYPE:
        return Card(Kind.WILD)
    if tid == WD4_TYPE:
        return Card(Kind.WILD_DRAW_FOUR)
    if not 0 <= tid < 52:
        raise ValueError(f"bad card type id {tid}")
    color = Color(tid // 13)
    rank = tid % 13
    if rank <= 9:
        return Card(Kind.NUMBER, color, rank)
    return Card(_RANK_KINDS[rank], color)


def card_name(card: Card) -> str:
    if card.kind is Kind.WILD:
        return "W"
    if card.kind is Kind.WILD_DRAW_FOUR:
        return "WD4"
    letter = COLOR_LETTERS[card.color]
    if card.kind is Kind.NUMBER:
        return f"{letter}{card.digit}"
    return f"{letter}{_FUNC_SUFFIX[card.kind]}"


def parse_card(name: str) -> Card:
    if name == "W":
        return Card(Kind.WILD)
    if name == "WD4":
        return Card(Kind.WILD_DRAW_FOUR)
    if len(name) >= 2 and name[0] in COLOR_LETTERS:
        color = Color(COLOR_LETTERS.index(name[0]))
        rest = name[1:]
        if rest.isdigit() and len(rest) == 1:
            return Card(Kind.NUMBER, color, int(rest))
        for kind, suffix in _FUNC_SUFFIX.items():
            if rest == suffix:
                return Card(kind, color)
    raise ValueError(f"unrecognized card name {name!r}")


def new_deck() -> list[Card]:
    """The canonical 108-card deck.

    Order: for each color R, Y, G, B: one 0, two each of 1-9, then
    Skip x2, Reverse x2, DrawTwo x2; finally Wild x4 and WildDrawFour x4.
    """
    deck: list[Card] = []
    for color in Color:
        deck.append(Card(Kind.NUMBER, color, 0))
        for digit in range(1, 10):
            deck.append(Card(Kind.NUMBER, color, digit))
            deck.append(Card(Kind.NUMBER, color, digit))
        for kind in (Kind.SKIP, Kind.REVERSE, Kind.DRAW_TWO):
            deck.append(Card(kind, color))
            deck.append(Card(kind, color))
    deck.extend(Card(Kind.WILD) for _ in range(4))
    deck.extend(Card(Kind.WILD_DRAW_FOUR) for _ in range(4))
    return deck


DECK_SIZE = 108
