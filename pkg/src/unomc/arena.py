"""Experiment orchestration: seeded decks, game execution, JSONL logs,
byte-exact replay, and the bundled tournament presets.

Every run is a pure function of (config, master seed, backend scripts).
Per-deck and per-game seeds derive from the master seed by index, so games
can execute in any order or in parallel and still produce identical logs.

Log format: JSONL, one event object per line, header first.  Event kinds:
header, deal, flip, decision_point, action, penalty, challenge_result,
game_end.  Action events carry a digest of the post-decision state;
`replay` re-simulates the header and actions through the engine and
verifies every digest and the final winner set.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from . import metrics as metrics_mod
from .cards import Card, Kind, card_name, new_deck, parse_card
from .engine import (
    Challenge,
    GameState,
    PlayCard,
    apply,
    decision_token,
    is_terminal,
    parse_decision,
    setup_game,
    shuffle_deck,
    winners,
)
from .oracle import evaluate_candidates
from .players import PlayerBinding, BackendConfig, build_player, observe
from .rng import Rng, derive

STREAM_DECK = 10
STREAM_GAME = 11
STREAM_VIOLATION = 12
STREAM_ORACLE = 2  # matches players.STREAM_ORACLE

LOG_VERSION = 1


# --- configuration -----------------------------------------------------------

@dataclass(frozen=True)
class ArenaConfig:
    seats: tuple[PlayerBinding, ...]
    decks: int
    master_seed: int
    n_sims: int = 1000
    p: float = 0.15
    crn: bool = False
    instrument: tuple[int, ...] = ()
    jobs: int = 1
    out: str | None = None

    def validate(self) -> "ArenaConfig":
        if not 2 <= len(self.seats) <= 10:
            raise ValueError(f"need 2-10 seats, got {len(self.seats)}")
        if self.decks < 1:
            raise ValueError("deck count must be >= 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"threshold p must be in [0,1], got {self.p}")
        if self.n_sims < 1:
            raise ValueError("n_sims must be >= 1")
        labels = [b.label for b in self.seats]
        if len(set(labels)) != len(labels):
            raise ValueError(f"seat labels must be distinct, got {labels}")
        for seat in self.instrument:
            if not 0 <= seat < len(self.seats):
                raise ValueError(f"instrumented seat {seat} out of range")
        return self

    def digest(self) -> str:
        payload = {
            "seats": [_binding_to_dict(b) for b in self.seats],
            "decks": self.decks,
            "seed": self.master_seed,
            "n_sims": self.n_sims,
            "p": self.p,
            "crn": self.crn,
            "instrument": sorted(self.instrument),
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _backend_to_dict(cfg: BackendConfig | None):
    if cfg is None:
        return None
    out = {"kind": cfg.kind}
    if cfg.kind == "http":
        out.update({
            "url": cfg.url, "model": cfg.model, "api_key_env": cfg.api_key_env,
            "timeout": cfg.timeout, "transport_retries": cfg.transport_retries,
            "params": dict(cfg.params),
        })
    else:
        out.update({
            "script": list(cfg.script), "script_default": cfg.script_default,
            "script_path": cfg.script_path,
        })
    return out


def _backend_from_dict(data) -> BackendConfig | None:
    if data is None:
        return None
    if data["kind"] == "http":
        return BackendConfig(
            kind="http",
            url=data.get("url"),
            model=data.get("model"),
            api_key_env=data.get("api_key_env"),
            timeout=data.get("timeout", 60.0),
            transport_retries=data.get("transport_retries", 2),
            params=tuple(sorted((data.get("params") or {}).items())),
        )
    return BackendConfig(
        kind="scripted",
        script=tuple(data.get("script") or ()),
        script_default=data.get("script_default"),
        script_path=data.get("script_path"),
    )


def _binding_to_dict(b: PlayerBinding) -> dict:
    return {
        "kind": b.kind,
        "label": b.label,
        "seed": b.seed,
        "n_sims": b.n_sims,
        "crn": b.crn,
        "backend": _backend_to_dict(b.backend),
        "strategies": list(b.strategies) if b.strategies is not None else None,
        "history_stage": b.history_stage,
        "strategy_stage": b.strategy_stage,
        "retries": b.retries,
    }


def _binding_from_dict(data: dict) -> PlayerBinding:
    return PlayerBinding(
        kind=data["kind"],
        label=data["label"],
        seed=data.get("seed"),
        n_sims=data.get("n_sims", 1000),
        crn=data.get("crn", False),
        backend=_backend_from_dict(data.get("backend")),
        strategies=tuple(data["strategies"]) if data.get("strategies") is not None else None,
        history_stage=data.get("history_stage", True),
        strategy_stage=data.get("strategy_stage", True),
        retries=data.get("retries", 2),
    )


def config_from_dict(data: dict) -> ArenaConfig:
    seats = tuple(_binding_from_dict(s) for s in data["seats"])
    instrument = data.get("instrument", "none")
    if instrument == "all":
        instrument = tuple(range(len(seats)))
    elif instrument == "none":
        instrument = ()
    else:
        instrument = tuple(instrument)
    return ArenaConfig(
        seats=seats,
        decks=data["decks"],
        master_seed=data["seed"],
        n_sims=data.get("n_sims", 1000),
        p=data.get("p", 0.15),
        crn=data.get("crn", False),
        instrument=instrument,
        jobs=data.get("jobs", 1),
        out=data.get("out"),
    ).validate()


def load_config(path: str) -> ArenaConfig:
    with open(path, encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


# --- logs ---------------------------------------------------------------------

def _canonical(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass
class GameLog:
    header: dict
    events: list[dict]

    def lines(self) -> list[str]:
        return [_canonical(self.header)] + [_canonical(e) for e in self.events]

    def dumps(self) -> str:
        return "\n".join(self.lines()) + "\n"

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "GameLog":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty log")
        header = json.loads(lines[0])
        if header.get("event") != "header":
            raise ValueError("first log line must be the header")
        return cls(header=header, events=[json.loads(ln) for ln in lines[1:]])

    @classmethod
    def read(cls, path: str) -> "GameLog":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())

    def game_end(self) -> dict:
        for event in reversed(self.events):
            if event.get("event") == "game_end":
                return event
        raise ValueError("log has no game_end event")


def state_digest(state: GameState) -> str:
    """Order-sensitive digest of the full position."""
    ctx = state.challenge
    parts = [
        str(state.n_seats),
        "|".join(" ".join(card_name(c) for c in h) for h in state.hands),
        " ".join(card_name(c) for c in state.draw_pile),
        " ".join(card_name(c) for c in state.discard_pile),
        " ".join("-" if a is None else str(a) for a in state.discard_actors),
        str(state.current_seat),
        str(state.direction),
        str(int(state.active_color)),
        str(int(state.phase)),
        "-" if ctx is None else f"{ctx.offender},{int(ctx.illegal)}",
        str(state.turn_index),
    ]
    return hashlib.sha256("\n".join(parts).encode()).hexdigest()[:16]


# --- deck generation -------------------------------------------------------------

def deck_seed(master_seed: int, deck_index: int) -> int:
    return derive(derive(master_seed, STREAM_DECK), deck_index)


def game_seed(master_seed: int, deck_index: int) -> int:
    return derive(derive(master_seed, STREAM_GAME), deck_index)


def generate_deck(master_seed: int, deck_index: int) -> list[Card]:
    return shuffle_deck(new_deck(), deck_seed(master_seed, deck_index))


def generate_decks(n: int, master_seed: int) -> list[list[Card]]:
    """n reproducible deck permutations keyed by (master_seed, index)."""
    if n < 1:
        raise ValueError("deck count must be >= 1")
    return [generate_deck(master_seed, i) for i in range(n)]


# --- game execution ---------------------------------------------------------------

def _setup_events(deck: list[Card], state: GameState) -> list[dict]:
    n = state.n_seats
    events = [{
        "event": "deal",
        "hands": [[card_name(c) for c in hand] for hand in state.hands],
    }]
    pos = 7 * n
    while deck[pos].kind is not Kind.NUMBER:
        events.append({"event": "flip", "card": card_name(deck[pos]), "to_bottom": True})
        pos += 1
    events.append({"event": "flip", "card": card_name(deck[pos]), "to_bottom": False})
    return events


def _transition_events(state: GameState, decision) -> list[dict]:
    """Penalty / challenge bookkeeping derived from the applied transition."""
    events = []
    if isinstance(decision, PlayCard) and decision.card.kind is Kind.DRAW_TWO:
        seat = state.current_seat
        if len(state.hands[seat]) > 1:  # effect fires only when the game goes on
            victim = (seat + state.direction) % state.n_seats
            drawn = min(2, len(state.draw_pile))
            events.append({
                "event": "penalty", "seat": victim, "cards": drawn,
                "reason": "draw_two", "truncated": drawn < 2,
            })
    elif isinstance(decision, Challenge):
        ctx = state.challenge
        challenger = state.current_seat
        if decision.flag and ctx.illegal:
            penalty_seat, cards = ctx.offender, 4
        elif decision.flag:
            penalty_seat, cards = challenger, 6
        else:
            penalty_seat, cards = challenger, 4
        drawn = min(cards, len(state.draw_pile))
        events.append({
            "event": "challenge_result",
            "offender": ctx.offender,
            "challenger": challenger,
            "challenged": decision.flag,
            "wd4_illegal": ctx.illegal,
            "penalty_seat": penalty_seat,
            "penalty_cards": drawn,
            "truncated": drawn < cards,
        })
    return events


def run_game(config: ArenaConfig, deck: list[Card], deck_index: int) -> GameLog:
    """Play one fully logged game on the given deck."""
    config.validate()
    n = len(config.seats)
    gseed = game_seed(config.master_seed, deck_index)
    players = [
        build_player(binding, gseed, seat)
        for seat, binding in enumerate(config.seats)
    ]
    violation_rngs = [
        Rng(derive(derive(gseed, STREAM_VIOLATION), seat)) for seat in range(n)
    ]
    oracle_base = derive(gseed, STREAM_ORACLE)

    header = {
        "event": "header",
        "version": LOG_VERSION,
        "deck_index": deck_index,
        "deck": [card_name(c) for c in deck],
        "seats": [config.seats[s].describe() for s in range(n)],
        "n_seats": n,
        "n_sims": config.n_sims,
        "p": config.p,
        "crn": config.crn,
        "instrument": sorted(config.instrument),
        "game_seed": gseed,
        "config_digest": config.digest(),
    }

    state = setup_game(deck, n)
    events = _setup_events(deck, state)

    while not is_terminal(state):
        seat = state.current_seat
        obs = observe(state, seat)
        cands = obs.candidates
        k = len(cands)

        if k >= 2:
            point = {
                "event": "decision_point",
                "turn": state.turn_index,
                "seat": seat,
                "k": k,
                "candidates": [decision_token(d) for d in cands],
            }
            if seat in config.instrument:
                ev = evaluate_candidates(
                    state, config.p, config.n_sims,
                    derive(oracle_base, state.turn_index), crn=config.crn,
                )
                point["est_wins"] = [e.wins for e in ev.estimates]
                point["n_sims"] = config.n_sims
                point["spread"] = ev.spread
                point["critical"] = ev.critical
            events.append(point)

        move = players[seat].choose(state, obs)
        violation = move.decision not in cands
        if violation:
            move.decision = cands[violation_rngs[seat].below(k)]

        new_state = apply(state, move.decision)
        action = {
            "event": "action",
            "turn": state.turn_index,
            "seat": seat,
            "player": config.seats[seat].label,
            "kind": config.seats[seat].kind,
            "decision": decision_token(move.decision),
            "chosen_index": cands.index(move.decision),
            "digest": state_digest(new_state),
        }
        if violation:
            action["violation"] = True
        if move.fallback:
            action["fallback"] = True
        if move.invalid_replies:
            action["invalid_replies"] = move.invalid_replies
        if move.stage_actions:
            action["stage_actions"] = move.stage_actions
        if move.transcript:
            action["transcript"] = move.transcript
        events.append(action)
        events.extend(_transition_events(state, move.decision))
        state = new_state

    events.append({
        "event": "game_end",
        "winners": sorted(winners(state)),
        "hand_sizes": list(state.hand_sizes()),
        "turns": state.turn_index,
    })
    return GameLog(header=header, events=events)


def _run_indexed(config: ArenaConfig, deck_index: int) -> GameLog:
    return run_game(config, generate_deck(config.master_seed, deck_index), deck_index)


def run_tournament(config: ArenaConfig):
    """Every deck once with fixed seating; returns (logs, MetricsReport)."""
    config.validate()
    indices = range(config.decks)
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            logs = list(pool.map(_run_indexed, [config] * config.decks, indices,
                                 chunksize=max(1, config.decks // (config.jobs * 4))))
    else:
        logs = [_run_indexed(config, i) for i in indices]

    report = metrics_mod.aggregate(logs)

    if config.out:
        os.makedirs(config.out, exist_ok=True)
        for log in logs:
            log.write(os.path.join(config.out, f"game_{log.header['deck_index']:05d}.jsonl"))
        with open(os.path.join(config.out, "metrics.csv"), "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
        with open(os.path.join(config.out, "metrics.json"), "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    return logs, report


# --- replay ------------------------------------------------------------------------

@dataclass(frozen=True)
class ReplayVerdict:
    ok: bool
    divergence: int | None = None
    detail: str = ""


def replay_states(log: GameLog) -> list[GameState]:
    """Setup state plus the state after each logged action, by re-simulation."""
    deck = [parse_card(name) for name in log.header["deck"]]
    state = setup_game(deck, log.header["n_seats"])
    states = [state]
    for event in log.events:
        if event.get("event") == "action":
            state = apply(state, parse_decision(event["decision"]))
            states.append(state)
    return states


def replay(log: GameLog) -> ReplayVerdict:
    """Re-simulate the log; ok iff every digest and the winner set match."""
    deck = [parse_card(name) for name in log.header["deck"]]
    try:
        state = setup_game(deck, log.header["n_seats"])
    except ValueError as exc:
        return ReplayVerdict(ok=False, divergence=None, detail=f"setup failed: {exc}")

    for index, event in enumerate(log.events):
        kind = event.get("event")
        if kind == "action":
            try:
                state = apply(state, parse_decision(event["decision"]))
            except Exception as exc:
                return ReplayVerdict(False, index, f"apply failed at turn {event['turn']}: {exc}")
            digest = state_digest(state)
            if digest != event["digest"]:
                return ReplayVerdict(
                    False, index,
                    f"state digest mismatch at turn {event['turn']}: "
                    f"{digest} != {event['digest']}",
                )
        elif kind == "game_end":
            if not is_terminal(state):
                return ReplayVerdict(False, index, "log ended on a non-terminal state")
            actual = sorted(winners(state))
            if actual != event["winners"]:
                return ReplayVerdict(
                    False, index,
                    f"winner mismatch: {actual} != {event['winners']}",
                )
            if list(state.hand_sizes()) != event["hand_sizes"]:
                return ReplayVerdict(False, index, "final hand sizes mismatch")
    if not is_terminal(state):
        return ReplayVerdict(False, None, "log has no game_end event")
    return ReplayVerdict(ok=True)


# --- presets --------------------------------------------------------------------------

DEFAULT_MOCK_REPLY = '{"action": 0, "reasoning": "scripted default"}'


def _mock_backend() -> BackendConfig:
    return BackendConfig(kind="scripted", script_default=DEFAULT_MOCK_REPLY)


def preset(name: str, **overrides) -> ArenaConfig:
    """Bundled tournament shapes.

    1v1-random-first:    random at seat 0 vs an instrumented opponent
                         (greedy by default) over 500 decks, p=0.15.
    5-seat-fixed:        five seats in fixed order over 200 decks, p=0.
    vanilla-vs-reflect:  single-shot LLM vs three-turn reflection, 200
                         decks, p=0; scripted mock backends by default.
    ablation-no-history: reflection without the history stage vs vanilla.
    ablation-no-strategy: reflection without the strategy stage vs vanilla.

    Overrides accept any ArenaConfig field (decks, master_seed, n_sims,
    p, instrument, jobs, out, seats, crn).
    """
    if name == "1v1-random-first":
        base = ArenaConfig(
            seats=(
                PlayerBinding("random", "random-0"),
                PlayerBinding("greedy", "greedy-1", n_sims=500),
            ),
            decks=500, master_seed=0, n_sims=500, p=0.15, instrument=(1,),
        )
    elif name == "5-seat-fixed":
        base = ArenaConfig(
            seats=tuple(
                PlayerBinding("random", f"seat-{i}") for i in range(5)
            ),
            decks=200, master_seed=0, n_sims=500, p=0.0,
            instrument=tuple(range(5)),
        )
    elif name == "vanilla-vs-reflect":
        base = ArenaConfig(
            seats=(
                PlayerBinding("llm", "vanilla", backend=_mock_backend()),
                PlayerBinding("reflect", "reflect", backend=_mock_backend()),
            ),
            decks=200, master_seed=0, n_sims=500, p=0.0, instrument=(0, 1),
        )
    elif name == "ablation-no-history":
        base = ArenaConfig(
            seats=(
                PlayerBinding("llm", "vanilla", backend=_mock_backend()),
                PlayerBinding("reflect", "reflect-nohistory", backend=_mock_backend(),
                              history_stage=False),
            ),
            decks=200, master_seed=0, n_sims=500, p=0.15, instrument=(0, 1),
        )
    elif name == "ablation-no-strategy":
        base = ArenaConfig(
            seats=(
                PlayerBinding("llm", "vanilla", backend=_mock_backend()),
                PlayerBinding("reflect", "reflect-nostrategy", backend=_mock_backend(),
                              strategy_stage=False),
            ),
            decks=200, master_seed=0, n_sims=500, p=0.15, instrument=(0, 1),
        )
    else:
        raise ValueError(f"unknown preset {name!r}")
    return replace(base, **overrides).validate()


PRESET_NAMES = (
    "1v1-random-first",
    "5-seat-fixed",
    "vanilla-vs-reflect",
    "ablation-no-history",
    "ablation-no-strategy",
)
