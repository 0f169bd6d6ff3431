"""Evaluation metrics over instrumented game logs.

WR is wins over games, with a shared (multi-winner) game counted as a win
for every winner.  ODHR@K is the fraction of a player's critical
K-candidate decision points where the chosen candidate tied the best
Monte Carlo estimate; ADR@K is the mean fractional rank of the chosen
candidate over the same points.  Empty @K buckets are reported as absent,
never as zero.

This module only assumes logs are objects with `header` and `events`
mappings in the arena's JSONL schema; it never imports the arena.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass, field

from .oracle import fractional_rank, spread_and_critical

K_VALUES = (2, 3, 4)


@dataclass(frozen=True)
class DecisionRecord:
    """One instrumented decision point, reconstructed from a game log."""

    game_id: int
    turn_index: int
    seat: int
    player: str
    k: int
    est_wins: tuple[int, ...]
    n_sims: int
    chosen: int
    fallback: bool = False
    stage_actions: tuple[int | None, ...] = ()

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(w / self.n_sims for w in self.est_wins)

    @property
    def hit(self) -> bool:
        return self.est_wins[self.chosen] == max(self.est_wins)

    @property
    def rank(self) -> float:
        return fractional_rank(list(self.values), self.chosen)

    def spread(self) -> float:
        return spread_and_critical(list(self.values), 0.0)[0]

    def critical(self, p: float) -> bool:
        return spread_and_critical(list(self.values), p)[1]


def wr(n_win: int, n_game: int) -> float:
    """Winning rate: wins over games played."""
    if n_game < 1:
        raise ValueError("n_game must be >= 1")
    if not 0 <= n_win <= n_game:
        raise ValueError("need 0 <= n_win <= n_game")
    return n_win / n_game


def _bucket(records, k: int, p: float):
    return [r for r in records if r.k == k and r.critical(p)]


def odhr(records, k: int, p: float) -> float | None:
    """Optimal-decision hit rate at K candidates; None for an empty bucket."""
    bucket = _bucket(records, k, p)
    if not bucket:
        return None
    return sum(1 for r in bucket if r.hit) / len(bucket)


def adr(records, k: int, p: float) -> float | None:
    """Mean fractional rank of the chosen candidate at K; None when empty."""
    bucket = _bucket(records, k, p)
    if not bucket:
        return None
    return sum(r.rank for r in bucket) / len(bucket)


def pearson(xs, ys) -> float | None:
    """Sample Pearson correlation; None when either side has no variance."""
    if len(xs) != len(ys):
        raise ValueError("length mismatch")
    if len(xs) < 2:
        raise ValueError("need at least two points")
    try:
        return statistics.correlation(list(xs), list(ys))
    except statistics.StatisticsError:
        return None


def correlation_matrix(columns: dict[str, list[float]]):
    """Pairwise Pearson matrix over named, aligned columns."""
    names = list(columns)
    lengths = {len(columns[n]) for n in names}
    if len(lengths) != 1:
        raise ValueError("columns must be aligned")
    matrix = []
    for a in names:
        row = []
        for b in names:
            row.append(1.0 if a == b else pearson(columns[a], columns[b]))
        matrix.append(row)
    return names, matrix


@dataclass
class PlayerMetrics:
    player: str
    seats: tuple[int, ...]
    games: int
    wins: int
    by_k: dict[int, dict] = field(default_factory=dict)

    @property
    def wr(self) -> float:
        return wr(self.wins, self.games)


@dataclass
class MetricsReport:
    players: list[PlayerMetrics]
    p: float
    n_sims: int | None
    n_games: int
    k_values: tuple[int, ...] = K_VALUES

    CSV_COLUMNS = (
        "player,seats,games,wins,wr,"
        "odhr@2,adr@2,n@2,odhr@3,adr@3,n@3,odhr@4,adr@4,n@4,p,n_sims"
    )

    def row(self, label: str) -> PlayerMetrics:
        for pm in self.players:
            if pm.player == label:
                return pm
        raise KeyError(label)

    def to_json(self) -> str:
        payload = {
            "p": self.p,
            "n_sims": self.n_sims,
            "games": self.n_games,
            "players": [
                {
                    "player": pm.player,
                    "seats": list(pm.seats),
                    "games": pm.games,
                    "wins": pm.wins,
                    "wr": pm.wr,
                    "by_k": {
                        str(k): {
                            "odhr": pm.by_k[k]["odhr"],
                            "adr": pm.by_k[k]["adr"],
                            "n": pm.by_k[k]["n"],
                        }
                        for k in self.k_values
                    },
                }
                for pm in self.players
            ],
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.CSV_COLUMNS.split(","))
        for pm in self.players:
            row = [
                pm.player,
                " ".join(map(str, pm.seats)),
                pm.games,
                pm.wins,
                f"{pm.wr:.6f}",
            ]
            for k in K_VALUES:
                stats = pm.by_k.get(k, {"odhr": None, "adr": None, "n": 0})
                row.append("" if stats["odhr"] is None else f"{stats['odhr']:.6f}")
                row.append("" if stats["adr"] is None else f"{stats['adr']:.6f}")
                row.append(stats["n"])
            row.append(self.p)
            row.append("" if self.n_sims is None else self.n_sims)
            writer.writerow(row)
        return out.getvalue()

    def metric_columns(self) -> dict[str, list[float]]:
        """Aligned WR/ODHR@K/ADR@K columns over players with complete rows."""
        complete = [
            pm for pm in self.players
            if all(pm.by_k.get(k, {}).get("odhr") is not None for k in self.k_values)
        ]
        columns: dict[str, list[float]] = {"WR": [pm.wr for pm in complete]}
        for k in self.k_values:
            columns[f"ODHR@{k}"] = [pm.by_k[k]["odhr"] for pm in complete]
        for k in self.k_values:
            columns[f"ADR@{k}"] = [pm.by_k[k]["adr"] for pm in complete]
        return columns


def records_from_log(log) -> list[DecisionRecord]:
    """Pair instrumented decision_point events with their action events."""
    header = log.header
    labels = [seat["label"] for seat in header["seats"]]
    game_id = header["deck_index"]
    records = []
    pending: dict | None = None
    for event in log.events:
        kind = event.get("event")
        if kind == "decision_point" and "est_wins" in event:
            pending = event
        elif kind == "action" and pending is not None:
            if event["turn"] == pending["turn"]:
                records.append(
                    DecisionRecord(
                        game_id=game_id,
                        turn_index=event["turn"],
                        seat=event["seat"],
                        player=labels[event["seat"]],
                        k=pending["k"],
                        est_wins=tuple(pending["est_wins"]),
                        n_sims=pending["n_sims"],
                        chosen=event["chosen_index"],
                        fallback=event.get("fallback", False),
                        stage_actions=tuple(event.get("stage_actions") or ()),
                    )
                )
            pending = None
    return records


def aggregate(
    logs,
    p: float | None = None,
    k_values: tuple[int, ...] = K_VALUES,
    allow_mixed: bool = False,
) -> MetricsReport:
    """Deterministic metrics report over a set of game logs.

    `p` defaults to the threshold the logs were recorded with; passing it
    explicitly re-filters criticality at aggregation time (estimates are
    stored, so any threshold can be applied).  Mixed n_sims or p across
    logs is rejected unless allow_mixed.
    """
    logs = sorted(logs, key=lambda lg: lg.header["deck_index"])
    if not logs:
        raise ValueError("no logs to aggregate")
    header_p = {lg.header["p"] for lg in logs}
    header_sims = {lg.header["n_sims"] for lg in logs}
    if not allow_mixed and (len(header_p) > 1 or len(header_sims) > 1):
        raise ValueError(
            f"mixed oracle settings across logs: p={sorted(header_p)}, "
            f"n_sims={sorted(header_sims)}; pass allow_mixed=True to override"
        )
    if p is None:
        if len(header_p) > 1:
            raise ValueError("mixed p across logs; pass p explicitly")
        p = header_p.pop()

    games: dict[str, int] = {}
    wins: dict[str, int] = {}
    seats: dict[str, set[int]] = {}
    records: dict[str, list[DecisionRecord]] = {}
    order: list[str] = []

    for log in logs:
        labels = [seat["label"] for seat in log.header["seats"]]
        end = next(e for e in log.events if e.get("event") == "game_end")
        for seat, label in enumerate(labels):
            if label not in order:
                order.append(label)
            games[label] = games.get(label, 0) + 1
            seats.setdefault(label, set()).add(seat)
            if seat in end["winners"]:
                wins[label] = wins.get(label, 0) + 1
        for record in records_from_log(log):
            records.setdefault(record.player, []).append(record)

    players = []
    for label in order:
        recs = records.get(label, [])
        by_k = {}
        for k in k_values:
            bucket = _bucket(recs, k, p)
            by_k[k] = {
                "odhr": odhr(recs, k, p),
                "adr": adr(recs, k, p),
                "n": len(bucket),
            }
        players.append(
            PlayerMetrics(
                player=label,
                seats=tuple(sorted(seats[label])),
                games=games[label],
                wins=wins.get(label, 0),
                by_k=by_k,
            )
        )

    n_sims = None if len(header_sims) > 1 else header_sims.pop()
    return MetricsReport(
        players=players,
        p=p,
        n_sims=n_sims,
        n_games=len(logs),
        k_values=k_values,
    )
