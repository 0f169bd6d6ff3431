"""Metric arithmetic, aggregation, correlation, and export formats."""

import math

import pytest
from hypothesis import given, strategies as st

from unomc.arena import GameLog
from unomc.metrics import (
    DecisionRecord,
    adr,
    aggregate,
    correlation_matrix,
    odhr,
    pearson,
    wr,
)


def record(k, est_wins, chosen, n_sims=100, player="p", seat=0, turn=1, game=0):
    return DecisionRecord(
        game_id=game, turn_index=turn, seat=seat, player=player,
        k=k, est_wins=tuple(est_wins), n_sims=n_sims, chosen=chosen,
    )


def fake_log(deck_index, winners, labels=("a", "b"), points=(), p=0.15, n_sims=100):
    """Minimal log shape for aggregation tests."""
    events = []
    for turn, (seat, est_wins, chosen) in enumerate(points, start=1):
        events.append({
            "event": "decision_point", "turn": turn, "seat": seat,
            "k": len(est_wins), "est_wins": list(est_wins), "n_sims": n_sims,
        })
        events.append({
            "event": "action", "turn": turn, "seat": seat,
            "player": labels[seat], "kind": "random", "decision": "Draw",
            "chosen_index": chosen, "digest": "x",
        })
    events.append({
        "event": "game_end", "winners": sorted(winners),
        "hand_sizes": [1] * len(labels), "turns": len(points),
    })
    header = {
        "event": "header", "deck_index": deck_index,
        "seats": [{"kind": "random", "label": lab} for lab in labels],
        "n_seats": len(labels), "p": p, "n_sims": n_sims,
    }
    return GameLog(header=header, events=events)


# --- wr -------------------------------------------------------------------

def test_wr_values():
    assert wr(316, 500) == 0.632
    assert wr(121, 500) == 0.242
    assert wr(0, 100) == 0.0
    assert wr(7, 7) == 1.0


def test_wr_rejects_bad_input():
    with pytest.raises(ValueError):
        wr(1, 0)
    with pytest.raises(ValueError):
        wr(5, 4)
    with pytest.raises(ValueError):
        wr(-1, 4)


# --- odhr / adr ---------------------------------------------------------------

def test_odhr_counts_hits():
    records = [
        record(2, (80, 20), 0),   # hit
        record(2, (80, 20), 1),   # miss
        record(2, (50, 50), 1),   # tie counts as hit
        record(2, (10, 90), 1),   # hit
        record(3, (10, 90, 40), 0),  # different K, ignored at K=2
    ]
    assert odhr(records, 2, 0.0) == 0.75
    assert odhr(records, 3, 0.0) == 0.0


def test_threshold_filters_low_spread_points():
    records = [
        record(2, (60, 43), 0),   # spread 0.17: critical at p=0.15
        record(2, (55, 45), 1),   # spread 0.10: filtered at p=0.15
    ]
    assert odhr(records, 2, 0.15) == 1.0
    assert odhr(records, 2, 0.0) == 0.5


def test_empty_bucket_is_absent_not_zero():
    assert odhr([], 2, 0.0) is None
    assert adr([record(2, (60, 40), 0)], 4, 0.0) is None


def test_adr_means_fractional_ranks():
    records = [
        record(3, (90, 50, 10), 0),  # rank 1
        record(3, (90, 50, 10), 1),  # rank 2
        record(3, (90, 50, 10), 2),  # rank 3
        record(3, (90, 50, 10), 1),  # rank 2
    ]
    assert adr(records, 3, 0.0) == 2.0


def test_adr_all_hits_no_ties_is_one():
    records = [record(2, (70, 30), 0), record(2, (20, 90), 1)]
    assert adr(records, 2, 0.0) == 1.0
    assert odhr(records, 2, 0.0) == 1.0


def test_record_hit_and_rank_with_ties():
    r = record(3, (70, 70, 10), 1)
    assert r.hit
    assert r.rank == 1.5
    assert math.isclose(r.spread(), 0.6)
    assert r.critical(0.15)
    assert not record(2, (52, 48), 0).critical(0.15)


# --- pearson ---------------------------------------------------------------------

def test_pearson_perfect_correlations():
    xs = [1.0, 2.0, 3.0, 4.0]
    assert pearson(xs, xs) == pytest.approx(1.0)
    assert pearson(xs, [-x for x in xs]) == pytest.approx(-1.0)


def test_pearson_zero_variance_is_absent():
    assert pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0]) is None


def test_pearson_invariances():
    xs = [1.0, 5.0, 3.0, 2.0]
    ys = [2.0, 1.0, 4.0, 8.0]
    base = pearson(xs, ys)
    assert pearson(ys, xs) == pytest.approx(base)
    assert pearson([3 * x + 7 for x in xs], ys) == pytest.approx(base)


def test_pearson_input_validation():
    with pytest.raises(ValueError):
        pearson([1.0], [1.0])
    with pytest.raises(ValueError):
        pearson([1.0, 2.0], [1.0])


def test_correlation_matrix_shape_and_symmetry():
    names, matrix = correlation_matrix({
        "a": [1.0, 2.0, 3.0],
        "b": [3.0, 2.0, 1.0],
        "c": [1.0, 3.0, 2.0],
    })
    assert names == ["a", "b", "c"]
    for i in range(3):
        assert matrix[i][i] == 1.0
        for j in range(3):
            assert matrix[i][j] == pytest.approx(matrix[j][i])
    assert matrix[0][1] == pytest.approx(-1.0)


# --- aggregate -----------------------------------------------------------------------

def test_aggregate_multi_winner_wr():
    logs = [
        fake_log(0, winners=[0]),
        fake_log(1, winners=[0, 1]),
    ]
    report = aggregate(logs)
    assert report.row("a").wr == 1.0
    assert report.row("b").wr == 0.5
    assert report.n_games == 2


def test_wr_sum_can_exceed_one():
    logs = [fake_log(i, winners=[0, 1]) for i in range(3)]
    report = aggregate(logs)
    assert report.row("a").wr + report.row("b").wr == 2.0


def test_aggregate_builds_records_and_buckets():
    logs = [fake_log(0, winners=[0], points=[
        (0, (80, 20), 0),
        (0, (80, 20), 1),
        (1, (10, 20, 90), 2),
    ])]
    report = aggregate(logs, p=0.0)
    a = report.row("a")
    assert a.by_k[2]["n"] == 2
    assert a.by_k[2]["odhr"] == 0.5
    assert a.by_k[3]["odhr"] is None
    b = report.row("b")
    assert b.by_k[3]["n"] == 1
    assert b.by_k[3]["odhr"] == 1.0
    assert b.by_k[3]["adr"] == 1.0


def test_aggregate_echoes_settings_and_is_deterministic():
    logs = [fake_log(0, winners=[0]), fake_log(1, winners=[1])]
    report = aggregate(logs)
    assert report.p == 0.15
    assert report.n_sims == 100
    assert aggregate(logs).to_csv() == report.to_csv()
    assert aggregate(logs).to_json() == report.to_json()


def test_aggregate_rejects_mixed_settings():
    logs = [fake_log(0, winners=[0], p=0.15), fake_log(1, winners=[0], p=0.0)]
    with pytest.raises(ValueError):
        aggregate(logs)
    report = aggregate(logs, p=0.0, allow_mixed=True)
    assert report.p == 0.0


def test_csv_shape():
    logs = [fake_log(0, winners=[0], points=[(0, (80, 20), 0)])]
    text = aggregate(logs).to_csv()
    lines = text.strip().split("\n")
    assert lines[0].startswith("player,seats,games,wins,wr,odhr@2")
    assert len(lines) == 3
    first = lines[1].split(",")
    assert first[0] == "a"
    assert first[4] == "1.000000"
    # absent buckets are empty cells, not zeros
    assert first[8] == "" and first[9] == ""


def test_metric_columns_skips_incomplete_rows():
    logs = [fake_log(0, winners=[0], points=[(0, (80, 20), 0)])]
    cols = aggregate(logs).metric_columns()
    assert cols["WR"] == []  # no player has every @K bucket filled


# --- properties ------------------------------------------------------------------------

@given(st.lists(st.integers(0, 100), min_size=2, max_size=5),
       st.integers(0, 4))
def test_random_chooser_rank_expectation(est_wins, chosen_raw):
    # Mean fractional rank over all choices is exactly (K+1)/2.
    k = len(est_wins)
    mean = sum(record(k, est_wins, c).rank for c in range(k)) / k
    assert mean == pytest.approx((k + 1) / 2)
