"""Monte Carlo estimator against the exhaustive-enumeration oracle."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from helpers import exact_win_probability, make_state, random_midgame_states
from unomc.engine import Phase, PlayCard, parse_card
from unomc.oracle import (
    estimate,
    estimate_all_seats,
    evaluate_candidates,
    fractional_rank,
    rollout,
    spread_and_critical,
    winrate_points,
)
from unomc.rng import derive


def three_sigma(q: Fraction, n: int) -> float:
    return 3 * math.sqrt(float(q) * (1 - float(q)) / n)


# --- rollout / estimate ----------------------------------------------------

def test_rollout_on_terminal_state_returns_its_winners():
    state = make_state(["", "B1 B2"], pile="G1", top="R5")
    for seed in range(5):
        assert rollout(state, seed) == {0}


def test_rollout_deterministic():
    state = make_state(["R1 B2 G3", "Y4 B5"], pile="G1 G2 Y7 B8", top="R5")
    for seed in range(10):
        assert rollout(state, seed) == rollout(state, seed)


def test_forced_win_every_seed():
    state = make_state(["R9", "B1 B2"], pile="G1 G2", top="R5")
    for seed in range(20):
        assert 0 in rollout(state, seed)
    assert estimate(state, 0, 100, 7).value == 1.0


def test_hopeless_state_estimates_zero():
    # Seat 0 can never play; seat 1 wins on its first turn, every line.
    state = make_state(["B9 B8", "R1"], pile="G7 Y9 Y8 G6", top="R5")
    assert exact_win_probability(state, 0) == 0
    est = estimate(state, 0, 200, 3)
    assert est.value == 0.0
    assert est.wins == 0


def test_terminal_estimate_is_one_for_winner():
    state = make_state(["", "B1 B2"], pile="G1", top="R5")
    assert estimate(state, 0, 50, 1).value == 1.0
    assert estimate(state, 1, 50, 1).value == 0.0


def test_estimate_matches_enumeration_on_tiny_states():
    n = 2000
    cases = [
        make_state(["R5 W", "B1"], pile="G1 B4", top="R3"),
        make_state(["R1 B2", "Y4 G5"], pile="G2 Y7", top="R5"),
        make_state(["W WD4", "B1 B2"], pile="G1 G2", top="R5"),
    ]
    for i, state in enumerate(cases):
        q = exact_win_probability(state, 0)
        est = estimate(state, 0, n, derive(123, i))
        assert abs(est.value - float(q)) <= three_sigma(q, n) + 1e-12


def test_estimate_counts_shared_wins_in_full():
    # Forced draws exhaust the pile at equal hand sizes: a guaranteed tie.
    state = make_state(["B9", "Y1"], pile="G7 G6", top="R5")
    assert exact_win_probability(state, 0) == 1
    assert exact_win_probability(state, 1) == 1
    assert estimate(state, 0, 100, 5).value == 1.0
    assert estimate(state, 1, 100, 5).value == 1.0


def test_estimate_deterministic_and_integral():
    state = random_midgame_states(1, seed=9)[0]
    a = estimate(state, 0, 333, 42)
    b = estimate(state, 0, 333, 42)
    assert a == b
    assert a.wins == round(a.value * a.n_sims)


def test_estimate_all_seats_matches_individual_calls():
    state = random_midgame_states(1, seed=21, seats=3)[0]
    all_est = estimate_all_seats(state, 250, 7)
    for seat in range(3):
        assert all_est[seat] == estimate(state, seat, 250, 7)


# --- candidate evaluation ---------------------------------------------------

def test_spread_and_critical_arithmetic():
    spread, critical = spread_and_critical([0.72, 0.55], 0.15)
    assert spread == pytest.approx(0.17)
    assert critical is True
    spread, critical = spread_and_critical([0.60, 0.50], 0.15)
    assert spread == pytest.approx(0.10)
    assert critical is False


def test_zero_threshold_marks_everything_critical():
    _, critical = spread_and_critical([0.4, 0.4], 0.0)
    assert critical is True


def test_evaluate_candidates_finds_winning_play():
    # Playing the last R9 wins outright; drawing paths are worse.
    state = make_state(["R9 B2", "Y4 Y5"], pile="G1 G2", top="R5")
    ev = evaluate_candidates(state, p=0.0, n_sims=300, seed=11)
    tokens = [d.card for d in ev.candidates if isinstance(d, PlayCard)]
    assert parse_card("R9") in tokens
    best = ev.optimal_set[0]
    assert ev.candidates[best] == PlayCard(parse_card("R9"))
    assert ev.estimates[best].value == 1.0
    assert ev.critical


def test_evaluate_candidates_deterministic():
    state = random_midgame_states(1, seed=14)[0]
    a = evaluate_candidates(state, 0.15, 100, 5)
    b = evaluate_candidates(state, 0.15, 100, 5)
    assert a == b


def test_evaluate_candidates_crn_mode():
    state = random_midgame_states(1, seed=15)[0]
    a = evaluate_candidates(state, 0.0, 100, 5, crn=True)
    b = evaluate_candidates(state, 0.0, 100, 5, crn=True)
    assert a == b
    assert len(a.optimal_set) >= 1


def test_evaluate_candidates_rejects_terminal_and_bad_p():
    term = make_state(["", "B1"], pile="G1", top="R5")
    with pytest.raises(ValueError):
        evaluate_candidates(term, 0.1, 10, 1)
    live = make_state(["R1", "B1"], pile="G1 G2", top="R5")
    with pytest.raises(ValueError):
        evaluate_candidates(live, 1.5, 10, 1)


def test_color_choice_evaluates_four_candidates():
    state = make_state(["R5 W", "B1"], pile="G1 B4", top="W", active="R",
                       phase=Phase.SELECT_COLOR)
    ev = evaluate_candidates(state, 0.0, 200, 9)
    assert len(ev.candidates) == 4


# --- fractional rank ---------------------------------------------------------

def test_fractional_rank_examples():
    assert fractional_rank([0.6, 0.4, 0.6], 0) == 1.5
    assert fractional_rank([0.9, 0.3, 0.2, 0.1], 3) == 4.0
    assert fractional_rank([0.5, 0.5], 1) == 1.5
    assert fractional_rank([0.1, 0.9], 1) == 1.0


def test_fractional_rank_errors():
    with pytest.raises(ValueError):
        fractional_rank([], 0)
    with pytest.raises(ValueError):
        fractional_rank([0.5], 3)


@given(st.lists(st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0]), min_size=1, max_size=8))
def test_fractional_rank_mean_property(values):
    k = len(values)
    mean = sum(fractional_rank(values, i) for i in range(k)) / k
    assert mean == pytest.approx((k + 1) / 2)


# Exact binary fractions keep the shift arithmetic lossless; the property
# is about real-valued estimates, not float rounding.
@given(st.lists(st.integers(0, 64).map(lambda k: k / 64), min_size=2, max_size=6),
       st.integers(0, 32).map(lambda k: k / 64))
def test_rank_and_optimality_shift_invariant(values, shift):
    shifted = [v + shift for v in values]
    for i in range(len(values)):
        assert fractional_rank(values, i) == fractional_rank(shifted, i)


# --- winning-rate series ------------------------------------------------------

def test_penultimate_card_play_raises_estimate():
    # Candidates: R5 (safe line: guaranteed win) or W (color gamble).
    from unomc.engine import apply

    before = make_state(["R5 W", "B1"], pile="G1 B4", top="R3")
    after = apply(before, PlayCard(parse_card("R5")))
    q_before = exact_win_probability(before, 0)
    q_after = exact_win_probability(after, 0)
    assert q_before == Fraction(7, 8)
    assert q_after == 1
    n = 2000
    e_before = estimate(before, 0, n, 31).value
    e_after = estimate(after, 0, n, 32).value
    assert abs(e_before - float(q_before)) <= three_sigma(q_before, n)
    assert e_after == 1.0
    assert e_after > e_before

    before.turn_index  # silence linters: states carry turn indices for rows
    rows = winrate_points([before, after], n_sims=200, seed=5)
    assert len(rows) == 4  # two states x two seats
    assert {r[1] for r in rows} == {0, 1}
