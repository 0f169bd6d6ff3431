"""Rollout backend selection and the GameState <-> flat encoding bridge.

The compiled kernel (`_speed_cy`, built from the .pyx at install time) is
used when importable; otherwise the pure-Python twin takes over.  Set
UNOMC_BACKEND=python or =cython to force one, or call `set_backend` at
runtime (the benchmark does, to compare both in one process).

Both backends produce identical win counts for identical arguments; the
choice is purely a speed knob.
"""

from __future__ import annotations

import os

from . import _speed_py
from .cards import type_id
from .engine import GameState, is_terminal, winners

try:
    from . import _speed_cy
except ImportError:
    _speed_cy = None

_BACKENDS = {"python": _speed_py}
if _speed_cy is not None:
    _BACKENDS["cython"] = _speed_cy


def _initial_backend() -> str:
    forced = os.environ.get("UNOMC_BACKEND")
    if forced:
        if forced not in _BACKENDS:
            raise ImportError(
                f"UNOMC_BACKEND={forced!r} unavailable; have {sorted(_BACKENDS)}"
            )
        return forced
    return "cython" if _speed_cy is not None else "python"


_backend_name = _initial_backend()
_impl = _BACKENDS[_backend_name]


def backend_name() -> str:
    return _backend_name


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def set_backend(name: str) -> None:
    global _backend_name, _impl
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {sorted(_BACKENDS)}")
    _backend_name = name
    _impl = _BACKENDS[name]


def encode_state(state: GameState) -> tuple:
    """Flatten a GameState into the kernel argument tuple (sans sims/seed)."""
    if not 2 <= state.n_seats <= 10:
        raise ValueError(f"kernels support 2-10 seats, got {state.n_seats}")
    hands = bytearray(state.n_seats * 54)
    for seat, hand in enumerate(state.hands):
        base = seat * 54
        for card in hand:
            hands[base + type_id(card)] += 1
    pile = bytes(type_id(c) for c in state.draw_pile)
    ctx = state.challenge
    return (
        state.n_seats,
        bytes(hands),
        pile,
        0,
        type_id(state.top_card),
        int(state.active_color),
        int(state.phase),
        state.current_seat,
        state.direction,
        ctx.offender if ctx is not None else -1,
        1 if ctx is not None and ctx.illegal else 0,
    )


def rollout_winners(state: GameState, seed: int, backend=None) -> frozenset[int]:
    """Winner set of one uniform-random playout from `state`."""
    if is_terminal(state):
        return winners(state)
    impl = _BACKENDS[backend] if backend else _impl
    mask = impl.rollout_mask(*encode_state(state), seed)
    return frozenset(s for s in range(state.n_seats) if mask & (1 << s))


def simulate_wins(
    state: GameState, n_sims: int, seed: int, backend: str | None = None
) -> list[int]:
    """Per-seat win counts over n_sims seeded rollouts from `state`."""
    if n_sims < 1:
        raise ValueError("n_sims must be >= 1")
    if is_terminal(state):
        won = winners(state)
        return [n_sims if s in won else 0 for s in range(state.n_seats)]
    impl = _BACKENDS[backend] if backend else _impl
    return list(impl.simulate(*encode_state(state), n_sims, seed))
