"""Pure-Python rollout kernel.

Plays games to termination with every seat choosing uniformly at random
among its legal decisions, on the flat state encoding produced by
`speed.encode_state`.  The compiled kernel in `_speed_cy.pyx` is a line
for line twin of this module; any semantic change must land in both (the
parity tests compare them draw for draw against the engine).

Internal action codes: 0-53 play that card type, 100 draw, 200+c choose
color c, 300 challenge, 301 decline.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def _mix64(x: int) -> int:
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def rollout_mask(
    n_seats: int,
    hands: bytes,
    pile: bytes,
    pile_pos: int,
    top_type: int,
    active_color: int,
    phase: int,
    current: int,
    direction: int,
    offender: int,
    illegal: int,
    seed: int,
) -> int:
    """One random playout; returns the winner set as a seat bitmask."""
    hand = bytearray(hands)
    sizes = [0] * n_seats
    for seat in range(n_seats):
        base = seat * 54
        sizes[seat] = sum(hand[base : base + 54])

    pile_len = len(pile)
    rng = seed & MASK64

    cands = [0] * 24

    while True:
        # Terminal?
        if pile_pos >= pile_len:
            smallest = min(sizes)
            mask = 0
            for seat in range(n_seats):
                if sizes[seat] == smallest:
                    mask |= 1 << seat
            return mask
        for seat in range(n_seats):
            if sizes[seat] == 0:
                return 1 << seat

        # Enumerate candidates in canonical order.
        n_cands = 0
        if phase == 0:
            base = current * 54
            top_rank = top_type % 13 if top_type < 52 else -1
            for t in range(54):
                if hand[base + t] == 0:
                    continue
                if t >= 52 or t // 13 == active_color or t % 13 == top_rank:
                    cands[n_cands] = t
                    n_cands += 1
            if n_cands == 0:
                cands[0] = 100
                n_cands = 1
        elif phase == 1:
            for c in range(4):
                cands[c] = 200 + c
            n_cands = 4
        else:
            cands[0] = 300
            cands[1] = 301
            n_cands = 2

        rng = (rng + GOLDEN) & MASK64
        action = cands[_mix64(rng) % n_cands]

        # Apply.
        if action < 54:
            t = action
            hand[current * 54 + t] -= 1
            sizes[current] -= 1
            if sizes[current] == 0:
                return 1 << current
            if t == 52:
                top_type = t
                phase = 1
                offender = -1
            elif t == 53:
                cbase = current * 54 + active_color * 13
                illegal = 0
                for i in range(13):
                    if hand[cbase + i]:
                        illegal = 1
                        break
                top_type = t
                phase = 1
                offender = current
            else:
                top_type = t
                active_color = t // 13
                rank = t % 13
                if rank == 11:
                    direction = -direction
                if rank == 10 or (rank == 11 and n_seats == 2):
                    current = (current + 2 * direction) % n_seats
                elif rank == 12:
                    victim = (current + direction) % n_seats
                    for _ in range(2):
                        if pile_pos >= pile_len:
                            break
                        hand[victim * 54 + pile[pile_pos]] += 1
                        sizes[victim] += 1
                        pile_pos += 1
                    current = (victim + direction) % n_seats
                else:
                    current = (current + direction) % n_seats
        elif action == 100:
            hand[current * 54 + pile[pile_pos]] += 1
            sizes[current] += 1
            pile_pos += 1
            current = (current + direction) % n_seats
        elif action < 300:
            active_color = action - 200
            phase = 2 if offender >= 0 else 0
            current = (current + direction) % n_seats
        else:
            drawer = offender if (action == 300 and illegal) else current
            count = 6 if (action == 300 and not illegal) else 4
            for _ in range(count):
                if pile_pos >= pile_len:
                    break
                hand[drawer * 54 + pile[pile_pos]] += 1
                sizes[drawer] += 1
                pile_pos += 1
            if not (action == 300 and illegal):
                current = (current + direction) % n_seats
            phase = 0
            offender = -1


def simulate(
    n_seats: int,
    hands: bytes,
    pile: bytes,
    pile_pos: int,
    top_type: int,
    active_color: int,
    phase: int,
    current: int,
    direction: int,
    offender: int,
    illegal: int,
    n_sims: int,
    seed: int,
) -> list[int]:
    """Per-seat win counts over n_sims rollouts seeded derive(seed, k)."""
    counts = [0] * n_seats
    for k in range(n_sims):
        seed_k = _mix64((seed + GOLDEN * (k + 1)) & MASK64)
        mask = rollout_mask(
            n_seats, hands, pile, pile_pos, top_type, active_color,
            phase, current, direction, offender, illegal, seed_k,
        )
        for seat in range(n_seats):
            if mask & (1 << seat):
                counts[seat] += 1
    return counts
