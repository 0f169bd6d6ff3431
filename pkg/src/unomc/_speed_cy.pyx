# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled rollout kernel; a line for line twin of `_speed_py`.

Both kernels must stay draw-for-draw identical: same SplitMix64 stream,
same candidate ordering, same modulo choice.  The parity tests fail on
any divergence.
"""

from libc.stdint cimport uint64_t
from libc.string cimport memcpy

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15U


cdef inline uint64_t _mix64(uint64_t x) nogil:
    x ^= x >> 30
    x *= 0xBF58476D1CE4E5B9U
    x ^= x >> 27
    x *= 0x94D049BB133111EBU
    return x ^ (x >> 31)


cdef inline int _step(int cur, int d, int n) nogil:
    cur += d
    if cur < 0:
        cur += n
    elif cur >= n:
        cur -= n
    return cur


cdef int _rollout(
    int n_seats,
    unsigned char* hand,
    int* sizes,
    const unsigned char* pile,
    int pile_len,
    int pile_pos,
    int top_type,
    int active_color,
    int phase,
    int current,
    int direction,
    int offender,
    int illegal,
    uint64_t seed,
) nogil:
    cdef uint64_t rng = seed
    cdef int cands[24]
    cdef int n_cands, seat, base, top_rank, t, rank, victim, i
    cdef int action, cbase, drawer, count, smallest, mask

    while True:
        if pile_pos >= pile_len:
            smallest = sizes[0]
            for seat in range(1, n_seats):
                if sizes[seat] < smallest:
                    smallest = sizes[seat]
            mask = 0
            for seat in range(n_seats):
                if sizes[seat] == smallest:
                    mask |= 1 << seat
            return mask
        for seat in range(n_seats):
            if sizes[seat] == 0:
                return 1 << seat

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
            for i in range(4):
                cands[i] = 200 + i
            n_cands = 4
        else:
            cands[0] = 300
            cands[1] = 301
            n_cands = 2

        rng += GOLDEN
        action = cands[_mix64(rng) % <uint64_t>n_cands]

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
                    current = _step(_step(current, direction, n_seats), direction, n_seats)
                elif rank == 12:
                    victim = _step(current, direction, n_seats)
                    for i in range(2):
                        if pile_pos >= pile_len:
                            break
                        hand[victim * 54 + pile[pile_pos]] += 1
                        sizes[victim] += 1
                        pile_pos += 1
                    current = _step(victim, direction, n_seats)
                else:
                    current = _step(current, direction, n_seats)
        elif action == 100:
            hand[current * 54 + pile[pile_pos]] += 1
            sizes[current] += 1
            pile_pos += 1
            current = _step(current, direction, n_seats)
        elif action < 300:
            active_color = action - 200
            phase = 2 if offender >= 0 else 0
            current = _step(current, direction, n_seats)
        else:
            if action == 300 and illegal:
                drawer = offender
                count = 4
            elif action == 300:
                drawer = current
                count = 6
            else:
                drawer = current
                count = 4
            for i in range(count):
                if pile_pos >= pile_len:
                    break
                hand[drawer * 54 + pile[pile_pos]] += 1
                sizes[drawer] += 1
                pile_pos += 1
            if not (action == 300 and illegal):
                current = _step(current, direction, n_seats)
            phase = 0
            offender = -1


def rollout_mask(
    int n_seats,
    const unsigned char[::1] hands,
    const unsigned char[::1] pile,
    int pile_pos,
    int top_type,
    int active_color,
    int phase,
    int current,
    int direction,
    int offender,
    int illegal,
    unsigned long long seed,
):
    cdef unsigned char hand[544]
    cdef int sizes[10]
    cdef int seat, t
    memcpy(hand, &hands[0], n_seats * 54)
    for seat in range(n_seats):
        sizes[seat] = 0
        for t in range(54):
            sizes[seat] += hand[seat * 54 + t]
    return _rollout(
        n_seats, hand, sizes, &pile[0], <int>pile.shape[0], pile_pos,
        top_type, active_color, phase, current, direction, offender,
        illegal, <uint64_t>seed,
    )


def simulate(
    int n_seats,
    const unsigned char[::1] hands,
    const unsigned char[::1] pile,
    int pile_pos,
    int top_type,
    int active_color,
    int phase,
    int current,
    int direction,
    int offender,
    int illegal,
    long n_sims,
    unsigned long long seed,
):
    cdef unsigned char template[544]
    cdef unsigned char hand[544]
    cdef int tsizes[10]
    cdef int sizes[10]
    cdef unsigned long long counts[10]
    cdef int seat, t, mask
    cdef long k
    cdef uint64_t seed_k

    memcpy(template, &hands[0], n_seats * 54)
    for seat in range(n_seats):
        tsizes[seat] = 0
        counts[seat] = 0
        for t in range(54):
            tsizes[seat] += template[seat * 54 + t]

    with nogil:
        for k in range(n_sims):
            seed_k = _mix64(<uint64_t>seed + GOLDEN * (<uint64_t>k + 1))
            memcpy(hand, template, n_seats * 54)
            for seat in range(n_seats):
                sizes[seat] = tsizes[seat]
            mask = _rollout(
                n_seats, hand, sizes, &pile[0], <int>pile.shape[0], pile_pos,
                top_type, active_color, phase, current, direction, offender,
                illegal, seed_k,
            )
            for seat in range(n_seats):
                if mask & (1 << seat):
                    counts[seat] += 1

    return [counts[seat] for seat in range(n_seats)]
