"""Independent oracles shared by the unit and acceptance suites.

These deliberately reimplement the checked behavior in a different style
(brute force, plain loops) so they cannot share bugs with the package code.
"""

from __future__ import annotations

import math


def exhaustive_resolved_sets(
    placements: tuple[tuple[int, ...], ...],
    n_slots: int,
    need: int = 1,
) -> set[frozenset[int]]:
    """Terminal resolved sets over every sequential clean-slot order.

    At each step one clean slot (exactly one unresolved replica, not yet
    revealed) is processed; all interleavings are explored depth-first with
    memoization on (resolved, revealed) states.
    """
    n_users = len(placements)
    terminals: set[frozenset[int]] = set()
    seen: set[tuple[frozenset[int], frozenset[int]]] = set()

    def slot_contents(resolved: frozenset[int]) -> list[list[int]]:
        slots: list[list[int]] = [[] for _ in range(n_slots)]
        for u in range(n_users):
            if u in resolved:
                continue
            for s in placements[u]:
                slots[s].append(u)
        return slots

    def step(resolved: frozenset[int], revealed: frozenset[int]) -> None:
        key = (resolved, revealed)
        if key in seen:
            return
        seen.add(key)
        slots = slot_contents(resolved)
        options = [
            s for s in range(n_slots)
            if len(slots[s]) == 1 and s not in revealed
        ]
        if not options:
            terminals.add(resolved)
            return
        for s in options:
            u = slots[s][0]
            if need == 1:
                step(resolved | {u}, revealed)
            else:
                new_revealed = revealed | {s}
                have = sum(
                    1 for t in placements[u]
                    if t in new_revealed
                )
                if have >= need:
                    # resolution cancels the user's replicas; revealed slots of
                    # a resolved user no longer matter for counts
                    step(resolved | {u}, new_revealed)
                else:
                    step(resolved, new_revealed)

    step(frozenset(), frozenset())
    return terminals


def de_fixed_point_oracle(entries, load, iters=20000):
    """Plain fixed-point loop for the erasure recursion."""
    mean = 0.0
    for d, p in entries:
        mean += d * p
    q = 1.0
    for _ in range(iters):
        lam = 0.0
        for d, p in entries:
            lam += (d * p / mean) * q ** (d - 1)
        q = 1.0 - math.exp(-load * mean * lam)
        if q < 1e-12:
            break
    return q


def de_threshold_oracle(entries, lo=0.0, hi=1.0, step=0.002):
    """Grid scan for the largest load whose fixed point vanishes."""
    best = lo
    g = lo
    while g <= hi + 1e-12:
        if de_fixed_point_oracle(entries, g) < 1e-6:
            best = g
        g += step
    return best
