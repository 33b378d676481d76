"""Shared test utilities: independent oracles and instance generators.

Everything here recomputes results from first principles (scans, full
enumeration, direct probability sums) so the package code under test never
checks itself.
"""
from __future__ import annotations

import itertools
import random

import numpy as np

from csasim import FramePlacement, SystemConfig, UserCode


def make_placement(ns: int, slots: list[list[int]]) -> FramePlacement:
    """Hand-built placement from explicit per-user slot lists."""
    arrays = tuple(np.array(sorted(s), dtype=np.int64) for s in slots)
    degree = np.bincount(np.concatenate(arrays), minlength=ns)
    return FramePlacement(ns=ns, slots_of_user=arrays, degree_of_slot=degree)


def peel_oracle(
    ns: int,
    users: list[UserCode],
    slots: list[list[int]],
    rng: random.Random | None = None,
) -> set[int]:
    """Naive peeling: rescan every user from scratch after each removal.

    With ``rng`` given, the scan order is shuffled before each pass, which
    exercises arbitrary one-user-at-a-time decoding orders.
    """
    degree = [0] * ns
    for user_slots in slots:
        for s in user_slots:
            degree[s] += 1
    undecoded = set(range(len(users)))
    while True:
        scan = sorted(undecoded)
        if rng is not None:
            rng.shuffle(scan)
        for i in scan:
            clean = sum(1 for s in slots[i] if degree[s] == 1)
            if clean >= users[i].k:
                for s in slots[i]:
                    degree[s] -= 1
                undecoded.remove(i)
                break
        else:
            return set(range(len(users))) - undecoded


def replica_sic_oracle(ns: int, slots: list[list[int]]) -> set[int]:
    """Replica-based interference cancellation (one-clean-burst decode rule).

    Works slot-first: any slot holding a single remaining burst reveals its
    user; all that user's replicas are then cancelled.
    """
    slot_users: list[set[int]] = [set() for _ in range(ns)]
    for i, user_slots in enumerate(slots):
        for s in user_slots:
            slot_users[s].add(i)
    decoded: set[int] = set()
    while True:
        target = next((s for s in range(ns) if len(slot_users[s]) == 1), None)
        if target is None:
            return decoded
        user = next(iter(slot_users[target]))
        decoded.add(user)
        for s in slots[user]:
            slot_users[s].discard(user)


def binomial_tail_by_enumeration(n: int, k: int, p: float) -> float:
    """P(at least k of n survive) by summing all 2^n erasure patterns."""
    total = 0.0
    for pattern in itertools.product((0, 1), repeat=n):
        survivors = sum(pattern)
        if survivors >= k:
            total += (1.0 - p) ** survivors * p ** (n - survivors)
    return total


def random_instance(
    rng: random.Random,
    max_users: int = 4,
    max_ns: int = 6,
    max_n: int = 3,
) -> tuple[SystemConfig, list[list[int]]]:
    """Small random config plus an explicit random placement."""
    ns = rng.randint(1, max_ns)
    n_users = rng.randint(1, max_users)
    users = []
    slots = []
    for _ in range(n_users):
        n = rng.randint(1, min(max_n, ns))
        k = rng.randint(1, n)
        users.append(UserCode(n=n, k=k))
        slots.append(sorted(rng.sample(range(ns), n)))
    return SystemConfig(ns=ns, users=tuple(users), seed=0), slots


def all_subsets(ns: int, n: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(ns), n))
