"""Shared helpers for the test suite: seeded random rankings and profiles."""

import random

from byzrank.rankings import Profile


def rand_ranking(rng: random.Random, m: int) -> tuple:
    return tuple(rng.sample(range(m), m))


def rand_profile(rng: random.Random, n: int, m: int) -> Profile:
    return Profile.of([rand_ranking(rng, m) for _ in range(n)], m)
