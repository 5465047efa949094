"""Seeding, derived RNG streams, and deterministic trial scheduling."""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def rng_stream(seed, *key):
    """Return the counter-based generator for stream ``key`` of ``seed``.

    Stream derivation rule: ``SeedSequence(entropy=seed, spawn_key=key)``
    feeding a Philox counter RNG.  Any (seed, key) pair names the same
    stream on every platform and under any thread schedule, which is what
    makes parallel Monte Carlo runs reproducible.
    """
    if int(seed) < 0:
        raise ValueError("seed must be a nonnegative integer")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed, index):
    """64-bit seed for trial ``index``, derived from the master seed."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def resolve_threads(threads=None):
    """Worker count: explicit argument, else SCHLAB_THREADS, else machine."""
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("SCHLAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_trials(fn, trials, threads=1):
    """Evaluate ``fn(trial_index)`` for each trial, merged in index order.

    Results do not depend on ``threads``: each trial derives its own RNG
    stream from its index and the fold is ordered by index.
    """
    trials = int(trials)
    if threads is None or threads <= 1 or trials <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=int(threads)) as ex:
        return list(ex.map(fn, range(trials)))
