"""Pure-Python jump-chain kernel.

Reference implementation of the first-come-first-matched buffer chain; the
compiled twin in ``_chain_cy.pyx`` follows the same algorithm, RNG, and
accumulation semantics and must produce bit-identical output. All batch
accumulators hold integer-valued quantities, so float arrays introduce no
rounding and backend equality is exact.

RNG: splitmix64 (state advances by the 64-bit golden gamma, output is the
mixed state; uniforms take the top 53 bits). The seed fully determines the
run.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV53 = 2.0**-53

BACKEND = "python"


def splitmix64_ints(seed: int):
    """Raw splitmix64 output stream; the seed fully determines the sequence."""
    state = seed & _MASK64
    while True:
        state = (state + _GAMMA) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        z ^= z >> 31
        yield z


def splitmix64_stream(seed: int):
    """Deterministic uniform(0,1) stream: top 53 bits of each splitmix64 output."""
    for z in splitmix64_ints(seed):
        yield (z >> 11) * _INV53


def run_chain(
    adj: tuple[int, ...],
    cum_alpha: tuple[float, ...],
    warmup: int,
    n_batches: int,
    batch_size: int,
    seed: int,
    set_position: dict[int, int],
    n_sets: int,
):
    """Run warmup + n_batches*batch_size arrivals and return batch accumulators.

    Returns (occupancy, class_sums, arrivals, appends, final_word) where the
    2-D arrays have one row per batch: occupancy counts post-arrival steps
    spent at each independent-set index, class_sums integrates per-class
    buffer counts, arrivals/appends drive the PASTA waiting estimator.
    """
    n = len(adj)
    occupancy = np.zeros((n_batches, n_sets))
    class_sums = np.zeros((n_batches, n))
    arrivals = np.zeros((n_batches, n), dtype=np.int64)
    appends = np.zeros((n_batches, n), dtype=np.int64)

    rng_state = seed & _MASK64
    word: list[int] = []
    counts = [0] * n
    mask = 0
    cur_idx = 0

    step = 0
    segments = [(warmup, None)] + [(batch_size, b) for b in range(n_batches)]
    for seg_len, batch in segments:
        seg_end = step + seg_len
        occ_last = step
        cls_last = [step] * n
        occ_row = occupancy[batch] if batch is not None else None
        cls_row = class_sums[batch] if batch is not None else None
        arr_row = arrivals[batch] if batch is not None else None
        app_row = appends[batch] if batch is not None else None
        while step < seg_end:
            rng_state = (rng_state + _GAMMA) & _MASK64
            z = rng_state
            z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
            z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
            z ^= z >> 31
            u = (z >> 11) * _INV53
            i = 0
            while u >= cum_alpha[i]:
                i += 1
            compat = adj[i]
            if batch is not None:
                arr_row[i] += 1
            if mask & compat:
                pos = 0
                while not (compat >> word[pos]) & 1:
                    pos += 1
                c = word.pop(pos)
                if batch is not None:
                    cls_row[c] += counts[c] * (step - cls_last[c])
                cls_last[c] = step
                counts[c] -= 1
                if counts[c] == 0:
                    if batch is not None:
                        occ_row[cur_idx] += step - occ_last
                    occ_last = step
                    mask &= ~(1 << c)
                    cur_idx = set_position[mask]
            else:
                word.append(i)
                if batch is not None:
                    app_row[i] += 1
                    cls_row[i] += counts[i] * (step - cls_last[i])
                cls_last[i] = step
                counts[i] += 1
                if counts[i] == 1:
                    if batch is not None:
                        occ_row[cur_idx] += step - occ_last
                    occ_last = step
                    mask |= 1 << i
                    cur_idx = set_position[mask]
            step += 1
        if batch is not None:
            occ_row[cur_idx] += seg_end - occ_last
            for j in range(n):
                cls_row[j] += counts[j] * (seg_end - cls_last[j])
    return occupancy, class_sums, arrivals, appends, list(word)
