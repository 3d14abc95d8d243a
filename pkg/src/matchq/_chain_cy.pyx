# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled jump-chain kernel; algorithmic twin of ``_chain_py``.

Same FCFM transition rule, same splitmix64 stream, same lazy batch
accumulation. All accumulated quantities are integers, so outputs are
bit-identical to the pure-Python kernel.
"""

from libc.stdlib cimport free, malloc
from libc.stdint cimport int64_t, uint64_t

import numpy as np

BACKEND = "cython"

cdef uint64_t _GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t _MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t _MIX2 = 0x94D049BB133111EBULL
cdef double _INV53 = 1.0 / 9007199254740992.0


def run_chain(
    adj,
    cum_alpha,
    long warmup,
    long n_batches,
    long batch_size,
    unsigned long long seed,
    dict set_position,
    long n_sets,
):
    """See ``matchq._chain_py.run_chain``; identical contract and output."""
    cdef int n = len(adj)
    cdef uint64_t[64] adj_c
    cdef double[64] cum_c
    cdef long[64] counts
    cdef long[64] cls_last
    cdef int k
    for k in range(n):
        adj_c[k] = <uint64_t> adj[k]
        cum_c[k] = cum_alpha[k]
        counts[k] = 0

    occupancy = np.zeros((n_batches, n_sets))
    class_sums = np.zeros((n_batches, n))
    arrivals = np.zeros((n_batches, n), dtype=np.int64)
    appends = np.zeros((n_batches, n), dtype=np.int64)
    cdef double[:, ::1] occ_v = occupancy
    cdef double[:, ::1] cls_v = class_sums
    cdef int64_t[:, ::1] arr_v = arrivals
    cdef int64_t[:, ::1] app_v = appends

    cdef long capacity = 1024
    cdef int* word = <int*> malloc(capacity * sizeof(int))
    if word == NULL:
        raise MemoryError()
    cdef long word_len = 0

    cdef uint64_t rng_state = seed
    cdef uint64_t mask = 0, compat = 0, z = 0
    cdef long cur_idx = 0
    cdef long step = 0, seg_end = 0, occ_last = 0
    cdef long seg = 0, batch = 0, pos = 0, q = 0
    cdef int i = 0, c = 0
    cdef bint accumulate
    cdef double u
    cdef int* bigger

    try:
        for seg in range(n_batches + 1):
            accumulate = seg > 0
            batch = seg - 1
            seg_end = step + (batch_size if accumulate else warmup)
            occ_last = step
            for k in range(n):
                cls_last[k] = step
            while step < seg_end:
                rng_state += _GAMMA
                z = rng_state
                z = (z ^ (z >> 30)) * _MIX1
                z = (z ^ (z >> 27)) * _MIX2
                z ^= z >> 31
                u = <double> (z >> 11) * _INV53
                i = 0
                while u >= cum_c[i]:
                    i += 1
                compat = adj_c[i]
                if accumulate:
                    arr_v[batch, i] += 1
                if mask & compat:
                    pos = 0
                    while not (compat >> word[pos]) & 1:
                        pos += 1
                    c = word[pos]
                    for q in range(pos, word_len - 1):
                        word[q] = word[q + 1]
                    word_len -= 1
                    if accumulate:
                        cls_v[batch, c] += <double> (counts[c] * (step - cls_last[c]))
                    cls_last[c] = step
                    counts[c] -= 1
                    if counts[c] == 0:
                        if accumulate:
                            occ_v[batch, cur_idx] += <double> (step - occ_last)
                        occ_last = step
                        mask &= ~(<uint64_t> 1 << c)
                        cur_idx = set_position[mask]
                else:
                    if word_len == capacity:
                        capacity *= 2
                        bigger = <int*> malloc(capacity * sizeof(int))
                        if bigger == NULL:
                            raise MemoryError()
                        for q in range(word_len):
                            bigger[q] = word[q]
                        free(word)
                        word = bigger
                    word[word_len] = i
                    word_len += 1
                    if accumulate:
                        app_v[batch, i] += 1
                        cls_v[batch, i] += <double> (counts[i] * (step - cls_last[i]))
                    cls_last[i] = step
                    counts[i] += 1
                    if counts[i] == 1:
                        if accumulate:
                            occ_v[batch, cur_idx] += <double> (step - occ_last)
                        occ_last = step
                        mask |= <uint64_t> 1 << i
                        cur_idx = set_position[mask]
                step += 1
            if accumulate:
                occ_v[batch, cur_idx] += <double> (seg_end - occ_last)
                for k in range(n):
                    cls_v[batch, k] += <double> (counts[k] * (seg_end - cls_last[k]))
        final_word = [word[q] for q in range(word_len)]
    finally:
        free(word)
    return occupancy, class_sums, arrivals, appends, final_word
