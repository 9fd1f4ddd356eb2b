# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled recovery kernels; see longwire._core_py for the reference twin.

Keys are packed into 64-bit integers, bit i = key bit K_i.  Keep the two
implementations in lockstep: the test suite asserts they agree.
"""

from libc.stdint cimport int64_t, uint64_t

BACKEND = "c"

cdef uint64_t _GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline int _popcount(uint64_t v) noexcept nogil:
    cdef int n = 0
    while v:
        v &= v - 1
        n += 1
    return n


cdef inline uint64_t _full_mask(int n) noexcept nogil:
    if n >= 64:
        return <uint64_t>0xFFFFFFFFFFFFFFFFULL
    return (<uint64_t>1 << n) - 1


def _check_single(int n, int w):
    if n < 1 or n > 64:
        raise ValueError("key length must be in [1, 64] for the kernels")
    if w < 1:
        raise ValueError("window width must be >= 1")
    if n < 2 * w - 1:
        raise ValueError("key length must be >= 2w - 1")


_SWEEP_MAX_BITS = 28


def _check_sweep(int n):
    if n > _SWEEP_MAX_BITS:
        raise ValueError(f"exhaustive sweeps are limited to {_SWEEP_MAX_BITS}-bit keys")


def _check_multi(int n, int w):
    if n < 1 or n > 64:
        raise ValueError("key length must be in [1, 64] for the kernels")
    if w < 1:
        raise ValueError("window width must be >= 1")
    if n < 2 * w + 1:
        raise ValueError("key length must be >= 2w + 1")


cdef uint64_t _diff_mask(uint64_t key, int n, int w) noexcept nogil:
    cdef uint64_t mask = 0
    cdef int c, c_next, j
    c = _popcount(key & _full_mask(w))
    for j in range(n - w):
        c_next = c - <int>((key >> j) & 1) + <int>((key >> (j + w)) & 1)
        if c_next != c:
            mask |= <uint64_t>1 << j
        c = c_next
    return mask


cdef uint64_t _recover_single(uint64_t key, int n, int w) noexcept nogil:
    """Known-positions mask for the single-window pass."""
    cdef uint64_t diffs = _diff_mask(key, n, w)
    cdef uint64_t known = 0
    cdef int r, j, p
    cdef bint resolved
    for r in range(w):
        resolved = False
        j = r
        while j < n - w:
            if (diffs >> j) & 1:
                resolved = True
                break
            j += w
        if resolved:
            p = r
            while p < n:
                known |= <uint64_t>1 << p
                p += w
    return known


cdef int _find(int* parent, int a) noexcept nogil:
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


cdef uint64_t _recover_multi(uint64_t key, int n, int w) noexcept nogil:
    cdef int parent[64]
    cdef bint root_pinned[64]
    cdef uint64_t pinned = 0, known = 0
    cdef int c, c_next, j, p, ra, rb, width
    for p in range(n):
        parent[p] = p
        root_pinned[p] = False
    for width in range(w, w + 2):
        c = _popcount(key & _full_mask(width))
        for j in range(n - width):
            c_next = c - <int>((key >> j) & 1) + <int>((key >> (j + width)) & 1)
            if c_next == c:
                ra = _find(parent, j)
                rb = _find(parent, j + width)
                if ra != rb:
                    parent[ra] = rb
            else:
                pinned |= (<uint64_t>1 << j) | (<uint64_t>1 << (j + width))
            c = c_next
    for p in range(n):
        if (pinned >> p) & 1:
            root_pinned[_find(parent, p)] = True
    for p in range(n):
        if root_pinned[_find(parent, p)]:
            known |= <uint64_t>1 << p
    return known


def recover_single_masks(key, int n, int w):
    """Single sliding-window recovery; returns (known_mask, value_mask)."""
    _check_single(n, w)
    cdef uint64_t k = <uint64_t>(key & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t known = _recover_single(k, n, w)
    return known, k & known


def recover_multi_masks(key, int n, int w):
    """Two-width (w and w+1) recovery; returns (known_mask, value_mask)."""
    _check_multi(n, w)
    cdef uint64_t k = <uint64_t>(key & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t known = _recover_multi(k, n, w)
    return known, k & known


def sweep_single(int n, int w):
    """Number of keys in [0, 2^n) fully recovered by the single-window pass."""
    _check_single(n, w)
    _check_sweep(n)
    cdef uint64_t full = _full_mask(n)
    cdef uint64_t key
    cdef int64_t hits = 0
    cdef uint64_t total = <uint64_t>1 << n
    with nogil:
        for key in range(total):
            if _recover_single(key, n, w) == full:
                hits += 1
    return hits


def sweep_multi(int n, int w):
    """Number of keys in [0, 2^n) fully recovered by the two-width pass."""
    _check_multi(n, w)
    _check_sweep(n)
    cdef uint64_t full = _full_mask(n)
    cdef uint64_t key
    cdef int64_t hits = 0
    cdef uint64_t total = <uint64_t>1 << n
    with nogil:
        for key in range(total):
            if _recover_multi(key, n, w) == full:
                hits += 1
    return hits


cdef inline uint64_t _trial_key(uint64_t seed, uint64_t trial, int n) noexcept nogil:
    cdef uint64_t z = seed + (trial + 1) * _GOLDEN
    z ^= z >> 30
    z *= 0xBF58476D1CE4E5B9ULL
    z ^= z >> 27
    z *= 0x94D049BB133111EBULL
    z ^= z >> 31
    return z & _full_mask(n)


def trial_key(seed, trial, int n):
    """Deterministic n-bit key for Monte Carlo trial (splitmix64 stream)."""
    if n < 1 or n > 64:
        raise ValueError("key length must be in [1, 64] for the kernels")
    return _trial_key(<uint64_t>(seed & 0xFFFFFFFFFFFFFFFF), <uint64_t>trial, n)


def mc_single(int n, int w, trials, seed):
    """Full single-window recoveries over `trials` uniform random keys."""
    _check_single(n, w)
    cdef int64_t t, num = <int64_t>trials
    if num < 1:
        raise ValueError("trials must be >= 1")
    cdef uint64_t s = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t full = _full_mask(n)
    cdef uint64_t key
    cdef int64_t hits = 0
    with nogil:
        for t in range(num):
            key = _trial_key(s, <uint64_t>t, n)
            if _recover_single(key, n, w) == full:
                hits += 1
    return hits
