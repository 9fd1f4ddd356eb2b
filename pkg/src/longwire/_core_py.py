"""Pure-Python recovery kernels (fallback for the compiled extension).

Operates on keys packed into integers, bit i = key bit K_i, with key
lengths up to 64 bits.  The routines mirror longwire._core exactly; both
run the same pipeline: sliding-window Hamming-weight counts, consecutive
count differences, then per-residue-class resolution.
"""

from __future__ import annotations

BACKEND = "python"

_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _check_single(n: int, w: int) -> None:
    if not 1 <= n <= 64:
        raise ValueError("key length must be in [1, 64] for the kernels")
    if w < 1:
        raise ValueError("window width must be >= 1")
    if n < 2 * w - 1:
        raise ValueError("key length must be >= 2w - 1")


def _check_multi(n: int, w: int) -> None:
    if not 1 <= n <= 64:
        raise ValueError("key length must be in [1, 64] for the kernels")
    if w < 1:
        raise ValueError("window width must be >= 1")
    if n < 2 * w + 1:
        raise ValueError("key length must be >= 2w + 1")


def _diff_mask(key: int, n: int, w: int) -> int:
    """Bit j set iff window counts c_j and c_{j+1} differ (j < n - w)."""
    mask = 0
    c = bin(key & ((1 << w) - 1)).count("1")
    for j in range(n - w):
        c_next = c - ((key >> j) & 1) + ((key >> (j + w)) & 1)
        if c_next != c:
            mask |= 1 << j
        c = c_next
    return mask


def recover_single_masks(key: int, n: int, w: int) -> tuple[int, int]:
    """Single sliding-window recovery with an exact Hamming-weight oracle.

    Returns (known_mask, value_mask): positions whose bits resolve, and
    their values.  A residue class resolves iff some count difference
    along its chain is nonzero.
    """
    _check_single(n, w)
    diffs = _diff_mask(key, n, w)
    known = 0
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
                known |= 1 << p
                p += w
    return known, key & known


def recover_multi_masks(key: int, n: int, w: int) -> tuple[int, int]:
    """Two-width recovery: merge the w and w+1 relation chains.

    Equal windows link positions into components; unequal windows pin
    both endpoints.  Every component holding a pin resolves completely.
    """
    _check_multi(n, w)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    pinned = 0
    for width in (w, w + 1):
        c = bin(key & ((1 << width) - 1)).count("1")
        for j in range(n - width):
            c_next = c - ((key >> j) & 1) + ((key >> (j + width)) & 1)
            if c_next == c:
                ra, rb = find(j), find(j + width)
                if ra != rb:
                    parent[ra] = rb
            else:
                pinned |= (1 << j) | (1 << (j + width))
            c = c_next

    root_pinned = [False] * n
    for p in range(n):
        if (pinned >> p) & 1:
            root_pinned[find(p)] = True
    known = 0
    for p in range(n):
        if root_pinned[find(p)]:
            known |= 1 << p
    return known, key & known


_SWEEP_MAX_BITS = 28


def _check_sweep(n: int) -> None:
    if n > _SWEEP_MAX_BITS:
        raise ValueError(f"exhaustive sweeps are limited to {_SWEEP_MAX_BITS}-bit keys")


def sweep_single(n: int, w: int) -> int:
    """Number of keys in [0, 2^n) fully recovered by the single-window pass."""
    _check_single(n, w)
    _check_sweep(n)
    full = (1 << n) - 1 if n < 64 else _M64
    hits = 0
    for key in range(1 << n):
        known, _ = recover_single_masks(key, n, w)
        if known == full:
            hits += 1
    return hits


def sweep_multi(n: int, w: int) -> int:
    """Number of keys in [0, 2^n) fully recovered by the two-width pass."""
    _check_multi(n, w)
    _check_sweep(n)
    full = (1 << n) - 1 if n < 64 else _M64
    hits = 0
    for key in range(1 << n):
        known, _ = recover_multi_masks(key, n, w)
        if known == full:
            hits += 1
    return hits


def trial_key(seed: int, trial: int, n: int) -> int:
    """Deterministic n-bit key for Monte Carlo trial (splitmix64 stream)."""
    if not 1 <= n <= 64:
        raise ValueError("key length must be in [1, 64] for the kernels")
    z = (seed + (trial + 1) * _GOLDEN) & _M64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _M64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _M64
    z ^= z >> 31
    return z & ((1 << n) - 1 if n < 64 else _M64)


def mc_single(n: int, w: int, trials: int, seed: int) -> int:
    """Full single-window recoveries over `trials` uniform random keys."""
    _check_single(n, w)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    full = (1 << n) - 1 if n < 64 else _M64
    hits = 0
    for t in range(trials):
        key = trial_key(seed, t, n)
        known, _ = recover_single_masks(key, n, w)
        if known == full:
            hits += 1
    return hits
