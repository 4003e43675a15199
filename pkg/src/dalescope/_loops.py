"""Inner loops of the fixed-point engine.

Everything here works on raw ``int32`` arrays and small integer codes so the
same source compiles under numba or runs as plain Python.  Window sets arrive
as a ``(n_windows, 9)`` uint8 membership matrix over e1..e9.
"""

import numpy as np

from ._jit import njit, njit_inline

EXPAND = 0
CONTRACT = 1

GUARD_NONE = 0
GUARD_GE = 1
GUARD_GT = 2

ORDER_RASTER = 0
ORDER_REVERSE = 1
ORDER_RANDOM = 2

_DR = np.array([-1, -1, -1, 0, 0, 0, 1, 1, 1], dtype=np.int64)
_DC = np.array([-1, 0, 1, -1, 0, 1, -1, 0, 1], dtype=np.int64)


@njit
def window_offsets(wins, row_stride):
    """Membership matrix -> flat offsets per window in a buffer with ``row_stride``.

    Returns ``(offsets, lengths)``; row ``i`` of ``offsets`` holds the first
    ``lengths[i]`` entries of window ``i``.
    """
    nwin = wins.shape[0]
    off = np.zeros((nwin, 9), dtype=np.int64)
    wlen = np.zeros(nwin, dtype=np.int64)
    for wi in range(nwin):
        n = 0
        for k in range(9):
            if wins[wi, k] != 0:
                off[wi, n] = _DR[k] * row_stride + _DC[k]
                n += 1
        wlen[wi] = n
    return off, wlen


@njit
def to_padded(a, border):
    """Copy ``a`` into a flat buffer with a one-cell ring of ``border``."""
    h, w = a.shape
    stride = w + 2
    buf = np.full((h + 2) * stride, border, dtype=np.int32)
    for r in range(h):
        for c in range(w):
            buf[(r + 1) * stride + c + 1] = a[r, c]
    return buf


@njit
def from_padded(buf, a):
    h, w = a.shape
    stride = w + 2
    for r in range(h):
        for c in range(w):
            a[r, c] = buf[(r + 1) * stride + c + 1]


@njit_inline
def eval_flat(buf, refbuf, p, off, wlen, mode, guard, floor_at_ref):
    """New value of the cell at flat position ``p`` (the ring never changes)."""
    e5 = buf[p]
    t5 = refbuf[p]
    if guard == GUARD_GT:
        if e5 <= t5:
            return e5
    elif guard == GUARD_GE:
        if e5 < t5:
            return e5
    best = e5
    for wi in range(off.shape[0]):
        if mode == EXPAND:
            agg = np.int32(2147483647)
            for j in range(wlen[wi]):
                v = buf[p + off[wi, j]]
                if v < agg:
                    agg = v
            if agg > best:
                best = agg
        else:
            agg = np.int32(-1)
            for j in range(wlen[wi]):
                v = buf[p + off[wi, j]]
                if v > agg:
                    agg = v
            if agg < best:
                best = agg
    if floor_at_ref and mode == CONTRACT and guard != GUARD_NONE and best < t5:
        best = t5
    return best


@njit
def eval_cell(cur, ref, r, c, wins, mode, guard, border, floor_at_ref):
    """Single-cell evaluation on an unpadded grid (used by tests and tools)."""
    h, w = cur.shape
    e = np.empty((3, 3), dtype=np.int32)
    t = np.zeros((3, 3), dtype=np.int32)
    for k in range(9):
        rr = r + _DR[k]
        cc = c + _DC[k]
        if 0 <= rr < h and 0 <= cc < w:
            e[_DR[k] + 1, _DC[k] + 1] = cur[rr, cc]
        else:
            e[_DR[k] + 1, _DC[k] + 1] = border
    t[1, 1] = ref[r, c]
    off, wlen = window_offsets(wins, 3)
    return eval_flat(e.ravel(), t.ravel(), 4, off, wlen, mode, guard, floor_at_ref)


@njit
def _next_random(state):
    # xorshift64*, kept in int64 with explicit masking so plain Python agrees
    x = state
    x ^= (x >> 12) & 0x000FFFFFFFFFFFFF
    x ^= (x << 25) & 0x7FFFFFFFFFFFFFFF
    x ^= (x >> 27) & 0x0000001FFFFFFFFF
    x &= 0x7FFFFFFFFFFFFFFF
    if x == 0:
        x = 88172645463325252
    return x


@njit
def sweep_fixpoint(cur, ref, wins, mode, guard, border, floor_at_ref, order, seed, max_passes):
    """In-place sweeps in a fixed or random order until a sweep changes nothing.

    ``cur`` is modified in place.  ``max_passes <= 0`` means unbounded.
    Returns ``(passes, updates, undershoots, converged)``.
    """
    h, w = cur.shape
    n = h * w
    stride = w + 2
    buf = to_padded(cur, border)
    refbuf = to_padded(ref, 0)
    off, wlen = window_offsets(wins, stride)
    # visiting order as buffer positions
    pos = np.empty(n, dtype=np.int64)
    for i in range(n):
        idx = n - 1 - i if order == ORDER_REVERSE else i
        pos[i] = (idx // w + 1) * stride + idx % w + 1
    state = (seed * 2654435761 + 1) & 0x7FFFFFFFFFFFFFFF
    if state == 0:
        state = 1
    passes = 0
    updates = 0
    undershoots = 0
    converged = False
    while max_passes <= 0 or passes < max_passes:
        passes += 1
        if order == ORDER_RANDOM:
            for i in range(n - 1, 0, -1):
                state = _next_random(state)
                j = state % (i + 1)
                t = pos[i]
                pos[i] = pos[j]
                pos[j] = t
        changed = 0
        for i in range(n):
            p = pos[i]
            old = buf[p]
            new = eval_flat(buf, refbuf, p, off, wlen, mode, guard, floor_at_ref)
            if new != old:
                buf[p] = new
                changed += 1
                if mode == CONTRACT and guard != GUARD_NONE and new < refbuf[p]:
                    undershoots += 1
        updates += changed
        if changed == 0:
            converged = True
            break
    from_padded(buf, cur)
    return passes, updates, undershoots, converged


@njit
def worklist_fixpoint(cur, ref, wins, mode, guard, border, floor_at_ref, max_passes):
    """Seed every cell; whenever a cell changes, re-enqueue its 8 neighbors.

    A pass is one generation of the queue.
    """
    h, w = cur.shape
    n = h * w
    stride = w + 2
    buf = to_padded(cur, border)
    refbuf = to_padded(ref, 0)
    off, wlen = window_offsets(wins, stride)
    queue = np.empty(n, dtype=np.int64)
    queued = np.ones(n, dtype=np.uint8)
    for i in range(n):
        queue[i] = i
    head = 0
    size = n
    passes = 0
    updates = 0
    undershoots = 0
    converged = True
    while size > 0:
        if max_passes > 0 and passes >= max_passes:
            converged = False
            break
        passes += 1
        generation = size
        for _ in range(generation):
            idx = queue[head]
            head = (head + 1) % n
            size -= 1
            queued[idx] = 0
            r = idx // w
            c = idx % w
            p = (r + 1) * stride + c + 1
            old = buf[p]
            new = eval_flat(buf, refbuf, p, off, wlen, mode, guard, floor_at_ref)
            if new == old:
                continue
            buf[p] = new
            updates += 1
            if mode == CONTRACT and guard != GUARD_NONE and new < refbuf[p]:
                undershoots += 1
            for k in range(9):
                if k == 4:
                    continue
                rr = r + _DR[k]
                cc = c + _DC[k]
                if 0 <= rr < h and 0 <= cc < w:
                    j = rr * w + cc
                    if queued[j] == 0:
                        queued[j] = 1
                        queue[(head + size) % n] = j
                        size += 1
    from_padded(buf, cur)
    return passes, updates, undershoots, converged


def synchronous_fixpoint(cur, ref, wins, mode, guard, border, floor_at_ref, max_passes):
    """Double-buffered vectorized rounds: every cell reads the previous round.

    Pure numpy; this is the fallback when numba is switched off.
    """
    h, w = cur.shape
    members = [np.flatnonzero(row) for row in wins]
    passes = 0
    updates = 0
    undershoots = 0
    while True:
        if max_passes > 0 and passes >= max_passes:
            return passes, updates, undershoots, False
        passes += 1
        padded = np.pad(cur, 1, mode="constant", constant_values=border)
        views = [padded[1 + _DR[k]:1 + _DR[k] + h, 1 + _DC[k]:1 + _DC[k] + w] for k in range(9)]
        best = cur.copy()
        for idx in members:
            if mode == EXPAND:
                agg = np.minimum.reduce([views[k] for k in idx])
                np.maximum(best, agg, out=best)
            else:
                agg = np.maximum.reduce([views[k] for k in idx])
                np.minimum(best, agg, out=best)
        if guard != GUARD_NONE:
            active = cur > ref if guard == GUARD_GT else cur >= ref
            if floor_at_ref and mode == CONTRACT:
                best = np.maximum(best, ref)
            best = np.where(active, best, cur)
        changed = best != cur
        n_changed = int(changed.sum())
        if mode == CONTRACT and guard != GUARD_NONE:
            undershoots += int((changed & (best < ref)).sum())
        updates += n_changed
        cur[...] = best
        if n_changed == 0:
            return passes, updates, undershoots, True


@njit
def waterfall_fill(ref, filled, out, max_passes):
    """Raster sweeps of the waterfall rule until nothing more is filled.

    ``filled`` marks disallowed (already filled) cells; ``out`` holds filled
    values.  Both are modified in place.
    """
    h, w = ref.shape
    passes = 0
    updates = 0
    while True:
        if max_passes > 0 and passes >= max_passes:
            return passes, updates, False
        passes += 1
        changed = 0
        for r in range(h):
            for c in range(w):
                if filled[r, c]:
                    continue
                best = -1
                for k in (1, 3, 5, 7):
                    rr = r + _DR[k]
                    cc = c + _DC[k]
                    if 0 <= rr < h and 0 <= cc < w and filled[rr, cc]:
                        if out[rr, cc] > best:
                            best = out[rr, cc]
                if best >= 0 and ref[r, c] <= best:
                    out[r, c] = ref[r, c]
                    filled[r, c] = 1
                    changed += 1
        updates += changed
        if changed == 0:
            return passes, updates, True


@njit
def slope_ray(cur, peak, max_passes):
    """Raster sweeps of the slope-ray rule; returns (passes, converged)."""
    h, w = cur.shape
    passes = 0
    while True:
        if max_passes > 0 and passes >= max_passes:
            return passes, False
        passes += 1
        changed = 0
        for r in range(h):
            for c in range(w):
                e4 = cur[r, c - 1] if c > 0 else 0
                e8 = cur[r + 1, c] if r + 1 < h else 0
                if e4 > 1:
                    new = e4 - 1
                elif e8 == 1:
                    new = peak
                else:
                    continue
                if new != cur[r, c]:
                    cur[r, c] = new
                    changed += 1
        if changed == 0:
            return passes, True
