"""Pure-Python reference implementations of the enumeration kernels.

Same algorithms and visiting order as ``_kernels.pyx``; used when the compiled
extension is unavailable or when values do not fit in 64 bits.
"""


def min_load_assignment(costs, m):
    """Exhaustive minimum-load assignment over integer processing times.

    ``costs[j][S]`` is the processing time of job ``j`` on machine mask ``S``,
    or ``-1`` when ``S`` is unusable.  Assignments are visited in lexicographic
    order of ``(S_0, ..., S_{n-1})`` and only a strictly better load replaces
    the incumbent, so ties resolve to the lexicographically first assignment.
    Returns ``(load, masks)`` or ``None`` when no job-wise usable assignment exists.
    """
    n = len(costs)
    nm = 1 << m
    cur = [0] * n
    loads = [0] * m
    best = -1
    best_masks = None
    k = 0
    while k >= 0:
        row = costs[k]
        mask = cur[k]
        if mask:
            c = row[mask]
            i = 0
            while mask:
                if mask & 1:
                    loads[i] -= c
                mask >>= 1
                i += 1
        mask = cur[k] + 1
        while mask < nm and row[mask] < 0:
            mask += 1
        if mask >= nm:
            cur[k] = 0
            k -= 1
            continue
        cur[k] = mask
        c = row[mask]
        i = 0
        while mask:
            if mask & 1:
                loads[i] += c
            mask >>= 1
            i += 1
        if k == n - 1:
            mx = max(loads)
            if best < 0 or mx < best:
                best = mx
                best_masks = tuple(cur)
        else:
            k += 1
            cur[k] = 0
    if best_masks is None:
        return None
    return best, best_masks


def exchange_violation(values, n):
    """First ``(S, T, i)`` violating the M-natural exchange inequality, or None.

    For all ``S, T`` and ``i`` in ``S - T`` the check is
    ``v(S) + v(T) <= max(v(S-i) + v(T+i), max_{i' in T-S} v(S-i+i') + v(T-i'+i))``.
    """
    N = 1 << n
    v = values
    for S in range(N):
        for T in range(N):
            d = S & ~T
            if not d:
                continue
            lhs = v[S] + v[T]
            e = T & ~S
            for i in range(n):
                if not d >> i & 1:
                    continue
                bi = 1 << i
                if lhs <= v[S ^ bi] + v[T | bi]:
                    continue
                ok = False
                for i2 in range(n):
                    if e >> i2 & 1:
                        b2 = 1 << i2
                        if lhs <= v[(S ^ bi) | b2] + v[(T ^ b2) | bi]:
                            ok = True
                            break
                if not ok:
                    return S, T, i
    return None
