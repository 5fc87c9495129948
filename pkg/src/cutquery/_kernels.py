"""Compiled inner loops for the oracle's structured query families.

Each kernel plays two roles in sequence: it first computes the answers
to a family's cut queries from the edge index (the oracle's side), then
runs the decoder over those answers alone (the algorithm's side).  The
two halves share no state except the answer buffers.

Hashes are seeded splitmix64 values, so every query set is a fixed
function of (instance seed, vertex id) and can be written down before
any answer exists.
"""

import numpy as np
from numba import njit

P31 = np.uint64(2147483647)
_G = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

# hash salts
LEVEL = 1
BUCKET = 2
PICK = 3
COIN = 4
CHAIN = 5


@njit(cache=True, inline="always")
def mix(x):
    z = x + _G
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def h3(seed, a, b):
    return mix(mix(seed ^ mix(np.uint64(a))) ^ np.uint64(b))


@njit(cache=True, inline="always")
def unit(h):
    return float(h >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True, inline="always")
def geo_level(seed, salt, x, cap):
    h = h3(seed, salt * 1000003 + 17, x)
    lv = 0
    while lv < cap and (h >> np.uint64(lv)) & np.uint64(1):
        lv += 1
    return lv


@njit(cache=True, inline="always")
def coeffs(seed, salt, r):
    a = h3(seed, salt * 7919 + 3, 2 * r) % (P31 - np.uint64(1)) + np.uint64(1)
    b = h3(seed, salt * 7919 + 3, 2 * r + 1) % P31
    return a, b


@njit(cache=True, inline="always")
def bucket(a, b, x, width):
    # (a x + b) mod (2^31 - 1) by Mersenne folding, then scaled to [0, width)
    y = a * np.uint64(x) + b
    y = (y & P31) + (y >> np.uint64(31))
    y = (y & P31) + (y >> np.uint64(31))
    if y >= P31:
        y -= P31
    return np.int64((y * np.uint64(width)) >> np.uint64(31))


@njit(cache=True)
def star_members(indptr, nbr, wt, c, mask, xs, ws):
    """Neighbors of c inside the mask; returns count written to xs/ws."""
    k = 0
    for p in range(indptr[c], indptr[c + 1]):
        x = nbr[p]
        if mask[x]:
            xs[k] = x
            ws[k] = wt[p]
            k += 1
    return k


@njit(cache=True)
def edge_weight(indptr, nbr, wt, c, x):
    lo = indptr[c]
    hi = indptr[c + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        if nbr[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    if lo < indptr[c + 1] and nbr[lo] == x:
        return wt[lo]
    return 0.0


# ------------------------------------------------------------ uniform sampler

@njit(cache=True)
def recover_level(xs, ws, lv, k, minlevel, seed, reps, nbuckets, nbits,
                  tot, bits, touched, rx, rw):
    """Bucket-and-bit-test recovery of the star restricted to lv >= minlevel.

    Writes recovered (endpoint, weight) pairs into rx/rw and returns how
    many.  Buffers tot/bits must be zero on entry and are left zero.
    """
    nrec = 0
    for r in range(reps):
        a, b = coeffs(seed, r + 11, minlevel)
        nt = 0
        # oracle: bucket totals and bit-restricted totals
        for t in range(k):
            if lv[t] < minlevel:
                continue
            bk = bucket(a, b, xs[t], nbuckets)
            if tot[bk] == 0.0:
                touched[nt] = bk
                nt += 1
            tot[bk] += ws[t]
            for z in range(nbits):
                if (xs[t] >> z) & 1:
                    bits[bk, z] += ws[t]
        # decoder: a singleton bucket spells out its endpoint
        for s in range(nt):
            bk = touched[s]
            total = tot[bk]
            x = 0
            single = True
            for z in range(nbits):
                v = bits[bk, z]
                if v == total:
                    x |= 1 << z
                elif v != 0.0:
                    single = False
            if single:
                seen = False
                for e in range(nrec):
                    if rx[e] == x:
                        seen = True
                if not seen:
                    rx[nrec] = x
                    rw[nrec] = total
                    nrec += 1
            tot[bk] = 0.0
            bits[bk, :] = 0.0
    return nrec


@njit(cache=True)
def sparse_recover(indptr, nbr, wt, center, mask, seed, reps, nbuckets, nbits):
    n = mask.shape[0]
    xs = np.empty(n, np.int64)
    ws = np.empty(n, np.float64)
    k = star_members(indptr, nbr, wt, center, mask, xs, ws)
    lv = np.zeros(max(k, 1), np.int64)
    tot = np.zeros(nbuckets, np.float64)
    bits = np.zeros((nbuckets, nbits), np.float64)
    touched = np.empty(max(k, 1), np.int64)
    rx = np.empty(max(k, 1) * reps, np.int64)
    rw = np.empty(max(k, 1) * reps, np.float64)
    total = 0.0
    for t in range(k):
        total += ws[t]
    nrec = recover_level(xs, ws, lv, k, 0, seed, reps, nbuckets, nbits,
                         tot, bits, touched, rx, rw)
    return rx[:nrec], rw[:nrec], total


@njit(cache=True)
def uniform_star(indptr, nbr, wt, centers, mask_ids, masks, seeds,
                 levels, reps, nbuckets, nbits):
    """Decode one uniform edge sample per instance.

    out_x: endpoint, -1 for Empty, -2 for Fail.
    """
    q = len(centers)
    n = masks.shape[1]
    out_x = np.empty(q, np.int64)
    out_w = np.zeros(q, np.float64)
    out_lv = np.zeros(q, np.int64)
    xs = np.empty(n, np.int64)
    ws = np.empty(n, np.float64)
    lv = np.empty(n, np.int64)
    lw = np.zeros(levels + 1, np.float64)
    tot = np.zeros(nbuckets, np.float64)
    bits = np.zeros((nbuckets, nbits), np.float64)
    touched = np.empty(n, np.int64)
    rx = np.empty(n, np.int64)
    rw = np.empty(n, np.float64)
    for j in range(q):
        c = centers[j]
        seed = seeds[j]
        k = star_members(indptr, nbr, wt, c, masks[mask_ids[j]], xs, ws)
        # oracle: level weights w(E(c, T_i))
        lw[:] = 0.0
        for t in range(k):
            lv[t] = geo_level(seed, 1, xs[t], levels)
            for i in range(lv[t] + 1):
                lw[i] += ws[t]
        jstar = -1
        for i in range(levels + 1):
            if lw[i] > 0.0:
                jstar = i
        if jstar < 0:
            out_x[j] = -1
            continue
        nrec = recover_level(xs, ws, lv, k, jstar, seed, reps, nbuckets, nbits,
                             tot, bits, touched, rx, rw)
        got = 0.0
        for e in range(nrec):
            got += rw[e]
        if nrec == 0 or abs(got - lw[jstar]) > 1e-9 * lw[jstar]:
            out_x[j] = -2
            continue
        pick = int(unit(h3(seed, PICK, 0)) * nrec)
        out_x[j] = rx[pick]
        out_w[j] = rw[pick]
        out_lv[j] = jstar
    return out_x, out_w, out_lv


# ------------------------------------------------------------ degree estimate

@njit(cache=True)
def degree_chain(indptr, nbr, wt, centers, mask_ids, masks, seeds, reps, chain):
    q = len(centers)
    n = masks.shape[1]
    out = np.zeros(q, np.int64)
    xs = np.empty(n, np.int64)
    ws = np.empty(n, np.float64)
    cnt = np.zeros(chain + 1, np.float64)
    ests = np.empty(reps, np.float64)
    for j in range(q):
        k = star_members(indptr, nbr, wt, centers[j], masks[mask_ids[j]], xs, ws)
        for r in range(reps):
            cnt[:] = 0.0
            for t in range(k):
                lv = geo_level(seeds[j], CHAIN + 10 * r, xs[t], chain)
                for i in range(lv + 1):
                    cnt[i] += ws[t]
            if cnt[0] == 0.0:
                ests[r] = 0.0
                continue
            a = chain
            for i in range(chain + 1):
                if cnt[i] == 0.0:
                    a = i
                    break
            ests[r] = 2.0 ** (a - 1)
        out[j] = int(np.median(ests))
    return out


# ------------------------------------------------------------ count-min

@njit(cache=True)
def countmin_star(indptr, nbr, wt, center, mask, seed, level, d, width, lvcap):
    """Count-min estimates w~(y) for every y in T at one level (standalone use).

    Returns (ys, est) for y in T_level with positive estimate, and the
    star weight at that level.
    """
    n = mask.shape[0]
    xs = np.empty(n, np.int64)
    ws = np.empty(n, np.float64)
    k = star_members(indptr, nbr, wt, center, mask, xs, ws)
    buf = np.zeros((d, width), np.float64)
    total = 0.0
    for t in range(k):
        if geo_level(seed, LEVEL, xs[t], lvcap) < level:
            continue
        total += ws[t]
        for r in range(d):
            a, b = coeffs(seed, BUCKET, r)
            buf[r, bucket(a, b, xs[t], width)] += ws[t]
    ys = np.empty(n, np.int64)
    est = np.empty(n, np.float64)
    m = 0
    for y in range(n):
        if not mask[y] or y == center:
            continue
        if geo_level(seed, LEVEL, y, lvcap) < level:
            continue
        e = np.inf
        for r in range(d):
            a, b = coeffs(seed, BUCKET, r)
            v = buf[r, bucket(a, b, y, width)]
            if v < e:
                e = v
        if e > 0.0:
            ys[m] = y
            est[m] = e
            m += 1
    return ys[:m], est[:m], total


# ------------------------------------------------------------ weighted sampler

@njit(cache=True)
def weighted_round1(indptr, nbr, wt, centers, mask_ids, masks, seeds,
                    levels, d, width, cap):
    """Round one of weighted sampling: star weight and count-min candidates.

    Returns star weights, a status per instance (0 ok, 1 empty, 2 too many
    candidates), candidate offsets, candidate ids and per-candidate level
    bitmasks.  Bucket positions depend on the row only, so each member's
    positions are hashed once and reused across levels.
    """
    q = len(centers)
    n = masks.shape[1]
    Ws = np.zeros(q, np.float64)
    status = np.zeros(q, np.int64)
    ptr = np.zeros(q + 1, np.int64)
    out_x = np.empty(q * 4 + 16, np.int64)
    out_m = np.empty(q * 4 + 16, np.uint64)
    xs = np.empty(n, np.int64)
    ws = np.empty(n, np.float64)
    lvx = np.empty(n, np.int64)
    tmem = np.empty(n, np.int64)
    lvt = np.empty(n, np.int64)
    bk = np.empty((n, d), np.int64)
    pos = np.empty(n, np.int64)
    pos[:] = -1
    buf = np.zeros((d, width), np.float64)
    ca = np.empty(d, np.uint64)
    cb = np.empty(d, np.uint64)
    cmask = np.zeros(n, np.uint64)
    clist = np.empty(n, np.int64)
    used = 0
    for j in range(q):
        c = centers[j]
        seed = seeds[j]
        mask = masks[mask_ids[j]]
        k = star_members(indptr, nbr, wt, c, mask, xs, ws)
        total = 0.0
        for t in range(k):
            total += ws[t]
            lvx[t] = geo_level(seed, LEVEL, xs[t], levels)
        Ws[j] = total
        ptr[j + 1] = used
        if total == 0.0:
            status[j] = 1
            continue
        for r in range(d):
            ca[r], cb[r] = coeffs(seed, BUCKET, r)
        for t in range(k):
            for r in range(d):
                bk[t, r] = bucket(ca[r], cb[r], xs[t], width)
        for t in range(k):
            pos[xs[t]] = t
        nt = 0
        for y in range(n):
            if mask[y] and y != c:
                tmem[nt] = y
                lvt[nt] = geo_level(seed, LEVEL, y, levels)
                nt += 1
        nc = 0
        thr = total / 32.0
        for i in range(levels + 1):
            active = 0
            for t in range(k):
                if lvx[t] >= i:
                    active += 1
                    for r in range(d):
                        buf[r, bk[t, r]] += ws[t]
            if active == 0:
                break
            for s in range(nt):
                if lvt[s] < i:
                    continue
                y = tmem[s]
                t = pos[y]
                ok = True
                for r in range(d):
                    if t >= 0:
                        b = bk[t, r]
                    else:
                        b = bucket(ca[r], cb[r], y, width)
                    if buf[r, b] < thr:
                        ok = False
                        break
                if ok:
                    if cmask[y] == 0:
                        clist[nc] = y
                        nc += 1
                    cmask[y] |= np.uint64(1) << np.uint64(i)
            for t in range(k):
                if lvx[t] >= i:
                    for r in range(d):
                        buf[r, bk[t, r]] = 0.0
            thr *= 0.5
        for t in range(k):
            pos[xs[t]] = -1
        if nc >= cap:
            status[j] = 2
        if used + nc > len(out_x):
            grow = max(len(out_x) * 2, used + nc + 16)
            nx = np.empty(grow, np.int64)
            nm = np.empty(grow, np.uint64)
            nx[:used] = out_x[:used]
            nm[:used] = out_m[:used]
            out_x = nx
            out_m = nm
        for s in range(nc):
            y = clist[s]
            out_x[used] = y
            out_m[used] = cmask[y]
            cmask[y] = np.uint64(0)
            used += 1
        ptr[j + 1] = used
    return Ws, status, ptr, out_x[:used], out_m[:used]


@njit(cache=True)
def candidate_weights(indptr, nbr, wt, centers, ptr, cand):
    out = np.zeros(len(cand), np.float64)
    for j in range(len(centers)):
        c = centers[j]
        for p in range(ptr[j], ptr[j + 1]):
            out[p] = edge_weight(indptr, nbr, wt, c, cand[p])
    return out


@njit(cache=True)
def weighted_decode(seeds, Ws, status, ptr, cand, cmask, cw, levels, shift):
    """Acceptance step; out_x = endpoint, -1 Empty, -2 Fail."""
    q = len(seeds)
    out_x = np.empty(q, np.int64)
    out_w = np.zeros(q, np.float64)
    out_lv = np.zeros(q, np.int64)
    for j in range(q):
        if status[j] == 1:
            out_x[j] = -1
            continue
        if status[j] == 2:
            out_x[j] = -2
            continue
        total = Ws[j]
        lo = ptr[j]
        hi = ptr[j + 1]
        nf = hi - lo
        assigned = np.full(nf, -1, np.int64)
        psum = 0.0
        for i in range(levels + 1):
            low = total / 2.0 ** (i + 5)
            high = total / 2.0 ** i
            for p in range(lo, hi):
                if assigned[p - lo] >= 0:
                    continue
                if (cmask[p] >> np.uint64(i)) & np.uint64(1) == 0:
                    continue
                w = cw[p]
                if w >= low and w <= high:
                    assigned[p - lo] = i
                    psum += 2.0 ** (i - shift) * w / total
        if psum > 1.0:
            out_x[j] = -2
            continue
        u = unit(h3(seeds[j], COIN, 0))
        acc = 0.0
        out_x[j] = -2
        for p in range(lo, hi):
            i = assigned[p - lo]
            if i < 0:
                continue
            acc += 2.0 ** (i - shift) * cw[p] / total
            if u < acc:
                out_x[j] = cand[p]
                out_w[j] = cw[p]
                out_lv[j] = i
                break
    return out_x, out_w, out_lv
