"""Compiled hot loops for walk enumeration and subset counting.

Everything here is exact 64-bit integer work; the Python layer combines
partial results with arbitrary-precision arithmetic.  Per-record counters
cannot overflow 64 bits for walk lengths up to 18 (worst case: a counter
summed over a full 48-element orbit is below 48 * Z_18 ~ 1.1e14), and the
enumeration itself is computationally infeasible long before that.

Subset keys
-----------
A visited-site subset is a strictly sorted sequence of at most 15 site
keys, each below 2^15 (encoding bound <= 15).  It is packed into four
64-bit words holding the keys in *descending* order, 16 bits per slot,
slot 0 in the top bits of word 0.  The subset size is stuffed into the
low 16 bits of word 3 (slot 15, which is never used for a key).  This
layout lets the subset generator append/remove the smallest element in
O(1): depth-first subset generation picks the largest site first and
extends downward, so a newly added site always lands in the next slot.

Counter tables
--------------
Open addressing with linear probing over two parallel arrays: keys
(cap, 4) and values (cap, 6) = [zcount, pcount, ex, ey, ez, orbit].
A slot is empty iff its orbit field is 0 (live records always have
orbit >= 1).  Tables grow by doubling at 50% load.

Symmetry mode
-------------
Each emitted subset is canonicalized against the 48 signed axis
permutations.  For every group element we maintain, incrementally during
subset generation, a bitmask of the image over the walk's "universe"
(the sorted union of all 48 images of the walk's sites, at most 48*15 =
720 bits).  Two equal-size sets compare lexicographically (as sorted
sequences) by the smallest element of their symmetric difference, which
is one xor + lowest-set-bit per 64-bit word, so the minimum over 48
images costs a few hundred simple ops instead of 48 sorts.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .errors import ExactnessError, SawError
from .lattice import octahedral_group

MAX_N = 15
MAX_BOUND = 15

STRATEGY_CODES = {"none": 0, "max-site": 1, "subset-size": 2}

_PERMS = np.array([op.perm for op in octahedral_group()], dtype=np.int64)
_SIGNS = np.array([op.signs for op in octahedral_group()], dtype=np.int64)

_U = np.uint64


@njit(inline="always")
def _hash4(k0, k1, k2, k3):
    h = _U(0x9E3779B97F4A7C15)
    h = (h ^ _U(k0)) * _U(0xBF58476D1CE4E5B9)
    h = (h ^ (h >> _U(31)) ^ _U(k1)) * _U(0x94D049BB133111EB)
    h = (h ^ (h >> _U(29)) ^ _U(k2)) * _U(0xBF58476D1CE4E5B9)
    h = (h ^ (h >> _U(33)) ^ _U(k3)) * _U(0x94D049BB133111EB)
    return h ^ (h >> _U(32))


@njit(inline="always")
def _find_slot(tkeys, tvals, k0, k1, k2, k3):
    # Returns the live slot holding this key, or the first empty slot.
    cap = tkeys.shape[0]
    idx = np.int64(_hash4(k0, k1, k2, k3) & _U(cap - 1))
    while True:
        if tvals[idx, 5] == 0:
            return idx
        if (
            tkeys[idx, 0] == k0
            and tkeys[idx, 1] == k1
            and tkeys[idx, 2] == k2
            and tkeys[idx, 3] == k3
        ):
            return idx
        idx += 1
        if idx == cap:
            idx = 0


@njit(cache=True)
def _grow(tkeys, tvals):
    cap = tkeys.shape[0]
    nkeys = np.zeros((cap * 2, 4), np.int64)
    nvals = np.zeros((cap * 2, 6), np.int64)
    for i in range(cap):
        if tvals[i, 5] != 0:
            idx = _find_slot(nkeys, nvals, tkeys[i, 0], tkeys[i, 1], tkeys[i, 2], tkeys[i, 3])
            for c in range(4):
                nkeys[idx, c] = tkeys[i, c]
            for c in range(6):
                nvals[idx, c] = tvals[i, c]
    return nkeys, nvals


@njit(cache=True)
def _direct(n, first_dir):
    """Count walks, sum squared endpoint norms, and sum endpoint vectors;
    first_dir < 0 means all six first steps, otherwise only the given
    prefix class."""
    bound = n
    side = 2 * bound + 1
    occ = np.zeros(side * side * side, np.uint8)
    dx = np.array((1, -1, 0, 0, 0, 0), np.int64)
    dy = np.array((0, 0, 1, -1, 0, 0), np.int64)
    dz = np.array((0, 0, 0, 0, 1, -1), np.int64)
    xs = np.zeros(n + 1, np.int64)
    ys = np.zeros(n + 1, np.int64)
    zs = np.zeros(n + 1, np.int64)
    ks = np.zeros(n + 1, np.int64)
    dstate = np.zeros(n + 1, np.int64)
    korig = (bound * side + bound) * side + bound
    ks[0] = korig
    occ[korig] = 1
    z = np.int64(0)
    p = np.int64(0)
    sx = np.int64(0)
    sy = np.int64(0)
    sz = np.int64(0)
    depth = 0
    dstate[0] = first_dir if first_dir >= 0 else 0
    limit0 = first_dir + 1 if first_dir >= 0 else 6
    while depth >= 0:
        if depth == n:
            z += 1
            p += xs[n] * xs[n] + ys[n] * ys[n] + zs[n] * zs[n]
            sx += xs[n]
            sy += ys[n]
            sz += zs[n]
            occ[ks[depth]] = 0
            depth -= 1
            continue
        d = dstate[depth]
        lim = limit0 if depth == 0 else 6
        if d >= lim:
            occ[ks[depth]] = 0
            depth -= 1
            continue
        dstate[depth] = d + 1
        nx = xs[depth] + dx[d]
        ny = ys[depth] + dy[d]
        nz = zs[depth] + dz[d]
        nk = ((nx + bound) * side + (ny + bound)) * side + (nz + bound)
        if occ[nk] != 0:
            continue
        depth += 1
        xs[depth] = nx
        ys[depth] = ny
        zs[depth] = nz
        ks[depth] = nk
        occ[nk] = 1
        dstate[depth] = 0
    return z, p, sx, sy, sz


@njit(cache=True)
def _accumulate_nosym(n, bound, first_dir, strat, part_index, part_total, cap_log2):
    """One accumulation pass without symmetry reduction.

    Returns (keys, vals, incidences, walks, err).  Keys/vals hold the live
    table records in table order (unsorted); err is always 0 here.
    """
    side = 2 * bound + 1
    occ = np.zeros(side * side * side, np.uint8)
    dx = np.array((1, -1, 0, 0, 0, 0), np.int64)
    dy = np.array((0, 0, 1, -1, 0, 0), np.int64)
    dz = np.array((0, 0, 0, 0, 1, -1), np.int64)
    xs = np.zeros(n + 1, np.int64)
    ys = np.zeros(n + 1, np.int64)
    zs = np.zeros(n + 1, np.int64)
    ks = np.zeros(n + 1, np.int64)
    dstate = np.zeros(n + 1, np.int64)
    skey = np.zeros(n, np.int64)
    nextcand = np.zeros(n + 2, np.int64)
    wbuf = np.zeros(4, np.int64)

    cap = np.int64(1) << cap_log2
    tkeys = np.zeros((cap, 4), np.int64)
    tvals = np.zeros((cap, 6), np.int64)
    used = np.int64(0)
    incid = np.int64(0)
    nwalks = np.int64(0)

    korig = (bound * side + bound) * side + bound
    ks[0] = korig
    occ[korig] = 1
    depth = 0
    dstate[0] = first_dir if first_dir >= 0 else 0
    limit0 = first_dir + 1 if first_dir >= 0 else 6
    while depth >= 0:
        if depth == n:
            nwalks += 1
            # sorted keys of the nonorigin sites
            for i in range(n):
                v = ks[i + 1]
                j = i - 1
                while j >= 0 and skey[j] > v:
                    skey[j + 1] = skey[j]
                    j -= 1
                skey[j + 1] = v
            ex = xs[n]
            ey = ys[n]
            ez = zs[n]
            r2 = ex * ex + ey * ey + ez * ez

            # all nonempty subsets, generated per maximal site t
            for t in range(n):
                kt = skey[t]
                if strat == 1 and kt % part_total != part_index:
                    continue
                wbuf[0] = kt << 48
                wbuf[1] = 0
                wbuf[2] = 0
                wbuf[3] = 0
                size = 1
                if strat != 2 or size % part_total == part_index:
                    if used * 2 >= cap:
                        tkeys, tvals = _grow(tkeys, tvals)
                        cap = tkeys.shape[0]
                    k3v = wbuf[3] | size
                    idx = _find_slot(tkeys, tvals, wbuf[0], wbuf[1], wbuf[2], k3v)
                    if tvals[idx, 5] == 0:
                        tkeys[idx, 0] = wbuf[0]
                        tkeys[idx, 1] = wbuf[1]
                        tkeys[idx, 2] = wbuf[2]
                        tkeys[idx, 3] = k3v
                        tvals[idx, 5] = 1
                        used += 1
                    tvals[idx, 0] += 1
                    tvals[idx, 1] += r2
                    tvals[idx, 2] += ex
                    tvals[idx, 3] += ey
                    tvals[idx, 4] += ez
                    incid += 1
                nextcand[1] = t - 1
                while size >= 1:
                    c = nextcand[size]
                    if c >= 0:
                        nextcand[size] = c - 1
                        i = size
                        wbuf[i >> 2] |= skey[c] << (16 * (3 - (i & 3)))
                        size += 1
                        nextcand[size] = c - 1
                        if strat != 2 or size % part_total == part_index:
                            if used * 2 >= cap:
                                tkeys, tvals = _grow(tkeys, tvals)
                                cap = tkeys.shape[0]
                            k3v = wbuf[3] | size
                            idx = _find_slot(tkeys, tvals, wbuf[0], wbuf[1], wbuf[2], k3v)
                            if tvals[idx, 5] == 0:
                                tkeys[idx, 0] = wbuf[0]
                                tkeys[idx, 1] = wbuf[1]
                                tkeys[idx, 2] = wbuf[2]
                                tkeys[idx, 3] = k3v
                                tvals[idx, 5] = 1
                                used += 1
                            tvals[idx, 0] += 1
                            tvals[idx, 1] += r2
                            tvals[idx, 2] += ex
                            tvals[idx, 3] += ey
                            tvals[idx, 4] += ez
                            incid += 1
                    else:
                        size -= 1
                        if size == 0:
                            break
                        i = size
                        wbuf[i >> 2] &= ~(np.int64(0xFFFF) << (16 * (3 - (i & 3))))
            occ[ks[depth]] = 0
            depth -= 1
            continue
        d = dstate[depth]
        lim = limit0 if depth == 0 else 6
        if d >= lim:
            occ[ks[depth]] = 0
            depth -= 1
            continue
        dstate[depth] = d + 1
        nx = xs[depth] + dx[d]
        ny = ys[depth] + dy[d]
        nz = zs[depth] + dz[d]
        nk = ((nx + bound) * side + (ny + bound)) * side + (nz + bound)
        if occ[nk] != 0:
            continue
        depth += 1
        xs[depth] = nx
        ys[depth] = ny
        zs[depth] = nz
        ks[depth] = nk
        occ[nk] = 1
        dstate[depth] = 0

    okeys = np.empty((used, 4), np.int64)
    ovals = np.empty((used, 6), np.int64)
    w = 0
    for i in range(cap):
        if tvals[i, 5] != 0:
            for c in range(4):
                okeys[w, c] = tkeys[i, c]
            for c in range(6):
                ovals[w, c] = tvals[i, c]
            w += 1
    return okeys, ovals, incid, nwalks, np.int64(0)


@njit(cache=True)
def _accumulate_sym(n, bound, first_dir, strat, part_index, part_total, cap_log2, perms, signs):
    """One accumulation pass with 48-fold symmetry reduction.

    Each subset's record key is its canonical (lexicographically minimal)
    image; the endpoint contribution is transformed by the first group
    element achieving that minimum; the orbit size is 48 over the
    stabilizer size of the raw subset.  err != 0 flags an internal
    inconsistency (orbit mismatch on a shared key).
    """
    side = 2 * bound + 1
    occ = np.zeros(side * side * side, np.uint8)
    dx = np.array((1, -1, 0, 0, 0, 0), np.int64)
    dy = np.array((0, 0, 1, -1, 0, 0), np.int64)
    dz = np.array((0, 0, 0, 0, 1, -1), np.int64)
    xs = np.zeros(n + 1, np.int64)
    ys = np.zeros(n + 1, np.int64)
    zs = np.zeros(n + 1, np.int64)
    ks = np.zeros(n + 1, np.int64)
    dstate = np.zeros(n + 1, np.int64)

    skey = np.zeros(n, np.int64)
    sxs = np.zeros(n, np.int64)
    sys_ = np.zeros(n, np.int64)
    szs = np.zeros(n, np.int64)
    gkeys = np.zeros((48, n), np.int64)
    gwx = np.zeros(48, np.int64)
    gwy = np.zeros(48, np.int64)
    gwz = np.zeros(48, np.int64)
    ubuf = np.zeros(48 * n, np.int64)
    uni = np.zeros(48 * n, np.int64)
    unirank = np.zeros((48, n), np.int64)
    ordpos = np.zeros((48, n), np.int64)
    umask = np.zeros((48, 12), np.int64)
    nextcand = np.zeros(n + 2, np.int64)
    chosen = np.zeros(n + 1, np.int64)
    wbuf = np.zeros(4, np.int64)

    cap = np.int64(1) << cap_log2
    tkeys = np.zeros((cap, 4), np.int64)
    tvals = np.zeros((cap, 6), np.int64)
    used = np.int64(0)
    incid = np.int64(0)
    nwalks = np.int64(0)
    err = np.int64(0)

    korig = (bound * side + bound) * side + bound
    ks[0] = korig
    occ[korig] = 1
    depth = 0
    dstate[0] = first_dir if first_dir >= 0 else 0
    limit0 = first_dir + 1 if first_dir >= 0 else 6
    while depth >= 0:
        if depth == n:
            nwalks += 1
            # co-sort site keys and coordinates
            for i in range(n):
                kv = ks[i + 1]
                xv = xs[i + 1]
                yv = ys[i + 1]
                zv = zs[i + 1]
                j = i - 1
                while j >= 0 and skey[j] > kv:
                    skey[j + 1] = skey[j]
                    sxs[j + 1] = sxs[j]
                    sys_[j + 1] = sys_[j]
                    szs[j + 1] = szs[j]
                    j -= 1
                skey[j + 1] = kv
                sxs[j + 1] = xv
                sys_[j + 1] = yv
                szs[j + 1] = zv
            ex = xs[n]
            ey = ys[n]
            ez = zs[n]
            r2 = ex * ex + ey * ey + ez * ez

            # images of sites and endpoint under all 48 ops
            cnt = 0
            for g in range(48):
                p0 = perms[g, 0]
                p1 = perms[g, 1]
                p2 = perms[g, 2]
                s0 = signs[g, 0]
                s1 = signs[g, 1]
                s2 = signs[g, 2]
                for j in range(n):
                    c0 = sxs[j] if p0 == 0 else (sys_[j] if p0 == 1 else szs[j])
                    c1 = sxs[j] if p1 == 0 else (sys_[j] if p1 == 1 else szs[j])
                    c2 = sxs[j] if p2 == 0 else (sys_[j] if p2 == 1 else szs[j])
                    gk = ((s0 * c0 + bound) * side + (s1 * c1 + bound)) * side + (s2 * c2 + bound)
                    gkeys[g, j] = gk
                    ubuf[cnt] = gk
                    cnt += 1
                e0 = ex if p0 == 0 else (ey if p0 == 1 else ez)
                e1 = ex if p1 == 0 else (ey if p1 == 1 else ez)
                e2 = ex if p2 == 0 else (ey if p2 == 1 else ez)
                gwx[g] = s0 * e0
                gwy[g] = s1 * e1
                gwz[g] = s2 * e2

            # per-walk universe: sorted unique image keys
            sub = ubuf[:cnt]
            sub.sort()
            usize = 1
            uni[0] = ubuf[0]
            for i in range(1, cnt):
                if ubuf[i] != ubuf[i - 1]:
                    uni[usize] = ubuf[i]
                    usize += 1
            uw = (usize + 63) >> 6
            for g in range(48):
                for j in range(n):
                    v = gkeys[g, j]
                    lo = 0
                    hi = usize
                    while lo < hi:
                        mid = (lo + hi) >> 1
                        if uni[mid] < v:
                            lo = mid + 1
                        else:
                            hi = mid
                    unirank[g, j] = lo
            # positions ordered by image key, per op
            for g in range(48):
                for j in range(n):
                    kv = gkeys[g, j]
                    i2 = j - 1
                    while i2 >= 0 and gkeys[g, ordpos[g, i2]] > kv:
                        ordpos[g, i2 + 1] = ordpos[g, i2]
                        i2 -= 1
                    ordpos[g, i2 + 1] = j
            for g in range(48):
                for w_ in range(uw):
                    umask[g, w_] = 0
            selmask = np.int64(0)

            for t in range(n):
                kt = skey[t]
                # split filter applies to the raw subset, before canonicalization
                if strat == 1 and kt % part_total != part_index:
                    continue
                selmask |= np.int64(1) << t
                for g in range(48):
                    r = unirank[g, t]
                    umask[g, r >> 6] |= np.int64(1) << (r & 63)
                chosen[0] = t
                size = 1
                if strat != 2 or size % part_total == part_index:
                    best = 0
                    for g in range(1, 48):
                        for w_ in range(uw):
                            xw = umask[g, w_] ^ umask[best, w_]
                            if xw != 0:
                                if (umask[g, w_] & (xw & (-xw))) != 0:
                                    best = g
                                break
                    stab = 1
                    for g in range(1, 48):
                        eq = True
                        for w_ in range(uw):
                            if umask[g, w_] != umask[0, w_]:
                                eq = False
                                break
                        if eq:
                            stab += 1
                    orbit = 48 // stab
                    wbuf[0] = 0
                    wbuf[1] = 0
                    wbuf[2] = 0
                    wbuf[3] = 0
                    i2 = 0
                    for q in range(n - 1, -1, -1):
                        pq = ordpos[best, q]
                        if (selmask >> pq) & 1:
                            wbuf[i2 >> 2] |= gkeys[best, pq] << (16 * (3 - (i2 & 3)))
                            i2 += 1
                    if used * 2 >= cap:
                        tkeys, tvals = _grow(tkeys, tvals)
                        cap = tkeys.shape[0]
                    k3v = wbuf[3] | size
                    idx = _find_slot(tkeys, tvals, wbuf[0], wbuf[1], wbuf[2], k3v)
                    if tvals[idx, 5] == 0:
                        tkeys[idx, 0] = wbuf[0]
                        tkeys[idx, 1] = wbuf[1]
                        tkeys[idx, 2] = wbuf[2]
                        tkeys[idx, 3] = k3v
                        tvals[idx, 5] = orbit
                        used += 1
                    elif tvals[idx, 5] != orbit:
                        err = 1
                    tvals[idx, 0] += 1
                    tvals[idx, 1] += r2
                    tvals[idx, 2] += gwx[best]
                    tvals[idx, 3] += gwy[best]
                    tvals[idx, 4] += gwz[best]
                    incid += 1
                nextcand[1] = t - 1
                while size >= 1:
                    c = nextcand[size]
                    if c >= 0:
                        nextcand[size] = c - 1
                        chosen[size] = c
                        selmask |= np.int64(1) << c
                        for g in range(48):
                            r = unirank[g, c]
                            umask[g, r >> 6] |= np.int64(1) << (r & 63)
                        size += 1
                        nextcand[size] = c - 1
                        if strat != 2 or size % part_total == part_index:
                            best = 0
                            for g in range(1, 48):
                                for w_ in range(uw):
                                    xw = umask[g, w_] ^ umask[best, w_]
                                    if xw != 0:
                                        if (umask[g, w_] & (xw & (-xw))) != 0:
                                            best = g
                                        break
                            stab = 1
                            for g in range(1, 48):
                                eq = True
                                for w_ in range(uw):
                                    if umask[g, w_] != umask[0, w_]:
                                        eq = False
                                        break
                                if eq:
                                    stab += 1
                            orbit = 48 // stab
                            wbuf[0] = 0
                            wbuf[1] = 0
                            wbuf[2] = 0
                            wbuf[3] = 0
                            i2 = 0
                            for q in range(n - 1, -1, -1):
                                pq = ordpos[best, q]
                                if (selmask >> pq) & 1:
                                    wbuf[i2 >> 2] |= gkeys[best, pq] << (16 * (3 - (i2 & 3)))
                                    i2 += 1
                            if used * 2 >= cap:
                                tkeys, tvals = _grow(tkeys, tvals)
                                cap = tkeys.shape[0]
                            k3v = wbuf[3] | size
                            idx = _find_slot(tkeys, tvals, wbuf[0], wbuf[1], wbuf[2], k3v)
                            if tvals[idx, 5] == 0:
                                tkeys[idx, 0] = wbuf[0]
                                tkeys[idx, 1] = wbuf[1]
                                tkeys[idx, 2] = wbuf[2]
                                tkeys[idx, 3] = k3v
                                tvals[idx, 5] = orbit
                                used += 1
                            elif tvals[idx, 5] != orbit:
                                err = 1
                            tvals[idx, 0] += 1
                            tvals[idx, 1] += r2
                            tvals[idx, 2] += gwx[best]
                            tvals[idx, 3] += gwy[best]
                            tvals[idx, 4] += gwz[best]
                            incid += 1
                    else:
                        size -= 1
                        if size == 0:
                            break
                        pc = chosen[size]
                        selmask &= ~(np.int64(1) << pc)
                        for g in range(48):
                            r = unirank[g, pc]
                            umask[g, r >> 6] &= ~(np.int64(1) << (r & 63))
                selmask &= ~(np.int64(1) << t)
                for g in range(48):
                    r = unirank[g, t]
                    umask[g, r >> 6] &= ~(np.int64(1) << (r & 63))

            occ[ks[depth]] = 0
            depth -= 1
            continue
        d = dstate[depth]
        lim = limit0 if depth == 0 else 6
        if d >= lim:
            occ[ks[depth]] = 0
            depth -= 1
            continue
        dstate[depth] = d + 1
        nx = xs[depth] + dx[d]
        ny = ys[depth] + dy[d]
        nz = zs[depth] + dz[d]
        nk = ((nx + bound) * side + (ny + bound)) * side + (nz + bound)
        if occ[nk] != 0:
            continue
        depth += 1
        xs[depth] = nx
        ys[depth] = ny
        zs[depth] = nz
        ks[depth] = nk
        occ[nk] = 1
        dstate[depth] = 0

    okeys = np.empty((used, 4), np.int64)
    ovals = np.empty((used, 6), np.int64)
    w = 0
    for i in range(cap):
        if tvals[i, 5] != 0:
            for c in range(4):
                okeys[w, c] = tkeys[i, c]
            for c in range(6):
                ovals[w, c] = tvals[i, c]
            w += 1
    return okeys, ovals, incid, nwalks, err


def _check_limits(n: int, bound: int) -> None:
    if n < 1:
        raise ValueError("walk length must be >= 1")
    if n > MAX_N or bound > MAX_BOUND:
        raise SawError(
            f"compiled engine supports walk length and bound up to {MAX_N}; "
            f"got n={n}, bound={bound}"
        )
    if bound < n:
        raise ValueError("encoding bound must cover the walk length")


def direct_pass(n: int, first_dir: int = -1) -> tuple[int, int, int, int, int]:
    """Exact (Z, P, sum_x, sum_y, sum_z) tallies for one prefix class
    (or all six, first_dir=-1); the last three are summed endpoints."""
    if n < 1:
        raise ValueError("walk length must be >= 1")
    z, p, sx, sy, sz = _direct(n, first_dir)
    return int(z), int(p), int(sx), int(sy), int(sz)


def _direct_task(args):
    n, d = args
    return direct_pass(n, d)


def direct_prefixes(n: int, workers: int = 1) -> list[tuple[int, int]]:
    """Per-prefix (Z, P) tallies, optionally using a process pool."""
    tasks = [(n, d) for d in range(6)]
    if workers > 1 and n >= 9:
        import multiprocessing as mp

        warmup()
        with mp.get_context("fork").Pool(min(workers, 6)) as pool:
            return pool.map(_direct_task, tasks)
    return [_direct_task(t) for t in tasks]


def accumulate_part(
    n: int,
    bound: int,
    symmetry: bool,
    first_dir: int,
    strategy: str,
    part_index: int,
    part_total: int,
    cap_log2: int = 14,
):
    """Run one accumulation pass; returns (keys, vals, incidences, walks).

    keys/vals are unsorted table extracts; the caller owns ordering.
    """
    _check_limits(n, bound)
    strat = STRATEGY_CODES[strategy]
    if not 0 <= part_index < part_total:
        raise ValueError("part index out of range")
    cap_log2 = max(8, int(cap_log2))
    if symmetry:
        keys, vals, incid, walks, err = _accumulate_sym(
            n, bound, first_dir, strat, part_index, part_total, cap_log2, _PERMS, _SIGNS
        )
    else:
        keys, vals, incid, walks, err = _accumulate_nosym(
            n, bound, first_dir, strat, part_index, part_total, cap_log2
        )
    if err != 0:
        raise ExactnessError(
            "orbit size mismatch while accumulating; canonicalization is inconsistent"
        )
    return keys, vals, int(incid), int(walks)


def warmup() -> None:
    """Force kernel compilation (or cache load) in the current process."""
    _direct(1, -1)
    _accumulate_nosym(1, 1, -1, 0, 0, 1, 8)
    _accumulate_sym(1, 1, -1, 0, 0, 1, 8, _PERMS, _SIGNS)
