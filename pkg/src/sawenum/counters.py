"""Per-subset counter stores.

For every canonical visited-site subset S of a length-N walk ensemble we
keep four exact tallies: the incidence count (how many (walk, subset)
pairs mapped to S), the summed squared endpoint norm over those pairs,
the summed endpoint vector (transformed by the canonicalizing symmetry),
and the orbit size of S.  These are exactly the ingredients the
length-doubling formulas consume.

The authoritative in-memory representation is a pair of numpy arrays,
sorted by packed subset key (see :mod:`sawenum._kernels` for the key
layout).  A readable pure-Python builder (:class:`CounterStoreBuilder`)
produces identical stores and serves as the reference implementation the
compiled engine is tested against.
"""

from __future__ import annotations

import io
import os
import struct
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import lattice
from .errors import SawError, StoreMismatchError
from .lattice import Point, apply_op, canonicalize, decode, encode
from .walker import Walk

__all__ = [
    "SplitSpec",
    "SubsetRecord",
    "CounterStore",
    "CounterStoreBuilder",
    "subset_iteration",
    "split_filter",
    "accumulate_walk",
    "merge",
    "pack_sites",
    "unpack_sites",
]

_STRATEGIES = ("none", "max-site", "subset-size")


@dataclass(frozen=True)
class SplitSpec:
    """Selects one part of a partition of the subset universe.

    ``max-site`` keys a subset by its largest site key mod part_total;
    ``subset-size`` by its cardinality mod part_total; ``none`` accepts
    everything (and therefore only allows a single part).
    """

    strategy: str = "none"
    part_index: int = 0
    part_total: int = 1

    def __post_init__(self):
        if self.strategy not in _STRATEGIES:
            raise ValueError(f"unknown split strategy {self.strategy!r}")
        if self.part_total < 1 or not 0 <= self.part_index < self.part_total:
            raise ValueError("need 0 <= part_index < part_total")
        if self.strategy == "none" and self.part_total != 1:
            raise ValueError("strategy 'none' admits only a single part")


def split_filter(sites: Sequence[int], split: SplitSpec) -> bool:
    """Whether a sorted, nonempty site-key sequence belongs to this part."""
    if split.strategy == "none":
        return True
    if split.strategy == "max-site":
        return sites[-1] % split.part_total == split.part_index
    return len(sites) % split.part_total == split.part_index


@dataclass(frozen=True)
class SubsetRecord:
    """Counters attached to one canonical subset."""

    zcount: int
    pcount: int
    evec: tuple[int, int, int]
    parity: int
    orbit_size: int


def subset_iteration(walk: Walk, bound: int | None = None) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield (sorted site keys, parity) for each of the 2^N - 1 nonempty
    subsets of the walk's nonorigin sites, in binary-counter order over
    walk positions."""
    n = walk.n
    b = bound if bound is not None else n
    keys = [encode(p, b) for p in walk.vertices[1:]]
    for mask in range(1, 1 << n):
        sites = tuple(sorted(keys[i] for i in range(n) if (mask >> i) & 1))
        yield sites, bin(mask).count("1") & 1


# --- packed keys (mirror of the compiled engine's layout) ----------------

_MAX_SITES = 15


def pack_sites(sites: Sequence[int]) -> tuple[int, int, int, int]:
    """Pack a strictly increasing site-key sequence into four words.

    Keys are stored in descending order, 16 bits per slot, slot 0 in the
    top bits of word 0; the size occupies the low 16 bits of word 3.
    """
    m = len(sites)
    if not 1 <= m <= _MAX_SITES:
        raise ValueError(f"subset size {m} outside [1, {_MAX_SITES}]")
    words = [0, 0, 0, 0]
    for i, k in enumerate(reversed(sites)):
        if not 0 <= k < 1 << 15:
            raise ValueError(f"site key {k} does not fit the packed layout")
        words[i >> 2] |= k << (16 * (3 - (i & 3)))
    words[3] |= m
    return tuple(words)  # type: ignore[return-value]


def unpack_sites(words: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`pack_sites` (ascending site keys)."""
    m = words[3] & 0xFFFF
    out = []
    for i in range(m):
        out.append((words[i >> 2] >> (16 * (3 - (i & 3)))) & 0xFFFF)
    return tuple(reversed(out))


def _sort_rows(keys: np.ndarray, vals: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if len(keys) == 0:
        return keys.reshape(0, 4).astype(np.int64), vals.reshape(0, 6).astype(np.int64)
    order = np.lexsort((keys[:, 3], keys[:, 2], keys[:, 1], keys[:, 0]))
    return np.ascontiguousarray(keys[order]), np.ascontiguousarray(vals[order])


@dataclass
class CounterStore:
    """A finalized, key-sorted collection of subset records.

    ``parts_covered`` lists the partition indices this store aggregates
    (a full store covers all of them).  Values are int64 throughout; the
    per-record bounds guarantee no overflow for n <= 18, and every
    downstream summation is done in Python integers.
    """

    n: int
    bound: int
    symmetry: bool
    split: SplitSpec
    keys: np.ndarray
    vals: np.ndarray
    parts_covered: tuple[int, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.parts_covered is None:
            self.parts_covered = (self.split.part_index,)
        self.keys = np.ascontiguousarray(self.keys, dtype=np.int64).reshape(-1, 4)
        self.vals = np.ascontiguousarray(self.vals, dtype=np.int64).reshape(-1, 6)

    def __len__(self) -> int:
        return self.keys.shape[0]

    @property
    def sizes(self) -> np.ndarray:
        return self.keys[:, 3] & 0xFFFF

    def total_zcount(self) -> int:
        return int(self.vals[:, 0].sum(dtype=object)) if len(self) else 0

    def records(self) -> Iterator[tuple[tuple[int, ...], SubsetRecord]]:
        for i in range(len(self)):
            sites = unpack_sites(self.keys[i])
            v = self.vals[i]
            yield sites, SubsetRecord(
                zcount=int(v[0]),
                pcount=int(v[1]),
                evec=(int(v[2]), int(v[3]), int(v[4])),
                parity=len(sites) & 1,
                orbit_size=int(v[5]),
            )

    def lookup(self, sites: Sequence[int]) -> SubsetRecord | None:
        """Find the record for a sorted site-key sequence, if present."""
        target = np.array(pack_sites(tuple(sites)), dtype=np.int64)
        lo, hi = 0, len(self)
        while lo < hi:
            mid = (lo + hi) // 2
            row = self.keys[mid]
            cmp = 0
            for a, b in zip(row, target):
                if a != b:
                    cmp = -1 if a < b else 1
                    break
            if cmp < 0:
                lo = mid + 1
            elif cmp > 0:
                hi = mid
            else:
                v = self.vals[mid]
                return SubsetRecord(
                    int(v[0]), int(v[1]), (int(v[2]), int(v[3]), int(v[4])),
                    len(sites) & 1, int(v[5]),
                )
        return None

    def equals(self, other: "CounterStore") -> bool:
        return (
            self.n == other.n
            and self.bound == other.bound
            and self.symmetry == other.symmetry
            and self.split.strategy == other.split.strategy
            and self.split.part_total == other.split.part_total
            and sorted(self.parts_covered) == sorted(other.parts_covered)
            and np.array_equal(self.keys, other.keys)
            and np.array_equal(self.vals, other.vals)
        )

    # --- checkpoint serialization ------------------------------------

    MAGIC = b"SAWSTOR1"
    VERSION = 1

    def to_checkpoint(self, path: str | os.PathLike) -> None:
        """Write this (single-part) store as a checkpoint file.

        Layout: header, then one record per subset: key byte length (u32),
        the site keys as u32 LE ascending, then zcount, pcount, the three
        extension components and the orbit size, each as sign byte +
        magnitude length (u32) + magnitude bytes LE.  Records are grouped
        by subset size so they can be read back vectorized.
        """
        if len(self.parts_covered) != 1:
            raise SawError("only single-part stores are checkpointed")
        header = self.MAGIC + struct.pack(
            "<IIIBBIIQ",
            self.VERSION,
            self.n,
            self.bound,
            1 if self.symmetry else 0,
            _STRATEGIES.index(self.split.strategy),
            self.parts_covered[0],
            self.split.part_total,
            len(self),
        )
        buf = io.BytesIO()
        buf.write(header)
        if len(self):
            sizes = np.asarray(self.sizes)
            order = np.lexsort((self.keys[:, 3], self.keys[:, 2], self.keys[:, 1], self.keys[:, 0], sizes))
            for s in np.unique(sizes):
                sel = order[sizes[order] == s]
                kmat = np.empty((len(sel), int(s)), dtype="<u4")
                rows = self.keys[sel]
                for j in range(int(s)):
                    # file stores keys ascending; slot index counts descending
                    i = int(s) - 1 - j
                    kmat[:, j] = ((rows[:, i >> 2] >> (16 * (3 - (i & 3)))) & 0xFFFF).astype("<u4")
                rec_len = 4 + 4 * int(s) + 6 * 13
                block = np.zeros((len(sel), rec_len), dtype=np.uint8)
                block[:, 0:4] = np.frombuffer(
                    np.full(len(sel), 4 * int(s), dtype="<u4").tobytes(), dtype=np.uint8
                ).reshape(len(sel), 4)
                block[:, 4 : 4 + 4 * int(s)] = np.frombuffer(kmat.tobytes(), dtype=np.uint8).reshape(
                    len(sel), 4 * int(s)
                )
                off = 4 + 4 * int(s)
                vrows = self.vals[sel]
                for f in range(6):
                    v = vrows[:, f]
                    block[:, off] = (v < 0).astype(np.uint8)
                    block[:, off + 1] = 8  # magnitude length, little-endian u32
                    mag = np.abs(v).astype("<u8")
                    block[:, off + 5 : off + 13] = np.frombuffer(mag.tobytes(), dtype=np.uint8).reshape(
                        len(sel), 8
                    )
                    off += 13
                buf.write(block.tobytes())
        tmp = os.fspath(path) + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(buf.getvalue())
        os.replace(tmp, path)

    @classmethod
    def from_checkpoint(cls, path: str | os.PathLike) -> "CounterStore":
        with open(path, "rb") as fh:
            data = fh.read()
        if data[:8] != cls.MAGIC:
            raise SawError(f"{path}: not a counter-store checkpoint")
        version, n, bound, sym, strat, pidx, ptot, count = struct.unpack_from("<IIIBBIIQ", data, 8)
        if version != cls.VERSION:
            raise SawError(f"{path}: unsupported checkpoint version {version}")
        off = 8 + struct.calcsize("<IIIBBIIQ")
        keys = np.zeros((count, 4), np.int64)
        vals = np.zeros((count, 6), np.int64)

        def parse_one(o: int, r: int) -> int:
            # general record: arbitrary-length magnitudes
            (klen,) = struct.unpack_from("<I", data, o)
            s = klen // 4
            if not 1 <= s <= _MAX_SITES or klen % 4:
                raise SawError(f"{path}: corrupt record at byte {o}")
            sites = struct.unpack_from(f"<{s}I", data, o + 4)
            keys[r] = pack_sites(tuple(sites))
            o += 4 + klen
            for f in range(6):
                sign = data[o]
                (mlen,) = struct.unpack_from("<I", data, o + 1)
                mag = int.from_bytes(data[o + 5 : o + 5 + mlen], "little")
                if mag >> 62:
                    raise SawError(f"{path}: counter magnitude exceeds the engine's 64-bit range")
                vals[r, f] = -mag if sign else mag
                o += 5 + mlen
            return o

        r = 0
        while r < count:
            (klen,) = struct.unpack_from("<I", data, off)
            s = klen // 4
            rec_len = 4 + klen + 6 * 13
            # tentative fixed-stride run: consecutive records sharing this key
            # length, bounded by the remaining buffer
            max_run = min(count - r, (len(data) - off) // rec_len)
            run = 0
            while run < max_run:
                probe = off + run * rec_len
                if struct.unpack_from("<I", data, probe)[0] != klen:
                    break
                run += 1
            if run > 0:
                block = np.frombuffer(
                    data, dtype=np.uint8, count=run * rec_len, offset=off
                ).reshape(run, rec_len)
                voff = 4 + klen
                lens = np.zeros((run, 6), np.int64)
                for f in range(6):
                    lens[:, f] = (
                        block[:, voff + 13 * f + 1 : voff + 13 * f + 5].copy().view("<u4").ravel()
                    )
                bad = np.flatnonzero((lens != 8).any(axis=1))
                if len(bad):
                    # fixed-stride assumption only holds up to the first
                    # record with a non-8-byte magnitude
                    run = int(bad[0])
            if run == 0:
                off = parse_one(off, r)
                r += 1
                continue
            block = np.frombuffer(data, dtype=np.uint8, count=run * rec_len, offset=off).reshape(
                run, rec_len
            )
            kmat = block[:, 4 : 4 + klen].copy().view("<u4").reshape(run, s)
            rows = np.zeros((run, 4), np.int64)
            for j in range(s):
                i = s - 1 - j
                rows[:, i >> 2] |= kmat[:, j].astype(np.int64) << (16 * (3 - (i & 3)))
            rows[:, 3] |= s
            keys[r : r + run] = rows
            voff = 4 + klen
            for f in range(6):
                o = voff + 13 * f
                sign = block[:, o].astype(np.int64)
                mag = block[:, o + 5 : o + 13].copy().view("<u8").ravel()
                if (mag > np.uint64(1) << np.uint64(62)).any():
                    raise SawError(f"{path}: counter magnitude exceeds the engine's 64-bit range")
                vals[r : r + run, f] = np.where(sign != 0, -mag.astype(np.int64), mag.astype(np.int64))
            off += run * rec_len
            r += run
        keys, vals = _sort_rows(keys, vals)
        return cls(
            n=n,
            bound=bound,
            symmetry=bool(sym),
            split=SplitSpec(_STRATEGIES[strat], pidx, ptot),
            keys=keys,
            vals=vals,
        )


class CounterStoreBuilder:
    """Readable reference accumulator; builds a store one walk at a time.

    Keeps exact Python-integer tallies in a dict keyed by the canonical
    sorted site sequence.  Only suitable for small n; the compiled engine
    produces bit-identical stores and is what production runs use.
    """

    def __init__(
        self,
        n: int,
        *,
        symmetry: bool = False,
        split: SplitSpec = SplitSpec(),
        bound: int | None = None,
    ):
        if n < 1:
            raise ValueError("walk length must be >= 1")
        self.n = n
        self.bound = bound if bound is not None else n
        if self.bound < n:
            raise ValueError("encoding bound must cover the walk length")
        self.symmetry = symmetry
        self.split = split
        self._data: dict[tuple[int, ...], list[int]] = {}
        self.incidences = 0
        self.walks = 0

    def accumulate(self, walk: Walk) -> "CounterStoreBuilder":
        if walk.n != self.n:
            raise SawError(f"walk length {walk.n} does not match store length {self.n}")
        end = walk.endpoint
        r2 = end.norm_sq()
        self.walks += 1
        for sites, _parity in subset_iteration(walk, self.bound):
            if not split_filter(sites, self.split):
                continue
            if self.symmetry:
                points = [decode(k, self.bound) for k in sites]
                canon, op = canonicalize(points, self.bound)
                rep = canon.sites
                orbit = canon.orbit_size
                e = apply_op(op, end)
            else:
                rep = sites
                orbit = 1
                e = end
            rec = self._data.get(rep)
            if rec is None:
                self._data[rep] = [1, r2, e.x, e.y, e.z, orbit]
            else:
                if rec[5] != orbit:
                    raise StoreMismatchError("orbit size mismatch on a shared key")
                rec[0] += 1
                rec[1] += r2
                rec[2] += e.x
                rec[3] += e.y
                rec[4] += e.z
            self.incidences += 1
        return self

    def finalize(self) -> CounterStore:
        count = len(self._data)
        keys = np.zeros((count, 4), np.int64)
        vals = np.zeros((count, 6), np.int64)
        for i, (sites, rec) in enumerate(self._data.items()):
            keys[i] = pack_sites(sites)
            if any(abs(v) >= 1 << 62 for v in rec):
                raise SawError("reference counters exceed the store's 64-bit range")
            vals[i] = rec
        keys, vals = _sort_rows(keys, vals)
        return CounterStore(
            n=self.n,
            bound=self.bound,
            symmetry=self.symmetry,
            split=self.split,
            keys=keys,
            vals=vals,
        )


def accumulate_walk(store: CounterStoreBuilder, walk: Walk) -> CounterStoreBuilder:
    """Fold one walk's subsets into a builder (configured at construction
    with the target length, symmetry flag, and split)."""
    return store.accumulate(walk)


def _compatible(a: CounterStore, b: CounterStore) -> None:
    if a.n != b.n or a.bound != b.bound:
        raise StoreMismatchError(
            f"stores disagree on length/bound: ({a.n}, {a.bound}) vs ({b.n}, {b.bound})"
        )
    if a.symmetry != b.symmetry:
        raise StoreMismatchError("stores disagree on symmetry mode")
    if a.split.strategy != b.split.strategy or a.split.part_total != b.split.part_total:
        raise StoreMismatchError("stores belong to different partitions")
    sa, sb = set(a.parts_covered), set(b.parts_covered)
    if sa != sb and sa & sb:
        raise StoreMismatchError("stores cover overlapping but unequal part sets")


def merge(a: CounterStore, b: CounterStore) -> CounterStore:
    """Field-wise sum of two stores over matching subset keys.

    Stores must share length, bound, symmetry mode and partition; their
    covered parts must be identical (walk-partial stores) or disjoint.
    A shared key with differing orbit sizes indicates a canonicalization
    bug and raises.
    """
    _compatible(a, b)
    parts = tuple(sorted(set(a.parts_covered) | set(b.parts_covered)))
    allk = np.vstack([a.keys, b.keys])
    allv = np.vstack([a.vals, b.vals])
    if len(allk) == 0:
        return CounterStore(a.n, a.bound, a.symmetry, a.split, allk, allv, parts)
    order = np.lexsort((allk[:, 3], allk[:, 2], allk[:, 1], allk[:, 0]))
    allk = allk[order]
    allv = allv[order]
    newgrp = np.ones(len(allk), dtype=bool)
    newgrp[1:] = np.any(allk[1:] != allk[:-1], axis=1)
    starts = np.flatnonzero(newgrp)
    outk = allk[starts]
    sums = np.add.reduceat(allv[:, 0:5], starts, axis=0)
    omin = np.minimum.reduceat(allv[:, 5], starts)
    omax = np.maximum.reduceat(allv[:, 5], starts)
    if (omin != omax).any():
        raise StoreMismatchError("orbit size mismatch on a shared key")
    outv = np.concatenate([sums, omin[:, None]], axis=1)
    return CounterStore(a.n, a.bound, a.symmetry, a.split, outk, outv, parts)


def merge_many(stores: Iterable[CounterStore]) -> CounterStore:
    """Merge any number of stores (at least one) in a single sort pass."""
    stores = list(stores)
    if not stores:
        raise ValueError("nothing to merge")
    out = stores[0]
    for s in stores[1:]:
        out = merge(out, s)
    return out


def empty_store(
    n: int, *, symmetry: bool = False, split: SplitSpec = SplitSpec(), bound: int | None = None
) -> CounterStore:
    """An empty store with the given configuration (merge identity)."""
    b = bound if bound is not None else n
    return CounterStore(
        n=n,
        bound=b,
        symmetry=symmetry,
        split=split,
        keys=np.zeros((0, 4), np.int64),
        vals=np.zeros((0, 6), np.int64),
    )
