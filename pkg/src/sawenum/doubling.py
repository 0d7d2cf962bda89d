"""Length doubling: combine per-subset counters into exact walk counts.

Counting pairs of length-N walks and removing, by inclusion-exclusion
over shared visited sites, the pairs whose reversed-and-translated
concatenation would self-intersect gives

    Z_2N = Z_N^2 + sum over nonempty S of (-1)^|S| Z_N(S)^2

and the analogous distance formula

    P_2N = 2 Z_N P_N + 2 sum over nonempty S of
           (-1)^|S| (Z_N(S) P_N(S) - |E_N(S)|^2),

where Z_N(S), P_N(S), E_N(S) are the count, squared-endpoint sum and
vector endpoint sum over walks visiting every site of S.  The first
term's cross products cancel because the walk ensemble is symmetric
under v -> -v, which the orchestrator asserts rather than assumes.

With 48-fold symmetry reduction a record keyed by the canonical
representative of S aggregates its whole orbit, so each term becomes
sign * zcount^2 / orbit (and the P analogue divides by orbit as well);
all divisions are checked to be exact at runtime.

Reductions stream over the stores in chunks sized so that 64-bit partial
sums cannot overflow (chunk length * max term < 2^62, recomputed per
chunk); chunk totals are accumulated as Python integers, so the final
values are exact at any magnitude.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .counters import (
    CounterStore,
    CounterStoreBuilder,
    SplitSpec,
    merge_many,
    _sort_rows,
)
from .errors import ExactnessError, SawError, StoreMismatchError
from .walker import direct_count, iter_walks

__all__ = [
    "DoublingResult",
    "CombineResult",
    "build_store",
    "z2n",
    "p2n",
    "run_doubling",
    "run_doubling_part",
    "finalize_from_checkpoints",
    "combine_unequal",
    "run_combine",
    "checkpoint_filename",
]

# Measured distinct-subset counts (full stores) used to pre-size hash
# tables and to pick partition counts; values beyond the measured range
# are extrapolated with the observed ~7.3x growth per step.
_DISTINCT_NOSYM = {
    1: 6, 2: 54, 3: 398, 4: 2990, 5: 21877, 6: 160967, 7: 1177776, 8: 8611780,
}
_DISTINCT_SYM = {
    1: 1, 2: 5, 3: 23, 4: 117, 5: 672, 6: 4248, 7: 28309, 8: 195643,
}
_GROWTH = 7.31
_TARGET_PART_RECORDS = 6_000_000


def _estimate_distinct(n: int, symmetry: bool) -> int:
    table = _DISTINCT_SYM if symmetry else _DISTINCT_NOSYM
    top = max(table)
    if n <= top:
        return table[n]
    return int(table[top] * _GROWTH ** (n - top))


def _auto_parts(n: int, symmetry: bool) -> int:
    est = _estimate_distinct(n, symmetry)
    return max(1, math.ceil(est / _TARGET_PART_RECORDS))


def _cap_log2(expected_records: int) -> int:
    # open-addressing table kept below 50% load
    need = max(expected_records, 1) * 2.3
    return min(25, max(14, math.ceil(math.log2(need))))


# --- exact reductions -----------------------------------------------------


def _exact_reduce(keys: np.ndarray, vals: np.ndarray, symmetry: bool) -> tuple[int, int]:
    """Signed, orbit-divided sums over a full store:
    (sum sign*z^2/orbit, sum sign*(z*p - e.e)/orbit) as Python ints."""
    rtotal = keys.shape[0]
    if rtotal == 0:
        return 0, 0
    sizes = (keys[:, 3] & 0xFFFF).astype(np.int64)
    sign_all = 1 - 2 * (sizes & 1)
    total1 = 0
    total2 = 0
    pos = 0
    while pos < rtotal:
        end = min(pos + 4_000_000, rtotal)
        z = vals[pos:end, 0]
        p = vals[pos:end, 1]
        e = vals[pos:end, 2:5]
        orb = vals[pos:end, 5]
        sg = sign_all[pos:end]
        maxz = int(z.max())
        maxp = int(p.max())
        maxe = int(np.abs(e).max())
        if maxz * maxz < 1 << 62 and maxz * maxp + 3 * maxe * maxe < 1 << 62:
            t1 = z * z
            ee = e[:, 0] * e[:, 0] + e[:, 1] * e[:, 1] + e[:, 2] * e[:, 2]
            t2 = z * p - ee
            if symmetry:
                if (z % orb).any() or (t1 % orb).any() or (t2 % orb).any():
                    raise ExactnessError("orbit division is not exact; canonicalization bug")
                t1 //= orb
                t2 //= orb
            elif (orb != 1).any():
                raise ExactnessError("non-unit orbit size in a no-symmetry store")
            t1 *= sg
            t2 *= sg
            m = max(int(np.abs(t1).max()), int(np.abs(t2).max()), 1)
            step = max(1, (1 << 62) // m)
            q = 0
            ln = end - pos
            while q < ln:
                qe = min(q + step, ln)
                total1 += int(t1[q:qe].sum())
                total2 += int(t2[q:qe].sum())
                q = qe
        else:
            # magnitudes beyond safe int64 products: exact object arithmetic
            zo = z.astype(object)
            po = p.astype(object)
            eo = e.astype(object)
            oo = orb.astype(object)
            t1 = zo * zo
            t2 = zo * po - (eo[:, 0] ** 2 + eo[:, 1] ** 2 + eo[:, 2] ** 2)
            if symmetry:
                if ((zo % oo) != 0).any() or ((t1 % oo) != 0).any() or ((t2 % oo) != 0).any():
                    raise ExactnessError("orbit division is not exact; canonicalization bug")
                t1 //= oo
                t2 //= oo
            elif (orb != 1).any():
                raise ExactnessError("non-unit orbit size in a no-symmetry store")
            sgo = sg.astype(object)
            total1 += int((t1 * sgo).sum())
            total2 += int((t2 * sgo).sum())
        pos = end
    return total1, total2


def _exact_colsum(col: np.ndarray) -> int:
    """Overflow-safe exact sum of an int64 column."""
    total = 0
    pos = 0
    n = col.shape[0]
    while pos < n:
        end = min(pos + 4_000_000, n)
        chunk = col[pos:end]
        m = max(int(np.abs(chunk).max()), 1)
        step = max(1, (1 << 62) // m)
        q = pos
        while q < end:
            qe = min(q + step, end)
            total += int(col[q:qe].sum())
            q = qe
        pos = end
    return total


def z2n(store: CounterStore, zn: int) -> int:
    """Exact Z_2N from a fully accumulated length-N store and Z_N."""
    s1, _ = _exact_reduce(store.keys, store.vals, store.symmetry)
    return zn * zn + s1


def p2n(store: CounterStore, zn: int, pn: int) -> int:
    """Exact P_2N from a fully accumulated length-N store, Z_N and P_N."""
    _, s2 = _exact_reduce(store.keys, store.vals, store.symmetry)
    return 2 * zn * pn + 2 * s2


# --- store construction ---------------------------------------------------


def _run_one_pass(
    n: int,
    bound: int,
    symmetry: bool,
    split: SplitSpec,
    first_dir: int,
    engine: str,
    cap_log2: int,
) -> tuple[CounterStore, int, int]:
    """One accumulation pass; returns (store, incidences, walks)."""
    if engine == "kernel":
        keys, vals, incid, walks = _kernels.accumulate_part(
            n, bound, symmetry, first_dir, split.strategy, split.part_index,
            split.part_total, cap_log2,
        )
        keys, vals = _sort_rows(keys, vals)
        store = CounterStore(n=n, bound=bound, symmetry=symmetry, split=split,
                             keys=keys, vals=vals)
        return store, incid, walks
    if engine == "reference":
        builder = CounterStoreBuilder(n, symmetry=symmetry, split=split, bound=bound)
        first = None if first_dir < 0 else first_dir
        for w in iter_walks(n, first_step=first):
            builder.accumulate(w)
        return builder.finalize(), builder.incidences, builder.walks
    raise ValueError(f"unknown engine {engine!r}")


def _pass_task(args):
    n, bound, symmetry, split, first_dir, engine, cap_log2, reduce_in_worker, ckpt = args
    store, incid, walks = _run_one_pass(n, bound, symmetry, split, first_dir, engine, cap_log2)
    if ckpt is not None:
        store.to_checkpoint(ckpt)
    if reduce_in_worker:
        s1, s2 = _exact_reduce(store.keys, store.vals, symmetry)
        return {"sums": (s1, s2), "distinct": len(store), "incid": incid, "walks": walks}
    return {"store": store, "incid": incid, "walks": walks}


def _run_tasks(tasks, workers: int):
    if workers > 1 and len(tasks) > 1:
        import multiprocessing as mp

        _kernels.warmup()
        with mp.get_context("fork").Pool(min(workers, len(tasks))) as pool:
            return pool.map(_pass_task, tasks)
    return [_pass_task(t) for t in tasks]


def build_store(
    n: int,
    *,
    symmetry: bool = False,
    split: SplitSpec = SplitSpec(),
    bound: int | None = None,
    workers: int = 1,
    engine: str = "kernel",
    cap_log2: int | None = None,
) -> CounterStore:
    """Build the full counter store for one part of the subset universe.

    With ``workers`` > 1 the walk set is split over the six first-step
    prefix classes and the partial stores are merged; the result is
    bit-identical for any worker count.
    """
    b = bound if bound is not None else n
    if cap_log2 is None:
        est = _estimate_distinct(n, symmetry) // split.part_total
        cap_log2 = _cap_log2(est)
    dirs = list(range(6)) if (workers > 1 and engine == "kernel") else [-1]
    tasks = [(n, b, symmetry, split, d, engine, cap_log2, False, None) for d in dirs]
    results = _run_tasks(tasks, workers)
    store = merge_many([r["store"] for r in results])
    return store


# --- the doubling pipeline ------------------------------------------------

_CANONICAL_STAT_KEYS = ("n", "zn", "pn", "distinct_subsets", "incidences", "symmetry")


@dataclass
class DoublingResult:
    """Exact doubled counts plus run statistics.

    ``canonical_json`` serializes only the reproducible payload (no wall
    time, no worker/partition configuration): identical inputs must give
    byte-identical canonical output whatever the execution layout was.
    """

    n2: int
    z: int
    p: int
    stats: dict = field(default_factory=dict)

    def canonical_payload(self) -> dict:
        return {
            "n2": self.n2,
            "z": str(self.z),
            "p": str(self.p),
            "stats": {k: self.stats[k] for k in _CANONICAL_STAT_KEYS if k in self.stats},
        }

    def canonical_json(self) -> str:
        return json.dumps(self.canonical_payload(), sort_keys=True, separators=(",", ":"))

    def csv_row(self) -> str:
        return f"{self.n2},{self.z},{self.p}"


def checkpoint_filename(n: int, symmetry: bool, strategy: str, part_index: int, part_total: int) -> str:
    mode = "sym" if symmetry else "nosym"
    return f"n{n:02d}_{mode}_{strategy}_part{part_index:05d}_of{part_total:05d}.sawck"


def _resolve_split(split: str, part_total: int | None, n: int, symmetry: bool) -> tuple[str, int]:
    if split == "auto":
        parts = part_total if part_total else _auto_parts(n, symmetry)
        return ("none", 1) if parts == 1 else ("max-site", parts)
    if split == "none":
        if part_total not in (None, 1):
            raise ValueError("strategy 'none' admits only a single part")
        return "none", 1
    if split in ("max-site", "subset-size"):
        return split, part_total if part_total else 1
    raise ValueError(f"unknown split strategy {split!r}")


def _workers_default(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("SAW_WORKERS")
    return max(1, int(env)) if env else 1


def run_doubling(
    n: int,
    *,
    symmetry: bool = False,
    workers: int | None = None,
    split: str = "auto",
    part_total: int | None = None,
    engine: str = "kernel",
    checkpoint_dir: str | os.PathLike | None = None,
) -> DoublingResult:
    """Compute exact (Z_2n, P_2n) through the full doubling pipeline.

    Output is deterministic: it does not depend on the worker count, the
    split strategy, or the partition size.  The oracle inputs Z_n and P_n
    come from direct enumeration (they carry the empty-subset term), and
    the run fails with :class:`ExactnessError` if incidence conservation
    or any exact-division check is violated.
    """
    if n < 1:
        raise ValueError("walk length must be >= 1")
    workers = _workers_default(workers)
    strategy, parts = _resolve_split(split, part_total, n, symmetry)
    t0 = time.perf_counter()

    # direct_count also asserts that the summed endpoint vector vanishes,
    # the symmetry behind the 2*Z_n*P_n cross term of the distance formula
    oracle = direct_count(n, workers=workers)
    zn, pn = oracle.z, oracle.p

    ckdir = Path(checkpoint_dir) if checkpoint_dir is not None else None
    if ckdir is not None:
        ckdir.mkdir(parents=True, exist_ok=True)

    cap = _cap_log2(_estimate_distinct(n, symmetry) // parts)
    distinct = 0
    incid_total = 0
    s1 = 0
    s2 = 0

    if parts == 1:
        split_spec = SplitSpec(strategy, 0, 1)
        dirs = list(range(6)) if (workers > 1 and engine == "kernel") else [-1]
        tasks = [(n, n, symmetry, split_spec, d, engine, cap, False, None) for d in dirs]
        results = _run_tasks(tasks, workers)
        store = merge_many([r["store"] for r in results])
        incid_total = sum(r["incid"] for r in results)
        walks_total = sum(r["walks"] for r in results)
        if walks_total != zn:
            raise ExactnessError(f"walk generator visited {walks_total} walks, expected {zn}")
        if ckdir is not None:
            store.to_checkpoint(ckdir / checkpoint_filename(n, symmetry, strategy, 0, 1))
        if len(store) == 0:
            raise ExactnessError("empty counter store for a full run")
        distinct = len(store)
        s1, s2 = _exact_reduce(store.keys, store.vals, symmetry)
    else:
        task_list = []
        for part in range(parts):
            spec = SplitSpec(strategy, part, parts)
            ck = (
                str(ckdir / checkpoint_filename(n, symmetry, strategy, part, parts))
                if ckdir is not None
                else None
            )
            task_list.append((n, n, symmetry, spec, -1, engine, cap, not symmetry, ck))
        results = _run_tasks(task_list, workers)
        for r in results:
            incid_total += r["incid"]
            if r["walks"] != zn:
                raise ExactnessError(f"walk generator visited {r['walks']} walks, expected {zn}")
        if symmetry:
            # canonical representatives straddle parts: merge before reducing
            store = merge_many([r["store"] for r in results])
            distinct = len(store)
            s1, s2 = _exact_reduce(store.keys, store.vals, symmetry)
        else:
            for r in results:
                distinct += r["distinct"]
                s1 += r["sums"][0]
                s2 += r["sums"][1]

    expected_incid = zn * ((1 << n) - 1)
    if incid_total != expected_incid:
        raise ExactnessError(
            f"incidence conservation failed: {incid_total} != Z_n*(2^n-1) = {expected_incid}"
        )

    z = zn * zn + s1
    p = 2 * zn * pn + 2 * s2
    if z <= 0 or p <= 0 or z % 6 != 0 or p % 6 != 0:
        raise ExactnessError(f"doubled counts fail sanity checks: z={z}, p={p}")

    stats = {
        "n": n,
        "zn": str(zn),
        "pn": str(pn),
        "distinct_subsets": distinct,
        "incidences": incid_total,
        "symmetry": bool(symmetry),
        "strategy": strategy,
        "part_total": parts,
        "workers": workers,
        "engine": engine,
        "wall_time_s": time.perf_counter() - t0,
    }
    return DoublingResult(n2=2 * n, z=z, p=p, stats=stats)


def run_doubling_part(
    n: int,
    part_index: int,
    part_total: int,
    *,
    strategy: str = "max-site",
    symmetry: bool = False,
    workers: int | None = None,
    engine: str = "kernel",
    checkpoint_dir: str | os.PathLike,
) -> Path:
    """Accumulate a single partition and write it as a checkpoint file."""
    workers = _workers_default(workers)
    spec = SplitSpec(strategy, part_index, part_total)
    store = build_store(n, symmetry=symmetry, split=spec, workers=workers, engine=engine)
    ckdir = Path(checkpoint_dir)
    ckdir.mkdir(parents=True, exist_ok=True)
    path = ckdir / checkpoint_filename(n, symmetry, strategy, part_index, part_total)
    store.to_checkpoint(path)
    return path


def finalize_from_checkpoints(
    checkpoint_dir: str | os.PathLike,
    *,
    expect_n: int | None = None,
    workers: int | None = None,
) -> DoublingResult:
    """Load per-part checkpoints, verify the partition is complete and
    consistent, and produce the final doubled counts."""
    workers = _workers_default(workers)
    t0 = time.perf_counter()
    ckdir = Path(checkpoint_dir)
    paths = sorted(ckdir.glob("*.sawck"))
    if not paths:
        raise SawError(f"no checkpoint files in {ckdir}")
    stores = [CounterStore.from_checkpoint(p) for p in paths]
    first = stores[0]
    for s in stores[1:]:
        if (
            s.n != first.n
            or s.bound != first.bound
            or s.symmetry != first.symmetry
            or s.split.strategy != first.split.strategy
            or s.split.part_total != first.split.part_total
        ):
            raise StoreMismatchError("checkpoint files belong to different runs")
    if expect_n is not None and first.n != expect_n:
        raise SawError(f"checkpoints are for n={first.n}, expected n={expect_n}")
    covered = sorted(p for s in stores for p in s.parts_covered)
    total = first.split.part_total
    if len(covered) != len(set(covered)):
        dupes = sorted({p for p in covered if covered.count(p) > 1})
        raise SawError(f"duplicate checkpoint parts: {dupes}")
    missing = sorted(set(range(total)) - set(covered))
    if missing:
        raise SawError(f"incomplete partition set; missing parts: {missing}")

    n = first.n
    symmetry = first.symmetry
    oracle = direct_count(n, workers=workers)
    zn, pn = oracle.z, oracle.p

    incid_total = 0
    s1 = 0
    s2 = 0
    distinct = 0
    if symmetry and total > 1:
        merged = merge_many(stores)
        distinct = len(merged)
        incid_total = merged.total_zcount()
        s1, s2 = _exact_reduce(merged.keys, merged.vals, symmetry)
    else:
        for s in stores:
            distinct += len(s)
            incid_total += _exact_colsum(s.vals[:, 0])
            a, b = _exact_reduce(s.keys, s.vals, symmetry)
            s1 += a
            s2 += b

    expected_incid = zn * ((1 << n) - 1)
    if incid_total != expected_incid:
        raise ExactnessError(
            f"incidence conservation failed: {incid_total} != Z_n*(2^n-1) = {expected_incid}"
        )
    z = zn * zn + s1
    p = 2 * zn * pn + 2 * s2
    if z <= 0 or p <= 0 or z % 6 != 0 or p % 6 != 0:
        raise ExactnessError(f"doubled counts fail sanity checks: z={z}, p={p}")
    stats = {
        "n": n,
        "zn": str(zn),
        "pn": str(pn),
        "distinct_subsets": distinct,
        "incidences": incid_total,
        "symmetry": bool(symmetry),
        "strategy": first.split.strategy,
        "part_total": total,
        "workers": workers,
        "engine": "checkpoint",
        "wall_time_s": time.perf_counter() - t0,
    }
    return DoublingResult(n2=2 * n, z=z, p=p, stats=stats)


# --- unequal lengths (odd totals) ----------------------------------------


def _void_rows(keys: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(keys).view(f"V{keys.shape[1] * 8}").ravel()


def combine_unequal(
    store_m: CounterStore, store_n: CounterStore, z_m: int, z_n: int
) -> int:
    """Exact Z_{M+N} from two full stores of different lengths.

    Generalizes the equal-length formula to
    Z_{M+N} = Z_M Z_N + sum (-1)^|S| Z_M(S) Z_N(S); with symmetry on, the
    per-key product is zcount_M * zcount_N / orbit.  Both stores must use
    the same encoding bound and symmetry mode.  This is a reconstruction
    beyond the equal-length method and must always be validated against
    direct enumeration where feasible (see :func:`run_combine`).
    """
    if store_m.bound != store_n.bound:
        raise StoreMismatchError("stores use different encoding bounds")
    if store_m.symmetry != store_n.symmetry:
        raise StoreMismatchError("stores disagree on symmetry mode")
    if store_m.split.strategy != "none" or store_n.split.strategy != "none":
        raise StoreMismatchError("combination requires unpartitioned stores")
    symmetry = store_m.symmetry

    _, ia, ib = np.intersect1d(
        _void_rows(store_m.keys), _void_rows(store_n.keys),
        assume_unique=True, return_indices=True,
    )
    total = 0
    if len(ia):
        za = store_m.vals[ia, 0]
        zb = store_n.vals[ib, 0]
        orba = store_m.vals[ia, 5]
        orbb = store_n.vals[ib, 5]
        if (orba != orbb).any():
            raise StoreMismatchError("orbit size mismatch between stores")
        sizes = (store_m.keys[ia, 3] & 0xFFFF).astype(np.int64)
        sign = 1 - 2 * (sizes & 1)
        pos = 0
        while pos < len(ia):
            end = min(pos + 4_000_000, len(ia))
            a = za[pos:end]
            b = zb[pos:end]
            o = orba[pos:end]
            sg = sign[pos:end]
            if int(a.max()) * int(b.max()) < 1 << 62:
                t = a * b
                if symmetry:
                    if (t % o).any():
                        raise ExactnessError("orbit division is not exact in combination")
                    t //= o
                t *= sg
                m = max(int(np.abs(t).max()), 1)
                step = max(1, (1 << 62) // m)
                q = 0
                ln = end - pos
                while q < ln:
                    qe = min(q + step, ln)
                    total += int(t[q:qe].sum())
                    q = qe
            else:
                t = a.astype(object) * b.astype(object)
                if symmetry:
                    oo = o.astype(object)
                    if ((t % oo) != 0).any():
                        raise ExactnessError("orbit division is not exact in combination")
                    t //= oo
                total += int((t * sg.astype(object)).sum())
            pos = end
    return z_m * z_n + total


@dataclass
class CombineResult:
    """Unequal-length combination output; flagged experimental because the
    formula extends beyond the equal-length doubling method."""

    m: int
    n: int
    n_total: int
    z: int
    validated: bool | None  # True: matches direct enumeration; None: not checked
    experimental: bool = True

    def canonical_payload(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "n_total": self.n_total,
            "z": str(self.z),
            "experimental": self.experimental,
            "validated": self.validated,
        }

    def canonical_json(self) -> str:
        return json.dumps(self.canonical_payload(), sort_keys=True, separators=(",", ":"))


def run_combine(
    m: int,
    n: int,
    *,
    symmetry: bool = False,
    workers: int | None = None,
    engine: str = "kernel",
    validate: bool | str = "auto",
) -> CombineResult:
    """Build both stores with a shared bound and combine to Z_{m+n}.

    Validation against direct enumeration runs automatically whenever
    m + n is small enough to enumerate quickly; a mismatch raises
    :class:`ExactnessError`.
    """
    if m < 1 or n < 1:
        raise ValueError("walk lengths must be >= 1")
    workers = _workers_default(workers)
    bound = max(m, n)
    store_m = build_store(m, symmetry=symmetry, bound=bound, workers=workers, engine=engine)
    store_n = build_store(n, symmetry=symmetry, bound=bound, workers=workers, engine=engine)
    z_m = direct_count(m, workers=workers).z
    z_n = direct_count(n, workers=workers).z
    z = combine_unequal(store_m, store_n, z_m, z_n)
    do_validate = validate is True or (validate == "auto" and m + n <= 12)
    validated: bool | None = None
    if do_validate:
        oracle = direct_count(m + n, workers=workers)
        if oracle.z != z:
            raise ExactnessError(
                f"unequal-length combination disagrees with direct enumeration: "
                f"{z} != {oracle.z}"
            )
        validated = True
    return CombineResult(m=m, n=n, n_total=m + n, z=z, validated=validated)
