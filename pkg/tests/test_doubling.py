"""Length-doubling reductions, the pipeline, and unequal-length combination."""

import pytest

import sawenum as se
from sawenum import SplitSpec, iter_walks
from sawenum.doubling import _exact_reduce, combine_unequal, p2n, z2n
from sawenum.errors import ExactnessError, StoreMismatchError


def test_z2n_by_hand_n1_symmetry():
    store = se.build_store(1, symmetry=True)
    # one record: zcount 6, orbit 6, odd parity -> 6^2 - 6^2/6 = 30
    assert z2n(store, 6) == 30


def test_p2n_by_hand_n1_symmetry():
    store = se.build_store(1, symmetry=True)
    # 2*6*6 + 2*(-1)*(6*6 - 36)/6 = 72
    assert p2n(store, 6, 6) == 72


@pytest.mark.parametrize("symmetry", [False, True])
def test_z2n_p2n_examples(reference_table, symmetry):
    for n in (2, 3):
        store = se.build_store(n, symmetry=symmetry)
        oracle = se.direct_count(n)
        assert z2n(store, oracle.z) == reference_table.z(2 * n)
        assert p2n(store, oracle.z, oracle.p) == reference_table.p(2 * n)


def test_run_doubling_examples(reference_table):
    r = se.run_doubling(5)
    assert (r.n2, r.z, r.p) == (10, 8809878, 148157880)
    assert r.z == reference_table.z(10)
    r = se.run_doubling(1)
    assert (r.z, r.p) == (30, 72)


def test_run_doubling_rejects_bad_input():
    with pytest.raises(ValueError):
        se.run_doubling(0)
    with pytest.raises(ValueError):
        se.run_doubling(3, split="bogus")
    with pytest.raises(ValueError):
        se.run_doubling(3, split="none", part_total=2)


def test_reduce_rejects_corrupt_orbit():
    store = se.build_store(2, symmetry=True)
    vals = store.vals.copy()
    vals[0, 5] = 5  # 5 does not divide any counter product here
    with pytest.raises(ExactnessError):
        _exact_reduce(store.keys, vals, True)
    vals = store.vals.copy()
    vals[0, 5] = 2
    with pytest.raises(ExactnessError):
        _exact_reduce(store.keys, vals, False)


def test_reference_engine_pipeline_matches(reference_table):
    r = se.run_doubling(3, engine="reference")
    assert (r.z, r.p) == (reference_table.z(6), reference_table.p(6))


@pytest.mark.parametrize("symmetry", [False, True])
def test_mode_equivalence(reference_table, symmetry):
    for n in (1, 2, 3, 4):
        r = se.run_doubling(n, symmetry=symmetry)
        assert r.z == reference_table.z(2 * n)
        assert r.p == reference_table.p(2 * n)


def test_pair_bijection_small():
    """Count ordered pairs of walks with disjoint nonorigin site sets by
    brute force; the doubling output must equal it exactly."""
    for n in (1, 2, 3):
        masks = []
        for w in iter_walks(n):
            m = 0
            for p in w.vertices[1:]:
                m |= 1 << se.encode(p, n)
            masks.append(m)
        pairs = sum(1 for a in masks for b in masks if a & b == 0)
        assert pairs == se.run_doubling(n).z


def test_canonical_json_stable_fields():
    r = se.run_doubling(3, workers=1)
    payload = r.canonical_payload()
    assert set(payload) == {"n2", "z", "p", "stats"}
    assert "wall_time_s" not in payload["stats"]
    assert "workers" not in payload["stats"]
    assert payload["z"] == str(r.z)
    assert r.csv_row() == f"{r.n2},{r.z},{r.p}"


def test_worker_and_split_invariance_quick():
    base = se.run_doubling(4).canonical_json()
    assert se.run_doubling(4, workers=2).canonical_json() == base
    assert se.run_doubling(4, split="max-site", part_total=3).canonical_json() == base
    assert se.run_doubling(4, split="subset-size", part_total=2, workers=2).canonical_json() == base


# --- checkpoint workflow ----------------------------------------------------

def test_checkpoint_parts_then_merge(tmp_path):
    full = se.run_doubling(4)
    for part in range(3):
        se.run_doubling_part(4, part, 3, strategy="max-site", checkpoint_dir=tmp_path)
    merged = se.finalize_from_checkpoints(tmp_path, expect_n=4)
    assert merged.z == full.z and merged.p == full.p
    assert merged.canonical_json() == full.canonical_json()


def test_merge_reports_missing_parts(tmp_path):
    se.run_doubling_part(3, 0, 3, strategy="max-site", checkpoint_dir=tmp_path)
    se.run_doubling_part(3, 2, 3, strategy="max-site", checkpoint_dir=tmp_path)
    with pytest.raises(se.SawError, match=r"missing parts: \[1\]"):
        se.finalize_from_checkpoints(tmp_path)


def test_merge_rejects_mixed_runs(tmp_path):
    se.run_doubling_part(3, 0, 2, strategy="max-site", checkpoint_dir=tmp_path)
    se.run_doubling_part(4, 1, 2, strategy="max-site", checkpoint_dir=tmp_path)
    with pytest.raises(StoreMismatchError):
        se.finalize_from_checkpoints(tmp_path)


def test_run_doubling_writes_checkpoints(tmp_path):
    r = se.run_doubling(3, split="max-site", part_total=2, checkpoint_dir=tmp_path)
    files = sorted(tmp_path.glob("*.sawck"))
    assert len(files) == 2
    again = se.finalize_from_checkpoints(tmp_path, expect_n=3)
    assert (again.z, again.p) == (r.z, r.p)


# --- unequal lengths ---------------------------------------------------------

def test_combine_unequal_examples(reference_table):
    for (m, n) in [(1, 2), (2, 3)]:
        res = se.run_combine(m, n)
        assert res.z == reference_table.z(m + n)
        assert res.validated is True
        assert res.experimental is True


def test_combine_matches_doubling_when_equal(reference_table):
    store = se.build_store(3)
    z3 = se.direct_count(3).z
    assert combine_unequal(store, store, z3, z3) == z2n(store, z3)


@pytest.mark.parametrize("symmetry", [False, True])
def test_combine_symmetry_modes_agree(reference_table, symmetry):
    res = se.run_combine(2, 3, symmetry=symmetry)
    assert res.z == reference_table.z(5)


def test_combine_rejects_incompatible_stores():
    a = se.build_store(2, bound=3)
    b = se.build_store(3, bound=4)
    with pytest.raises(StoreMismatchError):
        combine_unequal(a, b, 30, 150)
    c = se.build_store(3, bound=3, symmetry=True)
    d = se.build_store(2, bound=3, symmetry=False)
    with pytest.raises(StoreMismatchError):
        combine_unequal(d, c, 30, 150)
