"""The compiled engine must reproduce the reference engine bit for bit.

These are the central correctness tests for the hot path: every mode,
strategy, and partition combination is compared against the readable
pure-Python accumulator on exact store content.
"""

import pytest

import sawenum as se
from sawenum import SplitSpec


def stores_equal(a, b):
    return a.equals(b)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("symmetry", [False, True])
def test_full_store_matches_reference(n, symmetry):
    kernel = se.build_store(n, symmetry=symmetry, engine="kernel")
    reference = se.build_store(n, symmetry=symmetry, engine="reference")
    assert stores_equal(kernel, reference)


@pytest.mark.parametrize("symmetry", [False, True])
@pytest.mark.parametrize("strategy,total", [("max-site", 2), ("max-site", 5),
                                            ("subset-size", 2), ("subset-size", 3)])
def test_partitioned_stores_match_reference(symmetry, strategy, total):
    n = 4
    for part in range(total):
        spec = SplitSpec(strategy, part, total)
        kernel = se.build_store(n, symmetry=symmetry, split=spec, engine="kernel")
        reference = se.build_store(n, symmetry=symmetry, split=spec, engine="reference")
        assert stores_equal(kernel, reference), (symmetry, strategy, part)


def test_nosym_store_matches_reference_n5():
    kernel = se.build_store(5, symmetry=False, engine="kernel")
    reference = se.build_store(5, symmetry=False, engine="reference")
    assert stores_equal(kernel, reference)


@pytest.mark.parametrize("symmetry", [False, True])
def test_prefix_split_store_is_worker_invariant(symmetry):
    n = 4
    single = se.build_store(n, symmetry=symmetry, workers=1)
    split = se.build_store(n, symmetry=symmetry, workers=2)
    assert stores_equal(single, split)


def test_wider_bound_matches_reference():
    # combination runs build stores with a bound larger than the length
    kernel = se.build_store(3, bound=5, engine="kernel")
    reference = se.build_store(3, bound=5, engine="reference")
    assert stores_equal(kernel, reference)


def test_kernel_limits():
    from sawenum import _kernels
    from sawenum.errors import SawError

    with pytest.raises(SawError):
        _kernels.accumulate_part(16, 16, False, -1, "none", 0, 1)
    with pytest.raises(ValueError):
        _kernels.accumulate_part(3, 2, False, -1, "none", 0, 1)
    with pytest.raises(ValueError):
        _kernels.accumulate_part(0, 1, False, -1, "none", 0, 1)
