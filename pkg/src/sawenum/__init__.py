"""Exact enumeration of self-avoiding walks on the simple cubic lattice.

The centerpiece is length doubling: the number of walks of length 2N
(and their summed squared end-to-end distance) is assembled exactly from
statistics of length-N walks via inclusion-exclusion over shared
visited-site subsets, at a cost of roughly (2 mu)^N instead of mu^(2N).
A direct depth-first enumerator serves as the oracle, a 48-fold symmetry
mode shrinks the subset store, and partitioned execution with mergeable
checkpoints keeps memory bounded and runs parallel.  A separate analysis
layer extracts critical exponents from the resulting exact series.
"""

from .analysis import (
    FitParams,
    SeriesTable,
    derived_exponents,
    eval_model,
    fit_series,
    nu_estimate,
    reference_series,
    residual_sum,
    theta_estimate,
)
from .counters import (
    CounterStore,
    CounterStoreBuilder,
    SplitSpec,
    SubsetRecord,
    accumulate_walk,
    merge,
    merge_many,
    split_filter,
    subset_iteration,
)
from .doubling import (
    CombineResult,
    DoublingResult,
    build_store,
    combine_unequal,
    finalize_from_checkpoints,
    p2n,
    run_combine,
    run_doubling,
    run_doubling_part,
    z2n,
)
from .errors import ExactnessError, SawError, SeriesError, StoreMismatchError
from .lattice import (
    ORIGIN,
    CanonicalSubset,
    Point,
    SymOp,
    apply_op,
    canonicalize,
    compose,
    decode,
    encode,
    invert,
    octahedral_group,
)
from .walker import (
    STEP_ORDER,
    DirectResult,
    Walk,
    direct_count,
    end_to_end_sq,
    enumerate_walks,
    iter_walks,
)

__version__ = "0.1.0"
